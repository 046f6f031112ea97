// Copyright 2026 The oodppo Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

namespace oodppo {

// Shortest round-trip decimal form (std::to_chars); "nan"/"inf" spelled out.
std::string format_double(double v);

// RFC 4180 CSV writer: header row, CRLF line endings, quoting only when
// needed. write() appends one record.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);

  void write(const std::vector<std::string>& fields);
  const std::string& str() const { return buf_; }
  void save(const std::string& path) const;

 private:
  void append_record(const std::vector<std::string>& fields);
  std::size_t width_;
  std::string buf_;
};

// Minimal reader for our own files (handles quotes and CRLF).
std::vector<std::vector<std::string>> parse_csv(const std::string& text);

}  // namespace oodppo
