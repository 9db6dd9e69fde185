// Copyright 2026 The FuncGNN Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace funcgnn {

/// Shortest representation that round-trips a double exactly.
std::string format_real(double value);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& content);

/// Splits one CSV line on commas; no quoting, fields are trimmed.
std::vector<std::string> split_csv_line(const std::string& line);
/// Non-empty lines of a CSV file, '#' comment lines dropped.
std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path);

std::string sha256_hex(const std::string& bytes);

/// Current UTC time, ISO-8601 with seconds.
std::string utc_timestamp();

double parse_double(const std::string& text);
int64_t parse_int(const std::string& text);

}  // namespace funcgnn
