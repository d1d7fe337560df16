#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace narrdyn::io {

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

// Shortest decimal form that round-trips the exact double value.
std::string format_double(double v);

// FNV-1a over raw bytes, hex encoded; used for manifest input/output hashes.
std::string fnv1a_hex(const std::string& bytes);
std::string hash_file(const std::filesystem::path& path);

// CSV helper: one row of doubles, single separator, round-trip formatting.
std::string csv_row(const std::vector<double>& values, char sep = ',');

}  // namespace narrdyn::io
