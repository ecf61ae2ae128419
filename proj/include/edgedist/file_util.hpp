#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace edgedist {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temp file and renames it over `path` on success, so a
/// failed run never leaves a partial file behind.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::vector<std::string> split_lines(std::string_view text);

/// Splits one CSV record. Double-quoted fields may contain commas.
std::vector<std::string> split_csv(std::string_view line);

std::string_view trim(std::string_view s);

}  // namespace edgedist
