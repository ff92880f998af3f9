#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace evplan {

/// Lower-case hex SHA-256 digest.
std::string sha256_hex(std::string_view data);
/// Digest of a file's bytes; throws InputDataError if it cannot be read.
std::string sha256_file(const std::filesystem::path& path);

}  // namespace evplan
