#pragma once

#include <string>
#include <string_view>

namespace sepconfig {

/// Lowercase hex SHA-256 digest of `data`.
std::string sha256_hex(std::string_view data);

/// Digest of a file's raw bytes. Throws Error if the file cannot be read.
std::string sha256_file(const std::string& path);

}  // namespace sepconfig
