#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace eprqkd::cli {

std::string sha256_hex(std::string_view data);

std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file, then renames it over `path`.
void write_atomic(const std::filesystem::path& path, std::string_view contents);

enum class ChecksumStatus { verified, no_sidecar, skipped };

std::string_view to_string(ChecksumStatus status);

/// Compares the file's SHA-256 with `<path>.sha256` (first whitespace-separated
/// token, hex). Throws ValidationError on mismatch. A missing sidecar is not
/// an error.
ChecksumStatus verify_checksum(const std::filesystem::path& path, bool skip);

}  // namespace eprqkd::cli
