#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "eprqkd/analysis.hpp"

namespace eprqkd {

/// Scan CSV: header `position_mm,counts`, then one row per grid point.
/// Lines starting with '#' are ignored. Only positions and counts are stored;
/// the fixed detector and bases are left at their defaults.
ScanData parse_scan_csv(std::string_view text);
ScanData read_scan_csv(const std::filesystem::path& path);

std::string format_scan_csv(const ScanData& scan);

}  // namespace eprqkd
