#include "eprqkd/scan_io.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "eprqkd/errors.hpp"

namespace eprqkd {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
}

[[noreturn]] void fail(std::size_t line, std::size_t column, const std::string& msg) {
  std::ostringstream os;
  os << "scan CSV line " << line;
  if (column > 0) os << ", column " << column;
  os << ": " << msg;
  throw ParseError(os.str());
}

template <typename T>
T number(std::string_view field, std::size_t line, std::size_t column) {
  T value{};
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
    fail(line, column, "bad number '" + std::string(field) + "'");
  }
  return value;
}

}  // namespace

ScanData parse_scan_csv(std::string_view text) {
  ScanData scan;
  bool header = false;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto nl = text.find('\n', start);
    const auto line = trim(text.substr(start, nl == std::string_view::npos ? nl : nl - start));
    ++line_no;
    start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    if (line.empty() || line.front() == '#') continue;

    const auto comma = line.find(',');
    if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos) {
      fail(line_no, 0, "expected 2 fields");
    }
    const auto a = trim(line.substr(0, comma));
    const auto b = trim(line.substr(comma + 1));
    if (!header) {
      if (a != "position_mm" || b != "counts") {
        fail(line_no, 0, "header must be 'position_mm,counts'");
      }
      header = true;
      continue;
    }
    scan.positions_mm.push_back(number<double>(a, line_no, 1));
    scan.counts.push_back(number<std::uint64_t>(b, line_no, 2));
  }
  if (!header) throw ParseError("scan CSV: missing header 'position_mm,counts'");
  return scan;
}

ScanData read_scan_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open scan file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scan_csv(buf.str());
}

std::string format_scan_csv(const ScanData& scan) {
  scan.validate();
  std::ostringstream os;
  os << "position_mm,counts\n" << std::setprecision(10);
  for (std::size_t i = 0; i < scan.size(); ++i) {
    os << scan.positions_mm[i] << ',' << scan.counts[i] << '\n';
  }
  return os.str();
}

}  // namespace eprqkd
