#include "eprqkd/table_io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include "eprqkd/errors.hpp"

namespace eprqkd {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

[[noreturn]] void fail(std::size_t line, std::size_t column, const std::string& msg) {
  std::ostringstream os;
  os << "table CSV line " << line;
  if (column > 0) os << ", column " << column;
  os << ": " << msg;
  throw ParseError(os.str());
}

DetectorLabel parse_label(std::string_view text, std::size_t line, std::size_t column) {
  try {
    return DetectorLabel::parse(text);
  } catch (const ValidationError&) {
    fail(line, column, "unknown detector label '" + std::string(text) + "'");
  }
}

}  // namespace

CoincidenceTable parse_table_csv(std::string_view text) {
  std::vector<std::pair<std::size_t, std::string_view>> lines;
  std::size_t number = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto nl = text.find('\n', start);
    const auto raw = text.substr(start, nl == std::string_view::npos ? nl : nl - start);
    ++number;
    const auto line = trim(raw);
    if (!line.empty() && line.front() != '#') lines.emplace_back(number, line);
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  if (lines.size() != 5) {
    std::ostringstream os;
    os << "expected a header and 4 data rows, found " << lines.size() << " non-empty rows";
    throw ParseError("table CSV: " + os.str());
  }

  const auto header = split_fields(lines[0].second);
  if (header.size() != 5) {
    fail(lines[0].first, 0, "header must have a corner cell and 4 labels, found " +
                                std::to_string(header.size()) + " fields");
  }
  std::array<DetectorLabel, 4> columns;
  for (int c = 0; c < 4; ++c) columns[c] = parse_label(header[c + 1], lines[0].first, c + 2);
  const Side column_side = columns[0].side;
  const Side row_side = column_side == Side::A ? Side::B : Side::A;

  std::array<bool, 4> seen_col{};
  for (int c = 0; c < 4; ++c) {
    if (columns[c].side != column_side) fail(lines[0].first, c + 2, "mixed sides in header");
    if (seen_col[columns[c].channel()]) fail(lines[0].first, c + 2, "duplicate header label");
    seen_col[columns[c].channel()] = true;
  }

  CoincidenceTable table;
  std::array<bool, 4> seen_row{};
  for (int r = 0; r < 4; ++r) {
    const auto [line_no, line] = lines[r + 1];
    const auto fields = split_fields(line);
    if (fields.size() != 5) {
      fail(line_no, 0, "expected 5 fields, found " + std::to_string(fields.size()));
    }
    const DetectorLabel row = parse_label(fields[0], line_no, 1);
    if (row.side != row_side) fail(line_no, 1, "row label must belong to the other station");
    if (seen_row[row.channel()]) fail(line_no, 1, "duplicate row label");
    seen_row[row.channel()] = true;

    for (int c = 0; c < 4; ++c) {
      const auto f = fields[c + 1];
      std::uint64_t value = 0;
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), value);
      if (f.empty() || ec != std::errc() || ptr != f.data() + f.size()) {
        fail(line_no, c + 2, "not a non-negative integer: '" + std::string(f) + "'");
      }
      const DetectorLabel& col = columns[c];
      const auto& alice = row_side == Side::A ? row : col;
      const auto& bob = row_side == Side::A ? col : row;
      table.at(alice.channel(), bob.channel()) = value;
    }
  }
  return table;
}

CoincidenceTable read_table_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open table file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_table_csv(buf.str());
}

std::string format_table_csv(const CoincidenceTable& table) {
  std::ostringstream os;
  os << "Bob/Alice";
  for (int a = 0; a < 4; ++a) os << ',' << DetectorLabel::from_channel(Side::A, a).str();
  os << '\n';
  for (int b = 0; b < 4; ++b) {
    os << DetectorLabel::from_channel(Side::B, b).str();
    for (int a = 0; a < 4; ++a) os << ',' << table.at(a, b);
    os << '\n';
  }
  return os.str();
}

}  // namespace eprqkd
