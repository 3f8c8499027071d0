#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "eprqkd/qber.hpp"

namespace eprqkd {

/// CoincidenceTable CSV: a header row and a label column. Either orientation
/// is accepted: header Ax1,Ax2,Ap1,Ap2 with rows Bx1..Bp2 (Bob down the side,
/// as published) or the transpose. Labels may appear in any order.
///
///   Bob/Alice,Ax1,Ax2,Ap1,Ap2
///   Bx1,943,72,700,655
///   ...
///
/// Throws ParseError with line/column context on malformed input.
CoincidenceTable parse_table_csv(std::string_view text);
CoincidenceTable read_table_csv(const std::filesystem::path& path);

/// Writes Bob-rows / Alice-columns layout.
std::string format_table_csv(const CoincidenceTable& table);

}  // namespace eprqkd
