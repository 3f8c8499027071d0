#include "eprqkd/basis.hpp"

#include "eprqkd/errors.hpp"

namespace eprqkd {

std::string_view to_string(Basis b) { return b == Basis::x ? "x" : "p"; }

std::string_view to_string(Side s) { return s == Side::A ? "A" : "B"; }

Basis parse_basis(std::string_view text) {
  if (text == "x") return Basis::x;
  if (text == "p") return Basis::p;
  throw ValidationError("unknown basis '" + std::string(text) + "' (expected x or p)");
}

std::string DetectorLabel::str() const {
  std::string out;
  out += to_string(side);
  out += to_string(basis);
  out += static_cast<char>('1' + index);
  return out;
}

DetectorLabel DetectorLabel::parse(std::string_view text) {
  if (text.size() != 3) {
    throw ValidationError("bad detector label '" + std::string(text) + "'");
  }
  DetectorLabel label;
  if (text[0] == 'A') {
    label.side = Side::A;
  } else if (text[0] == 'B') {
    label.side = Side::B;
  } else {
    throw ValidationError("bad detector label '" + std::string(text) + "' (side must be A or B)");
  }
  label.basis = parse_basis(text.substr(1, 1));
  if (text[2] != '1' && text[2] != '2') {
    throw ValidationError("bad detector label '" + std::string(text) + "' (index must be 1 or 2)");
  }
  label.index = text[2] - '1';
  return label;
}

DetectorLabel DetectorLabel::from_channel(Side side, int channel) {
  return DetectorLabel{side, channel < 2 ? Basis::x : Basis::p, channel % 2};
}

}  // namespace eprqkd
