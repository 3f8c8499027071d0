#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace eprqkd {

/// Measurement basis: x images the crystal plane, p is its Fourier transform.
enum class Basis : std::uint8_t { x = 0, p = 1 };

enum class Side : std::uint8_t { A = 0, B = 1 };

inline constexpr std::array<Basis, 2> kBases{Basis::x, Basis::p};

constexpr Basis other(Basis b) { return b == Basis::x ? Basis::p : Basis::x; }

std::string_view to_string(Basis b);
std::string_view to_string(Side s);

/// Accepts "x" or "p".
Basis parse_basis(std::string_view text);

/// One detector at one station, e.g. "Ax1" or "Bp2". `index` is 0 or 1; the
/// printed label is 1-based to match the usual detector naming.
struct DetectorLabel {
  Side side = Side::A;
  Basis basis = Basis::x;
  int index = 0;

  /// Position of this detector in the 4-wide {x1, x2, p1, p2} ordering.
  int channel() const { return static_cast<int>(basis) * 2 + index; }

  std::string str() const;
  static DetectorLabel parse(std::string_view text);
  static DetectorLabel from_channel(Side side, int channel);

  friend bool operator==(const DetectorLabel&, const DetectorLabel&) = default;
};

}  // namespace eprqkd
