#include "eprqkd/qber.hpp"

#include <cmath>

#include "eprqkd/errors.hpp"

namespace eprqkd {

namespace {

int ch(Basis b, int det) { return static_cast<int>(b) * 2 + det; }

double binomial_sd(double q, double n) { return n > 0 ? std::sqrt(q * (1.0 - q) / n) : 0.0; }

std::optional<double> basis_qber(const CoincidenceTable& t, Basis b) {
  const auto n = t.block_total(b, b);
  if (n == 0) return std::nullopt;
  return static_cast<double>(t.wrong(b)) / static_cast<double>(n);
}

}  // namespace

std::uint64_t CoincidenceTable::block_total(Basis a, Basis b) const {
  std::uint64_t n = 0;
  for (int s = 0; s < 2; ++s)
    for (int t = 0; t < 2; ++t) n += counts_[ch(a, s)][ch(b, t)];
  return n;
}

std::uint64_t CoincidenceTable::wrong(Basis b) const {
  return counts_[ch(b, 0)][ch(b, 1)] + counts_[ch(b, 1)][ch(b, 0)];
}

std::uint64_t CoincidenceTable::right(Basis b) const {
  return counts_[ch(b, 0)][ch(b, 0)] + counts_[ch(b, 1)][ch(b, 1)];
}

std::uint64_t CoincidenceTable::total() const {
  std::uint64_t n = 0;
  for (const auto& row : counts_)
    for (auto c : row) n += c;
  return n;
}

std::uint64_t CoincidenceTable::alice_tally(int channel) const {
  std::uint64_t n = 0;
  for (auto c : counts_[channel]) n += c;
  return n;
}

std::uint64_t CoincidenceTable::bob_tally(int channel) const {
  std::uint64_t n = 0;
  for (const auto& row : counts_) n += row[channel];
  return n;
}

QberReport qber_from_counts(const CoincidenceTable& table) {
  QberReport r;
  r.p_wrong = static_cast<double>(table.wrong(Basis::x) + table.wrong(Basis::p));
  r.p_right = static_cast<double>(table.right(Basis::x) + table.right(Basis::p));
  r.denominator = r.p_wrong + r.p_right;
  if (r.denominator == 0.0) throw ValidationError("QBER undefined: no same-basis coincidences");
  r.qber = r.p_wrong / r.denominator;
  r.qber_xx = basis_qber(table, Basis::x);
  r.qber_pp = basis_qber(table, Basis::p);
  r.uncertainty = binomial_sd(r.qber, r.denominator);
  return r;
}

void ResendProbabilities::validate() const {
  const auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in_unit(same_basis_correct) || !in_unit(cross_basis[0]) || !in_unit(cross_basis[1])) {
    throw ValidationError("resend probabilities must lie in [0, 1]");
  }
  if (cross_basis[0] + cross_basis[1] > 1.0 + 1e-12) {
    throw ValidationError("cross-basis resend probabilities sum to more than 1");
  }
}

QberReport qber_with_eve_prediction(const CoincidenceTable& table,
                                    const std::array<double, 2>& cross_basis) {
  for (double p : cross_basis) {
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("resend probability outside [0, 1]");
  }
  QberReport r;
  const double total = static_cast<double>(table.total());
  if (total == 0.0) throw ValidationError("QBER undefined: empty coincidence table");

  double chi = 0.0;
  for (Basis a : kBases) {
    const Basis b = other(a);
    for (int s = 0; s < 2; ++s)
      for (int t = 0; t < 2; ++t)
        chi += cross_basis[t] * static_cast<double>(table.at(ch(a, s), ch(b, t)));
  }
  r.chi = chi;
  r.p_wrong = static_cast<double>(table.wrong(Basis::x) + table.wrong(Basis::p));
  r.p_right = static_cast<double>(table.right(Basis::x) + table.right(Basis::p));
  r.denominator = total;
  r.qber = (r.p_wrong + chi) / total;
  r.qber_xx = basis_qber(table, Basis::x);
  r.qber_pp = basis_qber(table, Basis::p);
  r.uncertainty = binomial_sd(r.qber, total);
  return r;
}

QberReport qber_with_eve_prediction(const CoincidenceTable& table, double p_resend) {
  return qber_with_eve_prediction(table, std::array<double, 2>{p_resend, p_resend});
}

double three_party_probability(const CoincidenceTable& table, Basis i, Basis j, Basis k, int s,
                               int t, const ResendProbabilities& resend) {
  resend.validate();
  const double total = static_cast<double>(table.total());
  if (total == 0.0) throw ValidationError("cannot normalize an empty coincidence table");
  const double r_ik = static_cast<double>(table.at(ch(i, s), ch(k, t))) / total;
  return r_ik * resend.bob_detects(j, t, k);
}

bool abort_decision(const QberReport& report, double threshold) {
  return report.qber > threshold;
}

}  // namespace eprqkd
