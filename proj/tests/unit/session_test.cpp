#include <algorithm>

#include <gtest/gtest.h>

#include "eprqkd/errors.hpp"
#include "eprqkd/session.hpp"
#include "fixtures.hpp"

namespace eprqkd {
namespace {

using testing::default_experiment;

SessionConfig small(std::uint64_t n = 4000, std::uint64_t m = 400) {
  SessionConfig c;
  c.coincidences = n;
  c.estimation_pairs = m;
  return c;
}

PairEvent event(Basis a, Basis b, int da, int db) {
  return PairEvent{a, b, outcome_for_index(da), outcome_for_index(db), std::nullopt};
}

TEST(SessionConfig, Validation) {
  EXPECT_NO_THROW(SessionConfig{}.validate());
  auto c = small();
  c.coincidences = 0;
  EXPECT_THROW(c.validate(), ValidationError);
  c = small(1000, 500);
  EXPECT_THROW(c.validate(), ValidationError);
  c = small(1000, 0);
  EXPECT_THROW(c.validate(), ValidationError);
  c = small();
  c.qber_threshold = 1.0;
  EXPECT_THROW(c.validate(), ValidationError);
  c = small();
  c.max_pairs_factor = 0;
  EXPECT_THROW(c.validate(), ValidationError);
  EXPECT_EQ(parse_accumulation("free_running"), Accumulation::free_running);
  EXPECT_THROW(parse_accumulation("eager"), ValidationError);
}

TEST(Sift, KeepsSameBasisInOrder) {
  const std::vector<PairEvent> ev{event(Basis::x, Basis::x, 0, 0), event(Basis::x, Basis::p, 0, 1),
                                  event(Basis::p, Basis::p, 1, 0), event(Basis::p, Basis::x, 1, 1)};
  const auto idx = sift_indices(ev);
  EXPECT_EQ(idx, (std::vector<std::size_t>{0, 2}));
  const auto kept = sift(ev);
  ASSERT_EQ(kept.size(), 2u);
  EXPECT_TRUE(kept[1].disagree());
  EXPECT_FALSE(kept[0].disagree());
  const auto t = tabulate(ev);
  EXPECT_EQ(t.total(), 4u);
  EXPECT_EQ(t.at(DetectorLabel::parse("Ap2"), DetectorLabel::parse("Bp1")), 1u);
  const std::vector<std::size_t> subset{1, 3};
  EXPECT_EQ(tabulate(ev, subset).block_total(Basis::x, Basis::x), 0u);
}

TEST(RunSession, PerfectCorrelationGivesIdenticalKeys) {
  const auto source = build_source({0.0, 2.0, 0.0, 40.0}, {}, BuildOptions{false});
  // x readouts are identical; p readouts are mirrored.
  const auto st = testing::simple_stations({1, 2}, {-1, -2}, {1, 2}, {1, 2});
  const auto r = run_session(source, st, small(2000, 200));
  EXPECT_FALSE(r.aborted);
  EXPECT_EQ(r.estimate.qber, 0.0);
  EXPECT_EQ(r.key_A, r.key_B);
  EXPECT_EQ(r.key_disagreement(), 0.0);
}

TEST(RunSession, DeterministicInSeed) {
  const auto& e = default_experiment();
  const auto a = run_session(e.source, e.stations, small());
  const auto b = run_session(e.source, e.stations, small());
  EXPECT_EQ(a.key_A, b.key_A);
  EXPECT_EQ(a.table, b.table);
  EXPECT_EQ(a.emitted_pairs, b.emitted_pairs);
  auto c = small();
  c.seed = 43;
  EXPECT_NE(run_session(e.source, e.stations, c).key_A, a.key_A);
}

TEST(RunSession, BookkeepingIsConsistent) {
  const auto& e = default_experiment();
  const auto cfg = small();
  const auto r = run_session(e.source, e.stations, cfg);
  ASSERT_EQ(r.events.size(), cfg.coincidences);
  EXPECT_EQ(r.table, tabulate(r.events));
  EXPECT_EQ(r.table.total(), cfg.coincidences);
  EXPECT_EQ(r.sifted, sift_indices(r.events));
  EXPECT_EQ(r.estimation.size(), cfg.estimation_pairs);
  EXPECT_TRUE(std::is_sorted(r.estimation.begin(), r.estimation.end()));
  EXPECT_TRUE(std::includes(r.sifted.begin(), r.sifted.end(), r.estimation.begin(),
                            r.estimation.end()));
  EXPECT_EQ(r.key_A.size(), r.sifted.size() - cfg.estimation_pairs);
  EXPECT_EQ(r.key_B.size(), r.key_A.size());
  EXPECT_EQ(r.estimate.qber, qber_from_counts(tabulate(r.events, r.estimation)).qber);
  EXPECT_GE(r.emitted_pairs, cfg.coincidences);
  EXPECT_NEAR(r.sifted_fraction(), 0.5, 0.05);
  for (const auto& ev : r.events) {
    EXPECT_TRUE(is_click(ev.outcome_A));
    EXPECT_TRUE(is_click(ev.outcome_B));
    EXPECT_FALSE(ev.eve.has_value());
  }
}

TEST(RunSession, FreeRunningAccumulation) {
  const auto& e = default_experiment();
  auto cfg = small();
  cfg.accumulation = Accumulation::free_running;
  const auto r = run_session(e.source, e.stations, cfg);
  EXPECT_EQ(r.events.size(), cfg.coincidences);
  EXPECT_FALSE(r.aborted);
  EXPECT_LT(r.estimate.qber, 0.05);
}

TEST(RunSession, BudgetExhaustion) {
  const auto& e = default_experiment();
  auto cfg = small(1000, 100);
  cfg.max_pairs_factor = 1;
  EXPECT_THROW(run_session(e.source, e.stations, cfg), ConvergenceError);
}

TEST(RunSession, EavesdropperRaisesErrorRate) {
  const auto& e = default_experiment();
  const auto clean = run_session(e.source, e.stations, small());
  const auto attacked = run_session(e.source, e.stations, small(), AttackConfig{});
  EXPECT_GT(attacked.estimate.qber, clean.estimate.qber + 0.1);
  EXPECT_TRUE(attacked.aborted);
  EXPECT_FALSE(clean.aborted);
  for (const auto& ev : attacked.events) {
    ASSERT_TRUE(ev.eve.has_value());
    EXPECT_TRUE(is_click(ev.eve->outcome));
  }
}

}  // namespace
}  // namespace eprqkd
