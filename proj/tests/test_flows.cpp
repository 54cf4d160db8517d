#include <algorithm>
#include <cmath>
#include <map>

#include <doctest.h>

#include "fixtures.hpp"
#include "laborflow/community.hpp"
#include "laborflow/flows.hpp"
#include "laborflow/rng.hpp"
#include "oracles.hpp"

using namespace laborflow;

namespace {

std::vector<FlowRecord> three_occupation_rows() {
  return {
      {"A", "B", 5, ""}, {"A", "B", 3, ""}, {"B", "C", 2, ""},
      {"C", "A", 7, ""}, {"A", "A", 4, ""}, {"C", "B", 1, ""},
  };
}

CommunityAssignment single_community(const FlowCounts& counts) {
  CommunityAssignment ca;
  ca.occupations = counts.occupations;
  ca.membership.assign(counts.size(), 0);
  ca.n_communities = 1;
  return ca;
}

}  // namespace

TEST_CASE("ingest aggregates counts additively") {
  const FlowCounts fc = ingest_counts({{"A", "B", 5, ""}, {"A", "B", 3, ""}});
  REQUIRE(fc.size() == 2);
  CHECK(fc.counts(*fc.index_of("B"), *fc.index_of("A")) == 8);
  CHECK(fc.counts(*fc.index_of("A"), *fc.index_of("B")) == 0);
}

TEST_CASE("ingest routes sentinels to the boundary tallies") {
  const FlowCounts fc = ingest_counts({{"ENTRY", "A", 4, ""}, {"A", "B", 1, ""}});
  CHECK(fc.entry_counts[*fc.index_of("A")] == 4);
  CHECK(fc.exit_counts[*fc.index_of("A")] == 0);
  std::int64_t matrix_total = fc.total();
  CHECK(matrix_total == 1);  // the ENTRY row must not touch the matrix
}

TEST_CASE("ingest matches a hand-summed fixture") {
  const FlowCounts fc = ingest_counts(three_occupation_rows());
  REQUIRE(fc.size() == 3);
  const std::size_t a = *fc.index_of("A"), b = *fc.index_of("B"), c = *fc.index_of("C");
  CHECK(fc.counts(b, a) == 8);
  CHECK(fc.counts(c, b) == 2);
  CHECK(fc.counts(a, c) == 7);
  CHECK(fc.counts(a, a) == 4);
  CHECK(fc.counts(b, c) == 1);
  CHECK(fc.counts(c, a) == 0);
  CHECK(fc.total() == 22);
}

TEST_CASE("ingest is invariant under row permutation") {
  std::vector<FlowRecord> rows = three_occupation_rows();
  const FlowCounts reference = ingest_counts(rows);
  Rng rng(99);
  for (int trial = 0; trial < 10; ++trial) {
    for (std::size_t i = rows.size(); i > 1; --i)
      std::swap(rows[i - 1], rows[rng.below(i)]);
    const FlowCounts shuffled = ingest_counts(rows);
    CHECK(shuffled.counts == reference.counts);
    CHECK(shuffled.entry_counts == reference.entry_counts);
  }
}

TEST_CASE("ingest splits tagged rows per group") {
  const FlowCounts fc = ingest_counts(
      {{"A", "B", 5, "2012"}, {"A", "B", 2, "2013"}, {"B", "A", 1, ""}});
  REQUIRE(fc.tags.count("2012") == 1);
  REQUIRE(fc.tags.count("2013") == 1);
  const FlowCounts& y12 = fc.tags.at("2012");
  CHECK(y12.occupations == fc.occupations);
  CHECK(y12.counts(*y12.index_of("B"), *y12.index_of("A")) == 5);
  CHECK(fc.counts(*fc.index_of("B"), *fc.index_of("A")) == 7);  // aggregate keeps all
}

TEST_CASE("ingest rejects bad rows with their index") {
  CHECK_THROWS_WITH_AS(ingest_counts({{"A", "B", 1, ""}, {"A", "B", -2, ""}}),
                       doctest::Contains("row 2"), InputError);
  CHECK_THROWS_WITH_AS(ingest_counts({{"", "B", 1, ""}}), doctest::Contains("row 1"),
                       InputError);
  CHECK_THROWS_AS(ingest_counts({{"EXIT", "B", 1, ""}}), InputError);
  CHECK_THROWS_AS(ingest_counts({{"A", "ENTRY", 1, ""}}), InputError);
  CHECK_THROWS_AS(ingest_counts({{"ENTRY", "EXIT", 1, ""}}), InputError);
}

TEST_CASE("theta=0 reduces to column normalization") {
  CountGrid counts(2, 2, 0);
  counts(0, 0) = 4;
  counts(1, 0) = 6;   // column sums 10
  counts(0, 1) = 15;
  counts(1, 1) = 5;   // column sums 20
  const TransitionMatrix tm = build_transition_matrix(fixtures::counts_from(counts), 0.0);
  CHECK(tm.probs(0, 0) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(tm.probs(1, 0) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(tm.probs(0, 1) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(tm.theta == 0.0);
  CHECK(tm.self_loops == SelfLoops::included);
}

TEST_CASE("theta filter removes sub-threshold links and renormalizes") {
  // Origin X00 has outflow 10 (self-loop included); the weight-2 link falls
  // below theta=0.25 * 10 and must go.
  CountGrid counts(4, 4, 0);
  counts(0, 0) = 3;
  counts(1, 0) = 5;
  counts(2, 0) = 2;  // 2 < 2.5: removed
  counts(1, 1) = 1;
  counts(2, 2) = 1;
  counts(3, 3) = 1;
  const FlowCounts fc = fixtures::counts_from(counts);
  const TransitionMatrix tm = build_transition_matrix(fc, 0.25);
  CHECK(tm.probs(2, 0) == 0.0);
  CHECK(tm.probs(0, 0) == doctest::Approx(3.0 / 8.0).epsilon(1e-15));
  CHECK(tm.probs(1, 0) == doctest::Approx(5.0 / 8.0).epsilon(1e-15));

  // Brute-force oracle: recompute filter-then-normalize for every column.
  for (std::size_t j = 0; j < 4; ++j) {
    double out = 0.0;
    for (std::size_t i = 0; i < 4; ++i) out += static_cast<double>(counts(i, j));
    double kept = 0.0;
    for (std::size_t i = 0; i < 4; ++i)
      if (counts(i, j) > 0 && static_cast<double>(counts(i, j)) >= 0.25 * out)
        kept += static_cast<double>(counts(i, j));
    for (std::size_t i = 0; i < 4; ++i) {
      const double expected =
          (counts(i, j) > 0 && static_cast<double>(counts(i, j)) >= 0.25 * out)
              ? static_cast<double>(counts(i, j)) / kept
              : 0.0;
      CHECK(tm.probs(i, j) == doctest::Approx(expected).epsilon(1e-15));
    }
  }
}

TEST_CASE("theta=0.01 behaves as a one-percent flow filter") {
  CountGrid counts(3, 3, 0);
  counts(0, 0) = 9890;
  counts(1, 0) = 100;  // exactly 1% of 10000: kept (strictly-below rule)
  counts(2, 0) = 10;   // 0.1%: removed
  counts(0, 1) = 1;
  counts(0, 2) = 1;
  const TransitionMatrix tm =
      build_transition_matrix(fixtures::counts_from(counts), 0.01);
  CHECK(tm.probs(1, 0) > 0.0);
  CHECK(tm.probs(2, 0) == 0.0);
}

TEST_CASE("origins with no surviving outflow become absorbing") {
  CountGrid counts(3, 3, 0);
  counts(0, 0) = 99;
  counts(1, 0) = 1;
  counts(0, 1) = 1;  // origin X01 only has one tiny link; theta kills nothing here
  const FlowCounts fc = fixtures::counts_from(counts);
  const TransitionMatrix tm = build_transition_matrix(fc, 0.0);
  // X02 had no outflow at all: absorbing and reported.
  CHECK(tm.probs(2, 2) == 1.0);
  REQUIRE(tm.dangling.size() == 1);
  CHECK(tm.dangling[0] == "X02");
}

TEST_CASE("column stochasticity holds after construction") {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + rng.below(8);
    CountGrid counts(n, n, 0);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i)
        if (rng.uniform() < 0.6) counts(i, j) = 1 + static_cast<std::int64_t>(rng.below(50));
    const double theta = rng.uniform() * 0.3;
    const TransitionMatrix tm =
        build_transition_matrix(fixtures::counts_from(counts), theta);
    for (std::size_t j = 0; j < n; ++j) {
      double sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) sum += tm.probs(i, j);
      CHECK(std::abs(sum - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("raising theta never adds off-diagonal links") {
  Rng rng(11);
  CountGrid counts(6, 6, 0);
  for (std::size_t j = 0; j < 6; ++j)
    for (std::size_t i = 0; i < 6; ++i)
      if (rng.uniform() < 0.7) counts(i, j) = 1 + static_cast<std::int64_t>(rng.below(40));
  const FlowCounts fc = fixtures::counts_from(counts);
  std::size_t previous = SIZE_MAX;
  for (double theta : {0.0, 0.05, 0.1, 0.2, 0.4}) {
    const TransitionMatrix tm = build_transition_matrix(fc, theta);
    std::size_t nonzero = 0;
    for (std::size_t j = 0; j < 6; ++j)
      for (std::size_t i = 0; i < 6; ++i)
        if (i != j && tm.probs(i, j) > 0.0) ++nonzero;
    CHECK(nonzero <= previous);
    previous = nonzero;
  }
}

TEST_CASE("build rejects bad inputs") {
  CHECK_THROWS_AS(build_transition_matrix(FlowCounts{}, 0.0), InputError);
  CountGrid counts(2, 2, 0);
  counts(0, 1) = 1;
  counts(1, 0) = 1;
  CHECK_THROWS_AS(build_transition_matrix(fixtures::counts_from(counts), 1.0),
                  InputError);
  CHECK_THROWS_AS(build_transition_matrix(fixtures::counts_from(counts), -0.1),
                  InputError);
}

TEST_CASE("strip_self_loops zeroes the diagonal and renormalizes") {
  Matrix probs(2, 2, 0.0);
  probs(0, 0) = 0.5;
  probs(1, 0) = 0.5;
  probs(1, 1) = 1.0;
  const TransitionMatrix tm = fixtures::matrix_from(probs, SelfLoops::included);
  const TransitionMatrix stripped = strip_self_loops(tm);
  CHECK(stripped.self_loops == SelfLoops::excluded);
  CHECK(stripped.probs(0, 0) == 0.0);
  CHECK(stripped.probs(1, 0) == 1.0);
  REQUIRE(stripped.degenerate.size() == 1);
  CHECK(stripped.degenerate[0] == "X01");  // pure self-loop column zeroed
}

TEST_CASE("stripping the identity reports every column degenerate") {
  Matrix probs(2, 2, 0.0);
  probs(0, 0) = 1.0;
  probs(1, 1) = 1.0;
  const TransitionMatrix stripped =
      strip_self_loops(fixtures::matrix_from(probs, SelfLoops::included));
  CHECK(stripped.degenerate.size() == 2);
  for (std::size_t j = 0; j < 2; ++j)
    for (std::size_t i = 0; i < 2; ++i) CHECK(stripped.probs(i, j) == 0.0);
}

TEST_CASE("strip matches a dense recompute and is idempotent") {
  const TransitionMatrix tm = fixtures::random_stochastic(5, 21);
  const TransitionMatrix stripped = strip_self_loops(tm);
  for (std::size_t j = 0; j < 5; ++j) {
    double off = 0.0;
    for (std::size_t i = 0; i < 5; ++i)
      if (i != j) off += tm.probs(i, j);
    for (std::size_t i = 0; i < 5; ++i) {
      const double expected = i == j ? 0.0 : tm.probs(i, j) / off;
      CHECK(std::abs(stripped.probs(i, j) - expected) < 1e-15);
    }
  }
  const TransitionMatrix twice = strip_self_loops(stripped);
  CHECK(twice.probs == stripped.probs);
  CHECK(twice.degenerate == stripped.degenerate);
}

TEST_CASE("entry/exit shares: all inflow from outside gives share 1") {
  CountGrid counts(2, 2, 0);
  FlowCounts fc = fixtures::counts_from(counts);
  fc.entry_counts = {3, 2};
  const auto shares = entry_exit_shares(fc, single_community(fc));
  REQUIRE(shares.size() == 1);
  REQUIRE(shares[0].inflow_from_outside.has_value());
  CHECK(*shares[0].inflow_from_outside == 1.0);
  CHECK_FALSE(shares[0].outflow_to_outside.has_value());  // no departures at all
}

TEST_CASE("entry/exit shares hit a constructed 0.473") {
  // 473 entries against 527 off-diagonal arrivals: share = 0.473 exactly.
  CountGrid counts(2, 2, 0);
  counts(0, 1) = 527;
  counts(1, 1) = 99;  // stayers are not transitions and must not count
  FlowCounts fc = fixtures::counts_from(counts);
  fc.entry_counts = {473, 0};
  const auto shares = entry_exit_shares(fc, single_community(fc));
  REQUIRE(shares[0].inflow_from_outside.has_value());
  CHECK(std::abs(*shares[0].inflow_from_outside - 0.473) < 1e-12);
}

TEST_CASE("entry/exit shares match a hand recompute on a random fixture") {
  Rng rng(5);
  const std::size_t n = 6;
  CountGrid counts(n, n, 0);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i)
      counts(i, j) = static_cast<std::int64_t>(rng.below(30));
  FlowCounts fc = fixtures::counts_from(counts);
  for (std::size_t v = 0; v < n; ++v) {
    fc.entry_counts[v] = static_cast<std::int64_t>(rng.below(20));
    fc.exit_counts[v] = static_cast<std::int64_t>(rng.below(20));
  }
  CommunityAssignment ca;
  ca.occupations = fc.occupations;
  ca.membership = {0, 1, 0, 1, 0, 1};
  ca.n_communities = 2;
  const auto shares = entry_exit_shares(fc, ca);

  for (int community = 0; community < 2; ++community) {
    std::int64_t entries = 0, exits = 0, arrivals = 0, departures = 0;
    for (std::size_t v = 0; v < n; ++v) {
      if (ca.membership[v] != community) continue;
      entries += fc.entry_counts[v];
      exits += fc.exit_counts[v];
      for (std::size_t j = 0; j < n; ++j)
        if (j != v) arrivals += counts(v, j);
      for (std::size_t i = 0; i < n; ++i)
        if (i != v) departures += counts(i, v);
    }
    CHECK(*shares[community].inflow_from_outside ==
          doctest::Approx(static_cast<double>(entries) /
                          static_cast<double>(entries + arrivals))
              .epsilon(1e-14));
    CHECK(*shares[community].outflow_to_outside ==
          doctest::Approx(static_cast<double>(exits) /
                          static_cast<double>(exits + departures))
              .epsilon(1e-14));
  }
}

namespace {

std::map<std::string, TransitionMatrix> year_pair(const Matrix& base_probs,
                                                  const Matrix& t_probs) {
  std::map<std::string, TransitionMatrix> by_year;
  by_year.emplace("2012", fixtures::matrix_from(base_probs, SelfLoops::included));
  by_year.emplace("2013", fixtures::matrix_from(t_probs, SelfLoops::included));
  return by_year;
}

}  // namespace

TEST_CASE("temporal stability: identical matrices give (0, 1) exactly") {
  const TransitionMatrix tm = fixtures::random_stochastic(5, 33);
  const auto sc = temporal_stability(year_pair(tm.probs, tm.probs), "2012");
  REQUIRE(sc.years == std::vector<std::string>{"2013"});
  for (std::size_t v = 0; v < 5; ++v) {
    REQUIRE(sc.cells[0][v].has_value());
    CHECK(std::abs(sc.cells[0][v]->alpha) < 1e-12);
    CHECK(std::abs(sc.cells[0][v]->beta - 1.0) < 1e-12);
    CHECK(sc.cells[0][v]->n_points == 5);
  }
}

TEST_CASE("temporal stability recovers an exact doubling") {
  // Rows X00 and X01 of the 2013 matrix are exactly twice the base rows.
  Matrix base(4, 4, 0.0), doubled(4, 4, 0.0);
  const double base_cols[4][4] = {{0.0, 0.1, 0.3, 0.6},
                                  {0.1, 0.0, 0.2, 0.7},
                                  {0.2, 0.1, 0.0, 0.7},
                                  {0.15, 0.25, 0.1, 0.5}};
  const double t_cols[4][4] = {{0.0, 0.2, 0.2, 0.6},
                               {0.2, 0.0, 0.1, 0.7},
                               {0.4, 0.2, 0.0, 0.4},
                               {0.3, 0.5, 0.1, 0.1}};
  for (std::size_t j = 0; j < 4; ++j)
    for (std::size_t i = 0; i < 4; ++i) {
      base(i, j) = base_cols[j][i];
      doubled(i, j) = t_cols[j][i];
    }
  const auto sc = temporal_stability(year_pair(base, doubled), "2012");
  for (std::size_t row : {std::size_t{0}, std::size_t{1}}) {
    REQUIRE(sc.cells[0][row].has_value());
    CHECK(std::abs(sc.cells[0][row]->beta - 2.0) < 1e-12);
    CHECK(std::abs(sc.cells[0][row]->alpha) < 1e-12);
  }
}

TEST_CASE("temporal stability matches the closed-form OLS oracle") {
  Rng rng(55);
  const std::size_t n = 6;
  Matrix base(n, n, 0.0), noisy(n, n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double sb = 0.0, sn = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      base(i, j) = 0.1 + rng.uniform();
      noisy(i, j) = base(i, j) * 1.3 + 0.05 * rng.uniform();
      sb += base(i, j);
      sn += noisy(i, j);
    }
    for (std::size_t i = 0; i < n; ++i) {
      base(i, j) /= sb;
      noisy(i, j) /= sn;
    }
  }
  const auto sc = temporal_stability(year_pair(base, noisy), "2012");
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> xs, ys;
    for (std::size_t j = 0; j < n; ++j) {
      xs.push_back(base(i, j));
      ys.push_back(noisy(i, j));
    }
    const oracles::OlsFit fit = oracles::ols_bruteforce(xs, ys);
    REQUIRE(sc.cells[0][i].has_value());
    CHECK(std::abs(sc.cells[0][i]->beta - fit.beta) < 1e-10);
    CHECK(std::abs(sc.cells[0][i]->alpha - fit.alpha) < 1e-10);
  }
}

TEST_CASE("temporal stability flags rows with too few points") {
  Matrix base(3, 3, 0.0), other(3, 3, 0.0);
  // Destination X00 has exactly one supported origin: no regression.
  base(0, 0) = 1.0;
  base(1, 1) = 1.0;
  base(2, 2) = 1.0;
  other(0, 0) = 1.0;
  other(1, 1) = 1.0;
  other(2, 2) = 1.0;
  const auto sc = temporal_stability(year_pair(base, other), "2012");
  CHECK_FALSE(sc.cells[0][0].has_value());
  CHECK(sc.skipped.size() == 3);
  CHECK_THROWS_AS(temporal_stability(year_pair(base, other), "1999"), InputError);
}
