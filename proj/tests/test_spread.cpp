#include <gtest/gtest.h>

#include "dcim/spread.hpp"
#include "dcim/verification.hpp"
#include "reference.hpp"

using namespace dcim;

namespace {

DirectedGraph path3() { return DirectedGraph(3, {{0, 1}, {1, 2}}); }
DirectedGraph diamond() { return DirectedGraph(3, {{0, 2}, {1, 2}}); }

// Right-hand side of the smoothness bound as a literal triple sum:
// over targets v outside S, nodes u on some S->v path, and attempt slots i.
double naive_tpm_rhs(const DirectedGraph& g, const ActivationModel& p, const ActivationModel& pbar,
                     const NodeSet& s) {
  const auto probs = ref::enumerate(g, p, s).attempt_prob;
  double rhs = 0.0;
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    if (s.contains(v)) continue;
    for (NodeId u : vertices_on_paths(g, s, v))
      for (std::size_t i = 1; i <= g.in_degree(u); ++i)
        rhs += probs[u][i - 1] * (pbar.attempt_prob(u, i) - p.attempt_prob(u, i));
  }
  return rhs;
}

}  // namespace

TEST(ExactSpread, Path) {
  EXPECT_NEAR(exact_spread(path3(), ActivationModel::count_dc({{}, {0.5}, {0.5}}), {0}), 1.75, 1e-12);
}

TEST(ExactSpread, Diamond) {
  EXPECT_NEAR(exact_spread(diamond(), ActivationModel::count_dc({{}, {}, {0.5, 0.25}}), {0, 1}), 2.625, 1e-12);
}

TEST(ExactSpread, AllSeeded) {
  Stream rng(1);
  DirectedGraph g = verify::random_tiny_graph(rng, 6, 14);
  std::vector<NodeId> all(g.num_nodes());
  for (NodeId v = 0; v < g.num_nodes(); ++v) all[v] = v;
  EXPECT_NEAR(exact_spread(g, verify::random_decreasing_model(g, rng), NodeSet(all)),
              static_cast<double>(g.num_nodes()), 1e-12);
}

TEST(ExactSpread, MatchesReferenceEnumeration) {
  Stream rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    DirectedGraph g = verify::random_tiny_graph(rng, 6, 12);
    auto model = verify::random_decreasing_model(g, rng);
    NodeSet s = verify::random_seeds(g.num_nodes(), 2, rng);
    const auto expected = ref::enumerate(g, model, s);
    const auto stats = exact_cascade_stats(g, model, s);
    EXPECT_NEAR(stats.spread, expected.spread, 1e-12);
    for (NodeId v = 0; v < g.num_nodes(); ++v)
      for (std::size_t i = 0; i < g.in_degree(v); ++i)
        EXPECT_NEAR(stats.observation_probs[v][i], expected.attempt_prob[v][i], 1e-12);
  }
}

TEST(ExactSpread, CapEnforced) {
  Stream rng(3);
  DirectedGraph g = generate_erdos_renyi(10, 0.5, rng);
  ASSERT_GT(g.num_slots(), 20u);
  EXPECT_THROW(exact_spread(g, homogeneous_model(g, 0.3), {0}), CapExceeded);
}

TEST(ObservationProbs, PathExample) {
  auto p = exact_observation_probs(path3(), ActivationModel::count_dc({{}, {0.5}, {0.5}}), {0});
  EXPECT_NEAR(p[1][0], 1.0, 1e-12);
  EXPECT_NEAR(p[2][0], 0.5, 1e-12);
}

TEST(ObservationProbs, PrefixMonotoneAndBounded) {
  auto r = verify::observation_prefix_monotone(200, 4);
  EXPECT_TRUE(r.passed()) << r.detail;
}

TEST(SpreadMc, PathAgreesWithExact) {
  Stream rng(5);
  auto est = estimate_spread_mc(path3(), ActivationModel::count_dc({{}, {0.5}, {0.5}}), {0}, 100000, rng);
  EXPECT_LE(std::abs(est.mean - 1.75), 3 * est.std_error);
  EXPECT_LT(est.std_error, 0.005);
  EXPECT_EQ(est.num_samples, 100000u);
}

TEST(SpreadMc, DegenerateModels) {
  Stream rng(6);
  DirectedGraph g = diamond();
  auto zero = estimate_spread_mc(g, homogeneous_model(g, 0.0), {0, 1}, 1000, rng);
  EXPECT_EQ(zero.mean, 2.0);
  EXPECT_EQ(zero.std_error, 0.0);
  DirectedGraph cycle(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}});
  auto full = estimate_spread_mc(cycle, homogeneous_model(cycle, 1.0), {0}, 1000, rng);
  EXPECT_EQ(full.mean, 4.0);
  EXPECT_EQ(full.std_error, 0.0);
}

TEST(SpreadMc, AgreesWithExactOnRandomInstances) {
  auto r = verify::mc_exact_agreement(200, 7);
  EXPECT_TRUE(r.passed()) << r.detail;
}

TEST(SpreadBounds, BetweenSeedCountAndReach) {
  Stream rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    DirectedGraph g = verify::random_tiny_graph(rng, 6, 14);
    NodeSet s = verify::random_seeds(g.num_nodes(), 2, rng);
    const double x = exact_spread(g, verify::random_decreasing_model(g, rng), s);
    EXPECT_GE(x, static_cast<double>(s.size()) - 1e-12);
    EXPECT_LE(x, static_cast<double>(reachable_set(g, s).size()) + 1e-12);
  }
}

TEST(SpreadMonotonicity, InProbabilities) {
  auto r = verify::spread_monotonicity(200, 9);
  EXPECT_TRUE(r.passed()) << r.detail;
}

TEST(Tpm, PathExample) {
  const auto p = ActivationModel::count_dc({{}, {0.5}, {0.5}});
  const auto pbar = ActivationModel::count_dc({{}, {0.6}, {0.6}});
  const TpmResult r = tpm_check(path3(), p, pbar, {0});
  EXPECT_NEAR(r.lhs, 0.21, 1e-12);
  EXPECT_NEAR(r.rhs, 0.25, 1e-12);
  EXPECT_TRUE(r.holds);
}

TEST(Tpm, IdenticalModels) {
  const auto p = ActivationModel::count_dc({{}, {}, {0.5, 0.25}});
  const TpmResult r = tpm_check(diamond(), p, p, {0, 1});
  EXPECT_EQ(r.lhs, 0.0);
  EXPECT_EQ(r.rhs, 0.0);
  EXPECT_TRUE(r.holds);
}

TEST(Tpm, SingleSlotRaisedToOne) {
  const DirectedGraph g = path3();
  const auto p = homogeneous_model(g, 0.0);
  const auto pbar = ActivationModel::count_dc({{}, {1.0}, {0.0}});
  const TpmResult r = tpm_check(g, p, pbar, {0});
  EXPECT_NEAR(r.lhs, 1.0, 1e-12);
  EXPECT_GE(r.rhs, 1.0 - 1e-12);
  EXPECT_TRUE(r.holds);
}

TEST(Tpm, RejectsUndominatedPair) {
  EXPECT_THROW(tpm_check(path3(), ActivationModel::count_dc({{}, {0.6}, {0.6}}),
                         ActivationModel::count_dc({{}, {0.5}, {0.5}}), {0}),
               Error);
}

TEST(Tpm, RhsMatchesNaiveTripleSum) {
  Stream rng(10);
  for (int trial = 0; trial < 100; ++trial) {
    DirectedGraph g = verify::random_tiny_graph(rng, 6, 12);
    const auto upper = verify::random_decreasing_model(g, rng);
    const auto lower = verify::random_dominated_model(upper, rng);
    const NodeSet s = verify::random_seeds(g.num_nodes(), 2, rng);
    const TpmResult r = tpm_check(g, lower, upper, s);
    EXPECT_NEAR(r.rhs, naive_tpm_rhs(g, lower, upper, s), 1e-10);
    EXPECT_NEAR(r.lhs, ref::enumerate(g, upper, s).spread - ref::enumerate(g, lower, s).spread, 1e-10);
  }
}

TEST(Tpm, HoldsOnRandomInstances) {
  auto r = verify::tpm_inequality(200, 11);
  EXPECT_TRUE(r.passed()) << r.detail;
}
