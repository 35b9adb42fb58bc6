#include <gtest/gtest.h>

#include "dcim/oracle.hpp"
#include "dcim/verification.hpp"

using namespace dcim;

namespace {

DirectedGraph path3() { return DirectedGraph(3, {{0, 1}, {1, 2}}); }
DirectedGraph diamond() { return DirectedGraph(3, {{0, 2}, {1, 2}}); }

}  // namespace

TEST(Greedy, PathCertainPicksHead) {
  const auto model = ActivationModel::count_dc({{}, {1.0}, {1.0}});
  EXPECT_EQ(greedy_oracle(path3(), model, {1, 50, true, 1}), (NodeSet{0}));
  EXPECT_EQ(greedy_oracle(path3(), model, {1, 50, false, 1}), (NodeSet{0}));
}

TEST(Greedy, ZeroModelTieBreaksById) {
  Stream rng(1);
  DirectedGraph g = generate_erdos_renyi(6, 0.4, rng);
  const auto model = homogeneous_model(g, 0.0);
  EXPECT_EQ(greedy_oracle(g, model, {2, 20, true, 3}), (NodeSet{0, 1}));
  EXPECT_EQ(greedy_oracle(g, model, {2, 20, false, 3}), (NodeSet{0, 1}));
}

TEST(Greedy, BudgetEqualsNodeCount) {
  const auto model = ActivationModel::count_dc({{}, {0.5}, {0.5}});
  EXPECT_EQ(greedy_oracle(path3(), model, {3, 20, true, 0}), (NodeSet{0, 1, 2}));
}

TEST(Greedy, ReturnsExactlyK) {
  Stream rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    DirectedGraph g = verify::random_tiny_graph(rng, 8, 30);
    const std::size_t k = 1 + rng.below(g.num_nodes());
    EXPECT_EQ(greedy_oracle(g, verify::random_decreasing_model(g, rng), {k, 30, true, rng.next()}).size(), k);
  }
}

TEST(Greedy, RejectsOversizedBudget) {
  EXPECT_THROW(greedy_oracle(path3(), homogeneous_model(path3(), 0.5), {4, 10, true, 0}), Error);
  EXPECT_THROW(greedy_oracle(path3(), homogeneous_model(path3(), 0.5), {0, 10, true, 0}), Error);
}

TEST(Greedy, SameSeedSameSet) {
  Stream rng(3);
  DirectedGraph g = generate_erdos_renyi(25, 0.15, rng);
  const auto model = sample_count_dc_model(g, 0.1, 0.5, rng);
  EXPECT_EQ(greedy_oracle(g, model, {3, 100, true, 99}), greedy_oracle(g, model, {3, 100, true, 99}));
}

TEST(Greedy, LazyMatchesPlainForExactEvaluator) {
  auto r = verify::lazy_plain_equivalence(100, 4);
  EXPECT_TRUE(r.passed()) << r.detail;
}

TEST(Greedy, LazyMatchesPlainForModularFunction) {
  std::vector<double> w{0.3, 2.0, 1.5, 2.0, 0.1, 1.7};
  auto f = [&](const NodeSet& s) {
    double x = 0.0;
    for (NodeId v : s) x += w[v];
    return x;
  };
  EXPECT_EQ(greedy_maximize(6, 3, f, true), (NodeSet{1, 3, 5}));
  EXPECT_EQ(greedy_maximize(6, 3, f, false), (NodeSet{1, 3, 5}));
}

TEST(Greedy, ApproximationBound) {
  auto r = verify::greedy_quality(100, 5);
  EXPECT_TRUE(r.passed()) << r.detail;
}

TEST(WorldSample, MeanTracksExactSpread) {
  Stream rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    DirectedGraph g = verify::random_tiny_graph(rng, 6, 14);
    const auto model = verify::random_decreasing_model(g, rng);
    const NodeSet s = verify::random_seeds(g.num_nodes(), 2, rng);
    WorldSample worlds(g, model, 40000, rng);
    // 40000 worlds put the standard error well below 0.01 (spread <= 6).
    EXPECT_NEAR(worlds.mean_spread(s), exact_spread(g, model, s), 0.05);
  }
}

TEST(WorldSample, EdgeIcMatchesHomogeneousExact) {
  Stream rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    DirectedGraph g = verify::random_tiny_graph(rng, 6, 14);
    const auto dc = homogeneous_model(g, rng.uniform());
    const NodeSet s = verify::random_seeds(g.num_nodes(), 2, rng);
    WorldSample worlds(g, matched_edge_ic(g, dc), 40000, rng);
    EXPECT_NEAR(worlds.mean_spread(s), exact_spread(g, dc, s), 0.05);
  }
}

TEST(ExactBest, PathK1) {
  auto best = exact_best_seed_set(path3(), ActivationModel::count_dc({{}, {0.5}, {0.5}}), 1);
  EXPECT_EQ(best.seeds, (NodeSet{0}));
  EXPECT_NEAR(best.value, 1.75, 1e-12);
}

TEST(ExactBest, EdgelessPicksSmallestId) {
  DirectedGraph g(4, {});
  auto best = exact_best_seed_set(g, homogeneous_model(g, 0.5), 1);
  EXPECT_EQ(best.seeds, (NodeSet{0}));
  EXPECT_EQ(best.value, 1.0);
}

TEST(ExactBest, DiamondK2) {
  auto best = exact_best_seed_set(diamond(), ActivationModel::count_dc({{}, {}, {0.5, 0.25}}), 2);
  EXPECT_EQ(best.seeds, (NodeSet{0, 1}));
  EXPECT_NEAR(best.value, 2.625, 1e-12);
}

TEST(SeedSets, EnumerationOrderAndCount) {
  std::vector<NodeSet> seen;
  for_each_seed_set(4, 2, [&](const NodeSet& s) {
    seen.push_back(s);
    return true;
  });
  EXPECT_EQ(seen.size(), 10u);
  EXPECT_EQ(count_seed_sets(4, 2), 10.0);
  EXPECT_EQ(seen[0], (NodeSet{0}));
  EXPECT_EQ(seen[4], (NodeSet{0, 1}));
  EXPECT_EQ(seen[9], (NodeSet{2, 3}));
  EXPECT_EQ(count_seed_sets(20, 2), 210.0);
}
