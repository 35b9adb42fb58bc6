#include <gtest/gtest.h>

#include <cmath>

#include "dcim/policies.hpp"
#include "dcim/verification.hpp"

using namespace dcim;

namespace {

DirectedGraph diamond() { return DirectedGraph(3, {{0, 2}, {1, 2}}); }

DiffusionTrace trace_of(NodeSet seeds, std::vector<Observation> obs, NodeSet final_set) {
  DiffusionTrace t;
  t.seed_set = seeds;
  t.steps = {seeds};
  t.observations = std::move(obs);
  t.final_active = std::move(final_set);
  return t;
}

}  // namespace

TEST(DcUcb, UcbFormula) {
  DcUcbState s = DcUcbState::for_graph(diamond());
  s.counts[2] = {50, 0};
  s.means[2] = {0.5, 0.0};
  const UcbVectors u = dcucb_compute_ucbs(s, 100);
  EXPECT_NEAR(u.raw[2][0], 0.5 + std::sqrt(3.0 * std::log(100.0) / 100.0), 1e-12);
  EXPECT_NEAR(u.raw[2][0], 0.8717, 1e-4);
  EXPECT_EQ(u.raw[2][1], 1.0);
  EXPECT_NEAR(u.capped[2][1], u.raw[2][0], 1e-15);
}

TEST(DcUcb, UcbClampedToOne) {
  DcUcbState s = DcUcbState::for_graph(diamond());
  s.counts[2] = {1, 1};
  s.means[2] = {0.9, 0.9};
  const UcbVectors u = dcucb_compute_ucbs(s, 1000);
  EXPECT_EQ(u.raw[2][0], 1.0);
  EXPECT_THROW(dcucb_compute_ucbs(s, 0), Error);
}

TEST(DcUcb, CapExample) {
  EXPECT_EQ(cap_decreasing({0.4, 0.7, 0.6}), (std::vector<double>{0.4, 0.4, 0.4}));
  EXPECT_EQ(cap_decreasing({}), std::vector<double>{});
}

TEST(DcUcb, CapPreservesTrueProbabilities) {
  auto r = verify::cap_preservation(1000, 1);
  EXPECT_TRUE(r.passed()) << r.detail;
}

TEST(DcUcb, CappedIsValidModel) {
  Stream rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    DirectedGraph g = verify::random_tiny_graph(rng, 8, 30);
    DcUcbState s = DcUcbState::for_graph(g);
    for (NodeId v = 0; v < g.num_nodes(); ++v)
      for (std::size_t i = 0; i < s.counts[v].size(); ++i) {
        s.counts[v][i] = rng.below(20);
        s.means[v][i] = rng.uniform();
      }
    const auto u = dcucb_compute_ucbs(s, 1 + rng.below(1000));
    EXPECT_FALSE(validate_model(g, ActivationModel::count_dc(u.capped)));
  }
}

TEST(DcUcb, UpdateArithmetic) {
  DcUcbState s = DcUcbState::for_graph(diamond());
  s.counts[2] = {3, 0};
  s.means[2] = {1.0 / 3.0, 0.0};
  dcucb_update(s, trace_of({0, 1}, {{0, 2, 1, false}, {1, 2, 2, true}}, {0, 1, 2}));
  EXPECT_EQ(s.counts[2][0], 4u);
  EXPECT_NEAR(s.means[2][0], 0.25, 1e-15);
  EXPECT_EQ(s.counts[2][1], 1u);
  EXPECT_EQ(s.means[2][1], 1.0);
}

TEST(DcUcb, EmptyTraceLeavesStateAlone) {
  DcUcbState s = DcUcbState::for_graph(diamond());
  s.counts[2] = {2, 1};
  s.means[2] = {0.5, 0.0};
  DcUcbState before = s;
  dcucb_update(s, trace_of({2}, {}, {2}));
  EXPECT_EQ(s.counts, before.counts);
  EXPECT_EQ(s.means, before.means);
}

TEST(DcUcb, UpdateRejectsBadObservations) {
  DcUcbState s = DcUcbState::for_graph(diamond());
  EXPECT_THROW(dcucb_update(s, trace_of({0}, {{0, 2, 3, false}}, {0})), Error);
  EXPECT_THROW(dcucb_update(s, trace_of({0}, {{0, 2, 1, false}, {1, 2, 1, false}}, {0})), Error);
}

TEST(DcUcb, CountsGrowByObservations) {
  Stream rng(3);
  DirectedGraph g = generate_erdos_renyi(10, 0.3, rng);
  const auto model = sample_count_dc_model(g, 0.1, 0.5, rng);
  DcUcbPolicy policy(g, {2, 30, true, 0}, 7);
  for (std::size_t t = 1; t <= 30; ++t) {
    const NodeSet s = policy.select(t);
    EXPECT_EQ(s.size(), 2u);
    const auto trace = simulate(g, model, s, rng);
    const auto before = policy.state().total_count();
    policy.update(trace);
    EXPECT_EQ(policy.state().total_count(), before + trace.observations.size());
  }
}

TEST(DcUcb, FirstRoundIsOptimistic) {
  // With no data every slot is 1, so the first pick maximizes reach.
  Stream rng(4);
  DirectedGraph g = generate_erdos_renyi(12, 0.1, rng);
  DcUcbPolicy policy(g, {1, 5, true, 0}, 1);
  const NodeSet s = policy.select(1);
  EXPECT_EQ(reachable_set(g, s).size(), max_reach(g));
}

TEST(DcUcb, SingleNodeGraph) {
  DirectedGraph g(1, {});
  DcUcbPolicy policy(g, {1, 5, true, 0}, 1);
  EXPECT_EQ(policy.select(1), (NodeSet{0}));
}

TEST(DcUcb, ConvergedStateSelectsLikeTrueGreedy) {
  Stream rng(5);
  DirectedGraph g = generate_erdos_renyi(15, 0.2, rng);
  const auto model = sample_count_dc_model(g, 0.1, 0.5, rng);
  DcUcbState s = DcUcbState::for_graph(g);
  for (NodeId v = 0; v < g.num_nodes(); ++v)
    for (std::size_t i = 0; i < s.counts[v].size(); ++i) {
      s.counts[v][i] = 1000000000;
      s.means[v][i] = model.attempt_prob(v, i + 1);
    }
  const OracleConfig cfg{2, 200, true, 11};
  EXPECT_EQ(dcucb_select(s, g, cfg, 1), greedy_oracle(g, model, cfg));
  const auto u = dcucb_compute_ucbs(s, 1);
  for (NodeId v = 0; v < g.num_nodes(); ++v)
    for (std::size_t i = 0; i < s.counts[v].size(); ++i) EXPECT_EQ(u.capped[v][i], model.attempt_prob(v, i + 1));
}

TEST(DcUcb, RadiusShrinksWithPlays) {
  for (std::uint64_t n = 1; n < 100; ++n) EXPECT_GT(confidence_radius(50, n), confidence_radius(50, n + 1));
  EXPECT_EQ(confidence_radius(1, 5), 0.0);
}

TEST(FlatUcb, ArmCount) {
  Stream rng(6);
  FlatUcbPolicy policy(generate_erdos_renyi(20, 0.2, rng), 2);
  EXPECT_EQ(policy.num_arms(), 210u);
}

TEST(FlatUcb, ArmLimit) {
  Stream rng(7);
  EXPECT_THROW(FlatUcbPolicy(generate_erdos_renyi(20, 0.2, rng), 2, 100), Error);
}

TEST(FlatUcb, PlaysUnplayedArmsInOrder) {
  DirectedGraph g = diamond();
  FlatUcbPolicy policy(g, 2);
  for (std::size_t t = 1; t <= policy.num_arms(); ++t) {
    const NodeSet s = policy.select(t);
    EXPECT_EQ(s, policy.arms()[t - 1]);
    policy.update(trace_of(s, {}, s));
  }
}

TEST(FlatUcb, ExplorationBonusForcesRevisit) {
  DirectedGraph g = diamond();
  FlatUcbPolicy policy(g, 1);
  for (int i = 0; i < 1000; ++i) policy.record(0, 3.0);
  policy.record(1, 0.0);
  policy.record(2, 0.0);
  // Arm 0 has the best mean but the barely played arms carry a larger bonus.
  EXPECT_NE(policy.select(1000), policy.arms()[0]);
  EXPECT_GT(policy.index(1, 1000), policy.index(0, 1000));
}

TEST(FlatUcb, RejectsForeignUpdate) {
  FlatUcbPolicy policy(diamond(), 1);
  policy.select(1);
  EXPECT_THROW(policy.update(trace_of({2}, {}, {2})), Error);
}

TEST(Cmab, FirstRoundTakesLowestIds) {
  Stream rng(8);
  DirectedGraph g = generate_erdos_renyi(10, 0.3, rng);
  CmabNodePolicy policy(g, 3, RewardSplit::average, 1);
  EXPECT_EQ(policy.select(1), (NodeSet{0, 1, 2}));
}

TEST(Cmab, AverageSplit) {
  Stream rng(9);
  DirectedGraph g = generate_erdos_renyi(10, 0.3, rng);
  CmabNodePolicy policy(g, 2, RewardSplit::average, 1);
  std::vector<NodeId> fin{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  policy.update(trace_of({0, 1}, {}, NodeSet(fin)));
  EXPECT_EQ(policy.mean(0), 5.0);
  EXPECT_EQ(policy.mean(1), 5.0);
  EXPECT_EQ(policy.count(0), 1u);
  EXPECT_EQ(policy.count(1), 1u);
  EXPECT_EQ(policy.count(2), 0u);
}

TEST(Cmab, RandomSplit) {
  Stream rng(10);
  DirectedGraph g = generate_erdos_renyi(10, 0.3, rng);
  CmabNodePolicy policy(g, 2, RewardSplit::random, 1);
  std::vector<NodeId> fin{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  policy.update(trace_of({0, 1}, {}, NodeSet(fin)));
  EXPECT_EQ(policy.mean(0) + policy.mean(1), 10.0);
  EXPECT_TRUE(policy.mean(0) == 0.0 || policy.mean(1) == 0.0);
  EXPECT_EQ(policy.count(0), 1u);
  EXPECT_EQ(policy.count(1), 1u);
}

TEST(Cmab, Names) {
  DirectedGraph g = diamond();
  EXPECT_EQ(CmabNodePolicy(g, 1, RewardSplit::average, 0).name(), "cmab-avg");
  EXPECT_EQ(CmabNodePolicy(g, 1, RewardSplit::random, 0).name(), "cmab-rand");
}

TEST(CucbIc, FirstRoundAllOnes) {
  CucbIcPolicy policy(diamond(), {1, 10, true, 0}, 0);
  EXPECT_EQ(policy.ucbs(1), (std::vector<double>{1.0, 1.0}));
}

TEST(CucbIc, UpdatesObservedEdgesOnly) {
  DirectedGraph g(4, {{0, 2}, {1, 2}, {2, 3}});
  CucbIcPolicy policy(g, {1, 10, true, 0}, 0);
  policy.update(trace_of({0, 1}, {{0, 2, 1, false}, {1, 2, 2, true}}, {0, 1, 2}));
  EXPECT_EQ(policy.count(*g.edge_id(0, 2)), 1u);
  EXPECT_EQ(policy.count(*g.edge_id(1, 2)), 1u);
  EXPECT_EQ(policy.count(*g.edge_id(2, 3)), 0u);
  EXPECT_EQ(policy.mean(*g.edge_id(1, 2)), 1.0);
}

TEST(CucbIc, EstimatesConvergeOnHomogeneousModel) {
  DirectedGraph g(3, {{0, 1}, {0, 2}, {1, 2}});
  const auto model = homogeneous_model(g, {{1, 0.3}, {2, 0.6}}, 0.0);
  CucbIcPolicy policy(g, {1, 20, true, 0}, 3);
  Stream rng(11);
  for (std::size_t t = 1; t <= 100000; ++t) policy.update(simulate(g, model, {0}, rng));
  EXPECT_NEAR(policy.mean(*g.edge_id(0, 1)), 0.3, 0.01);
  EXPECT_NEAR(policy.mean(*g.edge_id(0, 2)), 0.6, 0.01);
}

TEST(Factory, KnownNames) {
  Stream rng(12);
  DirectedGraph g = generate_erdos_renyi(6, 0.3, rng);
  for (auto name : policy_names) EXPECT_EQ(make_policy(name, g, {2, 10, true, 1e6, 0})->name(), name);
  EXPECT_THROW(make_policy("nope", g, {}), Error);
}
