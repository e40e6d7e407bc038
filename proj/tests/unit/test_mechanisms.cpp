#include <gtest/gtest.h>

#include "distortion_lab/distortion_lab.hpp"
#include "oracles.hpp"

using namespace distortion_lab;

namespace {

Rational q(long long a, long long b = 1) { return make_rational(a, b); }

const CandidateId c1(0), c2(1), c3(2);

MechanismSpec spec(const std::string& in, const std::string& over, OverScope s = OverScope::RepresentativesOnly) {
  return MechanismSpec{in, over, s};
}

}  // namespace

TEST(FirstStage, SingletonGroupsPickTops) {
  Instance inst = gen_randrand_maxX().instance;
  auto s1 = run_first_stage(inst, lookup_rule("frd"));
  ASSERT_TRUE(s1.all_point_masses());
  EXPECT_EQ(s1.representatives(), (std::vector<CandidateId>{c1, c3}));
}

TEST(FirstStage, TreeConstructionRepresentatives) {
  for (std::size_t k = 2; k <= 4; ++k) {
    auto gi = gen_randdet_avgavg(k, lookup_rule("fpm"), natural_order(2 * k));
    auto s1 = run_first_stage(gi.instance, lookup_rule("fpm"));
    EXPECT_EQ(s1.representatives(), *gi.forced_reps);
  }
  auto gi = gen_randdet_avgavg(2, lookup_rule("fpm"), natural_order(4));
  EXPECT_EQ(run_first_stage(gi.instance, lookup_rule("fpm")).representatives().front(), gi.role("c1"));
}

TEST(FirstStage, UnanimousGroup) {
  Instance inst = Instance::derived(GroupPartition::single(3), Metric::line({q(0), q(1, 4), q(-1, 4), q(0), q(5)}),
                                    make_placement({0, 1, 2}, {3, 4}));
  for (const char* name : {"fpm", "fpmpar", "frd", "dictator"}) {
    auto s1 = run_first_stage(inst, lookup_rule(name));
    ASSERT_TRUE(s1.all_point_masses()) << name;
    EXPECT_EQ(s1.representatives().front(), c1) << name;
  }
}

TEST(FirstStage, RandomizedStageHasNoFixedReps) {
  Instance inst = gen_randdet_xmax().instance;
  auto s1 = run_first_stage(inst, lookup_rule("frd"));
  EXPECT_FALSE(s1.all_point_masses());
  EXPECT_THROW(s1.representatives(), UnsupportedComposition);
}

TEST(RepresentativeBallot, SelfFirstThenByDistance) {
  Instance inst = Instance::derived(GroupPartition::single(1), Metric::line({q(0), q(0), q(0), q(3), q(-1)}),
                                    make_placement({0}, {1, 2, 3, 4}));
  // c1 and c2 share a point; c2 still ranks itself first.
  auto b = representative_ballot(inst, CandidateId(1), natural_order(4));
  EXPECT_EQ(b, (Ranking{CandidateId(1), CandidateId(0), CandidateId(3), CandidateId(2)}));
}

TEST(RunMechanism, RandomDictatorshipOnThreePointLine) {
  auto d = run_mechanism(gen_randrand_maxX().instance, spec("frd", "fur"));
  EXPECT_EQ(d.probability(c1), q(1, 2));
  EXPECT_EQ(d.probability(c3), q(1, 2));
  EXPECT_EQ(d.probability(c2), q(0));
}

TEST(RunMechanism, DictatorOfDictators) {
  for (std::uint64_t i = 0; i < 100; ++i) {
    Instance inst = gen_random(suite_params(8, i, {}));
    auto d = run_mechanism(inst, spec("dictator", "dictator"));
    VoterId first = inst.partition().members(GroupId(0)).front();
    ASSERT_TRUE(d.is_point_mass());
    EXPECT_EQ(d.only(), inst.profile().top(first));
  }
}

TEST(RunMechanism, TreeConstructionUniformOverReps) {
  auto gi = gen_randdet_avgavg(3, lookup_rule("fpm"), natural_order(6));
  auto d = run_mechanism(gi.instance, spec("fpm", "fur"));
  for (auto r : *gi.forced_reps) EXPECT_EQ(d.probability(r), q(1, 3));
}

TEST(RunMechanism, UniformMixesRandomizedFirstStage) {
  Instance inst = gen_randdet_xmax().instance;
  auto d = run_mechanism(inst, spec("frd", "fur"));
  EXPECT_EQ(d.probability(c1), q(1, 2));
}

TEST(RunMechanism, CompositionErrors) {
  Instance inst = gen_randdet_xmax().instance;
  EXPECT_THROW(run_mechanism(inst, spec("frd", "fpm")), UnsupportedComposition);
  EXPECT_THROW(run_mechanism(inst, spec("fpm", "frd", OverScope::AllCandidates)), UnsupportedComposition);
  EXPECT_THROW(run_mechanism(inst, spec("fpm", "borda")), UnknownRule);
  EXPECT_NO_THROW(run_mechanism(inst, spec("fpm", "fpmpar", OverScope::AllCandidates)));
}

TEST(RunMechanism, StageOneErrorsNameTheGroup) {
  Rule bad = Rule::deterministic("bad", [](const Election&) -> CandidateId { throw NoMatchingCandidate("none"); });
  Instance inst = gen_randrand_maxX().instance;
  try {
    run_first_stage(inst, bad);
    FAIL() << "expected NoMatchingCandidate";
  } catch (const NoMatchingCandidate& e) {
    EXPECT_EQ(std::string(e.what()).rfind("g1: ", 0), 0u);
  }
}

TEST(ExpectedCost, ThreePointLineMaxAvg) {
  Instance inst = gen_randrand_maxX().instance;
  auto d = OutcomeDistribution::from_weights({{c1, q(1, 2)}, {c3, q(1, 2)}});
  EXPECT_EQ(expected_cost(d, Objective::MaxAvg, inst).rational(), q(3, 2));
  EXPECT_EQ(expected_cost(OutcomeDistribution::point(c2), Objective::MaxAvg, inst), cost(Objective::MaxAvg, inst, c2));
  EXPECT_THROW(expected_cost(OutcomeDistribution::point(CandidateId(9)), Objective::MaxAvg, inst), UnknownCandidate);
}

TEST(ExpectedCost, TreeConstructionUniform) {
  for (long long k = 2; k <= 5; ++k) {
    auto gi = gen_randdet_avgavg(static_cast<std::size_t>(k), lookup_rule("fpm"), natural_order(static_cast<std::size_t>(2 * k)));
    auto d = uniform_over_groups(*gi.forced_reps);
    EXPECT_EQ(expected_cost(d, Objective::AvgAvg, gi.instance).rational(), (q(5) - q(2, k)) / 2);
  }
}

TEST(Distortion, TwoVoterLineFarRepresentative) {
  for (const char* in : {"fpm", "fpmpar", "dictator"}) {
    auto gi = gen_randdet_xmax(lookup_rule(in));
    auto r = distortion(gi.instance, spec(in, "fur"), Objective::MaxMax);
    ASSERT_TRUE(r.ratio.has_value());
    EXPECT_EQ(r.ratio->rational(), q(3)) << in;
  }
}

TEST(Distortion, OptimalPointMassIsOne) {
  Instance inst = gen_randrand_maxX().instance;
  auto r = evaluate_outcome(inst, OutcomeDistribution::point(c2), Objective::MaxAvg);
  EXPECT_EQ(r.ratio->rational(), q(1));
}

TEST(Distortion, StarTreeFiveVoters) {
  auto r = distortion(gen_randrand_avgavg(5).instance, spec("frd", "fur"), Objective::AvgAvg);
  EXPECT_EQ(r.ratio->rational(), q(13, 5));
  EXPECT_EQ(r.optimal, CandidateId(5));
}

TEST(Distortion, ZeroOptimum) {
  Instance same = Instance::derived(GroupPartition::single(1), Metric::line({q(0), q(0), q(2)}), make_placement({0}, {1, 2}));
  EXPECT_EQ(cost_ratio(CostValue::exact(0), CostValue::exact(0))->rational(), q(1));
  EXPECT_FALSE(cost_ratio(CostValue::exact(1), CostValue::exact(0)).has_value());
  auto r = evaluate_outcome(same, OutcomeDistribution::point(CandidateId(1)), Objective::AvgAvg);
  EXPECT_TRUE(r.unbounded());
  EXPECT_TRUE(report_json(r)["ratio"].is_null());
}

TEST(Distortion, ReportJsonIsExact) {
  auto r = distortion(gen_randrand_maxX().instance, spec("frd", "fur"), Objective::MaxMax);
  Json j = report_json(r);
  EXPECT_EQ(j["ratio"], "3/1");
  EXPECT_EQ(j["outcome"]["c1"], "1/2");
  EXPECT_EQ(j["optimal"]["candidate"], "c2");
  EXPECT_EQ(j["mechanism"]["scope"], "reps");
  EXPECT_EQ(j["digest"].get<std::string>().size(), 16u);
}

TEST(Distortion, EuclideanCostsAreReal) {
  auto gi = gen_euclidean_randrand(3);
  auto r = distortion(gi.instance, spec("frd", "fur"), Objective::AvgAvg);
  EXPECT_FALSE(r.ratio->is_exact());
  EXPECT_NEAR(r.ratio->to_double(), oracle::euclid_randrand_closed(3), 1e-9);
  EXPECT_TRUE(report_json(r)["ratio"].is_number());
}

TEST(Scope, Names) {
  EXPECT_EQ(parse_scope("all"), OverScope::AllCandidates);
  EXPECT_EQ(to_string(OverScope::RepresentativesOnly), "reps");
  EXPECT_THROW(parse_scope("some"), InvalidParams);
  EXPECT_EQ(spec("fpmpar", "fpmpar", OverScope::AllCandidates).str(), "(fpmpar,fpmpar,all)");
}
