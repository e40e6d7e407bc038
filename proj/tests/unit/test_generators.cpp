#include <gtest/gtest.h>

#include <cmath>

#include "distortion_lab/distortion_lab.hpp"
#include "oracles.hpp"

using namespace distortion_lab;

namespace {

Rational q(long long a, long long b = 1) { return make_rational(a, b); }

MechanismSpec spec(const std::string& in, const std::string& over = "fur", OverScope s = OverScope::RepresentativesOnly) {
  return MechanismSpec{in, over, s};
}

std::vector<Ranking> all_orders(std::size_t m) {
  std::vector<Ranking> out;
  Ranking r = natural_order(m);
  do out.push_back(r);
  while (std::next_permutation(r.begin(), r.end()));
  return out;
}

/// Every claimed cost agrees with the definition computed from raw metric data.
void expect_claims_match_oracle(const GeneratedInstance& gi) {
  for (const auto& c : gi.cost_claims) {
    if (c.value.is_exact())
      EXPECT_EQ(oracle::exact_cost(c.objective, gi.instance, c.candidate.value), c.value.rational())
          << gi.family << " " << label(c.candidate);
    else
      EXPECT_NEAR(oracle::float_cost(c.objective, gi.instance, c.candidate.value), c.value.to_double(), 1e-12)
          << gi.family << " " << label(c.candidate);
  }
  EXPECT_TRUE(oracle::pairwise_consistent(gi.instance.profile(), gi.instance)) << gi.family;
  EXPECT_FALSE(validate_metric(gi.instance.metric()).has_value()) << gi.family;
}

Ranking seeded(std::size_t m, std::uint64_t s) { return random_order(m, s); }

}  // namespace

TEST(TwoVoterLine, CostsAndRatio) {
  auto gi = gen_randdet_xmax();
  expect_claims_match_oracle(gi);
  EXPECT_EQ(oracle::exact_cost(Objective::MaxMax, gi.instance, 0), q(1, 2));
  EXPECT_EQ(oracle::exact_cost(Objective::AvgMax, gi.instance, 1), q(3, 2));
  for (const char* in : {"fpm", "fpmpar", "dictator"}) {
    auto with = gen_randdet_xmax(lookup_rule(in));
    expect_claims_match_oracle(with);
    auto s1 = run_first_stage(with.instance, lookup_rule(in));
    EXPECT_EQ(s1.representatives(), *with.forced_reps) << in;
    for (auto o : {Objective::AvgMax, Objective::MaxMax})
      EXPECT_EQ(evaluate_lower_bound(with, spec(in), o).ratio.rational(), q(3)) << in;
  }
  EXPECT_THROW(gen_randdet_xmax(lookup_rule("frd")), InvalidParams);
}

TEST(LineMaxAvg, EveryOrderEveryRule) {
  std::set<int> cases;
  for (const char* in : {"fpm", "fpmpar", "dictator"})
    for (const auto& sigma : all_orders(4)) {
      auto gi = gen_randdet_maxavg(lookup_rule(in), sigma);
      expect_claims_match_oracle(gi);
      cases.insert(*gi.maxavg_case);
      EXPECT_EQ(run_first_stage(gi.instance, lookup_rule(in)).representatives(), *gi.forced_reps);
      EXPECT_EQ(evaluate_lower_bound(gi, spec(in), Objective::MaxAvg).ratio.rational(), q(5));
      EXPECT_EQ(oracle::exact_cost(Objective::MaxAvg, gi.instance, gi.role("c1").value), q(1, 4));
    }
  EXPECT_EQ(cases, (std::set<int>{1, 2, 3}));
}

TEST(LineMaxAvg, NaturalOrderFpmRepresentatives) {
  auto gi = gen_randdet_maxavg(lookup_rule("fpm"), natural_order(4));
  EXPECT_EQ(*gi.forced_reps, (std::vector<CandidateId>{gi.role("c2"), gi.role("c3")}));
  EXPECT_EQ(claims_json(gi)["forced_representatives"].size(), 2u);
}

TEST(TreeAvgAvg, RatioFiveMinusTwoOverK) {
  for (std::size_t k = 2; k <= 6; ++k)
    for (std::uint64_t s = 0; s < 4; ++s) {
      auto gi = gen_randdet_avgavg(k, lookup_rule("fpm"), seeded(2 * k, s));
      expect_claims_match_oracle(gi);
      const auto kk = static_cast<long long>(k);
      EXPECT_EQ(oracle::exact_cost(Objective::AvgAvg, gi.instance, gi.claimed_optimal.value), q(1, 2));
      EXPECT_EQ(evaluate_lower_bound(gi, spec("fpm"), Objective::AvgAvg).ratio.rational(), q(5) - q(2, kk));
    }
}

TEST(TreeAvgAvg, OtherRules) {
  for (const char* in : {"fpmpar", "dictator"}) {
    auto gi = gen_randdet_avgavg(3, lookup_rule(in), natural_order(6));
    EXPECT_EQ(evaluate_lower_bound(gi, spec(in), Objective::AvgAvg).ratio.rational(), q(13, 3)) << in;
  }
  EXPECT_THROW(gen_randdet_avgavg(1, lookup_rule("fpm"), natural_order(2)), InvalidParams);
  EXPECT_THROW(gen_randdet_avgavg(2, lookup_rule("fpm"), natural_order(3)), InvalidParams);
}

TEST(ThreePointLine, RatioThree) {
  auto gi = gen_randrand_maxX();
  expect_claims_match_oracle(gi);
  EXPECT_EQ(oracle::exact_cost(Objective::MaxAvg, gi.instance, 1), q(1, 2));
  EXPECT_EQ(oracle::exact_cost(Objective::MaxMax, gi.instance, 0), q(3, 2));
  for (auto o : gi.objectives) EXPECT_EQ(evaluate_lower_bound(gi, spec("frd"), o).ratio.rational(), q(3));
}

TEST(Cyclic, ExpectedCostPerMember) {
  for (std::size_t m = 2; m <= 6; ++m) {
    auto fam = gen_cyclic_avgmax(m);
    ASSERT_EQ(fam.size(), m);
    const auto mm = static_cast<long long>(m);
    for (std::size_t i = 0; i < m; ++i) {
      expect_claims_match_oracle(fam[i]);
      auto d = run_mechanism(fam[i].instance, spec("frd"));
      Rational p = d.probability(CandidateId(i));
      EXPECT_EQ(p, q(1, mm));
      EXPECT_EQ(expected_cost(d, Objective::AvgMax, fam[i].instance).rational(), q(3, 2) - p);
    }
    EXPECT_EQ(evaluate_lower_bound(fam, spec("frd"), Objective::AvgMax).ratio.rational(), q(3 * mm - 2, mm));
  }
  EXPECT_THROW(gen_cyclic_avgmax(1), InvalidParams);
}

TEST(Star, RatioThreeMinusTwoOverK) {
  auto two = gen_randrand_avgavg(2);
  EXPECT_EQ(evaluate_lower_bound(two, spec("frd"), Objective::AvgAvg).ratio.rational(), q(2));
  for (std::size_t k = 2; k <= 8; ++k) {
    auto gi = gen_randrand_avgavg(k, seeded(k + 1, k));
    expect_claims_match_oracle(gi);
    const auto kk = static_cast<long long>(k);
    EXPECT_EQ(oracle::exact_cost(Objective::AvgAvg, gi.instance, k), q(1));
    EXPECT_EQ(oracle::exact_cost(Objective::AvgAvg, gi.instance, 0), q(3) - q(2, kk));
  }
}

TEST(NineVertexGraph, DistancesAndWitness) {
  for (const char* in : {"fpm", "fpmpar", "dictator"})
    for (const auto& sigma : all_orders(4)) {
      auto gi = gen_detdet_maxavg(lookup_rule(in), sigma);
      expect_claims_match_oracle(gi);
      const auto& metric = gi.instance.metric();
      // Hub to each candidate vertex, and the long way round between c2 and c3.
      EXPECT_EQ(oracle::exact_point_distance(metric, 0, 2), q(2));
      EXPECT_EQ(oracle::exact_point_distance(metric, 0, 6), q(2));
      EXPECT_EQ(oracle::exact_point_distance(metric, 2, 4), q(4));
      EXPECT_EQ(positional_witness_ratio(gi, Objective::MaxAvg).rational(), q(5));
      auto r = evaluate_lower_bound(gi, spec(in, "fpmpar", OverScope::AllCandidates), Objective::MaxAvg);
      EXPECT_EQ(r.ratio.rational(), q(5)) << in;
    }
}

TEST(NineVertexGraph, VariantsAreConsistentBallots) {
  auto gi = gen_detdet_maxavg(lookup_rule("fpm"), natural_order(4));
  ASSERT_EQ(gi.second_stage_variants.size(), 2u);
  const auto& cands = gi.instance.placement().candidates;
  auto d = [&](CandidateId a, CandidateId b) {
    return oracle::exact_point_distance(gi.instance.metric(), cands[a.value].value, cands[b.value].value);
  };
  for (const auto& variant : gi.second_stage_variants)
    for (std::size_t s = 0; s < variant.size(); ++s) {
      CandidateId rep = (*gi.forced_reps)[s];
      EXPECT_EQ(variant[s].front(), rep);
      for (std::size_t j = 1; j < variant[s].size(); ++j) EXPECT_LE(d(rep, variant[s][j - 1]), d(rep, variant[s][j]));
    }
}

TEST(SimplexRandRand, ExactSquaredDistances) {
  for (std::size_t t = 1; t <= 12; ++t) {
    auto gi = gen_euclidean_randrand(t);
    expect_claims_match_oracle(gi);
    const auto tt = static_cast<long long>(t);
    const auto& inst = gi.instance;
    for (std::size_t v = 0; v <= t; ++v) {
      EXPECT_EQ(oracle::exact_distance(inst, v, t + 1), q(tt, 4 * (tt + 1)));
      EXPECT_EQ(oracle::exact_distance(inst, v, v), q(tt, 4 * (tt + 1)));
      EXPECT_EQ(oracle::exact_distance(inst, v, (v + 1) % (t + 1)), q(5 * tt + 4, 4 * tt + 4));
      EXPECT_EQ(inst.distance(VoterId(v), CandidateId(t + 1)).key(), q(tt, 4 * (tt + 1)));
    }
  }
}

TEST(SimplexRandRand, RatioMatchesClosedForm) {
  double prev = 0;
  for (std::size_t t = 1; t <= 30; ++t) {
    auto gi = gen_euclidean_randrand(t);
    double r = evaluate_lower_bound(gi, spec("frd"), Objective::AvgAvg).ratio.to_double();
    EXPECT_NEAR(r, oracle::euclid_randrand_closed(static_cast<double>(t)), 1e-12);
    EXPECT_GT(r, prev);
    EXPECT_LT(r, std::sqrt(5.0));
    prev = r;
  }
  double two = evaluate_lower_bound(gen_euclidean_randrand(2), spec("frd"), Objective::AvgAvg).ratio.to_double();
  EXPECT_GE(two, std::sqrt(5.0) - 0.14);
  EXPECT_NEAR(two, 2.097167540709727, 1e-12);
  EXPECT_THROW(gen_euclidean_randrand(0), InvalidParams);
}

TEST(SimplexRandDet, RatioAndOptimum) {
  double prev = 0;
  for (std::size_t m = 2; m <= 8; ++m) {
    auto gi = gen_euclidean_randdet(m, lookup_rule("fpm"), seeded(2 * m, m));
    expect_claims_match_oracle(gi);
    const double M = static_cast<double>(m);
    EXPECT_NEAR(oracle::float_cost(Objective::AvgAvg, gi.instance, gi.role("c" + std::to_string(m + 1)).value),
                0.25 * std::sqrt(M / (M + 1)), 1e-12);
    EXPECT_EQ(run_first_stage(gi.instance, lookup_rule("fpm")).representatives(), *gi.forced_reps);
    double r = evaluate_lower_bound(gi, spec("fpm"), Objective::AvgAvg).ratio.to_double();
    EXPECT_NEAR(r, oracle::euclid_randdet_closed(M), 1e-12);
    EXPECT_GT(r, prev);
    prev = r;
  }
  auto two = gen_euclidean_randdet(2, lookup_rule("fpm"), natural_order(4));
  EXPECT_NEAR(evaluate_lower_bound(two, spec("fpm"), Objective::AvgAvg).ratio.to_double(), 3.8229, 1e-4);
  EXPECT_THROW(gen_euclidean_randdet(1, lookup_rule("fpm"), natural_order(2)), InvalidParams);
}

TEST(RandomInstances, DeterministicAndValid) {
  for (std::uint64_t i = 0; i < 300; ++i) {
    auto p = suite_params(5, i, {});
    Instance a = gen_random(p), b = gen_random(p);
    EXPECT_EQ(instance_digest(a), instance_digest(b));
    EXPECT_FALSE(validate_metric(a.metric()).has_value());
    EXPECT_TRUE(oracle::pairwise_consistent(a.profile(), a));
    EXPECT_EQ(a.voter_count(), p.n);
    EXPECT_EQ(a.candidate_count(), p.m);
    EXPECT_EQ(a.group_count(), p.k);
  }
  EXPECT_NE(instance_digest(gen_random(suite_params(5, 0, {}))), instance_digest(gen_random(suite_params(6, 0, {}))));
}

TEST(RandomInstances, SingletonGroupsElectTops) {
  for (std::uint64_t s = 0; s < 50; ++s) {
    RandomParams p;
    p.n = p.k = 4;
    p.m = 5;
    p.seed = s;
    p.kind = s % 2 ? SamplerKind::Graph : SamplerKind::Euclidean;
    Instance inst = gen_random(p);
    auto reps = run_first_stage(inst, lookup_rule("fpm")).representatives();
    for (std::size_t g = 0; g < 4; ++g)
      EXPECT_EQ(reps[g], inst.profile().top(inst.partition().members(GroupId(g)).front()));
  }
}

TEST(RandomInstances, ParameterErrors) {
  RandomParams p;
  p.k = 5;
  EXPECT_THROW(gen_random(p), InvalidParams);
  p.k = 1;
  p.m = 0;
  EXPECT_THROW(gen_random(p), InvalidParams);
  EXPECT_THROW(parse_sampler("tree"), InvalidParams);
  EXPECT_EQ(parse_sampler("graph"), SamplerKind::Graph);
  EXPECT_EQ(random_order(7, 11), random_order(7, 11));
}

TEST(Claims, JsonShape) {
  auto gi = gen_randdet_avgavg(2, lookup_rule("fpm"), natural_order(4));
  Json j = claims_json(gi);
  EXPECT_EQ(j["family"], "randdet-avgavg");
  EXPECT_EQ(j["ratio"]["value"], "4/1");
  EXPECT_EQ(j["optimal"]["cost"], "1/2");
  EXPECT_EQ(j["in_rule"], "fpm");
  auto e = gen_euclidean_randrand(1);
  EXPECT_TRUE(claims_json(e)["ratio"]["value"].is_number());
}
