#include <gtest/gtest.h>

#include <cstdlib>
#include <set>

#include "distortion_lab/distortion_lab.hpp"

using namespace distortion_lab;

namespace {

Rational q(long long a, long long b = 1) { return make_rational(a, b); }

MechanismSpec spec(const std::string& in, const std::string& over = "fur", OverScope s = OverScope::RepresentativesOnly) {
  return MechanismSpec{in, over, s};
}

std::map<std::string, Rational> bind(long long k, long long nstar) {
  return {{"alpha", q(3)}, {"beta", q(2)}, {"k", q(k)}, {"nstar", q(nstar)}, {"n", q(k * nstar)}, {"m", q(4)}};
}

}  // namespace

TEST(BoundExpression, Arithmetic) {
  EXPECT_EQ(BoundExpression("alpha+2").evaluate(bind(2, 1)), q(5));
  EXPECT_EQ(BoundExpression("alpha+2-2/k").evaluate(bind(4, 1)), q(9, 2));
  EXPECT_EQ(BoundExpression("3-2/(k*nstar)").evaluate(bind(2, 3)), q(8, 3));
  EXPECT_EQ(BoundExpression("2beta+3").evaluate(bind(1, 1)), q(7));
  EXPECT_EQ(BoundExpression("-1/2 + 3").evaluate({}), q(5, 2));
  EXPECT_EQ(BoundExpression("(1+1)(2+1)").evaluate({}), q(6));
  EXPECT_EQ(BoundExpression("1 - 2 - 3").evaluate({}), q(-4));
  EXPECT_EQ(BoundExpression("12/4/3").evaluate({}), q(1));
}

TEST(BoundExpression, UnicodeSpellings) {
  EXPECT_EQ(BoundExpression("α+2−2/k").evaluate(bind(2, 1)), q(4));
  EXPECT_EQ(BoundExpression("2β+3").evaluate(bind(1, 1)), q(7));
  EXPECT_EQ(BoundExpression("3−2/(k·n*)").evaluate(bind(2, 2)), q(5, 2));
}

TEST(BoundExpression, SymbolsAndErrors) {
  EXPECT_EQ(BoundExpression("alpha+2-2/k+k").symbols(), (std::vector<std::string>{"alpha", "k"}));
  for (const char* bad : {"3+", "(3", "3)", "", "2 $ 3"}) EXPECT_THROW(BoundExpression{bad}, ParseError) << bad;
  EXPECT_THROW(BoundExpression("gamma").evaluate(bind(1, 1)), Error);
  EXPECT_THROW(BoundExpression("1/(k-1)").evaluate(bind(1, 1)), Error);
}

TEST(BuiltinBounds, Registry) {
  const auto& bounds = builtin_bounds();
  EXPECT_EQ(bounds.size(), 10u);
  std::set<std::string> names;
  for (const auto& b : bounds) names.insert(b.name);
  EXPECT_EQ(names.size(), bounds.size());
  EXPECT_EQ(find_bound("fpm-fur-maxavg").objective, Objective::MaxAvg);
  EXPECT_THROW(find_bound("nope"), InvalidParams);
  Instance inst = gen_randdet_avgavg(3, lookup_rule("fpm"), natural_order(6)).instance;
  EXPECT_EQ(find_bound("fpm-fur-avgavg").value_for(inst), q(13, 3));
  EXPECT_EQ(find_bound("frd-fur-avgavg").value_for(inst), q(8, 3));
  EXPECT_EQ(find_bound("fpmpar-fpmpar-all-avgmax").value_for(inst), q(7));
}

TEST(BuiltinBounds, NonPositiveBoundRejected) {
  BoundSpec b{"neg", spec("fpm"), Objective::AvgAvg, BoundExpression("1-k")};
  EXPECT_THROW(b.value_for(gen_randrand_maxX().instance), InvalidParams);
}

TEST(Verify, SingleCandidateSuite) {
  SuiteCaps caps;
  caps.max_m = 1;
  for (const auto& b : builtin_bounds()) {
    auto r = verify_upper_bound(b, 50, 3, 1, caps);
    EXPECT_TRUE(r.passed()) << b.name;
    EXPECT_EQ(r.checked, 50u);
    std::size_t bounded = 0;
    for (const auto& e : r.entries)
      if (e.ratio) {
        ++bounded;
        EXPECT_NEAR(e.ratio->to_double(), 1.0, 1e-12);
      }
    EXPECT_GT(bounded, 0u);
  }
}

TEST(Verify, RandomSuiteHasNoViolations) {
  auto reports = verify_upper_bounds(builtin_bounds(), random_suite(1), 400, "random", 2);
  for (const auto& r : reports) {
    EXPECT_TRUE(r.violations.empty()) << r.bound_name;
    EXPECT_TRUE(r.errors.empty()) << r.bound_name;
    ASSERT_TRUE(r.max_ratio.has_value());
    EXPECT_GE(r.max_ratio->to_double(), 1.0);
  }
}

TEST(Verify, TightFamiliesHaveZeroMargin) {
  const auto& avgavg = find_bound("fpm-fur-avgavg");
  auto tree = verify_upper_bound(
      avgavg, [](std::size_t i) { return gen_randdet_avgavg(i + 2, lookup_rule("fpm"), natural_order(2 * i + 4)).instance; },
      9, "tree");
  EXPECT_TRUE(tree.passed());
  EXPECT_EQ(tree.min_margin->rational(), q(0));
  EXPECT_EQ(tree.max_ratio->rational(), q(5) - q(2, 10));
  const auto& maxavg = find_bound("fpm-fur-maxavg");
  auto line = verify_upper_bound(
      maxavg, [](std::size_t i) { return gen_randdet_maxavg(lookup_rule("fpm"), random_order(4, i)).instance; }, 24, "line");
  EXPECT_TRUE(line.passed());
  for (const auto& e : line.entries) EXPECT_EQ(e.margin->rational(), q(0));
}

TEST(Verify, ViolationIsReported) {
  BoundSpec tight{"tight", spec("frd"), Objective::MaxMax, BoundExpression("2")};
  auto r = verify_upper_bound(tight, [](std::size_t) { return gen_randrand_maxX().instance; }, 3, "fixed");
  EXPECT_FALSE(r.passed());
  EXPECT_EQ(r.violations, (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_EQ(r.min_margin->rational(), q(-1));
  Json j = audit_report_json(r);
  EXPECT_EQ(j["violations"].size(), 3u);
  EXPECT_EQ(j["violations"][0]["ratio"], "3/1");
  EXPECT_FALSE(j["passed"].get<bool>());
}

TEST(Verify, BuildErrorsAreCollected) {
  auto r = verify_upper_bound(find_bound("mad-maxmax"),
                              [](std::size_t i) -> Instance {
                                if (i == 1) throw InvalidInstance("broken");
                                return gen_randrand_maxX().instance;
                              },
                              3, "fixed");
  EXPECT_EQ(r.errors, (std::vector<std::size_t>{1}));
  EXPECT_FALSE(r.passed());
}

TEST(Verify, ToleranceOnRealRatios) {
  EXPECT_FALSE(exceeds(CostValue::real(3.0 + 1e-12), q(3)));
  EXPECT_TRUE(exceeds(CostValue::real(3.0 + 1e-6), q(3)));
  EXPECT_TRUE(exceeds(CostValue::exact(q(3000000001, 1000000000)), q(3)));
}

TEST(LowerBound, Examples) {
  EXPECT_EQ(evaluate_lower_bound(gen_randrand_maxX(), spec("frd"), Objective::MaxMax).ratio.rational(), q(3));
  auto tree = gen_randdet_avgavg(2, lookup_rule("fpm"), natural_order(4));
  auto r = evaluate_lower_bound(tree, spec("fpm"), Objective::AvgAvg);
  EXPECT_EQ(r.ratio.rational(), q(4));
  EXPECT_TRUE(r.meets_claim);
  EXPECT_TRUE(r.exact_equal);
  EXPECT_EQ(evaluate_lower_bound(gen_cyclic_avgmax(3), spec("frd"), Objective::AvgMax).ratio.rational(), q(7, 3));
  auto euclid = evaluate_lower_bound(gen_euclidean_randrand(4), spec("frd"), Objective::AvgAvg);
  EXPECT_TRUE(euclid.exact_equal);
}

TEST(LowerBound, MismatchedClass) {
  auto tree = gen_randdet_avgavg(2, lookup_rule("fpm"), natural_order(4));
  EXPECT_THROW(evaluate_lower_bound(tree, spec("dictator"), Objective::AvgAvg), MismatchedRuleClass);
  EXPECT_THROW(evaluate_lower_bound(tree, spec("fpm"), Objective::MaxAvg), MismatchedRuleClass);
  EXPECT_THROW(evaluate_lower_bound(tree, spec("fpm", "fpm", OverScope::AllCandidates), Objective::AvgAvg),
               MismatchedRuleClass);
  EXPECT_THROW(evaluate_lower_bound(std::vector<GeneratedInstance>{}, spec("frd"), Objective::AvgMax), InvalidParams);
}

TEST(Search, SingleIteration) {
  auto r = search_worst_case(spec("fpm"), Objective::AvgAvg, {}, 1, 7);
  EXPECT_EQ(r.iterations, 1u);
  EXPECT_EQ(r.best_index, 0u);
  EXPECT_EQ(r.entries.size(), 1u);
  EXPECT_EQ(instance_digest(instance_from_json(r.witness)), r.best_digest);
  EXPECT_THROW(search_worst_case(spec("fpm"), Objective::AvgAvg, {}, 0, 7), InvalidParams);
}

TEST(Search, LineSearchStaysUnderBound) {
  SuiteCaps caps;
  caps.only = SamplerKind::Line;
  auto r = search_worst_case(spec("frd"), Objective::MaxMax, caps, 400, 2, 2);
  ASSERT_TRUE(r.best_ratio.has_value());
  EXPECT_LE(r.best_ratio->rational(), q(3));
  EXPECT_GE(r.best_ratio->rational(), q(2));
  auto again = search_worst_case(spec("frd"), Objective::MaxMax, caps, 400, 2, 1);
  EXPECT_EQ(again.best_index, r.best_index);
  EXPECT_EQ(again.best_digest, r.best_digest);
}

TEST(Centralized, FpmDistortionAtMostThree) {
  for (std::uint64_t i = 0; i < 500; ++i) {
    Instance inst = gen_random(suite_params(11, i, {}));
    auto r = brute_force_centralized_distortion(inst, lookup_rule("fpm"));
    if (r) {
      EXPECT_LE(r->to_double(), 3.0 + 1e-9) << i;
    }
    auto reps = run_first_stage(inst, lookup_rule("fpm")).representatives();
    auto s = representative_rule_ratio(inst, reps, lookup_rule("fpm"));
    if (s) {
      EXPECT_LE(s->to_double(), 3.0 + 1e-9) << i;
    }
  }
}

TEST(Centralized, FpmparOnRepresentativesWithinBeta) {
  // Representatives sit on their own top choice, which brings the bound down to 2.
  for (std::uint64_t i = 0; i < 2000; ++i) {
    Instance inst = gen_random(suite_params(3, i, {}));
    auto reps = run_first_stage(inst, lookup_rule("fpmpar")).representatives();
    auto r = representative_rule_ratio(inst, reps, lookup_rule("fpmpar"));
    if (r) {
      EXPECT_LE(r->to_double(), 2.0 + 1e-9) << i;
    }
  }
}

TEST(Output, DeterministicAcrossWorkers) {
  const auto& b = find_bound("frd-fur-avgavg");
  auto one = verify_upper_bound(b, 120, 9, 1);
  auto three = verify_upper_bound(b, 120, 9, 3);
  EXPECT_EQ(audit_csv(one), audit_csv(three));
  EXPECT_EQ(audit_report_json(one).dump(), audit_report_json(three).dump());
  EXPECT_EQ(audit_csv(one).substr(0, audit_csv(one).find('\n')), "index,digest,ratio,bound,margin,violation");
}

TEST(Workers, ParallelMapOrderAndFailure) {
  auto v = parallel_map<std::size_t>(50, 4, [](std::size_t i) { return i * i; });
  for (std::size_t i = 0; i < 50; ++i) EXPECT_EQ(v[i], i * i);
  EXPECT_THROW(parallel_map<int>(10, 3,
                                 [](std::size_t i) -> int {
                                   if (i == 7) throw InvalidParams("seven");
                                   return 0;
                                 }),
               InvalidParams);
  ::setenv("DISTORTION_LAB_WORKERS", "3", 1);
  EXPECT_EQ(default_workers(), 3u);
  ::unsetenv("DISTORTION_LAB_WORKERS");
  EXPECT_GE(default_workers(), 1u);
}
