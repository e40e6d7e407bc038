#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "distortion_lab/errors.hpp"
#include "distortion_lab/instance.hpp"
#include "distortion_lab/io.hpp"
#include "distortion_lab/objectives.hpp"
#include "distortion_lab/rules.hpp"

namespace distortion_lab {

enum class OverScope { RepresentativesOnly, AllCandidates };

inline std::string to_string(OverScope s) { return s == OverScope::RepresentativesOnly ? "reps" : "all"; }

inline OverScope parse_scope(std::string_view s) {
  if (s == "reps") return OverScope::RepresentativesOnly;
  if (s == "all") return OverScope::AllCandidates;
  throw InvalidParams("unknown scope '" + std::string(s) + "' (expected reps or all)");
}

struct MechanismSpec {
  std::string in_rule;
  std::string over_rule;
  OverScope scope = OverScope::RepresentativesOnly;

  std::string str() const { return "(" + in_rule + "," + over_rule + (scope == OverScope::AllCandidates ? ",all" : "") + ")"; }
  friend bool operator==(const MechanismSpec&, const MechanismSpec&) = default;
};

/// Representative distribution of each group, in group order.
struct StageOneResult {
  std::vector<OutcomeDistribution> groups;

  bool all_point_masses() const {
    return std::all_of(groups.begin(), groups.end(), [](const auto& d) { return d.is_point_mass(); });
  }
  std::vector<CandidateId> representatives() const {
    if (!all_point_masses()) throw UnsupportedComposition("stage one is randomized; representatives are not fixed");
    std::vector<CandidateId> out;
    for (const auto& d : groups) out.push_back(d.only());
    return out;
  }
};

namespace detail {

/// Rethrows the active exception with a group label prefixed, keeping its type.
[[noreturn]] inline void rethrow_in_group(GroupId g) {
  const std::string at = label(g) + ": ";
  try {
    throw;
  } catch (const IndecisiveRule&) {
    throw;
  } catch (const NoMatchingCandidate& e) {
    throw NoMatchingCandidate(at + e.what());
  } catch (const CycleDetected& e) {
    throw CycleDetected(at + e.what());
  } catch (const UnknownCandidate& e) {
    throw UnknownCandidate(at + e.what());
  } catch (const InvalidParams& e) {
    throw InvalidParams(at + e.what());
  } catch (const Error& e) {
    throw Error(at + e.what());
  }
}

}  // namespace detail

/// Members of `g` (ascending id) voting over every candidate.
inline Election group_election(const Instance& inst, GroupId g) {
  std::vector<Ranking> ballots;
  for (auto v : inst.partition().members(g)) ballots.push_back(inst.profile().ranking(v));
  return Election(std::move(ballots), natural_order(inst.candidate_count()), {inst.partition().size(g)});
}

inline StageOneResult run_first_stage(const Instance& inst, const Rule& in_rule) {
  StageOneResult out;
  for (std::size_t g = 0; g < inst.group_count(); ++g) {
    try {
      out.groups.push_back(in_rule.distribution(group_election(inst, GroupId(g))));
    } catch (const Error&) {
      detail::rethrow_in_group(GroupId(g));
    }
  }
  return out;
}

/// Ballot of representative `r` over `pool`: itself first, then by distance
/// from r with ties to the lower index.
inline Ranking representative_ballot(const Instance& inst, CandidateId r, const std::vector<CandidateId>& pool) {
  std::vector<std::pair<Distance, CandidateId>> keyed;
  for (auto c : pool)
    if (c != r) keyed.emplace_back(inst.distance(r, c), c);
  std::stable_sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second < b.second;
  });
  Ranking out{r};
  for (const auto& [d, c] : keyed) out.push_back(c);
  return out;
}

/// One voter per group slot; the candidate pool is the distinct
/// representatives, or all of C under AllCandidates scope.
inline Election second_stage_election(const Instance& inst, const std::vector<CandidateId>& reps, OverScope scope,
                                      const std::optional<std::vector<Ranking>>& ballots_override = std::nullopt) {
  std::vector<CandidateId> pool;
  if (scope == OverScope::AllCandidates) {
    pool = natural_order(inst.candidate_count());
  } else {
    pool = reps;
    std::sort(pool.begin(), pool.end());
    pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
  }
  std::vector<Ranking> ballots;
  if (ballots_override) {
    if (ballots_override->size() != reps.size())
      throw InvalidParams("second-stage override needs one ballot per group");
    ballots = *ballots_override;
  } else {
    for (auto r : reps) ballots.push_back(representative_ballot(inst, r, pool));
  }
  return Election(std::move(ballots), std::move(pool), inst.partition().sizes(), reps);
}

inline OutcomeDistribution run_second_stage(const Instance& inst, const std::vector<CandidateId>& reps,
                                            const Rule& over_rule, OverScope scope,
                                            const std::optional<std::vector<Ranking>>& ballots_override = std::nullopt) {
  return over_rule.distribution(second_stage_election(inst, reps, scope, ballots_override));
}

namespace detail {

inline bool is_uniform_over_groups(const Rule& r) { return r.name() == "fur"; }

}  // namespace detail

/// Exact outcome of the two-stage mechanism. A uniform over-group rule is
/// mixed in closed form; any other over-group rule needs fixed representatives.
inline OutcomeDistribution run_mechanism(const Instance& inst, const Rule& in_rule, const Rule& over_rule,
                                         OverScope scope) {
  if (scope == OverScope::AllCandidates && !(in_rule.is_deterministic() && over_rule.is_deterministic()))
    throw UnsupportedComposition("all-candidates scope requires deterministic rules at both stages, got (" +
                                 in_rule.name() + "," + over_rule.name() + ")");
  StageOneResult s1 = run_first_stage(inst, in_rule);
  if (scope == OverScope::RepresentativesOnly && detail::is_uniform_over_groups(over_rule)) {
    const Rational share(1, static_cast<long long>(s1.groups.size()));
    std::vector<std::pair<Rational, OutcomeDistribution>> parts;
    for (auto& d : s1.groups) parts.emplace_back(share, std::move(d));
    return OutcomeDistribution::mixture(parts);
  }
  if (!s1.all_point_masses())
    throw UnsupportedComposition("randomized stage one (" + in_rule.name() + ") cannot feed over-group rule " +
                                 over_rule.name());
  return run_second_stage(inst, s1.representatives(), over_rule, scope);
}

inline OutcomeDistribution run_mechanism(const Instance& inst, const MechanismSpec& spec) {
  return run_mechanism(inst, lookup_rule(spec.in_rule), lookup_rule(spec.over_rule), spec.scope);
}

inline CostValue expected_cost(const OutcomeDistribution& dist, Objective o, const Instance& inst) {
  CostValue total = CostValue::exact(0);
  for (const auto& [c, p] : dist.weights()) {
    if (c.value >= inst.candidate_count()) throw UnknownCandidate("outcome names unknown candidate " + label(c));
    total += cost(o, inst, c) * p;
  }
  return total;
}

struct DistortionReport {
  Objective objective = Objective::AvgAvg;
  MechanismSpec mechanism;
  OutcomeDistribution outcome;
  CostValue expected;
  CandidateId optimal;
  CostValue optimal_cost;
  std::optional<CostValue> ratio;  // empty when unbounded
  std::string digest;

  bool unbounded() const { return !ratio.has_value(); }
};

/// expected / optimal, with 0/0 read as 1 and x/0 (x > 0) as unbounded.
inline std::optional<CostValue> cost_ratio(const CostValue& expected, const CostValue& optimal) {
  if (optimal.is_zero()) {
    if (expected.is_zero()) return CostValue::exact(1);
    return std::nullopt;
  }
  return expected / optimal;
}

inline DistortionReport evaluate_outcome(const Instance& inst, const OutcomeDistribution& outcome, Objective o,
                                         MechanismSpec spec = {}, bool with_digest = true) {
  DistortionReport r;
  r.objective = o;
  r.mechanism = std::move(spec);
  r.outcome = outcome;
  r.expected = expected_cost(outcome, o, inst);
  std::tie(r.optimal, r.optimal_cost) = optimal_candidate(o, inst);
  r.ratio = cost_ratio(r.expected, r.optimal_cost);
  if (with_digest) r.digest = instance_digest(inst);
  return r;
}

inline DistortionReport distortion(const Instance& inst, const MechanismSpec& spec, Objective o) {
  return evaluate_outcome(inst, run_mechanism(inst, spec), o, spec);
}

inline Json distribution_json(const OutcomeDistribution& d) {
  Json out = Json::object();
  for (const auto& [c, p] : d.weights()) out[label(c)] = rational_json(p);
  return out;
}

inline Json cost_json(const CostValue& c) {
  if (c.is_exact()) return rational_json(c.rational());
  return c.to_double();
}

inline Json report_json(const DistortionReport& r) {
  Json j{{"objective", to_string(r.objective)},
         {"mechanism",
          {{"in", r.mechanism.in_rule}, {"over", r.mechanism.over_rule}, {"scope", to_string(r.mechanism.scope)}}},
         {"outcome", distribution_json(r.outcome)},
         {"expected_cost", cost_json(r.expected)},
         {"optimal", {{"candidate", label(r.optimal)}, {"cost", cost_json(r.optimal_cost)}}},
         {"unbounded", r.unbounded()},
         {"digest", r.digest}};
  j["ratio"] = r.ratio ? cost_json(*r.ratio) : Json(nullptr);
  if (r.ratio) j["ratio_float"] = r.ratio->to_double();
  return j;
}

}  // namespace distortion_lab
