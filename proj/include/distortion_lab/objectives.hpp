#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "distortion_lab/cost_value.hpp"
#include "distortion_lab/errors.hpp"
#include "distortion_lab/instance.hpp"

namespace distortion_lab {

enum class Aggregator { Mean, Max };

/// Named (outer, inner) aggregation pair: AvgMax averages, across groups,
/// each group's worst distance.
enum class Objective { AvgAvg, AvgMax, MaxAvg, MaxMax };

inline constexpr std::array<Objective, 4> all_objectives{Objective::AvgAvg, Objective::AvgMax, Objective::MaxAvg,
                                                         Objective::MaxMax};

inline Aggregator outer_aggregator(Objective o) {
  return (o == Objective::AvgAvg || o == Objective::AvgMax) ? Aggregator::Mean : Aggregator::Max;
}
inline Aggregator inner_aggregator(Objective o) {
  return (o == Objective::AvgAvg || o == Objective::MaxAvg) ? Aggregator::Mean : Aggregator::Max;
}

inline std::string to_string(Objective o) {
  switch (o) {
    case Objective::AvgAvg: return "avgavg";
    case Objective::AvgMax: return "avgmax";
    case Objective::MaxAvg: return "maxavg";
    case Objective::MaxMax: return "maxmax";
  }
  return "?";
}

inline Objective parse_objective(std::string_view name) {
  for (auto o : all_objectives)
    if (to_string(o) == name) return o;
  throw InvalidParams("unknown objective '" + std::string(name) + "' (expected avgavg, avgmax, maxavg or maxmax)");
}

namespace detail {

inline CostValue aggregate(const std::vector<CostValue>& xs, Aggregator a) {
  if (xs.empty()) throw Error("aggregate over an empty set");
  if (a == Aggregator::Max) {
    CostValue best = xs.front();
    for (const auto& x : xs) best = max_cost(best, x);
    return best;
  }
  CostValue sum = CostValue::exact(0);
  for (const auto& x : xs) sum += x;
  return sum / Rational(static_cast<long long>(xs.size()));
}

}  // namespace detail

/// Cost of `c` restricted to group `g`: mean or max of member distances.
inline CostValue group_cost(const Instance& inst, GroupId g, CandidateId c, Aggregator inner) {
  if (g.value >= inst.group_count()) throw InvalidInstance("unknown group " + label(g));
  std::vector<CostValue> xs;
  for (auto v : inst.partition().members(g)) xs.push_back(inst.distance(v, c).value());
  return detail::aggregate(xs, inner);
}

inline CostValue group_cost(const Instance& inst, GroupId g, CandidateId c, Objective o) {
  return group_cost(inst, g, c, inner_aggregator(o));
}

inline CostValue cost(Objective o, const Instance& inst, CandidateId c) {
  std::vector<CostValue> per_group;
  per_group.reserve(inst.group_count());
  for (std::size_t g = 0; g < inst.group_count(); ++g)
    per_group.push_back(group_cost(inst, GroupId(g), c, inner_aggregator(o)));
  return detail::aggregate(per_group, outer_aggregator(o));
}

/// cost(o, inst, c) for every candidate, in index order.
inline std::vector<CostValue> all_costs(Objective o, const Instance& inst) {
  std::vector<CostValue> out;
  out.reserve(inst.candidate_count());
  for (std::size_t c = 0; c < inst.candidate_count(); ++c) out.push_back(cost(o, inst, CandidateId(c)));
  return out;
}

namespace detail {

inline std::pair<CandidateId, CostValue> argmin(const std::vector<CostValue>& costs) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < costs.size(); ++c)
    if (costs[c] < costs[best]) best = c;
  return {CandidateId(best), costs[best]};
}

}  // namespace detail

/// Minimizer of cost under `o`; ties go to the lower index.
inline std::pair<CandidateId, CostValue> optimal_candidate(Objective o, const Instance& inst) {
  return detail::argmin(all_costs(o, inst));
}

/// Minimizer of the group-restricted cost within `g`.
inline std::pair<CandidateId, CostValue> optimal_in_group(const Instance& inst, GroupId g, Aggregator inner) {
  std::vector<CostValue> costs;
  for (std::size_t c = 0; c < inst.candidate_count(); ++c) costs.push_back(group_cost(inst, g, CandidateId(c), inner));
  return detail::argmin(costs);
}

/// Voter farthest from `c` within `scope` (all voters when empty); ties go to
/// the lower voter index.
inline VoterId farthest_voter(const Instance& inst, CandidateId c, std::optional<GroupId> scope = std::nullopt) {
  std::vector<VoterId> pool;
  if (scope) {
    if (scope->value >= inst.group_count()) throw InvalidInstance("unknown group " + label(*scope));
    pool = inst.partition().members(*scope);
  } else {
    for (std::size_t v = 0; v < inst.voter_count(); ++v) pool.emplace_back(v);
  }
  VoterId best = pool.front();
  for (auto v : pool)
    if (inst.distance(best, c) < inst.distance(v, c)) best = v;
  return best;
}

/// Group in which `c` has the highest average cost; ties go to the lower index.
inline GroupId worst_group(const Instance& inst, CandidateId c) {
  GroupId best(0);
  CostValue worst = group_cost(inst, best, c, Aggregator::Mean);
  for (std::size_t g = 1; g < inst.group_count(); ++g) {
    auto x = group_cost(inst, GroupId(g), c, Aggregator::Mean);
    if (x > worst) {
      worst = x;
      best = GroupId(g);
    }
  }
  return best;
}

}  // namespace distortion_lab
