#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "distortion_lab/errors.hpp"
#include "distortion_lab/matching.hpp"
#include "distortion_lab/model.hpp"
#include "distortion_lab/rational.hpp"

namespace distortion_lab {

/// Exact probability distribution over candidates. Weights are positive and
/// sum to one.
class OutcomeDistribution {
 public:
  OutcomeDistribution() = default;

  static OutcomeDistribution point(CandidateId c) {
    OutcomeDistribution d;
    d.mass_[c] = 1;
    return d;
  }

  /// Builds from raw weights; zero entries are dropped. Throws unless the
  /// weights are non-negative and sum to exactly 1.
  static OutcomeDistribution from_weights(const std::map<CandidateId, Rational>& w) {
    OutcomeDistribution d;
    Rational total = 0;
    for (const auto& [c, p] : w) {
      if (p < 0) throw Error("negative probability for " + label(c));
      if (p != 0) d.mass_[c] = p;
      total += p;
    }
    if (total != 1) throw Error("outcome weights sum to " + format_rational(total) + ", not 1");
    return d;
  }

  Rational probability(CandidateId c) const {
    auto it = mass_.find(c);
    return it == mass_.end() ? Rational(0) : it->second;
  }
  Rational total() const {
    Rational t = 0;
    for (const auto& [c, p] : mass_) t += p;
    return t;
  }
  std::vector<CandidateId> support() const {
    std::vector<CandidateId> out;
    for (const auto& [c, p] : mass_) out.push_back(c);
    return out;
  }
  bool is_point_mass() const { return mass_.size() == 1; }
  CandidateId only() const {
    if (!is_point_mass()) throw Error("distribution is not a point mass");
    return mass_.begin()->first;
  }
  const std::map<CandidateId, Rational>& weights() const { return mass_; }

  /// sum_i coeff_i * dist_i; coefficients must sum to 1.
  static OutcomeDistribution mixture(const std::vector<std::pair<Rational, OutcomeDistribution>>& parts) {
    std::map<CandidateId, Rational> w;
    for (const auto& [coeff, dist] : parts)
      for (const auto& [c, p] : dist.mass_) w[c] += coeff * p;
    return from_weights(w);
  }

  friend bool operator==(const OutcomeDistribution&, const OutcomeDistribution&) = default;

 private:
  std::map<CandidateId, Rational> mass_;
};

/// Centralized election handed to a rule: ballots over a candidate subset.
/// `slots` is set on over-group elections and lists each group's
/// representative in group order; duplicates are meaningful there.
struct Election {
  std::vector<Ranking> ballots;
  std::vector<CandidateId> candidates;  // ascending
  std::vector<std::size_t> group_sizes;
  std::vector<CandidateId> slots;

  Election() = default;
  Election(std::vector<Ranking> b, std::vector<CandidateId> cands, std::vector<std::size_t> sizes = {},
           std::vector<CandidateId> slot_reps = {})
      : ballots(std::move(b)), candidates(std::move(cands)), group_sizes(std::move(sizes)), slots(std::move(slot_reps)) {
    std::sort(candidates.begin(), candidates.end());
    if (candidates.empty()) throw InvalidParams("election needs at least one candidate");
    if (std::adjacent_find(candidates.begin(), candidates.end()) != candidates.end())
      throw InvalidParams("election candidate set has duplicates");
    if (ballots.empty()) throw InvalidParams("election needs at least one voter");
    for (auto s : slots)
      if (!std::binary_search(candidates.begin(), candidates.end(), s))
        throw InvalidParams("slot representative " + label(s) + " is not a candidate");
    if (group_sizes.empty()) group_sizes = {ballots.size()};
    const std::size_t bound = candidates.back().value + 1;
    std::vector<bool> member(bound, false);
    for (auto c : candidates) member[c.value] = true;
    rank_.assign(ballots.size(), std::vector<std::size_t>(bound, bound));
    for (std::size_t v = 0; v < ballots.size(); ++v) {
      // Same length, only members, no repeats: the ballot is a permutation of the candidates.
      bool ok = ballots[v].size() == candidates.size();
      for (std::size_t i = 0; ok && i < ballots[v].size(); ++i) {
        const std::size_t c = ballots[v][i].value;
        ok = c < bound && member[c] && rank_[v][c] == bound;
        if (ok) rank_[v][c] = i;
      }
      if (!ok) throw InvalidParams("ballot of voter " + std::to_string(v + 1) + " does not rank the election's candidates");
    }
  }

  /// Every voter of `profile` over every candidate, as one group.
  static Election from_profile(const PreferenceProfile& profile) {
    return Election(profile.rankings(), natural_order(profile.candidate_count()));
  }

  std::size_t voter_count() const { return ballots.size(); }
  CandidateId top(std::size_t v) const { return ballots[v].front(); }

  /// positions(v)[c.value] = rank of c on ballot v; absent candidates map past the end.
  const std::vector<std::size_t>& positions(std::size_t v) const { return rank_.at(v); }

  bool contains(CandidateId c) const { return std::binary_search(candidates.begin(), candidates.end(), c); }

 private:
  std::vector<std::vector<std::size_t>> rank_;
};

using DeterministicFn = std::function<CandidateId(const Election&)>;
using RandomizedFn = std::function<OutcomeDistribution(const Election&)>;

/// Named voting rule, deterministic or randomized. Rules never see the metric.
class Rule {
 public:
  static Rule deterministic(std::string name, DeterministicFn f) { return Rule(std::move(name), std::move(f)); }
  static Rule randomized(std::string name, RandomizedFn f) { return Rule(std::move(name), std::move(f)); }

  const std::string& name() const { return name_; }
  bool is_deterministic() const { return std::holds_alternative<DeterministicFn>(fn_); }

  CandidateId pick(const Election& e) const {
    auto* f = std::get_if<DeterministicFn>(&fn_);
    if (!f) throw Error("rule '" + name_ + "' is randomized");
    return (*f)(e);
  }

  OutcomeDistribution distribution(const Election& e) const {
    if (auto* f = std::get_if<DeterministicFn>(&fn_)) return OutcomeDistribution::point((*f)(e));
    return std::get<RandomizedFn>(fn_)(e);
  }

 private:
  Rule(std::string name, std::variant<DeterministicFn, RandomizedFn> f) : name_(std::move(name)), fn_(std::move(f)) {}
  std::string name_;
  std::variant<DeterministicFn, RandomizedFn> fn_;
};

/// Edge (u, v) iff voter u ranks `c` no lower than v's top choice.
inline std::vector<std::pair<std::size_t, std::size_t>> domination_graph(const Election& e, CandidateId c) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  if (!e.contains(c)) throw UnknownCandidate(label(c) + " is not in the election");
  for (std::size_t u = 0; u < e.voter_count(); ++u) {
    const auto& pos = e.positions(u);
    for (std::size_t v = 0; v < e.voter_count(); ++v)
      if (pos[c.value] <= pos[e.top(v).value]) edges.emplace_back(u, v);
  }
  return edges;
}

inline std::vector<std::pair<VoterId, VoterId>> domination_graph(const PreferenceProfile& p, CandidateId c) {
  std::vector<std::pair<VoterId, VoterId>> out;
  for (auto [u, v] : domination_graph(Election::from_profile(p), c)) out.emplace_back(VoterId(u), VoterId(v));
  return out;
}

inline bool admits_perfect_matching(const Election& e, CandidateId c) {
  if (!e.contains(c)) throw UnknownCandidate(label(c) + " is not in the election");
  // A voter with no edge at all fails Hall's condition; reject before building the graph.
  for (std::size_t u = 0; u < e.voter_count(); ++u) {
    const auto& pos = e.positions(u);
    bool any = false;
    for (std::size_t v = 0; v < e.voter_count() && !any; ++v) any = pos[c.value] <= pos[e.top(v).value];
    if (!any) return false;
  }
  std::vector<std::vector<std::size_t>> adj(e.voter_count());
  for (auto [u, v] : domination_graph(e, c)) adj[u].push_back(v);
  return perfect_matching(adj, e.voter_count()).has_value();
}

/// Lowest-index candidate whose domination graph has a perfect matching.
inline CandidateId plurality_matching(const Election& e) {
  for (auto c : e.candidates)
    if (admits_perfect_matching(e, c)) return c;
  throw NoMatchingCandidate("no candidate admits a perfect matching");
}

inline CandidateId plurality_matching(const PreferenceProfile& p) { return plurality_matching(Election::from_profile(p)); }

namespace detail {

/// Lowest-index candidate every voter ranks strictly above `c`, if any.
inline std::optional<CandidateId> unanimous_improvement(const Election& e, CandidateId c) {
  for (auto x : e.candidates) {
    if (x == c) continue;
    bool all = true;
    for (std::size_t v = 0; v < e.voter_count(); ++v)
      if (e.positions(v)[x.value] > e.positions(v)[c.value]) {
        all = false;
        break;
      }
    if (all) return x;
  }
  return std::nullopt;
}

}  // namespace detail

inline bool is_pareto_efficient(const Election& e, CandidateId c) { return !detail::unanimous_improvement(e, c); }
inline bool is_pareto_efficient(const PreferenceProfile& p, CandidateId c) {
  return is_pareto_efficient(Election::from_profile(p), c);
}

/// Follows unanimous improvements (lowest index first) until none remain.
inline CandidateId pareto_improve(const Election& e, CandidateId c) {
  std::set<CandidateId> visited{c};
  while (auto next = detail::unanimous_improvement(e, c)) {
    c = *next;
    if (!visited.insert(c).second) throw CycleDetected("Pareto chain revisited " + label(c));
  }
  return c;
}
inline CandidateId pareto_improve(const PreferenceProfile& p, CandidateId c) {
  return pareto_improve(Election::from_profile(p), c);
}

inline CandidateId plurality_matching_pareto(const Election& e) {
  CandidateId w = pareto_improve(e, plurality_matching(e));
  if (!admits_perfect_matching(e, w)) throw NoMatchingCandidate("Pareto improvement lost the perfect matching at " + label(w));
  return w;
}
inline CandidateId plurality_matching_pareto(const PreferenceProfile& p) {
  return plurality_matching_pareto(Election::from_profile(p));
}

inline OutcomeDistribution random_dictatorship(const Election& e) {
  std::map<CandidateId, Rational> w;
  const Rational share(1, static_cast<long long>(e.voter_count()));
  for (std::size_t v = 0; v < e.voter_count(); ++v) w[e.top(v)] += share;
  return OutcomeDistribution::from_weights(w);
}
inline OutcomeDistribution random_dictatorship(const PreferenceProfile& p) {
  return random_dictatorship(Election::from_profile(p));
}

/// Mass 1/k per slot, so repeated representatives accumulate.
inline OutcomeDistribution uniform_over_groups(const std::vector<CandidateId>& reps) {
  if (reps.empty()) throw InvalidParams("uniform selection over an empty representative list");
  std::map<CandidateId, Rational> w;
  const Rational share(1, static_cast<long long>(reps.size()));
  for (auto c : reps) w[c] += share;
  return OutcomeDistribution::from_weights(w);
}

/// Slot-uniform on over-group elections, candidate-uniform otherwise.
inline OutcomeDistribution uniform_rule(const Election& e) {
  return uniform_over_groups(e.slots.empty() ? e.candidates : e.slots);
}

/// Top choice of the first listed voter.
inline CandidateId arbitrary_dictator(const Election& e) { return e.top(0); }
inline CandidateId arbitrary_dictator(const PreferenceProfile& p) { return p.top(VoterId(0)); }

inline const std::vector<std::string>& rule_names() {
  static const std::vector<std::string> names{"fpm", "fpmpar", "frd", "fur", "dictator"};
  return names;
}

inline Rule lookup_rule(std::string_view name) {
  if (name == "fpm") return Rule::deterministic("fpm", [](const Election& e) { return plurality_matching(e); });
  if (name == "fpmpar")
    return Rule::deterministic("fpmpar", [](const Election& e) { return plurality_matching_pareto(e); });
  if (name == "frd") return Rule::randomized("frd", [](const Election& e) { return random_dictatorship(e); });
  if (name == "fur") return Rule::randomized("fur", [](const Election& e) { return uniform_rule(e); });
  if (name == "dictator")
    return Rule::deterministic("dictator", [](const Election& e) { return arbitrary_dictator(e); });
  throw UnknownRule("unknown rule '" + std::string(name) + "' (expected fpm, fpmpar, frd, fur or dictator)");
}

}  // namespace distortion_lab
