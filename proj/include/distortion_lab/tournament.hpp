#pragma once

#include <algorithm>
#include <cstddef>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "distortion_lab/errors.hpp"
#include "distortion_lab/io.hpp"
#include "distortion_lab/model.hpp"
#include "distortion_lab/rules.hpp"

namespace distortion_lab {

/// Complete directed graph over candidates: `beats[u][w]` iff the rule picks u
/// in the promoted two-voter election between u and w.
class BiasTournament {
 public:
  BiasTournament(Ranking sigma, std::vector<std::vector<bool>> beats) : sigma_(std::move(sigma)), beats_(std::move(beats)) {}

  std::size_t candidate_count() const { return beats_.size(); }
  const Ranking& sigma() const { return sigma_; }
  bool beats(CandidateId u, CandidateId w) const { return beats_.at(u.value).at(w.value); }

  std::size_t indegree(CandidateId c) const {
    std::size_t d = 0;
    for (std::size_t u = 0; u < beats_.size(); ++u) d += beats_[u][c.value] ? 1 : 0;
    return d;
  }

  /// Directed edges (winner, loser), ordered by winner then loser.
  std::vector<std::pair<CandidateId, CandidateId>> edges() const {
    std::vector<std::pair<CandidateId, CandidateId>> out;
    for (std::size_t u = 0; u < beats_.size(); ++u)
      for (std::size_t w = 0; w < beats_.size(); ++w)
        if (beats_[u][w]) out.emplace_back(CandidateId(u), CandidateId(w));
    return out;
  }

  bool is_complete() const {
    for (std::size_t u = 0; u < beats_.size(); ++u) {
      if (beats_[u][u]) return false;
      for (std::size_t w = u + 1; w < beats_.size(); ++w)
        if (beats_[u][w] == beats_[w][u]) return false;
    }
    return true;
  }

  friend bool operator==(const BiasTournament&, const BiasTournament&) = default;

 private:
  Ranking sigma_;
  std::vector<std::vector<bool>> beats_;
};

/// The two promoted ballots for the pair (u, w): u above w, then w above u.
inline Election biased_election(const Ranking& sigma, CandidateId u, CandidateId w) {
  if (std::find(sigma.begin(), sigma.end(), u) == sigma.end() || std::find(sigma.begin(), sigma.end(), w) == sigma.end())
    throw UnknownCandidate("biased election pair " + label(u) + ", " + label(w) + " not in sigma");
  Ranking first{u, w}, second{w, u};
  first.reserve(sigma.size());
  for (auto x : sigma)
    if (x != u && x != w) first.push_back(x);
  second.insert(second.end(), first.begin() + 2, first.end());
  return Election({std::move(first), std::move(second)}, natural_order(sigma.size()), {2});
}

inline BiasTournament build_bias_tournament(const Rule& rule, const Ranking& sigma) {
  const std::size_t m = sigma.size();
  if (m < 2) throw InvalidParams("bias tournament needs at least two candidates");
  if (!is_permutation_of(sigma, m)) throw InvalidParams("sigma is not a strict order over the candidates");
  if (!rule.is_deterministic()) throw InvalidParams("bias tournament needs a deterministic rule, got " + rule.name());
  std::vector<std::vector<bool>> beats(m, std::vector<bool>(m, false));
  for (std::size_t u = 0; u < m; ++u)
    for (std::size_t w = u + 1; w < m; ++w) {
      CandidateId got = rule.pick(biased_election(sigma, CandidateId(u), CandidateId(w)));
      if (got.value == u) beats[u][w] = true;
      else if (got.value == w) beats[w][u] = true;
      else throw IndecisiveRule(u, w, got.value);
    }
  return BiasTournament(sigma, std::move(beats));
}

inline std::size_t indegree_floor(std::size_t m) { return m / 2; }  // ceil((m-1)/2)

/// Candidate of maximum in-degree, ties to the lower index.
inline std::pair<CandidateId, std::size_t> max_indegree_candidate(const BiasTournament& t) {
  CandidateId best(0);
  std::size_t deg = t.indegree(best);
  for (std::size_t c = 1; c < t.candidate_count(); ++c) {
    std::size_t d = t.indegree(CandidateId(c));
    if (d > deg) {
      deg = d;
      best = CandidateId(c);
    }
  }
  if (deg < indegree_floor(t.candidate_count()))
    throw Error("tournament max in-degree " + std::to_string(deg) + " below " + std::to_string(indegree_floor(t.candidate_count())));
  return {best, deg};
}

/// Every u with an edge u -> c, ascending.
inline std::vector<CandidateId> losers_against(const BiasTournament& t, CandidateId c) {
  std::vector<CandidateId> out;
  for (std::size_t u = 0; u < t.candidate_count(); ++u)
    if (t.beats(CandidateId(u), c)) out.emplace_back(u);
  return out;
}

inline Json tournament_json(const BiasTournament& t, const std::string& rule_name) {
  Json edges = Json::array();
  for (auto [u, w] : t.edges()) edges.push_back(Json::array({label(u), label(w)}));
  Json sigma = Json::array();
  for (auto c : t.sigma()) sigma.push_back(label(c));
  Json indeg = Json::object();
  for (std::size_t c = 0; c < t.candidate_count(); ++c) indeg[label(CandidateId(c))] = t.indegree(CandidateId(c));
  auto [best, deg] = max_indegree_candidate(t);
  return Json{{"rule", rule_name},
              {"m", t.candidate_count()},
              {"sigma", sigma},
              {"edges", edges},
              {"indegree", indeg},
              {"max_indegree", {{"candidate", label(best)}, {"indegree", deg}}}};
}

inline std::string tournament_dot(const BiasTournament& t) {
  std::ostringstream os;
  os << "digraph bias_tournament {\n";
  for (std::size_t c = 0; c < t.candidate_count(); ++c) os << "  " << label(CandidateId(c)) << ";\n";
  for (auto [u, w] : t.edges()) os << "  " << label(u) << " -> " << label(w) << ";\n";
  os << "}\n";
  return os.str();
}

}  // namespace distortion_lab
