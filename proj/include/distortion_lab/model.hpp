#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "distortion_lab/errors.hpp"

namespace distortion_lab {

/// Dense 0-based index tagged with the kind of entity it names.
template <class Tag>
struct Index {
  std::size_t value = 0;

  constexpr Index() = default;
  constexpr explicit Index(std::size_t v) : value(v) {}
  friend constexpr auto operator<=>(Index, Index) = default;
};

struct VoterTag {};
struct CandidateTag {};
struct GroupTag {};
struct PointTag {};

using VoterId = Index<VoterTag>;
using CandidateId = Index<CandidateTag>;
using GroupId = Index<GroupTag>;
using PointId = Index<PointTag>;

/// 1-based display name used in reports.
inline std::string label(CandidateId c) { return "c" + std::to_string(c.value + 1); }
inline std::string label(VoterId v) { return "v" + std::to_string(v.value + 1); }
inline std::string label(GroupId g) { return "g" + std::to_string(g.value + 1); }
inline std::string label(PointId p) { return "p" + std::to_string(p.value); }

template <class Tag>
std::ostream& operator<<(std::ostream& os, Index<Tag> i) {
  return os << label(i);
}

/// Strict order over candidates, most preferred first.
using Ranking = std::vector<CandidateId>;

inline Ranking natural_order(std::size_t m) {
  Ranking r(m);
  for (std::size_t i = 0; i < m; ++i) r[i] = CandidateId(i);
  return r;
}

inline bool is_permutation_of(const Ranking& r, std::size_t m) {
  if (r.size() != m) return false;
  std::vector<bool> seen(m, false);
  for (auto c : r) {
    if (c.value >= m || seen[c.value]) return false;
    seen[c.value] = true;
  }
  return true;
}

/// Moves `c` to the top of `order`, preserving the relative order of the rest.
inline Ranking promote(const Ranking& order, CandidateId c) {
  auto it = std::find(order.begin(), order.end(), c);
  if (it == order.end()) throw UnknownCandidate("cannot promote " + label(c) + ": not in ordering");
  Ranking out;
  out.reserve(order.size());
  out.push_back(c);
  for (auto x : order)
    if (x != c) out.push_back(x);
  return out;
}

/// rank_positions(r)[c] = position of candidate c in r. `m` bounds candidate ids.
inline std::vector<std::size_t> rank_positions(const Ranking& r, std::size_t m) {
  std::vector<std::size_t> pos(m, m);
  for (std::size_t i = 0; i < r.size(); ++i) pos[r[i].value] = i;
  return pos;
}

/// One strict ranking per voter over all `m` candidates.
class PreferenceProfile {
 public:
  PreferenceProfile() = default;
  PreferenceProfile(std::vector<Ranking> rankings, std::size_t m) : rankings_(std::move(rankings)), m_(m) {
    for (std::size_t v = 0; v < rankings_.size(); ++v)
      if (!is_permutation_of(rankings_[v], m_))
        throw InvalidInstance("ranking of " + label(VoterId(v)) + " is not a permutation of the candidates");
  }

  std::size_t voter_count() const { return rankings_.size(); }
  std::size_t candidate_count() const { return m_; }
  const Ranking& ranking(VoterId v) const { return rankings_.at(v.value); }
  CandidateId top(VoterId v) const { return ranking(v).front(); }
  const std::vector<Ranking>& rankings() const { return rankings_; }

  friend bool operator==(const PreferenceProfile&, const PreferenceProfile&) = default;

 private:
  std::vector<Ranking> rankings_;
  std::size_t m_ = 0;
};

/// Partition of voters 0..n-1 into k >= 1 non-empty groups. Members of each
/// group are kept sorted by voter id; stage-one ballots follow that order.
class GroupPartition {
 public:
  GroupPartition() = default;
  GroupPartition(std::vector<std::vector<VoterId>> groups, std::size_t n) : groups_(std::move(groups)) {
    if (groups_.empty()) throw InvalidInstance("partition needs at least one group");
    std::vector<int> owner(n, -1);
    for (std::size_t g = 0; g < groups_.size(); ++g) {
      auto& members = groups_[g];
      if (members.empty()) throw InvalidInstance(label(GroupId(g)) + " is empty");
      std::sort(members.begin(), members.end());
      for (auto v : members) {
        if (v.value >= n) throw InvalidInstance("group member " + label(v) + " out of range");
        if (owner[v.value] != -1) throw InvalidInstance(label(v) + " appears in two groups");
        owner[v.value] = static_cast<int>(g);
      }
    }
    for (std::size_t v = 0; v < n; ++v)
      if (owner[v] == -1) throw InvalidInstance(label(VoterId(v)) + " belongs to no group");
    group_of_.reserve(n);
    for (int g : owner) group_of_.push_back(GroupId(static_cast<std::size_t>(g)));
  }

  /// Single group holding every voter.
  static GroupPartition single(std::size_t n) {
    std::vector<VoterId> all(n);
    for (std::size_t v = 0; v < n; ++v) all[v] = VoterId(v);
    return GroupPartition({all}, n);
  }

  /// One group per voter.
  static GroupPartition singletons(std::size_t n) {
    std::vector<std::vector<VoterId>> gs(n);
    for (std::size_t v = 0; v < n; ++v) gs[v] = {VoterId(v)};
    return GroupPartition(std::move(gs), n);
  }

  std::size_t group_count() const { return groups_.size(); }
  std::size_t voter_count() const { return group_of_.size(); }
  const std::vector<VoterId>& members(GroupId g) const { return groups_.at(g.value); }
  std::size_t size(GroupId g) const { return members(g).size(); }
  GroupId group_of(VoterId v) const { return group_of_.at(v.value); }
  const std::vector<std::vector<VoterId>>& groups() const { return groups_; }

  std::size_t largest_group() const {
    std::size_t best = 0;
    for (const auto& g : groups_) best = std::max(best, g.size());
    return best;
  }

  std::vector<std::size_t> sizes() const {
    std::vector<std::size_t> out;
    for (const auto& g : groups_) out.push_back(g.size());
    return out;
  }

 private:
  std::vector<std::vector<VoterId>> groups_;
  std::vector<GroupId> group_of_;
};

}  // namespace distortion_lab

template <class Tag>
struct std::hash<distortion_lab::Index<Tag>> {
  std::size_t operator()(distortion_lab::Index<Tag> i) const noexcept { return std::hash<std::size_t>{}(i.value); }
};
