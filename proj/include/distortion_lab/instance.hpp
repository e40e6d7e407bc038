#pragma once

#include <algorithm>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include "distortion_lab/errors.hpp"
#include "distortion_lab/metric.hpp"
#include "distortion_lab/model.hpp"

namespace distortion_lab {

/// Maps every voter and candidate to a point of the metric. Several entities
/// may share one point.
struct Placement {
  std::vector<PointId> voters;
  std::vector<PointId> candidates;

  friend bool operator==(const Placement&, const Placement&) = default;
};

inline Placement make_placement(const std::vector<std::size_t>& voters, const std::vector<std::size_t>& candidates) {
  Placement p;
  for (auto v : voters) p.voters.emplace_back(v);
  for (auto c : candidates) p.candidates.emplace_back(c);
  return p;
}

namespace detail {

inline void check_placement(const Metric& metric, const Placement& placement) {
  const std::size_t P = metric.point_count();
  for (std::size_t v = 0; v < placement.voters.size(); ++v)
    if (placement.voters[v].value >= P)
      throw UnknownPoint(label(VoterId(v)) + " placed at unknown point p" + std::to_string(placement.voters[v].value));
  for (std::size_t c = 0; c < placement.candidates.size(); ++c)
    if (placement.candidates[c].value >= P)
      throw UnknownPoint(label(CandidateId(c)) + " placed at unknown point p" +
                         std::to_string(placement.candidates[c].value));
}

/// table[v][c] = d(v, c).
inline std::vector<std::vector<Distance>> distance_table(const Metric& metric, const Placement& placement) {
  check_placement(metric, placement);
  std::vector<std::vector<Distance>> t(placement.voters.size());
  for (std::size_t v = 0; v < t.size(); ++v) {
    t[v].reserve(placement.candidates.size());
    for (auto pc : placement.candidates) t[v].push_back(metric.distance(placement.voters[v], pc));
  }
  return t;
}

inline Ranking sort_by_distance(const std::vector<Distance>& row) {
  Ranking r = natural_order(row.size());
  std::stable_sort(r.begin(), r.end(), [&](CandidateId a, CandidateId b) { return row[a.value] < row[b.value]; });
  return r;
}

inline bool row_consistent(const Ranking& r, const std::vector<Distance>& row) {
  for (std::size_t i = 1; i < r.size(); ++i)
    if (row[r[i].value] < row[r[i - 1].value]) return false;
  return true;
}

}  // namespace detail

/// Each voter ranks candidates by increasing distance; exact ties go to the
/// lower candidate index.
inline PreferenceProfile derive_profile(const Metric& metric, const Placement& placement) {
  auto table = detail::distance_table(metric, placement);
  std::vector<Ranking> rankings;
  rankings.reserve(table.size());
  for (const auto& row : table) rankings.push_back(detail::sort_by_distance(row));
  return PreferenceProfile(std::move(rankings), placement.candidates.size());
}

/// Weak consistency: d(v,a) < d(v,b) forces a before b; tied candidates may
/// appear in either order.
inline bool check_consistency(const PreferenceProfile& profile, const Metric& metric, const Placement& placement) {
  if (profile.voter_count() != placement.voters.size() || profile.candidate_count() != placement.candidates.size())
    return false;
  auto table = detail::distance_table(metric, placement);
  for (std::size_t v = 0; v < table.size(); ++v)
    if (!detail::row_consistent(profile.ranking(VoterId(v)), table[v])) return false;
  return true;
}

/// Immutable election instance. Copies share the metric and distance table.
class Instance {
 public:
  Instance(GroupPartition partition, PreferenceProfile profile, Metric metric, Placement placement)
      : partition_(std::move(partition)),
        profile_(std::move(profile)),
        metric_(std::make_shared<const Metric>(std::move(metric))),
        placement_(std::move(placement)) {
    check_shape();
    table_ = std::make_shared<const Table>(detail::distance_table(*metric_, placement_));
    check_rows();
  }

  /// Instance whose profile is derived from the metric.
  static Instance derived(GroupPartition partition, Metric metric, Placement placement) {
    auto table = detail::distance_table(metric, placement);
    std::vector<Ranking> rankings;
    rankings.reserve(table.size());
    for (const auto& row : table) rankings.push_back(detail::sort_by_distance(row));
    PreferenceProfile profile(std::move(rankings), placement.candidates.size());
    return Instance(std::move(partition), std::move(profile), std::make_shared<const Metric>(std::move(metric)),
                    std::move(placement), std::make_shared<const Table>(std::move(table)));
  }

  /// Same metric and partition with another (consistent) profile.
  Instance with_profile(PreferenceProfile profile) const {
    Instance out(partition_, std::move(profile), metric_, placement_, table_);
    out.check_rows();
    return out;
  }

  std::size_t voter_count() const { return placement_.voters.size(); }
  std::size_t candidate_count() const { return placement_.candidates.size(); }
  std::size_t group_count() const { return partition_.group_count(); }

  const GroupPartition& partition() const { return partition_; }
  const PreferenceProfile& profile() const { return profile_; }
  const Metric& metric() const { return *metric_; }
  const Placement& placement() const { return placement_; }
  bool is_exact() const { return metric_->is_exact(); }

  const Distance& distance(VoterId v, CandidateId c) const {
    if (v.value >= voter_count()) throw InvalidInstance("unknown voter " + label(v));
    if (c.value >= candidate_count()) throw UnknownCandidate("unknown candidate " + label(c));
    return (*table_)[v.value][c.value];
  }

  Distance distance(CandidateId a, CandidateId b) const {
    if (a.value >= candidate_count()) throw UnknownCandidate("unknown candidate " + label(a));
    if (b.value >= candidate_count()) throw UnknownCandidate("unknown candidate " + label(b));
    return metric_->distance(placement_.candidates[a.value], placement_.candidates[b.value]);
  }

 private:
  using Table = std::vector<std::vector<Distance>>;

  Instance(GroupPartition partition, PreferenceProfile profile, std::shared_ptr<const Metric> metric,
           Placement placement, std::shared_ptr<const Table> table)
      : partition_(std::move(partition)),
        profile_(std::move(profile)),
        metric_(std::move(metric)),
        placement_(std::move(placement)),
        table_(std::move(table)) {
    check_shape();
  }

  void check_rows() const {
    for (std::size_t v = 0; v < table_->size(); ++v)
      if (!detail::row_consistent(profile_.ranking(VoterId(v)), (*table_)[v]))
        throw InvalidInstance("ranking of " + label(VoterId(v)) + " is inconsistent with the metric");
  }

  void check_shape() const {
    if (placement_.candidates.empty()) throw InvalidInstance("instance needs at least one candidate");
    if (placement_.voters.empty()) throw InvalidInstance("instance needs at least one voter");
    if (partition_.voter_count() != placement_.voters.size())
      throw InvalidInstance("partition covers " + std::to_string(partition_.voter_count()) + " voters, placement " +
                            std::to_string(placement_.voters.size()));
    if (profile_.voter_count() != placement_.voters.size())
      throw InvalidInstance("profile has " + std::to_string(profile_.voter_count()) + " rankings for " +
                            std::to_string(placement_.voters.size()) + " voters");
    if (profile_.candidate_count() != placement_.candidates.size())
      throw InvalidInstance("profile ranks " + std::to_string(profile_.candidate_count()) + " candidates, placement has " +
                            std::to_string(placement_.candidates.size()));
  }

  GroupPartition partition_;
  PreferenceProfile profile_;
  std::shared_ptr<const Metric> metric_;
  Placement placement_;
  std::shared_ptr<const Table> table_;
};

}  // namespace distortion_lab
