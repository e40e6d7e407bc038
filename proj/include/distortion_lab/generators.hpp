#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "distortion_lab/errors.hpp"
#include "distortion_lab/instance.hpp"
#include "distortion_lab/io.hpp"
#include "distortion_lab/mechanisms.hpp"
#include "distortion_lab/objectives.hpp"
#include "distortion_lab/rules.hpp"
#include "distortion_lab/tournament.hpp"

namespace distortion_lab {

struct CostClaim {
  Objective objective;
  CandidateId candidate;
  CostValue value;
};

/// A constructed adversarial instance together with what the construction
/// asserts about it. Claims are re-checked when the instance is built.
struct GeneratedInstance {
  GeneratedInstance(std::string family_name, Instance inst) : family(std::move(family_name)), instance(std::move(inst)) {}

  std::string family;
  Instance instance;
  Json params = Json::object();
  std::vector<Objective> objectives;
  CandidateId claimed_optimal;
  CostValue claimed_optimal_cost;
  std::string ratio_expression;
  CostValue claimed_ratio;
  std::vector<CostClaim> cost_claims;
  std::optional<std::vector<CandidateId>> forced_reps;
  std::optional<std::string> in_rule;
  std::map<std::string, CandidateId> candidate_roles;
  std::map<std::string, VoterId> voter_roles;
  std::optional<int> maxavg_case;
  /// Alternative second-stage ballots (one per group slot) that are all
  /// consistent with the metric.
  std::vector<std::vector<Ranking>> second_stage_variants;
  /// Claimed ratio is the fur mixture over forced_reps.
  bool ratio_from_forced_reps = true;

  CandidateId role(const std::string& name) const {
    auto it = candidate_roles.find(name);
    if (it == candidate_roles.end()) throw Error("construction has no candidate role " + name);
    return it->second;
  }
};

inline bool costs_match(const CostValue& got, const CostValue& want, double tol = 1e-9) {
  if (got.is_exact() && want.is_exact()) return got.rational() == want.rational();
  return std::abs(got.to_double() - want.to_double()) <= tol;
}

/// Re-derives every claim from the objectives and rules; throws on mismatch.
inline void verify_claims(const GeneratedInstance& gi) {
  const auto& inst = gi.instance;
  auto fail = [&](const std::string& what) { throw Error(gi.family + ": claim mismatch: " + what); };
  if (auto v = validate_metric(inst.metric())) fail("metric violation " + v->describe());
  for (const auto& c : gi.cost_claims) {
    auto got = cost(c.objective, inst, c.candidate);
    if (!costs_match(got, c.value))
      fail(to_string(c.objective) + " cost of " + label(c.candidate) + " is " + got.str() + ", claimed " + c.value.str());
  }
  for (auto o : gi.objectives) {
    auto [opt, opt_cost] = optimal_candidate(o, inst);
    if (!costs_match(opt_cost, gi.claimed_optimal_cost))
      fail(to_string(o) + " optimum is " + opt_cost.str() + ", claimed " + gi.claimed_optimal_cost.str());
    if (!costs_match(cost(o, inst, gi.claimed_optimal), opt_cost))
      fail(label(gi.claimed_optimal) + " is not optimal under " + to_string(o));
    if (gi.forced_reps && gi.ratio_from_forced_reps) {
      auto expected = expected_cost(uniform_over_groups(*gi.forced_reps), o, inst);
      auto ratio = cost_ratio(expected, opt_cost);
      if (!ratio || !costs_match(*ratio, gi.claimed_ratio))
        fail(to_string(o) + " ratio is " + (ratio ? ratio->str() : std::string("unbounded")) + ", claimed " +
             gi.claimed_ratio.str());
    }
  }
  if (gi.forced_reps && gi.in_rule) {
    auto reps = run_first_stage(inst, lookup_rule(*gi.in_rule)).representatives();
    if (reps != *gi.forced_reps) fail("stage-one representatives differ from the construction");
  }
}

namespace detail {

/// a first, b second, then the rest in sigma order.
inline Ranking promoted_pair(const Ranking& sigma, CandidateId a, CandidateId b) {
  return promote(promote(sigma, b), a);
}

struct VoterSpec {
  std::string role;
  std::size_t point;
  Ranking ballot;
  std::size_t group;
};

/// Assigns voter ids group by group; within a group the voter whose top has
/// the lower index comes first, which reproduces the bias-tournament query.
struct Assembled {
  GroupPartition partition;
  PreferenceProfile profile;
  Placement placement;
  std::map<std::string, VoterId> roles;
};

inline Assembled assemble(std::vector<VoterSpec> voters, const std::vector<std::size_t>& candidate_points,
                          std::size_t group_count) {
  std::stable_sort(voters.begin(), voters.end(), [](const VoterSpec& a, const VoterSpec& b) {
    if (a.group != b.group) return a.group < b.group;
    return a.ballot.front() < b.ballot.front();
  });
  std::vector<std::vector<VoterId>> groups(group_count);
  std::vector<Ranking> rankings;
  std::vector<std::size_t> vpoints;
  std::map<std::string, VoterId> roles;
  for (std::size_t v = 0; v < voters.size(); ++v) {
    groups.at(voters[v].group).emplace_back(v);
    rankings.push_back(voters[v].ballot);
    vpoints.push_back(voters[v].point);
    roles[voters[v].role] = VoterId(v);
  }
  return {GroupPartition(std::move(groups), voters.size()),
          PreferenceProfile(std::move(rankings), candidate_points.size()), make_placement(vpoints, candidate_points),
          std::move(roles)};
}

struct LoserPick {
  BiasTournament tournament;
  CandidateId loser;
  std::vector<CandidateId> defeaters;  // ascending index
};

inline LoserPick pick_loser(const Rule& rule, const Ranking& sigma, std::size_t need) {
  auto t = build_bias_tournament(rule, sigma);
  auto [loser, deg] = max_indegree_candidate(t);
  if (deg < need)
    throw InvalidParams("bias tournament of " + rule.name() + " has max in-degree " + std::to_string(deg) + ", need " +
                        std::to_string(need));
  auto defeaters = losers_against(t, loser);
  defeaters.resize(need);
  return {std::move(t), loser, std::move(defeaters)};
}

inline void check_sigma(const Ranking& sigma, std::size_t m) {
  if (!is_permutation_of(sigma, m))
    throw InvalidParams("sigma must order exactly " + std::to_string(m) + " candidates");
}

inline Rational q(std::int64_t a, std::int64_t b = 1) { return make_rational(a, b); }

inline Json sigma_json(const Ranking& sigma) {
  Json j = Json::array();
  for (auto c : sigma) j.push_back(c.value);
  return j;
}

}  // namespace detail

/// Two candidates, two voters, one group on a line. Without a rule the voters
/// sit at -1/2 and 1/2 with c1 at 0 and c2 at 1. With a rule, the rule's pick
/// is placed at 1 so it becomes the costly candidate.
inline GeneratedInstance gen_randdet_xmax(const std::optional<Rule>& in_rule = std::nullopt) {
  using detail::q;
  const CandidateId c1(0), c2(1);
  std::vector<Ranking> ballots{{c1, c2}, {c2, c1}};
  CandidateId far = c2;
  if (in_rule) {
    if (!in_rule->is_deterministic()) throw InvalidParams("xmax construction needs a deterministic in-group rule");
    far = in_rule->pick(Election(ballots, {c1, c2}, {2}));
  }
  const CandidateId near = far == c1 ? c2 : c1;
  // Points: 0 = voter with top `near`, 1 = voter with top `far`, then c1, c2.
  std::vector<Rational> pos{q(-1, 2), q(1, 2), Rational(0), Rational(0)};
  pos[2 + far.value] = 1;
  pos[2 + near.value] = 0;
  std::vector<detail::VoterSpec> voters;
  for (std::size_t i = 0; i < 2; ++i) {
    bool top_far = ballots[i].front() == far;
    voters.push_back({"v" + std::to_string(i + 1), top_far ? 1u : 0u, ballots[i], 0});
  }
  auto a = detail::assemble(std::move(voters), {2, 3}, 1);
  GeneratedInstance gi{"randdet-xmax", Instance(std::move(a.partition), std::move(a.profile), Metric::line(pos), std::move(a.placement))};
  gi.voter_roles = a.roles;
  gi.candidate_roles = {{"c1", near}, {"c2", far}};
  gi.objectives = {Objective::AvgMax, Objective::MaxMax};
  gi.claimed_optimal = near;
  gi.claimed_optimal_cost = CostValue::exact(q(1, 2));
  gi.ratio_expression = "3";
  gi.claimed_ratio = CostValue::exact(3);
  for (auto o : gi.objectives) {
    gi.cost_claims.push_back({o, near, CostValue::exact(q(1, 2))});
    gi.cost_claims.push_back({o, far, CostValue::exact(q(3, 2))});
  }
  gi.forced_reps = std::vector<CandidateId>{far};
  if (in_rule) {
    gi.in_rule = in_rule->name();
    gi.params["in"] = in_rule->name();
  }
  verify_claims(gi);
  return gi;
}

/// Four candidates on a line, two two-voter groups. The tournament loser is
/// role c1 and its two defeaters (sigma-ordered) are c2, c3; sigma's order of
/// the remaining three picks where c4 goes.
inline GeneratedInstance gen_randdet_maxavg(const Rule& in_rule, const Ranking& sigma) {
  using detail::q;
  detail::check_sigma(sigma, 4);
  auto pick = detail::pick_loser(in_rule, sigma, 2);
  auto pos_in_sigma = rank_positions(sigma, 4);
  CandidateId r1 = pick.loser;
  CandidateId r2 = pick.defeaters[0], r3 = pick.defeaters[1];
  if (pos_in_sigma[r3.value] < pos_in_sigma[r2.value]) std::swap(r2, r3);
  CandidateId r4(0);
  while (r4 == r1 || r4 == r2 || r4 == r3) r4 = CandidateId(r4.value + 1);

  int which = 1;
  if (pos_in_sigma[r4.value] < pos_in_sigma[r2.value]) which = 3;
  else if (pos_in_sigma[r4.value] < pos_in_sigma[r3.value]) which = 2;
  const Rational c4_pos = which == 1 ? Rational(10) : which == 2 ? Rational(-1) : Rational(1);

  // Points 0..3 voters v1..v4, then candidates by actual index.
  std::vector<Rational> pos{q(-1, 2), Rational(0), Rational(0), q(1, 2), 0, 0, 0, 0};
  pos[4 + r1.value] = 0;
  pos[4 + r2.value] = -1;
  pos[4 + r3.value] = 1;
  pos[4 + r4.value] = c4_pos;
  std::vector<detail::VoterSpec> voters{
      {"v1", 0, detail::promoted_pair(sigma, r2, r1), 0},
      {"v2", 1, detail::promoted_pair(sigma, r1, r2), 0},
      {"v3", 2, detail::promoted_pair(sigma, r1, r3), 1},
      {"v4", 3, detail::promoted_pair(sigma, r3, r1), 1},
  };
  auto a = detail::assemble(std::move(voters), {4, 5, 6, 7}, 2);
  GeneratedInstance gi{"randdet-maxavg",
                       Instance(std::move(a.partition), std::move(a.profile), Metric::line(pos), std::move(a.placement))};
  gi.voter_roles = a.roles;
  gi.candidate_roles = {{"c1", r1}, {"c2", r2}, {"c3", r3}, {"c4", r4}};
  gi.objectives = {Objective::MaxAvg};
  gi.claimed_optimal = r1;
  gi.claimed_optimal_cost = CostValue::exact(q(1, 4));
  gi.ratio_expression = "5";
  gi.claimed_ratio = CostValue::exact(5);
  gi.cost_claims = {{Objective::MaxAvg, r1, CostValue::exact(q(1, 4))},
                    {Objective::MaxAvg, r2, CostValue::exact(q(5, 4))},
                    {Objective::MaxAvg, r3, CostValue::exact(q(5, 4))}};
  if (which != 1) gi.cost_claims.push_back({Objective::MaxAvg, r4, CostValue::exact(q(5, 4))});
  gi.forced_reps = std::vector<CandidateId>{r2, r3};
  gi.in_rule = in_rule.name();
  gi.maxavg_case = which;
  gi.params = Json{{"in", in_rule.name()}, {"sigma", detail::sigma_json(sigma)}, {"case", which}};
  verify_claims(gi);
  return gi;
}

/// Tree on 2k+3 vertices: hub u1 carries the loser and one voter of each
/// group; spoke u_{2i} - u_{2i+1} carries the other voter and defeater c_i;
/// the k-1 spare candidates sit two edges away at u_{2k+3}.
inline GeneratedInstance gen_randdet_avgavg(std::size_t k, const Rule& in_rule, const Ranking& sigma) {
  using detail::q;
  if (k < 2) throw InvalidParams("randdet-avgavg needs k >= 2");
  const std::size_t m = 2 * k;
  detail::check_sigma(sigma, m);
  auto pick = detail::pick_loser(in_rule, sigma, k);
  const CandidateId loser = pick.loser;
  const auto& defeaters = pick.defeaters;
  std::vector<CandidateId> spares;
  for (std::size_t c = 0; c < m; ++c) {
    CandidateId id(c);
    if (id != loser && std::find(defeaters.begin(), defeaters.end(), id) == defeaters.end()) spares.push_back(id);
  }

  // Vertex u_j is index j-1.
  const std::size_t V = 2 * k + 3;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 1; i <= k + 1; ++i) {
    edges.emplace_back(0, 2 * i - 1);
    edges.emplace_back(2 * i - 1, 2 * i);
  }
  std::vector<std::size_t> cpoints(m);
  cpoints[loser.value] = 0;
  for (std::size_t i = 1; i <= k; ++i) cpoints[defeaters[i - 1].value] = 2 * i;
  for (auto s : spares) cpoints[s.value] = 2 * k + 2;

  std::vector<detail::VoterSpec> voters;
  for (std::size_t i = 1; i <= k; ++i) {
    CandidateId ci = defeaters[i - 1];
    voters.push_back({"v" + std::to_string(2 * i - 1), 0, detail::promoted_pair(sigma, loser, ci), i - 1});
    voters.push_back({"v" + std::to_string(2 * i), 2 * i - 1, detail::promoted_pair(sigma, ci, loser), i - 1});
  }
  auto a = detail::assemble(std::move(voters), cpoints, k);
  GeneratedInstance gi{"randdet-avgavg", Instance(std::move(a.partition), std::move(a.profile),
                                                  Metric::graph(Graph::unit(V, edges)), std::move(a.placement))};
  gi.voter_roles = a.roles;
  const auto kk = static_cast<std::int64_t>(k);
  gi.candidate_roles["c" + std::to_string(m)] = loser;
  for (std::size_t i = 1; i <= k; ++i) gi.candidate_roles["c" + std::to_string(i)] = defeaters[i - 1];
  for (std::size_t j = 0; j < spares.size(); ++j) gi.candidate_roles["c" + std::to_string(k + 1 + j)] = spares[j];
  gi.objectives = {Objective::AvgAvg};
  gi.claimed_optimal = loser;
  gi.claimed_optimal_cost = CostValue::exact(q(1, 2));
  gi.ratio_expression = "5-2/k";
  gi.claimed_ratio = CostValue::exact(q(5 * kk - 2, kk));
  gi.cost_claims.push_back({Objective::AvgAvg, loser, CostValue::exact(q(1, 2))});
  for (auto c : defeaters) gi.cost_claims.push_back({Objective::AvgAvg, c, CostValue::exact(q(5 * kk - 2, 2 * kk))});
  gi.forced_reps = defeaters;
  gi.in_rule = in_rule.name();
  gi.params = Json{{"k", k}, {"in", in_rule.name()}, {"sigma", detail::sigma_json(sigma)}};
  verify_claims(gi);
  return gi;
}

/// Candidates at -1, 0, 1 and two single-voter groups at -1/2 and 1/2.
inline GeneratedInstance gen_randrand_maxX() {
  using detail::q;
  const CandidateId c1(0), c2(1), c3(2);
  std::vector<Rational> pos{q(-1, 2), q(1, 2), Rational(-1), Rational(0), Rational(1)};
  std::vector<detail::VoterSpec> voters{{"v1", 0, {c1, c2, c3}, 0}, {"v2", 1, {c3, c2, c1}, 1}};
  auto a = detail::assemble(std::move(voters), {2, 3, 4}, 2);
  GeneratedInstance gi{"randrand-maxx",
                       Instance(std::move(a.partition), std::move(a.profile), Metric::line(pos), std::move(a.placement))};
  gi.voter_roles = a.roles;
  gi.candidate_roles = {{"c1", c1}, {"c2", c2}, {"c3", c3}};
  gi.objectives = {Objective::MaxAvg, Objective::MaxMax};
  gi.claimed_optimal = c2;
  gi.claimed_optimal_cost = CostValue::exact(q(1, 2));
  gi.ratio_expression = "3";
  gi.claimed_ratio = CostValue::exact(3);
  for (auto o : gi.objectives) {
    gi.cost_claims.push_back({o, c1, CostValue::exact(q(3, 2))});
    gi.cost_claims.push_back({o, c2, CostValue::exact(q(1, 2))});
    gi.cost_claims.push_back({o, c3, CostValue::exact(q(3, 2))});
  }
  gi.forced_reps = std::vector<CandidateId>{c1, c3};
  gi.in_rule = "frd";
  verify_claims(gi);
  return gi;
}

/// Family I_1..I_m over one shared cyclic profile: in I_i only c_i is near
/// and only v_i is far from the others.
inline std::vector<GeneratedInstance> gen_cyclic_avgmax(std::size_t m) {
  using detail::q;
  if (m < 2) throw InvalidParams("cyclic family needs m >= 2");
  std::vector<Ranking> rankings(m);
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t s = 0; s < m; ++s) rankings[j].emplace_back((j + s) % m);
  const auto mm = static_cast<std::int64_t>(m);
  std::vector<GeneratedInstance> out;
  for (std::size_t i = 0; i < m; ++i) {
    // Points 0..m-1 voters, m..2m-1 candidates.
    std::vector<Rational> pos(2 * m);
    std::vector<std::size_t> vp, cp;
    for (std::size_t j = 0; j < m; ++j) {
      pos[j] = j == i ? q(-1, 2) : q(1, 2);
      pos[m + j] = j == i ? 0 : 1;
      vp.push_back(j);
      cp.push_back(m + j);
    }
    GeneratedInstance gi{"cyclic-avgmax", Instance(GroupPartition::single(m), PreferenceProfile(rankings, m),
                                                   Metric::line(pos), make_placement(vp, cp))};
    for (std::size_t j = 0; j < m; ++j) {
      gi.candidate_roles["c" + std::to_string(j + 1)] = CandidateId(j);
      gi.voter_roles["v" + std::to_string(j + 1)] = VoterId(j);
    }
    gi.objectives = {Objective::AvgMax, Objective::MaxMax};
    gi.claimed_optimal = CandidateId(i);
    gi.claimed_optimal_cost = CostValue::exact(q(1, 2));
    gi.ratio_expression = "3-2/m";
    gi.claimed_ratio = CostValue::exact(q(3 * mm - 2, mm));
    gi.ratio_from_forced_reps = false;
    for (auto o : gi.objectives)
      for (std::size_t j = 0; j < m; ++j)
        gi.cost_claims.push_back({o, CandidateId(j), CostValue::exact(j == i ? q(1, 2) : q(3, 2))});
    gi.params = Json{{"m", m}, {"member", i + 1}};
    verify_claims(gi);
    out.push_back(std::move(gi));
  }
  return out;
}

/// Star tree: c_m at the hub, each single-voter group on its own spoke one
/// edge short of its top candidate.
inline GeneratedInstance gen_randrand_avgavg(std::size_t k, std::optional<Ranking> sigma = std::nullopt) {
  using detail::q;
  if (k < 2) throw InvalidParams("randrand-avgavg needs k >= 2");
  const std::size_t m = k + 1;
  Ranking s = sigma ? *sigma : natural_order(m);
  detail::check_sigma(s, m);
  const CandidateId cm(m - 1);
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 1; i <= k; ++i) {
    edges.emplace_back(0, 2 * i - 1);
    edges.emplace_back(2 * i - 1, 2 * i);
  }
  std::vector<std::size_t> cpoints(m);
  cpoints[cm.value] = 0;
  std::vector<detail::VoterSpec> voters;
  for (std::size_t i = 1; i <= k; ++i) {
    CandidateId ci(i - 1);
    cpoints[ci.value] = 2 * i;
    voters.push_back({"v" + std::to_string(i), 2 * i - 1, detail::promoted_pair(s, ci, cm), i - 1});
  }
  auto a = detail::assemble(std::move(voters), cpoints, k);
  GeneratedInstance gi{"randrand-avgavg", Instance(std::move(a.partition), std::move(a.profile),
                                                   Metric::graph(Graph::unit(2 * k + 1, edges)), std::move(a.placement))};
  gi.voter_roles = a.roles;
  for (std::size_t c = 0; c < m; ++c) gi.candidate_roles["c" + std::to_string(c + 1)] = CandidateId(c);
  const auto kk = static_cast<std::int64_t>(k);
  gi.objectives = {Objective::AvgAvg};
  gi.claimed_optimal = cm;
  gi.claimed_optimal_cost = CostValue::exact(1);
  gi.ratio_expression = "3-2/n";
  gi.claimed_ratio = CostValue::exact(q(3 * kk - 2, kk));
  gi.cost_claims.push_back({Objective::AvgAvg, cm, CostValue::exact(1)});
  std::vector<CandidateId> reps;
  for (std::size_t i = 0; i < k; ++i) {
    gi.cost_claims.push_back({Objective::AvgAvg, CandidateId(i), CostValue::exact(q(3 * kk - 2, kk))});
    reps.emplace_back(i);
  }
  gi.forced_reps = reps;
  gi.in_rule = "frd";
  gi.params = Json{{"k", k}, {"sigma", detail::sigma_json(s)}};
  verify_claims(gi);
  return gi;
}

/// Nine-vertex graph for the deterministic two-stage MaxAvg bound. The two
/// stored second-stage variants differ only in where c1 and c4 sit on both
/// representative ballots, and both are consistent with the metric.
inline GeneratedInstance gen_detdet_maxavg(const Rule& in_rule, const Ranking& sigma) {
  using detail::q;
  detail::check_sigma(sigma, 4);
  auto pick = detail::pick_loser(in_rule, sigma, 2);
  auto pos_in_sigma = rank_positions(sigma, 4);
  CandidateId r1 = pick.loser;
  CandidateId r2 = pick.defeaters[0], r3 = pick.defeaters[1];
  if (pos_in_sigma[r3.value] < pos_in_sigma[r2.value]) std::swap(r2, r3);
  CandidateId r4(0);
  while (r4 == r1 || r4 == r2 || r4 == r3) r4 = CandidateId(r4.value + 1);

  // u_j is index j-1: cycle u1-u2-u3-u8-u7-u9-u5-u6-u1 plus the chord path u1-u4-u7.
  std::vector<std::pair<std::size_t, std::size_t>> edges{{0, 1}, {1, 2}, {2, 7}, {7, 6}, {6, 8},
                                                         {8, 4}, {4, 5}, {5, 0}, {0, 3}, {3, 6}};
  std::vector<std::size_t> cpoints(4);
  cpoints[r1.value] = 0;
  cpoints[r2.value] = 2;
  cpoints[r3.value] = 4;
  cpoints[r4.value] = 6;
  std::vector<detail::VoterSpec> voters{
      {"v1", 0, detail::promoted_pair(sigma, r1, r2), 0},
      {"v2", 1, detail::promoted_pair(sigma, r2, r1), 0},
      {"v3", 0, detail::promoted_pair(sigma, r1, r3), 1},
      {"v4", 5, detail::promoted_pair(sigma, r3, r1), 1},
  };
  auto a = detail::assemble(std::move(voters), cpoints, 2);
  GeneratedInstance gi{"detdet-maxavg", Instance(std::move(a.partition), std::move(a.profile),
                                                 Metric::graph(Graph::unit(9, edges)), std::move(a.placement))};
  gi.voter_roles = a.roles;
  gi.candidate_roles = {{"c1", r1}, {"c2", r2}, {"c3", r3}, {"c4", r4}};
  gi.objectives = {Objective::MaxAvg};
  gi.claimed_optimal = r1;
  gi.claimed_optimal_cost = CostValue::exact(q(1, 2));
  gi.ratio_expression = "5";
  gi.claimed_ratio = CostValue::exact(5);
  gi.ratio_from_forced_reps = false;
  gi.cost_claims = {{Objective::MaxAvg, r1, CostValue::exact(q(1, 2))},
                    {Objective::MaxAvg, r2, CostValue::exact(q(5, 2))},
                    {Objective::MaxAvg, r3, CostValue::exact(q(5, 2))},
                    {Objective::MaxAvg, r4, CostValue::exact(q(5, 2))}};
  gi.forced_reps = std::vector<CandidateId>{r2, r3};
  gi.in_rule = in_rule.name();
  gi.second_stage_variants = {{{r2, r1, r4, r3}, {r3, r1, r4, r2}}, {{r2, r4, r1, r3}, {r3, r4, r1, r2}}};
  gi.params = Json{{"in", in_rule.name()}, {"sigma", detail::sigma_json(sigma)}};
  verify_claims(gi);
  for (const auto& variant : gi.second_stage_variants) {
    (void)second_stage_election(gi.instance, *gi.forced_reps, OverScope::AllCandidates, variant);
    for (std::size_t s = 0; s < variant.size(); ++s) {
      CandidateId rep = (*gi.forced_reps)[s];
      for (std::size_t j = 1; j < variant[s].size(); ++j)
        if (gi.instance.distance(rep, variant[s][j]) < gi.instance.distance(rep, variant[s][j - 1]))
          throw Error("detdet-maxavg: second-stage variant inconsistent with the metric");
    }
  }
  return gi;
}

/// Closed-form AvgAvg ratio of the simplex construction with t+2 candidates.
inline double euclidean_randrand_ratio(std::size_t t) {
  const double T = static_cast<double>(t);
  const double num = (T / (T + 1)) * std::sqrt((5 * T + 4) / (4 * T + 4)) + (1 / (2 * (T + 1))) * std::sqrt(T / (T + 1));
  return num / (0.5 * std::sqrt(T / (T + 1)));
}

/// Closed-form AvgAvg ratio of the simplex construction with 2m candidates.
inline double euclidean_randdet_ratio(std::size_t m) {
  const double M = static_cast<double>(m);
  return 2 + ((M - 1) / M) * std::sqrt((5 * M + 4) / M) + 1 / M;
}

/// Unit vectors e_1..e_{t+1} plus their centroid in R^{t+1}; each
/// single-voter group sits halfway between its unit vector and the centroid.
inline GeneratedInstance gen_euclidean_randrand(std::size_t t) {
  using detail::q;
  if (t < 1) throw InvalidParams("euclid-randrand needs t >= 1");
  const std::size_t D = t + 1, m = t + 2, n = t + 1;
  const auto d = static_cast<std::int64_t>(D);
  using Sparse = std::pair<Rational, std::vector<std::pair<std::size_t, Rational>>>;
  std::vector<Sparse> pts;
  // Voters first: midpoint of e_i and the centroid.
  for (std::size_t i = 0; i < n; ++i) pts.push_back({q(1, 2 * d), {{i, q(d + 1, 2 * d)}}});
  for (std::size_t i = 0; i < D; ++i) pts.push_back({Rational(0), {{i, Rational(1)}}});
  pts.push_back({q(1, d), {}});
  std::vector<std::size_t> vp, cp;
  for (std::size_t i = 0; i < n; ++i) vp.push_back(i);
  for (std::size_t c = 0; c < m; ++c) cp.push_back(n + c);
  GeneratedInstance gi{"euclid-randrand", Instance::derived(GroupPartition::singletons(n),
                                                            Metric::euclidean_sparse(D, std::move(pts)),
                                                            make_placement(vp, cp))};
  for (std::size_t c = 0; c < m; ++c) gi.candidate_roles["c" + std::to_string(c + 1)] = CandidateId(c);
  const double T = static_cast<double>(t);
  const double near = 0.5 * std::sqrt(T / (T + 1));
  const double far = std::sqrt((5 * T + 4) / (4 * T + 4));
  const CandidateId centroid(m - 1);
  gi.objectives = {Objective::AvgAvg};
  gi.claimed_optimal = centroid;
  gi.claimed_optimal_cost = CostValue::real(near);
  gi.ratio_expression = "[(t/(t+1))sqrt((5t+4)/(4t+4)) + (1/(2(t+1)))sqrt(t/(t+1))] / ((1/2)sqrt(t/(t+1)))";
  gi.claimed_ratio = CostValue::real(euclidean_randrand_ratio(t));
  gi.cost_claims.push_back({Objective::AvgAvg, centroid, CostValue::real(near)});
  std::vector<CandidateId> reps;
  for (std::size_t i = 0; i < n; ++i) reps.emplace_back(i);
  gi.cost_claims.push_back({Objective::AvgAvg, CandidateId(0), CostValue::real((near + T * far) / (T + 1))});
  gi.forced_reps = reps;
  gi.in_rule = "frd";
  gi.params = Json{{"t", t}};
  verify_claims(gi);
  return gi;
}

/// 2m candidates in R^{m+1}: defeaters at e_1..e_m, the loser at the centroid
/// of e_1..e_{m+1}, spares at e_{m+1}.
inline GeneratedInstance gen_euclidean_randdet(std::size_t m, const Rule& in_rule, const Ranking& sigma) {
  using detail::q;
  if (m < 2) throw InvalidParams("euclid-randdet needs m >= 2");
  const std::size_t M = 2 * m, D = m + 1;
  detail::check_sigma(sigma, M);
  auto pick = detail::pick_loser(in_rule, sigma, m);
  const CandidateId loser = pick.loser;
  const auto& defeaters = pick.defeaters;
  const auto d = static_cast<std::int64_t>(D);
  using Sparse = std::pair<Rational, std::vector<std::pair<std::size_t, Rational>>>;
  // Points: 0 centroid, 1..m unit vectors e_1..e_m, m+1 = e_{m+1}, then midpoints.
  std::vector<Sparse> pts;
  pts.push_back({q(1, d), {}});
  for (std::size_t i = 0; i < D; ++i) pts.push_back({Rational(0), {{i, Rational(1)}}});
  for (std::size_t i = 0; i < m; ++i) pts.push_back({q(1, 2 * d), {{i, q(d + 1, 2 * d)}}});
  std::vector<std::size_t> cpoints(M, m + 1);
  cpoints[loser.value] = 0;
  for (std::size_t i = 0; i < m; ++i) cpoints[defeaters[i].value] = 1 + i;
  std::vector<detail::VoterSpec> voters;
  for (std::size_t i = 1; i <= m; ++i) {
    CandidateId ci = defeaters[i - 1];
    voters.push_back({"v" + std::to_string(2 * i - 1), 0, detail::promoted_pair(sigma, loser, ci), i - 1});
    voters.push_back({"v" + std::to_string(2 * i), D + i, detail::promoted_pair(sigma, ci, loser), i - 1});
  }
  auto a = detail::assemble(std::move(voters), cpoints, m);
  GeneratedInstance gi{"euclid-randdet", Instance(std::move(a.partition), std::move(a.profile),
                                                  Metric::euclidean_sparse(D, std::move(pts)), std::move(a.placement))};
  gi.voter_roles = a.roles;
  gi.candidate_roles["c" + std::to_string(m + 1)] = loser;
  for (std::size_t i = 0; i < m; ++i) gi.candidate_roles["c" + std::to_string(i + 1)] = defeaters[i];
  const double Md = static_cast<double>(m);
  const double opt = 0.25 * std::sqrt(Md / (Md + 1));
  gi.objectives = {Objective::AvgAvg};
  gi.claimed_optimal = loser;
  gi.claimed_optimal_cost = CostValue::real(opt);
  gi.ratio_expression = "2+((m-1)/m)sqrt((5m+4)/m)+1/m";
  gi.claimed_ratio = CostValue::real(euclidean_randdet_ratio(m));
  gi.cost_claims.push_back({Objective::AvgAvg, loser, CostValue::real(opt)});
  gi.forced_reps = defeaters;
  gi.in_rule = in_rule.name();
  gi.params = Json{{"m", m}, {"in", in_rule.name()}, {"sigma", detail::sigma_json(sigma)}};
  verify_claims(gi);
  return gi;
}

enum class SamplerKind { Line, Graph, Euclidean };

inline std::string to_string(SamplerKind k) {
  switch (k) {
    case SamplerKind::Line: return "line";
    case SamplerKind::Graph: return "graph";
    case SamplerKind::Euclidean: return "euclidean";
  }
  return "?";
}

inline SamplerKind parse_sampler(std::string_view s) {
  if (s == "line") return SamplerKind::Line;
  if (s == "graph") return SamplerKind::Graph;
  if (s == "euclidean") return SamplerKind::Euclidean;
  throw InvalidParams("unknown sampler '" + std::string(s) + "' (expected line, graph or euclidean)");
}

struct RandomParams {
  std::size_t n = 4;
  std::size_t m = 3;
  std::size_t k = 2;
  SamplerKind kind = SamplerKind::Line;
  std::size_t dimension = 2;
  std::uint64_t seed = 0;
};

namespace detail {

/// Uniform integer in [lo, hi] by rejection, independent of the standard
/// library's distribution implementations.
inline std::int64_t uniform_int(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % span;
  std::uint64_t x;
  do x = rng();
  while (x >= limit);
  return lo + static_cast<std::int64_t>(x % span);
}

inline GroupPartition random_partition(std::mt19937_64& rng, std::size_t n, std::size_t k) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[uniform_int(rng, 0, static_cast<std::int64_t>(i - 1))]);
  std::vector<std::vector<VoterId>> groups(k);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t g = i < k ? i : static_cast<std::size_t>(uniform_int(rng, 0, static_cast<std::int64_t>(k - 1)));
    groups[g].emplace_back(order[i]);
  }
  return GroupPartition(std::move(groups), n);
}

}  // namespace detail

/// Uniformly random strict order over m candidates.
inline Ranking random_order(std::size_t m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Ranking r = natural_order(m);
  for (std::size_t i = m; i > 1; --i)
    std::swap(r[i - 1], r[static_cast<std::size_t>(detail::uniform_int(rng, 0, static_cast<std::int64_t>(i - 1)))]);
  return r;
}

/// Reproducible random instance; the profile is derived from the metric.
/// Line points are halves in [-10, 10]; Euclidean points lie on the integer
/// grid [-6, 6]^d; graphs are random spanning trees plus extra edges with
/// weights a/b, a in 1..6, b in 1..3.
inline Instance gen_random(const RandomParams& p) {
  if (p.n < 1 || p.m < 1) throw InvalidParams("random instance needs n >= 1 and m >= 1");
  if (p.k < 1 || p.k > p.n) throw InvalidParams("random instance needs 1 <= k <= n");
  if (p.kind == SamplerKind::Euclidean && p.dimension < 1) throw InvalidParams("Euclidean sampler needs dimension >= 1");
  std::mt19937_64 rng(p.seed);
  using detail::uniform_int;
  const std::size_t P = p.n + p.m;
  std::optional<Metric> metric;
  std::vector<std::size_t> points(P);
  switch (p.kind) {
    case SamplerKind::Line: {
      std::vector<Rational> pos;
      for (std::size_t i = 0; i < P; ++i) pos.push_back(make_rational(uniform_int(rng, -20, 20), 2));
      metric = Metric::line(std::move(pos));
      for (std::size_t i = 0; i < P; ++i) points[i] = i;
      break;
    }
    case SamplerKind::Euclidean: {
      std::vector<std::vector<Rational>> pts(P);
      for (auto& pt : pts)
        for (std::size_t d = 0; d < p.dimension; ++d) pt.emplace_back(uniform_int(rng, -6, 6));
      metric = Metric::euclidean(pts);
      for (std::size_t i = 0; i < P; ++i) points[i] = i;
      break;
    }
    case SamplerKind::Graph: {
      const auto V = static_cast<std::size_t>(uniform_int(rng, 2, static_cast<std::int64_t>(std::max<std::size_t>(P, 2))));
      Graph g{V, {}};
      auto weight = [&] { return make_rational(uniform_int(rng, 1, 6), uniform_int(rng, 1, 3)); };
      for (std::size_t v = 1; v < V; ++v)
        g.edges.push_back({v, static_cast<std::size_t>(uniform_int(rng, 0, static_cast<std::int64_t>(v - 1))), weight()});
      const auto extra = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<std::int64_t>(V)));
      for (std::size_t e = 0; e < extra; ++e) {
        auto u = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<std::int64_t>(V - 1)));
        auto v = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<std::int64_t>(V - 1)));
        if (u != v) g.edges.push_back({u, v, weight()});
      }
      metric = Metric::graph(std::move(g));
      for (std::size_t i = 0; i < P; ++i) points[i] = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<std::int64_t>(V - 1)));
      break;
    }
  }
  auto partition = detail::random_partition(rng, p.n, p.k);
  std::vector<std::size_t> vp(points.begin(), points.begin() + static_cast<std::ptrdiff_t>(p.n));
  std::vector<std::size_t> cp(points.begin() + static_cast<std::ptrdiff_t>(p.n), points.end());
  return Instance::derived(std::move(partition), std::move(*metric), make_placement(vp, cp));
}

/// Caps for seeded random suites.
struct SuiteCaps {
  std::size_t max_n = 8;
  std::size_t max_m = 6;
  std::size_t max_k = 4;
  std::size_t max_dimension = 3;
  std::optional<SamplerKind> only;  // cycle through all samplers when empty
};

/// Parameters of suite member `index`, drawn from the (seed, index) stream.
inline RandomParams suite_params(std::uint64_t seed, std::uint64_t index, const SuiteCaps& caps) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::mt19937_64 rng(seq);
  using detail::uniform_int;
  RandomParams p;
  static constexpr SamplerKind kinds[] = {SamplerKind::Line, SamplerKind::Graph, SamplerKind::Euclidean};
  p.kind = caps.only ? *caps.only : kinds[index % 3];
  p.n = static_cast<std::size_t>(uniform_int(rng, 1, static_cast<std::int64_t>(caps.max_n)));
  p.m = static_cast<std::size_t>(uniform_int(rng, 1, static_cast<std::int64_t>(caps.max_m)));
  p.k = static_cast<std::size_t>(uniform_int(rng, 1, static_cast<std::int64_t>(std::min(caps.max_k, p.n))));
  p.dimension = static_cast<std::size_t>(uniform_int(rng, 1, static_cast<std::int64_t>(caps.max_dimension)));
  p.seed = rng();
  return p;
}

inline Json claims_json(const GeneratedInstance& gi) {
  Json costs = Json::array();
  for (const auto& c : gi.cost_claims)
    costs.push_back(Json{{"objective", to_string(c.objective)}, {"candidate", label(c.candidate)}, {"cost", cost_json(c.value)}});
  Json objectives = Json::array();
  for (auto o : gi.objectives) objectives.push_back(to_string(o));
  Json roles = Json::object();
  for (const auto& [name, id] : gi.candidate_roles) roles[name] = label(id);
  Json j{{"family", gi.family},
         {"params", gi.params},
         {"objectives", objectives},
         {"optimal", {{"candidate", label(gi.claimed_optimal)}, {"cost", cost_json(gi.claimed_optimal_cost)}}},
         {"ratio", {{"expression", gi.ratio_expression}, {"value", cost_json(gi.claimed_ratio)}, {"float", gi.claimed_ratio.to_double()}}},
         {"costs", costs},
         {"candidate_roles", roles}};
  if (gi.forced_reps) {
    Json reps = Json::array();
    for (auto c : *gi.forced_reps) reps.push_back(label(c));
    j["forced_representatives"] = reps;
  }
  if (gi.in_rule) j["in_rule"] = *gi.in_rule;
  if (gi.maxavg_case) j["case"] = *gi.maxavg_case;
  if (!gi.second_stage_variants.empty()) {
    Json vs = Json::array();
    for (const auto& variant : gi.second_stage_variants) {
      Json ballots = Json::array();
      for (const auto& b : variant) {
        Json row = Json::array();
        for (auto c : b) row.push_back(label(c));
        ballots.push_back(row);
      }
      vs.push_back(ballots);
    }
    j["second_stage_variants"] = vs;
  }
  return j;
}

}  // namespace distortion_lab
