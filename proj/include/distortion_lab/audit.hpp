#pragma once

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "distortion_lab/errors.hpp"
#include "distortion_lab/generators.hpp"
#include "distortion_lab/io.hpp"
#include "distortion_lab/mechanisms.hpp"
#include "distortion_lab/objectives.hpp"
#include "distortion_lab/rules.hpp"

namespace distortion_lab {

/// Rational arithmetic expression over named instance parameters.
/// Grammar: expr = term {(+|-) term}; term = unary {(*|/|juxtaposition) unary};
/// unary = [-] atom; atom = number | name | ( expr ).
/// Accepts the spellings alpha/α, beta/β, nstar/n*, · for *, − for -.
class BoundExpression {
 public:
  explicit BoundExpression(std::string text) : text_(std::move(text)) {
    Parser p{normalize(text_), 0};
    root_ = p.expr();
    p.skip();
    if (p.i != p.s.size()) throw ParseError("unexpected '" + p.s.substr(p.i) + "' in bound expression '" + text_ + "'");
  }

  const std::string& text() const { return text_; }

  Rational evaluate(const std::map<std::string, Rational>& bindings) const { return eval(*root_, bindings); }

  std::vector<std::string> symbols() const {
    std::vector<std::string> out;
    collect(*root_, out);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

 private:
  struct Node {
    char op = 0;  // 0 number, 's' symbol, 'n' negate, else binary operator
    Rational value;
    std::string name;
    std::shared_ptr<Node> lhs, rhs;
  };
  using Ptr = std::shared_ptr<Node>;

  static std::string normalize(const std::string& s) {
    std::string out;
    for (std::size_t i = 0; i < s.size();) {
      auto starts = [&](std::string_view w) { return s.compare(i, w.size(), w) == 0; };
      if (starts("α")) { out += "alpha"; i += std::string_view("α").size(); }
      else if (starts("β")) { out += "beta"; i += std::string_view("β").size(); }
      else if (starts("·")) { out += "*"; i += std::string_view("·").size(); }
      else if (starts("−")) { out += "-"; i += std::string_view("−").size(); }
      else if (starts("n*")) { out += "nstar"; i += 2; }
      else if (starts("×")) { out += "*"; i += std::string_view("×").size(); }
      else out += s[i++];
    }
    return out;
  }

  struct Parser {
    std::string s;
    std::size_t i;

    void skip() {
      while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    }
    bool eat(char c) {
      skip();
      if (i < s.size() && s[i] == c) {
        ++i;
        return true;
      }
      return false;
    }
    [[noreturn]] void fail(const std::string& what) const {
      throw ParseError("bound expression '" + s + "': " + what + " at offset " + std::to_string(i));
    }
    static Ptr bin(char op, Ptr a, Ptr b) {
      auto n = std::make_shared<Node>();
      n->op = op;
      n->lhs = std::move(a);
      n->rhs = std::move(b);
      return n;
    }
    Ptr expr() {
      Ptr a = term();
      for (;;) {
        if (eat('+')) a = bin('+', a, term());
        else if (eat('-')) a = bin('-', a, term());
        else return a;
      }
    }
    bool starts_atom() {
      skip();
      return i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '(' || s[i] == '_');
    }
    Ptr term() {
      Ptr a = unary();
      for (;;) {
        if (eat('*')) a = bin('*', a, unary());
        else if (eat('/')) a = bin('/', a, unary());
        else if (starts_atom()) a = bin('*', a, unary());
        else return a;
      }
    }
    Ptr unary() {
      if (eat('-')) {
        auto n = std::make_shared<Node>();
        n->op = 'n';
        n->lhs = unary();
        return n;
      }
      return atom();
    }
    Ptr atom() {
      skip();
      if (i >= s.size()) fail("unexpected end");
      if (eat('(')) {
        Ptr e = expr();
        if (!eat(')')) fail("expected ')'");
        return e;
      }
      auto n = std::make_shared<Node>();
      if (std::isdigit(static_cast<unsigned char>(s[i]))) {
        std::size_t j = i;
        while (j < s.size() && (std::isdigit(static_cast<unsigned char>(s[j])) || s[j] == '.')) ++j;
        n->value = parse_rational(s.substr(i, j - i));
        i = j;
        return n;
      }
      if (std::isalpha(static_cast<unsigned char>(s[i])) || s[i] == '_') {
        std::size_t j = i;
        while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
        n->op = 's';
        n->name = s.substr(i, j - i);
        i = j;
        return n;
      }
      fail(std::string("unexpected '") + s[i] + "'");
    }
  };

  static Rational eval(const Node& n, const std::map<std::string, Rational>& b) {
    switch (n.op) {
      case 0: return n.value;
      case 's': {
        auto it = b.find(n.name);
        if (it == b.end()) throw InvalidParams("unbound symbol '" + n.name + "' in bound expression");
        return it->second;
      }
      case 'n': return -eval(*n.lhs, b);
      case '+': return eval(*n.lhs, b) + eval(*n.rhs, b);
      case '-': return eval(*n.lhs, b) - eval(*n.rhs, b);
      case '*': return eval(*n.lhs, b) * eval(*n.rhs, b);
      case '/': {
        Rational d = eval(*n.rhs, b);
        if (d == 0) throw InvalidParams("division by zero in bound expression");
        return eval(*n.lhs, b) / d;
      }
    }
    throw Error("corrupt bound expression");
  }

  static void collect(const Node& n, std::vector<std::string>& out) {
    if (n.op == 's') out.push_back(n.name);
    if (n.lhs) collect(*n.lhs, out);
    if (n.rhs) collect(*n.rhs, out);
  }

  std::string text_;
  Ptr root_;
};

struct BoundSpec {
  std::string name;
  MechanismSpec mechanism;
  Objective objective;
  BoundExpression expression;
  Rational alpha = 3;
  Rational beta = 2;

  /// Binds k, n, nstar, m from the instance plus alpha and beta.
  Rational value_for(const Instance& inst) const {
    std::map<std::string, Rational> b{{"alpha", alpha},
                                      {"beta", beta},
                                      {"k", Rational(static_cast<long long>(inst.group_count()))},
                                      {"n", Rational(static_cast<long long>(inst.voter_count()))},
                                      {"nstar", Rational(static_cast<long long>(inst.partition().largest_group()))},
                                      {"m", Rational(static_cast<long long>(inst.candidate_count()))}};
    Rational v = expression.evaluate(b);
    if (v <= 0) throw InvalidParams("bound '" + name + "' evaluates to non-positive " + format_rational(v));
    return v;
  }
};

/// Every proven upper bound the audit knows, one entry per (mechanism, objective).
inline const std::vector<BoundSpec>& builtin_bounds() {
  static const std::vector<BoundSpec> bounds = [] {
    using O = Objective;
    const MechanismSpec fpm_fur{"fpm", "fur", OverScope::RepresentativesOnly};
    const MechanismSpec fpmpar_fur{"fpmpar", "fur", OverScope::RepresentativesOnly};
    const MechanismSpec frd_fur{"frd", "fur", OverScope::RepresentativesOnly};
    const MechanismSpec mad{"dictator", "dictator", OverScope::RepresentativesOnly};
    const MechanismSpec fpmpar_all{"fpmpar", "fpmpar", OverScope::AllCandidates};
    return std::vector<BoundSpec>{
        {"fpm-fur-maxavg", fpm_fur, O::MaxAvg, BoundExpression("alpha+2")},
        {"fpm-fur-avgavg", fpm_fur, O::AvgAvg, BoundExpression("alpha+2-2/k")},
        {"fpmpar-fur-avgmax", fpmpar_fur, O::AvgMax, BoundExpression("3")},
        {"fpmpar-fur-maxmax", fpmpar_fur, O::MaxMax, BoundExpression("3")},
        {"frd-fur-maxmax", frd_fur, O::MaxMax, BoundExpression("3")},
        {"frd-fur-avgmax", frd_fur, O::AvgMax, BoundExpression("3")},
        {"frd-fur-maxavg", frd_fur, O::MaxAvg, BoundExpression("3")},
        {"frd-fur-avgavg", frd_fur, O::AvgAvg, BoundExpression("3-2/(k*nstar)")},
        {"mad-maxmax", mad, O::MaxMax, BoundExpression("3")},
        {"fpmpar-fpmpar-all-avgmax", fpmpar_all, O::AvgMax, BoundExpression("2beta+3")},
    };
  }();
  return bounds;
}

inline const BoundSpec& find_bound(std::string_view name) {
  for (const auto& b : builtin_bounds())
    if (b.name == name) return b;
  std::string known;
  for (const auto& b : builtin_bounds()) known += (known.empty() ? "" : ", ") + b.name;
  throw InvalidParams("unknown bound '" + std::string(name) + "' (known: " + known + ")");
}

inline constexpr double kEuclideanTolerance = 1e-9;

struct AuditEntry {
  std::size_t index = 0;
  std::string digest;
  std::optional<CostValue> ratio;  // empty when unbounded
  Rational bound;
  std::optional<CostValue> margin;
  bool violation = false;
  std::string error;
};

struct AuditReport {
  std::string bound_name;
  std::string suite;
  std::size_t checked = 0;
  std::optional<CostValue> max_ratio;
  std::size_t max_ratio_index = 0;
  std::optional<CostValue> min_margin;
  std::vector<AuditEntry> entries;
  std::vector<std::size_t> violations;
  std::vector<std::size_t> errors;
  double tolerance = kEuclideanTolerance;
  double runtime_seconds = 0;

  bool passed() const { return violations.empty() && errors.empty(); }
};

/// Compares ratio against bound: exact on rational metrics, with an absolute
/// tolerance once a square root is involved.
inline bool exceeds(const CostValue& ratio, const Rational& bound, double tol = kEuclideanTolerance) {
  if (ratio.is_exact()) return ratio.rational() > bound;
  return ratio.to_double() > to_double(bound) + tol;
}

inline AuditEntry audit_instance(const BoundSpec& bound, const Instance& inst, std::size_t index, bool with_digest = true) {
  AuditEntry e;
  e.index = index;
  try {
    if (with_digest) e.digest = instance_digest(inst);
    e.bound = bound.value_for(inst);
    auto r = evaluate_outcome(inst, run_mechanism(inst, bound.mechanism), bound.objective, bound.mechanism, false);
    e.ratio = r.ratio;
    if (!r.ratio) {
      e.violation = true;
    } else {
      e.margin = CostValue::exact(e.bound) - *r.ratio;
      e.violation = exceeds(*r.ratio, e.bound);
    }
  } catch (const Error& ex) {
    e.error = ex.what();
  }
  return e;
}

/// Produces the instance at a suite position.
using InstanceSource = std::function<Instance(std::size_t index)>;

/// Seeded random suite: member i is gen_random(suite_params(seed, i, caps)).
inline InstanceSource random_suite(std::uint64_t seed, SuiteCaps caps = {}) {
  return [seed, caps](std::size_t index) { return gen_random(suite_params(seed, index, caps)); };
}

inline std::size_t default_workers() {
  if (const char* env = std::getenv("DISTORTION_LAB_WORKERS")) {
    try {
      long v = std::stol(env);
      if (v >= 1) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs `job(i)` for i in [0, count) across `workers` threads. Results land
/// in index order, so output does not depend on scheduling.
template <class T>
std::vector<T> parallel_map(std::size_t count, std::size_t workers, const std::function<T(std::size_t)>& job) {
  std::vector<std::optional<T>> slots(count);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < count;) {
      try {
        slots[i] = job(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers == 1) {
    run();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  std::vector<T> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

namespace detail {

inline void summarize(AuditReport& report) {
  for (const auto& e : report.entries) {
    ++report.checked;
    if (!e.error.empty()) {
      report.errors.push_back(e.index);
      continue;
    }
    if (e.violation) report.violations.push_back(e.index);
    if (e.ratio && (!report.max_ratio || *e.ratio > *report.max_ratio)) {
      report.max_ratio = e.ratio;
      report.max_ratio_index = e.index;
    }
    if (e.margin && (!report.min_margin || *e.margin < *report.min_margin)) report.min_margin = e.margin;
  }
}

}  // namespace detail

/// Checks several bounds against one suite; each instance is built once.
inline std::vector<AuditReport> verify_upper_bounds(const std::vector<BoundSpec>& bounds, const InstanceSource& suite,
                                                    std::size_t count, const std::string& suite_name,
                                                    std::size_t workers = 1, bool with_digest = true) {
  auto start = std::chrono::steady_clock::now();
  auto rows = parallel_map<std::vector<AuditEntry>>(count, workers, [&](std::size_t i) {
    std::vector<AuditEntry> row;
    std::optional<Instance> inst;
    std::string build_error;
    try {
      inst.emplace(suite(i));
    } catch (const Error& e) {
      build_error = e.what();
    }
    std::string digest = inst && with_digest ? instance_digest(*inst) : std::string();
    for (const auto& b : bounds) {
      if (!inst) {
        AuditEntry e;
        e.index = i;
        e.error = build_error;
        row.push_back(std::move(e));
        continue;
      }
      AuditEntry e = audit_instance(b, *inst, i, false);
      e.digest = digest;
      row.push_back(std::move(e));
    }
    return row;
  });
  std::vector<AuditReport> reports(bounds.size());
  for (std::size_t b = 0; b < bounds.size(); ++b) {
    reports[b].bound_name = bounds[b].name;
    reports[b].suite = suite_name;
    for (auto& row : rows) reports[b].entries.push_back(std::move(row[b]));
    detail::summarize(reports[b]);
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  for (auto& r : reports) r.runtime_seconds = secs;
  return reports;
}

inline AuditReport verify_upper_bound(const BoundSpec& bound, const InstanceSource& suite, std::size_t count,
                                      const std::string& suite_name, std::size_t workers = 1) {
  return std::move(verify_upper_bounds({bound}, suite, count, suite_name, workers).front());
}

inline AuditReport verify_upper_bound(const BoundSpec& bound, std::size_t count, std::uint64_t seed,
                                      std::size_t workers = 1, SuiteCaps caps = {}) {
  return verify_upper_bound(bound, random_suite(seed, caps), count, "random(seed=" + std::to_string(seed) + ")", workers);
}

struct LowerBoundResult {
  CostValue ratio;
  CostValue claimed;
  bool meets_claim = false;
  bool exact_equal = false;
};

namespace detail {

inline LowerBoundResult compare_claim(const std::optional<CostValue>& ratio, const CostValue& claimed) {
  LowerBoundResult r;
  r.claimed = claimed;
  if (!ratio) throw Error("lower-bound instance has zero optimal cost");
  r.ratio = *ratio;
  if (ratio->is_exact() && claimed.is_exact()) {
    r.meets_claim = ratio->rational() >= claimed.rational();
    r.exact_equal = ratio->rational() == claimed.rational();
  } else {
    r.meets_claim = ratio->to_double() >= claimed.to_double() - kEuclideanTolerance;
    r.exact_equal = std::abs(ratio->to_double() - claimed.to_double()) <= kEuclideanTolerance;
  }
  return r;
}

inline void check_class(const GeneratedInstance& gi, const MechanismSpec& spec, Objective o) {
  if (std::find(gi.objectives.begin(), gi.objectives.end(), o) == gi.objectives.end())
    throw MismatchedRuleClass(gi.family + " makes no claim under " + to_string(o));
  if (gi.in_rule && *gi.in_rule != spec.in_rule)
    throw MismatchedRuleClass(gi.family + " was built against in-group rule " + *gi.in_rule + ", not " + spec.in_rule);
  if (gi.second_stage_variants.empty() && spec.scope == OverScope::AllCandidates)
    throw MismatchedRuleClass(gi.family + " has no all-candidates second stage");
}

}  // namespace detail

/// Ratio the mechanism achieves on a constructed instance. With stored
/// second-stage variants the adversary picks the worse one.
inline LowerBoundResult evaluate_lower_bound(const GeneratedInstance& gi, const MechanismSpec& spec, Objective o) {
  detail::check_class(gi, spec, o);
  const auto& inst = gi.instance;
  if (gi.second_stage_variants.empty())
    return detail::compare_claim(evaluate_outcome(inst, run_mechanism(inst, spec), o, spec, false).ratio, gi.claimed_ratio);
  auto in_rule = lookup_rule(spec.in_rule);
  auto over_rule = lookup_rule(spec.over_rule);
  auto reps = run_first_stage(inst, in_rule).representatives();
  std::optional<CostValue> worst;
  for (const auto& variant : gi.second_stage_variants) {
    auto out = run_second_stage(inst, reps, over_rule, spec.scope, variant);
    auto r = evaluate_outcome(inst, out, o, spec, false).ratio;
    if (!r) return detail::compare_claim(r, gi.claimed_ratio);
    if (!worst || *r > *worst) worst = r;
  }
  return detail::compare_claim(worst, gi.claimed_ratio);
}

/// Max ratio over a family of instances (the adversary picks the member).
inline LowerBoundResult evaluate_lower_bound(const std::vector<GeneratedInstance>& family, const MechanismSpec& spec,
                                             Objective o) {
  if (family.empty()) throw InvalidParams("empty instance family");
  std::optional<LowerBoundResult> best;
  for (const auto& gi : family) {
    auto r = evaluate_lower_bound(gi, spec, o);
    if (!best || r.ratio > best->ratio) best = r;
  }
  return detail::compare_claim(best->ratio, family.front().claimed_ratio);
}

/// Every over-group rule that outputs a fixed ballot position (slot s,
/// position p) is beaten by one of the stored variants; returns the smallest
/// such worst-case ratio over all (s, p).
inline CostValue positional_witness_ratio(const GeneratedInstance& gi, Objective o) {
  if (gi.second_stage_variants.empty()) throw InvalidParams(gi.family + " has no second-stage variants");
  const auto& inst = gi.instance;
  auto opt = optimal_candidate(o, inst).second;
  std::optional<CostValue> best;
  const auto& first = gi.second_stage_variants.front();
  for (std::size_t s = 0; s < first.size(); ++s)
    for (std::size_t p = 0; p < first[s].size(); ++p) {
      std::optional<CostValue> worst;
      for (const auto& variant : gi.second_stage_variants) {
        auto r = cost_ratio(cost(o, inst, variant[s][p]), opt);
        if (!r) throw Error("zero optimal cost in witness instance");
        if (!worst || *r > *worst) worst = r;
      }
      if (!best || *worst < *best) best = worst;
    }
  return *best;
}

struct SearchResult {
  std::size_t iterations = 0;
  std::optional<CostValue> best_ratio;  // empty only if every instance was unbounded
  std::size_t best_index = 0;
  RandomParams best_params;
  std::string best_digest;
  Json witness;
  bool found_unbounded = false;
  std::vector<AuditEntry> entries;
};

/// Highest ratio over sampled instances; ties go to the lowest index.
inline SearchResult search_worst_case(const MechanismSpec& spec, Objective o, const SuiteCaps& caps,
                                      std::size_t iterations, std::uint64_t seed, std::size_t workers = 1) {
  if (iterations < 1) throw InvalidParams("search needs at least one iteration");
  BoundSpec probe{"search", spec, o, BoundExpression("1")};
  auto entries = parallel_map<AuditEntry>(iterations, workers, [&](std::size_t i) {
    return audit_instance(probe, gen_random(suite_params(seed, i, caps)), i, false);
  });
  SearchResult res;
  res.iterations = iterations;
  bool have = false;
  for (const auto& e : entries) {
    if (!e.error.empty()) throw Error("search instance " + std::to_string(e.index) + ": " + e.error);
    bool better;
    if (!e.ratio) {
      better = !res.found_unbounded;
      res.found_unbounded = true;
    } else {
      better = !res.found_unbounded && (!have || *e.ratio > *res.best_ratio);
    }
    if (better) {
      have = true;
      res.best_ratio = e.ratio;
      res.best_index = e.index;
    }
  }
  res.best_params = suite_params(seed, res.best_index, caps);
  Instance witness = gen_random(res.best_params);
  res.witness = instance_json(witness);
  res.best_digest = instance_digest(witness);
  res.entries = std::move(entries);
  return res;
}

/// Centralized sanity check for a deterministic rule: its winner's average
/// cost over all voters divided by the best average cost.
inline std::optional<CostValue> brute_force_centralized_distortion(const Instance& inst, const Rule& rule) {
  CandidateId w = rule.pick(Election::from_profile(inst.profile()));
  auto mean_cost = [&](CandidateId c) {
    CostValue s = CostValue::exact(0);
    for (std::size_t v = 0; v < inst.voter_count(); ++v) s += inst.distance(VoterId(v), c).value();
    return s / Rational(static_cast<long long>(inst.voter_count()));
  };
  CostValue best = mean_cost(CandidateId(0));
  for (std::size_t c = 1; c < inst.candidate_count(); ++c) {
    auto x = mean_cost(CandidateId(c));
    if (x < best) best = x;
  }
  return cost_ratio(mean_cost(w), best);
}

/// Over-group rule applied with representatives as voters ranking all
/// candidates (each at distance 0 from its own top): average distance from
/// the representatives to the winner over the best such average.
inline std::optional<CostValue> representative_rule_ratio(const Instance& inst, const std::vector<CandidateId>& reps,
                                                          const Rule& rule) {
  CandidateId w = rule.pick(second_stage_election(inst, reps, OverScope::AllCandidates));
  auto mean_cost = [&](CandidateId c) {
    CostValue s = CostValue::exact(0);
    for (auto r : reps) s += inst.distance(r, c).value();
    return s / Rational(static_cast<long long>(reps.size()));
  };
  CostValue best = mean_cost(CandidateId(0));
  for (std::size_t c = 1; c < inst.candidate_count(); ++c) {
    auto x = mean_cost(CandidateId(c));
    if (x < best) best = x;
  }
  return cost_ratio(mean_cost(w), best);
}

inline Json audit_entry_json(const AuditEntry& e) {
  Json j{{"index", e.index}, {"digest", e.digest}, {"bound", rational_json(e.bound)}, {"violation", e.violation}};
  j["ratio"] = e.ratio ? cost_json(*e.ratio) : Json(nullptr);
  j["margin"] = e.margin ? cost_json(*e.margin) : Json(nullptr);
  if (!e.error.empty()) j["error"] = e.error;
  return j;
}

/// Deterministic summary; runtime is left out so repeated runs compare equal.
inline Json audit_report_json(const AuditReport& r) {
  Json violations = Json::array();
  for (auto i : r.violations) violations.push_back(audit_entry_json(r.entries[i]));
  Json errors = Json::array();
  for (auto i : r.errors) errors.push_back(audit_entry_json(r.entries[i]));
  Json j{{"bound", r.bound_name},
         {"suite", r.suite},
         {"checked", r.checked},
         {"violations", violations},
         {"errors", errors},
         {"tolerance", r.tolerance},
         {"passed", r.passed()}};
  j["max_ratio"] = r.max_ratio ? cost_json(*r.max_ratio) : Json(nullptr);
  j["max_ratio_index"] = r.max_ratio_index;
  j["min_margin"] = r.min_margin ? cost_json(*r.min_margin) : Json(nullptr);
  return j;
}

inline std::string csv_cost(const std::optional<CostValue>& c) { return c ? c->str() : "unbounded"; }

/// One row per instance: index, digest, ratio, bound, margin, violation.
inline std::string audit_csv(const AuditReport& r) {
  std::string out = "index,digest,ratio,bound,margin,violation\n";
  for (const auto& e : r.entries) {
    out += std::to_string(e.index) + "," + e.digest + "," + (e.error.empty() ? csv_cost(e.ratio) : "error") + "," +
           format_rational(e.bound) + "," + (e.margin ? e.margin->str() : "") + "," + (e.violation ? "1" : "0") + "\n";
  }
  return out;
}

}  // namespace distortion_lab
