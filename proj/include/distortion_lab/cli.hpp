#pragma once

// Command-line front end. Kept out of the umbrella header because it pulls in
// CLI11; tools/main.cpp is a thin wrapper around run_cli.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "distortion_lab/distortion_lab.hpp"

namespace distortion_lab::cli {

enum ExitCode : int { kPass = 0, kViolation = 1, kUsage = 2 };

namespace detail {

inline void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") out << text;
  else write_text_file(path, text);
}

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

/// "natural", "reverse", "random" (needs a seed) or a comma list of
/// candidates, each either a label (c1, c2, ...) or a 0-based index.
inline Ranking parse_sigma(const std::string& text, std::size_t m, const std::optional<std::uint64_t>& seed) {
  if (text == "natural") return natural_order(m);
  if (text == "reverse") {
    Ranking r = natural_order(m);
    std::reverse(r.begin(), r.end());
    return r;
  }
  if (text == "random") {
    if (!seed) throw InvalidParams("--sigma random requires --seed");
    return random_order(m, *seed);
  }
  Ranking r;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) throw InvalidParams("empty entry in --sigma list");
    std::size_t used = 0;
    std::size_t value = 0;
    bool is_label = item[0] == 'c';
    try {
      value = std::stoul(is_label ? item.substr(1) : item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() - (is_label ? 1 : 0) || (is_label && value == 0))
      throw InvalidParams("bad --sigma entry '" + item + "'");
    r.emplace_back(is_label ? value - 1 : value);
  }
  if (!is_permutation_of(r, m))
    throw InvalidParams("--sigma must order exactly " + std::to_string(m) + " candidates");
  return r;
}

/// path "a/inst.json" + tag "claims" -> "a/inst.claims.json".
inline std::string sibling(const std::string& path, const std::string& tag) {
  std::filesystem::path p(path);
  std::filesystem::path stem = p.parent_path() / p.stem();
  return stem.string() + "." + tag + ".json";
}

struct GenOptions {
  std::string family;
  std::size_t k = 2;
  std::size_t m = 3;
  std::size_t n = 4;
  std::size_t t = 1;
  std::size_t dimension = 2;
  std::string in_rule;
  std::string sigma = "natural";
  std::string sampler = "line";
  std::optional<std::uint64_t> seed;
  std::string out;
};

inline std::vector<std::string> family_names() {
  return {"randdet-xmax",   "randdet-maxavg", "randdet-avgavg", "randrand-maxx",   "cyclic-avgmax",
          "randrand-avgavg", "detdet-maxavg", "euclid-randrand", "euclid-randdet", "random"};
}

inline Rule need_rule(const GenOptions& o, const std::string& fallback) {
  return lookup_rule(o.in_rule.empty() ? fallback : o.in_rule);
}

inline int cmd_gen(const GenOptions& o, std::ostream& out) {
  if (o.family == "random") {
    if (!o.seed) throw InvalidParams("family random requires --seed");
    RandomParams p{o.n, o.m, o.k, parse_sampler(o.sampler), o.dimension, *o.seed};
    Instance inst = gen_random(p);
    Json claims{{"family", "random"},
                {"params", {{"n", p.n}, {"m", p.m}, {"k", p.k}, {"sampler", to_string(p.kind)},
                            {"dimension", p.dimension}, {"seed", p.seed}}},
                {"digest", instance_digest(inst)}};
    if (o.out.empty()) {
      emit(dump(Json{{"instance", instance_json(inst)}, {"claims", claims}}), "", out);
    } else {
      write_text_file(o.out, dump(instance_json(inst)));
      write_text_file(sibling(o.out, "claims"), dump(claims));
    }
    return kPass;
  }
  std::vector<GeneratedInstance> made;
  if (o.family == "randdet-xmax") {
    made.push_back(o.in_rule.empty() ? gen_randdet_xmax() : gen_randdet_xmax(lookup_rule(o.in_rule)));
  } else if (o.family == "randdet-maxavg") {
    made.push_back(gen_randdet_maxavg(need_rule(o, "fpm"), parse_sigma(o.sigma, 4, o.seed)));
  } else if (o.family == "randdet-avgavg") {
    made.push_back(gen_randdet_avgavg(o.k, need_rule(o, "fpm"), parse_sigma(o.sigma, 2 * o.k, o.seed)));
  } else if (o.family == "randrand-maxx") {
    made.push_back(gen_randrand_maxX());
  } else if (o.family == "cyclic-avgmax") {
    made = gen_cyclic_avgmax(o.m);
  } else if (o.family == "randrand-avgavg") {
    made.push_back(gen_randrand_avgavg(o.k, parse_sigma(o.sigma, o.k + 1, o.seed)));
  } else if (o.family == "detdet-maxavg") {
    made.push_back(gen_detdet_maxavg(need_rule(o, "fpm"), parse_sigma(o.sigma, 4, o.seed)));
  } else if (o.family == "euclid-randrand") {
    made.push_back(gen_euclidean_randrand(o.t));
  } else if (o.family == "euclid-randdet") {
    made.push_back(gen_euclidean_randdet(o.m, need_rule(o, "fpm"), parse_sigma(o.sigma, 2 * o.m, o.seed)));
  } else {
    std::string known;
    for (const auto& f : family_names()) known += (known.empty() ? "" : ", ") + f;
    throw InvalidParams("unknown family '" + o.family + "' (known: " + known + ")");
  }
  if (o.out.empty()) {
    if (made.size() == 1) {
      emit(dump(Json{{"instance", instance_json(made[0].instance)}, {"claims", claims_json(made[0])}}), "", out);
    } else {
      Json all = Json::array();
      for (const auto& gi : made) all.push_back(Json{{"instance", instance_json(gi.instance)}, {"claims", claims_json(gi)}});
      emit(dump(all), "", out);
    }
    return kPass;
  }
  if (made.size() == 1) {
    write_text_file(o.out, dump(instance_json(made[0].instance)));
    write_text_file(sibling(o.out, "claims"), dump(claims_json(made[0])));
    return kPass;
  }
  Json claims = Json::array();
  for (std::size_t i = 0; i < made.size(); ++i) {
    write_text_file(sibling(o.out, std::to_string(i + 1)), dump(instance_json(made[i].instance)));
    claims.push_back(claims_json(made[i]));
  }
  write_text_file(sibling(o.out, "claims"), dump(claims));
  return kPass;
}

/// Candidate x objective cost table; `with_float` adds a decimal column after each objective.
inline std::string cost_table_csv(const Instance& inst, bool with_float) {
  std::ostringstream os;
  os.precision(17);
  os << "candidate";
  for (auto o : all_objectives) {
    os << "," << to_string(o);
    if (with_float) os << "," << to_string(o) << "_float";
  }
  os << "\n";
  std::vector<std::vector<CostValue>> costs;
  for (auto o : all_objectives) costs.push_back(all_costs(o, inst));
  for (std::size_t c = 0; c < inst.candidate_count(); ++c) {
    os << label(CandidateId(c));
    for (const auto& column : costs) {
      os << "," << column[c].str();
      if (with_float) os << "," << column[c].to_double();
    }
    os << "\n";
  }
  return os.str();
}

struct MechanismOptions {
  std::string in_rule = "fpm";
  std::string over_rule = "fur";
  std::string scope = "reps";
  std::string objective = "avgavg";

  MechanismSpec spec() const {
    lookup_rule(in_rule);
    lookup_rule(over_rule);
    return MechanismSpec{in_rule, over_rule, parse_scope(scope)};
  }
};

inline void add_mechanism_flags(CLI::App* app, MechanismOptions& m) {
  app->add_option("--in", m.in_rule, "in-group rule")->capture_default_str();
  app->add_option("--over", m.over_rule, "over-group rule")->capture_default_str();
  app->add_option("--scope", m.scope, "second-stage pool: reps or all")->capture_default_str();
  app->add_option("--objective", m.objective, "avgavg, avgmax, maxavg or maxmax")->capture_default_str();
}

inline void add_caps_flags(CLI::App* app, SuiteCaps& caps, std::string& sampler) {
  app->add_option("--max-n", caps.max_n, "largest voter count")->capture_default_str();
  app->add_option("--max-m", caps.max_m, "largest candidate count")->capture_default_str();
  app->add_option("--max-k", caps.max_k, "largest group count")->capture_default_str();
  app->add_option("--max-dimension", caps.max_dimension, "largest Euclidean dimension")->capture_default_str();
  app->add_option("--sampler", sampler, "line, graph, euclidean, or mixed")->capture_default_str();
}

inline void apply_sampler(SuiteCaps& caps, const std::string& sampler) {
  if (caps.max_n < 1 || caps.max_m < 1 || caps.max_k < 1 || caps.max_dimension < 1)
    throw InvalidParams("suite caps must be at least 1");
  if (sampler != "mixed") caps.only = parse_sampler(sampler);
}

/// Prefixes every data row of an audit CSV with the bound name.
inline std::string tagged_csv(const std::vector<AuditReport>& reports) {
  std::string out = "bound,index,digest,ratio,bound_value,margin,violation\n";
  for (const auto& r : reports) {
    std::istringstream lines(audit_csv(r));
    std::string line;
    std::getline(lines, line);  // header
    while (std::getline(lines, line)) out += r.bound_name + "," + line + "\n";
  }
  return out;
}

}  // namespace detail

/// Parses `args` (args[0] is the program name) and runs one subcommand.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-stage voting mechanisms under metric costs: generate, evaluate, verify.", "distortion-lab"};
  app.require_subcommand(1);

  detail::GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen", "write a constructed or random instance plus a claims sidecar");
  gen_cmd->add_option("--family", gen.family, "instance family")->required();
  gen_cmd->add_option("--k", gen.k, "group count parameter")->capture_default_str();
  gen_cmd->add_option("--m", gen.m, "candidate parameter")->capture_default_str();
  gen_cmd->add_option("--n", gen.n, "voter count (random family)")->capture_default_str();
  gen_cmd->add_option("--t", gen.t, "simplex parameter (euclid-randrand)")->capture_default_str();
  gen_cmd->add_option("--dimension", gen.dimension, "Euclidean dimension (random family)")->capture_default_str();
  gen_cmd->add_option("--sampler", gen.sampler, "line, graph or euclidean (random family)")->capture_default_str();
  gen_cmd->add_option("--in", gen.in_rule, "in-group rule the construction targets");
  gen_cmd->add_option("--sigma", gen.sigma, "natural, reverse, random, or a comma list")->capture_default_str();
  gen_cmd->add_option("--seed", gen.seed, "seed for random generation");
  gen_cmd->add_option("--out", gen.out, "instance path; the sidecar goes next to it");

  std::string eval_instance, eval_out;
  bool eval_float = false;
  auto* eval_cmd = app.add_subcommand("eval", "cost of every candidate under every objective, as CSV");
  eval_cmd->add_option("--instance", eval_instance, "instance JSON")->required();
  eval_cmd->add_flag("--float", eval_float, "add a decimal column per objective");
  eval_cmd->add_option("--out", eval_out, "CSV path (default stdout)");

  std::string run_instance, run_out;
  detail::MechanismOptions run_mech;
  auto* run_cmd = app.add_subcommand("run", "run a mechanism on an instance and report its distortion");
  run_cmd->add_option("--instance", run_instance, "instance JSON")->required();
  detail::add_mechanism_flags(run_cmd, run_mech);
  run_cmd->add_option("--out", run_out, "report path (default stdout)");

  std::string t_rule = "fpm", t_sigma = "natural", t_out, t_dot;
  std::size_t t_m = 3;
  std::optional<std::uint64_t> t_seed;
  auto* t_cmd = app.add_subcommand("tournament", "bias tournament of a deterministic rule");
  t_cmd->add_option("--rule", t_rule, "deterministic rule")->capture_default_str();
  t_cmd->add_option("--m", t_m, "candidate count")->capture_default_str();
  t_cmd->add_option("--sigma", t_sigma, "natural, reverse, random, or a comma list")->capture_default_str();
  t_cmd->add_option("--seed", t_seed, "seed for --sigma random");
  t_cmd->add_option("--out", t_out, "JSON path (default stdout)");
  t_cmd->add_option("--dot", t_dot, "also write the tournament in DOT format");

  std::vector<std::string> v_bounds;
  std::vector<std::string> v_instances;
  std::string v_suite = "random", v_csv, v_out, v_sampler = "mixed";
  std::size_t v_count = 1000;
  std::uint64_t v_seed = 1;
  std::size_t v_workers = default_workers();
  SuiteCaps v_caps;
  auto* v_cmd = app.add_subcommand("verify", "check upper bounds over a suite of instances");
  v_cmd->add_option("--bound", v_bounds, "bound name, repeatable; 'all' for every built-in bound")->required();
  v_cmd->add_option("--suite", v_suite, "random or files")->capture_default_str();
  v_cmd->add_option("--instances", v_instances, "instance files for --suite files");
  v_cmd->add_option("--count", v_count, "random suite size")->capture_default_str();
  v_cmd->add_option("--seed", v_seed, "random suite seed")->capture_default_str();
  v_cmd->add_option("--workers", v_workers, "worker threads (env DISTORTION_LAB_WORKERS)");
  v_cmd->add_option("--csv", v_csv, "per-instance CSV path");
  v_cmd->add_option("--out", v_out, "JSON summary path (default stdout)");
  detail::add_caps_flags(v_cmd, v_caps, v_sampler);

  detail::MechanismOptions s_mech;
  std::size_t s_iterations = 1000;
  std::uint64_t s_seed = 1;
  std::size_t s_workers = default_workers();
  std::string s_csv, s_out, s_witness, s_sampler = "mixed";
  SuiteCaps s_caps;
  auto* s_cmd = app.add_subcommand("search", "random search for the worst instance of a mechanism");
  detail::add_mechanism_flags(s_cmd, s_mech);
  s_cmd->add_option("--iterations", s_iterations, "instances to sample")->capture_default_str();
  s_cmd->add_option("--seed", s_seed, "search seed")->capture_default_str();
  s_cmd->add_option("--workers", s_workers, "worker threads (env DISTORTION_LAB_WORKERS)");
  s_cmd->add_option("--csv", s_csv, "per-instance CSV path");
  s_cmd->add_option("--witness", s_witness, "write the worst instance here");
  s_cmd->add_option("--out", s_out, "JSON summary path (default stdout)");
  detail::add_caps_flags(s_cmd, s_caps, s_sampler);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kPass : kUsage;
  }

  try {
    if (*gen_cmd) return detail::cmd_gen(gen, out);

    if (*eval_cmd) {
      detail::emit(detail::cost_table_csv(load_instance(eval_instance), eval_float), eval_out, out);
      return kPass;
    }

    if (*run_cmd) {
      Instance inst = load_instance(run_instance);
      auto report = distortion(inst, run_mech.spec(), parse_objective(run_mech.objective));
      detail::emit(detail::dump(report_json(report)), run_out, out);
      return kPass;
    }

    if (*t_cmd) {
      auto t = build_bias_tournament(lookup_rule(t_rule), detail::parse_sigma(t_sigma, t_m, t_seed));
      detail::emit(detail::dump(tournament_json(t, t_rule)), t_out, out);
      if (!t_dot.empty()) detail::emit(tournament_dot(t), t_dot, out);
      return kPass;
    }

    if (*v_cmd) {
      std::vector<BoundSpec> bounds;
      for (const auto& name : v_bounds) {
        if (name == "all") bounds.insert(bounds.end(), builtin_bounds().begin(), builtin_bounds().end());
        else bounds.push_back(find_bound(name));
      }
      detail::apply_sampler(v_caps, v_sampler);
      InstanceSource suite;
      std::size_t count = v_count;
      std::string suite_name;
      if (v_suite == "random") {
        suite = random_suite(v_seed, v_caps);
        suite_name = "random(seed=" + std::to_string(v_seed) + ")";
      } else if (v_suite == "files") {
        if (v_instances.empty()) throw InvalidParams("--suite files needs --instances");
        std::vector<Instance> loaded;
        for (const auto& path : v_instances) loaded.push_back(load_instance(path));
        count = loaded.size();
        suite = [loaded](std::size_t i) { return loaded.at(i); };
        suite_name = "files";
      } else {
        throw InvalidParams("unknown suite '" + v_suite + "' (expected random or files)");
      }
      auto reports = verify_upper_bounds(bounds, suite, count, suite_name, std::max<std::size_t>(1, v_workers));
      Json summary = Json::array();
      bool passed = true;
      for (const auto& r : reports) {
        summary.push_back(audit_report_json(r));
        passed = passed && r.passed();
      }
      if (!v_csv.empty()) detail::emit(detail::tagged_csv(reports), v_csv, out);
      detail::emit(detail::dump(Json{{"passed", passed}, {"reports", summary}}), v_out, out);
      return passed ? kPass : kViolation;
    }

    if (*s_cmd) {
      detail::apply_sampler(s_caps, s_sampler);
      const auto spec = s_mech.spec();
      const auto objective = parse_objective(s_mech.objective);
      auto res = search_worst_case(spec, objective, s_caps, s_iterations, s_seed, std::max<std::size_t>(1, s_workers));
      const auto& p = res.best_params;
      Json j{{"mechanism", {{"in", spec.in_rule}, {"over", spec.over_rule}, {"scope", to_string(spec.scope)}}},
             {"objective", to_string(objective)},
             {"iterations", res.iterations},
             {"seed", s_seed},
             {"found_unbounded", res.found_unbounded},
             {"best_index", res.best_index},
             {"best_digest", res.best_digest},
             {"best_params",
              {{"n", p.n}, {"m", p.m}, {"k", p.k}, {"sampler", to_string(p.kind)}, {"dimension", p.dimension}, {"seed", p.seed}}}};
      j["best_ratio"] = res.best_ratio ? cost_json(*res.best_ratio) : Json(nullptr);
      if (res.best_ratio) j["best_ratio_float"] = res.best_ratio->to_double();
      if (!s_csv.empty()) {
        std::string csv = "index,ratio\n";
        for (const auto& e : res.entries) csv += std::to_string(e.index) + "," + csv_cost(e.ratio) + "\n";
        detail::emit(csv, s_csv, out);
      }
      if (!s_witness.empty()) detail::emit(detail::dump(res.witness), s_witness, out);
      detail::emit(detail::dump(j), s_out, out);
      return kPass;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  return run_cli(std::vector<std::string>(argv, argv + argc), out, err);
}

}  // namespace distortion_lab::cli
