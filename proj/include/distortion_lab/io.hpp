#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "distortion_lab/errors.hpp"
#include "distortion_lab/instance.hpp"
#include "distortion_lab/rational.hpp"

namespace distortion_lab {

using Json = nlohmann::json;

inline Json rational_json(const Rational& q) { return format_rational(q); }

namespace detail {

struct JsonPath {
  std::string where;
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(where + ": " + what); }

  JsonPath operator/(const std::string& key) const { return {where + "." + key}; }
  JsonPath operator[](std::size_t i) const { return {where + "[" + std::to_string(i) + "]"}; }
};

inline const Json& field(const Json& j, const std::string& key, const JsonPath& at) {
  if (!j.is_object()) at.fail("expected an object");
  auto it = j.find(key);
  if (it == j.end()) at.fail("missing field '" + key + "'");
  return *it;
}

inline std::size_t as_index(const Json& j, const JsonPath& at) {
  if (!j.is_number_integer() || j.get<long long>() < 0) at.fail("expected a non-negative integer");
  return j.get<std::size_t>();
}

inline Rational as_rational(const Json& j, const JsonPath& at) {
  if (j.is_number_integer()) return Rational(j.get<long long>());
  if (!j.is_string()) at.fail("expected a rational string such as \"3/2\"");
  try {
    return parse_rational(j.get<std::string>());
  } catch (const ParseError& e) {
    at.fail(e.what());
  }
}

inline const Json& as_array(const Json& j, const JsonPath& at) {
  if (!j.is_array()) at.fail("expected an array");
  return j;
}

inline std::vector<std::size_t> index_list(const Json& j, const JsonPath& at) {
  std::vector<std::size_t> out;
  const auto& a = as_array(j, at);
  for (std::size_t i = 0; i < a.size(); ++i) out.push_back(as_index(a[i], at[i]));
  return out;
}

inline Json euclidean_json(const Metric& metric) {
  const std::size_t P = metric.point_count();
  const std::size_t D = metric.euclidean_dimension();
  std::size_t sparse_size = 0;
  for (std::size_t p = 0; p < P; ++p) sparse_size += 1 + metric.euclidean_sparse_point(PointId(p)).second.size();
  Json pts = Json::array();
  if (P * D <= 4 * sparse_size) {
    for (std::size_t p = 0; p < P; ++p) {
      Json row = Json::array();
      for (const auto& x : metric.euclidean_point(PointId(p))) row.push_back(rational_json(x));
      pts.push_back(row);
    }
    return Json{{"kind", "euclidean"}, {"points", pts}};
  }
  for (std::size_t p = 0; p < P; ++p) {
    auto [fill, entries] = metric.euclidean_sparse_point(PointId(p));
    Json es = Json::array();
    for (const auto& [i, x] : entries) es.push_back(Json::array({i, rational_json(x)}));
    pts.push_back(Json{{"fill", rational_json(fill)}, {"entries", es}});
  }
  return Json{{"kind", "euclidean"}, {"dimension", D}, {"points", pts}};
}

inline Json rational_matrix_json(const DistanceMatrix& d) {
  Json rows = Json::array();
  for (const auto& row : d) {
    Json r = Json::array();
    for (const auto& x : row) r.push_back(rational_json(x));
    rows.push_back(r);
  }
  return rows;
}

}  // namespace detail

inline Json metric_json(const Metric& metric) {
  if (auto* d = metric.matrix_entries()) return Json{{"kind", "matrix"}, {"distances", detail::rational_matrix_json(*d)}};
  if (auto* pos = metric.line_positions()) {
    Json p = Json::array();
    for (const auto& x : *pos) p.push_back(rational_json(x));
    return Json{{"kind", "line"}, {"positions", p}};
  }
  if (auto* g = metric.graph_structure()) {
    Json edges = Json::array();
    for (const auto& e : g->edges) edges.push_back(Json::array({e.u, e.v, rational_json(e.weight)}));
    return Json{{"kind", "graph"}, {"vertices", g->vertex_count}, {"edges", edges}};
  }
  return detail::euclidean_json(metric);
}

inline Json instance_json(const Instance& inst) {
  Json groups = Json::array();
  for (const auto& g : inst.partition().groups()) {
    Json members = Json::array();
    for (auto v : g) members.push_back(v.value);
    groups.push_back(members);
  }
  Json profile = Json::array();
  for (const auto& r : inst.profile().rankings()) {
    Json row = Json::array();
    for (auto c : r) row.push_back(c.value);
    profile.push_back(row);
  }
  Json metric = metric_json(inst.metric());
  Json voters = Json::array();
  Json cands = Json::array();
  for (auto p : inst.placement().voters) voters.push_back(p.value);
  for (auto p : inst.placement().candidates) cands.push_back(p.value);
  metric["placement"] = Json{{"voters", voters}, {"candidates", cands}};
  return Json{{"n", inst.voter_count()},
              {"m", inst.candidate_count()},
              {"groups", groups},
              {"profile", profile},
              {"metric", metric}};
}

inline Metric metric_from_json(const Json& j, const detail::JsonPath& at) {
  using namespace detail;
  const auto& kind_j = field(j, "kind", at);
  if (!kind_j.is_string()) (at / "kind").fail("expected a string");
  const std::string kind = kind_j.get<std::string>();
  if (kind == "matrix") {
    const auto& rows = as_array(field(j, "distances", at), at / "distances");
    DistanceMatrix d;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& row = as_array(rows[i], (at / "distances")[i]);
      d.emplace_back();
      for (std::size_t k = 0; k < row.size(); ++k) d.back().push_back(as_rational(row[k], (at / "distances")[i][k]));
    }
    try {
      return Metric::matrix(std::move(d));
    } catch (const InvalidParams& e) {
      (at / "distances").fail(e.what());
    }
  }
  if (kind == "line") {
    const auto& ps = as_array(field(j, "positions", at), at / "positions");
    std::vector<Rational> pos;
    for (std::size_t i = 0; i < ps.size(); ++i) pos.push_back(as_rational(ps[i], (at / "positions")[i]));
    return Metric::line(std::move(pos));
  }
  if (kind == "graph") {
    Graph g;
    g.vertex_count = as_index(field(j, "vertices", at), at / "vertices");
    const auto& es = as_array(field(j, "edges", at), at / "edges");
    for (std::size_t i = 0; i < es.size(); ++i) {
      auto ep = (at / "edges")[i];
      const auto& e = as_array(es[i], ep);
      if (e.size() != 2 && e.size() != 3) ep.fail("edge must be [u, v] or [u, v, weight]");
      g.edges.push_back({as_index(e[0], ep[0]), as_index(e[1], ep[1]), e.size() == 3 ? as_rational(e[2], ep[2]) : Rational(1)});
    }
    try {
      return Metric::graph(std::move(g));
    } catch (const InvalidParams& e) {
      at.fail(e.what());
    }
  }
  if (kind == "euclidean") {
    const auto& ps = as_array(field(j, "points", at), at / "points");
    try {
      if (j.contains("dimension")) {
        std::size_t D = as_index(j["dimension"], at / "dimension");
        std::vector<std::pair<Rational, std::vector<std::pair<std::size_t, Rational>>>> pts;
        for (std::size_t i = 0; i < ps.size(); ++i) {
          auto pp = (at / "points")[i];
          Rational fill = as_rational(field(ps[i], "fill", pp), pp / "fill");
          std::vector<std::pair<std::size_t, Rational>> entries;
          const auto& es = as_array(field(ps[i], "entries", pp), pp / "entries");
          for (std::size_t k = 0; k < es.size(); ++k) {
            auto ep = (pp / "entries")[k];
            const auto& e = as_array(es[k], ep);
            if (e.size() != 2) ep.fail("entry must be [coordinate, value]");
            entries.emplace_back(as_index(e[0], ep[0]), as_rational(e[1], ep[1]));
          }
          pts.emplace_back(std::move(fill), std::move(entries));
        }
        return Metric::euclidean_sparse(D, std::move(pts));
      }
      std::vector<std::vector<Rational>> pts;
      for (std::size_t i = 0; i < ps.size(); ++i) {
        const auto& row = as_array(ps[i], (at / "points")[i]);
        pts.emplace_back();
        for (std::size_t k = 0; k < row.size(); ++k) pts.back().push_back(as_rational(row[k], (at / "points")[i][k]));
      }
      return Metric::euclidean(pts);
    } catch (const InvalidParams& e) {
      (at / "points").fail(e.what());
    }
  }
  (at / "kind").fail("unknown metric kind '" + kind + "' (expected matrix, line, graph or euclidean)");
}

/// Parses the instance schema. Structural errors raise ParseError naming the
/// offending JSON path; semantic errors keep their own type.
inline Instance instance_from_json(const Json& j) {
  using namespace detail;
  JsonPath root{"$"};
  const std::size_t n = as_index(field(j, "n", root), root / "n");
  const std::size_t m = as_index(field(j, "m", root), root / "m");

  const auto& gs = as_array(field(j, "groups", root), root / "groups");
  std::vector<std::vector<VoterId>> groups;
  for (std::size_t g = 0; g < gs.size(); ++g) {
    groups.emplace_back();
    for (auto v : index_list(gs[g], (root / "groups")[g])) groups.back().emplace_back(v);
  }

  const auto& metric_j = field(j, "metric", root);
  Metric metric = metric_from_json(metric_j, root / "metric");
  auto pat = root / "metric" / "placement";
  const auto& pl = field(metric_j, "placement", root / "metric");
  Placement placement = make_placement(index_list(field(pl, "voters", pat), pat / "voters"),
                                       index_list(field(pl, "candidates", pat), pat / "candidates"));
  if (placement.voters.size() != n) (pat / "voters").fail("expected " + std::to_string(n) + " voters");
  if (placement.candidates.size() != m) (pat / "candidates").fail("expected " + std::to_string(m) + " candidates");

  GroupPartition partition(std::move(groups), n);
  if (!j.contains("profile") || j["profile"].is_null())
    return Instance::derived(std::move(partition), std::move(metric), std::move(placement));
  const auto& ps = as_array(j["profile"], root / "profile");
  std::vector<Ranking> rankings;
  for (std::size_t v = 0; v < ps.size(); ++v) {
    rankings.emplace_back();
    for (auto c : index_list(ps[v], (root / "profile")[v])) rankings.back().emplace_back(c);
  }
  return Instance(std::move(partition), PreferenceProfile(std::move(rankings), m), std::move(metric),
                  std::move(placement));
}

inline Json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    // Translate the byte offset into a line number.
    std::size_t line = 1;
    for (std::size_t i = 0; i < std::min<std::size_t>(e.byte, text.size()); ++i)
      if (text[i] == '\n') ++line;
    throw ParseError(source + ":" + std::to_string(line) + ": " + e.what());
  }
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
  if (!out) throw Error("write to '" + path + "' failed");
}

inline Instance load_instance(const std::string& path) {
  return instance_from_json(parse_json_text(read_text_file(path), path));
}

inline std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

/// Stable 64-bit fingerprint of the canonical instance JSON.
inline std::string instance_digest(const Instance& inst) { return fnv1a_hex(instance_json(inst).dump()); }

}  // namespace distortion_lab
