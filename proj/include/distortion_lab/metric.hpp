#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "distortion_lab/cost_value.hpp"
#include "distortion_lab/errors.hpp"
#include "distortion_lab/model.hpp"
#include "distortion_lab/rational.hpp"

namespace distortion_lab {

enum class MetricKind { Matrix, Line, Graph, Euclidean };

inline std::string to_string(MetricKind k) {
  switch (k) {
    case MetricKind::Matrix: return "matrix";
    case MetricKind::Line: return "line";
    case MetricKind::Graph: return "graph";
    case MetricKind::Euclidean: return "euclidean";
  }
  return "?";
}

/// Distance between two points, carried as an exact ordinal key: the distance
/// itself on rational metrics, its square on Euclidean ones. Ordering by key is
/// exact in both cases; `value()` yields the cost (a square root for Euclidean).
/// Squared keys keep an integer numerator over a denominator shared by the
/// whole metric, so building and comparing them needs no gcd.
class Distance {
 public:
  Distance() = default;
  static Distance exact(Rational d) {
    Distance out;
    out.approx_ = to_double(d);
    out.key_ = std::move(d);
    return out;
  }
  static Distance squared(Rational d2) {
    return squared(BigInt(boost::multiprecision::numerator(d2)),
                   std::make_shared<const BigInt>(boost::multiprecision::denominator(d2)));
  }
  static Distance squared(BigInt num, std::shared_ptr<const BigInt> den) {
    Distance out;
    out.squared_ = true;
    out.approx_ = num.convert_to<double>() / den->convert_to<double>();
    out.num_ = std::move(num);
    out.den_ = std::move(den);
    return out;
  }

  Rational key() const { return squared_ ? Rational(num_, *den_) : key_; }
  bool is_squared() const { return squared_; }
  double approx_key() const { return approx_; }

  CostValue value() const {
    if (!squared_) return CostValue::exact(key_);
    return CostValue::real(std::sqrt(approx_));
  }

  /// Exact comparison with a floating-point fast path: conversion error is
  /// below 2^-52 relative, so a wider gap decides the order on its own.
  friend std::strong_ordering operator<=>(const Distance& a, const Distance& b) {
    const double gap = a.approx_ - b.approx_;
    const double scale = std::max(std::abs(a.approx_), std::abs(b.approx_));
    if (std::abs(gap) > 1e-12 * scale) return gap < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
    auto order = [](const auto& x, const auto& y) {
      if (x < y) return std::strong_ordering::less;
      if (y < x) return std::strong_ordering::greater;
      return std::strong_ordering::equal;
    };
    if (a.squared_ && b.squared_ && (a.den_ == b.den_ || *a.den_ == *b.den_)) return order(a.num_, b.num_);
    if (!a.squared_ && !b.squared_) return order(a.key_, b.key_);
    return order(a.key(), b.key());
  }
  friend bool operator==(const Distance& a, const Distance& b) { return (a <=> b) == 0; }

 private:
  Rational key_ = 0;
  BigInt num_ = 0;
  std::shared_ptr<const BigInt> den_;
  bool squared_ = false;
  double approx_ = 0.0;
};

struct MetricViolation {
  enum class Kind { NegativeDistance, NonZeroSelfDistance, AsymmetryViolation, TriangleViolation };
  Kind kind;
  PointId x;
  PointId y;
  PointId z;  // TriangleViolation only: d(x,y) > d(x,z) + d(z,y)

  std::string describe() const {
    auto p = [](PointId q) { return "p" + std::to_string(q.value); };
    switch (kind) {
      case Kind::NegativeDistance: return "NegativeDistance(" + p(x) + "," + p(y) + ")";
      case Kind::NonZeroSelfDistance: return "NonZeroSelfDistance(" + p(x) + ")";
      case Kind::AsymmetryViolation: return "AsymmetryViolation(" + p(x) + "," + p(y) + ")";
      case Kind::TriangleViolation: return "TriangleViolation(" + p(x) + "," + p(y) + "," + p(z) + ")";
    }
    return "?";
  }
};

struct WeightedEdge {
  std::size_t u = 0;
  std::size_t v = 0;
  Rational weight = 1;
};

struct Graph {
  std::size_t vertex_count = 0;
  std::vector<WeightedEdge> edges;

  /// Unweighted graph; every edge has length 1.
  static Graph unit(std::size_t vertices, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
    Graph g{vertices, {}};
    for (auto [u, v] : edges) g.edges.push_back({u, v, Rational(1)});
    return g;
  }
};

using DistanceMatrix = std::vector<std::vector<Rational>>;

/// All-pairs shortest paths (Floyd-Warshall) over non-negative rational weights.
inline DistanceMatrix shortest_path_closure(const Graph& g) {
  const std::size_t V = g.vertex_count;
  if (V == 0) throw InvalidParams("graph has no vertices");
  std::vector<std::vector<std::optional<Rational>>> d(V, std::vector<std::optional<Rational>>(V));
  for (std::size_t i = 0; i < V; ++i) d[i][i] = Rational(0);
  for (const auto& e : g.edges) {
    if (e.u >= V || e.v >= V) throw InvalidParams("edge endpoint out of range");
    if (e.weight < 0) throw InvalidParams("negative edge weight");
    if (!d[e.u][e.v] || e.weight < *d[e.u][e.v]) {
      d[e.u][e.v] = e.weight;
      d[e.v][e.u] = e.weight;
    }
  }
  for (std::size_t via = 0; via < V; ++via)
    for (std::size_t i = 0; i < V; ++i) {
      if (!d[i][via]) continue;
      for (std::size_t j = 0; j < V; ++j) {
        if (!d[via][j]) continue;
        Rational through = *d[i][via] + *d[via][j];
        if (!d[i][j] || through < *d[i][j]) d[i][j] = std::move(through);
      }
    }
  DistanceMatrix out(V, std::vector<Rational>(V));
  for (std::size_t i = 0; i < V; ++i)
    for (std::size_t j = 0; j < V; ++j) {
      if (!d[i][j]) throw DisconnectedGraph("graph is disconnected: no path between u" + std::to_string(i + 1) +
                                            " and u" + std::to_string(j + 1));
      out[i][j] = *d[i][j];
    }
  return out;
}

namespace detail {

/// Rational point stored as a fill value plus sparse exceptions, so simplex-like
/// constructions in high dimension cost O(non-fill entries) per distance.
struct SparsePoint {
  Rational fill = 0;
  std::vector<std::pair<std::size_t, Rational>> entries;  // sorted by coordinate, none equal to fill

  static SparsePoint from_dense(const std::vector<Rational>& coords) {
    SparsePoint p;
    if (coords.empty()) return p;
    std::map<Rational, std::size_t> counts;
    for (const auto& x : coords) ++counts[x];
    auto best = std::max_element(counts.begin(), counts.end(),
                                 [](const auto& a, const auto& b) { return a.second < b.second; });
    p.fill = best->first;
    for (std::size_t i = 0; i < coords.size(); ++i)
      if (coords[i] != p.fill) p.entries.emplace_back(i, coords[i]);
    return p;
  }

  Rational at(std::size_t i) const {
    auto it = std::lower_bound(entries.begin(), entries.end(), i,
                               [](const auto& e, std::size_t k) { return e.first < k; });
    return (it != entries.end() && it->first == i) ? it->second : fill;
  }
};

/// Same point with every coordinate multiplied by the metric's common
/// denominator, so distance sums run in integer arithmetic.
struct ScaledPoint {
  BigInt fill = 0;
  std::vector<std::pair<std::size_t, BigInt>> entries;
};

inline ScaledPoint scale_point(const SparsePoint& p, const BigInt& scale) {
  auto to_int = [&](const Rational& x) {
    Rational y = x * scale;
    return BigInt(boost::multiprecision::numerator(y));
  };
  ScaledPoint out;
  out.fill = to_int(p.fill);
  for (const auto& [i, x] : p.entries) out.entries.emplace_back(i, to_int(x));
  return out;
}

inline BigInt squared_distance(const ScaledPoint& a, const ScaledPoint& b, std::size_t dim) {
  BigInt sum = 0;
  BigInt diff;
  std::size_t touched = 0;
  auto ia = a.entries.begin();
  auto ib = b.entries.begin();
  while (ia != a.entries.end() || ib != b.entries.end()) {
    if (ib == b.entries.end() || (ia != a.entries.end() && ia->first < ib->first)) {
      diff = ia->second - b.fill;
      ++ia;
    } else if (ia == a.entries.end() || ib->first < ia->first) {
      diff = a.fill - ib->second;
      ++ib;
    } else {
      diff = ia->second - ib->second;
      ++ia;
      ++ib;
    }
    sum += diff * diff;
    ++touched;
  }
  if (touched < dim && a.fill != b.fill) {
    diff = a.fill - b.fill;
    sum += diff * diff * (dim - touched);
  }
  return sum;
}

struct MatrixRep {
  DistanceMatrix d;
};
struct LineRep {
  std::vector<Rational> positions;
};
struct GraphRep {
  Graph graph;
  DistanceMatrix closure;
};
struct EuclideanRep {
  std::size_t dimension = 0;
  std::vector<SparsePoint> points;
  BigInt scale = 1;
  std::shared_ptr<const BigInt> scale_sq = std::make_shared<const BigInt>(1);
  std::vector<ScaledPoint> scaled;

  void finalize() {
    scale = 1;
    auto absorb = [&](const Rational& x) {
      scale = boost::multiprecision::lcm(scale, BigInt(boost::multiprecision::denominator(x)));
    };
    for (const auto& p : points) {
      absorb(p.fill);
      for (const auto& e : p.entries) absorb(e.second);
    }
    scale_sq = std::make_shared<const BigInt>(scale * scale);
    scaled.clear();
    for (const auto& p : points) scaled.push_back(scale_point(p, scale));
  }
};

}  // namespace detail

/// A finite metric space over points 0..P-1. Line, graph and Euclidean
/// variants satisfy the metric axioms by construction; explicit matrices are
/// checked by validate_metric.
class Metric {
 public:
  static Metric matrix(DistanceMatrix d) {
    for (const auto& row : d)
      if (row.size() != d.size()) throw InvalidParams("distance matrix is not square");
    return Metric(detail::MatrixRep{std::move(d)});
  }
  static Metric line(std::vector<Rational> positions) { return Metric(detail::LineRep{std::move(positions)}); }
  static Metric graph(Graph g) {
    auto closure = shortest_path_closure(g);
    return Metric(detail::GraphRep{std::move(g), std::move(closure)});
  }
  static Metric euclidean(const std::vector<std::vector<Rational>>& points) {
    detail::EuclideanRep rep;
    rep.dimension = points.empty() ? 0 : points.front().size();
    for (const auto& p : points) {
      if (p.size() != rep.dimension) throw InvalidParams("Euclidean points differ in dimension");
      rep.points.push_back(detail::SparsePoint::from_dense(p));
    }
    if (!points.empty() && rep.dimension == 0) throw InvalidParams("Euclidean dimension must be >= 1");
    rep.finalize();
    return Metric(std::move(rep));
  }
  /// Builds a Euclidean metric from points given as (fill, sparse entries).
  static Metric euclidean_sparse(std::size_t dimension,
                                 std::vector<std::pair<Rational, std::vector<std::pair<std::size_t, Rational>>>> pts) {
    if (dimension == 0) throw InvalidParams("Euclidean dimension must be >= 1");
    detail::EuclideanRep rep;
    rep.dimension = dimension;
    for (auto& [fill, entries] : pts) {
      detail::SparsePoint p;
      p.fill = fill;
      std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
      for (auto& e : entries) {
        if (e.first >= dimension) throw InvalidParams("coordinate index out of range");
        if (e.second != fill) p.entries.push_back(e);
      }
      rep.points.push_back(std::move(p));
    }
    rep.finalize();
    return Metric(std::move(rep));
  }

  MetricKind kind() const {
    return std::visit(
        [](const auto& r) {
          using T = std::decay_t<decltype(r)>;
          if constexpr (std::is_same_v<T, detail::MatrixRep>) return MetricKind::Matrix;
          else if constexpr (std::is_same_v<T, detail::LineRep>) return MetricKind::Line;
          else if constexpr (std::is_same_v<T, detail::GraphRep>) return MetricKind::Graph;
          else return MetricKind::Euclidean;
        },
        rep_);
  }

  std::size_t point_count() const {
    return std::visit(
        [](const auto& r) -> std::size_t {
          using T = std::decay_t<decltype(r)>;
          if constexpr (std::is_same_v<T, detail::MatrixRep>) return r.d.size();
          else if constexpr (std::is_same_v<T, detail::LineRep>) return r.positions.size();
          else if constexpr (std::is_same_v<T, detail::GraphRep>) return r.graph.vertex_count;
          else return r.points.size();
        },
        rep_);
  }

  bool is_exact() const { return kind() != MetricKind::Euclidean; }

  Distance distance(PointId a, PointId b) const {
    const std::size_t P = point_count();
    if (a.value >= P || b.value >= P)
      throw UnknownPoint("unknown point p" + std::to_string(std::max(a.value, b.value)));
    return std::visit(
        [&](const auto& r) {
          using T = std::decay_t<decltype(r)>;
          if constexpr (std::is_same_v<T, detail::MatrixRep>) return Distance::exact(r.d[a.value][b.value]);
          else if constexpr (std::is_same_v<T, detail::LineRep>)
            return Distance::exact(abs(Rational(r.positions[a.value] - r.positions[b.value])));
          else if constexpr (std::is_same_v<T, detail::GraphRep>) return Distance::exact(r.closure[a.value][b.value]);
          else
            return Distance::squared(detail::squared_distance(r.scaled[a.value], r.scaled[b.value], r.dimension),
                                     r.scale_sq);
        },
        rep_);
  }

  // Raw views for serialization and validation.
  const DistanceMatrix* matrix_entries() const {
    auto* r = std::get_if<detail::MatrixRep>(&rep_);
    return r ? &r->d : nullptr;
  }
  const std::vector<Rational>* line_positions() const {
    auto* r = std::get_if<detail::LineRep>(&rep_);
    return r ? &r->positions : nullptr;
  }
  const Graph* graph_structure() const {
    auto* r = std::get_if<detail::GraphRep>(&rep_);
    return r ? &r->graph : nullptr;
  }
  const DistanceMatrix* graph_closure() const {
    auto* r = std::get_if<detail::GraphRep>(&rep_);
    return r ? &r->closure : nullptr;
  }
  std::size_t euclidean_dimension() const {
    auto* r = std::get_if<detail::EuclideanRep>(&rep_);
    return r ? r->dimension : 0;
  }
  /// Fill value and non-fill coordinates of one Euclidean point.
  std::pair<Rational, std::vector<std::pair<std::size_t, Rational>>> euclidean_sparse_point(PointId p) const {
    auto* r = std::get_if<detail::EuclideanRep>(&rep_);
    if (!r) throw Error("metric is not Euclidean");
    const auto& sp = r->points.at(p.value);
    return {sp.fill, sp.entries};
  }

  /// Dense coordinates of one Euclidean point.
  std::vector<Rational> euclidean_point(PointId p) const {
    auto* r = std::get_if<detail::EuclideanRep>(&rep_);
    if (!r) throw Error("metric is not Euclidean");
    std::vector<Rational> out(r->dimension, r->points.at(p.value).fill);
    for (const auto& [i, x] : r->points[p.value].entries) out[i] = x;
    return out;
  }

 private:
  using Rep = std::variant<detail::MatrixRep, detail::LineRep, detail::GraphRep, detail::EuclideanRep>;
  explicit Metric(Rep r) : rep_(std::move(r)) {}
  Rep rep_;
};

/// Checks the metric axioms on a distance matrix; first violation found wins.
inline std::optional<MetricViolation> validate_distance_matrix(const DistanceMatrix& d) {
  using K = MetricViolation::Kind;
  const std::size_t P = d.size();
  for (std::size_t x = 0; x < P; ++x)
    for (std::size_t y = 0; y < P; ++y)
      if (d[x][y] < 0) return MetricViolation{K::NegativeDistance, PointId(x), PointId(y), PointId(0)};
  for (std::size_t x = 0; x < P; ++x)
    if (d[x][x] != 0) return MetricViolation{K::NonZeroSelfDistance, PointId(x), PointId(x), PointId(0)};
  for (std::size_t x = 0; x < P; ++x)
    for (std::size_t y = x + 1; y < P; ++y)
      if (d[x][y] != d[y][x]) return MetricViolation{K::AsymmetryViolation, PointId(x), PointId(y), PointId(0)};
  for (std::size_t x = 0; x < P; ++x)
    for (std::size_t y = 0; y < P; ++y)
      for (std::size_t z = 0; z < P; ++z)
        if (d[x][y] > d[x][z] + d[z][y]) return MetricViolation{K::TriangleViolation, PointId(x), PointId(y), PointId(z)};
  return std::nullopt;
}

/// Empty result means the metric satisfies non-negativity, identity, symmetry
/// and the triangle inequality. Line and Euclidean metrics hold by
/// construction; graph closures are re-checked.
inline std::optional<MetricViolation> validate_metric(const Metric& metric) {
  if (auto* m = metric.matrix_entries()) return validate_distance_matrix(*m);
  if (auto* c = metric.graph_closure()) return validate_distance_matrix(*c);
  return std::nullopt;
}

}  // namespace distortion_lab
