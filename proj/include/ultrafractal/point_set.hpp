#pragma once

// Finite sets of eventually-central branches, possibly spread over several
// glued pieces, and the exact ultrametric geometry on them.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <initializer_list>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ultrafractal/errors.hpp"
#include "ultrafractal/height_tree.hpp"
#include "ultrafractal/rational.hpp"
#include "ultrafractal/report.hpp"

namespace ultrafractal {

struct Point {
  std::size_t piece = 0;
  Branch branch;

  friend auto operator<=>(const Point&, const Point&) = default;
};

inline std::string to_string(const Point& p) {
  return p.piece == 0 ? to_string(p.branch) : "piece" + std::to_string(p.piece) + ":" + to_string(p.branch);
}

/// Sorted, deduplicated finite point set.
class PointSet {
 public:
  using const_iterator = std::vector<Point>::const_iterator;

  PointSet() = default;
  PointSet(std::initializer_list<Point> points) : points_(points) { normalize(); }
  explicit PointSet(std::vector<Point> points) : points_(std::move(points)) { normalize(); }

  static PointSet of_branches(const std::vector<Branch>& branches, std::size_t piece = 0) {
    std::vector<Point> pts;
    pts.reserve(branches.size());
    for (const Branch& b : branches) pts.push_back(Point{piece, b});
    return PointSet(std::move(pts));
  }

  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }
  const_iterator begin() const noexcept { return points_.begin(); }
  const_iterator end() const noexcept { return points_.end(); }
  const std::vector<Point>& points() const noexcept { return points_; }
  const Point& operator[](std::size_t i) const { return points_[i]; }

  bool contains(const Point& p) const { return std::binary_search(points_.begin(), points_.end(), p); }

  bool includes(const PointSet& other) const {
    return std::includes(points_.begin(), points_.end(), other.points_.begin(), other.points_.end());
  }

  std::vector<Branch> branches() const {
    std::vector<Branch> out;
    out.reserve(points_.size());
    for (const Point& p : points_) out.push_back(p.branch);
    return out;
  }

  friend bool operator==(const PointSet&, const PointSet&) = default;

 private:
  void normalize() {
    std::sort(points_.begin(), points_.end());
    points_.erase(std::unique(points_.begin(), points_.end()), points_.end());
  }

  std::vector<Point> points_;
};

inline PointSet set_union(const PointSet& a, const PointSet& b) {
  std::vector<Point> pts = a.points();
  pts.insert(pts.end(), b.begin(), b.end());
  return PointSet(std::move(pts));
}

/// Canonical ultrametric inside each piece; a fixed distance across pieces.
class BranchMetric {
 public:
  BranchMetric(std::vector<NormFn> piece_norms, Rational cross_distance)
      : norms_(std::move(piece_norms)), cross_(std::move(cross_distance)) {}

  std::size_t pieces() const noexcept { return norms_.size(); }
  const Rational& cross_distance() const noexcept { return cross_; }
  const NormFn& norm_fn(std::size_t piece) const {
    require_piece(piece);
    return norms_[piece];
  }

  Rational norm(std::size_t piece, const NodePath& p) const { return norm_fn(piece)(p); }

  Rational distance(const Point& a, const Point& b) const {
    require_piece(a.piece);
    require_piece(b.piece);
    if (a.piece != b.piece) return cross_;
    return canonical_ultrametric(norms_[a.piece], a.branch, b.branch);
  }

  Rational operator()(const Point& a, const Point& b) const { return distance(a, b); }

  void require_piece(std::size_t piece) const {
    if (piece >= norms_.size()) {
      throw DomainError("point lives in piece " + std::to_string(piece) + " but the metric has " +
                        std::to_string(norms_.size()) + " piece(s)");
    }
  }

 private:
  std::vector<NormFn> norms_;
  Rational cross_;
};

namespace detail {

/// Prefix trie of a finite branch set. children(q) lists the child indices
/// through which members leave the node q (0 for members continuing
/// centrally).
class BranchTrie {
 public:
  explicit BranchTrie(const std::vector<Branch>& branches) {
    for (const Branch& b : branches) {
      const NodePath& s = b.stem();
      members_.insert(s);
      for (std::size_t k = 0; k < s.size(); ++k) children_[s.prefix(k)].insert(s[k]);
      children_[s].insert(0);
    }
  }

  std::size_t size() const noexcept { return members_.size(); }

  /// min over members b of d(a, b).
  Rational nearest(const NormFn& norm, const Branch& a) const {
    if (members_.count(a.stem()) != 0) return Rational{0};
    NodePath q;
    for (std::size_t k = 0;; ++k) {
      const std::set<std::size_t>& used = children_at(q);
      const std::size_t ca = a.index_at(k);
      if (used.count(ca) != 0) {
        q = q.child(ca);
        continue;
      }
      Rational best = -1;
      for (std::size_t c : used) {
        Rational n = norm(q.child(c));
        if (best < 0 || n < best) best = std::move(n);
      }
      const Rational own = norm(q.child(ca));
      return own < best ? best : own;
    }
  }

  Rational diameter(const NormFn& norm) const {
    if (members_.size() < 2) return Rational{0};
    NodePath q;
    for (;;) {
      const std::set<std::size_t>& used = children_at(q);
      if (used.size() == 1) {
        q = q.child(*used.begin());
        continue;
      }
      Rational best{0};
      for (std::size_t c : used) best = std::max(best, norm(q.child(c)));
      return best;
    }
  }

 private:
  const std::set<std::size_t>& children_at(const NodePath& q) const {
    static const std::set<std::size_t> kCentralOnly{0};
    const auto it = children_.find(q);
    return it == children_.end() ? kCentralOnly : it->second;
  }

  std::set<NodePath> members_;
  std::map<NodePath, std::set<std::size_t>> children_;
};

inline std::map<std::size_t, std::vector<Branch>> by_piece(const BranchMetric& d, const PointSet& s) {
  std::map<std::size_t, std::vector<Branch>> out;
  for (const Point& p : s) {
    d.require_piece(p.piece);
    out[p.piece].push_back(p.branch);
  }
  return out;
}

inline Rational directed_hausdorff(const BranchMetric& d, const PointSet& from, const PointSet& to) {
  const auto target = by_piece(d, to);
  std::map<std::size_t, BranchTrie> tries;
  for (const auto& [piece, bs] : target) tries.emplace(piece, BranchTrie(bs));
  Rational worst{0};
  for (const Point& a : from) {
    d.require_piece(a.piece);
    const auto it = tries.find(a.piece);
    Rational best;
    if (it == tries.end()) {
      best = d.cross_distance();
    } else {
      best = it->second.nearest(d.norm_fn(a.piece), a.branch);
      if (tries.size() > 1 && d.cross_distance() < best) best = d.cross_distance();
    }
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace detail

/// Exact Hausdorff distance between nonempty finite point sets.
inline Rational hausdorff_distance(const BranchMetric& d, const PointSet& a, const PointSet& b) {
  if (a.empty() || b.empty()) throw DomainError("Hausdorff distance needs nonempty sets");
  return std::max(detail::directed_hausdorff(d, a, b), detail::directed_hausdorff(d, b, a));
}

inline Rational diameter(const BranchMetric& d, const PointSet& s) {
  const auto groups = detail::by_piece(d, s);
  if (groups.size() > 1) {
    Rational best = d.cross_distance();
    for (const auto& [piece, bs] : groups) best = std::max(best, detail::BranchTrie(bs).diameter(d.norm_fn(piece)));
    return best;
  }
  if (groups.empty()) return Rational{0};
  return detail::BranchTrie(groups.begin()->second).diameter(d.norm_fn(groups.begin()->first));
}

/// Symmetry, identity of indiscernibles and the strong triangle inequality
/// over every triple of `s`, exactly. `d` is any callable (Point, Point) -> Rational.
template <class Metric>
Report verify_ultrametric(const Metric& d, const PointSet& s) {
  Report r("ultrametric", std::to_string(s.size()) + " points, all triples");
  r.count = s.size();
  const std::size_t n = s.size();
  std::vector<Rational> values;
  std::vector<std::vector<Rational>> dist(n, std::vector<Rational>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      dist[i][j] = d(s[i], s[j]);
      values.push_back(dist[i][j]);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (dist[i][i] != 0) r.fail("d(x, x) != 0 for " + to_string(s[i]));
    for (std::size_t j = i + 1; j < n; ++j) {
      ++r.checked;
      if (dist[i][j] != dist[j][i]) r.fail("asymmetric pair " + to_string(s[i]) + ", " + to_string(s[j]));
      if (dist[i][j] <= 0) r.fail("distinct points at distance <= 0: " + to_string(s[i]) + ", " + to_string(s[j]));
    }
  }
  // Rank-encode the distances: the strong triangle inequality only compares them.
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  std::vector<std::vector<std::size_t>> rank(n, std::vector<std::size_t>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      rank[i][j] = static_cast<std::size_t>(std::lower_bound(values.begin(), values.end(), dist[i][j]) - values.begin());
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = i + 1; k < n; ++k) {
      for (std::size_t j = 0; j < n; ++j) {
        ++r.checked;
        if (rank[i][k] > std::max(rank[i][j], rank[j][k])) {
          r.fail("d(x,z) > max(d(x,y), d(y,z)) for x=" + to_string(s[i]) + ", y=" + to_string(s[j]) +
                 ", z=" + to_string(s[k]));
        }
      }
    }
  }
  return r;
}

}  // namespace ultrafractal
