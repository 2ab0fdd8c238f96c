#pragma once

// The contracting height-morphism system of a unital space: the shift f, the
// surjections g_x onto the subtrees of x_0 and of the exceptional root
// successors, the level sets T_n, and the level norm lambda^n.

#include <algorithm>
#include <concepts>
#include <cstddef>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ultrafractal/errors.hpp"
#include "ultrafractal/height_tree.hpp"
#include "ultrafractal/morphism.hpp"
#include "ultrafractal/ordinal.hpp"
#include "ultrafractal/point_set.hpp"
#include "ultrafractal/rational.hpp"
#include "ultrafractal/report.hpp"

namespace ultrafractal {

struct Caps {
  std::size_t level_cap = 64;
  std::size_t net_cap = 1'000'000;
  std::size_t word_cap = 20;
};

inline void require_contraction_factor(const Rational& lambda) {
  if (lambda <= 0 || lambda >= 1) throw DomainError("lambda must lie in (0, 1), got " + to_string(lambda));
}

/// Anything the generic Hutchinson machinery can iterate.
template <class S>
concept FunctionSystem = requires(const S& s, std::size_t k, const Point& p) {
  { s.map_count() } -> std::convertible_to<std::size_t>;
  { s.apply_map(k, p) } -> std::convertible_to<Point>;
  { s.metric() } -> std::convertible_to<BranchMetric>;
  { s.seed() } -> std::convertible_to<PointSet>;
  { s.lambda() } -> std::convertible_to<Rational>;
  { s.caps() } -> std::convertible_to<Caps>;
};

class IfsSystem {
 public:
  /// Maps [f, g_{x_0}, g_x for x in E] on `tree`; only [f] at root height 0.
  static IfsSystem build_unital(const HeightTree& tree, const Rational& lambda, Caps caps = {}) {
    require_contraction_factor(lambda);
    RootSplit split(tree);
    std::vector<HeightMorphism> maps{HeightMorphism::shift(tree, "f")};
    if (!split.empty()) {
      const std::size_t x0 = split.first();
      maps.push_back(HeightMorphism::surjection(tree, NodePath{}, tree, NodePath{x0}, "g"));
      for (std::size_t e : split.exceptional()) {
        maps.push_back(HeightMorphism::surjection(tree, NodePath{}, tree, NodePath{e}, "g" + std::to_string(e)));
      }
    }
    return IfsSystem(tree, lambda, std::move(maps), std::move(split), caps);
  }

  static IfsSystem build_unital(const ExtHeight& root_height, const Rational& lambda, Caps caps = {}) {
    return build_unital(HeightTree::canonical(root_height), lambda, caps);
  }

  /// An arbitrary family of self-morphisms of `tree` rooted at the tree root.
  static IfsSystem from_maps(const HeightTree& tree, const Rational& lambda, std::vector<HeightMorphism> maps,
                             Caps caps = {}) {
    require_contraction_factor(lambda);
    for (const HeightMorphism& m : maps) {
      if (!m.source_root().is_root()) throw DomainError("map " + m.name() + " is not defined on the whole tree");
    }
    return IfsSystem(tree, lambda, std::move(maps), std::nullopt, caps);
  }

  const HeightTree& tree() const noexcept { return tree_; }
  const Rational& lambda() const noexcept { return lambda_; }
  const Caps& caps() const noexcept { return caps_; }
  const std::vector<HeightMorphism>& maps() const noexcept { return maps_; }
  std::size_t map_count() const noexcept { return maps_.size(); }
  const std::optional<RootSplit>& split() const noexcept { return split_; }

  const HeightMorphism& map(std::size_t k) const {
    if (k >= maps_.size()) throw DomainError("map index " + std::to_string(k) + " out of range");
    return maps_[k];
  }

  Point apply_map(std::size_t k, const Point& p) const {
    if (p.piece != 0) throw DomainError("point " + to_string(p) + " does not belong to this system");
    return Point{0, map(k).boundary_map(p.branch)};
  }

  PointSet seed() const { return PointSet{Point{0, Branch::central()}}; }

  /// T_0..T_n with T_0 = {root} and T_{k+1} the union of the node images of T_k.
  std::vector<std::vector<NodePath>> level_sets(std::size_t n) const {
    std::lock_guard lock(shared_->mutex);
    auto& levels = shared_->levels;
    if (levels.empty()) levels.push_back({NodePath{}});
    while (levels.size() <= n) {
      std::set<NodePath> next;
      for (const NodePath& x : levels.back()) {
        for (const HeightMorphism& m : maps_) next.insert(m.apply(x));
      }
      if (next.size() > caps_.net_cap) {
        throw CapExceeded("level set T_" + std::to_string(levels.size()) + " exceeds the net cap of " +
                          std::to_string(caps_.net_cap) + " nodes");
      }
      levels.emplace_back(next.begin(), next.end());
    }
    return {levels.begin(), levels.begin() + static_cast<std::ptrdiff_t>(n + 1)};
  }

  /// First n with p in T_n; nullopt for nodes of height -1. Walks preimages
  /// back to the root instead of growing the level sets.
  std::optional<std::size_t> node_level(const NodePath& p) const {
    if (tree_.height(p).is_minus_one()) return std::nullopt;
    {
      std::lock_guard lock(shared_->mutex);
      if (const auto it = shared_->level_of.find(p); it != shared_->level_of.end()) return it->second;
    }
    std::set<NodePath> frontier{p};
    for (std::size_t steps = 0; steps <= caps_.level_cap; ++steps) {
      if (frontier.count(NodePath{}) != 0) {
        std::lock_guard lock(shared_->mutex);
        shared_->level_of.emplace(p, steps);
        return steps;
      }
      std::set<NodePath> next;
      for (const NodePath& y : frontier) {
        for (const HeightMorphism& m : maps_) {
          const auto x = m.preimage(y);
          if (x && !(*x == y) && m.apply(*x) == y) next.insert(*x);
        }
      }
      if (next.empty()) throw LevelCapExceeded("node " + to_string(p) + " is not reached from the root by any map");
      if (next.size() > caps_.net_cap) throw CapExceeded("preimage frontier of " + to_string(p) + " exceeds the net cap");
      frontier = std::move(next);
    }
    throw LevelCapExceeded("node " + to_string(p) + " does not appear in T_0..T_" + std::to_string(caps_.level_cap));
  }

  Rational node_norm(const NodePath& p) const {
    const auto level = node_level(p);
    return level ? power(lambda_, *level) : Rational{0};
  }

  NormFn norm_fn() const {
    return [self = *this](const NodePath& p) { return self.node_norm(p); };
  }

  BranchMetric metric() const { return BranchMetric({norm_fn()}, 1 / lambda_); }

  /// The tree with the level norm; the support above eps is T_N minus the
  /// height -1 nodes, N the largest level with lambda^N >= eps.
  NormedHeightTree normed_tree() const {
    NormedHeightTree nt{tree_, {}, {}};
    nt.norm = norm_fn();
    nt.support = [self = *this](const Rational& eps) {
      if (eps <= 0) throw DomainError("epsilon must be positive");
      std::vector<NodePath> out;
      if (eps > 1) return out;
      std::size_t n = 0;
      while (power(self.lambda_, n + 1) >= eps) ++n;
      const auto levels = self.level_sets(n);
      for (const NodePath& x : levels.back()) {
        if (!self.tree_.height(x).is_minus_one()) out.push_back(x);
      }
      return out;
    };
    return nt;
  }

 private:
  struct Shared {
    std::mutex mutex;
    std::vector<std::vector<NodePath>> levels;
    std::unordered_map<NodePath, std::size_t, NodePathHash> level_of;
  };

  IfsSystem(HeightTree tree, Rational lambda, std::vector<HeightMorphism> maps, std::optional<RootSplit> split,
            Caps caps)
      : tree_(std::move(tree)),
        lambda_(std::move(lambda)),
        maps_(std::move(maps)),
        split_(std::move(split)),
        caps_(caps),
        shared_(std::make_shared<Shared>()) {}

  HeightTree tree_;
  Rational lambda_;
  std::vector<HeightMorphism> maps_;
  std::optional<RootSplit> split_;
  Caps caps_;
  std::shared_ptr<Shared> shared_;
};

inline IfsSystem build_ifs_unital(const ExtHeight& root_height, const Rational& lambda, Caps caps = {}) {
  return IfsSystem::build_unital(root_height, lambda, caps);
}

inline std::vector<std::vector<NodePath>> level_sets(const IfsSystem& s, std::size_t n) { return s.level_sets(n); }
inline Rational node_norm(const IfsSystem& s, const NodePath& p) { return s.node_norm(p); }

// ---------------------------------------------------------------------------
// Hutchinson iteration, generic over single and glued systems.

template <FunctionSystem S>
PointSet map_image(const S& s, std::size_t k, const PointSet& set) {
  std::vector<Point> out;
  out.reserve(set.size());
  for (const Point& p : set) out.push_back(s.apply_map(k, p));
  return PointSet(std::move(out));
}

template <FunctionSystem S>
PointSet hutchinson_step(const S& s, const PointSet& k) {
  if (k.empty()) throw DomainError("Hutchinson step needs a nonempty set");
  std::vector<Point> out;
  out.reserve(k.size() * s.map_count());
  for (std::size_t m = 0; m < s.map_count(); ++m) {
    for (const Point& p : k) out.push_back(s.apply_map(m, p));
  }
  return PointSet(std::move(out));
}

/// n Hutchinson steps from `start`.
template <FunctionSystem S>
PointSet iterate_hutchinson(const S& s, PointSet start, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    start = hutchinson_step(s, start);
    if (start.size() > s.caps().net_cap) {
      throw CapExceeded("iterate " + std::to_string(i + 1) + " exceeds the net cap of " +
                        std::to_string(s.caps().net_cap) + " points");
    }
  }
  return start;
}

/// F^n({seed}).
template <FunctionSystem S>
PointSet attractor_net(const S& s, std::size_t n) {
  return iterate_hutchinson(s, s.seed(), n);
}

/// d_H(F^k(seed), F^{k+1}(seed)) for k = 0..n-1.
template <FunctionSystem S>
std::vector<Rational> step_distances(const S& s, std::size_t n) {
  const BranchMetric d = s.metric();
  std::vector<Rational> out;
  PointSet cur = s.seed();
  for (std::size_t k = 0; k < n; ++k) {
    PointSet next = iterate_hutchinson(s, cur, 1);
    out.push_back(hausdorff_distance(d, cur, next));
    cur = std::move(next);
  }
  return out;
}

/// max over words w of length n of diam(phi_w(F^big_n(seed))).
template <FunctionSystem S>
Rational word_diameters(const S& s, std::size_t n, std::size_t big_n) {
  if (n > big_n) throw DomainError("word length must not exceed the net depth");
  if (n > s.caps().word_cap) {
    throw CapExceeded("word length " + std::to_string(n) + " exceeds the word cap of " +
                      std::to_string(s.caps().word_cap));
  }
  std::size_t words = 1;
  for (std::size_t i = 0; i < n; ++i) {
    words *= s.map_count();
    if (words > s.caps().net_cap) throw CapExceeded("too many words of length " + std::to_string(n));
  }
  const BranchMetric d = s.metric();
  const PointSet net = attractor_net(s, big_n);
  Rational best{0};
  std::function<void(const PointSet&, std::size_t)> descend = [&](const PointSet& cur, std::size_t depth) {
    if (depth == n) {
      best = std::max(best, diameter(d, cur));
      return;
    }
    for (std::size_t k = 0; k < s.map_count(); ++k) descend(map_image(s, k, cur), depth + 1);
  };
  descend(net, 0);
  return best;
}

/// The image blocks phi(F^{n-1}(seed)) are pairwise disjoint and cover F^n(seed).
template <FunctionSystem S>
Report verify_boundary_partition(const S& s, std::size_t n) {
  if (n < 1) throw DomainError("partition check needs n >= 1");
  Report r("boundary-partition", "image blocks of F^" + std::to_string(n - 1) + "(seed)");
  const PointSet base = attractor_net(s, n - 1);
  std::vector<PointSet> blocks;
  for (std::size_t k = 0; k < s.map_count(); ++k) blocks.push_back(map_image(s, k, base));
  std::vector<Point> all;
  for (std::size_t a = 0; a < blocks.size(); ++a) {
    all.insert(all.end(), blocks[a].begin(), blocks[a].end());
    for (std::size_t b = a + 1; b < blocks.size(); ++b) {
      ++r.checked;
      std::vector<Point> common;
      std::set_intersection(blocks[a].begin(), blocks[a].end(), blocks[b].begin(), blocks[b].end(),
                            std::back_inserter(common));
      if (!common.empty()) {
        r.fail("blocks " + std::to_string(a) + " and " + std::to_string(b) + " share " +
               std::to_string(common.size()) + " point(s), e.g. " + to_string(common.front()));
      }
    }
  }
  ++r.checked;
  const PointSet total(std::move(all));
  if (!(total == hutchinson_step(s, base))) r.fail("union of the blocks differs from the Hutchinson image");
  r.count = total.size();
  return r;
}

/// d(phi a, phi b) <= lambda d(a, b) for every map and every pair of `points`.
template <FunctionSystem S>
Report verify_boundary_lipschitz(const S& s, const PointSet& points) {
  Report r("boundary-lipschitz", std::to_string(points.size()) + " points, all pairs, every map");
  const BranchMetric d = s.metric();
  const Rational lambda = s.lambda();
  for (std::size_t k = 0; k < s.map_count(); ++k) {
    std::vector<Point> images;
    images.reserve(points.size());
    for (const Point& p : points) images.push_back(s.apply_map(k, p));
    for (std::size_t a = 0; a < points.size(); ++a) {
      for (std::size_t b = a + 1; b < points.size(); ++b) {
        ++r.checked;
        const Rational lhs = d(images[a], images[b]);
        const Rational rhs = lambda * d(points[a], points[b]);
        if (rhs < lhs) {
          r.fail("map " + std::to_string(k) + ": d = " + to_string(lhs) + " > " + to_string(rhs) + " for " +
                 to_string(points[a]) + ", " + to_string(points[b]));
        }
      }
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Single-system verifiers.

/// Node level: every node of T_n lies in the image of exactly one map.
/// Boundary level: see verify_boundary_partition.
inline Report verify_partition(const IfsSystem& s, std::size_t n) {
  if (n < 1) throw DomainError("partition check needs n >= 1");
  Report r("partition", "nodes of T_" + std::to_string(n) + " and image blocks of F^" + std::to_string(n - 1) +
                            "(central)");
  const auto levels = s.level_sets(n);
  for (const NodePath& y : levels.back()) {
    ++r.checked;
    std::size_t owners = 0;
    std::string names;
    for (const HeightMorphism& m : s.maps()) {
      const auto x = m.preimage(y);
      if (x && m.apply(*x) == y) {
        ++owners;
        names += (names.empty() ? "" : ", ") + m.name();
      }
    }
    if (owners != 1) {
      r.fail("node " + to_string(y) + " lies in " + std::to_string(owners) + " images" +
             (names.empty() ? std::string{} : " (" + names + ")"));
    }
  }
  r.absorb(verify_boundary_partition(s, n));
  r.count = levels.back().size();
  return r;
}

/// ||phi(x)|| <= lambda ||x|| on T_levels for every map (root excluded) and
/// d(phi a, phi b) <= lambda d(a, b) on F^net_depth(central).
inline Report verify_lipschitz(const IfsSystem& s, std::size_t levels, std::size_t net_depth) {
  Report r("lipschitz", "nodes of T_" + std::to_string(levels) + ", branch pairs of F^" +
                            std::to_string(net_depth) + "(central)");
  const std::vector<NodePath> nodes = s.level_sets(levels).back();
  const std::vector<Branch> branches = attractor_net(s, net_depth).branches();
  const NormFn norm = s.norm_fn();
  for (const HeightMorphism& m : s.maps()) r.absorb(lipschitz_check(m, norm, norm, s.lambda(), nodes, branches));
  return r;
}

/// Every node of T_levels with height >= 0 has a finite level, and levels
/// agree with first appearance in the level sets.
inline Report verify_level_norm(const IfsSystem& s, std::size_t levels) {
  Report r("level-norm", "nodes of T_0..T_" + std::to_string(levels));
  const auto sets = s.level_sets(levels);
  std::set<NodePath> seen;
  for (std::size_t n = 0; n < sets.size(); ++n) {
    for (const NodePath& x : sets[n]) {
      if (!seen.insert(x).second) continue;
      ++r.checked;
      try {
        const auto level = s.node_level(x);
        const bool central = s.tree().height(x).is_minus_one();
        if (central && level) r.fail("height -1 node " + to_string(x) + " has a level");
        if (!central && (!level || *level != n)) {
          r.fail("node " + to_string(x) + " first appears in T_" + std::to_string(n) + " but has level " +
                 (level ? std::to_string(*level) : std::string("none")));
        }
      } catch (const Error& e) {
        r.fail(std::string("level lookup failed: ") + e.what());
      }
    }
  }
  r.count = seen.size();
  return r;
}

struct FixedPoint {
  Branch branch;
  /// True when the branch is the fixed point itself rather than an approximation.
  bool exact = false;
  /// Upper bound on the distance from `branch` to the fixed point.
  Rational error_bound{0};
};

/// Fixed branch of map k: the nodes phi^n(root) form a chain; stop when it
/// becomes stationary, reaches a height -1 node, or its norm drops below tol.
inline FixedPoint fixed_point(const IfsSystem& s, std::size_t k, const Rational& tol) {
  if (tol <= 0) throw DomainError("tolerance must be positive");
  const HeightMorphism& m = s.map(k);
  NodePath x;
  for (std::size_t step = 0; step <= s.caps().level_cap; ++step) {
    NodePath y = m.apply(x);
    if (y == x) return {Branch(x), true, Rational{0}};
    if (!x.is_prefix_of(y)) throw DomainError("iterates of map " + m.name() + " at the root are not nested");
    const Rational n = s.node_norm(y);
    if (n == 0) return {Branch(y), true, Rational{0}};
    if (n < tol) return {Branch(y), false, n};
    x = std::move(y);
  }
  throw LevelCapExceeded("fixed point of map " + m.name() + " not resolved within the level cap");
}

}  // namespace ultrafractal
