#pragma once

// Lazy height trees. Nodes are addressed by paths of child indices from the
// root; child 0 of every node is its central point. Trees never
// materialize: heights are recomputed from the child rule on demand.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <deque>
#include <functional>
#include <initializer_list>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ultrafractal/errors.hpp"
#include "ultrafractal/ordinal.hpp"
#include "ultrafractal/rational.hpp"
#include "ultrafractal/report.hpp"

namespace ultrafractal {

class NodePath {
 public:
  NodePath() = default;
  NodePath(std::initializer_list<std::size_t> indices) : indices_(indices) {}
  explicit NodePath(std::vector<std::size_t> indices) : indices_(std::move(indices)) {}

  std::size_t size() const noexcept { return indices_.size(); }
  bool is_root() const noexcept { return indices_.empty(); }
  std::size_t operator[](std::size_t k) const { return indices_[k]; }
  std::size_t back() const { return indices_.back(); }
  std::span<const std::size_t> indices() const noexcept { return indices_; }

  NodePath child(std::size_t i) const {
    NodePath p = *this;
    p.indices_.push_back(i);
    return p;
  }

  NodePath parent() const {
    if (is_root()) throw DomainError("the root has no parent");
    return prefix(size() - 1);
  }

  NodePath prefix(std::size_t length) const {
    return NodePath(std::vector<std::size_t>(indices_.begin(),
                                             indices_.begin() + static_cast<std::ptrdiff_t>(length)));
  }

  /// Path below this node, with `root` stripped; throws unless root <= *this.
  NodePath relative_to(const NodePath& root) const {
    if (!root.is_prefix_of(*this)) throw DomainError("path is not below the given root");
    return NodePath(std::vector<std::size_t>(indices_.begin() + static_cast<std::ptrdiff_t>(root.size()),
                                             indices_.end()));
  }

  NodePath concat(const NodePath& tail) const {
    NodePath p = *this;
    p.indices_.insert(p.indices_.end(), tail.indices_.begin(), tail.indices_.end());
    return p;
  }

  bool is_prefix_of(const NodePath& other) const {
    return size() <= other.size() && std::equal(indices_.begin(), indices_.end(), other.indices_.begin());
  }

  friend auto operator<=>(const NodePath&, const NodePath&) = default;

 private:
  std::vector<std::size_t> indices_;
};

inline std::string to_string(const NodePath& p) {
  std::string s = "[";
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (k != 0) s += ',';
    s += std::to_string(p[k]);
  }
  return s + ']';
}

struct NodePathHash {
  std::size_t operator()(const NodePath& p) const noexcept {
    std::size_t h = 0xcbf29ce484222325ULL;
    for (std::size_t i : p.indices()) {
      h ^= i + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h ^ p.size();
  }
};

/// An eventually-central branch: the stem followed by child 0 forever.
/// Stems are stored with trailing zeros stripped, so equality is branch equality.
class Branch {
 public:
  Branch() = default;
  explicit Branch(NodePath stem) {
    std::vector<std::size_t> v(stem.indices().begin(), stem.indices().end());
    while (!v.empty() && v.back() == 0) v.pop_back();
    stem_ = NodePath(std::move(v));
  }

  static Branch central() { return Branch{}; }

  const NodePath& stem() const noexcept { return stem_; }

  /// Child index taken at depth k (zero past the stem).
  std::size_t index_at(std::size_t k) const { return k < stem_.size() ? stem_[k] : 0; }

  /// The node of this branch at depth `length`.
  NodePath node(std::size_t length) const {
    std::vector<std::size_t> v;
    v.reserve(length);
    for (std::size_t k = 0; k < length; ++k) v.push_back(index_at(k));
    return NodePath(std::move(v));
  }

  bool passes_through(const NodePath& p) const {
    for (std::size_t k = 0; k < p.size(); ++k) {
      if (index_at(k) != p[k]) return false;
    }
    return true;
  }

  friend auto operator<=>(const Branch&, const Branch&) = default;

 private:
  NodePath stem_;
};

inline std::string to_string(const Branch& b) { return "branch" + to_string(b.stem()); }

/// Longest common node of two distinct branches.
inline NodePath meet(const Branch& a, const Branch& b) {
  if (a == b) throw DomainError("meet is undefined for equal branches");
  const std::size_t n = std::max(a.stem().size(), b.stem().size());
  std::size_t k = 0;
  while (k < n && a.index_at(k) == b.index_at(k)) ++k;
  return a.node(k);
}

// ---------------------------------------------------------------------------

/// Explicit heights for the first children of one node; later children
/// follow the canonical rule with their index shifted past the prefix.
struct NodeOverride {
  std::optional<ExtHeight> central;
  std::vector<ExtHeight> prefix;
};

/// A rule-generated height tree. The canonical rule gives, at a node of height h:
///   h in {-1, 0}: one child of height -1;
///   h = a + 1:    child 0 -> -1, children n >= 1 -> a;
///   h limit:      child 0 -> -1, child n >= 1 -> h[n];
///   h = inf:      child 0 -> -1, children n >= 1 -> inf.
class HeightTree {
 public:
  using Overrides = std::map<NodePath, NodeOverride>;

  static HeightTree canonical(ExtHeight root_height) { return HeightTree(std::move(root_height), {}); }

  static HeightTree custom(ExtHeight root_height, Overrides overrides) {
    return HeightTree(std::move(root_height), std::move(overrides));
  }

  const ExtHeight& root_height() const noexcept { return root_height_; }
  bool is_canonical() const noexcept { return overrides_->empty(); }
  const Overrides& overrides() const noexcept { return *overrides_; }

  /// Height of child i of the node `parent` (whose height is `parent_height`),
  /// or nullopt when that child does not exist.
  std::optional<ExtHeight> child_height(const NodePath& parent, const ExtHeight& parent_height,
                                        std::size_t i) const {
    if (const auto it = overrides_->find(parent); it != overrides_->end()) {
      const NodeOverride& o = it->second;
      if (i == 0) return o.central ? *o.central : ExtHeight::minus_one();
      if (i <= o.prefix.size()) return o.prefix[i - 1];
      return canonical_child(parent_height, i - o.prefix.size());
    }
    return canonical_child(parent_height, i);
  }

  /// First child index from which child heights are non-decreasing.
  std::size_t monotone_from(const NodePath& parent) const {
    const auto it = overrides_->find(parent);
    return it == overrides_->end() ? 1 : it->second.prefix.size() + 1;
  }

  /// Height of the node at `p`; throws DomainError if `p` is not addressable.
  ExtHeight height(const NodePath& p) const {
    ExtHeight h = root_height_;
    NodePath walk;
    for (std::size_t i : p.indices()) {
      auto next = child_height(walk, h, i);
      if (!next) {
        throw DomainError("node " + to_string(p) + " is not addressable: child " + std::to_string(i) +
                          " of a node of height " + to_string(h));
      }
      h = std::move(*next);
      walk = walk.child(i);
    }
    return h;
  }

  bool addressable(const NodePath& p) const {
    try {
      (void)height(p);
      return true;
    } catch (const DomainError&) {
      return false;
    }
  }

 private:
  HeightTree(ExtHeight root_height, Overrides overrides)
      : root_height_(std::move(root_height)),
        overrides_(std::make_shared<const Overrides>(std::move(overrides))) {
    if (root_height_.is_minus_one()) throw DomainError("a height tree root cannot have height -1");
  }

  static std::optional<ExtHeight> canonical_child(const ExtHeight& h, std::size_t i) {
    if (i == 0) return ExtHeight::minus_one();
    switch (classify_kind(h)) {
      case HeightKind::MinusOne:
      case HeightKind::Zero: return std::nullopt;
      case HeightKind::Successor: return ExtHeight(predecessor(h.ordinal()));
      case HeightKind::Limit: return ExtHeight(fundamental_sequence(h.ordinal(), i));
      case HeightKind::Infinity: return h;
    }
    return std::nullopt;
  }

  ExtHeight root_height_;
  std::shared_ptr<const Overrides> overrides_;
};

inline HeightTree canonical_tree(const ExtHeight& root_height) { return HeightTree::canonical(root_height); }

inline ExtHeight node_height(const HeightTree& t, const NodePath& p) { return t.height(p); }

// ---------------------------------------------------------------------------

using NormFn = std::function<Rational(const NodePath&)>;
/// Returns the finite set {x : ||x|| >= eps}.
using SupportFn = std::function<std::vector<NodePath>(const Rational& eps)>;

struct NormedHeightTree {
  HeightTree tree;
  NormFn norm;
  /// Declared finite support above each eps; required by verify_norm_axioms.
  SupportFn support;
};

/// d(a, b) = max norm of the two successors of a ^ b lying on a and on b.
inline Rational canonical_ultrametric(const NormFn& norm, const Branch& a, const Branch& b) {
  if (a == b) return Rational{0};
  const NodePath m = meet(a, b);
  const Rational na = norm(m.child(a.index_at(m.size())));
  const Rational nb = norm(m.child(b.index_at(m.size())));
  return na < nb ? nb : na;
}

inline Rational canonical_ultrametric(const NormedHeightTree& nt, const Branch& a, const Branch& b) {
  return canonical_ultrametric(nt.norm, a, b);
}

/// A norm valid on any height tree: lambda^(sum of indices) off the central
/// points. Used where no function system is available (limit heights).
inline NormedHeightTree index_norm(const HeightTree& t, const Rational& lambda) {
  if (lambda <= 0 || lambda >= 1) throw DomainError("lambda must lie in (0, 1)");
  NormedHeightTree nt{t, {}, {}};
  nt.norm = [t, lambda](const NodePath& p) {
    if (t.height(p).is_minus_one()) return Rational{0};
    std::size_t sum = 0;
    for (std::size_t i : p.indices()) sum += i;
    return power(lambda, sum);
  };
  nt.support = [t, lambda](const Rational& eps) {
    if (eps <= 0) throw DomainError("epsilon must be positive");
    std::size_t budget = 0;
    while (power(lambda, budget + 1) >= eps) ++budget;
    std::vector<NodePath> out;
    std::vector<std::pair<NodePath, std::pair<ExtHeight, std::size_t>>> stack{{NodePath{}, {t.root_height(), 0}}};
    while (!stack.empty()) {
      auto [p, state] = std::move(stack.back());
      stack.pop_back();
      out.push_back(p);
      for (std::size_t i = 1; state.second + i <= budget; ++i) {
        auto h = t.child_height(p, state.first, i);
        if (!h) break;
        if (h->is_minus_one()) continue;
        stack.push_back({p.child(i), {std::move(*h), state.second + i}});
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  };
  return nt;
}

// ---------------------------------------------------------------------------

namespace detail {

/// Nodes of the window: paths of length <= depth with indices <= breadth.
/// Visits parents before children.
template <class Visit>
void for_each_window_node(const HeightTree& t, const NodePath& root, std::size_t depth, std::size_t breadth,
                          Visit&& visit) {
  std::deque<std::pair<NodePath, ExtHeight>> queue{{root, t.height(root)}};
  while (!queue.empty()) {
    auto [p, h] = std::move(queue.front());
    queue.pop_front();
    visit(p, h);
    if (p.size() - root.size() >= depth) continue;
    for (std::size_t i = 0; i <= breadth; ++i) {
      auto ch = t.child_height(p, h, i);
      if (!ch) break;
      queue.emplace_back(p.child(i), std::move(*ch));
    }
  }
}

}  // namespace detail

/// Checks the height-tree axioms at every node of depth < `depth`, sampling
/// children 0..breadth. Can falsify the infinite conditions, never certify them.
inline Report verify_height_tree_axioms(const HeightTree& t, std::size_t depth, std::size_t breadth) {
  if (depth < 1 || breadth < 1) throw DomainError("depth and breadth must be positive");
  Report r("height-tree-axioms", "parents at depth < " + std::to_string(depth) + ", children 0.." +
                                     std::to_string(breadth) + ", root height " + to_string(t.root_height()));
  const std::size_t half = (breadth + 1) / 2;
  detail::for_each_window_node(t, NodePath{}, depth - 1, breadth, [&](const NodePath& x, const ExtHeight& h) {
    ++r.checked;
    const std::string at = " at " + to_string(x) + " (height " + to_string(h) + ")";
    const auto central = t.child_height(x, h, 0);
    if (!central || !central->is_minus_one()) {
      r.fail("central child missing or not of height -1" + at);
    }
    const HeightKind kind = classify_kind(h);
    if (kind == HeightKind::MinusOne || kind == HeightKind::Zero) {
      if (t.child_height(x, h, 1)) r.fail("node of height -1 or 0 has a non-central child" + at);
      return;
    }
    std::vector<ExtHeight> kids;
    for (std::size_t i = 1; i <= breadth; ++i) {
      auto ch = t.child_height(x, h, i);
      if (!ch) {
        r.fail("child " + std::to_string(i) + " missing (successor set must be infinite)" + at);
        return;
      }
      if (ch->is_minus_one()) r.fail("second child of height -1 (index " + std::to_string(i) + ")" + at);
      kids.push_back(std::move(*ch));
    }
    const std::vector<ExtHeight> tail(kids.end() - static_cast<std::ptrdiff_t>(half), kids.end());
    if (kind == HeightKind::Infinity) {
      for (const auto& k : tail) {
        if (!k.is_infinity()) {
          r.fail("sampled tail child of an infinite-height node is not infinite" + at);
          break;
        }
      }
      return;
    }
    for (std::size_t i = 0; i < kids.size(); ++i) {
      if (!(height_plus_one(kids[i]) <= h)) {
        r.fail("child " + std::to_string(i + 1) + " has h(y)+1 > h(x)" + at);
      }
    }
    if (kind == HeightKind::Successor) {
      const ExtHeight pred = predecessor(h.ordinal());
      for (const auto& k : tail) {
        if (!(k == pred)) {
          r.fail("sampled tail child has height " + to_string(k) + ", expected " + to_string(pred) + at);
          break;
        }
      }
    } else {
      for (std::size_t i = 1; i < tail.size(); ++i) {
        if (tail[i] < tail[i - 1]) r.fail("sampled tail heights decrease" + at);
      }
      const ExtHeight top = height_plus_one(tail.back());
      for (std::size_t k = 1; k <= half; ++k) {
        if (!(ExtHeight(fundamental_sequence(h.ordinal(), k)) < top)) {
          r.fail("sampled children do not climb past h[" + std::to_string(k) + "]" + at);
          break;
        }
      }
    }
  });
  return r;
}

/// Checks the norm axioms on the declared support above eps plus a frontier
/// of children 0..breadth (beyond the largest child index used in the
/// support). Exact in rationals.
inline Report verify_norm_axioms(const NormedHeightTree& nt, const Rational& eps, std::size_t breadth = 8) {
  if (eps <= 0) throw DomainError("epsilon must be positive");
  if (!nt.support) throw DomainError("custom norm has no declared finite support");
  Report r("norm-axioms", "support {||x|| >= " + to_string(eps) + "} plus frontier of breadth " +
                              std::to_string(breadth));
  const std::vector<NodePath> support = nt.support(eps);
  const std::set<NodePath> in_support(support.begin(), support.end());
  r.count = in_support.size();

  std::map<NodePath, std::size_t> widest;  // largest child index used below each support node
  for (const NodePath& p : in_support) {
    if (!p.is_root()) {
      auto& w = widest[p.parent()];
      w = std::max(w, p.back());
    }
  }
  std::set<NodePath> window(in_support.begin(), in_support.end());
  window.insert(NodePath{});
  for (const NodePath& p : in_support) {
    ExtHeight h;
    try {
      h = nt.tree.height(p);
    } catch (const DomainError& e) {
      r.fail(std::string("support node not addressable: ") + e.what());
      continue;
    }
    const std::size_t limit = (widest.count(p) != 0 ? widest[p] : 0) + breadth;
    for (std::size_t i = 0; i <= limit; ++i) {
      if (!nt.tree.child_height(p, h, i)) break;
      window.insert(p.child(i));
    }
  }
  for (const NodePath& x : window) {
    ++r.checked;
    const std::string at = " at " + to_string(x);
    const Rational nx = nt.norm(x);
    const ExtHeight hx = nt.tree.height(x);
    if (nx < 0) r.fail("negative norm" + at);
    if ((nx == 0) != hx.is_minus_one()) r.fail("norm is zero exactly off the height -1 nodes" + at);
    if (!x.is_root() && nt.norm(x.parent()) < nx) r.fail("norm increases from parent to child" + at);
    const bool above = nx >= eps;
    if (above && in_support.count(x) == 0) r.fail("node with norm >= eps outside the declared support" + at);
    if (!above && in_support.count(x) != 0) r.fail("declared support contains a node with norm < eps" + at);
  }
  return r;
}

}  // namespace ultrafractal
