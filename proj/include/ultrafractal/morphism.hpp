#pragma once

// Height morphisms between (sub)trees of lazy height trees. A morphism is a
// rule that, for a source node x with image f(x), sends child i of x to
// child j of f(x), with child 0 always sent to child 0. Rules memoize the
// child maps they have computed, under a mutex, so a morphism may be shared
// across threads.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <iterator>
#include <map>
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
#include "ultrafractal/ordinal.hpp"
#include "ultrafractal/rational.hpp"
#include "ultrafractal/report.hpp"

namespace ultrafractal {

/// Child-map strategy of a height morphism.
class ChildRule {
 public:
  virtual ~ChildRule() = default;
  /// Index j such that f(x.i) = f(x).j.
  virtual std::size_t image(const NodePath& x, const NodePath& fx, std::size_t i) const = 0;
  /// Index i with f(x.i) = f(x).j and i != 0 unless j == 0, or nullopt.
  virtual std::optional<std::size_t> preimage(const NodePath& x, const NodePath& fx, std::size_t j) const = 0;
};

namespace detail {

/// Greedy smallest-index matching of the non-central children of a source
/// node onto those of its image: target m = 1, 2, ... takes the smallest
/// unused source n with h(x.n) >= h(fx.m); unmatched sources go to the
/// central child.
class GreedyMatcher {
 public:
  static constexpr std::size_t kScanCap = 1U << 16U;

  GreedyMatcher(HeightTree src, HeightTree dst) : src_(std::move(src)), dst_(std::move(dst)) {}

  std::size_t image(const NodePath& x, const NodePath& fx, std::size_t i) {
    if (i == 0) return 0;
    std::lock_guard lock(mutex_);
    State& s = state(x, fx);
    if (s.collapsed) {
      require_source_child(s, x, i);
      return 0;
    }
    for (std::size_t guard = 0;; ++guard) {
      if (i < s.src_to_dst.size() && s.src_to_dst[i] != 0) return s.src_to_dst[i];
      const std::size_t m = s.dst_to_src.size() + 1;
      if (m >= s.dst_monotone_from) {
        const ExtHeight target = dst_child(s, fx, m);
        if (source_child(s, x, i) < target) return 0;
      }
      if (guard > i + kScanCap) throw MatchingExhausted("greedy matching did not settle child " + std::to_string(i));
      step(s, x, fx);
    }
  }

  std::optional<std::size_t> preimage(const NodePath& x, const NodePath& fx, std::size_t j) {
    if (j == 0) return 0;
    std::lock_guard lock(mutex_);
    State& s = state(x, fx);
    if (s.collapsed) return std::nullopt;
    while (s.dst_to_src.size() < j) step(s, x, fx);
    return s.dst_to_src[j - 1];
  }

 private:
  struct State {
    ExtHeight src_height;
    ExtHeight dst_height;
    bool collapsed = false;  // target has no non-central children
    std::size_t dst_monotone_from = 1;
    std::vector<ExtHeight> src_children;  // index k-1 holds h(x.k)
    std::vector<std::size_t> src_to_dst;  // 0 = not matched (yet)
    std::vector<std::size_t> dst_to_src;  // index m-1 holds the source of target m
    std::size_t first_unused = 1;
  };

  State& state(const NodePath& x, const NodePath& fx) {
    auto it = states_.find(x);
    if (it != states_.end()) return it->second;
    State s;
    s.src_height = src_.height(x);
    s.dst_height = dst_.height(fx);
    const HeightKind dk = classify_kind(s.dst_height);
    s.collapsed = dk == HeightKind::MinusOne || dk == HeightKind::Zero;
    s.dst_monotone_from = dst_.monotone_from(fx);
    return states_.emplace(x, std::move(s)).first->second;
  }

  void require_source_child(State& s, const NodePath& x, std::size_t i) { (void)source_child(s, x, i); }

  const ExtHeight& source_child(State& s, const NodePath& x, std::size_t k) {
    while (s.src_children.size() < k) {
      auto h = src_.child_height(x, s.src_height, s.src_children.size() + 1);
      if (!h) {
        throw DomainError("source node " + to_string(x) + " has no child " + std::to_string(s.src_children.size() + 1));
      }
      s.src_children.push_back(std::move(*h));
    }
    return s.src_children[k - 1];
  }

  ExtHeight dst_child(const State& s, const NodePath& fx, std::size_t m) const {
    auto h = dst_.child_height(fx, s.dst_height, m);
    if (!h) throw DomainError("target node " + to_string(fx) + " has no child " + std::to_string(m));
    return *h;
  }

  void step(State& s, const NodePath& x, const NodePath& fx) {
    const std::size_t m = s.dst_to_src.size() + 1;
    const ExtHeight target = dst_child(s, fx, m);
    for (std::size_t n = s.first_unused; n < s.first_unused + kScanCap; ++n) {
      if (n < s.src_to_dst.size() && s.src_to_dst[n] != 0) continue;
      std::optional<ExtHeight> h;
      try {
        h = source_child(s, x, n);
      } catch (const DomainError&) {
        break;
      }
      if (*h >= target) {
        if (s.src_to_dst.size() <= n) s.src_to_dst.resize(n + 1, 0);
        s.src_to_dst[n] = m;
        s.dst_to_src.push_back(n);
        while (s.first_unused < s.src_to_dst.size() && s.src_to_dst[s.first_unused] != 0) ++s.first_unused;
        return;
      }
    }
    throw MatchingExhausted("no source child of " + to_string(x) + " can cover child " + std::to_string(m) +
                            " of " + to_string(fx) + " (height " + to_string(target) + ")");
  }

  HeightTree src_;
  HeightTree dst_;
  std::mutex mutex_;
  std::unordered_map<NodePath, State, NodePathHash> states_;
};

class GreedyRule final : public ChildRule {
 public:
  GreedyRule(HeightTree src, HeightTree dst) : matcher_(std::make_unique<GreedyMatcher>(std::move(src), std::move(dst))) {}

  std::size_t image(const NodePath& x, const NodePath& fx, std::size_t i) const override {
    return matcher_->image(x, fx, i);
  }
  std::optional<std::size_t> preimage(const NodePath& x, const NodePath& fx, std::size_t j) const override {
    return matcher_->preimage(x, fx, j);
  }

 private:
  std::unique_ptr<GreedyMatcher> matcher_;
};

}  // namespace detail

/// The root successors L = {x : h(x) = h(root) - 1} listed by child index,
/// and the finite exceptional set E of the other non-central successors.
/// Past the root's override prefix every child lies in L.
class RootSplit {
 public:
  explicit RootSplit(const HeightTree& t) {
    const ExtHeight h = t.root_height();
    const HeightKind kind = classify_kind(h);
    if (kind == HeightKind::Zero) return;
    if (kind == HeightKind::Limit) throw NotSuccessor("root height " + to_string(h) + " is a limit ordinal");
    const ExtHeight target = height_minus_one(h);
    nonempty_ = true;
    prefix_length_ = t.monotone_from(NodePath{}) - 1;
    for (std::size_t i = 1; i <= prefix_length_; ++i) {
      const ExtHeight c = *t.child_height(NodePath{}, h, i);
      if (c == target) {
        prefix_l_.push_back(i);
      } else if (c < target && !c.is_minus_one()) {
        exceptional_.push_back(i);
      } else {
        throw DomainError("root child " + std::to_string(i) + " has height " + to_string(c) +
                          ", incompatible with root height " + to_string(h));
      }
    }
    const ExtHeight tail = *t.child_height(NodePath{}, h, prefix_length_ + 1);
    if (!(tail == target)) throw DomainError("root children past the override prefix must have height h(root)-1");
  }

  bool empty() const noexcept { return !nonempty_; }
  const std::vector<std::size_t>& exceptional() const noexcept { return exceptional_; }

  bool contains(std::size_t i) const {
    if (!nonempty_ || i == 0) return false;
    if (i > prefix_length_) return true;
    return std::find(prefix_l_.begin(), prefix_l_.end(), i) != prefix_l_.end();
  }

  /// x_0, the first element of L.
  std::size_t first() const {
    if (!nonempty_) throw DomainError("L is empty");
    return prefix_l_.empty() ? prefix_length_ + 1 : prefix_l_.front();
  }

  /// x_{n+1} for i = x_n.
  std::size_t next(std::size_t i) const {
    if (i > prefix_length_) return i + 1;
    auto it = std::upper_bound(prefix_l_.begin(), prefix_l_.end(), i);
    return it == prefix_l_.end() ? prefix_length_ + 1 : *it;
  }

  /// x_{n-1} for j = x_n, or nullopt for x_0.
  std::optional<std::size_t> previous(std::size_t j) const {
    if (j > prefix_length_ + 1) return j - 1;
    auto it = std::lower_bound(prefix_l_.begin(), prefix_l_.end(), j);
    if (it == prefix_l_.begin()) return std::nullopt;
    return *std::prev(it);
  }

 private:
  bool nonempty_ = false;
  std::size_t prefix_length_ = 0;
  std::vector<std::size_t> prefix_l_;
  std::vector<std::size_t> exceptional_;
};

namespace detail {

/// Root level: x_n -> x_{n+1}, everything else -> central. Below: greedy
/// surjections from each subtree onto the subtree of its image.
class ShiftRule final : public ChildRule {
 public:
  ShiftRule(const HeightTree& t, RootSplit split) : split_(std::move(split)), greedy_(t, t) {}

  std::size_t image(const NodePath& x, const NodePath& fx, std::size_t i) const override {
    if (!x.is_root()) return greedy_.image(x, fx, i);
    return split_.contains(i) ? split_.next(i) : 0;
  }

  std::optional<std::size_t> preimage(const NodePath& x, const NodePath& fx, std::size_t j) const override {
    if (!x.is_root()) return greedy_.preimage(x, fx, j);
    if (j == 0) return 0;
    if (!split_.contains(j)) return std::nullopt;
    return split_.previous(j);
  }

 private:
  RootSplit split_;
  GreedyRule greedy_;
};

class HandBuiltRule final : public ChildRule {
 public:
  using Fn = std::function<std::size_t(const NodePath& x, const NodePath& fx, std::size_t i)>;
  static constexpr std::size_t kSearch = 4096;

  explicit HandBuiltRule(Fn fn) : fn_(std::move(fn)) {}

  std::size_t image(const NodePath& x, const NodePath& fx, std::size_t i) const override { return fn_(x, fx, i); }

  std::optional<std::size_t> preimage(const NodePath& x, const NodePath& fx, std::size_t j) const override {
    for (std::size_t i = 0; i < kSearch; ++i) {
      if (fn_(x, fx, i) == j) return i;
    }
    return std::nullopt;
  }

 private:
  Fn fn_;
};

}  // namespace detail

class HeightMorphism {
 public:
  HeightMorphism(HeightTree src, NodePath src_root, HeightTree dst, NodePath dst_root,
                 std::shared_ptr<const ChildRule> rule, bool surjective, std::string name)
      : src_(std::move(src)),
        src_root_(std::move(src_root)),
        dst_(std::move(dst)),
        dst_root_(std::move(dst_root)),
        rule_(std::move(rule)),
        surjective_(surjective),
        name_(std::move(name)) {}

  /// Greedy surjection of the subtree at src_root onto the subtree at dst_root.
  /// Requires h(src_root) >= h(dst_root).
  static HeightMorphism surjection(const HeightTree& src, const NodePath& src_root, const HeightTree& dst,
                                   const NodePath& dst_root, std::string name = "surjection") {
    const ExtHeight hs = src.height(src_root);
    const ExtHeight hd = dst.height(dst_root);
    if (hs < hd) {
      throw DomainError("surjective morphism needs h(source root) >= h(target root), got " + to_string(hs) +
                        " < " + to_string(hd));
    }
    return HeightMorphism(src, src_root, dst, dst_root, std::make_shared<detail::GreedyRule>(src, dst), true,
                          std::move(name));
  }

  /// The self-map of t fixing the root, shifting x_n to x_{n+1} and sending
  /// the other root successors to the central chain.
  static HeightMorphism shift(const HeightTree& t, std::string name = "f") {
    return HeightMorphism(t, {}, t, {}, std::make_shared<detail::ShiftRule>(t, RootSplit(t)), false,
                          std::move(name));
  }

  static HeightMorphism hand_built(const HeightTree& src, const NodePath& src_root, const HeightTree& dst,
                                   const NodePath& dst_root, detail::HandBuiltRule::Fn fn,
                                   std::string name = "hand-built") {
    return HeightMorphism(src, src_root, dst, dst_root, std::make_shared<detail::HandBuiltRule>(std::move(fn)),
                          false, std::move(name));
  }

  const HeightTree& source() const noexcept { return src_; }
  const HeightTree& target() const noexcept { return dst_; }
  const NodePath& source_root() const noexcept { return src_root_; }
  const NodePath& target_root() const noexcept { return dst_root_; }
  const std::shared_ptr<const ChildRule>& rule() const noexcept { return rule_; }
  bool claims_surjective() const noexcept { return surjective_; }
  const std::string& name() const noexcept { return name_; }

  /// Image of a source node; preserves the depth below the roots.
  NodePath apply(const NodePath& p) const {
    const NodePath rel = p.relative_to(src_root_);
    NodePath x = src_root_;
    NodePath fx = dst_root_;
    ExtHeight hx = src_.height(src_root_);
    for (std::size_t i : rel.indices()) {
      auto h = src_.child_height(x, hx, i);
      if (!h) throw DomainError("node " + to_string(p) + " is not addressable in the source tree");
      const std::size_t j = rule_->image(x, fx, i);
      x = x.child(i);
      fx = fx.child(j);
      hx = std::move(*h);
    }
    return fx;
  }

  /// Some source node mapped onto q (the unique one when q is off the central chains).
  std::optional<NodePath> preimage(const NodePath& q) const {
    if (!dst_root_.is_prefix_of(q)) return std::nullopt;
    const NodePath rel = q.relative_to(dst_root_);
    NodePath x = src_root_;
    NodePath fx = dst_root_;
    for (std::size_t j : rel.indices()) {
      std::optional<std::size_t> i;
      try {
        i = rule_->preimage(x, fx, j);
      } catch (const DomainError&) {
        return std::nullopt;
      }
      if (!i) return std::nullopt;
      x = x.child(*i);
      fx = fx.child(j);
    }
    return x;
  }

  /// The induced map on eventually-central branches.
  Branch boundary_map(const Branch& b) const {
    const NodePath stem = b.node(std::max(b.stem().size(), src_root_.size()));
    if (!src_root_.is_prefix_of(stem)) throw DomainError(to_string(b) + " does not pass through the source root");
    return Branch(apply(stem));
  }

 private:
  HeightTree src_;
  NodePath src_root_;
  HeightTree dst_;
  NodePath dst_root_;
  std::shared_ptr<const ChildRule> rule_;
  bool surjective_;
  std::string name_;
};

inline NodePath apply_morphism(const HeightMorphism& m, const NodePath& p) { return m.apply(p); }
inline Branch boundary_map(const HeightMorphism& m, const Branch& b) { return m.boundary_map(b); }

inline HeightMorphism build_surjective_morphism(const HeightTree& src, const NodePath& src_root,
                                                const HeightTree& dst, const NodePath& dst_root) {
  return HeightMorphism::surjection(src, src_root, dst, dst_root);
}

namespace detail {

class ComposedRule final : public ChildRule {
 public:
  ComposedRule(HeightMorphism outer, HeightMorphism inner) : outer_(std::move(outer)), inner_(std::move(inner)) {}

  std::size_t image(const NodePath& x, const NodePath& fx, std::size_t i) const override {
    const NodePath gx = inner_.apply(x);
    return outer_.rule()->image(gx, fx, inner_.rule()->image(x, gx, i));
  }

  std::optional<std::size_t> preimage(const NodePath& x, const NodePath& fx, std::size_t j) const override {
    const NodePath gx = inner_.apply(x);
    const auto mid = outer_.rule()->preimage(gx, fx, j);
    if (!mid) return std::nullopt;
    return inner_.rule()->preimage(x, gx, *mid);
  }

 private:
  HeightMorphism outer_;
  HeightMorphism inner_;
};

}  // namespace detail

/// outer o inner. The inner image root must lie in the outer source subtree.
inline HeightMorphism compose(const HeightMorphism& outer, const HeightMorphism& inner) {
  if (!outer.source_root().is_prefix_of(inner.target_root())) {
    throw DomainError("composition: inner image is not inside the outer source subtree");
  }
  const NodePath root_image = outer.apply(inner.target_root());
  return HeightMorphism(inner.source(), inner.source_root(), outer.target(), root_image,
                        std::make_shared<detail::ComposedRule>(outer, inner),
                        outer.claims_surjective() && inner.claims_surjective() &&
                            outer.source_root() == inner.target_root(),
                        outer.name() + "." + inner.name());
}

// ---------------------------------------------------------------------------

/// Checks h(f(x)) <= h(x), central-to-central and injectivity off the central
/// child at every window node; surjectivity onto the target window when the
/// morphism claims it.
inline Report verify_morphism_axioms(const HeightMorphism& m, std::size_t depth, std::size_t breadth) {
  Report r("morphism-axioms[" + m.name() + "]",
           "source window depth " + std::to_string(depth) + ", breadth " + std::to_string(breadth));
  const HeightTree& src = m.source();
  const HeightTree& dst = m.target();
  const auto& rule = *m.rule();
  try {
    detail::for_each_window_node(src, m.source_root(), depth, breadth, [&](const NodePath& x, const ExtHeight& hx) {
      ++r.checked;
      const std::string at = " at " + to_string(x);
      NodePath fx;
      ExtHeight hfx;
      try {
        fx = m.apply(x);
        hfx = dst.height(fx);
      } catch (const Error& e) {
        r.fail(std::string("image not addressable: ") + e.what() + at);
        return;
      }
      if (hx < hfx) r.fail("h(f(x)) = " + to_string(hfx) + " exceeds h(x) = " + to_string(hx) + at);
      if (rule.image(x, fx, 0) != 0) r.fail("central child not sent to the central child" + at);
      std::map<std::size_t, std::size_t> hit;
      for (std::size_t i = 1; i <= breadth; ++i) {
        if (!src.child_height(x, hx, i)) break;
        std::size_t j = 0;
        try {
          j = rule.image(x, fx, i);
        } catch (const Error& e) {
          r.fail(std::string("child map failed: ") + e.what() + at);
          continue;
        }
        if (!dst.child_height(fx, hfx, j)) {
          r.fail("child " + std::to_string(i) + " sent outside suc(f(x))" + at);
          continue;
        }
        if (j == 0) continue;
        if (auto [it, fresh] = hit.emplace(j, i); !fresh) {
          r.fail("children " + std::to_string(it->second) + " and " + std::to_string(i) +
                 " share the non-central image " + std::to_string(j) + at);
        }
      }
    });
    if (m.claims_surjective()) {
      detail::for_each_window_node(dst, m.target_root(), depth, breadth, [&](const NodePath& y, const ExtHeight&) {
        ++r.checked;
        const auto x = m.preimage(y);
        if (!x) {
          r.fail("target node " + to_string(y) + " has no preimage");
        } else if (!(m.apply(*x) == y)) {
          r.fail("preimage of " + to_string(y) + " does not map back onto it");
        }
      });
    }
  } catch (const Error& e) {
    r.fail(std::string("window enumeration failed: ") + e.what());
  }
  return r;
}

/// Node level: ||f(x)|| <= lambda ||x|| for every listed node other than the
/// source tree root (the root norm never enters the canonical ultrametric).
/// Branch level: d(f a, f b) <= lambda d(a, b) for every listed pair.
inline Report lipschitz_check(const HeightMorphism& m, const NormFn& src_norm, const NormFn& dst_norm,
                              const Rational& lambda, const std::vector<NodePath>& nodes,
                              const std::vector<Branch>& branches) {
  Report r("lipschitz[" + m.name() + "]", std::to_string(nodes.size()) + " nodes, " +
                                              std::to_string(branches.size()) + " branches, lambda " +
                                              to_string(lambda));
  for (const NodePath& x : nodes) {
    if (x.is_root()) continue;
    ++r.checked;
    const Rational lhs = dst_norm(m.apply(x));
    const Rational rhs = lambda * src_norm(x);
    if (rhs < lhs) {
      r.fail("||f(x)|| = " + to_string(lhs) + " > lambda ||x|| = " + to_string(rhs) + " at " + to_string(x));
    }
  }
  std::vector<Branch> images;
  images.reserve(branches.size());
  for (const Branch& b : branches) images.push_back(m.boundary_map(b));
  for (std::size_t a = 0; a < branches.size(); ++a) {
    for (std::size_t b = a + 1; b < branches.size(); ++b) {
      ++r.checked;
      const Rational lhs = canonical_ultrametric(dst_norm, images[a], images[b]);
      const Rational rhs = lambda * canonical_ultrametric(src_norm, branches[a], branches[b]);
      if (rhs < lhs) {
        r.fail("d(f a, f b) = " + to_string(lhs) + " > lambda d(a, b) = " + to_string(rhs) + " for " +
               to_string(branches[a]) + ", " + to_string(branches[b]));
      }
    }
  }
  return r;
}

}  // namespace ultrafractal
