#pragma once

// Non-unital spaces: one unital system per piece of the unital
// decomposition, glued by the metric that puts distinct pieces at 1/lambda.
// A map of piece i is extended to the other pieces by the constant Fix(f).

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "ultrafractal/errors.hpp"
#include "ultrafractal/height_tree.hpp"
#include "ultrafractal/ifs.hpp"
#include "ultrafractal/point_set.hpp"
#include "ultrafractal/rational.hpp"
#include "ultrafractal/scattered.hpp"

namespace ultrafractal {

class GluedIfs {
 public:
  struct Piece {
    OrdinalSpace space;
    IfsSystem ifs;
    /// Fix(f) for each map f of the piece.
    std::vector<Branch> fixed;
  };

  static GluedIfs build(const OrdinalSpace& x, const Rational& lambda, Caps caps = {}) {
    require_contraction_factor(lambda);
    if (x.is_empty()) throw DomainError("the empty space is not a fractal");
    if (classify_fractal(x) == FractalVerdict::NotTopologicalFractal) {
      throw NotSuccessor("scattered height " + to_string(scattered_height(x).height) + " of " + to_string(x) +
                         " is a limit ordinal");
    }
    GluedIfs g;
    g.lambda_ = lambda;
    g.caps_ = caps;
    const std::vector<OrdinalSpace> spaces = unital_decomposition(x);
    for (std::size_t i = 0; i < spaces.size(); ++i) {
      IfsSystem ifs = IfsSystem::build_unital(scattered_height(spaces[i]).height, lambda, caps);
      std::vector<Branch> fixed;
      if (spaces.size() > 1) {
        // Any tolerance works: countable pieces have eventually central fixed branches.
        const Rational tol = power(lambda, caps.level_cap);
        for (std::size_t k = 0; k < ifs.map_count(); ++k) {
          const FixedPoint fp = fixed_point(ifs, k, tol);
          if (!fp.exact) throw DomainError("fixed point of map " + std::to_string(k) + " is not eventually central");
          fixed.push_back(fp.branch);
        }
      }
      for (std::size_t k = 0; k < ifs.map_count(); ++k) g.locations_.emplace_back(i, k);
      g.pieces_.push_back(Piece{spaces[i], std::move(ifs), std::move(fixed)});
    }
    return g;
  }

  const std::vector<Piece>& pieces() const noexcept { return pieces_; }
  const Rational& lambda() const noexcept { return lambda_; }
  const Caps& caps() const noexcept { return caps_; }
  std::size_t map_count() const noexcept { return locations_.size(); }

  /// (piece, map index within the piece) of extended map k.
  const std::pair<std::size_t, std::size_t>& map_location(std::size_t k) const {
    if (k >= locations_.size()) throw DomainError("map index " + std::to_string(k) + " out of range");
    return locations_[k];
  }

  Point apply_map(std::size_t k, const Point& p) const {
    const auto [piece, local] = map_location(k);
    if (p.piece >= pieces_.size()) throw DomainError("point " + to_string(p) + " lies in no piece");
    if (p.piece != piece) return Point{piece, pieces_[piece].fixed.at(local)};
    const Point image = pieces_[piece].ifs.apply_map(local, Point{0, p.branch});
    return Point{piece, image.branch};
  }

  PointSet seed() const { return PointSet{Point{0, Branch::central()}}; }

  BranchMetric metric() const {
    std::vector<NormFn> norms;
    for (const Piece& p : pieces_) norms.push_back(p.ifs.norm_fn());
    return BranchMetric(std::move(norms), 1 / lambda_);
  }

 private:
  GluedIfs() = default;

  std::vector<Piece> pieces_;
  std::vector<std::pair<std::size_t, std::size_t>> locations_;
  Rational lambda_;
  Caps caps_;
};

inline GluedIfs build_ifs_general(const OrdinalSpace& x, const Rational& lambda, Caps caps = {}) {
  return GluedIfs::build(x, lambda, caps);
}

/// X = union of f(X) on nets: the Hutchinson image of F^n(seed) is F^{n+1}(seed),
/// it meets every piece, and it lies within lambda^{n+1} of F^n(seed).
inline Report verify_self_cover(const GluedIfs& s, std::size_t n) {
  Report r("self-cover", "F^" + std::to_string(n) + "(seed) against its Hutchinson image");
  const BranchMetric d = s.metric();
  const PointSet net = attractor_net(s, n);
  const PointSet image = hutchinson_step(s, net);
  std::vector<bool> hit(s.pieces().size(), false);
  for (const Point& p : image) hit[p.piece] = true;
  for (std::size_t i = 0; i < hit.size(); ++i) {
    ++r.checked;
    if (!hit[i]) r.fail("piece " + std::to_string(i) + " is not covered");
  }
  ++r.checked;
  if (!image.includes(net)) r.fail("the Hutchinson image does not contain F^" + std::to_string(n) + "(seed)");
  ++r.checked;
  const Rational dist = hausdorff_distance(d, net, image);
  const Rational bound = power(s.lambda(), n + 1);
  if (n > 0 && bound < dist) {
    r.fail("d_H(F^n, F^{n+1}) = " + to_string(dist) + " exceeds lambda^{n+1} = " + to_string(bound));
  }
  r.count = image.size();
  return r;
}

}  // namespace ultrafractal
