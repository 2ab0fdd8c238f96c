// Iterates the Hutchinson operator of the height w+1 system and of the glued
// system on [0, w*2], printing net sizes and exact step distances.

#include <iostream>

#include "ultrafractal.hpp"

namespace {

template <class S>
void show(const char* title, const S& s, std::size_t steps) {
  using namespace ultrafractal;
  std::cout << title << " (" << s.map_count() << " maps)\n";
  const auto d = s.metric();
  PointSet cur = s.seed();
  for (std::size_t k = 1; k <= steps; ++k) {
    PointSet next = hutchinson_step(s, cur);
    std::cout << "  step " << k << ": " << next.size() << " points, d_H = " << to_string(hausdorff_distance(d, cur, next))
              << "\n";
    cur = std::move(next);
  }
}

}  // namespace

int main() {
  using namespace ultrafractal;
  show("height w+1", build_ifs_unital(parse_ordinal("w+1"), Rational(1, 2)), 8);
  show("[0, w*2]", build_ifs_general(parse_space("w*2"), Rational(1, 3)), 6);
}
