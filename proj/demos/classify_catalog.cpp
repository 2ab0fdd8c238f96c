// Prints the verdict, scattered height and unital pieces for a few spaces.

#include <iostream>

#include "ultrafractal.hpp"

int main() {
  using namespace ultrafractal;
  for (const char* lit : {"5", "w", "w*2", "w^2", "w^2*3+w*2+5", "w^w", "w^(w+1)", "w^w*2", "cantor"}) {
    const OrdinalSpace x = parse_space(lit);
    const ScatteredHeight h = scattered_height(x);
    std::cout << to_string(x) << ": " << to_string(classify_fractal(x)) << ", height " << to_string(h.height);
    if (h.multiplicity) std::cout << " x" << *h.multiplicity;
    std::cout << ", pieces";
    for (const OrdinalSpace& p : unital_decomposition(x)) std::cout << " " << to_string(p);
    std::cout << "\n";
  }
}
