#pragma once

// JSON and DOT renderings of tree windows, morphism windows and level sets.
// Rationals are written as "p/q" strings so that exports stay exact.

#include <cstddef>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ultrafractal/height_tree.hpp"
#include "ultrafractal/ifs.hpp"
#include "ultrafractal/morphism.hpp"
#include "ultrafractal/ordinal.hpp"
#include "ultrafractal/rational.hpp"
#include "ultrafractal/report.hpp"

namespace ultrafractal {

using Json = nlohmann::ordered_json;

inline Json path_json(const NodePath& p) {
  Json a = Json::array();
  for (std::size_t i : p.indices()) a.push_back(i);
  return a;
}

/// {root_height, depth, breadth, nodes: [{path, height, norm?}]}
inline Json tree_json(const HeightTree& t, std::size_t depth, std::size_t breadth, const NormFn& norm = {}) {
  Json nodes = Json::array();
  detail::for_each_window_node(t, NodePath{}, depth, breadth, [&](const NodePath& p, const ExtHeight& h) {
    Json n{{"path", path_json(p)}, {"height", to_string(h)}};
    if (norm) n["norm"] = to_string(norm(p));
    nodes.push_back(std::move(n));
  });
  return Json{{"root_height", to_string(t.root_height())},
              {"depth", depth},
              {"breadth", breadth},
              {"nodes", std::move(nodes)}};
}

namespace detail {

inline std::string dot_id(const NodePath& p) {
  std::string s = "n";
  for (std::size_t i : p.indices()) s += "_" + std::to_string(i);
  return s;
}

}  // namespace detail

inline std::string tree_dot(const HeightTree& t, std::size_t depth, std::size_t breadth, const NormFn& norm = {}) {
  std::ostringstream out;
  out << "digraph height_tree {\n  node [shape=box, fontname=\"monospace\"];\n";
  detail::for_each_window_node(t, NodePath{}, depth, breadth, [&](const NodePath& p, const ExtHeight& h) {
    out << "  " << detail::dot_id(p) << " [label=\"" << to_string(p) << "\\nh=" << to_string(h);
    if (norm) out << "\\n|x|=" << to_string(norm(p));
    out << "\"" << (h.is_minus_one() ? ", style=dashed" : "") << "];\n";
    if (!p.is_root()) out << "  " << detail::dot_id(p.parent()) << " -> " << detail::dot_id(p) << ";\n";
  });
  out << "}\n";
  return out.str();
}

/// [{src_path, dst_path}] over the source window.
inline Json morphism_json(const HeightMorphism& m, std::size_t depth, std::size_t breadth) {
  Json pairs = Json::array();
  detail::for_each_window_node(m.source(), m.source_root(), depth, breadth, [&](const NodePath& x, const ExtHeight&) {
    pairs.push_back(Json{{"src_path", path_json(x)}, {"dst_path", path_json(m.apply(x))}});
  });
  return pairs;
}

/// T_n with each node filled by the color of the map whose image contains it.
inline std::string ifs_dot(const IfsSystem& s, std::size_t n) {
  static const char* const kPalette[] = {"lightblue", "salmon", "palegreen", "khaki", "plum", "lightgray"};
  constexpr std::size_t kColors = sizeof(kPalette) / sizeof(kPalette[0]);
  const std::vector<NodePath> nodes = s.level_sets(n).back();
  std::ostringstream out;
  out << "digraph level_set {\n  node [shape=box, style=filled, fontname=\"monospace\"];\n";
  for (std::size_t k = 0; k < s.map_count(); ++k) {
    out << "  // " << s.map(k).name() << ": " << kPalette[k % kColors] << "\n";
  }
  std::set<NodePath> present(nodes.begin(), nodes.end());
  for (const NodePath& y : nodes) {
    std::string color = "white";
    for (std::size_t k = 0; k < s.map_count(); ++k) {
      const auto x = s.map(k).preimage(y);
      if (x && s.map(k).apply(*x) == y) {
        color = kPalette[k % kColors];
        break;
      }
    }
    out << "  " << detail::dot_id(y) << " [label=\"" << to_string(y) << "\\n" << to_string(s.node_norm(y))
        << "\", fillcolor=" << color << "];\n";
    if (!y.is_root() && present.count(y.parent()) != 0) {
      out << "  " << detail::dot_id(y.parent()) << " -> " << detail::dot_id(y) << ";\n";
    }
  }
  out << "}\n";
  return out.str();
}

inline Json report_json(const Report& r) {
  Json j{{"suite", r.name}, {"scope", r.scope}, {"passed", r.passed}, {"checked", r.checked}};
  if (r.count) j["count"] = *r.count;
  j["failures"] = r.failures;
  return j;
}

}  // namespace ultrafractal
