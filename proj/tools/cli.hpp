#pragma once

// Command-line front end: argument parsing into a Command and execution
// against an output stream. Kept separate from main() so tests can drive it.

#include <cstddef>
#include <functional>
#include <future>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "ultrafractal.hpp"

namespace ultrafractal::cli {

enum class Verb { Classify, Tree, Ifs, Verify, Iterate };
enum class Format { Text, Json, Dot };

/// Invalid invocation; maps to exit code 2.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Help requested or the argument parser rejected the command line.
class ParserExit : public Error {
 public:
  ParserExit(int code, const std::string& text) : Error(text), code_(code) {}
  int code() const noexcept { return code_; }

 private:
  int code_;
};

struct Limits {
  static constexpr std::size_t kDepth = 12;
  static constexpr std::size_t kBreadth = 64;
  static constexpr std::size_t kLevels = 32;
  static constexpr std::size_t kIterate = 64;
  static constexpr std::size_t kLevelCap = 4096;
  static constexpr std::size_t kNetCap = 100'000'000;
  static constexpr std::size_t kWordCap = 64;
};

inline const std::vector<std::string>& height_suites() {
  static const std::vector<std::string> s{"height-tree", "norm",        "morphism",       "level-norm", "ultrametric",
                                          "lipschitz",   "partition",   "word-diameters", "contraction"};
  return s;
}

inline const std::vector<std::string>& space_suites() {
  static const std::vector<std::string> s{"height-tree", "norm",      "morphism",   "level-norm",     "ultrametric",
                                          "lipschitz",   "partition", "self-cover", "word-diameters", "contraction"};
  return s;
}

struct Command {
  Verb verb = Verb::Classify;
  std::optional<OrdinalSpace> space;
  std::optional<ExtHeight> height;
  Rational lambda{1, 2};
  std::size_t depth = 3;
  std::size_t breadth = 4;
  std::size_t levels = 8;
  std::size_t iterations = 8;
  std::optional<std::size_t> map;
  Rational tol{1, 1024};
  Format format = Format::Text;
  std::vector<std::string> suites;
  Caps caps;
};

namespace detail {

inline void check_limit(const char* flag, std::size_t value, std::size_t limit, std::size_t floor = 0) {
  if (value < floor || value > limit) {
    throw UsageError(std::string(flag) + " must lie in [" + std::to_string(floor) + ", " + std::to_string(limit) +
                     "], got " + std::to_string(value));
  }
}

inline Rational parse_lambda(const std::string& text) {
  const Rational q = parse_rational(text);
  if (q <= 0 || q >= 1) throw UsageError("--lambda must lie in (0, 1), got " + text);
  return q;
}

inline ExtHeight parse_root_height(const std::string& text) {
  const ExtHeight h = parse_ordinal(text);
  if (h.is_minus_one()) throw UsageError("a tree root cannot have height -1");
  return h;
}

}  // namespace detail

/// argv without the program name.
inline Command parse_args(const std::vector<std::string>& argv) {
  CLI::App app{"Banach ultrafractal toolkit"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  std::string space_text, height_text, lambda_text = "1/2", tol_text = "1/1024", format_text = "text";
  std::optional<std::size_t> map_index, depth, breadth;
  Command c;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--lambda", lambda_text, "contraction factor p/q in (0, 1)");
    sub->add_option("--format", format_text, "text, json or dot")->check(CLI::IsMember({"text", "json", "dot"}));
    sub->add_option("--level-cap", c.caps.level_cap, "largest level searched for a node");
    sub->add_option("--net-cap", c.caps.net_cap, "largest point or node set built");
    sub->add_option("--word-cap", c.caps.word_cap, "longest map word enumerated");
  };

  CLI::App* classify = app.add_subcommand("classify", "decide whether a space is a Banach ultrafractal");
  classify->add_option("X", space_text, "ordinal gamma for [0, gamma], or cantor");
  classify->add_option("--space", space_text, "same as the positional argument");
  add_common(classify);

  CLI::App* tree = app.add_subcommand("tree", "export a window of the canonical height tree");
  tree->add_option("--height", height_text, "root height")->required();
  tree->add_option("--depth", depth, "window depth (default 3)");
  tree->add_option("--breadth", breadth, "window breadth (default 4)");
  add_common(tree);

  CLI::App* ifs = app.add_subcommand("ifs", "build the function system and iterate its Hutchinson operator");
  ifs->add_option("--height", height_text, "root height of a unital system");
  ifs->add_option("--space", space_text, "space for a glued system");
  ifs->add_option("--iterate", c.iterations, "number of Hutchinson steps");
  ifs->add_option("--levels", c.levels, "level set exported in dot format");
  add_common(ifs);

  CLI::App* verify = app.add_subcommand("verify", "run verification suites");
  verify->add_option("--height", height_text, "root height of a unital system");
  verify->add_option("--space", space_text, "space for a glued system");
  verify->add_option("--suite", c.suites, "suite name or all (repeatable, comma separated)")->delimiter(',');
  verify->add_option("--levels", c.levels, "level / net depth");
  verify->add_option("--depth", depth, "tree window depth (default 4)");
  verify->add_option("--breadth", breadth, "tree window breadth (default 8)");
  add_common(verify);

  CLI::App* iterate = app.add_subcommand("iterate", "fixed points and Banach iteration of each map");
  iterate->add_option("--height", height_text, "root height of a unital system")->required();
  iterate->add_option("--tol", tol_text, "tolerance p/q for fixed branches");
  iterate->add_option("--iterate", c.iterations, "Banach iteration steps");
  iterate->add_option("--map", map_index, "restrict to one map");
  add_common(iterate);

  std::vector<std::string> reversed(argv.rbegin(), argv.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::Error& e) {
    std::ostringstream text;
    const int code = app.exit(e, text, text);
    throw ParserExit(code == 0 ? 0 : 2, text.str());
  }

  const bool is_verify = verify->parsed();
  if (classify->parsed()) c.verb = Verb::Classify;
  if (tree->parsed()) c.verb = Verb::Tree;
  if (ifs->parsed()) c.verb = Verb::Ifs;
  if (is_verify) c.verb = Verb::Verify;
  if (iterate->parsed()) c.verb = Verb::Iterate;
  c.depth = depth.value_or(is_verify ? 4 : 3);
  c.breadth = breadth.value_or(is_verify ? 8 : 4);

  c.lambda = detail::parse_lambda(lambda_text);
  c.tol = parse_rational(tol_text);
  if (c.tol <= 0) throw UsageError("--tol must be positive");
  c.format = format_text == "json" ? Format::Json : format_text == "dot" ? Format::Dot : Format::Text;
  c.map = map_index;

  if (!height_text.empty()) c.height = detail::parse_root_height(height_text);
  if (!space_text.empty()) c.space = parse_space(space_text);

  switch (c.verb) {
    case Verb::Classify:
      if (!c.space) throw UsageError("classify needs a space");
      if (c.space->is_empty()) throw UsageError("the empty space has no scattered height");
      if (c.format == Format::Dot) throw UsageError("classify has no dot output");
      break;
    case Verb::Tree:
      break;
    case Verb::Ifs:
    case Verb::Verify:
      if (c.height.has_value() == c.space.has_value()) throw UsageError("give exactly one of --height and --space");
      if (c.space && c.space->is_empty()) throw UsageError("the empty space is not a fractal");
      if (c.format == Format::Dot && (c.verb == Verb::Verify || c.space)) {
        throw UsageError("dot output is only available for ifs --height");
      }
      break;
    case Verb::Iterate:
      if (c.format == Format::Dot) throw UsageError("iterate has no dot output");
      break;
  }

  detail::check_limit("--depth", c.depth, Limits::kDepth, 1);
  detail::check_limit("--breadth", c.breadth, Limits::kBreadth, 1);
  detail::check_limit("--levels", c.levels, Limits::kLevels, 1);
  detail::check_limit("--iterate", c.iterations, Limits::kIterate);
  detail::check_limit("--level-cap", c.caps.level_cap, Limits::kLevelCap, 1);
  detail::check_limit("--net-cap", c.caps.net_cap, Limits::kNetCap, 1);
  detail::check_limit("--word-cap", c.caps.word_cap, Limits::kWordCap);

  if (c.verb == Verb::Verify) {
    const auto& known = c.space ? space_suites() : height_suites();
    std::vector<std::string> chosen;
    if (c.suites.empty()) c.suites.push_back("all");
    for (const std::string& s : c.suites) {
      if (s == "all") {
        chosen = known;
        break;
      }
      if (std::find(known.begin(), known.end(), s) == known.end()) throw UsageError("unknown suite: " + s);
      if (std::find(chosen.begin(), chosen.end(), s) == chosen.end()) chosen.push_back(s);
    }
    c.suites = std::move(chosen);
  }
  return c;
}

// ---------------------------------------------------------------------------

namespace detail {

inline std::string kind_name(HeightKind k) {
  switch (k) {
    case HeightKind::MinusOne: return "minus one";
    case HeightKind::Zero: return "zero";
    case HeightKind::Successor: return "successor";
    case HeightKind::Limit: return "limit";
    case HeightKind::Infinity: return "uncountable";
  }
  return "?";
}

inline std::string verdict_line(const OrdinalSpace& x) {
  const ScatteredHeight h = scattered_height(x);
  return std::string(to_string(classify_fractal(x))) + " (height " + to_string(h.height) + ", " +
         kind_name(classify_kind(h.height)) + ")";
}

inline std::string not_fractal_message(const ExtHeight& h) {
  return "NotTopologicalFractal (height " + to_string(h) + ", limit): no contracting system exists";
}

inline std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

inline int run_classify(const Command& c, std::ostream& out) {
  const OrdinalSpace& x = *c.space;
  const ScatteredHeight h = scattered_height(x);
  std::vector<std::string> pieces;
  for (const OrdinalSpace& p : unital_decomposition(x)) pieces.push_back(to_string(p));
  if (c.format == Format::Json) {
    Json j{{"space", to_string(x)},
           {"verdict", to_string(classify_fractal(x))},
           {"height", to_string(h.height)},
           {"kind", kind_name(classify_kind(h.height))}};
    j["multiplicity"] = h.multiplicity ? Json(*h.multiplicity) : Json(nullptr);
    j["unital"] = is_unital(x);
    j["pieces"] = pieces;
    out << j.dump(2) << "\n";
    return 0;
  }
  out << verdict_line(x) << "\n";
  out << "multiplicity: " << (h.multiplicity ? std::to_string(*h.multiplicity) : std::string("uncountable")) << "\n";
  out << "unital: " << (is_unital(x) ? "yes" : "no") << "\n";
  out << "unital pieces:";
  for (const std::string& p : pieces) out << " " << (x.is_cantor() ? p : "[0," + p + "]");
  out << "\n";
  return 0;
}

/// Level norm when a function system exists, index norm otherwise.
inline NormedHeightTree default_norm(const HeightTree& t, const Rational& lambda, const Caps& caps) {
  if (classify_kind(t.root_height()) == HeightKind::Limit) return index_norm(t, lambda);
  return IfsSystem::build_unital(t, lambda, caps).normed_tree();
}

inline int run_tree(const Command& c, std::ostream& out) {
  const HeightTree t = HeightTree::canonical(*c.height);
  const NormedHeightTree nt = default_norm(t, c.lambda, c.caps);
  switch (c.format) {
    case Format::Json: out << tree_json(t, c.depth, c.breadth, nt.norm).dump(2) << "\n"; break;
    case Format::Dot: out << tree_dot(t, c.depth, c.breadth, nt.norm); break;
    case Format::Text:
      out << "canonical tree, root height " << to_string(t.root_height()) << ", depth " << c.depth << ", breadth "
          << c.breadth << "\n";
      ultrafractal::detail::for_each_window_node(t, NodePath{}, c.depth, c.breadth,
                                                 [&](const NodePath& p, const ExtHeight& h) {
                                                   out << std::string(2 * p.size(), ' ') << to_string(p)
                                                       << "  h=" << to_string(h) << "  norm=" << to_string(nt.norm(p))
                                                       << "\n";
                                                 });
      break;
  }
  return 0;
}

template <class S>
int report_iteration(const Command& c, const S& s, Json system, std::optional<std::vector<std::size_t>> level_sizes,
                     std::ostream& out) {
  const BranchMetric d = s.metric();
  std::vector<std::pair<std::size_t, Rational>> steps;
  PointSet cur = s.seed();
  for (std::size_t k = 1; k <= c.iterations; ++k) {
    PointSet next = iterate_hutchinson(s, cur, 1);
    steps.emplace_back(next.size(), hausdorff_distance(d, cur, next));
    cur = std::move(next);
  }
  bool contracting = true;
  for (std::size_t k = 1; k < steps.size(); ++k) {
    if (s.lambda() * steps[k - 1].second < steps[k].second) contracting = false;
  }
  if (c.format == Format::Json) {
    Json j{{"lambda", to_string(s.lambda())}, {"n", c.iterations}, {"system", std::move(system)}};
    if (level_sizes) j["level_set_sizes"] = *level_sizes;
    Json rows = Json::array();
    for (std::size_t k = 0; k < steps.size(); ++k) {
      rows.push_back(Json{{"step", k + 1}, {"net_size", steps[k].first}, {"hausdorff", to_string(steps[k].second)}});
    }
    j["steps"] = std::move(rows);
    j["verdicts"] = Json{{"classification", "BanachUltrafractal"}, {"contracting", contracting}};
    out << j.dump(2) << "\n";
  } else {
    out << "system: " << system.dump() << "\n";
    out << "lambda " << to_string(s.lambda()) << ", " << s.map_count() << " maps\n";
    if (level_sizes) {
      out << "|T_n|:";
      for (std::size_t n : *level_sizes) out << " " << n;
      out << "\n";
    }
    out << pad("step", 6) << pad("points", 10) << "d_H(F^(k-1), F^k)\n";
    for (std::size_t k = 0; k < steps.size(); ++k) {
      out << pad(std::to_string(k + 1), 6) << pad(std::to_string(steps[k].first), 10) << to_string(steps[k].second)
          << "\n";
    }
    out << "contracting: " << (contracting ? "yes" : "no") << "\n";
  }
  return contracting ? 0 : 1;
}

inline std::size_t level_limit(const Command& c) { return std::min<std::size_t>(c.iterations, c.levels); }

inline int run_ifs(const Command& c, std::ostream& out, std::ostream& err) {
  if (c.height) {
    if (classify_kind(*c.height) == HeightKind::Limit) {
      err << not_fractal_message(*c.height) << "\n";
      return 1;
    }
    const IfsSystem s = IfsSystem::build_unital(*c.height, c.lambda, c.caps);
    if (c.format == Format::Dot) {
      out << ifs_dot(s, c.levels);
      return 0;
    }
    std::vector<std::string> names;
    for (const auto& m : s.maps()) names.push_back(m.name());
    Json system{{"root_height", to_string(*c.height)}, {"maps", names}};
    std::vector<std::size_t> sizes;
    for (const auto& l : s.level_sets(level_limit(c))) sizes.push_back(l.size());
    return report_iteration(c, s, std::move(system), sizes, out);
  }
  if (classify_fractal(*c.space) == FractalVerdict::NotTopologicalFractal) {
    err << not_fractal_message(scattered_height(*c.space).height) << "\n";
    return 1;
  }
  const GluedIfs g = build_ifs_general(*c.space, c.lambda, c.caps);
  std::vector<std::string> pieces;
  for (const auto& p : g.pieces()) pieces.push_back(to_string(p.space));
  Json system{{"space", to_string(*c.space)}, {"pieces", pieces}, {"map_count", g.map_count()}};
  return report_iteration(c, g, std::move(system), std::nullopt, out);
}

inline Report contraction_report(const BranchMetric& d, const std::vector<PointSet>& nets, const Rational& lambda) {
  const std::size_t top = nets.size() - 1;
  Report r("contraction", "d_H(F^n, F^" + std::to_string(top) + ") <= lambda^n d_H(F^0, F^" + std::to_string(top) + ")");
  const Rational start = hausdorff_distance(d, nets[0], nets[top]);
  for (std::size_t n = 1; n < top; ++n) {
    ++r.checked;
    const Rational dist = hausdorff_distance(d, nets[n], nets[top]);
    const Rational bound = power(lambda, n) * start;
    if (bound < dist) r.fail("n = " + std::to_string(n) + ": " + to_string(dist) + " > " + to_string(bound));
  }
  return r;
}

template <class S>
std::vector<PointSet> nets_up_to(const S& s, std::size_t n) {
  std::vector<PointSet> nets{s.seed()};
  for (std::size_t k = 0; k < n; ++k) nets.push_back(iterate_hutchinson(s, nets.back(), 1));
  return nets;
}

template <class S>
Report word_report(const S& s, std::size_t levels) {
  const PointSet net = attractor_net(s, levels);
  // Longest word length whose images of the net fit in the net cap.
  std::size_t top = 0;
  for (std::size_t work = net.size() * s.map_count(); top < std::min(levels, s.caps().word_cap); ++top) {
    if (work > s.caps().net_cap) break;
    work *= s.map_count();
  }
  Report r("word-diameters", "words of length 0.." + std::to_string(top) + " on F^" + std::to_string(levels) +
                                 "(seed), bound lambda^n max(1, diam)");
  const Rational scale = std::max(Rational{1}, diameter(s.metric(), net));
  for (std::size_t n = 0; n <= top; ++n) {
    ++r.checked;
    const Rational w = word_diameters(s, n, levels);
    if (power(s.lambda(), n) * scale < w) r.fail("length " + std::to_string(n) + ": diameter " + to_string(w));
  }
  return r;
}

inline Report piece_suite(const std::string& name, const IfsSystem& s, const Command& c) {
  if (name == "height-tree") return verify_height_tree_axioms(s.tree(), c.depth, c.breadth);
  if (name == "norm") return verify_norm_axioms(s.normed_tree(), power(s.lambda(), c.levels), c.breadth);
  if (name == "level-norm") return verify_level_norm(s, c.levels);
  Report r("morphism-axioms", "every map of the system");
  for (const auto& m : s.maps()) r.absorb(verify_morphism_axioms(m, c.depth, c.breadth));
  return r;
}

inline Report run_suite(const std::string& name, const Command& c) {
  const bool tree_level = name == "height-tree" || name == "norm" || name == "morphism" || name == "level-norm";
  if (c.height) {
    const HeightTree t = HeightTree::canonical(*c.height);
    if (classify_kind(*c.height) == HeightKind::Limit) {
      if (name == "height-tree") return verify_height_tree_axioms(t, c.depth, c.breadth);
      if (name == "norm") return verify_norm_axioms(index_norm(t, c.lambda), power(c.lambda, c.levels), c.breadth);
      Report r(name, "not applicable");
      r.fail("skipped: root height " + to_string(*c.height) + " is a limit ordinal, no contracting system exists");
      return r;
    }
    const IfsSystem s = IfsSystem::build_unital(t, c.lambda, c.caps);
    if (tree_level) return piece_suite(name, s, c);
    if (name == "ultrametric") return verify_ultrametric(s.metric(), attractor_net(s, c.levels));
    if (name == "lipschitz") return verify_lipschitz(s, c.levels, c.levels);
    if (name == "partition") return verify_partition(s, c.levels);
    if (name == "word-diameters") return word_report(s, c.levels);
    return contraction_report(s.metric(), nets_up_to(s, c.levels), s.lambda());
  }
  if (classify_fractal(*c.space) == FractalVerdict::NotTopologicalFractal) {
    Report r(name, "not applicable");
    r.fail("skipped: " + not_fractal_message(scattered_height(*c.space).height));
    return r;
  }
  const GluedIfs g = build_ifs_general(*c.space, c.lambda, c.caps);
  if (tree_level) {
    Report r(name, "every piece of " + to_string(*c.space));
    for (const auto& p : g.pieces()) r.absorb(piece_suite(name, p.ifs, c));
    return r;
  }
  if (name == "ultrametric") return verify_ultrametric(g.metric(), attractor_net(g, c.levels));
  if (name == "lipschitz") return verify_boundary_lipschitz(g, attractor_net(g, c.levels));
  if (name == "partition") return verify_boundary_partition(g, c.levels);
  if (name == "self-cover") return verify_self_cover(g, c.levels);
  if (name == "word-diameters") return word_report(g, c.levels);
  return contraction_report(g.metric(), nets_up_to(g, c.levels), g.lambda());
}

struct SuiteOutcome {
  Report report;
  std::optional<std::string> cap_error;
};

inline int run_verify(const Command& c, std::ostream& out) {
  std::vector<std::future<SuiteOutcome>> futures;
  for (const std::string& name : c.suites) {
    futures.push_back(std::async(std::launch::async, [&c, name] {
      try {
        Report r = run_suite(name, c);
        r.name = name;
        return SuiteOutcome{std::move(r), std::nullopt};
      } catch (const CapExceeded& e) {
        return SuiteOutcome{Report(name), std::string(e.what())};
      } catch (const LevelCapExceeded& e) {
        return SuiteOutcome{Report(name), std::string(e.what())};
      } catch (const MatchingExhausted& e) {
        return SuiteOutcome{Report(name), std::string(e.what())};
      }
    }));
  }
  std::vector<SuiteOutcome> outcomes;
  for (auto& f : futures) outcomes.push_back(f.get());

  bool all_pass = true;
  bool capped = false;
  for (auto& o : outcomes) {
    if (o.cap_error) {
      capped = true;
      o.report.fail("cap exceeded: " + *o.cap_error);
    }
    all_pass = all_pass && o.report.passed;
  }
  const std::string target = c.height ? "height " + to_string(*c.height) : "space " + to_string(*c.space);
  if (c.format == Format::Json) {
    Json suites = Json::array();
    for (const auto& o : outcomes) suites.push_back(report_json(o.report));
    Json j{{"target", target}, {"lambda", to_string(c.lambda)}, {"levels", c.levels}, {"suites", std::move(suites)},
           {"passed", all_pass}};
    out << j.dump(2) << "\n";
  } else {
    out << "verify " << target << ", lambda " << to_string(c.lambda) << ", levels " << c.levels << "\n";
    out << pad("suite", 16) << pad("result", 8) << pad("checked", 10) << "scope\n";
    for (const auto& o : outcomes) {
      out << pad(o.report.name, 16) << pad(o.report.passed ? "PASS" : "FAIL", 8)
          << pad(std::to_string(o.report.checked), 10) << o.report.scope << "\n";
      for (const auto& f : o.report.failures) out << "    " << f << "\n";
    }
    out << (all_pass ? "all suites passed" : "some suites failed") << "\n";
  }
  if (capped) return 3;
  return all_pass ? 0 : 1;
}

inline int run_iterate(const Command& c, std::ostream& out, std::ostream& err) {
  if (classify_kind(*c.height) == HeightKind::Limit) {
    err << not_fractal_message(*c.height) << "\n";
    return 1;
  }
  const IfsSystem s = IfsSystem::build_unital(*c.height, c.lambda, c.caps);
  const BranchMetric d = s.metric();
  std::vector<std::size_t> chosen;
  if (c.map) {
    if (*c.map >= s.map_count()) throw UsageError("--map must be below " + std::to_string(s.map_count()));
    chosen.push_back(*c.map);
  } else {
    for (std::size_t k = 0; k < s.map_count(); ++k) chosen.push_back(k);
  }
  const PointSet seeds = attractor_net(s, 2);
  bool ok = true;
  Json maps = Json::array();
  std::ostringstream text;
  for (std::size_t k : chosen) {
    const FixedPoint fp = fixed_point(s, k, c.tol);
    const Point fix{0, fp.branch};
    Json runs = Json::array();
    text << "map " << s.map(k).name() << ": fixed point " << to_string(fp.branch)
         << (fp.exact ? " (exact)" : " (within " + to_string(fp.error_bound) + ")") << "\n";
    for (const Point& seed : seeds) {
      std::vector<std::string> dist;
      Point cur = seed;
      const Rational d0 = d(seed, fix);
      text << "  from " << to_string(seed) << ":";
      for (std::size_t step = 0; step <= c.iterations; ++step) {
        const Rational dk = d(cur, fix);
        if (fp.exact && power(s.lambda(), step) * d0 < dk) ok = false;
        dist.push_back(to_string(dk));
        text << " " << dist.back();
        cur = s.apply_map(k, cur);
      }
      text << "\n";
      runs.push_back(Json{{"seed", to_string(seed)}, {"distances", dist}});
    }
    maps.push_back(Json{{"map", s.map(k).name()},
                        {"fixed_point", to_string(fp.branch)},
                        {"exact", fp.exact},
                        {"error_bound", to_string(fp.error_bound)},
                        {"runs", std::move(runs)}});
  }
  if (c.format == Format::Json) {
    out << Json{{"root_height", to_string(*c.height)},
                {"lambda", to_string(s.lambda())},
                {"tol", to_string(c.tol)},
                {"maps", std::move(maps)},
                {"banach_bound_holds", ok}}
               .dump(2)
        << "\n";
  } else {
    out << text.str() << "banach bound d(phi^k x, Fix) <= lambda^k d(x, Fix): " << (ok ? "holds" : "violated")
        << "\n";
  }
  return ok ? 0 : 1;
}

}  // namespace detail

inline int execute(const Command& c, std::ostream& out, std::ostream& err) {
  switch (c.verb) {
    case Verb::Classify: return detail::run_classify(c, out);
    case Verb::Tree: return detail::run_tree(c, out);
    case Verb::Ifs: return detail::run_ifs(c, out, err);
    case Verb::Verify: return detail::run_verify(c, out);
    case Verb::Iterate: return detail::run_iterate(c, out, err);
  }
  return 2;
}

/// Parses and executes, mapping every failure onto the documented exit codes.
inline int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  try {
    return execute(parse_args(argv), out, err);
  } catch (const ParserExit& e) {
    (e.code() == 0 ? out : err) << e.what();
    return e.code();
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const NotSuccessor& e) {
    err << e.what() << "\n";
    return 1;
  } catch (const CapExceeded& e) {
    err << "cap exceeded: " << e.what() << "\n";
    return 3;
  } catch (const LevelCapExceeded& e) {
    err << "cap exceeded: " << e.what() << "\n";
    return 3;
  } catch (const MatchingExhausted& e) {
    err << "cap exceeded: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace ultrafractal::cli
