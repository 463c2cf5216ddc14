#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "baire/ed_family.hpp"
#include "baire/embed.hpp"
#include "baire/errors.hpp"
#include "baire/fusion.hpp"
#include "baire/interval.hpp"
#include "baire/oracle.hpp"
#include "baire/suite.hpp"
#include "baire/tree.hpp"

namespace {

using namespace baire;

bool g_decimal = false;
bool g_json = false;

std::string fmt(const Rational& q) {
  std::string out = rational_str(q);
  if (g_decimal) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", mpq_get_d(q.get_mpq_t()));
    out += " (approx ";
    out += buf;
    out += ")";
  }
  return out;
}

void emit(const nlohmann::json& j) { std::cout << j.dump(2) << "\n"; }

RationalInterval parse_interval(const std::string& s) {
  std::size_t cut = s.find(':');
  if (cut == std::string::npos)
    throw std::invalid_argument("interval must look like lo:hi, got '" + s + "'");
  return RationalInterval(parse_rational(s.substr(0, cut)), parse_rational(s.substr(cut + 1)));
}

FunctionPrefix parse_selector(const std::string& s) {
  Node n = parse_node(s);
  return prefix_of_values(n.entries());
}

int run_classify(const std::string& tree_spec, std::size_t depth, std::size_t width) {
  LazyTree tree = tree_from_spec(tree_spec);
  std::vector<KindVerdict> verdicts = classify(tree, depth, width);
  if (g_json) {
    nlohmann::json rows = nlohmann::json::array();
    for (const KindVerdict& v : verdicts) {
      nlohmann::json row = {{"kind", kind_name(v.kind)},
                            {"status", verdict_status_name(v.status)}};
      if (v.witness) row["witness"] = *v.witness;
      rows.push_back(row);
    }
    emit({{"tree", tree_spec}, {"depth", depth}, {"width", width}, {"verdicts", rows}});
  } else {
    for (const KindVerdict& v : verdicts) {
      std::cout << kind_name(v.kind) << ": " << verdict_status_name(v.status);
      if (v.witness) std::cout << " at " << v.witness->to_string();
      std::cout << "\n";
    }
  }
  return 0;
}

std::vector<RationalInterval> quarter_intervals(int stages) {
  std::vector<RationalInterval> out;
  for (int k = 1; k <= stages; ++k) {
    Rational half = pow2_neg(2 * k + 1);  // measure 4^-k
    Rational c = dyadic_rational(k);
    out.emplace_back(c - half, c + half);
  }
  return out;
}

int run_fuse(const std::string& tree_spec, const std::string& mode_name, int stages,
             bool lock_stem) {
  if (stages < 1) throw std::invalid_argument("stages must be positive");
  LazyTree tree = tree_from_spec(tree_spec);
  FusionMode mode = mode_name == "laver" ? FusionMode::Laver : FusionMode::Miller;
  if (mode_name != "laver" && mode_name != "miller")
    throw std::invalid_argument("mode must be miller or laver");

  std::vector<RationalInterval> iv = quarter_intervals(stages);
  FusionState st = fusion_init(tree, iv[0], mode, lock_stem);
  std::vector<BoundCertificate> certs;
  certs.push_back(verify_bound(st));
  for (int k = 1; k <= stages; ++k) {
    st = fusion_step(st, iv[k - 1]);
    certs.push_back(verify_bound(st));
  }
  RetentionReport retention = fusion_limit(st.history());

  bool all = true;
  for (const BoundCertificate& c : certs) all = all && c.holds;
  if (g_json) {
    emit({{"tree", tree_spec},
          {"mode", fusion_mode_name(mode)},
          {"certificates", certs},
          {"grid_nodes_checked", retention.checked},
          {"all_hold", all}});
  } else {
    std::cout << "stage  lhs < rhs  holds\n";
    for (const BoundCertificate& c : certs)
      std::cout << c.stage << "  " << fmt(c.lhs) << " < " << fmt(c.rhs) << "  "
                << (c.holds ? "yes" : "NO") << "\n";
    std::cout << "retention: " << retention.checked << " grid nodes checked, none lost\n";
  }
  return all ? 0 : 1;
}

int run_gdelta(const std::string& tree_spec, const std::string& mode_name, int stages,
               bool decompose, std::size_t pieces) {
  LazyTree tree = tree_from_spec(tree_spec);
  FusionMode mode = mode_name == "laver" ? FusionMode::Laver : FusionMode::Miller;
  if (mode_name != "laver" && mode_name != "miller")
    throw std::invalid_argument("mode must be miller or laver");
  GdeltaRun run = gdelta_construction(tree, mode, stages, decompose, pieces);
  if (g_json) {
    emit(run);
  } else {
    for (const GdeltaPiece& p : run.pieces) {
      std::cout << "[" << p.label << "]\n";
      std::cout << "stage  lhs  rhs  holds  target(2^-n)  below-target\n";
      for (const GdeltaStageRow& r : p.rows)
        std::cout << r.stage << "  " << fmt(r.lhs) << "  " << fmt(r.rhs_closed_form) << "  "
                  << (r.holds ? "yes" : "NO") << "  " << fmt(r.target) << "  "
                  << (r.target_holds ? "yes" : "no") << "\n";
      std::cout << "tail sums:\n";
      for (const GdeltaTailRow& t : p.tails)
        std::cout << "  n=" << t.n << "  " << fmt(t.tail_sum) << " <= " << fmt(t.bound) << "  "
                  << (t.holds ? "yes" : "NO") << "\n";
    }
    std::cout << (run.all_hold ? "all bounds hold\n" : "SOME BOUND FAILED\n");
  }
  return run.all_hold ? 0 : 1;
}

int run_adtree(std::size_t depth, std::size_t width, const std::vector<std::string>& selectors) {
  AdTree tree;
  nlohmann::json out;
  out["window"] = truncate(tree.as_lazy_tree(), depth, width);
  if (!selectors.empty()) {
    nlohmann::json branches = nlohmann::json::array();
    std::vector<FunctionPrefix> bs;
    for (const std::string& s : selectors) {
      FunctionPrefix d = parse_selector(s);
      bs.push_back(tree.branch(d));
      branches.push_back({{"selector", s}, {"branch", prefix_to_json(bs.back())}});
    }
    out["branches"] = branches;
    if (bs.size() >= 2) {
      nlohmann::json matrix = nlohmann::json::array();
      for (std::size_t i = 0; i < bs.size(); ++i)
        for (std::size_t j = i + 1; j < bs.size(); ++j) {
          EdStatus ed = ed_status(bs[i], bs[j]);
          nlohmann::json row = {{"i", i}, {"j", j}, {"agreements", ed.agreements}};
          if (ed.last_agreement) row["last_agreement"] = *ed.last_agreement;
          matrix.push_back(row);
        }
      out["ed_matrix"] = matrix;
    }
  }
  emit(out);
  return 0;
}

int run_embed(const std::string& selector) {
  AdTree tree;
  FunctionPrefix d = parse_selector(selector);
  FunctionPrefix f = embed(tree, d);
  bool dominates = true;
  for (std::size_t i = 0; i < d.size(); ++i) dominates = dominates && f[i] >= d[i];
  if (g_json) {
    emit({{"selector", prefix_to_json(d)},
          {"image", prefix_to_json(f)},
          {"dominates", dominates}});
  } else {
    std::cout << "image: " << prefix_to_json(f).dump() << "\n";
    std::cout << "dominates: " << (dominates ? "yes" : "NO") << "\n";
  }
  return dominates ? 0 : 1;
}

int run_oracle_witness(bool inside_too, const std::string& tree_spec,
                       const std::string& kind_name_str, const std::string& set_spec,
                       std::size_t depth, std::size_t width) {
  LazyTree tree = tree_from_spec(tree_spec);
  auto kind = kind_from_name(kind_name_str);
  if (!kind) throw std::invalid_argument("unknown kind '" + kind_name_str + "'");
  PrefixSet set = PrefixSet::parse(set_spec);
  WitnessReport rep = inside_too ? measurability_witness(tree, *kind, set, depth, width)
                                 : avoid_subtree(tree, *kind, set, depth, width);
  emit(rep);
  return rep.outcome == WitnessOutcome::Exhausted ? 1 : 0;
}

int run_oracle_sigma(Value pieces, std::size_t depth, std::size_t width) {
  SigmaUnionReport rep = sigma_union_check(pieces, depth, width);
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& p : rep.pieces)
    rows.push_back({{"n", p.n}, {"outcome", witness_outcome_name(p.witness.outcome)}});
  emit({{"pieces", rows},
        {"level_one_covered", rep.level_one_covered},
        {"all_witnessed", rep.all_witnessed},
        {"cover_holds", rep.cover_holds}});
  return rep.all_witnessed && rep.cover_holds ? 0 : 1;
}

int run_oracle_bernstein(const std::string& set_spec, const std::vector<std::string>& tree_specs,
                         std::size_t depth, std::size_t width) {
  PrefixSet set = PrefixSet::parse(set_spec);
  std::vector<LazyTree> trees;
  for (const std::string& s : tree_specs) trees.push_back(tree_from_spec(s));
  std::vector<BernsteinResult> rows = bernstein_check(set, trees, depth, width);
  nlohmann::json out = nlohmann::json::array();
  bool all = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.push_back({{"tree", tree_specs[i]}, {"hit", rows[i].hit}, {"miss", rows[i].miss}});
    all = all && rows[i].hit && rows[i].miss;
  }
  emit({{"set", set_spec}, {"results", out}, {"all", all}});
  return all ? 0 : 1;
}

int run_sumset(const std::vector<std::string>& part_specs, const std::string& add_spec) {
  std::vector<RationalInterval> parts;
  for (const std::string& s : part_specs) parts.push_back(parse_interval(s));
  IntervalUnion u = normalize(parts);
  nlohmann::json out = {{"union", u}, {"measure", rational_str(u.measure())}};
  if (!add_spec.empty()) {
    RationalInterval add = parse_interval(add_spec);
    IntervalUnion s = minkowski_sum(u, add);
    out["sum"] = s;
    out["sum_measure"] = rational_str(s.measure());
  }
  if (g_json) {
    emit(out);
  } else {
    std::cout << "measure: " << fmt(u.measure()) << "\n";
    if (!add_spec.empty()) std::cout << "sum measure: " << fmt(parse_rational(out["sum_measure"].get<std::string>())) << "\n";
  }
  return 0;
}

int run_suite_cmd(std::uint64_t seed, std::size_t trials) {
  SuiteReport rep = run_suite(seed, trials);
  emit(rep);
  return rep.all_ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"trees on Baire space: fusion certificates, embeddings, and ideal oracles"};
  app.require_subcommand(1);
  app.add_flag("--decimal", g_decimal, "append 6-digit decimal approximations (marked approximate)");
  app.add_flag("--json", g_json, "emit JSON instead of text");

  std::string tree_spec = "full";
  std::size_t depth = 4, width = 4;
  auto* classify_cmd = app.add_subcommand("classify", "kind verdicts on a depth/width window");
  classify_cmd->add_option("--tree", tree_spec, "tree recipe");
  classify_cmd->add_option("--depth", depth, "window depth")->check(CLI::PositiveNumber);
  classify_cmd->add_option("--width", width, "window width")->check(CLI::PositiveNumber);

  std::string mode = "miller";
  int stages = 4;
  bool lock_stem = false;
  auto* fuse_cmd = app.add_subcommand("fuse", "run a fusion and print its certificates");
  fuse_cmd->add_option("--tree", tree_spec, "tree recipe");
  fuse_cmd->add_option("--mode", mode, "miller or laver");
  fuse_cmd->add_option("--stages", stages, "number of fusion steps")->check(CLI::PositiveNumber);
  fuse_cmd->add_flag("--lock-stem", lock_stem, "preserve the stem (laver mode)");

  bool decompose = false;
  std::size_t pieces = 4;
  auto* gdelta_cmd = app.add_subcommand("gdelta", "dense-cover construction with tail certificates");
  gdelta_cmd->add_option("--tree", tree_spec, "tree recipe");
  gdelta_cmd->add_option("--mode", mode, "miller or laver");
  gdelta_cmd->add_option("--stages", stages, "stage count (>= 3)")->check(CLI::PositiveNumber);
  gdelta_cmd->add_flag("--decompose", decompose, "split a stem-() tree into pieces first");
  gdelta_cmd->add_option("--pieces", pieces, "piece count for --decompose")->check(CLI::PositiveNumber);

  std::vector<std::string> selectors;
  auto* adtree_cmd = app.add_subcommand("adtree", "windows and branch comparisons of the a.d. tree");
  adtree_cmd->add_option("--depth", depth, "window depth")->check(CLI::PositiveNumber);
  adtree_cmd->add_option("--width", width, "window width")->check(CLI::PositiveNumber);
  adtree_cmd->add_option("--selector", selectors, "branch selector like (0,1,2); repeatable");

  std::string selector = "()";
  auto* embed_cmd = app.add_subcommand("embed", "dominating image of a selector");
  embed_cmd->add_option("--selector", selector, "selector like (0,1,2)")->required();

  auto* oracle_cmd = app.add_subcommand("oracle", "membership witnesses for prefix sets");
  oracle_cmd->require_subcommand(1);
  std::string kind_str = "miller", set_spec = "cylinder:0";
  std::size_t odepth = 5, owidth = 5;
  auto* avoid_cmd = oracle_cmd->add_subcommand("avoid", "kind-preserving avoidance witness");
  avoid_cmd->add_option("--tree", tree_spec, "tree recipe");
  avoid_cmd->add_option("--kind", kind_str, "tree kind to preserve");
  avoid_cmd->add_option("--set", set_spec, "prefix set spec");
  avoid_cmd->add_option("--depth", odepth, "window depth")->check(CLI::PositiveNumber);
  avoid_cmd->add_option("--width", owidth, "window width")->check(CLI::PositiveNumber);
  auto* measure_cmd = oracle_cmd->add_subcommand("measure", "disjoint-or-inside witness");
  measure_cmd->add_option("--tree", tree_spec, "tree recipe");
  measure_cmd->add_option("--kind", kind_str, "tree kind to preserve");
  measure_cmd->add_option("--set", set_spec, "prefix set spec");
  measure_cmd->add_option("--depth", odepth, "window depth")->check(CLI::PositiveNumber);
  measure_cmd->add_option("--width", owidth, "window width")->check(CLI::PositiveNumber);
  Value sigma_pieces = 8;
  auto* sigma_cmd = oracle_cmd->add_subcommand("sigma", "per-piece avoidance plus level-1 cover");
  sigma_cmd->add_option("--pieces", sigma_pieces, "cylinder count")->check(CLI::PositiveNumber);
  sigma_cmd->add_option("--depth", odepth, "window depth")->check(CLI::PositiveNumber);
  sigma_cmd->add_option("--width", owidth, "window width")->check(CLI::PositiveNumber);
  std::vector<std::string> bern_trees;
  auto* bern_cmd = oracle_cmd->add_subcommand("bernstein", "hit-and-miss evidence per tree");
  bern_cmd->add_option("--set", set_spec, "prefix set spec");
  bern_cmd->add_option("--tree", bern_trees, "tree recipe; repeatable")->required();
  bern_cmd->add_option("--depth", odepth, "window depth")->check(CLI::PositiveNumber);
  bern_cmd->add_option("--width", owidth, "window width")->check(CLI::PositiveNumber);

  std::vector<std::string> parts;
  std::string add_spec;
  auto* sumset_cmd = app.add_subcommand("sumset", "exact interval-union measure and sums");
  sumset_cmd->add_option("--part", parts, "interval lo:hi; repeatable")->required();
  sumset_cmd->add_option("--add", add_spec, "interval lo:hi to spread by");

  std::uint64_t seed = 42;
  std::size_t trials = 100;
  auto* suite_cmd = app.add_subcommand("suite", "randomized property checks, deterministic by seed");
  suite_cmd->add_option("--seed", seed, "stream seed");
  suite_cmd->add_option("--trials", trials, "trials per property")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (classify_cmd->parsed()) return run_classify(tree_spec, depth, width);
    if (fuse_cmd->parsed()) return run_fuse(tree_spec, mode, stages, lock_stem);
    if (gdelta_cmd->parsed()) return run_gdelta(tree_spec, mode, stages, decompose, pieces);
    if (adtree_cmd->parsed()) return run_adtree(depth, width, selectors);
    if (embed_cmd->parsed()) return run_embed(selector);
    if (oracle_cmd->parsed()) {
      if (avoid_cmd->parsed())
        return run_oracle_witness(false, tree_spec, kind_str, set_spec, odepth, owidth);
      if (measure_cmd->parsed())
        return run_oracle_witness(true, tree_spec, kind_str, set_spec, odepth, owidth);
      if (sigma_cmd->parsed()) return run_oracle_sigma(sigma_pieces, odepth, owidth);
      if (bern_cmd->parsed()) return run_oracle_bernstein(set_spec, bern_trees, odepth, owidth);
    }
    if (sumset_cmd->parsed()) return run_sumset(parts, add_spec);
    if (suite_cmd->parsed()) return run_suite_cmd(seed, trials);
  } catch (const baire::InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
