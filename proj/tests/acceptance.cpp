// End-to-end checks over the whole library, one verdict line per criterion.
// Randomized criteria use fixed seeds; numeric criteria are exact unless a
// tolerance is part of the statement being checked.

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "baire/ed_family.hpp"
#include "baire/embed.hpp"
#include "baire/fusion.hpp"
#include "baire/interval.hpp"
#include "baire/oracle.hpp"
#include "baire/prng.hpp"
#include "baire/suite.hpp"
#include "baire/tree.hpp"

using namespace baire;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

void fail(Outcome& o, const std::string& why) {
  o.ok = false;
  if (o.detail.empty()) o.detail = why;
}

RationalInterval dyadic_interval(int k) {
  Rational half = pow2_neg(2 * k + 1);  // measure 4^-k
  Rational c = dyadic_rational(k);
  return RationalInterval(c - half, c + half);
}

std::vector<FusionState> g_six_stage_history;
std::vector<std::vector<FusionState>> g_dense_histories;

Outcome six_stage_fusion() {
  Outcome o;
  FusionState st = fusion_init(full_tree(), dyadic_interval(1), FusionMode::Miller);
  BoundCertificate base = verify_bound(st);
  if (!base.holds) fail(o, "base certificate fails");
  for (int k = 1; k <= 6; ++k) {
    st = fusion_step(st, dyadic_interval(k));
    BoundCertificate c = verify_bound(st);
    if (!(c.lhs < c.rhs) || !c.holds)
      fail(o, "stage " + std::to_string(k) + ": " + rational_str(c.lhs) +
                  " !< " + rational_str(c.rhs));
  }
  g_six_stage_history = st.history();
  return o;
}

Outcome dense_cover_eight_stages() {
  Outcome o;
  GdeltaRun run = gdelta_construction(full_tree(), FusionMode::Miller, 8);
  const GdeltaPiece& p = run.pieces.at(0);
  for (const GdeltaStageRow& r : p.rows) {
    if (!r.holds)
      fail(o, "stage " + std::to_string(r.stage) + " bound fails");
    if (r.stage >= 3 && !r.target_holds)
      fail(o, "stage " + std::to_string(r.stage) + " misses target " + rational_str(r.target) +
                  " with " + rational_str(r.lhs));
  }
  for (const GdeltaTailRow& t : p.tails)
    if (!t.holds)
      fail(o, "tail from " + std::to_string(t.n) + ": " + rational_str(t.tail_sum) + " > " +
                  rational_str(t.bound));
  if (!run.all_hold) fail(o, "run reports a failed bound");
  g_dense_histories.push_back(p.final_state.history());
  return o;
}

Outcome dense_cover_decomposed() {
  Outcome o;
  GdeltaRun run = gdelta_construction(full_tree(), FusionMode::Laver, 6, true, 4);
  if (run.pieces.size() != 4) {
    fail(o, "expected 4 pieces");
    return o;
  }
  for (std::size_t i = 0; i < run.pieces.size(); ++i) {
    const GdeltaPiece& p = run.pieces[i];
    if (!p.all_hold) fail(o, p.label + " has a failed bound");
    Node root{std::vector<Value>{static_cast<Value>(i)}};
    if (p.final_state.grid_root() != root) fail(o, p.label + " moved its root");
    StemResult sr = stem(p.final_state.tree(), 16);
    if (!sr.stem || *sr.stem != root) fail(o, p.label + " changed its stem");
    g_dense_histories.push_back(p.final_state.history());
  }
  if (!run.all_hold) fail(o, "run reports a failed bound");
  return o;
}

Outcome retention_of_all_runs() {
  Outcome o;
  if (g_six_stage_history.empty() || g_dense_histories.size() != 5) {
    fail(o, "earlier runs missing");
    return o;
  }
  std::vector<const std::vector<FusionState>*> runs{&g_six_stage_history};
  for (const auto& h : g_dense_histories) runs.push_back(&h);
  for (const auto* run : runs) {
    std::size_t expected = 0;
    for (const FusionState& st : *run) expected += st.grid_size();
    RetentionReport rep = fusion_limit(*run);  // throws on any lost or altered node
    if (rep.checked != expected)
      fail(o, "replayed " + std::to_string(rep.checked) + " nodes, expected " +
                  std::to_string(expected));
  }
  return o;
}

FunctionPrefix random_selector(Prng& rng, std::size_t len, std::uint64_t bound) {
  FunctionPrefix out;
  out.reserve(len);
  for (std::size_t i = 0; i < len; ++i) out.emplace_back(rng.below(bound));
  return out;
}

Outcome branch_agreement_is_the_selector_prefix() {
  Outcome o;
  Prng rng(501);
  AdTree tree;
  for (int trial = 0; trial < 1000; ++trial) {
    std::size_t len = 50;
    FunctionPrefix a = random_selector(rng, len, 1000);
    std::size_t split = rng.below(len);
    FunctionPrefix b = a;
    for (std::size_t i = split; i < len; ++i) b[i] = rng.below(1000);
    if (b[split] == a[split]) b[split] = a[split] + 1;
    EdStatus ed = ed_status(tree.branch(a), tree.branch(b));
    if (ed.agreements != split) {
      fail(o, "trial " + std::to_string(trial) + ": " + std::to_string(ed.agreements) +
                  " agreements, selectors share " + std::to_string(split));
      break;
    }
    bool last_ok = split == 0 ? !ed.last_agreement.has_value()
                              : ed.last_agreement && *ed.last_agreement == split - 1;
    if (!last_ok) {
      fail(o, "trial " + std::to_string(trial) + ": wrong last agreement position");
      break;
    }
  }
  return o;
}

Outcome embedding_dominates_and_is_injective() {
  Outcome o;
  Prng rng(502);
  AdTree tree;
  std::map<FunctionPrefix, FunctionPrefix> image_to_selector;
  for (int trial = 0; trial < 1000; ++trial) {
    FunctionPrefix d = random_selector(rng, 30, 1u << 20);
    FunctionPrefix f = embed(tree, d);
    if (f.size() != d.size()) {
      fail(o, "image length mismatch");
      break;
    }
    for (std::size_t j = 0; j < d.size(); ++j)
      if (f[j] < d[j]) {
        fail(o, "trial " + std::to_string(trial) + ": image drops below the selector at " +
                    std::to_string(j));
        break;
      }
    auto [it, fresh] = image_to_selector.emplace(f, d);
    if (!fresh && it->second != d) {
      fail(o, "two selectors share an image");
      break;
    }
    if (!o.ok) break;
  }
  return o;
}

Outcome cross_residue_branches_never_agree() {
  Outcome o;
  Prng rng(503);
  AdTree tree;
  for (int trial = 0; trial < 100; ++trial) {
    Value r1 = static_cast<Value>(rng.in_range(1, 3));
    Value r2 = static_cast<Value>(rng.in_range(1, 2));
    if (r2 >= r1) ++r2;  // distinct residues
    FunctionPrefix b1 = scale4(tree.branch(random_selector(rng, 20, 100)));
    FunctionPrefix b2 = scale4(tree.branch(random_selector(rng, 20, 100)));
    for (auto& v : b1) v += r1;
    for (auto& v : b2) v += r2;
    EdStatus ed = ed_status(b1, b2);
    if (ed.agreements != 0) {
      fail(o, "residues " + std::to_string(r1) + "," + std::to_string(r2) + " agree " +
                  std::to_string(ed.agreements) + " times");
      break;
    }
  }
  return o;
}

Outcome avoidance_and_sigma_union() {
  Outcome o;
  SigmaUnionReport sigma = sigma_union_check(8, 4, 4);
  if (!sigma.all_witnessed) fail(o, "a piece lacks its avoidance witness");
  if (!sigma.cover_holds) fail(o, "the pieces fail to cover level one");

  auto [ctree, cset] = cylinder(0);
  WitnessReport rep = avoid_subtree(full_tree(), Kind::CompleteLaver, cset, 5, 5);
  if (rep.outcome != WitnessOutcome::DisjointWitness || !rep.subtree_tree) {
    fail(o, "no disjoint witness on the full tree");
    return o;
  }
  bool confirmed = false;
  for (const KindVerdict& v : classify(*rep.subtree_tree, 5, 5))
    if (v.kind == Kind::CompleteLaver) confirmed = v.status == VerdictStatus::ConfirmedAtDepth;
  if (!confirmed) fail(o, "witness does not confirm complete-laver at depth 5");
  for (const Node& t : rep.subtree->nodes())
    if (!t.empty() && cset.decide(t) != TriState::AllOut) fail(o, "witness window enters the set");

  WitnessReport inside = avoid_subtree(ctree, Kind::Laver, cset, 5, 5);
  if (inside.outcome != WitnessOutcome::Exhausted)
    fail(o, "avoidance inside the cylinder should exhaust");
  return o;
}

// Independent measure estimate: cell count at resolution 1/4096 over the raw
// parts, each part marking the cells from floor(lo*4096) to ceil(hi*4096)-1.
Rational grid_estimate(const std::vector<RationalInterval>& raw) {
  const long R = 4096;
  std::vector<bool> cell(R, false);
  for (const RationalInterval& iv : raw) {
    Rational lo = iv.lo * R, hi = iv.hi * R;
    BigInt lo_floor, hi_ceil;
    mpz_fdiv_q(lo_floor.get_mpz_t(), lo.get_num_mpz_t(), lo.get_den_mpz_t());
    mpz_cdiv_q(hi_ceil.get_mpz_t(), hi.get_num_mpz_t(), hi.get_den_mpz_t());
    long a = std::max(0L, lo_floor.get_si());
    long b = std::min(R, hi_ceil.get_si());
    for (long i = a; i < b; ++i) cell[i] = true;
  }
  long count = 0;
  for (bool c : cell) count += c;
  return Rational(count) / R;
}

Outcome measures_match_grid_oracle() {
  Outcome o;
  Prng rng(509);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t nparts = 1 + rng.below(5);
    std::vector<RationalInterval> raw;
    for (std::size_t i = 0; i < nparts; ++i) {
      std::uint64_t den = rng.in_range(2, 64);
      std::uint64_t a = rng.below(den);
      std::uint64_t b = rng.in_range(a + 1, den);
      raw.emplace_back(Rational(a) / Rational(den), Rational(b) / Rational(den));
    }
    IntervalUnion u = normalize(raw);
    Rational est = grid_estimate(raw);
    Rational slack = Rational(2 * static_cast<long>(nparts)) / 4096;
    if (est < u.measure() || est - u.measure() > slack) {
      fail(o, "trial " + std::to_string(trial) + ": estimate " + rational_str(est) +
                  " vs measure " + rational_str(u.measure()));
      break;
    }
  }
  for (int trial = 0; trial < 200 && o.ok; ++trial) {
    std::uint64_t d1 = rng.in_range(2, 97), d2 = rng.in_range(2, 97);
    Rational lo1 = Rational(rng.below(d1 * 2)) / Rational(d1);
    Rational lo2 = Rational(rng.below(d2 * 2)) / Rational(d2);
    RationalInterval u(lo1, lo1 + Rational(1 + rng.below(d1)) / Rational(d1));
    RationalInterval v(lo2, lo2 + Rational(1 + rng.below(d2)) / Rational(d2));
    IntervalUnion sum = minkowski_sum(normalize({u}), v);
    if (sum.measure() != u.measure() + v.measure()) {
      fail(o, "sum of single parts is not additive at trial " + std::to_string(trial));
      break;
    }
  }
  return o;
}

Outcome clopen_scheme_laws() {
  Outcome o;
  const Value max_entry = 8;
  const std::size_t max_len = 4;
  std::function<void(const Node&, const RationalInterval&)> walk =
      [&](const Node& t, const RationalInterval& img) {
        if (!o.ok) return;
        RationalInterval direct = clopen(t);
        if (direct.lo != img.lo || direct.hi != img.hi) {
          fail(o, "stepwise image disagrees at " + t.to_string());
          return;
        }
        if (img.measure() > pow2_neg(t.size())) {
          fail(o, "image too wide at " + t.to_string());
          return;
        }
        if (t.size() == max_len) return;
        RationalInterval prev = clopen_child(img, 0);
        for (Value k = 0; k <= max_entry; ++k) {
          RationalInterval child = clopen_child(img, k);
          if (!(img.lo < child.lo && child.hi < img.hi)) {
            fail(o, "child image escapes its parent at " + t.extended(k).to_string());
            return;
          }
          if (k > 0 && !(prev.hi < child.lo)) {
            fail(o, "sibling images collide at " + t.extended(k).to_string());
            return;
          }
          prev = child;
          walk(t.extended(k), child);
        }
      };
  walk(Node{}, RationalInterval(Rational(0), Rational(1)));
  return o;
}

Outcome suite_bytes_are_reproducible() {
  Outcome o;
  SuiteReport first = run_suite(42, 100);
  SuiteReport second = run_suite(42, 100);
  nlohmann::json a = first, b = second;
  if (a.dump() != b.dump()) fail(o, "same seed produced different bytes");
  if (!first.all_ok()) {
    for (const SuiteCheck& c : first.checks)
      if (!c.ok()) fail(o, c.module + "/" + c.name + " fails");
  }
  return o;
}

struct Criterion {
  std::string name;
  std::function<Outcome()> run;
  double budget_seconds = 0;  // 0: untimed
};

}  // namespace

int main() {
  std::vector<Criterion> criteria = {
      {"six-stage fusion bounds on the full tree", six_stage_fusion, 10.0},
      {"eight-stage dense-cover targets and tails", dense_cover_eight_stages, 30.0},
      {"decomposed dense-cover pieces keep stems and bounds", dense_cover_decomposed, 60.0},
      {"grid retention across all recorded runs", retention_of_all_runs, 0},
      {"branch pairs agree exactly on common selector prefixes",
       branch_agreement_is_the_selector_prefix, 0},
      {"dominating embedding is injective and pointwise above",
       embedding_dominates_and_is_injective, 0},
      {"cross-residue branches never agree", cross_residue_branches_never_agree, 0},
      {"avoidance witnesses and the sigma-union cover", avoidance_and_sigma_union, 0},
      {"interval measures match the grid oracle and sums add exactly",
       measures_match_grid_oracle, 0},
      {"clopen scheme laws hold exhaustively to depth 4", clopen_scheme_laws, 0},
      {"property suite emits identical bytes for a fixed seed", suite_bytes_are_reproducible, 0},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (o.ok && c.budget_seconds > 0 && secs > c.budget_seconds) {
      o.ok = false;
      o.detail = "over the " + std::to_string(c.budget_seconds) + "s budget";
    }
    std::printf("%s  %s  (%.2fs)%s%s\n", o.ok ? "PASS" : "FAIL", c.name.c_str(), secs,
                o.detail.empty() ? "" : "  ", o.detail.c_str());
    std::fflush(stdout);
    if (!o.ok) ++failures;
  }
  if (failures) std::printf("%d criterion(s) failed\n", failures);
  return failures ? 1 : 0;
}
