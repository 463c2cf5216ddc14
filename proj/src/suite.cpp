#include "baire/suite.hpp"

#include <algorithm>
#include <exception>

#include "baire/ed_family.hpp"
#include "baire/embed.hpp"
#include "baire/fusion.hpp"
#include "baire/interval.hpp"
#include "baire/oracle.hpp"
#include "baire/prng.hpp"
#include "baire/tree.hpp"

namespace baire {

bool SuiteReport::all_ok() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const SuiteCheck& c) { return c.ok(); });
}

void to_json(nlohmann::json& j, const SuiteReport& r) {
  nlohmann::json checks = nlohmann::json::array();
  for (const SuiteCheck& c : r.checks)
    checks.push_back({{"module", c.module},
                      {"name", c.name},
                      {"trials", c.trials},
                      {"failures", c.failures},
                      {"ok", c.ok()}});
  j = {{"seed", r.seed}, {"checks", checks}, {"all_ok", r.all_ok()}};
}

namespace {

Node random_node(Prng& rng, std::size_t max_len, Value max_entry) {
  Node t;
  std::size_t len = rng.below(max_len + 1);
  for (std::size_t i = 0; i < len; ++i) t.push_back(rng.below(max_entry + 1));
  return t;
}

LazyTree random_tree(Prng& rng) {
  switch (rng.below(5)) {
    case 0:
      return full_tree();
    case 1:
      return cylinder_tree(rng.below(6));
    case 2:
      return bounded_tree(2 + rng.below(4));
    case 3:
      return residue_embed(full_tree(), 1 + rng.below(3));
    default:
      return restrict_to(full_tree(), random_node(rng, 2, 4));
  }
}

Rational random_rational(Prng& rng, std::uint64_t max_den) {
  std::uint64_t den = 2 + rng.below(max_den - 1);
  std::uint64_t num = 1 + rng.below(den - 1);
  Rational q(num, den);
  q.canonicalize();
  return q;
}

RationalInterval random_interval(Prng& rng) {
  Rational a = random_rational(rng, 64), b = random_rational(rng, 64);
  while (a == b) b = random_rational(rng, 64);
  return a < b ? RationalInterval(a, b) : RationalInterval(b, a);
}

BigInt rational_floor(const Rational& q) {
  BigInt out;
  mpz_fdiv_q(out.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return out;
}

// Number of 1/cells grid cells meeting any raw part, as a rational measure.
Rational grid_estimate(const std::vector<RationalInterval>& raw, std::uint64_t cells) {
  std::vector<bool> hit(cells, false);
  for (const RationalInterval& p : raw) {
    BigInt first = rational_floor(p.lo * Rational(cells));
    BigInt last = -rational_floor(-(p.hi * Rational(cells)));  // ceil
    long f = std::max(0L, first.get_si());
    long l = std::min<long>(static_cast<long>(cells), last.get_si());
    for (long i = f; i < l; ++i) hit[static_cast<std::size_t>(i)] = true;
  }
  std::uint64_t count = 0;
  for (bool b : hit) count += b ? 1 : 0;
  Rational q(count, cells);
  q.canonicalize();
  return q;
}

std::string random_set_spec(Prng& rng, int depth) {
  switch (rng.below(depth > 0 ? 6 : 4)) {
    case 0:
      return "empty";
    case 1:
      return "full";
    case 2:
      return "cylinder:" + std::to_string(rng.below(4));
    case 3:
      return "basic:" + random_node(rng, 3, 4).to_string();
    case 4:
      return "not(" + random_set_spec(rng, depth - 1) + ")";
    default: {
      std::string op = rng.below(2) ? "union" : "inter";
      return op + "(" + random_set_spec(rng, depth - 1) + "," +
             random_set_spec(rng, depth - 1) + ")";
    }
  }
}

bool check_window(Prng& rng) {
  LazyTree tree = random_tree(rng);
  std::size_t d = 1 + rng.below(3), w = 1 + rng.below(3);
  FiniteTreeApprox a = truncate(tree, d, w);
  const auto& ns = a.nodes();
  if (!std::is_sorted(ns.begin(), ns.end(), node_less)) return false;
  for (const Node& t : ns) {
    if (!a.contains(t)) return false;
    if (!t.empty() && !a.contains(t.prefix(t.size() - 1))) return false;
    if (t.size() > d) return false;
    if (!tree.member(t)) return false;
  }
  return a.depth() == d && a.width() == w;
}

bool check_streams(Prng& rng) {
  LazyTree tree = random_tree(rng);
  FiniteTreeApprox a = truncate(tree, 3, 3);
  if (a.nodes().empty()) return false;
  const Node& t = a.nodes()[rng.below(a.nodes().size())];
  std::vector<Value> small = tree.successors(t, 3);
  std::vector<Value> big = tree.successors(t, 6);
  if (small.size() > big.size()) return false;
  for (std::size_t i = 0; i < small.size(); ++i)
    if (small[i] != big[i]) return false;
  if (small.size() < 3 && big.size() > small.size()) return false;
  for (std::size_t i = 1; i < big.size(); ++i)
    if (big[i - 1] >= big[i]) return false;
  Value min = rng.below(9);
  for (Value v : tree.successors_from(t, min, 4)) {
    if (v < min) return false;
    std::vector<Value> probe = tree.successors_from(t, v, 1);
    if (probe.size() != 1 || probe[0] != v) return false;
  }
  return true;
}

bool check_restrict(Prng& rng) {
  LazyTree tree = rng.below(2) ? full_tree() : bounded_tree(3 + rng.below(3));
  FiniteTreeApprox a = truncate(tree, 2, 3);
  const Node& pivot = a.nodes()[rng.below(a.nodes().size())];
  LazyTree r = restrict_to(tree, pivot);
  FiniteTreeApprox b = truncate(r, pivot.size() + 1, 3);
  for (const Node& t : b.nodes()) {
    if (!t.comparable_with(pivot)) return false;
    if (!tree.member(t)) return false;
  }
  return r.member(pivot);
}

bool check_normalize(Prng& rng) {
  std::vector<RationalInterval> raw;
  std::size_t n = 1 + rng.below(4);
  Rational raw_sum = 0;
  for (std::size_t i = 0; i < n; ++i) {
    raw.push_back(random_interval(rng));
    raw_sum += raw.back().measure();
  }
  IntervalUnion u = normalize(raw);
  Rational sum = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const RationalInterval& p = u.parts()[i];
    if (!(p.lo < p.hi)) return false;
    if (i && !(u.parts()[i - 1].hi < p.lo)) return false;
    sum += p.measure();
  }
  if (sum != u.measure()) return false;
  if (u.measure() > raw_sum) return false;
  IntervalUnion again = normalize(u.parts());
  if (again.size() != u.size() || again.measure() != u.measure()) return false;
  return true;
}

bool check_grid_measure(Prng& rng) {
  std::vector<RationalInterval> raw;
  std::size_t n = 1 + rng.below(4);
  for (std::size_t i = 0; i < n; ++i) raw.push_back(random_interval(rng));
  IntervalUnion u = normalize(raw);
  Rational est = grid_estimate(raw, 4096);
  Rational tol(2 * n, 4096);
  tol.canonicalize();
  return est >= u.measure() && est - u.measure() <= tol;
}

bool check_sum_additive(Prng& rng) {
  RationalInterval a = random_interval(rng), b = random_interval(rng);
  IntervalUnion u = normalize({a});
  IntervalUnion s = minkowski_sum(u, b);
  return s.size() == 1 && s.measure() == a.measure() + b.measure();
}

bool check_scheme(Prng& rng) {
  Node t = random_node(rng, 4, 8);
  Value k = rng.below(9);
  RationalInterval c = clopen(t);
  RationalInterval child = clopen_child(c, k);
  if (!(clopen(t.extended(k)).lo == child.lo && clopen(t.extended(k)).hi == child.hi))
    return false;
  if (!(c.lo < child.lo && child.hi < c.hi)) return false;
  RationalInterval sib = clopen_child(c, k + 1);
  if (!(sib.hi <= child.lo || child.hi <= sib.lo)) return false;
  Rational bound = random_rational(rng, 64);
  Value th = accumulation_threshold(c, bound);
  Rational L = c.measure();
  if (L * pow2_neg(th) > bound) return false;
  if (th > 0 && L * pow2_neg(th - 1) <= bound) return false;
  return true;
}

bool check_partition(Prng& rng) {
  Partition part = make_partition();
  BigNat n(static_cast<unsigned long>(rng.next() >> 16));
  std::uint64_t m = part.block_of(n);
  BigNat i = part.index_in_block(n);
  if (part.enumerate(m, i) != n) return false;
  if (part.enumerate(m, i + 1) <= n) return false;
  if (part.enumerate(m, i) < i) return false;
  std::uint64_t mm = rng.below(40);
  BigNat ii(static_cast<unsigned long>(rng.below(1000)));
  BigNat v = part.enumerate(mm, ii);
  return part.block_of(v) == mm && part.index_in_block(v) == ii;
}

bool check_branches(Prng& rng) {
  AdTree tree;
  std::size_t len = 2 + rng.below(7);
  std::size_t p = rng.below(len);
  std::vector<Value> s1, s2;
  for (std::size_t j = 0; j < len; ++j) s1.push_back(rng.below(7));
  s2 = s1;
  s2[p] = s1[p] == 6 ? 0 : s1[p] + 1;
  for (std::size_t j = p + 1; j < len; ++j) s2[j] = rng.below(7);
  FunctionPrefix d1 = prefix_of_values(s1), d2 = prefix_of_values(s2);
  FunctionPrefix b1 = tree.branch(d1), b2 = tree.branch(d2);
  EdStatus ed = ed_status(b1, b2);
  if (ed.agreements != p) return false;
  if (p == 0 ? ed.last_agreement.has_value() : ed.last_agreement != p - 1) return false;
  for (std::size_t j = 0; j < len; ++j)
    if (b1[j] < d1[j]) return false;
  FunctionPrefix sc = scale4(b1);
  for (std::size_t j = 0; j < len; ++j)
    if (sc[j] != 4 * b1[j]) return false;
  return embed(tree, d1) == b1;
}

bool check_decide(Prng& rng) {
  PrefixSet s = PrefixSet::parse(random_set_spec(rng, 2));
  Node t = random_node(rng, 4, 4);
  TriState v = s.decide(t);
  if (v != TriState::Undetermined) {
    Node e = t;
    std::size_t extra = 1 + rng.below(2);
    for (std::size_t i = 0; i < extra; ++i) e.push_back(rng.below(5));
    if (s.decide(e) != v) return false;
  }
  Node deep = random_node(rng, 2, 3);
  while (deep.size() < s.determination_depth()) deep.push_back(rng.below(4));
  if (s.decide(deep) == TriState::Undetermined) return false;
  PrefixSet::ChildProfile cp = s.child_profile(t);
  Value w = (cp.special.empty() ? 0 : cp.special.back() + 1) + rng.below(3);
  if (s.decide(t.extended(w)) != cp.default_verdict) return false;
  return true;
}

bool check_avoidance(Prng& rng) {
  Value n = rng.below(4);
  auto [ctree, cset] = cylinder(n);
  (void)ctree;
  Kind kind = rng.below(2) ? Kind::Miller : Kind::CompleteLaver;
  WitnessReport rep = avoid_subtree(full_tree(), kind, cset, 4, 3);
  if (rep.outcome != WitnessOutcome::DisjointWitness) return false;
  if (!rep.subtree) return false;
  bool some_frontier = false;
  for (const Node& t : rep.subtree->nodes()) {
    if (t.size() < rep.depth) continue;
    some_frontier = true;
    if (cset.decide(t) != TriState::AllOut) return false;
  }
  return some_frontier;
}

bool check_fusion_small(Prng& rng) {
  LazyTree tree = rng.below(2) ? full_tree() : cylinder_tree(rng.below(3));
  FusionMode mode = rng.below(2) ? FusionMode::Miller : FusionMode::Laver;
  std::vector<RationalInterval> iv;
  for (int k = 1; k <= 3; ++k) {
    Rational c(1 + rng.below(6), 8);
    c.canonicalize();
    Rational half = pow2_neg(2 * k + 1);  // measure 4^-k
    iv.emplace_back(c - half, c + half);
  }
  FusionState st = fusion_init(tree, iv[0], mode, false);
  BoundCertificate base = verify_bound(st);
  if (!base.holds) return false;
  for (int k = 1; k <= 3; ++k) {
    st = fusion_step(st, iv[k - 1]);
    if (!verify_bound(st).holds) return false;
    std::size_t expect = 0, pw = 1;
    for (int i = 0; i <= k; ++i) {
      expect += pw;
      pw *= k;
    }
    if (st.grid_size() != expect) return false;
  }
  std::vector<FusionState> hist = st.history();
  std::size_t total = 0;
  for (const FusionState& h : hist) total += h.grid_size();
  RetentionReport rep = fusion_limit(hist);
  return rep.checked == total;
}

}  // namespace

SuiteReport run_suite(std::uint64_t seed, std::size_t trials) {
  SuiteReport rep;
  rep.seed = seed;
  Prng rng(seed);
  auto add = [&](const char* module, const char* name, bool (*fn)(Prng&)) {
    SuiteCheck c{module, name, trials, 0};
    for (std::size_t i = 0; i < trials; ++i) {
      bool ok = false;
      try {
        ok = fn(rng);
      } catch (const std::exception&) {
        ok = false;
      }
      if (!ok) ++c.failures;
    }
    rep.checks.push_back(std::move(c));
  };

  add("trees", "window-prefix-closed", check_window);
  add("trees", "successor-streams-consistent", check_streams);
  add("trees", "restrict-keeps-comparable", check_restrict);
  add("intervals", "normalize-canonical", check_normalize);
  add("intervals", "grid-measure-agrees", check_grid_measure);
  add("intervals", "interval-sum-additive", check_sum_additive);
  add("embed", "scheme-laws", check_scheme);
  add("families", "partition-blocks", check_partition);
  add("families", "branches-never-rejoin", check_branches);
  add("oracles", "decide-monotone", check_decide);
  add("oracles", "avoidance-witness-sound", check_avoidance);
  add("fusion", "small-run-certified", check_fusion_small);
  return rep;
}

}  // namespace baire
