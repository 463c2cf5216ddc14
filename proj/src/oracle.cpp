#include "baire/oracle.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace baire {

std::string tri_state_name(TriState s) {
  switch (s) {
    case TriState::AllIn: return "all-in";
    case TriState::AllOut: return "all-out";
    case TriState::Undetermined: return "undetermined";
  }
  return "?";
}

std::string witness_outcome_name(WitnessOutcome o) {
  switch (o) {
    case WitnessOutcome::DisjointWitness: return "disjoint-witness";
    case WitnessOutcome::InsideWitness: return "inside-witness";
    case WitnessOutcome::Exhausted: return "exhausted";
  }
  return "?";
}

struct PrefixSet::Expr {
  enum class Op { Empty, Full, Basic, Union, Inter, Complement };
  Op op;
  Node node;  // Basic only
  std::vector<std::shared_ptr<const Expr>> kids;
};

namespace {

using Expr = PrefixSet::Expr;
using Op = Expr::Op;

TriState decide_expr(const Expr& e, const Node& t) {
  switch (e.op) {
    case Op::Empty: return TriState::AllOut;
    case Op::Full: return TriState::AllIn;
    case Op::Basic:
      if (e.node.prefix_of(t)) return TriState::AllIn;
      if (t.prefix_of(e.node)) return TriState::Undetermined;
      return TriState::AllOut;
    case Op::Union: {
      TriState acc = TriState::AllOut;
      for (const auto& k : e.kids) {
        TriState s = decide_expr(*k, t);
        if (s == TriState::AllIn) return TriState::AllIn;
        if (s == TriState::Undetermined) acc = TriState::Undetermined;
      }
      return acc;
    }
    case Op::Inter: {
      TriState acc = TriState::AllIn;
      for (const auto& k : e.kids) {
        TriState s = decide_expr(*k, t);
        if (s == TriState::AllOut) return TriState::AllOut;
        if (s == TriState::Undetermined) acc = TriState::Undetermined;
      }
      return acc;
    }
    case Op::Complement: {
      TriState s = decide_expr(*e.kids[0], t);
      if (s == TriState::AllIn) return TriState::AllOut;
      if (s == TriState::AllOut) return TriState::AllIn;
      return TriState::Undetermined;
    }
  }
  return TriState::Undetermined;
}

std::size_t depth_expr(const Expr& e) {
  switch (e.op) {
    case Op::Empty:
    case Op::Full: return 0;
    case Op::Basic: return e.node.size();
    case Op::Complement: return depth_expr(*e.kids[0]);
    case Op::Union:
    case Op::Inter: {
      std::size_t d = 0;
      for (const auto& k : e.kids) d = std::max(d, depth_expr(*k));
      return d;
    }
  }
  return 0;
}

TriState flip(TriState s) {
  if (s == TriState::AllIn) return TriState::AllOut;
  if (s == TriState::AllOut) return TriState::AllIn;
  return s;
}

PrefixSet::ChildProfile profile_expr(const Expr& e, const Node& t) {
  using Profile = PrefixSet::ChildProfile;
  switch (e.op) {
    case Op::Empty: return Profile{{}, TriState::AllOut};
    case Op::Full: return Profile{{}, TriState::AllIn};
    case Op::Basic:
      if (e.node.prefix_of(t)) return Profile{{}, TriState::AllIn};
      if (t.prefix_of(e.node)) return Profile{{e.node[t.size()]}, TriState::AllOut};
      return Profile{{}, TriState::AllOut};
    case Op::Complement: {
      Profile p = profile_expr(*e.kids[0], t);
      p.default_verdict = flip(p.default_verdict);
      return p;
    }
    case Op::Union:
    case Op::Inter: {
      Profile out{{}, e.op == Op::Union ? TriState::AllOut : TriState::AllIn};
      for (const auto& k : e.kids) {
        Profile p = profile_expr(*k, t);
        out.special.insert(out.special.end(), p.special.begin(), p.special.end());
        if (e.op == Op::Union) {
          if (p.default_verdict == TriState::AllIn)
            out.default_verdict = TriState::AllIn;
          else if (p.default_verdict == TriState::Undetermined &&
                   out.default_verdict == TriState::AllOut)
            out.default_verdict = TriState::Undetermined;
        } else {
          if (p.default_verdict == TriState::AllOut)
            out.default_verdict = TriState::AllOut;
          else if (p.default_verdict == TriState::Undetermined &&
                   out.default_verdict == TriState::AllIn)
            out.default_verdict = TriState::Undetermined;
        }
      }
      std::sort(out.special.begin(), out.special.end());
      out.special.erase(std::unique(out.special.begin(), out.special.end()), out.special.end());
      return out;
    }
  }
  return Profile{{}, TriState::Undetermined};
}

nlohmann::json describe_expr(const Expr& e) {
  switch (e.op) {
    case Op::Empty: return {{"set", "empty"}};
    case Op::Full: return {{"set", "full"}};
    case Op::Basic: return {{"set", "basic"}, {"node", e.node}};
    case Op::Complement: return {{"set", "not"}, {"of", describe_expr(*e.kids[0])}};
    case Op::Union:
    case Op::Inter: {
      nlohmann::json parts = nlohmann::json::array();
      for (const auto& k : e.kids) parts.push_back(describe_expr(*k));
      return {{"set", e.op == Op::Union ? "union" : "inter"}, {"parts", std::move(parts)}};
    }
  }
  return {};
}

std::shared_ptr<const Expr> make_leaf(Op op) {
  auto e = std::make_shared<Expr>();
  e->op = op;
  return e;
}

}  // namespace

PrefixSet PrefixSet::empty_set() { return PrefixSet(make_leaf(Op::Empty)); }
PrefixSet PrefixSet::full_set() { return PrefixSet(make_leaf(Op::Full)); }

PrefixSet PrefixSet::basic(Node t) {
  auto e = std::make_shared<Expr>();
  e->op = Op::Basic;
  e->node = std::move(t);
  return PrefixSet(std::move(e));
}

PrefixSet PrefixSet::cylinder(Value n) { return basic(Node{n}); }

PrefixSet PrefixSet::set_union(std::vector<PrefixSet> parts) {
  auto e = std::make_shared<Expr>();
  e->op = Op::Union;
  for (auto& p : parts) e->kids.push_back(std::move(p.expr_));
  return PrefixSet(std::move(e));
}

PrefixSet PrefixSet::set_intersection(std::vector<PrefixSet> parts) {
  auto e = std::make_shared<Expr>();
  e->op = Op::Inter;
  for (auto& p : parts) e->kids.push_back(std::move(p.expr_));
  return PrefixSet(std::move(e));
}

PrefixSet PrefixSet::complement(PrefixSet inner) {
  auto e = std::make_shared<Expr>();
  e->op = Op::Complement;
  e->kids.push_back(std::move(inner.expr_));
  return PrefixSet(std::move(e));
}

TriState PrefixSet::decide(const Node& t) const { return decide_expr(*expr_, t); }

std::size_t PrefixSet::determination_depth() const { return depth_expr(*expr_); }

PrefixSet::ChildProfile PrefixSet::child_profile(const Node& t) const {
  return profile_expr(*expr_, t);
}

nlohmann::json PrefixSet::describe() const { return describe_expr(*expr_); }

namespace {

[[noreturn]] void parse_fail(const std::string& spec) {
  throw std::invalid_argument("not a prefix-set spec: '" + spec + "'");
}

PrefixSet parse_set(const std::string& s, std::size_t& pos);

std::vector<PrefixSet> parse_args(const std::string& s, std::size_t& pos) {
  if (pos >= s.size() || s[pos] != '(') parse_fail(s);
  ++pos;
  std::vector<PrefixSet> out;
  for (;;) {
    out.push_back(parse_set(s, pos));
    if (pos >= s.size()) parse_fail(s);
    if (s[pos] == ',') {
      ++pos;
      continue;
    }
    if (s[pos] == ')') {
      ++pos;
      return out;
    }
    parse_fail(s);
  }
}

PrefixSet parse_set(const std::string& s, std::size_t& pos) {
  std::size_t start = pos;
  while (pos < s.size() && (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '-'))
    ++pos;
  std::string word = s.substr(start, pos - start);
  if (word == "empty") return PrefixSet::empty_set();
  if (word == "full") return PrefixSet::full_set();
  if (word == "cylinder") {
    if (pos >= s.size() || s[pos] != ':') parse_fail(s);
    ++pos;
    std::size_t used = 0;
    Value n = std::stoull(s.substr(pos), &used);
    if (used == 0) parse_fail(s);
    pos += used;
    return PrefixSet::cylinder(n);
  }
  if (word == "basic") {
    if (pos >= s.size() || s[pos] != ':') parse_fail(s);
    ++pos;
    std::size_t close = s.find(')', pos);
    if (close == std::string::npos) parse_fail(s);
    Node t = parse_node(s.substr(pos, close + 1 - pos));
    pos = close + 1;
    return PrefixSet::basic(std::move(t));
  }
  if (word == "union") return PrefixSet::set_union(parse_args(s, pos));
  if (word == "inter") return PrefixSet::set_intersection(parse_args(s, pos));
  if (word == "not") {
    auto args = parse_args(s, pos);
    if (args.size() != 1) parse_fail(s);
    return PrefixSet::complement(std::move(args[0]));
  }
  parse_fail(s);
}

}  // namespace

PrefixSet PrefixSet::parse(const std::string& spec) {
  std::size_t pos = 0;
  PrefixSet out = parse_set(spec, pos);
  if (pos != spec.size()) parse_fail(spec);
  return out;
}

std::pair<LazyTree, PrefixSet> cylinder(Value n) {
  return {cylinder_tree(n), PrefixSet::cylinder(n)};
}

void to_json(nlohmann::json& j, const WitnessReport& r) {
  j = nlohmann::json{{"outcome", witness_outcome_name(r.outcome)},
                     {"depth", r.depth},
                     {"width", r.width}};
  if (r.subtree) j["subtree"] = *r.subtree;
  if (r.subtree_tree) j["recipe"] = r.subtree_tree->recipe();
}

namespace {

// The base tree with every direction deciding `pruned` removed. Only sound
// when the root itself does not decide `pruned`.
class PrunedModel final : public TreeModel {
 public:
  PrunedModel(LazyTree base, PrefixSet set, TriState pruned, Kind claim)
      : base_(std::move(base)), set_(std::move(set)), pruned_(pruned), claim_(claim) {}

  bool member(const Node& t) const override {
    // Monotone coherence: a pruned verdict at any prefix persists at t.
    return set_.decide(t) != pruned_ && base_.member(t);
  }

  std::vector<Value> successors(const Node& t, std::size_t limit) const override {
    return successors_from(t, 0, limit);
  }

  std::vector<Value> successors_from(const Node& t, Value min_value,
                                     std::size_t limit) const override {
    PrefixSet::ChildProfile p = set_.child_profile(t);
    if (p.default_verdict == pruned_) {
      std::vector<Value> out;
      for (Value v : p.special) {
        if (v < min_value || out.size() >= limit) continue;
        if (set_.decide(t.extended(v)) != pruned_ && base_.member(t.extended(v)))
          out.push_back(v);
      }
      return out;
    }
    std::vector<Value> banned;
    for (Value v : p.special)
      if (set_.decide(t.extended(v)) == pruned_) banned.push_back(v);
    std::vector<Value> out;
    Value cursor = min_value;
    while (out.size() < limit) {
      std::size_t want = limit - out.size() + banned.size();
      std::vector<Value> chunk = base_.successors_from(t, cursor, want);
      for (Value v : chunk) {
        if (out.size() >= limit) break;
        if (!std::binary_search(banned.begin(), banned.end(), v)) out.push_back(v);
      }
      if (chunk.size() < want) break;  // base stream ended: result is exact
      cursor = chunk.back() + 1;
    }
    return out;
  }

  bool claims_infinite_successors(const Node& t) const override {
    return base_.claims_infinite_successors(t) &&
           set_.child_profile(t).default_verdict != pruned_;
  }

  std::optional<std::vector<Value>> cofinite_exclusions(const Node& t) const override {
    PrefixSet::ChildProfile p = set_.child_profile(t);
    if (p.default_verdict == pruned_) return std::nullopt;
    auto base_mask = base_.cofinite_exclusions(t);
    if (!base_mask) return std::nullopt;
    std::vector<Value> mask = *base_mask;
    for (Value v : p.special)
      if (set_.decide(t.extended(v)) == pruned_) mask.push_back(v);
    std::sort(mask.begin(), mask.end());
    mask.erase(std::unique(mask.begin(), mask.end()), mask.end());
    return mask;
  }

  std::optional<Kind> kind_claim() const override { return claim_; }

  nlohmann::json recipe() const override {
    return {{"recipe", "pruned"},
            {"polarity", pruned_ == TriState::AllIn ? "avoid" : "inside"},
            {"base", base_.recipe()},
            {"set", set_.describe()}};
  }

 private:
  LazyTree base_;
  PrefixSet set_;
  TriState pruned_;
  Kind claim_;
};

bool kind_not_refuted(const LazyTree& tree, Kind kind, std::size_t depth, std::size_t width) {
  for (const KindVerdict& v : classify(tree, depth, width))
    if (v.kind == kind) return v.status != VerdictStatus::Refuted;
  return false;
}

// Committed window must be nonempty to full depth with every frontier node
// deciding `target`, and must not refute the requested kind.
std::optional<FiniteTreeApprox> frontier_certified(const LazyTree& q, const PrefixSet& set,
                                                   Kind kind, std::size_t depth,
                                                   std::size_t width, TriState target) {
  FiniteTreeApprox window = truncate(q, depth, width);
  bool reaches = false;
  for (const Node& t : window.nodes()) {
    if (t.size() != depth) continue;
    reaches = true;
    if (set.decide(t) != target) return std::nullopt;
  }
  if (!reaches) return std::nullopt;
  if (!kind_not_refuted(q, kind, depth, width)) return std::nullopt;
  return window;
}

WitnessReport polar_witness(const LazyTree& tree, Kind kind, const PrefixSet& set,
                            std::size_t depth, std::size_t width, TriState target) {
  WitnessReport report;
  report.depth = depth;
  report.width = width;
  report.outcome = WitnessOutcome::Exhausted;
  WitnessOutcome success =
      target == TriState::AllOut ? WitnessOutcome::DisjointWitness : WitnessOutcome::InsideWitness;
  TriState pruned = flip(target);

  if (set.decide(Node{}) != pruned) {
    LazyTree q(std::make_shared<PrunedModel>(tree, set, pruned, kind));
    if (auto window = frontier_certified(q, set, kind, depth, width, target)) {
      report.outcome = success;
      report.subtree = std::move(*window);
      report.subtree_tree = std::move(q);
      return report;
    }
  }

  // Fallback: restrict to the least window node already deciding `target`;
  // by monotonicity its whole subtree decides the same.
  FiniteTreeApprox probe = truncate(tree, depth, width);
  for (const Node& u : probe.nodes()) {
    if (set.decide(u) != target) continue;
    LazyTree q = restrict_to(tree, u);
    if (auto window = frontier_certified(q, set, kind, depth, width, target)) {
      report.outcome = success;
      report.subtree = std::move(*window);
      report.subtree_tree = std::move(q);
      return report;
    }
  }
  return report;
}

void check_kind_consistent(const LazyTree& tree, Kind kind, std::size_t depth,
                           std::size_t width) {
  if (!kind_not_refuted(tree, kind, depth, width))
    throw std::domain_error("input tree refutes kind " + kind_name(kind) + " at the given budget");
}

}  // namespace

WitnessReport avoid_subtree(const LazyTree& tree, Kind kind, const PrefixSet& avoid,
                            std::size_t depth, std::size_t width) {
  check_kind_consistent(tree, kind, depth, width);
  return polar_witness(tree, kind, avoid, depth, width, TriState::AllOut);
}

WitnessReport measurability_witness(const LazyTree& tree, Kind kind, const PrefixSet& set,
                                    std::size_t depth, std::size_t width) {
  check_kind_consistent(tree, kind, depth, width);
  WitnessReport disjoint = polar_witness(tree, kind, set, depth, width, TriState::AllOut);
  if (disjoint.outcome != WitnessOutcome::Exhausted) return disjoint;
  return polar_witness(tree, kind, set, depth, width, TriState::AllIn);
}

SigmaUnionReport sigma_union_check(Value n_pieces, std::size_t depth, std::size_t width) {
  if (n_pieces < 1) throw std::invalid_argument("sigma_union_check needs at least one piece");
  SigmaUnionReport report;
  report.all_witnessed = true;
  report.cover_holds = true;
  for (Value n = 0; n < n_pieces; ++n) {
    SigmaUnionReport::PieceResult piece;
    piece.n = n;
    piece.witness =
        avoid_subtree(full_tree(), Kind::CompleteLaver, PrefixSet::cylinder(n), depth, width);
    report.all_witnessed =
        report.all_witnessed && piece.witness.outcome == WitnessOutcome::DisjointWitness;
    report.pieces.push_back(std::move(piece));
  }
  for (Value k = 0; k < n_pieces; ++k) {
    bool covered = false;
    for (Value n = 0; n < n_pieces && !covered; ++n)
      covered = PrefixSet::cylinder(n).decide(Node{k}) == TriState::AllIn;
    report.level_one_covered.push_back(covered);
    report.cover_holds = report.cover_holds && covered;
  }
  return report;
}

std::vector<BernsteinResult> bernstein_check(const PrefixSet& set,
                                             const std::vector<LazyTree>& trees,
                                             std::size_t depth, std::size_t width) {
  std::vector<BernsteinResult> out;
  for (const LazyTree& tree : trees) {
    BernsteinResult r;
    FiniteTreeApprox window = truncate(tree, depth, width);
    for (const Node& t : window.nodes())
      if (t.size() == depth && set.decide(t) == TriState::AllIn) {
        r.hit = true;
        break;
      }
    // Breadth-first over the full tree, following the first `width` values
    // plus the set's special values; all-out nodes cannot hide an all-in one.
    std::vector<Node> level{Node{}};
    for (std::size_t d = 0; d <= depth && !r.miss && !level.empty(); ++d) {
      std::vector<Node> next;
      for (const Node& u : level) {
        TriState s = set.decide(u);
        if (s == TriState::AllOut) continue;
        if (s == TriState::AllIn && !tree.member(u)) {
          r.miss = true;
          break;
        }
        if (d == depth) continue;
        std::vector<Value> vs;
        for (Value v = 0; v < width; ++v) vs.push_back(v);
        for (Value v : set.child_profile(u).special) vs.push_back(v);
        std::sort(vs.begin(), vs.end());
        vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
        for (Value v : vs) next.push_back(u.extended(v));
      }
      level = std::move(next);
    }
    out.push_back(r);
  }
  return out;
}

}  // namespace baire
