#include "baire/fusion.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

#include "baire/embed.hpp"

namespace baire {

std::string fusion_mode_name(FusionMode m) {
  return m == FusionMode::Miller ? "miller" : "laver";
}

void to_json(nlohmann::json& j, const BoundCertificate& c) {
  j = {{"stage", c.stage},
       {"lhs", rational_str(c.lhs)},
       {"rhs", rational_str(c.rhs)},
       {"holds", c.holds}};
}

namespace detail {

constexpr Value kNoPolicy = std::numeric_limits<Value>::max();

// Rank layout for the words over {0..alpha-1} of length <= len_max, ordered
// by length then lexicographically. rank(()) = 0; the j-th child of the word
// ranked r at length len sits at level_start[len+1] + (r - level_start[len]) *
// radix + j.
struct WordGrid {
  std::size_t alpha = 0;
  std::size_t len_max = 0;
  std::size_t radix = 1;
  std::vector<std::size_t> level_start;

  static WordGrid make(std::size_t alpha, std::size_t len_max) {
    WordGrid g;
    g.alpha = alpha;
    g.len_max = len_max;
    g.radix = alpha == 0 ? 1 : alpha;
    g.level_start.assign(len_max + 2, 0);
    std::size_t count = 1;
    for (std::size_t len = 0; len <= len_max; ++len) {
      g.level_start[len + 1] = g.level_start[len] + count;
      count *= g.radix;
    }
    return g;
  }

  std::size_t words() const { return level_start[len_max + 1]; }

  std::size_t child(std::size_t rank, std::size_t len, std::size_t j) const {
    return level_start[len + 1] + (rank - level_start[len]) * radix + j;
  }
};

// Stage n: the grid holds the words over {0..n-1} of length <= n. value[r]
// is the committed successor value that the word ranked r appends to its
// parent's node (unused at the root); threshold[p] constrains the words of
// the previous grid, whose successor choices beyond the committed children
// must stay at or above it (kNoPolicy = unconstrained).
struct FusionStage {
  explicit FusionStage(LazyTree b) : base(std::move(b)) {}
  FusionStage(const FusionStage&) = default;

  int stage = 0;
  FusionMode mode = FusionMode::Miller;
  bool locked = false;
  LazyTree base;
  Node grid_root;
  RationalInterval input;
  Rational cover_measure;
  RationalInterval root_cover;  // the stage-0 cover, carried along unchanged
  bool claimed = true;
  WordGrid grid;
  WordGrid prior;
  std::vector<Value> value;
  std::vector<Value> threshold;
  std::shared_ptr<const FusionStage> prev;
};

namespace {

// Grid walk position: tracks the rank of the current word and, while the
// word also belongs to the previous grid, its rank there (for the policy).
struct Cursor {
  const FusionStage* s;
  std::size_t rank = 0;
  std::size_t len = 0;
  std::size_t prank = 0;
  bool in_prior = true;

  explicit Cursor(const FusionStage& st) : s(&st) {}

  bool descend_committed(Value v) {
    if (len >= s->grid.len_max) return false;
    std::size_t first = s->grid.child(rank, len, 0);
    for (std::size_t j = 0; j < s->grid.alpha; ++j) {
      if (s->value[first + j] != v) continue;
      if (in_prior && len + 1 <= s->prior.len_max && j < s->prior.alpha) {
        std::size_t pwithin = prank - s->prior.level_start[len];
        prank = s->prior.level_start[len + 1] + pwithin * s->prior.radix + j;
      } else {
        in_prior = false;
      }
      rank = first + j;
      ++len;
      return true;
    }
    return false;
  }

  std::optional<Value> policy() const {
    if (!in_prior) return std::nullopt;
    Value th = s->threshold[prank];
    if (th == kNoPolicy) return std::nullopt;
    return th;
  }

  std::vector<Value> committed_children() const {
    std::vector<Value> out;
    if (len >= s->grid.len_max) return out;
    std::size_t first = s->grid.child(rank, len, 0);
    for (std::size_t j = 0; j < s->grid.alpha; ++j) out.push_back(s->value[first + j]);
    std::sort(out.begin(), out.end());
    return out;
  }
};

class StageTreeModel final : public TreeModel {
 public:
  explicit StageTreeModel(std::shared_ptr<const FusionStage> s) : s_(std::move(s)) {}

  bool member(const Node& t) const override {
    const Node& root = s_->grid_root;
    if (t.size() <= root.size()) return t.prefix_of(root);
    if (!root.prefix_of(t)) return false;
    Cursor c(*s_);
    for (std::size_t i = root.size(); i < t.size(); ++i) {
      if (c.descend_committed(t[i])) continue;
      auto th = c.policy();
      if (th && t[i] < *th) return false;
      return s_->base.member(t);
    }
    return true;
  }

  std::vector<Value> successors(const Node& t, std::size_t limit) const override {
    return successors_from(t, 0, limit);
  }

  std::vector<Value> successors_from(const Node& t, Value min_value,
                                     std::size_t limit) const override {
    const Node& root = s_->grid_root;
    if (t.size() < root.size()) {
      std::vector<Value> out;
      Value v = root[t.size()];
      if (limit >= 1 && v >= min_value) out.push_back(v);
      return out;
    }
    Cursor c(*s_);
    for (std::size_t i = root.size(); i < t.size(); ++i)
      if (!c.descend_committed(t[i]))
        return s_->base.successors_from(t, min_value, limit);
    auto th = c.policy();
    if (!th) return s_->base.successors_from(t, min_value, limit);
    std::vector<Value> committed = c.committed_children();
    committed.erase(std::remove_if(committed.begin(), committed.end(),
                                   [&](Value v) { return v < min_value; }),
                    committed.end());
    Value from = std::max(min_value, *th);
    std::vector<Value> tail = s_->base.successors_from(t, from, limit + committed.size());
    std::vector<Value> out;
    std::size_t a = 0, b = 0;
    while (out.size() < limit && (a < committed.size() || b < tail.size())) {
      Value v;
      if (a < committed.size() && (b >= tail.size() || committed[a] <= tail[b]))
        v = committed[a++];
      else
        v = tail[b++];
      if (out.empty() || out.back() != v) out.push_back(v);
    }
    return out;
  }

  bool claims_infinite_successors(const Node& t) const override {
    const Node& root = s_->grid_root;
    if (t.size() < root.size()) return false;
    if (!root.prefix_of(t)) return false;
    return s_->base.claims_infinite_successors(t);
  }

  std::optional<std::vector<Value>> cofinite_exclusions(const Node& t) const override {
    const Node& root = s_->grid_root;
    if (t.size() < root.size() || !root.prefix_of(t)) return std::nullopt;
    Cursor c(*s_);
    for (std::size_t i = root.size(); i < t.size(); ++i)
      if (!c.descend_committed(t[i])) return s_->base.cofinite_exclusions(t);
    auto th = c.policy();
    auto base_mask = s_->base.cofinite_exclusions(t);
    if (!th || !base_mask) return base_mask;
    // Below the policy only the committed children survive; above it the
    // base exclusions stand.
    std::vector<Value> committed = c.committed_children();
    std::vector<Value> mask;
    for (Value v = 0; v < *th; ++v)
      if (!std::binary_search(committed.begin(), committed.end(), v)) mask.push_back(v);
    for (Value v : *base_mask)
      if (v >= *th) mask.push_back(v);
    return mask;
  }

  std::optional<Kind> kind_claim() const override {
    if (s_->mode == FusionMode::Laver)
      return s_->grid_root.empty() ? Kind::CompleteLaver : Kind::Laver;
    return Kind::Miller;
  }

  nlohmann::json recipe() const override {
    return {{"recipe", "fusion-stage"},
            {"stage", s_->stage},
            {"mode", fusion_mode_name(s_->mode)},
            {"root", s_->grid_root},
            {"base", s_->base.recipe()}};
  }

 private:
  std::shared_ptr<const FusionStage> s_;
};

std::string word_str(const std::vector<Value>& word) {
  std::string out = "(";
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(word[i]);
  }
  return out + ")";
}

void require_mode_fit(const LazyTree& tree, FusionMode mode) {
  Kind want = mode == FusionMode::Miller ? Kind::Miller : Kind::Laver;
  for (const KindVerdict& v : classify(tree, 3, 4)) {
    if (v.kind != want || v.status != VerdictStatus::Refuted) continue;
    throw std::domain_error("mode mismatch: tree refutes " + kind_name(want) + " splitting" +
                            (v.witness ? " at " + v.witness->to_string() : ""));
  }
}

void require_split_evidence(const LazyTree& tree, const Node& t, Value from, bool claimed) {
  if (claimed) return;
  if (tree.successors_from(t, from, 8).size() < 8)
    throw ConstructionError("cannot witness infinite splitting at " + t.to_string() +
                            " above value " + std::to_string(from));
}

// Builds the arrays of the next stage: copies committed values, raises the
// thresholds, appends the new children of every old word inside its cover,
// and completes the grid below brand-new words with least successors.
struct StepBuilder {
  const FusionStage& old_stage;
  FusionStage& next;
  Rational lambda;
  bool claimed_all = true;

  void run() {
    Node node = old_stage.grid_root;
    extend_old(0, 0, true, 0, 0, node, clopen(old_stage.grid_root));
  }

  void extend_old(std::size_t old_rank, std::size_t sp_rank, bool sp_valid, std::size_t new_rank,
                  std::size_t len, Node& node, const RationalInterval& img) {
    const WordGrid& og = old_stage.grid;
    const WordGrid& ng = next.grid;
    bool cl = old_stage.base.claims_infinite_successors(node);
    claimed_all = claimed_all && cl;

    Value th = accumulation_threshold(img, lambda);
    if (sp_valid) {
      Value prev_th = old_stage.threshold[sp_rank];
      if (prev_th != kNoPolicy && prev_th > th) th = prev_th;
    }
    next.threshold[old_rank] = th;

    bool has_old_children = len < og.len_max;
    std::size_t first_new = has_old_children ? og.alpha : 0;
    std::size_t need = ng.alpha - first_new;

    std::vector<Value> committed;
    if (has_old_children) {
      std::size_t first = og.child(old_rank, len, 0);
      for (std::size_t j = 0; j < og.alpha; ++j) committed.push_back(old_stage.value[first + j]);
    }
    std::size_t collisions = 0;
    for (Value v : committed)
      if (v >= th) ++collisions;

    std::size_t want = cl ? need : std::max<std::size_t>(need, 8);
    std::vector<Value> chunk = old_stage.base.successors_from(node, th, want + collisions);
    std::vector<Value> fresh;
    for (Value v : chunk) {
      if (std::find(committed.begin(), committed.end(), v) != committed.end()) continue;
      fresh.push_back(v);
      if (fresh.size() == want) break;
    }
    if (fresh.size() < want)
      throw ConstructionError("cannot witness the cover's successor set at grid word " +
                              word_str(current_word_) + ", node " + node.to_string());

    if (has_old_children) {
      std::size_t ofirst = og.child(old_rank, len, 0);
      std::size_t nfirst = ng.child(new_rank, len, 0);
      for (std::size_t j = 0; j < og.alpha; ++j) next.value[nfirst + j] = old_stage.value[ofirst + j];
    }
    for (std::size_t k = 0; k < need; ++k)
      next.value[ng.child(new_rank, len, first_new + k)] = fresh[k];

    if (has_old_children) {
      for (std::size_t j = 0; j < og.alpha; ++j) {
        std::size_t oc = og.child(old_rank, len, j);
        std::size_t nc = ng.child(new_rank, len, j);
        bool child_sp_valid =
            sp_valid && len + 1 <= old_stage.prior.len_max && j < old_stage.prior.alpha;
        std::size_t child_sp = 0;
        if (child_sp_valid) {
          std::size_t pwithin = sp_rank - old_stage.prior.level_start[len];
          child_sp =
              old_stage.prior.level_start[len + 1] + pwithin * old_stage.prior.radix + j;
        }
        Value v = old_stage.value[oc];
        current_word_.push_back(j);
        node.push_back(v);
        extend_old(oc, child_sp, child_sp_valid, nc, len + 1, node, clopen_child(img, v));
        node.pop_back();
        current_word_.pop_back();
      }
    }
    for (std::size_t k = 0; k < need; ++k) {
      std::size_t nc = ng.child(new_rank, len, first_new + k);
      current_word_.push_back(first_new + k);
      node.push_back(fresh[k]);
      fill_fresh(nc, len + 1, node);
      node.pop_back();
      current_word_.pop_back();
    }
  }

  void fill_fresh(std::size_t new_rank, std::size_t len, Node& node) {
    const WordGrid& ng = next.grid;
    bool cl = old_stage.base.claims_infinite_successors(node);
    claimed_all = claimed_all && cl;
    std::size_t need = len < ng.len_max ? ng.alpha : 0;
    std::size_t want = cl ? need : std::max<std::size_t>(need, 8);
    if (want == 0) return;
    std::vector<Value> vs = old_stage.base.successors(node, want);
    if (vs.size() < need)
      throw ConstructionError("cannot complete the grid below word " + word_str(current_word_) +
                              ", node " + node.to_string() + ": successors ran out");
    if (!cl && vs.size() < 8)
      throw ConstructionError("cannot witness infinite splitting below word " +
                              word_str(current_word_) + ", node " + node.to_string());
    std::size_t first = need ? ng.child(new_rank, len, 0) : 0;
    for (std::size_t j = 0; j < need; ++j) next.value[first + j] = vs[j];
    for (std::size_t j = 0; j < need; ++j) {
      current_word_.push_back(j);
      node.push_back(vs[j]);
      fill_fresh(first + j, len + 1, node);
      node.pop_back();
      current_word_.pop_back();
    }
  }

  std::vector<Value> current_word_;
};

}  // namespace
}  // namespace detail

using detail::FusionStage;
using detail::kNoPolicy;
using detail::WordGrid;

int FusionState::stage() const { return s_->stage; }
FusionMode FusionState::mode() const { return s_->mode; }
bool FusionState::stem_locked() const { return s_->locked; }
const LazyTree& FusionState::base() const { return s_->base; }
const Node& FusionState::grid_root() const { return s_->grid_root; }
const RationalInterval& FusionState::input() const { return s_->input; }
Rational FusionState::cover_measure() const { return s_->cover_measure; }
bool FusionState::infinitude_claimed() const { return s_->claimed; }

LazyTree FusionState::tree() const {
  return LazyTree(std::make_shared<detail::StageTreeModel>(s_));
}

std::size_t FusionState::grid_size() const { return s_->grid.words(); }

void FusionState::for_each_grid_node(
    const std::function<void(const std::vector<Value>&, const Node&)>& visit) const {
  const FusionStage& S = *s_;
  const WordGrid& g = S.grid;
  std::vector<Value> word;
  Node node = S.grid_root;
  visit(word, node);
  if (g.alpha == 0) return;
  for (std::size_t len = 1; len <= g.len_max; ++len) {
    word.assign(len, 0);
    std::vector<std::size_t> rk(len);
    node = S.grid_root;
    std::size_t parent = 0;
    for (std::size_t k = 0; k < len; ++k) {
      rk[k] = g.child(parent, k, 0);
      node.push_back(S.value[rk[k]]);
      parent = rk[k];
    }
    for (;;) {
      visit(word, node);
      std::size_t k = len;
      while (k > 0 && word[k - 1] + 1 == g.alpha) --k;
      if (k == 0) break;
      ++word[k - 1];
      for (std::size_t p = len; p >= k; --p) node.pop_back();
      std::size_t par = k >= 2 ? rk[k - 2] : 0;
      for (std::size_t p = k - 1; p < len; ++p) {
        if (p > k - 1) word[p] = 0;
        rk[p] = g.child(par, p, static_cast<std::size_t>(word[p]));
        node.push_back(S.value[rk[p]]);
        par = rk[p];
      }
    }
  }
}

std::optional<FusionState> FusionState::previous() const {
  if (!s_->prev) return std::nullopt;
  return FusionState(s_->prev);
}

std::vector<FusionState> FusionState::history() const {
  std::vector<FusionState> out;
  for (auto p = s_; p; p = p->prev) out.emplace_back(p);
  std::reverse(out.begin(), out.end());
  return out;
}

nlohmann::json FusionState::describe() const {
  return {{"stage", s_->stage},
          {"mode", fusion_mode_name(s_->mode)},
          {"stem_locked", s_->locked},
          {"grid_root", s_->grid_root},
          {"grid_size", grid_size()},
          {"input", s_->input},
          {"cover_measure", rational_str(s_->cover_measure)},
          {"infinitude_claimed", s_->claimed},
          {"base", s_->base.recipe()}};
}

FusionState FusionState::with_grid_value_overridden(const std::vector<Value>& word,
                                                    Value v) const {
  const WordGrid& g = s_->grid;
  if (word.empty() || word.size() > g.len_max)
    throw std::invalid_argument("override word must have length 1.." +
                                std::to_string(g.len_max));
  std::size_t rank = 0;
  for (std::size_t k = 0; k < word.size(); ++k) {
    if (word[k] >= g.alpha) throw std::invalid_argument("override word letter out of range");
    rank = g.child(rank, k, static_cast<std::size_t>(word[k]));
  }
  auto copy = std::make_shared<FusionStage>(*s_);
  copy->value[rank] = v;
  return FusionState(copy);
}

FusionState fusion_init(const LazyTree& tree, const RationalInterval& i0, FusionMode mode,
                        bool lock_stem) {
  detail::require_mode_fit(tree, mode);
  Rational eps = i0.measure();
  StemResult sr = stem(tree, 64);
  if (!sr.stem) throw BudgetExhausted("stem not located within 64 probes");
  const Node& st = *sr.stem;

  auto stage = std::make_shared<FusionStage>(tree);
  stage->mode = mode;
  stage->locked = lock_stem;
  stage->input = i0;
  stage->grid = WordGrid::make(0, 0);
  stage->prior = WordGrid::make(0, 0);
  stage->value.assign(1, 0);
  stage->threshold.assign(1, kNoPolicy);

  if (lock_stem) {
    if (mode != FusionMode::Laver) throw std::domain_error("lock_stem requires Laver mode");
    if (st.empty()) throw std::domain_error("lock_stem requires a nonempty stem");
    RationalInterval img = clopen(st);
    Rational half = eps / 2;
    stage->grid_root = st;
    stage->root_cover = RationalInterval(img.hi - half, img.hi);
    stage->cover_measure = half;
    stage->threshold[0] = accumulation_threshold(img, half);
  } else {
    RationalInterval img = clopen(st);
    if (img.measure() < eps && tree.claims_infinite_successors(st)) {
      stage->grid_root = st;
    } else {
      // Least successor whose own image already fits strictly below eps;
      // child k of (a,b) has measure (b-a) * 2^-(k+2).
      Rational quarter = img.measure() / 4;
      Value k0 = shrink_exponent(quarter, eps);
      if (quarter * pow2_neg(k0) == eps) ++k0;
      std::vector<Value> cand = tree.successors_from(st, k0, 1);
      if (cand.empty())
        throw ConstructionError("no stem successor reaches shrink exponent " +
                                std::to_string(k0));
      stage->grid_root = st.extended(cand[0]);
    }
    stage->root_cover = clopen(stage->grid_root);
    stage->cover_measure = stage->root_cover.measure();
  }

  bool claimed = tree.claims_infinite_successors(stage->grid_root);
  Value floor = stage->threshold[0] == kNoPolicy ? 0 : stage->threshold[0];
  detail::require_split_evidence(tree, stage->grid_root, floor, claimed);
  stage->claimed = claimed;
  return FusionState(stage);
}

FusionState fusion_step(const FusionState& state, const RationalInterval& i_next) {
  const FusionStage& S = state.data();
  int m = S.stage + 1;
  Rational eps = i_next.measure();
  Rational lambda = eps / (2 * Rational(pow_big(m, m - 1)));

  auto next = std::make_shared<FusionStage>(S.base);
  next->stage = m;
  next->mode = S.mode;
  next->locked = S.locked;
  next->grid_root = S.grid_root;
  next->input = i_next;
  next->cover_measure = lambda;
  next->root_cover = S.root_cover;
  next->grid = WordGrid::make(m, m);
  next->prior = S.grid;
  next->prev = state.share();
  next->value.assign(next->grid.words(), 0);
  next->threshold.assign(S.grid.words(), kNoPolicy);

  detail::StepBuilder builder{S, *next, lambda, true, {}};
  builder.run();
  next->claimed = builder.claimed_all;
  return FusionState(next);
}

BoundCertificate verify_bound(const FusionState& state) {
  const FusionStage& S = state.data();
  Rational eps = S.input.measure();
  if (S.stage == 0) {
    Rational lhs = (S.root_cover.hi + S.input.hi) - (S.root_cover.lo + S.input.lo);
    Rational rhs = 2 * eps;
    return BoundCertificate{0, lhs, rhs, lhs < rhs};
  }

  std::vector<RationalInterval> parts;
  parts.reserve(S.prior.words());
  const Rational& lam = S.cover_measure;

  struct Walk {
    const FusionStage& S;
    const Rational& lam;
    std::vector<RationalInterval>& parts;
    void rec(std::size_t rank, std::size_t len, const RationalInterval& img) {
      parts.emplace_back(img.hi - lam + S.input.lo, img.hi + S.input.hi);
      if (len >= S.prior.len_max) return;
      for (std::size_t j = 0; j < S.prior.alpha; ++j) {
        std::size_t c = S.grid.child(rank, len, j);
        rec(c, len + 1, clopen_child(img, S.value[c]));
      }
    }
  } walk{S, lam, parts};
  walk.rec(0, 0, clopen(S.grid_root));

  Rational lhs = normalize(std::move(parts)).measure();
  BigInt factor = 1, pw = 1;
  for (int k = 0; k < S.stage; ++k) {
    factor += pw;
    pw *= S.stage - 1;
  }
  Rational rhs = Rational(factor) * eps;
  return BoundCertificate{S.stage, lhs, rhs, lhs < rhs};
}

CompleteLaverDecomposition::CompleteLaverDecomposition(LazyTree tree, std::size_t probe_budget)
    : tree_(std::move(tree)) {
  StemResult sr = stem(tree_, 2);
  if (!sr.stem || !sr.stem->empty())
    throw std::domain_error("decomposition requires a tree with stem ()");
  roots_ = tree_.successors(Node{}, probe_budget);
}

LazyTree CompleteLaverDecomposition::piece(std::size_t index) const {
  return restrict_to(tree_, Node{}.extended(roots_.at(index)));
}

Value CompleteLaverDecomposition::piece_value(std::size_t index) const {
  return roots_.at(index);
}

CompleteLaverDecomposition complete_laver_decompose(const LazyTree& tree,
                                                    std::size_t probe_budget) {
  return CompleteLaverDecomposition(tree, probe_budget);
}

void to_json(nlohmann::json& j, const GdeltaRun& run) {
  nlohmann::json pieces = nlohmann::json::array();
  for (const GdeltaPiece& p : run.pieces) {
    nlohmann::json rows = nlohmann::json::array();
    for (const GdeltaStageRow& r : p.rows)
      rows.push_back({{"stage", r.stage},
                      {"lhs", rational_str(r.lhs)},
                      {"rhs", rational_str(r.rhs_closed_form)},
                      {"holds", r.holds},
                      {"target", rational_str(r.target)},
                      {"target_holds", r.target_holds}});
    nlohmann::json tails = nlohmann::json::array();
    for (const GdeltaTailRow& t : p.tails)
      tails.push_back({{"n", t.n},
                       {"tail_sum", rational_str(t.tail_sum)},
                       {"bound", rational_str(t.bound)},
                       {"holds", t.holds}});
    pieces.push_back({{"label", p.label},
                      {"rows", rows},
                      {"tails", tails},
                      {"final_stage", p.final_state.stage()},
                      {"all_hold", p.all_hold}});
  }
  j = {{"intervals", run.intervals},
       {"pieces", pieces},
       {"union_stage_count", run.union_stage_count},
       {"all_hold", run.all_hold}};
}

GdeltaRun gdelta_construction(const LazyTree& tree, FusionMode mode, int stages,
                              bool decompose_complete_laver, std::size_t piece_count,
                              const std::vector<Rational>& centers) {
  if (stages < 3) throw std::invalid_argument("the construction needs at least 3 stages");
  if (!centers.empty() && centers.size() < static_cast<std::size_t>(stages))
    throw std::invalid_argument("need one center per stage");

  std::vector<Rational> ds;
  for (int k = 1; k <= stages; ++k)
    ds.push_back(centers.empty() ? dyadic_rational(k) : centers[k - 1]);
  {
    std::vector<Rational> sorted = ds;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw std::invalid_argument("centers must be pairwise distinct");
  }

  GdeltaRun run;
  for (int k = 1; k <= stages; ++k) {
    Rational eps = Rational(1) / Rational(pow_big(k, k - 1) * pow_big(2, k + 1));
    Rational half = eps / 2;
    run.intervals.emplace_back(ds[k - 1] - half, ds[k - 1] + half);
  }

  auto run_piece = [&](const LazyTree& t, FusionMode piece_mode, bool lock,
                       const std::string& label) {
    FusionState st = fusion_init(t, run.intervals[0], piece_mode, lock);
    std::vector<GdeltaStageRow> rows;
    for (int k = 1; k <= stages; ++k) {
      st = fusion_step(st, run.intervals[k - 1]);
      BoundCertificate c = verify_bound(st);
      GdeltaStageRow row;
      row.stage = k;
      row.lhs = c.lhs;
      row.rhs_closed_form = c.rhs;
      row.holds = c.holds;
      row.target = pow2_neg(k);
      row.target_holds = c.lhs < row.target;
      rows.push_back(row);
    }
    std::vector<GdeltaTailRow> tails;
    for (int n = 0; n < stages; ++n) {
      Rational sum = 0;
      for (int k = n + 1; k <= stages; ++k) sum += rows[k - 1].lhs;
      GdeltaTailRow tr;
      tr.n = n;
      tr.tail_sum = sum;
      tr.bound = pow2_neg(n);
      tr.holds = sum <= tr.bound;
      tails.push_back(tr);
    }
    bool all = true;
    for (const GdeltaStageRow& r : rows) {
      all = all && r.holds;
      if (r.stage >= 3) all = all && r.target_holds;
    }
    for (const GdeltaTailRow& t : tails) all = all && t.holds;
    run.pieces.push_back(GdeltaPiece{label, std::move(rows), std::move(tails), st, all});
  };

  if (decompose_complete_laver) {
    CompleteLaverDecomposition dec =
        complete_laver_decompose(tree, std::max<std::size_t>(piece_count, 8));
    std::size_t n = std::min(piece_count, dec.known_pieces());
    for (std::size_t i = 0; i < n; ++i)
      run_piece(dec.piece(i), FusionMode::Laver, true,
                "piece-" + std::to_string(dec.piece_value(i)));
  } else {
    run_piece(tree, mode, false, fusion_mode_name(mode));
  }

  run.union_stage_count = 0;
  run.all_hold = true;
  for (const GdeltaPiece& p : run.pieces) {
    run.union_stage_count = std::max(run.union_stage_count, p.final_state.stage());
    run.all_hold = run.all_hold && p.all_hold;
  }
  return run;
}

RetentionReport fusion_limit(const std::vector<FusionState>& states, std::size_t window_depth,
                             std::size_t window_width) {
  if (states.empty()) throw std::invalid_argument("no states to examine");
  for (std::size_t i = 1; i < states.size(); ++i) {
    const FusionStage& b = states[i].data();
    if (b.stage != states[i - 1].stage() + 1 || b.prev.get() != &states[i - 1].data())
      throw std::invalid_argument("states are not consecutive stages of one run");
  }

  std::size_t checked = 0;

  // Committed values must agree wherever two consecutive grids overlap.
  struct Compare {
    const FusionStage& a;
    const FusionStage& b;
    std::size_t& checked;
    void rec(std::size_t ra, std::size_t rb, std::size_t len, Node& node) {
      ++checked;
      if (len >= a.grid.len_max) return;
      for (std::size_t j = 0; j < a.grid.alpha; ++j) {
        std::size_t ca = a.grid.child(ra, len, j);
        std::size_t cb = b.grid.child(rb, len, j);
        if (a.value[ca] != b.value[cb])
          throw InvariantViolation(
              "grid node altered after stage " + std::to_string(a.stage) + ": " +
              node.extended(a.value[ca]).to_string() + " became " +
              node.extended(b.value[cb]).to_string());
        node.push_back(a.value[ca]);
        rec(ca, cb, len + 1, node);
        node.pop_back();
      }
    }
  };
  for (std::size_t i = 1; i < states.size(); ++i) {
    const FusionStage& a = states[i - 1].data();
    const FusionStage& b = states[i].data();
    if (!(a.grid_root == b.grid_root))
      throw InvariantViolation("grid root altered after stage " + std::to_string(a.stage) +
                               ": " + a.grid_root.to_string());
    Node node = a.grid_root;
    Compare cmp{a, b, checked};
    cmp.rec(0, 0, 0, node);
  }

  // Every grid node of the final stage must still be a member with visible
  // splitting; with the chain equality above this covers all earlier stages.
  const FusionState& last = states.back();
  LazyTree final_tree = last.tree();
  last.for_each_grid_node([&](const std::vector<Value>&, const Node& node) {
    ++checked;
    if (!final_tree.member(node))
      throw InvariantViolation("grid node lost: " + node.to_string());
    SplitReport rep = split_kind(final_tree, node, 2);
    if (!rep.split() && !final_tree.claims_infinite_successors(node))
      throw InvariantViolation("grid node no longer split-witnessed: " + node.to_string());
  });

  std::size_t depth = window_depth ? window_depth : last.grid_root().size() + 2;
  return RetentionReport{checked, truncate(final_tree, depth, window_width)};
}

}  // namespace baire
