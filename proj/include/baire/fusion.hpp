#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "baire/interval.hpp"
#include "baire/node.hpp"
#include "baire/tree.hpp"
#include "json.hpp"

namespace baire {

enum class FusionMode { Miller, Laver };

std::string fusion_mode_name(FusionMode m);

// Exact per-stage certificate: lhs is the measure of the recorded cover of
// the stage tree spread by the stage interval, rhs the closed-form bound
// (1 + sum_{k<n} (n-1)^k) * measure(I_n), with 0^0 = 1 and rhs = 2*measure(I_0)
// at stage 0.
struct BoundCertificate {
  int stage = 0;
  Rational lhs;
  Rational rhs;
  bool holds = false;
};

void to_json(nlohmann::json& j, const BoundCertificate& c);

namespace detail {
struct FusionStage;
}

// One stage of a fusion run. Stage n commits a grid of nodes indexed by the
// words over {0..n-1} of length <= n; every grid node keeps infinitely many
// successors in the stage tree, and everything the tree does beyond the grid
// happens inside the covers recorded when the grid was extended. States are
// immutable; each holds its predecessor.
class FusionState {
 public:
  int stage() const;
  FusionMode mode() const;
  bool stem_locked() const;
  const LazyTree& base() const;
  const Node& grid_root() const;              // common prefix of all grid nodes
  const RationalInterval& input() const;      // I_n
  Rational cover_measure() const;             // measure of each cover chosen at this stage
  bool infinitude_claimed() const;            // base claimed infinite successors at all grid nodes

  LazyTree tree() const;                      // the stage tree T_n

  std::size_t grid_size() const;              // number of grid words
  // Visits every grid word with its committed node, in word order
  // (by length, then lexicographically).
  void for_each_grid_node(const std::function<void(const std::vector<Value>& word,
                                                   const Node& node)>& visit) const;

  std::optional<FusionState> previous() const;
  std::vector<FusionState> history() const;   // stage 0 first, this stage last

  nlohmann::json describe() const;

  // Test hook: copy of this state with one committed grid value overwritten.
  FusionState with_grid_value_overridden(const std::vector<Value>& word, Value v) const;

  explicit FusionState(std::shared_ptr<const detail::FusionStage> s) : s_(std::move(s)) {}
  const detail::FusionStage& data() const { return *s_; }
  std::shared_ptr<const detail::FusionStage> share() const { return s_; }

 private:
  std::shared_ptr<const detail::FusionStage> s_;
};

// Stage 0: picks the grid root and records a cover of measure < measure(i0).
// Unlocked, the root is the shallowest node (stem first, else one immediate
// extension) with infinite-successor claim and image measure below
// measure(i0), and the stage tree is rooted there. With lock_stem the stem
// itself becomes the grid root and its successors are restricted to the
// accumulation tail inside an interval of half the allowed measure; requires
// Laver mode and a tree whose stem carries the infinitude claim.
FusionState fusion_init(const LazyTree& tree, const RationalInterval& i0, FusionMode mode,
                        bool lock_stem = false);

// Extends the grid of words over {0..n-1} (length <= n) to words over
// {0..n} (length <= n+1). Every already-committed word gets a cover interval
// anchored at the right endpoint of its node's image, of measure
// measure(i_next) / (2 * (n+1)^n); new children of covered words take the
// least admissible successors inside the cover, and grid completion below
// brand-new words takes least successors outright.
FusionState fusion_step(const FusionState& state, const RationalInterval& i_next);

// Recomputes the covers of `state` and certifies
// measure(union of (cover + I_n)) < rhs exactly.
BoundCertificate verify_bound(const FusionState& state);

// The pieces {t : t comparable with (v)} of a tree with stem (), indexed by
// the root's successor values. Each piece is Laver-claimed with stem (v).
class CompleteLaverDecomposition {
 public:
  CompleteLaverDecomposition(LazyTree tree, std::size_t probe_budget);
  LazyTree piece(std::size_t index) const;         // index-th root successor
  Value piece_value(std::size_t index) const;
  std::size_t known_pieces() const { return roots_.size(); }

 private:
  LazyTree tree_;
  std::vector<Value> roots_;
};

CompleteLaverDecomposition complete_laver_decompose(const LazyTree& tree,
                                                    std::size_t probe_budget = 64);

struct GdeltaStageRow {
  int stage = 0;
  Rational lhs;
  Rational rhs_closed_form;  // the (1 + sum (n-1)^k) * eps_n bound
  bool holds = false;
  Rational target;           // 2^-n
  bool target_holds = false; // required from stage 3 on
};

struct GdeltaTailRow {
  int n = 0;
  Rational tail_sum;  // sum of certified lhs over stages n+1..S
  Rational bound;     // 2^-n
  bool holds = false;
};

struct GdeltaPiece {
  std::string label;
  std::vector<GdeltaStageRow> rows;
  std::vector<GdeltaTailRow> tails;
  FusionState final_state;
  bool all_hold = false;
};

struct GdeltaRun {
  std::vector<RationalInterval> intervals;  // I_1..I_stages
  std::vector<GdeltaPiece> pieces;
  int union_stage_count = 0;                // max stage over pieces
  bool all_hold = false;
};

void to_json(nlohmann::json& j, const GdeltaRun& run);

// Runs the fusion against intervals I_k centered at the k-th point of a dense
// sequence (default: the dyadic enumeration) with measure 1/(k^(k-1) 2^(k+1)),
// so that each certified stage bound lands below 2^-n from stage 3 on and the
// tail sums below 2^-n for every n. Modes Miller and Laver run one piece;
// a complete-Laver run decomposes the tree first and runs each piece with the
// stem locked.
GdeltaRun gdelta_construction(const LazyTree& tree, FusionMode mode, int stages,
                              bool decompose_complete_laver = false,
                              std::size_t piece_count = 4,
                              const std::vector<Rational>& centers = {});

struct RetentionReport {
  std::size_t checked = 0;  // grid nodes examined across all stages
  FiniteTreeApprox window;
};

// Replays every grid node of every stage against the final stage tree:
// values unchanged across stages, node still a member, still split-witnessed.
// The states must be the consecutive history of one run. A lost, altered, or
// unwitnessed grid node raises InvariantViolation naming it; the report is
// returned only when everything is retained.
RetentionReport fusion_limit(const std::vector<FusionState>& states,
                             std::size_t window_depth = 0, std::size_t window_width = 3);

}  // namespace baire
