#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "baire/node.hpp"
#include "baire/tree.hpp"
#include "json.hpp"

namespace baire {

// What a prefix tells us about the branches through it.
enum class TriState { AllIn, AllOut, Undetermined };

std::string tri_state_name(TriState s);

// A clopen combination of basic sets [t] = {x : t is a prefix of x},
// queried node by node. decide() is monotone: once a prefix answers AllIn or
// AllOut, every extension answers the same.
class PrefixSet {
 public:
  static PrefixSet empty_set();
  static PrefixSet full_set();
  static PrefixSet basic(Node t);                 // [t]
  static PrefixSet cylinder(Value n);             // {x : x(0) = n}
  static PrefixSet set_union(std::vector<PrefixSet> parts);
  static PrefixSet set_intersection(std::vector<PrefixSet> parts);
  static PrefixSet complement(PrefixSet inner);

  TriState decide(const Node& t) const;

  // Length beyond which decide() never answers Undetermined.
  std::size_t determination_depth() const;

  // Values v for which decide(t^v) can differ from the common default at t,
  // together with that default. Finitely many values are special because the
  // set is a finite combination of basics.
  struct ChildProfile {
    std::vector<Value> special;  // sorted, deduplicated
    TriState default_verdict;
  };
  ChildProfile child_profile(const Node& t) const;

  nlohmann::json describe() const;

  static PrefixSet parse(const std::string& spec);

  struct Expr;  // opaque recipe tree

 private:
  explicit PrefixSet(std::shared_ptr<const Expr> e) : expr_(std::move(e)) {}
  std::shared_ptr<const Expr> expr_;
};

// The cylinder {x : x(0) = n} both as a tree and as a decidable set.
std::pair<LazyTree, PrefixSet> cylinder(Value n);

enum class WitnessOutcome { DisjointWitness, InsideWitness, Exhausted };

std::string witness_outcome_name(WitnessOutcome o);

// Result of a bounded search for a subtree whose branches all avoid (or all
// enter) a prefix set. Exhausted reports only that the budget ran out; it
// never claims nonexistence.
struct WitnessReport {
  WitnessOutcome outcome = WitnessOutcome::Exhausted;
  std::optional<FiniteTreeApprox> subtree;
  std::optional<LazyTree> subtree_tree;
  std::size_t depth = 0;
  std::size_t width = 0;
};

void to_json(nlohmann::json& j, const WitnessReport& r);

// Searches for a kind-preserving subtree of `tree` whose branches avoid
// `avoid`: prunes every direction that decides AllIn, keeping the rest.
// Succeeds when the pruned window is nonempty, reaches full depth, every
// depth-level node decides AllOut, and classify does not refute `kind`.
WitnessReport avoid_subtree(const LazyTree& tree, Kind kind, const PrefixSet& avoid,
                            std::size_t depth, std::size_t width);

// Tries a disjoint witness first, then an inside witness ([subtree] inside
// the set); first success wins.
WitnessReport measurability_witness(const LazyTree& tree, Kind kind, const PrefixSet& set,
                                    std::size_t depth, std::size_t width);

struct SigmaUnionReport {
  struct PieceResult {
    Value n = 0;
    WitnessReport witness;  // avoidance of the n-th cylinder, complete-Laver-preserving
  };
  std::vector<PieceResult> pieces;
  std::vector<bool> level_one_covered;  // node (k) decides AllIn for some piece, k < N
  bool all_witnessed = false;
  bool cover_holds = false;
};

// Each cylinder admits a complete-Laver-preserving avoidance witness, yet the
// first N cylinders jointly swallow every length-1 node: the two halves of
// the check that a union of trivially-avoidable sets can cover everything.
SigmaUnionReport sigma_union_check(Value n_pieces, std::size_t depth, std::size_t width);

struct BernsteinResult {
  bool hit = false;   // some frontier node of the tree decides AllIn
  bool miss = false;  // some AllIn node lies outside the tree
};

// Budget-limited evidence that `set` meets and misses each tree's branches.
std::vector<BernsteinResult> bernstein_check(const PrefixSet& set,
                                             const std::vector<LazyTree>& trees,
                                             std::size_t depth, std::size_t width);

}  // namespace baire
