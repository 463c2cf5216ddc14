#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "baire/errors.hpp"
#include "baire/node.hpp"
#include "json.hpp"

namespace baire {

// Tree kinds, ordered roughly by strength of the splitting requirement.
enum class Kind {
  Sacks,            // every node extends to one with >= 2 successors
  Miller,           // every node extends to one with infinitely many successors
  Laver,            // every node from the stem on has infinitely many successors
  CompleteLaver,    // Laver with stem ()
  Hechler,          // every node from the stem on has co-finitely many successors
  CompleteHechler,  // Hechler with stem ()
};

std::string kind_name(Kind k);
std::optional<Kind> kind_from_name(const std::string& name);

// Behavioural interface of a lazily represented infinite tree.
//
// member() decides node membership. successors() enumerates successor values
// in strictly increasing order and returns fewer than `limit` values exactly
// when the successor set is finite, so a short answer is a proof of finiteness.
// Infinitude of a successor set is not finitely observable; models whose
// construction guarantees it say so through claims_infinite_successors(), and
// models that know their successor set is co-finite expose the finite
// exclusion list. Queries must be pure: same node, same answer.
class TreeModel {
 public:
  virtual ~TreeModel() = default;

  virtual bool member(const Node& t) const = 0;
  virtual std::vector<Value> successors(const Node& t, std::size_t limit) const = 0;

  // Successor values >= min_value, same contract as successors().
  virtual std::vector<Value> successors_from(const Node& t, Value min_value,
                                             std::size_t limit) const = 0;

  virtual bool claims_infinite_successors(const Node& t) const {
    (void)t;
    return false;
  }

  // Values excluded from succ(t) when the model declares succ(t) co-finite.
  virtual std::optional<std::vector<Value>> cofinite_exclusions(const Node& t) const {
    (void)t;
    return std::nullopt;
  }

  virtual std::optional<Kind> kind_claim() const { return std::nullopt; }

  virtual nlohmann::json recipe() const = 0;
};

// Value-semantic handle on an immutable tree model.
class LazyTree {
 public:
  explicit LazyTree(std::shared_ptr<const TreeModel> model) : model_(std::move(model)) {}

  bool member(const Node& t) const { return model_->member(t); }

  // Throws std::domain_error when t is not a member.
  std::vector<Value> successors(const Node& t, std::size_t limit) const;
  std::vector<Value> successors_from(const Node& t, Value min_value, std::size_t limit) const;

  bool claims_infinite_successors(const Node& t) const {
    return model_->claims_infinite_successors(t);
  }
  std::optional<std::vector<Value>> cofinite_exclusions(const Node& t) const {
    return model_->cofinite_exclusions(t);
  }
  std::optional<Kind> kind_claim() const { return model_->kind_claim(); }
  nlohmann::json recipe() const { return model_->recipe(); }

  const TreeModel& model() const { return *model_; }
  std::shared_ptr<const TreeModel> share_model() const { return model_; }

 private:
  std::shared_ptr<const TreeModel> model_;
};

// Depth/width window of a tree: all nodes reachable from the root using at
// most `width` successor values per node, cut at length `depth`. Nodes are
// kept sorted by length then entrywise.
class FiniteTreeApprox {
 public:
  FiniteTreeApprox() = default;
  FiniteTreeApprox(std::vector<Node> nodes, std::size_t depth, std::size_t width,
                   nlohmann::json provenance);

  const std::vector<Node>& nodes() const { return nodes_; }
  std::size_t depth() const { return depth_; }
  std::size_t width() const { return width_; }
  const nlohmann::json& provenance() const { return provenance_; }

  bool contains(const Node& t) const;
  bool operator==(const FiniteTreeApprox& other) const {
    return depth_ == other.depth_ && width_ == other.width_ && nodes_ == other.nodes_;
  }

 private:
  std::vector<Node> nodes_;
  std::size_t depth_ = 0;
  std::size_t width_ = 0;
  nlohmann::json provenance_;
};

void to_json(nlohmann::json& j, const FiniteTreeApprox& f);
void from_json(const nlohmann::json& j, FiniteTreeApprox& f);

// Outcome of probing the successor set of one node.
struct SplitReport {
  bool omega_witnessed = false;  // at least `probe` successors observed
  std::size_t count = 0;         // exact when not omega_witnessed

  bool split() const { return omega_witnessed || count >= 2; }
  std::string to_string() const;
};

struct StemResult {
  std::optional<Node> stem;  // empty when the budget ran out first
  std::size_t probed = 0;
};

enum class VerdictStatus { ConfirmedAtDepth, Refuted, Unknown };

std::string verdict_status_name(VerdictStatus s);

// Budget-relative verdict: Refuted carries a node that violates the kind's
// clause within the probed window.
struct KindVerdict {
  Kind kind;
  VerdictStatus status = VerdictStatus::Unknown;
  std::optional<Node> witness;
};

// ---- operations ----

// Walks the single-successor chain from the root; stops at the first node
// with >= 2 successors. Probes at most depth_budget nodes.
StemResult stem(const LazyTree& tree, std::size_t depth_budget);

SplitReport split_kind(const LazyTree& tree, const Node& t, std::size_t probe);

FiniteTreeApprox truncate(const LazyTree& tree, std::size_t depth, std::size_t width);

// One verdict per kind, judged on the depth/width window. Confirmation of
// infinite splitting rests on the model's claims; refutations rest on
// exhausted successor enumerations inside the window.
std::vector<KindVerdict> classify(const LazyTree& tree, std::size_t depth, std::size_t width);

// Nodes comparable with t, i.e. the branches through t. t must be a member.
LazyTree restrict_to(const LazyTree& tree, const Node& t);

// The subtree above the stem, relabelled to root the stem at (). Locates the
// stem within stem_budget probes and throws BudgetExhausted otherwise.
LazyTree stem_trim(const LazyTree& tree, std::size_t stem_budget = 64);

// Minimal extensions of t (within the window) whose observed successor count
// reaches the probe width; derived query, no certification attached.
std::vector<Node> minimal_split_extensions(const LazyTree& tree, const Node& t,
                                           std::size_t depth, std::size_t width,
                                           std::size_t split_probe);

// ---- built-in trees ----

LazyTree full_tree();
LazyTree cylinder_tree(Value n);            // {t : t = () or t(0) = n}
LazyTree bounded_tree(Value branching);     // all entries < branching

// Parses recipes like "full", "cylinder:3", "bounded:2", "adtree",
// "restrict:full:(1,2)", "residue:full:3". Throws std::invalid_argument.
LazyTree tree_from_spec(const std::string& spec);

}  // namespace baire
