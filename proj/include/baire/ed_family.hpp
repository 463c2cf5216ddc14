#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "baire/node.hpp"
#include "baire/tree.hpp"
#include "json.hpp"

namespace baire {

// Entries of function prefixes are arbitrary-precision naturals: branch
// values of the almost-disjoint tree grow exponentially with the level index
// of the node they leave, so 64 bits run out quickly.
using BigNat = mpz_class;

using FunctionPrefix = std::vector<BigNat>;

FunctionPrefix prefix_of_values(const std::vector<Value>& small);
nlohmann::json prefix_to_json(const FunctionPrefix& f);  // numbers up to 2^64-1, then decimal strings
FunctionPrefix prefix_from_json(const nlohmann::json& j);

struct EdStatus {
  std::size_t agreements = 0;
  std::optional<std::size_t> last_agreement;
};

// Counts positions i < min(|f|,|g|) with f(i) = g(i).
EdStatus ed_status(const FunctionPrefix& f, const FunctionPrefix& g);

// The partition of the naturals into blocks A_m = {2^m(2i+1) - 1 : i in w}:
// block m holds exactly the n with 2-adic valuation of n+1 equal to m, so the
// blocks are pairwise disjoint, jointly exhaustive, and each enumeration is
// strictly increasing with enum(m, i) >= i.
class Partition {
 public:
  BigNat enumerate(std::uint64_t block, const BigNat& i) const;  // k_{m,i}
  std::uint64_t block_of(const BigNat& n) const;
  BigNat index_in_block(const BigNat& n) const;
};

Partition make_partition();

// The almost-disjoint tree of function prefixes. Distinct nodes of a level
// take their children's values from distinct partition blocks, so two
// branches that have split never agree again.
//
// Level indices are assigned in first-touch order per level (the properties
// above hold under any injective level indexing); an instance therefore
// yields values deterministically for a fixed operation sequence. Handles
// share state; queries are serialized internally.
class AdTree {
 public:
  AdTree();

  // The branch that takes the selector(j)-th child at each level j.
  FunctionPrefix branch(const FunctionPrefix& selector) const;

  // Level index currently assigned to the node reached by `selector`'s first
  // len entries (the root path); touches the node.
  std::uint64_t level_index(const FunctionPrefix& selector, std::size_t len) const;

  // View as a tree of naturals. Valid while values fit 64 bits; successor
  // queries beyond that throw std::domain_error.
  LazyTree as_lazy_tree() const;

 private:
  struct State;
  std::shared_ptr<State> state_;
  friend class AdTreeModel;
};

// The dominating image f(d): the branch of T selected by d itself. Every
// entry satisfies f(d)(j) >= d(j), and distinct prefixes of equal length give
// distinct images.
FunctionPrefix embed(const AdTree& tree, const FunctionPrefix& d);

// Entrywise multiplication by 4; lands in the functions with all values
// divisible by 4.
FunctionPrefix scale4(const FunctionPrefix& f);

// Image of a tree of naturals under n -> 4n + r, r in {1,2,3}. Successor
// structure is order-isomorphic, so splitting kinds transfer; co-finiteness
// does not (the image alphabet is a residue class), so no exclusion lists are
// declared.
LazyTree residue_embed(const LazyTree& tree, Value r);

// Copy of d with position i set to v; v must differ from d(i).
FunctionPrefix finite_modify(const FunctionPrefix& d, std::size_t i, const BigNat& v);

}  // namespace baire
