#pragma once

#include "baire/interval.hpp"
#include "baire/node.hpp"

namespace baire {

class FiniteTreeApprox;

// The clopen interval scheme mapping tree nodes into (0,1).
//
// clopen(()) = (0,1). Given clopen(t) = (a,b) of length L = b-a, successor
// value k owns the block B_k = (a + L(1 - 2^-k), a + L(1 - 2^-(k+1))) and
// clopen(t^k) is the middle half of B_k, so the images of the successors of
// t are pairwise disjoint, accumulate at b from the left, and
// measure(clopen(t)) <= 2^-len(t).
RationalInterval clopen(const Node& t);

// One refinement step: the image of t^k given the image of t.
RationalInterval clopen_child(const RationalInterval& parent, Value k);

// Least k0 such that every clopen(t^k) with k >= k0 lies in
// (b - bound, b), where (a,b) = clopen(t). This is the accumulation
// property made effective: the tail of blocks from k0 on spans
// (b - L*2^-k0, b).
Value accumulation_threshold(const RationalInterval& parent, const Rational& bound);

// Union of the images of the frontier-level nodes of a finite tree
// approximation; frontier must not exceed the truncation depth.
IntervalUnion cover(const FiniteTreeApprox& approx, std::size_t frontier);

}  // namespace baire
