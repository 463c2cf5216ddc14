#pragma once

#include <vector>

#include "baire/rational.hpp"
#include "json.hpp"

namespace baire {

// Nonempty bounded open interval (lo, hi) with rational endpoints.
struct RationalInterval {
  Rational lo, hi;

  RationalInterval() : lo(0), hi(1) {}
  RationalInterval(Rational l, Rational h);

  Rational measure() const { return hi - lo; }
  bool contains(const RationalInterval& other) const {
    return lo <= other.lo && other.hi <= hi;
  }
};

// Finite union of open intervals kept in canonical form: sorted by left
// endpoint, pairwise disjoint, with no two parts sharing an endpoint.
class IntervalUnion {
 public:
  IntervalUnion() = default;

  const std::vector<RationalInterval>& parts() const { return parts_; }
  std::size_t size() const { return parts_.size(); }
  bool empty() const { return parts_.empty(); }

  Rational measure() const;

  friend IntervalUnion normalize(std::vector<RationalInterval> parts);

 private:
  std::vector<RationalInterval> parts_;
};

// Sorts and merges overlapping or touching parts. Two open intervals that
// merely share an endpoint are merged; the union keeps the larger span,
// which can only increase reported measure (safe for upper-bound use).
IntervalUnion normalize(std::vector<RationalInterval> parts);

// Translate-and-spread: the set {a + x : a in u, x in addend}, again a
// finite union of open intervals.
IntervalUnion minkowski_sum(const IntervalUnion& u, const RationalInterval& addend);

void to_json(nlohmann::json& j, const RationalInterval& iv);
void from_json(const nlohmann::json& j, RationalInterval& iv);
void to_json(nlohmann::json& j, const IntervalUnion& u);
void from_json(const nlohmann::json& j, IntervalUnion& u);

}  // namespace baire
