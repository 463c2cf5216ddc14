#include "baire/embed.hpp"

#include <stdexcept>

#include "baire/tree.hpp"

namespace baire {

RationalInterval clopen_child(const RationalInterval& parent, Value k) {
  Rational scale = parent.measure() * pow2_neg(k);
  return RationalInterval(parent.hi - scale * Rational(7, 8), parent.hi - scale * Rational(5, 8));
}

RationalInterval clopen(const Node& t) {
  RationalInterval iv(Rational(0), Rational(1));
  for (std::size_t i = 0; i < t.size(); ++i) iv = clopen_child(iv, t[i]);
  return iv;
}

Value accumulation_threshold(const RationalInterval& parent, const Rational& bound) {
  if (bound <= 0) throw std::invalid_argument("accumulation bound must be positive");
  return shrink_exponent(parent.measure(), bound);
}

IntervalUnion cover(const FiniteTreeApprox& approx, std::size_t frontier) {
  if (frontier > approx.depth())
    throw std::invalid_argument("cover frontier exceeds truncation depth");
  std::vector<RationalInterval> parts;
  for (const auto& t : approx.nodes())
    if (t.size() == frontier) parts.push_back(clopen(t));
  return normalize(std::move(parts));
}

}  // namespace baire
