#include "baire/interval.hpp"

#include <algorithm>
#include <stdexcept>

namespace baire {

RationalInterval::RationalInterval(Rational l, Rational h) : lo(std::move(l)), hi(std::move(h)) {
  if (lo >= hi) throw std::invalid_argument("interval endpoints must satisfy lo < hi");
}

Rational IntervalUnion::measure() const {
  Rational total = 0;
  for (const auto& p : parts_) total += p.measure();
  return total;
}

IntervalUnion normalize(std::vector<RationalInterval> parts) {
  std::sort(parts.begin(), parts.end(), [](const RationalInterval& a, const RationalInterval& b) {
    if (a.lo != b.lo) return a.lo < b.lo;
    return a.hi < b.hi;
  });
  IntervalUnion u;
  for (auto& p : parts) {
    if (!u.parts_.empty() && p.lo <= u.parts_.back().hi) {
      if (p.hi > u.parts_.back().hi) u.parts_.back().hi = std::move(p.hi);
    } else {
      u.parts_.push_back(std::move(p));
    }
  }
  return u;
}

IntervalUnion minkowski_sum(const IntervalUnion& u, const RationalInterval& addend) {
  std::vector<RationalInterval> spread;
  spread.reserve(u.size());
  for (const auto& p : u.parts())
    spread.emplace_back(p.lo + addend.lo, p.hi + addend.hi);
  return normalize(std::move(spread));
}

void to_json(nlohmann::json& j, const RationalInterval& iv) {
  j = nlohmann::json{{"lo", rational_str(iv.lo)}, {"hi", rational_str(iv.hi)}};
}

void from_json(const nlohmann::json& j, RationalInterval& iv) {
  iv = RationalInterval(parse_rational(j.at("lo").get<std::string>()),
                        parse_rational(j.at("hi").get<std::string>()));
}

void to_json(nlohmann::json& j, const IntervalUnion& u) {
  j = nlohmann::json{{"parts", u.parts()}, {"measure", rational_str(u.measure())}};
}

void from_json(const nlohmann::json& j, IntervalUnion& u) {
  auto parts = j.at("parts").get<std::vector<RationalInterval>>();
  u = normalize(std::move(parts));
}

}  // namespace baire
