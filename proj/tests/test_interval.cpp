#include <stdexcept>

#include "baire/interval.hpp"
#include "doctest.h"

using namespace baire;

namespace {
Rational q(const char* s) { return parse_rational(s); }
}  // namespace

TEST_CASE("interval endpoints must be ordered") {
  CHECK_THROWS_AS(RationalInterval(q("1/2"), q("1/2")), std::invalid_argument);
  CHECK_THROWS_AS(RationalInterval(q("3/4"), q("1/4")), std::invalid_argument);
  RationalInterval def;
  CHECK(def.lo == 0);
  CHECK(def.hi == 1);
}

TEST_CASE("normalize merges overlaps and shared endpoints") {
  IntervalUnion u = normalize({{q("1/4"), q("3/4")}, {q("0"), q("1/2")}});
  REQUIRE(u.size() == 1);
  CHECK(u.parts()[0].lo == 0);
  CHECK(u.parts()[0].hi == q("3/4"));
  CHECK(u.measure() == q("3/4"));

  IntervalUnion touching = normalize({{q("0"), q("1/4")}, {q("1/4"), q("1/2")}});
  REQUIRE(touching.size() == 1);
  CHECK(touching.measure() == q("1/2"));

  IntervalUnion apart = normalize({{q("1/2"), q("5/8")}, {q("0"), q("1/8")}});
  REQUIRE(apart.size() == 2);
  CHECK(apart.parts()[0].hi == q("1/8"));
  CHECK(apart.parts()[1].lo == q("1/2"));
  CHECK(apart.measure() == q("1/4"));
}

TEST_CASE("normalize is idempotent and measure never exceeds the raw sum") {
  std::vector<RationalInterval> raw = {{q("0"), q("1/3")}, {q("1/4"), q("1/2")}, {q("2/3"), q("1")}};
  IntervalUnion once = normalize(raw);
  IntervalUnion twice = normalize(once.parts());
  REQUIRE(once.size() == twice.size());
  for (std::size_t i = 0; i < once.size(); ++i) {
    CHECK(once.parts()[i].lo == twice.parts()[i].lo);
    CHECK(once.parts()[i].hi == twice.parts()[i].hi);
  }
  Rational raw_sum = 0;
  for (const auto& iv : raw) raw_sum += iv.measure();
  CHECK(once.measure() <= raw_sum);
}

TEST_CASE("minkowski spread of a two-part union") {
  IntervalUnion u = normalize({{q("0"), q("1/8")}, {q("1/2"), q("5/8")}});
  IntervalUnion s = minkowski_sum(u, {q("0"), q("1/8")});
  REQUIRE(s.size() == 2);
  CHECK(s.parts()[0].lo == 0);
  CHECK(s.parts()[0].hi == q("1/4"));
  CHECK(s.parts()[1].lo == q("1/2"));
  CHECK(s.parts()[1].hi == q("3/4"));
}

TEST_CASE("minkowski sum on a single part adds measures exactly") {
  IntervalUnion u = normalize({{q("1/3"), q("1/2")}});
  IntervalUnion s = minkowski_sum(u, {q("1/5"), q("2/5")});
  CHECK(s.measure() == u.measure() + q("1/5"));
}

TEST_CASE("rational parsing and printing round-trip") {
  CHECK(rational_str(q("3/8")) == "3/8");
  CHECK(rational_str(q("2/4")) == "1/2");
  CHECK(rational_str(Rational(5)) == "5");
  CHECK_THROWS_AS(parse_rational("1/0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational("nope"), std::invalid_argument);
}

TEST_CASE("interval union json round-trips") {
  IntervalUnion u = normalize({{q("0"), q("1/8")}, {q("1/2"), q("5/8")}});
  nlohmann::json j = u;
  IntervalUnion back = j.get<IntervalUnion>();
  REQUIRE(back.size() == u.size());
  CHECK(back.measure() == u.measure());
  CHECK(back.parts()[1].lo == u.parts()[1].lo);
}

TEST_CASE("dyadic enumeration walks the levels in order") {
  CHECK(dyadic_rational(1) == q("1/2"));
  CHECK(dyadic_rational(2) == q("1/4"));
  CHECK(dyadic_rational(3) == q("3/4"));
  CHECK(dyadic_rational(4) == q("1/8"));
  CHECK(dyadic_rational(5) == q("3/8"));
  CHECK_THROWS_AS(dyadic_rational(0), std::invalid_argument);
}

TEST_CASE("shrink exponent is the least halving count") {
  CHECK(shrink_exponent(q("1"), q("1/2")) == 1);
  CHECK(shrink_exponent(q("1/4"), q("1/4")) == 0);
  CHECK(shrink_exponent(q("1/8"), q("1/64")) == 3);
}
