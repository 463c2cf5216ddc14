#include <stdexcept>

#include "baire/oracle.hpp"
#include "doctest.h"

using namespace baire;

namespace {
Node n(std::initializer_list<Value> vs) { return Node{std::vector<Value>(vs)}; }
}  // namespace

TEST_CASE("basic sets decide by prefix comparison") {
  PrefixSet s = PrefixSet::basic(n({0}));
  CHECK(s.decide(Node{}) == TriState::Undetermined);
  CHECK(s.decide(n({0})) == TriState::AllIn);
  CHECK(s.decide(n({0, 7})) == TriState::AllIn);
  CHECK(s.decide(n({1})) == TriState::AllOut);
  CHECK(s.determination_depth() == 1);
}

TEST_CASE("boolean combinations decide pointwise") {
  PrefixSet u = PrefixSet::set_union({PrefixSet::cylinder(0), PrefixSet::basic(n({1, 2}))});
  CHECK(u.decide(n({0})) == TriState::AllIn);
  CHECK(u.decide(n({1})) == TriState::Undetermined);
  CHECK(u.decide(n({1, 2})) == TriState::AllIn);
  CHECK(u.decide(n({1, 3})) == TriState::AllOut);
  CHECK(u.decide(n({2})) == TriState::AllOut);
  CHECK(u.determination_depth() == 2);

  PrefixSet c = PrefixSet::complement(u);
  CHECK(c.decide(n({0})) == TriState::AllOut);
  CHECK(c.decide(n({1, 3})) == TriState::AllIn);

  PrefixSet i = PrefixSet::set_intersection({PrefixSet::cylinder(1), c});
  CHECK(i.decide(n({1, 3})) == TriState::AllIn);
  CHECK(i.decide(n({1, 2})) == TriState::AllOut);
  CHECK(i.decide(n({0})) == TriState::AllOut);

  CHECK(PrefixSet::empty_set().decide(Node{}) == TriState::AllOut);
  CHECK(PrefixSet::full_set().decide(Node{}) == TriState::AllIn);
}

TEST_CASE("determined verdicts persist under extension") {
  PrefixSet s = PrefixSet::set_union(
      {PrefixSet::basic(n({2, 1})), PrefixSet::complement(PrefixSet::cylinder(2))});
  Node t = n({2, 1});
  TriState v = s.decide(t);
  REQUIRE(v != TriState::Undetermined);
  CHECK(s.decide(t.extended(9)) == v);
  CHECK(s.decide(t.extended(9).extended(0)) == v);
}

TEST_CASE("child profiles isolate the finitely many special directions") {
  PrefixSet s = PrefixSet::basic(n({1, 2}));
  auto root = s.child_profile(Node{});
  CHECK(root.special == std::vector<Value>{1});
  CHECK(root.default_verdict == TriState::AllOut);
  auto below = s.child_profile(n({1}));
  CHECK(below.special == std::vector<Value>{2});
  CHECK(below.default_verdict == TriState::AllOut);
  // beyond the specials the default is the truth
  CHECK(s.decide(n({1, 5})) == below.default_verdict);
}

TEST_CASE("set specs parse and describe consistently") {
  PrefixSet s = PrefixSet::parse("union(cylinder:0,basic:(1,2))");
  CHECK(s.decide(n({0})) == TriState::AllIn);
  CHECK(s.decide(n({1, 2})) == TriState::AllIn);
  CHECK(s.decide(n({3})) == TriState::AllOut);

  CHECK(PrefixSet::parse("not(empty)").decide(Node{}) == TriState::AllIn);
  CHECK(PrefixSet::parse("inter(full,cylinder:2)").decide(n({2})) == TriState::AllIn);
  CHECK(PrefixSet::parse("basic:()").decide(Node{}) == TriState::AllIn);
  CHECK_THROWS_AS(PrefixSet::parse("union(cylinder:0"), std::invalid_argument);
  CHECK_THROWS_AS(PrefixSet::parse("gibberish"), std::invalid_argument);

  nlohmann::json d = s.describe();
  CHECK(d.at("set") == "union");
  CHECK(d.at("parts").size() == 2);
  CHECK(d.at("parts")[1].at("node") == nlohmann::json::array({1, 2}));
}

TEST_CASE("avoidance witness on the full tree") {
  auto [tree, set] = cylinder(0);
  WitnessReport rep = avoid_subtree(full_tree(), Kind::CompleteLaver, set, 5, 5);
  REQUIRE(rep.outcome == WitnessOutcome::DisjointWitness);
  REQUIRE(rep.subtree.has_value());
  REQUIRE(rep.subtree_tree.has_value());
  CHECK(!rep.subtree->contains(n({0})));
  CHECK(rep.subtree->contains(n({1})));
  for (const Node& t : rep.subtree->nodes())
    if (!t.empty()) CHECK(set.decide(t) == TriState::AllOut);
  CHECK(!rep.subtree_tree->member(n({0})));
  CHECK(rep.subtree_tree->member(n({1, 0})));
}

TEST_CASE("avoidance runs out on the cylinder itself") {
  auto [tree, set] = cylinder(0);
  WitnessReport rep = avoid_subtree(tree, Kind::Laver, set, 4, 4);
  CHECK(rep.outcome == WitnessOutcome::Exhausted);
  CHECK(!rep.subtree.has_value());
}

TEST_CASE("the inside witness rescues sets the tree lives in") {
  auto [tree, set] = cylinder(0);
  WitnessReport rep = measurability_witness(tree, Kind::Laver, set, 4, 4);
  REQUIRE(rep.outcome == WitnessOutcome::InsideWitness);
  REQUIRE(rep.subtree.has_value());
  for (const Node& t : rep.subtree->nodes())
    if (!t.empty()) CHECK(set.decide(t) == TriState::AllIn);
}

TEST_CASE("per-piece avoidance coexists with a joint level-one cover") {
  SigmaUnionReport rep = sigma_union_check(4, 4, 4);
  CHECK(rep.pieces.size() == 4);
  CHECK(rep.all_witnessed);
  CHECK(rep.cover_holds);
  for (bool covered : rep.level_one_covered) CHECK(covered);
}

TEST_CASE("hit and miss evidence for a clopen set") {
  auto [tree, set] = cylinder(0);
  (void)tree;
  auto rows = bernstein_check(set, {full_tree(), cylinder_tree(1)}, 4, 4);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].hit);
  CHECK(!rows[0].miss);  // the full tree leaves nothing outside itself
  CHECK(!rows[1].hit);   // the 1-cylinder never enters the 0-cylinder
  CHECK(rows[1].miss);

  PrefixSet pair = PrefixSet::parse("union(cylinder:0,cylinder:1)");
  auto both = bernstein_check(pair, {cylinder_tree(0)}, 4, 4);
  REQUIRE(both.size() == 1);
  CHECK(both[0].hit);
  CHECK(both[0].miss);  // branches through (1) escape the 0-cylinder
}

TEST_CASE("witness reports serialize with their outcome") {
  auto [tree, set] = cylinder(0);
  (void)tree;
  WitnessReport rep = avoid_subtree(full_tree(), Kind::Miller, set, 3, 3);
  nlohmann::json j = rep;
  CHECK(j.at("outcome").get<std::string>() == witness_outcome_name(rep.outcome));
  CHECK(j.contains("subtree"));
}
