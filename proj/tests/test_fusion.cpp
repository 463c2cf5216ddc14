#include <map>
#include <stdexcept>

#include "baire/fusion.hpp"
#include "doctest.h"

using namespace baire;

namespace {

Node n(std::initializer_list<Value> vs) { return Node{std::vector<Value>(vs)}; }
Rational q(const char* s) { return parse_rational(s); }

using GridMap = std::map<std::vector<Value>, Node>;

GridMap grid_of(const FusionState& st) {
  GridMap out;
  st.for_each_grid_node([&](const std::vector<Value>& w, const Node& t) { out[w] = t; });
  return out;
}

// I_k centered at the k-th dyadic with measure 4^-k
RationalInterval quarter_interval(int k) {
  Rational half = pow2_neg(2 * k + 1);
  Rational c = dyadic_rational(k);
  return RationalInterval(c - half, c + half);
}

}  // namespace

TEST_CASE("stage zero picks the first sufficiently small root image") {
  FusionState tight = fusion_init(full_tree(), RationalInterval(q("0"), q("1/4")), FusionMode::Miller);
  CHECK(tight.grid_root() == n({1}));
  CHECK(tight.stage() == 0);
  CHECK(tight.grid_size() == 1);
  CHECK(tight.infinitude_claimed());

  BoundCertificate base = verify_bound(tight);
  CHECK(base.stage == 0);
  CHECK(base.lhs == q("3/8"));
  CHECK(base.rhs == q("1/2"));
  CHECK(base.holds);

  FusionState loose = fusion_init(full_tree(), RationalInterval(q("0"), q("1")), FusionMode::Miller);
  CHECK(loose.grid_root() == n({0}));

  // a stem whose image is already small enough is taken as-is
  FusionState stem_kept =
      fusion_init(cylinder_tree(0), RationalInterval(q("0"), q("1/2")), FusionMode::Laver);
  CHECK(stem_kept.grid_root() == n({0}));
}

TEST_CASE("locked stage zero restricts to the accumulation tail") {
  FusionState st =
      fusion_init(cylinder_tree(0), RationalInterval(q("0"), q("1/2")), FusionMode::Laver, true);
  CHECK(st.stem_locked());
  CHECK(st.grid_root() == n({0}));
  CHECK(st.cover_measure() == q("1/4"));

  BoundCertificate base = verify_bound(st);
  CHECK(base.lhs == q("3/4"));
  CHECK(base.rhs == q("1"));
  CHECK(base.holds);
}

TEST_CASE("stage zero rejects unfit inputs") {
  RationalInterval i0(q("0"), q("1/4"));
  CHECK_THROWS_AS(fusion_init(full_tree(), i0, FusionMode::Laver, true), std::domain_error);
  CHECK_THROWS_AS(fusion_init(cylinder_tree(0), i0, FusionMode::Miller, true), std::domain_error);
  CHECK_THROWS_AS(fusion_init(bounded_tree(2), i0, FusionMode::Miller), std::domain_error);
  CHECK_THROWS_AS(fusion_init(bounded_tree(2), i0, FusionMode::Laver), std::domain_error);
}

TEST_CASE("the first two steps commit the expected grid") {
  FusionState st0 = fusion_init(full_tree(), quarter_interval(1), FusionMode::Miller);
  REQUIRE(st0.grid_root() == n({1}));

  FusionState st1 = fusion_step(st0, quarter_interval(1));
  CHECK(st1.stage() == 1);
  CHECK(st1.grid_size() == 2);
  GridMap g1 = grid_of(st1);
  CHECK(g1.at({}) == n({1}));
  CHECK(g1.at({0}) == n({1, 0}));

  BoundCertificate c1 = verify_bound(st1);
  CHECK(c1.lhs == q("3/8"));
  CHECK(c1.rhs == q("1/2"));
  CHECK(c1.holds);

  FusionState st2 = fusion_step(st1, quarter_interval(2));
  CHECK(st2.stage() == 2);
  CHECK(st2.grid_size() == 7);
  GridMap g2 = grid_of(st2);
  CHECK(g2.at({}) == n({1}));
  CHECK(g2.at({0}) == n({1, 0}));
  CHECK(g2.at({1}) == n({1, 3}));  // threshold 3: the old cover shrank by 2^-3
  CHECK(g2.at({0, 0}) == n({1, 0, 1}));
  CHECK(g2.at({0, 1}) == n({1, 0, 2}));
  CHECK(g2.at({1, 0}) == n({1, 3, 0}));
  CHECK(g2.at({1, 1}) == n({1, 3, 1}));

  BoundCertificate c2 = verify_bound(st2);
  CHECK(c2.lhs == q("5/32"));
  CHECK(c2.rhs == q("3/16"));
  CHECK(c2.holds);

  CHECK(st2.previous()->stage() == 1);
  CHECK(st2.history().size() == 3);
}

TEST_CASE("stage trees respect thresholds outside the committed grid") {
  FusionState st0 = fusion_init(full_tree(), quarter_interval(1), FusionMode::Miller);
  FusionState st2 = fusion_step(fusion_step(st0, quarter_interval(1)), quarter_interval(2));
  LazyTree t = st2.tree();

  CHECK(t.member(n({1})));
  CHECK(t.member(n({1, 0})));
  CHECK(t.member(n({1, 3})));
  CHECK(!t.member(n({1, 1})));     // below the recorded threshold, not committed
  CHECK(!t.member(n({2})));        // off the root chain
  CHECK(t.member(n({1, 5})));      // past the threshold the base takes over
  CHECK(!t.member(n({1, 0, 0})));  // below threshold 1
  CHECK(t.member(n({1, 3, 7})));   // frontier words stay free

  CHECK(t.successors(Node{}, 3) == std::vector<Value>{1});
  CHECK(t.successors(n({1}), 4) == std::vector<Value>{0, 3, 4, 5});
  CHECK(t.successors(n({1, 0}), 4) == std::vector<Value>{1, 2, 3, 4});
  CHECK(t.kind_claim() == Kind::Miller);
}

TEST_CASE("retention replay covers every stage and notices tampering") {
  FusionState st0 = fusion_init(full_tree(), quarter_interval(1), FusionMode::Miller);
  FusionState st1 = fusion_step(st0, quarter_interval(1));
  FusionState st2 = fusion_step(st1, quarter_interval(2));

  RetentionReport rep = fusion_limit(st2.history());
  CHECK(rep.checked == 10);
  CHECK(rep.window.contains(n({1, 0})));

  FusionState bad = st2.with_grid_value_overridden({0}, 5);
  CHECK_THROWS_WITH_AS(fusion_limit(bad.history()),
                       doctest::Contains("altered"), InvariantViolation);

  CHECK_THROWS_AS(st2.with_grid_value_overridden({7}, 1), std::invalid_argument);
  CHECK_THROWS_AS(st2.with_grid_value_overridden({0, 0, 0}, 1), std::invalid_argument);

  CHECK_THROWS_AS(fusion_limit({st0, st2}), std::invalid_argument);
}

TEST_CASE("laver locking keeps the stem through the steps") {
  FusionState st =
      fusion_init(cylinder_tree(0), RationalInterval(q("0"), q("1/2")), FusionMode::Laver, true);
  for (int k = 1; k <= 3; ++k) {
    st = fusion_step(st, quarter_interval(k));
    CHECK(verify_bound(st).holds);
    CHECK(st.grid_root() == n({0}));
  }
  CHECK(stem(st.tree(), 8).stem == n({0}));
  CHECK(st.tree().kind_claim() == Kind::Laver);
  RetentionReport rep = fusion_limit(st.history());
  CHECK(rep.checked == 1 + 2 + 7 + 40);
}

TEST_CASE("root decomposition splits a stemless tree into laver pieces") {
  CompleteLaverDecomposition dec = complete_laver_decompose(full_tree(), 8);
  CHECK(dec.known_pieces() == 8);
  CHECK(dec.piece_value(3) == 3);
  LazyTree p = dec.piece(3);
  CHECK(p.member(n({3, 1})));
  CHECK(!p.member(n({2})));
  CHECK(stem(p, 8).stem == n({3}));

  CHECK_THROWS_AS(complete_laver_decompose(cylinder_tree(0)), std::domain_error);

  // piece windows plus the root reassemble the original window
  FiniteTreeApprox whole = truncate(full_tree(), 2, 3);
  std::vector<Node> rebuilt{Node{}};
  for (std::size_t i = 0; i < 3; ++i) {
    FiniteTreeApprox piece_window = truncate(dec.piece(i), 2, 3);
    for (const Node& t : piece_window.nodes())
      if (!t.empty()) rebuilt.push_back(t);
  }
  std::sort(rebuilt.begin(), rebuilt.end(), node_less);
  rebuilt.erase(std::unique(rebuilt.begin(), rebuilt.end()), rebuilt.end());
  CHECK(rebuilt == whole.nodes());
}

TEST_CASE("dense-cover run certifies stage and tail bounds") {
  GdeltaRun run = gdelta_construction(full_tree(), FusionMode::Miller, 3);
  REQUIRE(run.pieces.size() == 1);
  const GdeltaPiece& p = run.pieces[0];
  CHECK(p.label == "miller");
  REQUIRE(p.rows.size() == 3);
  CHECK(p.rows[0].stage == 1);
  CHECK(p.rows[2].target == q("1/8"));
  CHECK(p.rows[2].target_holds);
  REQUIRE(p.tails.size() == 3);
  CHECK(p.tails[0].bound == 1);
  for (const GdeltaTailRow& t : p.tails) CHECK(t.holds);
  CHECK(p.all_hold);
  CHECK(run.all_hold);
  CHECK(run.union_stage_count == 3);

  // interval widths follow the declared schedule
  CHECK(run.intervals[0].measure() == q("1/4"));
  CHECK(run.intervals[1].measure() == q("1/16"));
  CHECK(run.intervals[2].measure() == q("1/144"));

  nlohmann::json j = run;
  CHECK(j.at("all_hold") == true);
  CHECK(j.at("pieces")[0].at("rows").size() == 3);
}

TEST_CASE("dense-cover run validates its arguments") {
  CHECK_THROWS_AS(gdelta_construction(full_tree(), FusionMode::Miller, 2), std::invalid_argument);
  std::vector<Rational> dup = {q("1/2"), q("1/2"), q("3/4")};
  CHECK_THROWS_AS(gdelta_construction(full_tree(), FusionMode::Miller, 3, false, 4, dup),
                  std::invalid_argument);
}

TEST_CASE("decomposed dense-cover run locks each piece stem") {
  GdeltaRun run = gdelta_construction(full_tree(), FusionMode::Miller, 3, true, 2);
  REQUIRE(run.pieces.size() == 2);
  CHECK(run.pieces[0].label == "piece-0");
  CHECK(run.pieces[1].label == "piece-1");
  CHECK(run.pieces[0].final_state.grid_root() == n({0}));
  CHECK(run.pieces[1].final_state.grid_root() == n({1}));
  CHECK(run.pieces[0].final_state.stem_locked());
  CHECK(run.all_hold);
}

TEST_CASE("state descriptions carry the run parameters") {
  FusionState st0 = fusion_init(full_tree(), quarter_interval(1), FusionMode::Miller);
  nlohmann::json d = st0.describe();
  CHECK(d.at("stage") == 0);
  CHECK(d.at("mode") == "miller");
  CHECK(d.at("grid_root") == nlohmann::json::array({1}));
}
