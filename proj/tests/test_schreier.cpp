#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "irswalk/green.hpp"
#include "irswalk/locality.hpp"
#include "irswalk/schreier.hpp"
#include "irswalk/walks.hpp"

using namespace irswalk;

namespace {
constexpr Letter A = 1, B = 2;
constexpr Letter Ai = -1, Bi = -2;

// test fixture: one rewired edge on the a-line
struct CorruptedOracle {
  using vertex_type = ZsVertex;
  ZsOracle base{2, 1};
  vertex_type root() const { return base.root(); }
  vertex_type step(const vertex_type& v, Letter l) const {
    if (v.pos == 3 && l == A) return {9};
    return base.step(v, l);
  }
  int rank() const { return 2; }
  std::string describe(const vertex_type& v) const { return base.describe(v); }
};
}  // namespace

TEST_CASE("line oracle action") {
  ZsOracle za(2, 1);
  CHECK(act(za, za.root(), word_of({A})).pos == 1);
  CHECK(act(za, za.root(), word_of({B})).pos == 0);
  CHECK(act(za, za.root(), word_of({A, A, A, B, Ai})).pos == 2);
  ZsOracle zb(2, 2);
  CHECK(act(zb, zb.root(), word_of({A, A, A, A})).pos == 0);

  Rng rng(1);
  for (int it = 0; it < 500; ++it) {
    const Word g = random_reduced_word(2, static_cast<std::int64_t>(rng.below(20)), rng);
    CHECK(act(za, za.root(), g).pos == pi_s(g, 1));
    CHECK(act(za, za.root(), g * g.inverse()).pos == 0);
  }
}

TEST_CASE("nil Cayley oracle sees the commutator") {
  NilCayleyOracle nil(2);
  const Word comm = word_of({Ai, Bi, A, B});
  CHECK_FALSE(act(nil, nil.root(), comm).is_identity());
  CHECK(act(nil, nil.root(), comm * comm.inverse()).is_identity());
}

TEST_CASE("glued tree embeds the ball") {
  GluedOracle o(4, 2);
  for (const auto& f : ball(2, 4)) {
    const auto v = act(o, o.root(), f);
    REQUIRE(v.kind == GluedVertex::Kind::tree);
    CHECK(v.leaf == f);
  }
}

TEST_CASE("leaf round trip through the nil copy") {
  GluedOracle o(4, 2);
  const Word f = parse_word("abab", 2);  // leaf ending in b
  const auto vf = act(o, o.root(), f);
  REQUIRE(vf.kind == GluedVertex::Kind::tree);
  const auto via_copy = o.step(vf, A);
  REQUIRE(via_copy.kind == GluedVertex::Kind::copy);
  CHECK(o.step(via_copy, Ai) == vf);
  // and the other seam direction
  const auto back = o.step(vf, Ai);
  REQUIRE(back.kind == GluedVertex::Kind::copy);
  CHECK(back.elt.is_identity());
  CHECK(o.step(back, A) == vf);
}

TEST_CASE("action is a homomorphism on the glued graph") {
  GluedOracle o(3, 2);
  Rng rng(2);
  const auto window = bfs_ball(o, o.root(), 5);
  for (int it = 0; it < 400; ++it) {
    const auto& v = window.vertices[static_cast<std::size_t>(rng.below(window.vertices.size()))];
    const Word g = random_reduced_word(2, static_cast<std::int64_t>(rng.below(8)), rng);
    const Word h = random_reduced_word(2, static_cast<std::int64_t>(rng.below(8)), rng);
    CHECK(act(o, v, g * h) == act(o, act(o, v, g), h));
    CHECK(act(o, v, Word{}) == v);
  }
}

TEST_CASE("no short word stabilizes the glued root") {
  GluedOracle o(3, 2);
  for (const auto& g : ball(2, 6)) {
    if (g.empty()) continue;
    CHECK_FALSE(act(o, o.root(), g) == o.root());
  }
}

TEST_CASE("properness on windows") {
  ZsOracle za(2, 1);
  std::vector<ZsVertex> window;
  for (int i = -5; i <= 5; ++i) window.push_back({i});
  CHECK(verify_properness(za, window).ok());

  GluedOracle glued(4, 2);
  const auto ball7 = bfs_ball(glued, glued.root(), 7);
  const auto rep = verify_properness(glued, ball7.vertices);
  CHECK(rep.ok());
  CHECK(rep.checked == static_cast<std::int64_t>(ball7.vertices.size()));

  CorruptedOracle bad;
  std::vector<ZsVertex> win2;
  for (int i = 0; i <= 5; ++i) win2.push_back({i});
  const auto bad_rep = verify_properness(bad, win2);
  CHECK_FALSE(bad_rep.ok());
  CHECK_FALSE(bad_rep.violations.empty());
}

TEST_CASE("rad verifier") {
  for (int n = 2; n <= 6; ++n) {
    GluedOracle o(n, 2);
    CHECK(verify_rad(o, n));
  }
  GluedOracle o6(6, 2);
  const auto b = bfs_ball(o6, o6.root(), 6);
  CHECK(b.vertices.size() == 1457);

  ZsOracle za(2, 1);
  CHECK_FALSE(verify_rad(za, 1));

  GluedOracle o3(3, 2);
  CHECK_FALSE(verify_rad(o3, 4));  // guarantee is one-sided
}

TEST_CASE("ball signatures compare rooted labeled balls") {
  ZsOracle za(2, 1);
  CHECK(ball_signature(za, {0}, 3) == ball_signature(za, {17}, 3));
  ZsOracle zb(2, 2);
  CHECK(ball_signature(za, {0}, 1) != ball_signature(zb, {0}, 1));

  NilCayleyOracle nil(2);
  Rng rng(3);
  const auto g = nil_project(random_reduced_word(2, 9, rng), 2);
  CHECK(ball_signature(nil, nil.root(), 2) == ball_signature(nil, g, 2));

  // a deep line vertex on the glued graph looks like the matching line
  GluedOracle glued(4, 2);
  GluedVertex deep;
  deep.kind = GluedVertex::Kind::ray;
  deep.leaf = parse_word("abab", 2);
  deep.line_gen = 2;
  deep.line_pos = 9;
  CHECK(ball_signature(glued, deep, 2) == ball_signature(zb, {0}, 2));
}

TEST_CASE("graph prefix fast path and fallback agree") {
  GluedOracle o5(5, 2);
  const auto v = act(o5, o5.root(), parse_word("ababa", 2));
  CHECK(graph_prefix(o5, v, 2) == parse_word("ab", 2));
  CHECK(graph_prefix(o5, o5.root(), 3).empty());
  const auto vc = act(o5, o5.root(), parse_word("babab", 2) * word_of({A}));
  REQUIRE(vc.kind == GluedVertex::Kind::copy);
  CHECK(graph_prefix(o5, vc, 3) == parse_word("bab", 2));

  GluedOracle o3(3, 2);
  Rng rng(4);
  int checked = 0;
  while (checked < 60) {
    const Word g = random_reduced_word(2, 3 + static_cast<std::int64_t>(rng.below(5)), rng);
    const auto v = act(o3, o3.root(), g);
    for (int r = 1; r <= 3; ++r) {
      CHECK(graph_prefix(o3, v, r) == graph_prefix_generic(o3, v, r, true));
    }
    ++checked;
  }
}

TEST_CASE("locality of far vertices") {
  GluedOracle o(4, 2);
  const int r = 2;
  const std::int64_t R = o.depth() + r + 1;
  CopyDistanceTable copy_dist(2, static_cast<int>(R) - o.depth() + 26);
  const auto refs = locality_references(o, r, copy_dist);
  Rng rng(5);
  const auto far = sample_far_vertices(o, R, 400, copy_dist, rng);
  const auto rep = verify_locality(o, r, R, refs, far, copy_dist);
  INFO("violation example: " << (rep.violation_examples.empty() ? "none" : rep.violation_examples[0]));
  CHECK(rep.ok());
  CHECK(rep.checked >= 300);
  // both interior families appear
  std::int64_t line_hits = 0, nil_hits = 0;
  for (const auto& [label, cnt] : rep.matched) {
    if (label.rfind("line", 0) == 0) line_hits += cnt;
    if (label == "nil-interior") nil_hits += cnt;
  }
  CHECK(line_hits > 0);
  CHECK(nil_hits > 0);
}

TEST_CASE("near vertices are excluded from locality checks") {
  GluedOracle o(4, 2);
  CopyDistanceTable copy_dist(2, 30);
  const auto refs = locality_references(o, 2, copy_dist);
  std::vector<GluedVertex> inside{o.root()};
  const auto rep = verify_locality(o, 2, 7, refs, inside, copy_dist);
  CHECK(rep.checked == 0);
}

TEST_CASE("product oracle acts componentwise") {
  ProductOracle prod(ZsOracle(2, 1), ZsOracle(2, 2));
  Rng rng(6);
  for (int it = 0; it < 200; ++it) {
    const Word g = random_reduced_word(2, static_cast<std::int64_t>(rng.below(16)), rng);
    const auto v = act(prod, prod.root(), g);
    CHECK(v.first.pos == pi_s(g, 1));
    CHECK(v.second.pos == pi_s(g, 2));
  }
  std::vector<ProductOracle<ZsOracle, ZsOracle>::vertex_type> window;
  for (int i = -2; i <= 2; ++i)
    for (int j = -2; j <= 2; ++j) window.push_back({{i}, {j}});
  CHECK(verify_properness(prod, window).ok());
}

TEST_CASE("green estimates: transient vs recurrent") {
  const auto srw = StepLaw::srw(2);

  GluedOracle glued(4, 2);
  const auto root = glued.root();
  const auto transient = green_estimate(
      glued, root, [&](const GluedVertex& v) { return v == root; }, 0, srw, 4000, 1200,
      /*seed=*/11);
  CHECK(transient.stabilized);
  CHECK(transient.mean >= 1.0);  // counts the start itself
  CHECK(transient.mean < 3.0);

  ZsOracle za(2, 1);
  const auto recurrent = green_estimate(
      za, za.root(), [](const ZsVertex& v) { return v.pos == 0; }, 0, srw, 1500, 2000,
      /*seed=*/12);
  CHECK_FALSE(recurrent.stabilized);

  const auto degenerate = green_estimate(
      za, za.root(), [](const ZsVertex& v) { return v.pos == 0; }, 10, srw, 10, 5,
      /*seed=*/13);
  CHECK(degenerate.horizon_warning);
  CHECK(degenerate.mean == 0.0);
}

TEST_CASE("ball visit counts are monotone under quotients") {
  // the nilpotent quotient maps onto its abelianization; visits to the
  // radius-k root ball can only grow downstream
  const auto srw = StepLaw::srw(2);
  const int k = 2;

  NilCayleyOracle nil(2);
  std::set<std::string> nil_ball_members;
  for (const auto& [e, dist] : nil_ball(2, k)) nil_ball_members.insert(e.describe());
  const auto g_nil = green_estimate(
      nil, nil.root(),
      [&](const NilElement& e) { return nil_ball_members.count(e.describe()) > 0; }, 0,
      srw, 3000, 600, 21);

  AbelianOracle ab(2);
  const auto g_ab = green_estimate(
      ab, ab.root(),
      [&](const ZdVertex& v) {
        return std::abs(v.coord[0]) + std::abs(v.coord[1]) <= k;
      },
      0, srw, 3000, 600, 22);

  CHECK(g_nil.mean <= g_ab.mean + 1.96 * std::sqrt(g_nil.stderror * g_nil.stderror +
                                                   g_ab.stderror * g_ab.stderror));
}

TEST_CASE("visit profile on the free group") {
  const auto srw = StepLaw::srw(2);
  const std::vector<int> rs{0, 1, 2, 3, 4, 5, 6, 7, 8};
  const auto prof = visit_count_profile(srw, rs, 20000, 1200, 31);
  // expected visits to the identity alone: 1/(1 - 1/3) = 1.5
  CHECK(std::abs(prof.rows[0].mean - 1.5) < 0.1);
  for (std::size_t i = 1; i < prof.rows.size(); ++i)
    CHECK(prof.rows[i].mean >= prof.rows[i - 1].mean);
  CHECK(prof.growth_exponent <= 3.0);
}
