#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <vector>

#include "irswalk/words.hpp"

using namespace irswalk;

namespace {
constexpr Letter A = 1, B = 2;
constexpr Letter Ai = -1, Bi = -2;
}  // namespace

TEST_CASE("free reduction and multiplication") {
  CHECK(word_of({A, Ai}).empty());
  CHECK(word_of({A, B, Bi, A}) == word_of({A, A}));
  CHECK(word_of({A, B}).inverse() == word_of({Bi, Ai}));

  Rng rng(1);
  for (int it = 0; it < 2000; ++it) {
    const Word u = random_reduced_word(2, static_cast<std::int64_t>(rng.below(12)), rng);
    const Word v = random_reduced_word(2, static_cast<std::int64_t>(rng.below(12)), rng);
    const Word w = random_reduced_word(2, static_cast<std::int64_t>(rng.below(12)), rng);
    CHECK((u * u.inverse()).empty());
    CHECK((u * v) * w == u * (v * w));
    CHECK((u * v).size() <= u.size() + v.size());
    // anti-homomorphism
    CHECK((u * v).inverse() == v.inverse() * u.inverse());
  }
}

TEST_CASE("reduction is confluent over shuffled concatenations") {
  Rng rng(2);
  for (int it = 0; it < 500; ++it) {
    std::vector<Letter> raw;
    for (int i = 0; i < 20; ++i)
      raw.push_back(detail::letter_at(2, static_cast<int>(rng.below(4))));
    // reduce all at once vs incrementally in two halves
    const Word direct = Word::reduce(raw);
    Word left = Word::reduce(std::span<const Letter>(raw.data(), 11));
    const Word right = Word::reduce(std::span<const Letter>(raw.data() + 11, 9));
    left *= right;
    CHECK(direct == left);
  }
}

TEST_CASE("rad of short words") {
  CHECK(rad(word_of({A})) == 0);
  CHECK(rad(word_of({A, B, Ai})) == 1);
  CHECK(rad(word_of({A, B})) == 0);
  CHECK_THROWS_AS(rad(Word{}), std::domain_error);
}

TEST_CASE("rad properties on random words") {
  Rng rng(3);
  for (int it = 0; it < 4000; ++it) {
    const auto len = 1 + static_cast<std::int64_t>(rng.below(24));
    const Word g = random_reduced_word(2, len, rng);
    const auto r = rad(g);
    CHECK(r >= 0);
    CHECK(2 * r < g.size());
    CHECK(r == rad(g.inverse()));
  }
  // words with a forced cancelling affix
  Rng rng2(4);
  for (int it = 0; it < 500; ++it) {
    const Word w = random_reduced_word(2, 4, rng2);
    Word mid = random_reduced_word(2, 3, rng2);
    const Word g = w * mid * w.inverse();
    if (g.empty()) continue;
    CHECK(rad(g) >= std::min<std::int64_t>(4, rad(g)));
    CHECK(2 * rad(g) < g.size());
  }
}

TEST_CASE("ball enumeration matches the closed form") {
  for (int d : {2, 3}) {
    for (int r = 0; r <= (d == 2 ? 6 : 4); ++r) {
      const auto words = ball(d, r);
      CHECK(static_cast<double>(words.size()) == ball_size(d, r));
      std::set<std::string> uniq;
      for (const auto& w : words) {
        CHECK(w.size() <= r);
        CHECK(w == Word::reduce(w.letters()));
        uniq.insert(format_word(w));
      }
      CHECK(uniq.size() == words.size());
    }
  }
  CHECK(ball(2, 0).size() == 1);
  CHECK(ball(2, 1).size() == 5);
  CHECK(ball(2, 6).size() == 1457);
  CHECK_THROWS_AS(ball(2, 30), resource_error);
}

TEST_CASE("word prefixes") {
  const Word w = word_of({A, B, A, B});
  CHECK(w.prefix(2) == word_of({A, B}));
  CHECK(word_of({A}).prefix(5) == word_of({A}));
  CHECK(Word{}.prefix(3).empty());
}

TEST_CASE("text round trip") {
  CHECK(format_word(word_of({A, B, Ai})) == "abA");
  CHECK(parse_word("abA", 2) == word_of({A, B, Ai}));
  CHECK(parse_word("a1 a2", 2) == parse_word("ab", 2));
  CHECK(parse_word("a2 A1", 3) == word_of({2, -1}));
  CHECK(parse_word("1", 2).empty());
  CHECK(format_word(Word{}) == "1");
  CHECK_THROWS_AS(parse_word("z", 2), std::invalid_argument);
  CHECK_THROWS_AS(parse_word("a7", 3), std::invalid_argument);

  Rng rng(5);
  for (int it = 0; it < 300; ++it) {
    const Word w = random_reduced_word(3, static_cast<std::int64_t>(rng.below(15)), rng);
    CHECK(parse_word(format_word(w), 3) == w);
  }
}

TEST_CASE("packed keys round trip") {
  WordPacker pk(2);
  REQUIRE(pk.capacity() >= 12);
  Rng rng(6);
  std::set<std::uint64_t> keys;
  for (int it = 0; it < 2000; ++it) {
    const Word w = random_reduced_word(2, static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(pk.capacity()))), rng);
    const auto k = pk.pack(w);
    CHECK(pk.unpack(k) == w);
    keys.insert(k);
  }
  WordPacker pk3(3);
  const Word w3 = random_reduced_word(3, 8, rng);
  CHECK(pk3.unpack(pk3.pack(w3)) == w3);
}

TEST_CASE("random reduced words are reduced and uniform on first letters") {
  Rng rng(7);
  int count[4] = {0, 0, 0, 0};
  for (int it = 0; it < 8000; ++it) {
    const Word w = random_reduced_word(2, 5, rng);
    REQUIRE(w.size() == 5);
    CHECK(w == Word::reduce(w.letters()));
    ++count[detail::letter_index(2, w[0])];
  }
  for (int i = 0; i < 4; ++i) CHECK(std::abs(count[i] - 2000) < 200);
}
