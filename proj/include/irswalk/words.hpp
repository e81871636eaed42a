#pragma once

// Exact arithmetic in the free group F_d.  A letter is a small signed
// integer: +i is the generator a_i, -i its inverse.  Words are kept
// freely reduced at all times; the identity is the empty word.

#include <bit>
#include <cctype>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "irswalk/errors.hpp"
#include "irswalk/rng.hpp"

namespace irswalk {

using Letter = std::int8_t;

constexpr Letter letter_inverse(Letter s) { return static_cast<Letter>(-s); }
constexpr int letter_gen(Letter s) { return s > 0 ? s : -s; }

inline void check_letter(Letter s, int d) {
  const int g = letter_gen(s);
  if (s == 0 || g < 1 || g > d)
    throw std::invalid_argument("letter outside generator range [1," +
                                std::to_string(d) + "]");
}

class Word {
 public:
  Word() = default;

  // Free-reduces an arbitrary letter sequence.
  static Word reduce(std::span<const Letter> raw) {
    Word w;
    w.letters_.reserve(raw.size());
    for (Letter s : raw) w.push(s);
    return w;
  }
  static Word reduce(std::initializer_list<Letter> raw) {
    return reduce(std::span<const Letter>(raw.begin(), raw.size()));
  }

  bool empty() const { return letters_.empty(); }
  std::int64_t size() const { return static_cast<std::int64_t>(letters_.size()); }
  std::span<const Letter> letters() const { return letters_; }
  Letter back() const { return letters_.back(); }
  Letter operator[](std::int64_t i) const { return letters_[static_cast<std::size_t>(i)]; }

  // Appends one letter, cancelling against the current last letter.
  void push(Letter s) {
    if (!letters_.empty() && letters_.back() == letter_inverse(s)) {
      letters_.pop_back();
    } else {
      letters_.push_back(s);
    }
  }
  void pop() { letters_.pop_back(); }
  void clear() { letters_.clear(); }

  Word& operator*=(const Word& rhs) {
    for (Letter s : rhs.letters_) push(s);
    return *this;
  }
  friend Word operator*(Word lhs, const Word& rhs) {
    lhs *= rhs;
    return lhs;
  }

  Word inverse() const {
    Word w;
    w.letters_.reserve(letters_.size());
    for (auto it = letters_.rbegin(); it != letters_.rend(); ++it)
      w.letters_.push_back(letter_inverse(*it));
    return w;
  }

  Word prefix(std::int64_t r) const {
    Word w;
    const auto k = std::min<std::int64_t>(r, size());
    w.letters_.assign(letters_.begin(), letters_.begin() + k);
    return w;
  }

  bool operator==(const Word&) const = default;

  std::uint64_t hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (Letter s : letters_) {
      h ^= static_cast<std::uint8_t>(s);
      h *= 0x100000001b3ULL;
    }
    return h ^ (letters_.size() * 0x9e3779b97f4a7c15ULL);
  }

 private:
  std::vector<Letter> letters_;
};

inline Word word_of(std::initializer_list<Letter> raw) { return Word::reduce(raw); }

// rad(g): longest k with s_1..s_k = (s_{n-k+1}..s_n)^{-1}.  Undefined at
// the identity; free reduction forces the result below |g|/2.
inline std::int64_t rad(const Word& g) {
  if (g.empty()) throw std::domain_error("rad is undefined for the identity");
  const auto s = g.letters();
  const std::int64_t n = g.size();
  std::int64_t k = 0;
  while (k < n - 1 - k && s[static_cast<std::size_t>(k)] ==
                              letter_inverse(s[static_cast<std::size_t>(n - 1 - k)]))
    ++k;
  return k;
}

inline double ball_size(int d, int r) {
  // 1 + 2d((2d-1)^r - 1)/(2d-2)
  double q = 2.0 * d - 1.0, pw = 1.0;
  for (int i = 0; i < r; ++i) pw *= q;
  return 1.0 + 2.0 * d * (pw - 1.0) / (2.0 * d - 2.0);
}

// All reduced words of length <= r, each exactly once, in BFS order.
inline std::vector<Word> ball(int d, int r, std::int64_t cap = 50'000'000) {
  if (d < 2) throw std::invalid_argument("ball requires d >= 2");
  const double expected = ball_size(d, r);
  if (expected > static_cast<double>(cap))
    throw resource_error("ball of radius " + std::to_string(r) + " has " +
                         std::to_string(expected) + " words, above cap");
  std::vector<Word> out;
  out.reserve(static_cast<std::size_t>(expected));
  out.emplace_back();
  std::size_t level_begin = 0;
  for (int depth = 0; depth < r; ++depth) {
    const std::size_t level_end = out.size();
    for (std::size_t i = level_begin; i < level_end; ++i) {
      for (int gen = 1; gen <= d; ++gen) {
        for (int sign = 0; sign < 2; ++sign) {
          const Letter s = static_cast<Letter>(sign ? -gen : gen);
          const Word& w = out[i];
          if (!w.empty() && w.back() == letter_inverse(s)) continue;
          Word nxt = w;
          nxt.push(s);
          out.push_back(std::move(nxt));
        }
      }
    }
    level_begin = level_end;
  }
  return out;
}

namespace detail {
// letters enumerated as +1..+d, -1..-d
constexpr Letter letter_at(int d, int idx) {
  return static_cast<Letter>(idx < d ? idx + 1 : -(idx - d + 1));
}
constexpr int letter_index(int d, Letter s) {
  return s > 0 ? s - 1 : d - s - 1;
}
}  // namespace detail

// Uniform random reduced word of exactly the given length.
inline Word random_reduced_word(int d, std::int64_t length, Rng& rng) {
  Word w;
  for (std::int64_t i = 0; i < length; ++i) {
    if (w.empty()) {
      w.push(detail::letter_at(d, static_cast<int>(rng.below(static_cast<std::uint64_t>(2 * d)))));
    } else {
      // uniform over the 2d-1 letters that do not cancel
      const int forb = detail::letter_index(d, letter_inverse(w.back()));
      auto pick = static_cast<int>(rng.below(static_cast<std::uint64_t>(2 * d - 1)));
      if (pick >= forb) ++pick;
      w.push(detail::letter_at(d, pick));
    }
  }
  return w;
}

// --- text form -------------------------------------------------------------
//
// Compact form for d <= 26: lowercase a..z are generators, uppercase their
// inverses ("abA").  Indexed form for any d: "a3" is generator 3, "A3" its
// inverse, tokens separated by whitespace.  The parser accepts both.

inline std::string format_word(const Word& w, int d = 26) {
  std::string out;
  const bool compact = d <= 26;
  for (Letter s : w.letters()) {
    const int g = letter_gen(s);
    if (compact) {
      out += static_cast<char>((s > 0 ? 'a' : 'A') + g - 1);
    } else {
      if (!out.empty()) out += ' ';
      out += (s > 0 ? 'a' : 'A');
      out += std::to_string(g);
    }
  }
  if (out.empty()) out = "1";
  return out;
}

inline Word parse_word(const std::string& text, int d) {
  std::vector<Letter> raw;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c)) || c == '*' || c == '.') {
      ++i;
      continue;
    }
    if (c == '1' && raw.empty() && text.size() == 1) break;  // identity
    if (!std::isalpha(static_cast<unsigned char>(c)))
      throw std::invalid_argument("bad character in word: '" + std::string(1, c) + "'");
    const bool inv = std::isupper(static_cast<unsigned char>(c));
    int gen = std::tolower(static_cast<unsigned char>(c)) - 'a' + 1;
    ++i;
    if (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
      // indexed token: the letter names the series, the number the index
      if (std::tolower(static_cast<unsigned char>(c)) != 'a')
        throw std::invalid_argument("indexed letters use the 'a' series, got '" +
                                    std::string(1, c) + "'");
      gen = 0;
      while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
        gen = gen * 10 + (text[i] - '0');
        ++i;
      }
    }
    if (gen < 1 || gen > d)
      throw std::invalid_argument("generator index " + std::to_string(gen) +
                                  " outside [1," + std::to_string(d) + "]");
    raw.push_back(static_cast<Letter>(inv ? -gen : gen));
  }
  return Word::reduce(raw);
}

// --- fixed-width packing ---------------------------------------------------
//
// Packs a word into one 64-bit key (6 bits of length, then a fixed number
// of bits per letter).  Used as a hash-map key by the exact convolution.

struct WordPacker {
  explicit WordPacker(int d_) : d(d_) {
    bits = std::bit_width(static_cast<unsigned>(2 * d - 1));
    max_len = (64 - 6) / bits;
  }
  std::int64_t capacity() const { return max_len; }

  std::uint64_t pack(const Word& w) const {
    if (w.size() > max_len)
      throw resource_error("word of length " + std::to_string(w.size()) +
                           " does not fit a packed key");
    std::uint64_t key = static_cast<std::uint64_t>(w.size());
    int shift = 6;
    for (Letter s : w.letters()) {
      const std::uint64_t code =
          static_cast<std::uint64_t>((letter_gen(s) - 1) * 2 + (s < 0 ? 1 : 0));
      key |= code << shift;
      shift += bits;
    }
    return key;
  }

  Word unpack(std::uint64_t key) const {
    return unpack_len(key, static_cast<std::int64_t>(key & 0x3f));
  }

  // Right-multiplies a packed word by one letter, with cancellation, all
  // in the key domain.  Letter codes pair inverses by the low bit.
  std::uint64_t append_packed(std::uint64_t key, Letter s) const {
    const std::uint64_t mask = (1u << bits) - 1;
    const std::uint64_t code =
        static_cast<std::uint64_t>((letter_gen(s) - 1) * 2 + (s < 0 ? 1 : 0));
    std::uint64_t len = key & 0x3f;
    if (len > 0) {
      const int last_shift = 6 + static_cast<int>(len - 1) * bits;
      if (((key >> last_shift) & mask) == (code ^ 1)) {
        key &= ~(mask << last_shift);
        return (key & ~0x3fULL) | (len - 1);
      }
    }
    if (static_cast<std::int64_t>(len) >= max_len)
      throw resource_error("packed word overflow");
    key |= code << (6 + static_cast<int>(len) * bits);
    return (key & ~0x3fULL) | (len + 1);
  }

  Word unpack_len(std::uint64_t key, std::int64_t len) const {
    Word w;
    int shift = 6;
    for (std::int64_t i = 0; i < len; ++i) {
      const auto code = (key >> shift) & ((1u << bits) - 1);
      const int gen = static_cast<int>(code / 2) + 1;
      w.push(static_cast<Letter>((code & 1) ? -gen : gen));
      shift += bits;
    }
    return w;
  }

  int d;
  int bits;
  std::int64_t max_len;
};

}  // namespace irswalk
