#pragma once

// Arithmetic in the abelianization directions pi_s : F_d -> Z and in the
// free 2-step nilpotent quotient F_d / [F_d,[F_d,F_d]].
//
// Normal form: g = a_1^{x_1} ... a_d^{x_d} * prod_{i<j} c_ij^{y_ij} with
// c_ij = [a_i,a_j] = a_i^{-1} a_j^{-1} a_i a_j central.  Collecting a
// product into this form gives
//   (x,y)(x',y') = (x+x', y+y'+Q)   with  Q_ij = -x_j * x'_i .

#include <array>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "irswalk/errors.hpp"
#include "irswalk/words.hpp"

namespace irswalk {

inline constexpr int kMaxNilRank = 4;

inline std::int64_t pi_s(const Word& g, int s) {
  std::int64_t v = 0;
  for (Letter l : g.letters()) {
    if (letter_gen(l) == s) v += (l > 0) ? 1 : -1;
  }
  return v;
}

struct NilElement {
  std::int8_t d = 2;
  std::array<std::int32_t, kMaxNilRank> x{};
  std::array<std::int32_t, (kMaxNilRank * (kMaxNilRank - 1)) / 2> y{};

  static NilElement identity(int d) {
    if (d < 2 || d > kMaxNilRank)
      throw std::invalid_argument("nilpotent quotient supports 2 <= d <= " +
                                  std::to_string(kMaxNilRank));
    NilElement e;
    e.d = static_cast<std::int8_t>(d);
    return e;
  }

  static NilElement generator(int d, Letter s) {
    NilElement e = identity(d);
    check_letter(s, d);
    e.x[static_cast<std::size_t>(letter_gen(s) - 1)] = (s > 0) ? 1 : -1;
    return e;
  }

  // commutator coordinate index for 1 <= i < j <= d
  static std::size_t pair_index(int i, int j) {
    return static_cast<std::size_t>((j - 1) * (j - 2) / 2 + (i - 1));
  }

  bool is_identity() const {
    for (auto v : x)
      if (v) return false;
    for (auto v : y)
      if (v) return false;
    return true;
  }

  NilElement operator*(const NilElement& o) const {
    NilElement r = *this;
    for (int j = 2; j <= d; ++j)
      for (int i = 1; i < j; ++i)
        r.y[pair_index(i, j)] += o.y[pair_index(i, j)] - x[static_cast<std::size_t>(j - 1)] * o.x[static_cast<std::size_t>(i - 1)];
    for (int i = 0; i < d; ++i) r.x[static_cast<std::size_t>(i)] += o.x[static_cast<std::size_t>(i)];
    return r;
  }

  NilElement inverse() const {
    NilElement r = *this;
    for (int j = 2; j <= d; ++j)
      for (int i = 1; i < j; ++i)
        r.y[pair_index(i, j)] =
            -y[pair_index(i, j)] - x[static_cast<std::size_t>(i - 1)] * x[static_cast<std::size_t>(j - 1)];
    for (int i = 0; i < d; ++i) r.x[static_cast<std::size_t>(i)] = -x[static_cast<std::size_t>(i)];
    return r;
  }

  bool operator==(const NilElement&) const = default;

  std::uint64_t hash() const {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ static_cast<std::uint64_t>(d);
    for (auto v : x) h = splitmix64(h ^ static_cast<std::uint32_t>(v));
    for (auto v : y) h = splitmix64(h ^ static_cast<std::uint32_t>(v));
    return h;
  }

  std::string describe() const {
    std::string s = "(";
    for (int i = 0; i < d; ++i) s += (i ? "," : "") + std::to_string(x[static_cast<std::size_t>(i)]);
    s += ";";
    const int m = d * (d - 1) / 2;
    for (int i = 0; i < m; ++i) s += (i ? "," : "") + std::to_string(y[static_cast<std::size_t>(i)]);
    return s + ")";
  }
};

inline NilElement nil_project(const Word& g, int d) {
  NilElement e = NilElement::identity(d);
  for (Letter s : g.letters()) e = e * NilElement::generator(d, s);
  return e;
}

struct NilHash {
  std::size_t operator()(const NilElement& e) const { return e.hash(); }
};

// BFS ball of radius r in the Cayley graph of the quotient, with distances.
inline std::vector<std::pair<NilElement, std::int32_t>> nil_ball(
    int d, int r, std::int64_t cap = 20'000'000) {
  std::vector<std::pair<NilElement, std::int32_t>> out;
  std::unordered_map<NilElement, std::int32_t, NilHash> seen;
  out.emplace_back(NilElement::identity(d), 0);
  seen.emplace(out[0].first, 0);
  std::size_t head = 0;
  while (head < out.size()) {
    const auto [v, dist] = out[head++];
    if (dist == r) continue;
    for (int idx = 0; idx < 2 * d; ++idx) {
      const NilElement w = v * NilElement::generator(d, detail::letter_at(d, idx));
      if (seen.emplace(w, dist + 1).second) {
        out.emplace_back(w, dist + 1);
        if (static_cast<std::int64_t>(out.size()) > cap)
          throw resource_error("nil_ball exceeded cap");
      }
    }
  }
  return out;
}

}  // namespace irswalk
