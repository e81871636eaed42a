#pragma once

// Independent cross-checks used only by the test suites.

#include <array>
#include <cstdint>
#include <vector>

#include "irswalk/words.hpp"

namespace irswalk::testing {

// 3x3 integer unitriangular matrices; the rank-2 nilpotent quotient embeds
// here via a -> I+E12, b -> I+E23.
struct Mat3 {
  // row-major
  std::array<std::int64_t, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

  static Mat3 identity() { return {}; }

  static Mat3 gen_a(int sign) {
    Mat3 r;
    r.m[1] = sign;
    return r;
  }
  static Mat3 gen_b(int sign) {
    Mat3 r;
    r.m[5] = sign;
    return r;
  }

  Mat3 operator*(const Mat3& o) const {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        std::int64_t s = 0;
        for (int k = 0; k < 3; ++k) s += m[static_cast<std::size_t>(3 * i + k)] * o.m[static_cast<std::size_t>(3 * k + j)];
        r.m[static_cast<std::size_t>(3 * i + j)] = s;
      }
    return r;
  }

  bool operator==(const Mat3&) const = default;
};

inline Mat3 heisenberg_eval(const Word& w) {
  Mat3 r = Mat3::identity();
  for (Letter s : w.letters()) {
    const int sign = s > 0 ? 1 : -1;
    r = r * (letter_gen(s) == 1 ? Mat3::gen_a(sign) : Mat3::gen_b(sign));
  }
  return r;
}

// Exact H(X_t) for the simple random walk on F_d: the time-t law is
// uniform on each sphere, so only the radial birth-death chain matters.
inline std::vector<double> srw_entropy_radial(int d, int tmax) {
  std::vector<double> P(static_cast<std::size_t>(tmax) + 2, 0.0);
  P[0] = 1.0;
  const double up = (2.0 * d - 1.0) / (2.0 * d), down = 1.0 / (2.0 * d);
  std::vector<double> H(static_cast<std::size_t>(tmax) + 1, 0.0);
  for (int t = 1; t <= tmax; ++t) {
    std::vector<double> Q(P.size(), 0.0);
    Q[1] += P[0];
    for (std::size_t k = 1; k + 1 < P.size(); ++k) {
      Q[k + 1] += P[k] * up;
      Q[k - 1] += P[k] * down;
    }
    P = Q;
    double h = 0.0;
    double sphere = 1.0;
    for (int k = 0; k <= t; ++k) {
      sphere = (k == 0) ? 1.0 : (k == 1 ? 2.0 * d : sphere * (2.0 * d - 1.0));
      if (P[static_cast<std::size_t>(k)] > 0)
        h += P[static_cast<std::size_t>(k)] *
             (std::log(sphere) - std::log(P[static_cast<std::size_t>(k)]));
    }
    H[static_cast<std::size_t>(t)] = h;
  }
  return H;
}

}  // namespace irswalk::testing
