#pragma once

// Integer 2x2 arithmetic, the rank-2 free subgroup generated by
// [[1,2],[0,1]] and [[1,0],[2,1]], membership with witness words,
// coset enumeration over {S,T}, and first-return (hitting) samples.

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "irswalk/accum.hpp"
#include "irswalk/entropy.hpp"
#include "irswalk/rng.hpp"
#include "irswalk/words.hpp"

namespace irswalk {

using BigInt = boost::multiprecision::cpp_int;

struct Mat2 {
  BigInt a{1}, b{0}, c{0}, d{1};

  static Mat2 identity() { return {}; }

  Mat2 operator*(const Mat2& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }

  BigInt det() const { return a * d - b * c; }

  // inverse of a determinant-one matrix
  Mat2 inverse() const { return {d, -b, -c, a}; }

  bool operator==(const Mat2&) const = default;

  bool is_identity() const { return a == 1 && b == 0 && c == 0 && d == 1; }
  bool is_minus_identity() const { return a == -1 && b == 0 && c == 0 && d == -1; }

  BigInt max_abs() const {
    BigInt m = abs(a);
    if (abs(b) > m) m = abs(b);
    if (abs(c) > m) m = abs(c);
    if (abs(d) > m) m = abs(d);
    return m;
  }

  std::uint64_t hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    const auto mix_one = [&h](const BigInt& v) {
      if (v >= std::numeric_limits<std::int64_t>::min() &&
          v <= std::numeric_limits<std::int64_t>::max()) {
        h = splitmix64(h ^ static_cast<std::uint64_t>(v.convert_to<std::int64_t>()));
        return;
      }
      for (char ch : v.str()) {
        h ^= static_cast<unsigned char>(ch);
        h *= 0x100000001b3ULL;
      }
      h = splitmix64(h);
    };
    mix_one(a);
    mix_one(b);
    mix_one(c);
    mix_one(d);
    return h;
  }

  std::string describe() const {
    return "[[" + a.str() + "," + b.str() + "],[" + c.str() + "," + d.str() + "]]";
  }
};

inline Mat2 checked_unimodular(BigInt a, BigInt b, BigInt c, BigInt d) {
  Mat2 m{std::move(a), std::move(b), std::move(c), std::move(d)};
  if (m.det() != 1) throw std::invalid_argument("matrix is not unimodular");
  return m;
}

// ambient generators
inline const Mat2 kGenS{0, -1, 1, 0};
inline const Mat2 kGenT{1, 1, 0, 1};
// free subgroup generators (letters +-1 = A, +-2 = B in witness words)
inline const Mat2 kSanovA{1, 2, 0, 1};
inline const Mat2 kSanovB{1, 0, 2, 1};

inline Mat2 evaluate_witness(const Word& w) {
  Mat2 m;
  for (Letter s : w.letters()) {
    Mat2 g = (letter_gen(s) == 1) ? kSanovA : kSanovB;
    if (s < 0) g = g.inverse();
    m = m * g;
  }
  return m;
}

// Membership in the free subgroup by greedy entry reduction: peel leading
// powers of A or B as long as the largest entry strictly shrinks.  Ends at
// the identity for members; -I and dead ends are non-members.
inline std::optional<Word> sanov_membership(const Mat2& m0) {
  if (m0.det() != 1) throw std::invalid_argument("membership needs determinant one");
  // congruent to the identity mod 2
  if (!(m0.a % 2 != 0 && m0.b % 2 == 0 && m0.c % 2 == 0 && m0.d % 2 != 0))
    return std::nullopt;
  Mat2 m = m0;
  std::vector<std::pair<int, BigInt>> peeled;  // (generator 1|2, power)
  for (;;) {
    if (m.is_identity()) break;
    if (m.is_minus_identity()) return std::nullopt;
    const BigInt cur = m.max_abs();
    Mat2 best;
    int best_gen = 0;
    BigInt best_pow = 0, best_norm = cur;
    const auto consider = [&](int gen, const BigInt& k) {
      if (k == 0) return;
      Mat2 cand;
      if (gen == 1) {
        // A^{-k} m : row1 -> row1 - 2k row2
        cand = Mat2{m.a - 2 * k * m.c, m.b - 2 * k * m.d, m.c, m.d};
      } else {
        // B^{-k} m : row2 -> row2 - 2k row1
        cand = Mat2{m.a, m.b, m.c - 2 * k * m.a, m.d - 2 * k * m.b};
      }
      const BigInt nn = cand.max_abs();
      if (nn < best_norm) {
        best_norm = nn;
        best = cand;
        best_gen = gen;
        best_pow = k;
      }
    };
    const auto ratios = [&](const BigInt& num, const BigInt& den) {
      std::vector<BigInt> ks;
      if (den == 0) return ks;
      const BigInt q = num / (2 * den);
      for (BigInt delta = -1; delta <= 1; ++delta) ks.push_back(q + delta);
      return ks;
    };
    for (const auto& k : ratios(m.a, m.c)) consider(1, k);
    for (const auto& k : ratios(m.b, m.d)) consider(1, k);
    for (const auto& k : ratios(m.c, m.a)) consider(2, k);
    for (const auto& k : ratios(m.d, m.b)) consider(2, k);
    if (best_gen == 0) return std::nullopt;  // no strict reduction: outside
    peeled.emplace_back(best_gen, best_pow);
    m = best;
  }
  // m0 = prod A^{k} / B^{k} in peel order
  Word w;
  for (const auto& [gen, power] : peeled) {
    const Letter s = static_cast<Letter>(power > 0 ? gen : -gen);
    BigInt reps = abs(power);
    if (reps > 50'000'000) throw resource_error("witness word too long to materialize");
    for (BigInt i = 0; i < reps; ++i) w.push(s);
  }
  return w;
}

// --- coset table over {S, T} -------------------------------------------------

struct CosetTable {
  int index = 0;
  std::vector<Mat2> representatives;
  // permutations: action of S, S^-1, T, T^-1 on coset ids
  std::array<std::vector<int>, 4> perm;

  int apply(int gen_idx, int coset) const {
    return perm[static_cast<std::size_t>(gen_idx)][static_cast<std::size_t>(coset)];
  }
};

inline const std::array<Mat2, 4>& ambient_generators() {
  static const std::array<Mat2, 4> gens{kGenS, kGenS.inverse(), kGenT, kGenT.inverse()};
  return gens;
}

inline CosetTable build_coset_table(int cap = 10'000) {
  CosetTable table;
  table.representatives.push_back(Mat2::identity());
  const auto coset_of = [&](const Mat2& m) {
    for (std::size_t j = 0; j < table.representatives.size(); ++j)
      if (sanov_membership(m * table.representatives[j].inverse())) return static_cast<int>(j);
    return -1;
  };
  std::vector<int> frontier{0};
  while (!frontier.empty()) {
    const int i = frontier.back();
    frontier.pop_back();
    for (const auto& g : ambient_generators()) {
      const Mat2 m = table.representatives[static_cast<std::size_t>(i)] * g;
      if (coset_of(m) < 0) {
        table.representatives.push_back(m);
        if (static_cast<int>(table.representatives.size()) > cap)
          throw resource_error("coset enumeration exceeded the cap; membership is broken");
        frontier.push_back(static_cast<int>(table.representatives.size()) - 1);
      }
    }
  }
  table.index = static_cast<int>(table.representatives.size());
  for (std::size_t g = 0; g < 4; ++g) {
    table.perm[g].resize(static_cast<std::size_t>(table.index));
    for (int i = 0; i < table.index; ++i) {
      const Mat2 m = table.representatives[static_cast<std::size_t>(i)] *
                     ambient_generators()[g];
      const int j = coset_of(m);
      if (j < 0) throw contract_error("coset action fell outside the table");
      table.perm[g][static_cast<std::size_t>(i)] = j;
    }
  }
  return table;
}

// --- hitting samples ----------------------------------------------------------

struct HittingSample {
  std::int64_t return_time = 0;
  Mat2 position;
  Word witness;
  bool censored = false;
};

// Kac-identity estimate: mean first-return time to the subgroup coset.
struct KacEstimate {
  double mean = 0.0;
  double stderror = 0.0;
  std::int64_t samples = 0;
  std::int64_t censored = 0;
};

// Entropy-rate comparison between the ambient walk and the induced
// (first-return) walk.  Both sides use second-window increments at
// matched sample counts: the induced walk's H(Y_2) - H(Y_1) against the
// ambient (H(X_{2t*}) - H(X_{t*})) / t* with t* = index, so first-window
// bias cancels in both differences.
struct AbramovMeasurement {
  double h_y1 = 0, h_y2 = 0, h_xt = 0, h_x2t = 0;
  double induced_increment = 0;        // H(Y2) - H(Y1)
  double ambient_increment_rate = 0;   // (H(X_{2t*}) - H(X_{t*})) / t*
  double ratio = 0;                    // induced / ambient rate
  double ratio_se = 0;
  double mean_return_ratio = 0;        // T_2 / 2
  std::int64_t samples = 0;
  std::int64_t censored = 0;
};

// Runs the uniform {S^+-1, T^+-1} walk until the first return to the
// subgroup coset, tracked in O(1) per step through the table.
inline HittingSample hitting_sample(const CosetTable& table, Rng& rng,
                                    std::int64_t cap = 1'000'000) {
  HittingSample out;
  Mat2 x;
  int coset = 0;
  for (std::int64_t t = 1; t <= cap; ++t) {
    const int g = static_cast<int>(rng.below(4));
    x = x * ambient_generators()[static_cast<std::size_t>(g)];
    coset = table.apply(g, coset);
    if (coset == 0) {
      out.return_time = t;
      out.position = x;
      if (auto w = sanov_membership(x)) {
        out.witness = std::move(*w);
      } else {
        throw contract_error("first return landed outside the subgroup");
      }
      return out;
    }
  }
  out.censored = true;
  out.return_time = cap;
  return out;
}

inline KacEstimate kac_estimate(const CosetTable& table, std::int64_t samples,
                                std::uint64_t seed, std::int64_t cap = 1'000'000) {
  KacEstimate est;
  MeanAccumulator acc;
  for (std::int64_t rep = 0; rep < samples; ++rep) {
    Rng rng(seed, 0x6b616321, static_cast<std::uint64_t>(rep));
    Mat2 x;
    int coset = 0;
    std::int64_t t = 0;
    bool hit = false;
    while (t < cap) {
      ++t;
      const int g = static_cast<int>(rng.below(4));
      coset = table.apply(g, coset);
      if (coset == 0) {
        hit = true;
        break;
      }
    }
    (void)x;
    if (!hit) {
      ++est.censored;
      continue;
    }
    acc.add(static_cast<double>(t));
  }
  est.mean = acc.mean();
  est.stderror = acc.stderror();
  est.samples = acc.count();
  return est;
}

// Mean of T_k / k over independent long runs.
inline MeanAccumulator return_time_ratio(const CosetTable& table, std::int64_t k,
                                         std::int64_t runs, std::uint64_t seed) {
  MeanAccumulator acc;
  for (std::int64_t run = 0; run < runs; ++run) {
    Rng rng(seed, 0x746b6f6b, static_cast<std::uint64_t>(run));
    int coset = 0;
    std::int64_t t = 0, returns = 0;
    while (returns < k) {
      ++t;
      const int g = static_cast<int>(rng.below(4));
      coset = table.apply(g, coset);
      if (coset == 0) ++returns;
    }
    acc.add(static_cast<double>(t) / static_cast<double>(k));
  }
  return acc;
}

inline AbramovMeasurement abramov_measurement(const CosetTable& table,
                                              std::int64_t samples, int t_star,
                                              std::uint64_t seed,
                                              std::int64_t cap = 4000) {
  AbramovMeasurement out;
  Tally ty1, ty2, txt, tx2t;
  MeanAccumulator t2_over_2;
  for (std::int64_t rep = 0; rep < samples; ++rep) {
    Rng rng(seed, 0x61627261, static_cast<std::uint64_t>(rep));
    Mat2 x;
    int coset = 0;
    int returns = 0;
    std::uint64_t y1 = 0, y2 = 0, xt = 0, x2t = 0;
    std::int64_t t = 0, t2 = 0;
    while (t < cap && (returns < 2 || t < 2 * t_star)) {
      ++t;
      const int g = static_cast<int>(rng.below(4));
      x = x * ambient_generators()[static_cast<std::size_t>(g)];
      coset = table.apply(g, coset);
      if (t == t_star) xt = x.hash();
      if (t == 2 * t_star) x2t = x.hash();
      if (coset == 0 && returns < 2) {
        ++returns;
        if (returns == 1) y1 = x.hash();
        if (returns == 2) {
          y2 = x.hash();
          t2 = t;
        }
      }
    }
    if (returns < 2 || t < 2 * t_star) {
      ++out.censored;
      continue;
    }
    ty1.add(y1);
    ty2.add(y2);
    txt.add(xt);
    tx2t.add(x2t);
    t2_over_2.add(static_cast<double>(t2) / 2.0);
  }
  out.samples = ty1.total();
  const auto e_y1 = empirical_entropy(ty1, seed ^ 0x11, 0);
  const auto e_y2 = empirical_entropy(ty2, seed ^ 0x12, 0);
  const auto e_xt = empirical_entropy(txt, seed ^ 0x13, 0);
  const auto e_x2t = empirical_entropy(tx2t, seed ^ 0x14, 0);
  out.h_y1 = e_y1.value;
  out.h_y2 = e_y2.value;
  out.h_xt = e_xt.value;
  out.h_x2t = e_x2t.value;
  out.induced_increment = out.h_y2 - out.h_y1;
  out.ambient_increment_rate = (out.h_x2t - out.h_xt) / static_cast<double>(t_star);
  out.mean_return_ratio = t2_over_2.mean();
  if (out.ambient_increment_rate > 0) {
    out.ratio = out.induced_increment / out.ambient_increment_rate;
    // delta method over the four analytic entropy errors
    const auto se = [](const EntropyEstimate& e) { return e.ci_halfwidth / 1.96; };
    const double num_se = std::sqrt(se(e_y1) * se(e_y1) + se(e_y2) * se(e_y2));
    const double den_se =
        std::sqrt(se(e_xt) * se(e_xt) + se(e_x2t) * se(e_x2t)) / static_cast<double>(t_star);
    const double den = out.ambient_increment_rate;
    out.ratio_se = std::sqrt(num_se * num_se / (den * den) +
                             den_se * den_se * out.induced_increment * out.induced_increment /
                                 (den * den * den * den));
  }
  return out;
}

}  // namespace irswalk
