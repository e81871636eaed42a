#pragma once

// Step-law catalog and trajectory simulation.  Every law is symmetric
// (law(g) = law(g^-1)) and adapted; sampling is driven by keyed streams
// so a (seed, config) pair reproduces trajectories bit for bit.

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "irswalk/errors.hpp"
#include "irswalk/rng.hpp"
#include "irswalk/schreier.hpp"
#include "irswalk/words.hpp"

namespace irswalk {

enum class LawFamily { srw, lazy, geodesic_tail };

class StepLaw {
 public:
  static StepLaw srw(int d) { return StepLaw(LawFamily::srw, d, 0.0, 0.0, 1); }

  static StepLaw lazy(int d, double alpha) {
    if (alpha < 0.0 || alpha >= 1.0) throw std::invalid_argument("lazy weight in [0,1)");
    return StepLaw(LawFamily::lazy, d, alpha, 0.0, 1);
  }

  // P(|U| = k) proportional to k^-beta on 1..lmax, word uniform among
  // reduced words of that length.  Inverse-invariant, hence symmetric.
  static StepLaw geodesic_tail(int d, double beta, int lmax) {
    if (lmax < 1) throw std::invalid_argument("lmax >= 1");
    return StepLaw(LawFamily::geodesic_tail, d, 0.0, beta, lmax);
  }

  LawFamily family() const { return family_; }
  int rank() const { return d_; }
  int max_step_length() const { return lmax_; }
  double lazy_weight() const { return alpha_; }

  std::string id() const {
    switch (family_) {
      case LawFamily::srw:
        return "srw(d=" + std::to_string(d_) + ")";
      case LawFamily::lazy:
        return "lazy(d=" + std::to_string(d_) + ",alpha=" + std::to_string(alpha_) + ")";
      case LawFamily::geodesic_tail:
        return "geodesic_tail(d=" + std::to_string(d_) + ",beta=" + std::to_string(beta_) +
               ",lmax=" + std::to_string(lmax_) + ")";
    }
    return "?";
  }

  // Declared moment order: finite support has all moments; the truncated
  // tail law keeps a finite 4th moment whenever beta > 5, and trivially
  // here because of the truncation.
  int moment_order() const { return 4; }

  std::int64_t sample_length(Rng& rng) const {
    if (family_ != LawFamily::geodesic_tail) {
      if (family_ == LawFamily::lazy && rng.bernoulli(alpha_)) return 0;
      return 1;
    }
    const double u = rng.uniform();
    auto it = std::lower_bound(length_cdf_.begin(), length_cdf_.end(), u);
    return 1 + (it - length_cdf_.begin());
  }

  // Appends one mu-increment to the word, cancelling as it goes.  The
  // increment itself is a uniform reduced word of the sampled length.
  void sample_into(Word& w, Rng& rng) const {
    const std::int64_t len = sample_length(rng);
    Letter prev = 0;
    for (std::int64_t i = 0; i < len; ++i) {
      Letter s;
      if (i == 0) {
        s = detail::letter_at(d_, static_cast<int>(rng.below(static_cast<std::uint64_t>(2 * d_))));
      } else {
        const int forb = detail::letter_index(d_, letter_inverse(prev));
        auto pick = static_cast<int>(rng.below(static_cast<std::uint64_t>(2 * d_ - 1)));
        if (pick >= forb) ++pick;
        s = detail::letter_at(d_, pick);
      }
      w.push(s);
      prev = s;
    }
  }

  Word sample(Rng& rng) const {
    Word u;
    sample_into(u, rng);
    return u;
  }

  // Full atom table; only finite small-support laws admit one.
  std::vector<std::pair<Word, double>> atoms() const {
    std::vector<std::pair<Word, double>> out;
    if (family_ == LawFamily::srw || family_ == LawFamily::lazy) {
      const double rest = family_ == LawFamily::lazy ? 1.0 - alpha_ : 1.0;
      if (family_ == LawFamily::lazy) out.emplace_back(Word{}, alpha_);
      for (int idx = 0; idx < 2 * d_; ++idx)
        out.emplace_back(Word::reduce({detail::letter_at(d_, idx)}), rest / (2.0 * d_));
      return out;
    }
    throw resource_error("atom table requested for a law with large support");
  }

  double length_pmf(std::int64_t k) const {
    if (family_ != LawFamily::geodesic_tail)
      return (k == 0) ? alpha_ : (k == 1 ? 1.0 - alpha_ : 0.0);
    if (k < 1 || k > lmax_) return 0.0;
    const double prev = k == 1 ? 0.0 : length_cdf_[static_cast<std::size_t>(k - 2)];
    return length_cdf_[static_cast<std::size_t>(k - 1)] - prev;
  }

  // E[|U|^m] by direct summation.
  double length_moment(int m) const {
    double s = 0.0;
    for (std::int64_t k = 0; k <= lmax_; ++k)
      s += length_pmf(k) * std::pow(static_cast<double>(k), m);
    return s;
  }

 private:
  StepLaw(LawFamily f, int d, double alpha, double beta, int lmax)
      : family_(f), d_(d), alpha_(alpha), beta_(beta), lmax_(lmax) {
    if (d < 2) throw std::invalid_argument("free rank d >= 2");
    if (f == LawFamily::geodesic_tail) {
      double z = 0.0;
      std::vector<double> w(static_cast<std::size_t>(lmax_));
      for (int k = 1; k <= lmax_; ++k) {
        w[static_cast<std::size_t>(k - 1)] = std::pow(static_cast<double>(k), -beta_);
        z += w[static_cast<std::size_t>(k - 1)];
      }
      length_cdf_.resize(w.size());
      double acc = 0.0;
      for (std::size_t i = 0; i < w.size(); ++i) {
        acc += w[i] / z;
        length_cdf_[i] = acc;
      }
      length_cdf_.back() = 1.0;
    }
  }

  LawFamily family_;
  int d_;
  double alpha_;
  double beta_;
  int lmax_;
  std::vector<double> length_cdf_;
};

struct Trajectory {
  std::vector<Word> words;  // X_0 = identity, ..., X_t
  std::vector<Word> increments;
  std::uint64_t seed = 0;
  std::string law_id;
};

inline Trajectory run_walk(const StepLaw& law, std::int64_t t_max, Rng& rng,
                           std::uint64_t seed_tag = 0) {
  Trajectory tr;
  tr.seed = seed_tag;
  tr.law_id = law.id();
  tr.words.reserve(static_cast<std::size_t>(t_max) + 1);
  tr.words.emplace_back();
  for (std::int64_t t = 1; t <= t_max; ++t) {
    const Word u = law.sample(rng);
    tr.increments.push_back(u);
    tr.words.push_back(tr.words.back() * u);
  }
  return tr;
}

// T_n = first t with |X_t| > n, or nothing if the trajectory is too short.
inline std::optional<std::int64_t> first_exit_time(const Trajectory& tr, std::int64_t n) {
  for (std::size_t t = 0; t < tr.words.size(); ++t)
    if (tr.words[t].size() > n) return static_cast<std::int64_t>(t);
  return std::nullopt;
}

// Applies the trajectory's increments to each root, one letter at a time.
template <Oracle O>
std::vector<std::vector<typename O::vertex_type>> coset_trajectory(
    const O& oracle, std::span<const typename O::vertex_type> roots,
    const Trajectory& tr) {
  std::vector<std::vector<typename O::vertex_type>> rows(roots.size());
  for (std::size_t i = 0; i < roots.size(); ++i) {
    rows[i].reserve(tr.words.size());
    auto v = roots[i];
    rows[i].push_back(v);
    for (const Word& u : tr.increments) {
      v = act(oracle, v, u);
      rows[i].push_back(v);
    }
  }
  return rows;
}

}  // namespace irswalk
