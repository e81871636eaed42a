#pragma once

// Entropy estimators and the walk-entropy experiments: exact convolution
// increments, plug-in estimates with Miller-Madow correction, prefix
// conditioning, prefix-flip rates, the crossing inequality, the
// Bernoulli-window entropy sweep, and projected-walk decay curves.
// Natural logarithms throughout.

#include <cstdint>
#include <random>
#include <unordered_map>
#include <vector>

#include "irswalk/accum.hpp"
#include "irswalk/green.hpp"
#include "irswalk/parallel.hpp"
#include "irswalk/schreier.hpp"
#include "irswalk/walks.hpp"

namespace irswalk {

// Counts of hashed discrete outcomes.
class Tally {
 public:
  void add(std::uint64_t key, std::int64_t c = 1) {
    counts_[key] += c;
    total_ += c;
  }
  std::int64_t total() const { return total_; }
  std::int64_t distinct() const { return static_cast<std::int64_t>(counts_.size()); }
  const std::unordered_map<std::uint64_t, std::int64_t>& counts() const { return counts_; }
  void merge(const Tally& o) {
    for (const auto& [k, c] : o.counts_) add(k, c);
  }

 private:
  std::unordered_map<std::uint64_t, std::int64_t> counts_;
  std::int64_t total_ = 0;
};

struct EntropyEstimate {
  double value = 0.0;    // Miller-Madow corrected, nats
  double plug_in = 0.0;  // raw plug-in, nats
  bool bias_corrected = true;
  std::int64_t sample_count = 0;
  std::int64_t distinct_count = 0;
  double ci_halfwidth = 0.0;
};

namespace detail_entropy {

inline double plug_in_nats(const std::vector<std::int64_t>& counts, std::int64_t total) {
  KahanSum h;
  const double n = static_cast<double>(total);
  for (const auto c : counts) {
    if (c <= 0) continue;
    const double p = static_cast<double>(c) / n;
    h.add(-p * std::log(p));
  }
  return h.value();
}

}  // namespace detail_entropy

// Plug-in entropy with the (k-1)/(2N) correction; CI by multinomial
// bootstrap (conditional-binomial resampling of the observed counts).
inline EntropyEstimate empirical_entropy(const Tally& tally, std::uint64_t seed = 1,
                                         int bootstrap_resamples = 200) {
  EntropyEstimate est;
  est.sample_count = tally.total();
  est.distinct_count = tally.distinct();
  if (tally.total() == 0) return est;
  std::vector<std::int64_t> counts;
  counts.reserve(tally.counts().size());
  for (const auto& [k, c] : tally.counts()) counts.push_back(c);
  const double n = static_cast<double>(tally.total());
  est.plug_in = detail_entropy::plug_in_nats(counts, tally.total());
  est.value = est.plug_in + (static_cast<double>(est.distinct_count) - 1.0) / (2.0 * n);

  if (bootstrap_resamples > 0 && est.distinct_count > 1) {
    Rng rng(seed, 0x626f6f74);
    MeanAccumulator boot;
    std::vector<std::int64_t> resampled(counts.size());
    for (int b = 0; b < bootstrap_resamples; ++b) {
      std::fill(resampled.begin(), resampled.end(), 0);
      std::int64_t left = tally.total();
      double mass = 1.0;
      for (std::size_t i = 0; i < counts.size() && left > 0; ++i) {
        const double p = std::min(1.0, static_cast<double>(counts[i]) / n / mass);
        std::int64_t draw;
        if (i + 1 == counts.size() || p >= 1.0) {
          draw = left;
        } else {
          std::binomial_distribution<std::int64_t> bin(left, p);
          draw = bin(rng);
        }
        resampled[i] = draw;
        left -= draw;
        mass -= static_cast<double>(counts[i]) / n;
      }
      const auto kb =
          static_cast<double>(std::count_if(resampled.begin(), resampled.end(),
                                            [](std::int64_t c) { return c > 0; }));
      boot.add(detail_entropy::plug_in_nats(resampled, tally.total()) +
               (kb - 1.0) / (2.0 * n));
    }
    est.ci_halfwidth = 1.96 * std::sqrt(boot.variance());
  } else if (est.distinct_count > 1) {
    // analytic fallback: variance of -log p under the empirical law
    KahanSum s2;
    for (const auto c : counts) {
      const double p = static_cast<double>(c) / n;
      const double l = -std::log(p);
      s2.add(p * l * l);
    }
    const double var = s2.value() - est.plug_in * est.plug_in;
    est.ci_halfwidth = 1.96 * std::sqrt(std::max(0.0, var) / n);
  }
  return est;
}

// --- exact convolution --------------------------------------------------------

struct ConvolutionEntropies {
  std::vector<double> entropy;    // entropy[t] = H(X_t), entropy[0] = 0
  std::vector<double> increment;  // increment[t] = H(X_t) - H(X_{t-1}), index from 1
};

// Exact distribution of X_t for a finite-support law, as packed words.
inline ConvolutionEntropies exact_convolution_entropies(const StepLaw& law, int t_max,
                                                        std::int64_t max_atoms = 6'000'000) {
  const auto atoms = law.atoms();
  const WordPacker packer(law.rank());
  if (static_cast<std::int64_t>(t_max) * law.max_step_length() > packer.capacity())
    throw resource_error("convolution horizon exceeds packed-word capacity; use the "
                         "Monte Carlo estimators instead");
  std::vector<std::pair<std::vector<Letter>, double>> atom_letters;
  for (const auto& [u, q] : atoms)
    atom_letters.emplace_back(std::vector<Letter>(u.letters().begin(), u.letters().end()), q);
  std::unordered_map<std::uint64_t, double> dist;
  dist.emplace(packer.pack(Word{}), 1.0);
  ConvolutionEntropies out;
  out.entropy.push_back(0.0);
  out.increment.push_back(0.0);
  for (int t = 1; t <= t_max; ++t) {
    std::unordered_map<std::uint64_t, double> next;
    next.reserve(dist.size() * 3);
    for (const auto& [key, p] : dist) {
      for (const auto& [u, q] : atom_letters) {
        std::uint64_t k = key;
        for (Letter s : u) k = packer.append_packed(k, s);
        next[k] += p * q;
      }
    }
    if (static_cast<std::int64_t>(next.size()) > max_atoms)
      throw resource_error("convolution support exceeded the atom cap at t=" +
                           std::to_string(t) + "; use the Monte Carlo estimators");
    dist.swap(next);
    KahanSum h;
    for (const auto& [key, p] : dist)
      if (p > 0) h.add(-p * std::log(p));
    out.entropy.push_back(h.value());
    out.increment.push_back(out.entropy[static_cast<std::size_t>(t)] -
                            out.entropy[static_cast<std::size_t>(t - 1)]);
  }
  return out;
}

// Exposes the exact time-t law itself (tests check mass and symmetry).
inline std::unordered_map<std::uint64_t, double> exact_convolution_distribution(
    const StepLaw& law, int t, std::int64_t max_atoms = 6'000'000) {
  const auto atoms = law.atoms();
  const WordPacker packer(law.rank());
  std::unordered_map<std::uint64_t, double> dist;
  dist.emplace(packer.pack(Word{}), 1.0);
  for (int s = 1; s <= t; ++s) {
    std::unordered_map<std::uint64_t, double> next;
    next.reserve(dist.size() * 3);
    for (const auto& [key, p] : dist) {
      for (const auto& [u, q] : atoms) {
        std::uint64_t k = key;
        for (Letter l : u.letters()) k = packer.append_packed(k, l);
        next[k] += p * q;
      }
    }
    if (static_cast<std::int64_t>(next.size()) > max_atoms)
      throw resource_error("convolution support exceeded the atom cap");
    dist.swap(next);
  }
  return dist;
}

// --- prefix conditioning ------------------------------------------------------

struct PrefixRateEstimate {
  double lower = 0.0;  // (H(X_t) - H(X_t | pref_r(X_{T_n}))) / t
  double ci_halfwidth = 0.0;
  double h_xt = 0.0, h_pref = 0.0, h_joint = 0.0;
  std::int64_t samples_used = 0;
  std::int64_t excluded = 0;  // walks that never exited radius n
  double excluded_rate = 0.0;
};

// Joint sampling of (X_t, pref_r(X_{T_n})) on the free group.  The
// conditional form lower-bounds the entropy rate because conditioning on
// the prefix is coarser than conditioning on the tail.
inline PrefixRateEstimate prefix_conditional_rate(const StepLaw& law, int r, int t,
                                                  std::int64_t n, std::int64_t samples,
                                                  std::uint64_t seed,
                                                  std::int64_t horizon = 0,
                                                  int threads = 1) {
  if (horizon <= 0) horizon = 80 * n;
  struct Chunk {
    Tally xt, pref, joint;
    std::int64_t excluded = 0;
  };
  const auto chunks = run_chunked<Chunk>(
      samples, threads,
      [&](ChunkRange range) {
        Chunk c;
        for (std::int64_t rep = range.begin; rep < range.end; ++rep) {
          Rng rng(seed, 0x70726566, static_cast<std::uint64_t>(rep));
          Word x;
          std::uint64_t xt_key = 0;
          bool have_exit = false;
          std::uint64_t pref_key = 0;
          for (std::int64_t step = 1; step <= horizon; ++step) {
            law.sample_into(x, rng);
            if (step == t) xt_key = x.hash();
            if (step >= t && x.size() > n) {
              pref_key = x.prefix(r).hash();
              have_exit = true;
              break;
            }
          }
          if (!have_exit) {
            ++c.excluded;
            continue;
          }
          c.xt.add(xt_key);
          c.pref.add(pref_key);
          c.joint.add(mix_keys(xt_key, pref_key));
        }
        return c;
      });
  Tally xt, pref, joint;
  std::int64_t excluded = 0;
  for (const auto& c : chunks) {
    xt.merge(c.xt);
    pref.merge(c.pref);
    joint.merge(c.joint);
    excluded += c.excluded;
  }
  PrefixRateEstimate est;
  est.excluded = excluded;
  est.samples_used = xt.total();
  est.excluded_rate = samples > 0 ? static_cast<double>(excluded) / static_cast<double>(samples) : 0.0;
  if (est.samples_used == 0) return est;
  const auto ext = empirical_entropy(xt, seed ^ 1);
  const auto epref = empirical_entropy(pref, seed ^ 2);
  const auto ejoint = empirical_entropy(joint, seed ^ 3);
  est.h_xt = ext.value;
  est.h_pref = epref.value;
  est.h_joint = ejoint.value;
  est.lower = (ext.value - (ejoint.value - epref.value)) / static_cast<double>(t);
  est.ci_halfwidth = std::sqrt(ext.ci_halfwidth * ext.ci_halfwidth +
                               epref.ci_halfwidth * epref.ci_halfwidth +
                               ejoint.ci_halfwidth * ejoint.ci_halfwidth) /
                     static_cast<double>(t);
  return est;
}

// --- prefix flips ---------------------------------------------------------------

struct PrefixFlipEstimate {
  double change_prob = 0.0;    // prefix of the coset walk changes after T_n
  double change_ci = 0.0;
  double mismatch_prob = 0.0;  // pref_r(X_{T_n}) != pref_r(K X_{T_n})
  double mismatch_ci = 0.0;
  std::int64_t samples_used = 0;
  std::int64_t censored = 0;  // walks that never exited radius n
  bool horizon_caveat = false;
};

// Tracks the free word and the glued-graph coset side by side.  The flip
// probability after T_n is truncated at the horizon, so it is a lower
// estimate; the caveat flag says so.
inline PrefixFlipEstimate prefix_flip_rate(const GluedOracle& oracle, const StepLaw& law,
                                           int r, std::int64_t n, std::int64_t samples,
                                           std::int64_t horizon_after,
                                           std::uint64_t seed, int threads = 1) {
  if (r > oracle.depth())
    throw contract_error("flip radius exceeds the glued depth guarantee");
  struct Chunk {
    std::int64_t used = 0, censored = 0;
    double changes = 0, mismatches = 0;
  };
  const std::int64_t exit_horizon = 200 * n + 400;
  const auto chunks = run_chunked<Chunk>(samples, threads, [&](ChunkRange range) {
    Chunk c;
    for (std::int64_t rep = range.begin; rep < range.end; ++rep) {
      Rng rng(seed, 0x666c6970, static_cast<std::uint64_t>(rep));
      Word x;
      GluedVertex v = oracle.root();
      bool exited = false;
      Word ustep;
      for (std::int64_t step = 1; step <= exit_horizon; ++step) {
        ustep.clear();
        law.sample_into(ustep, rng);
        x *= ustep;
        act_inplace(oracle, v, ustep);
        if (x.size() > n) {
          exited = true;
          break;
        }
      }
      if (!exited) {
        ++c.censored;
        continue;
      }
      ++c.used;
      const Word graph_pref = graph_prefix(oracle, v, r);
      if (!(graph_pref == x.prefix(r))) c.mismatches += 1;
      bool changed = false;
      for (std::int64_t step = 0; step < horizon_after; ++step) {
        ustep.clear();
        law.sample_into(ustep, rng);
        act_inplace(oracle, v, ustep);
        if (!(graph_prefix(oracle, v, r) == graph_pref)) {
          changed = true;
          break;
        }
      }
      if (changed) c.changes += 1;
    }
    return c;
  });
  PrefixFlipEstimate est;
  double changes = 0, mismatches = 0;
  for (const auto& c : chunks) {
    est.samples_used += c.used;
    est.censored += c.censored;
    changes += c.changes;
    mismatches += c.mismatches;
  }
  est.horizon_caveat = true;
  if (est.samples_used == 0) return est;
  const double m = static_cast<double>(est.samples_used);
  est.change_prob = changes / m;
  est.mismatch_prob = mismatches / m;
  est.change_ci = 1.96 * std::sqrt(est.change_prob * (1 - est.change_prob) / m);
  est.mismatch_ci = 1.96 * std::sqrt(est.mismatch_prob * (1 - est.mismatch_prob) / m);
  return est;
}

// --- component-crossing inequality ---------------------------------------------

struct CrossingReport {
  double lhs = 0.0, lhs_se = 0.0;
  double rhs = 0.0, rhs_se = 0.0;
  bool holds_within_ci = false;
  bool rhs_stabilized = true;
  std::int64_t ball_count = 0;  // |A|
};

// A is the root ball of the given radius on the glued graph.  Components
// of the complement are keyed by the depth-(rho+1) gate every escape
// route must cross.  lhs counts consecutive-step component changes from
// time m on; rhs is |A| E[|X_1| g^{m+}(root, B(rho+|X_1|))].
inline CrossingReport stankov_check(const GluedOracle& oracle, int rho, std::int64_t m,
                                    const StepLaw& law, std::int64_t samples,
                                    std::int64_t horizon, std::uint64_t seed,
                                    int threads = 1) {
  if (rho + 1 > oracle.depth())
    throw contract_error("component radius needs rho + 1 <= glued depth");
  const int d = oracle.rank();
  const int lmax = law.max_step_length();
  const int max_radius = rho + lmax;
  const CopyDistanceTable copy_dist(d, std::max(0, max_radius - static_cast<int>(oracle.depth())) + 2);

  const auto dist_of = [&](const GluedVertex& v) -> std::int64_t {
    const auto dd = glued_root_distance(oracle, v, copy_dist);
    return dd ? *dd : std::numeric_limits<std::int64_t>::max();
  };

  struct Chunk {
    MeanAccumulator crossings;
    std::vector<MeanAccumulator> ball_visits;  // per radius rho+1 .. rho+lmax
  };
  const auto chunks = run_chunked<Chunk>(samples, threads, [&](ChunkRange range) {
    Chunk c;
    c.ball_visits.resize(static_cast<std::size_t>(lmax));
    for (std::int64_t rep = range.begin; rep < range.end; ++rep) {
      Rng rng(seed, 0x63726f73, static_cast<std::uint64_t>(rep));
      GluedVertex v = oracle.root();
      std::int64_t dist = 0;
      bool in_a_prev = true;
      std::uint64_t comp_prev = 0;
      double crossings = 0;
      std::vector<double> visits(static_cast<std::size_t>(lmax), 0.0);
      Word ustep;
      for (std::int64_t t = 0; t <= horizon; ++t) {
        if (t > 0) {
          ustep.clear();
          law.sample_into(ustep, rng);
          act_inplace(oracle, v, ustep);
          dist = dist_of(v);
        }
        const bool in_a = dist <= rho;
        const std::uint64_t comp = in_a ? 0 : graph_prefix(oracle, v, rho + 1).hash();
        if (t > m && !in_a && !in_a_prev && comp != comp_prev) crossings += 1;
        if (t >= m) {
          for (int k = 0; k < lmax; ++k)
            if (dist <= rho + 1 + k) visits[static_cast<std::size_t>(k)] += 1;
        }
        in_a_prev = in_a;
        comp_prev = comp;
      }
      c.crossings.add(crossings);
      for (int k = 0; k < lmax; ++k)
        c.ball_visits[static_cast<std::size_t>(k)].add(visits[static_cast<std::size_t>(k)]);
    }
    return c;
  });

  MeanAccumulator crossings;
  std::vector<MeanAccumulator> ball_visits(static_cast<std::size_t>(lmax));
  for (const auto& c : chunks) {
    crossings.merge(c.crossings);
    for (int k = 0; k < lmax; ++k)
      ball_visits[static_cast<std::size_t>(k)].merge(c.ball_visits[static_cast<std::size_t>(k)]);
  }

  CrossingReport rep;
  rep.ball_count = static_cast<std::int64_t>(ball_size(d, rho));
  rep.lhs = crossings.mean();
  rep.lhs_se = crossings.stderror();
  double rhs = 0, rhs_var = 0;
  for (int len = 1; len <= lmax; ++len) {
    const double q = law.length_pmf(len);
    if (q <= 0) continue;
    const auto& g = ball_visits[static_cast<std::size_t>(len - 1)];
    const double w = static_cast<double>(rep.ball_count) * q * static_cast<double>(len);
    rhs += w * g.mean();
    rhs_var += w * w * g.stderror() * g.stderror();
  }
  rep.rhs = rhs;
  rep.rhs_se = std::sqrt(rhs_var);
  rep.holds_within_ci =
      rep.lhs <= rep.rhs + 1.96 * std::sqrt(rep.lhs_se * rep.lhs_se + rep.rhs_se * rep.rhs_se);
  return rep;
}

// --- Bernoulli-window entropy sweep ---------------------------------------------

struct SweepRow {
  double p = 0.0;
  double h = 0.0;       // mean over window draws of H(coset tuple)/t
  double se = 0.0;      // between-draw standard error
  std::int64_t draws = 0;
  std::int64_t empty_draws = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::int64_t window_size = 0;
};

// Vertex-major evaluation: every window vertex's orbit hash column is
// computed once and mixed into the running tuple hash of each (p, draw)
// that includes the vertex.  Inclusion bits are keyed by (seed, draw,
// vertex index), matching the product-Bernoulli window measure.
template <Oracle O>
SweepResult irs_entropy_sweep(const O& oracle, int window_radius,
                              std::span<const double> p_grid, int t,
                              std::int64_t walk_samples, int core_samples,
                              const StepLaw& law, std::uint64_t seed) {
  const auto window = bfs_ball(oracle, oracle.root(), window_radius);
  const auto n_walks = static_cast<std::size_t>(walk_samples);

  // the walk words, sampled once and shared by every draw
  std::vector<Word> words(n_walks);
  for (std::size_t i = 0; i < n_walks; ++i) {
    Rng rng(seed, 0x73776565, static_cast<std::uint64_t>(i));
    Word x;
    for (int s = 0; s < t; ++s) law.sample_into(x, rng);
    words[i] = std::move(x);
  }

  const std::size_t combos = p_grid.size() * static_cast<std::size_t>(core_samples);
  std::vector<std::vector<std::uint64_t>> running(
      combos, std::vector<std::uint64_t>(n_walks, 0x9e3779b97f4a7c15ULL));
  std::vector<std::int64_t> included(combos, 0);

  std::vector<std::uint64_t> column(n_walks);
  for (std::size_t vi = 0; vi < window.vertices.size(); ++vi) {
    bool column_ready = false;
    for (std::size_t pi = 0; pi < p_grid.size(); ++pi) {
      for (int draw = 0; draw < core_samples; ++draw) {
        const std::uint64_t draw_key =
            mix_keys(static_cast<std::uint64_t>(pi) * 1315423911ULL + 7,
                     static_cast<std::uint64_t>(draw));
        if (!bernoulli_keyed(seed, draw_key, static_cast<std::uint64_t>(vi), p_grid[pi]))
          continue;
        if (!column_ready) {
          typename O::vertex_type scratch;
          for (std::size_t i = 0; i < n_walks; ++i) {
            scratch = window.vertices[vi];
            act_inplace(oracle, scratch, words[i]);
            column[i] = scratch.hash();
          }
          column_ready = true;
        }
        auto& h = running[pi * static_cast<std::size_t>(core_samples) +
                          static_cast<std::size_t>(draw)];
        for (std::size_t i = 0; i < n_walks; ++i) h[i] = mix_keys(h[i], column[i]);
        ++included[pi * static_cast<std::size_t>(core_samples) + static_cast<std::size_t>(draw)];
      }
    }
  }

  SweepResult res;
  res.window_size = static_cast<std::int64_t>(window.vertices.size());
  for (std::size_t pi = 0; pi < p_grid.size(); ++pi) {
    MeanAccumulator acc;
    std::int64_t empty = 0;
    for (int draw = 0; draw < core_samples; ++draw) {
      const auto idx = pi * static_cast<std::size_t>(core_samples) + static_cast<std::size_t>(draw);
      if (included[idx] == 0) {
        ++empty;
        acc.add(0.0);  // empty window: zero entropy, counted
        continue;
      }
      Tally tally;
      for (std::size_t i = 0; i < n_walks; ++i) tally.add(running[idx][i]);
      const auto est = empirical_entropy(tally, seed ^ idx, /*bootstrap_resamples=*/0);
      acc.add(est.value / static_cast<double>(t));
    }
    res.rows.push_back({p_grid[pi], acc.mean(), acc.stderror(),
                        static_cast<std::int64_t>(core_samples), empty});
  }
  return res;
}

// --- projected-walk entropy decay ------------------------------------------------

struct DecayRow {
  int t;
  double entropy;
  double increment;
  double ci_halfwidth;
};

// Empirical entropy of the projected walk at each time, with coupled
// samples so increments difference out common noise.
template <Oracle O>
std::vector<DecayRow> norm_entropy_decay(const O& oracle, const StepLaw& law, int t_max,
                                         std::int64_t samples, std::uint64_t seed,
                                         int threads = 1) {
  struct Chunk {
    std::vector<Tally> per_t;
  };
  const auto chunks = run_chunked<Chunk>(samples, threads, [&](ChunkRange range) {
    Chunk c;
    c.per_t.resize(static_cast<std::size_t>(t_max) + 1);
    for (std::int64_t rep = range.begin; rep < range.end; ++rep) {
      Rng rng(seed, 0x64656361, static_cast<std::uint64_t>(rep));
      auto v = oracle.root();
      Word ustep;
      c.per_t[0].add(v.hash());
      for (int t = 1; t <= t_max; ++t) {
        ustep.clear();
        law.sample_into(ustep, rng);
        act_inplace(oracle, v, ustep);
        c.per_t[static_cast<std::size_t>(t)].add(v.hash());
      }
    }
    return c;
  });
  std::vector<Tally> per_t(static_cast<std::size_t>(t_max) + 1);
  for (const auto& c : chunks)
    for (std::size_t t = 0; t < per_t.size(); ++t) per_t[t].merge(c.per_t[t]);

  std::vector<DecayRow> rows;
  double prev = 0.0;
  for (int t = 0; t <= t_max; ++t) {
    const auto est = empirical_entropy(per_t[static_cast<std::size_t>(t)], seed + static_cast<std::uint64_t>(t),
                                       /*bootstrap_resamples=*/60);
    rows.push_back({t, est.value, est.value - prev, est.ci_halfwidth});
    prev = est.value;
  }
  return rows;
}

}  // namespace irswalk
