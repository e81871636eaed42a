#pragma once

// Experiment assemblies shared by the command-line runner and the
// acceptance suite.

#include <set>
#include <string>
#include <vector>

#include "irswalk/entropy.hpp"
#include "irswalk/green.hpp"
#include "irswalk/irs.hpp"
#include "irswalk/locality.hpp"
#include "irswalk/parallel.hpp"
#include "irswalk/walks.hpp"

namespace irswalk {

// Mean |X_steps| / steps over many walks.
inline MeanAccumulator walk_speed(const StepLaw& law, std::int64_t steps,
                                  std::int64_t samples, std::uint64_t seed,
                                  int threads = 1) {
  const auto chunks = run_chunked<MeanAccumulator>(samples, threads, [&](ChunkRange range) {
    MeanAccumulator acc;
    for (std::int64_t rep = range.begin; rep < range.end; ++rep) {
      Rng rng(seed, 0x73706565, static_cast<std::uint64_t>(rep));
      Word x;
      for (std::int64_t t = 0; t < steps; ++t) law.sample_into(x, rng);
      acc.add(static_cast<double>(x.size()) / static_cast<double>(steps));
    }
    return acc;
  });
  MeanAccumulator total;
  for (const auto& c : chunks) total.merge(c);
  return total;
}

// Deterministic list of words with finite conjugate-norm counts on the
// glued graphs: double commutators and short conjugates of them.  Every
// word projects trivially to the nilpotent quotient and to each integer
// line, which is what confines its moved set near the seams.
inline std::vector<Word> core_word_family(std::size_t count) {
  const Word a = word_of({1}), b = word_of({2});
  const auto comm = [](const Word& u, const Word& v) {
    return u.inverse() * v.inverse() * u * v;
  };
  const Word c1 = comm(a, comm(a, b));
  const Word c2 = comm(b, comm(a, b));
  std::vector<Word> out;
  std::set<std::string> seen;
  const auto add = [&](const Word& w) {
    if (out.size() >= count || w.empty()) return;
    if (seen.insert(format_word(w)).second) out.push_back(w);
  };
  add(c1);
  add(c2);
  for (int r = 1; r <= 2 && out.size() < count; ++r) {
    for (const auto& w : ball(2, r)) {
      if (w.size() != r) continue;
      add(w * c1 * w.inverse());
      add(w * c2 * w.inverse());
    }
  }
  if (out.size() < count)
    throw std::invalid_argument("core word family supports at most the generated size");
  return out;
}

struct GlueVerifyResult {
  int n = 0;
  bool properness_ok = false;
  std::int64_t properness_checked = 0;
  bool rad_ok = false;
  std::int64_t ball_count = 0;
  LocalityReport locality;
  bool ok() const { return properness_ok && rad_ok && locality.ok(); }
};

inline GlueVerifyResult run_glue_verify(int n, int d, int r, std::int64_t locality_samples,
                                        std::uint64_t seed) {
  GluedOracle oracle(n, d);
  GlueVerifyResult res;
  res.n = n;

  const auto window = bfs_ball(oracle, oracle.root(), n + 3);
  const auto prop = verify_properness(oracle, window.vertices);
  res.properness_ok = prop.ok();
  res.properness_checked = prop.checked;

  res.rad_ok = verify_rad(oracle, n);
  res.ball_count = static_cast<std::int64_t>(bfs_ball(oracle, oracle.root(), n).vertices.size());

  const std::int64_t R = n + r + 1;
  const CopyDistanceTable copy_dist(d, static_cast<int>(R) - n + 28);
  const auto refs = locality_references(oracle, r, copy_dist);
  Rng rng(seed, 0x676c7565);
  const auto far = sample_far_vertices(oracle, R, locality_samples, copy_dist, rng);
  res.locality = verify_locality(oracle, r, R, refs, far, copy_dist);
  return res;
}

}  // namespace irswalk
