#pragma once

// Monte-Carlo Green-function estimates on oracle graphs, plus the glued
// graph's distance geometry (needed to decide ball membership without
// materializing anything).

#include <cstdint>
#include <cstdlib>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "irswalk/accum.hpp"
#include "irswalk/schreier.hpp"
#include "irswalk/walks.hpp"

namespace irswalk {

// Distances from the leaf inside one attachment copy of the nilpotent
// Cayley graph (the copy with the oriented edge (1,a) deleted and the
// leaf spliced in).  Identical for every leaf, so computed once.
class CopyDistanceTable {
 public:
  CopyDistanceTable(int d, int radius) : d_(d), radius_(radius) {
    const NilElement one = NilElement::identity(d);
    const NilElement a = NilElement::generator(d, 1);
    std::vector<NilElement> layer;
    if (radius >= 1) {
      dist_.emplace(one, 1);
      dist_.emplace(a, 1);
      layer = {one, a};
    }
    for (int dd = 2; dd <= radius; ++dd) {
      std::vector<NilElement> next;
      for (const auto& v : layer) {
        for (int idx = 0; idx < 2 * d; ++idx) {
          const Letter l = detail::letter_at(d, idx);
          if (letter_gen(l) == 1) {
            // the deleted oriented edge (1,a) is not available inside the copy
            if (l > 0 && v == one) continue;
            if (l < 0 && v == a) continue;
          }
          const NilElement w = v * NilElement::generator(d, l);
          if (dist_.emplace(w, dd).second) next.push_back(w);
        }
      }
      layer = std::move(next);
    }
  }

  int radius() const { return radius_; }

  // distance from the leaf vertex, or nothing if beyond the table
  std::optional<std::int32_t> distance(const NilElement& x) const {
    auto it = dist_.find(x);
    if (it == dist_.end()) return std::nullopt;
    return it->second;
  }

  // elements at exact distance k from the leaf
  std::vector<NilElement> shell(int k) const {
    std::vector<NilElement> out;
    for (const auto& [e, dd] : dist_)
      if (dd == k) out.push_back(e);
    return out;
  }

 private:
  int d_;
  int radius_;
  std::unordered_map<NilElement, std::int32_t, NilHash> dist_;
};

// Root distance of a glued vertex.  Attachments meet the graph only at
// their leaf, so dist(root, v) = n + dist-within-attachment.  Returns
// nothing when the vertex is deeper than the copy table can see.
inline std::optional<std::int64_t> glued_root_distance(const GluedOracle& o,
                                                       const GluedVertex& v,
                                                       const CopyDistanceTable& copy_dist) {
  switch (v.kind) {
    case GluedVertex::Kind::tree:
      return v.leaf.size();
    case GluedVertex::Kind::ray:
      return o.depth() + std::llabs(v.line_pos);
    case GluedVertex::Kind::copy: {
      const auto dd = copy_dist.distance(v.elt);
      if (!dd) return std::nullopt;
      return o.depth() + *dd;
    }
  }
  throw contract_error("corrupt vertex kind");
}

struct GreenEstimate {
  double mean = 0.0;
  double stderror = 0.0;
  double ci_halfwidth = 0.0;
  std::int64_t samples = 0;
  bool stabilized = true;
  double tail_fraction = 0.0;  // share of visits in the last horizon quarter
  bool horizon_warning = false;
};

// Expected number of visits to the target set during [m, horizon],
// starting at `source`.  Convention: the walk starts at the second
// argument of the paper-style Green function and visits to the target
// are counted; symmetric laws make the order immaterial on quotients.
template <Oracle O, class InTarget>
GreenEstimate green_estimate(const O& o, const typename O::vertex_type& source,
                             InTarget&& in_target, std::int64_t m, const StepLaw& law,
                             std::int64_t samples, std::int64_t horizon,
                             std::uint64_t seed, double tail_tolerance = 0.02) {
  GreenEstimate est;
  if (m > horizon) {
    est.horizon_warning = true;
    return est;
  }
  MeanAccumulator acc;
  KahanSum tail_sum;
  const std::int64_t tail_start = horizon - (horizon - m) / 4;
  for (std::int64_t rep = 0; rep < samples; ++rep) {
    Rng rng(seed, 0x67726565, static_cast<std::uint64_t>(rep));
    auto v = source;
    double visits = 0, tail_visits = 0;
    Word step_buf;
    for (std::int64_t t = 0; t <= horizon; ++t) {
      if (t > 0) {
        step_buf.clear();
        law.sample_into(step_buf, rng);
        act_inplace(o, v, step_buf);
      }
      if (t >= m && in_target(v)) {
        visits += 1;
        if (t >= tail_start) tail_visits += 1;
      }
    }
    acc.add(visits);
    tail_sum.add(tail_visits);
  }
  est.samples = samples;
  est.mean = acc.mean();
  est.stderror = acc.stderror();
  est.ci_halfwidth = 1.96 * est.stderror;
  const double tail_mean = tail_sum.value() / static_cast<double>(samples);
  est.tail_fraction = est.mean > 0 ? tail_mean / est.mean : 0.0;
  est.stabilized = tail_mean <= tail_tolerance * est.mean + 1e-4;
  return est;
}

struct VisitProfileRow {
  int r;
  double mean;
  double stderror;
};

struct VisitProfile {
  std::vector<VisitProfileRow> rows;
  double growth_exponent = 0.0;  // least-squares slope of log(mean) vs log(r)
};

// Time spent in |X_t| <= r on the free group, for each requested radius.
inline VisitProfile visit_count_profile(const StepLaw& law, std::span<const int> r_values,
                                        std::int64_t samples, std::int64_t horizon,
                                        std::uint64_t seed) {
  int rmax = 0;
  for (int r : r_values) rmax = std::max(rmax, r);
  std::vector<MeanAccumulator> acc(r_values.size());
  for (std::int64_t rep = 0; rep < samples; ++rep) {
    Rng rng(seed, 0x76697369, static_cast<std::uint64_t>(rep));
    std::vector<double> counts(static_cast<std::size_t>(rmax) + 1, 0.0);
    Word x;
    for (std::int64_t t = 0; t <= horizon; ++t) {
      if (t > 0) law.sample_into(x, rng);
      const auto len = x.size();
      if (len <= rmax) counts[static_cast<std::size_t>(len)] += 1;
    }
    // suffix sums: time at distance exactly k -> time within radius r
    double cum = 0.0;
    std::vector<double> within(static_cast<std::size_t>(rmax) + 1, 0.0);
    for (int k = 0; k <= rmax; ++k) {
      cum += counts[static_cast<std::size_t>(k)];
      within[static_cast<std::size_t>(k)] = cum;
    }
    for (std::size_t i = 0; i < r_values.size(); ++i)
      acc[i].add(within[static_cast<std::size_t>(r_values[i])]);
  }
  VisitProfile prof;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < r_values.size(); ++i) {
    prof.rows.push_back({r_values[i], acc[i].mean(), acc[i].stderror()});
    if (r_values[i] > 0 && acc[i].mean() > 0) {
      lx.push_back(std::log(static_cast<double>(r_values[i])));
      ly.push_back(std::log(acc[i].mean()));
    }
  }
  if (lx.size() >= 2) prof.growth_exponent = ls_slope(lx, ly);
  return prof;
}

}  // namespace irswalk
