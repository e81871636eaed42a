#pragma once

// Intersectional-IRS primitives over a window of Schreier vertices: the
// fixed-point test g in K^f <=> f.g = f, truncated conjugate-norm counts
// with a stabilization diagnostic, Bernoulli-p window samples, and core
// membership.  All conjugate-class quantities use the coset window as a
// proxy; every count carries its (R, delta) provenance.

#include <cstdint>
#include <vector>

#include "irswalk/entropy.hpp"
#include "irswalk/nilquot.hpp"
#include "irswalk/schreier.hpp"

namespace irswalk {

// g fixes the coset at v exactly when g lies in the stabilizer conjugate.
template <Oracle O>
bool omega_test(const O& o, const typename O::vertex_type& v, const Word& g) {
  return act(o, v, g) == v;
}

struct NormCount {
  Word g;
  std::int64_t radius = 0;
  std::int64_t delta = 0;
  std::int64_t count = 0;          // window vertices moved by g
  std::int64_t count_inner = 0;    // same at radius R - delta
  bool stabilized = false;
  bool locality_certified = false;  // g dies in every reference quotient
};

// Precomputed window shared across many norm evaluations.
template <Oracle O>
struct VertexWindow {
  BfsBall<O> ball;
  std::int64_t radius = 0;
};

template <Oracle O>
VertexWindow<O> make_window(const O& o, std::int64_t radius, std::int64_t cap = 20'000'000) {
  return {bfs_ball(o, o.root(), static_cast<int>(radius), cap), radius};
}

template <Oracle O>
std::vector<std::int64_t> moved_vertices(const O& o, const VertexWindow<O>& window,
                                         const Word& g) {
  std::vector<std::int64_t> out;
  typename O::vertex_type scratch;
  for (std::size_t i = 0; i < window.ball.vertices.size(); ++i) {
    scratch = window.ball.vertices[i];
    act_inplace(o, scratch, g);
    if (!(scratch == window.ball.vertices[i])) out.push_back(static_cast<std::int64_t>(i));
  }
  return out;
}

template <Oracle O>
NormCount norm_on_window(const O& o, const VertexWindow<O>& window, const Word& g,
                         std::int64_t delta = 2) {
  NormCount nc;
  nc.g = g;
  nc.radius = window.radius;
  nc.delta = delta;
  const auto moved = moved_vertices(o, window, g);
  for (const auto idx : moved) {
    ++nc.count;
    if (window.ball.dist[static_cast<std::size_t>(idx)] <= window.radius - delta)
      ++nc.count_inner;
  }
  nc.stabilized = (nc.count == nc.count_inner);
  const int d = o.rank();
  bool certified = d <= kMaxNilRank && nil_project(g, d).is_identity();
  for (int s = 1; s <= d && certified; ++s) certified = (pi_s(g, s) == 0);
  nc.locality_certified = certified;
  return nc;
}

template <Oracle O>
NormCount norm_truncated(const O& o, const Word& g, std::int64_t radius,
                         std::int64_t delta = 2, std::int64_t cap = 20'000'000) {
  const auto window = make_window(o, radius, cap);
  return norm_on_window(o, window, g, delta);
}

// A Bernoulli-p sample of window vertices.  Inclusion bits are keyed by
// (seed, draw, vertex index): lazy evaluation over any vertex subset is
// consistent with the fully materialized draw.
template <Oracle O>
struct CoreWindow {
  const O* oracle = nullptr;
  std::vector<typename O::vertex_type> included_roots;
  double p = 0.0;
  std::int64_t radius = 0;
  std::uint64_t seed = 0;
  std::uint64_t draw = 0;
};

template <Oracle O>
CoreWindow<O> sample_core_window(const O& o, const VertexWindow<O>& window, double p,
                                 std::uint64_t seed, std::uint64_t draw = 0) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("inclusion probability in [0,1]");
  CoreWindow<O> cw;
  cw.oracle = &o;
  cw.p = p;
  cw.radius = window.radius;
  cw.seed = seed;
  cw.draw = draw;
  for (std::size_t vi = 0; vi < window.ball.vertices.size(); ++vi)
    if (bernoulli_keyed(seed, draw, static_cast<std::uint64_t>(vi), p))
      cw.included_roots.push_back(window.ball.vertices[vi]);
  return cw;
}

// g lies in the sampled core iff it fixes every included root; the empty
// window accepts everything.
template <Oracle O>
bool core_contains(const CoreWindow<O>& cw, const Word& g) {
  typename O::vertex_type scratch;
  for (const auto& v : cw.included_roots) {
    scratch = v;
    act_inplace(*cw.oracle, scratch, g);
    if (!(scratch == v)) return false;
  }
  return true;
}

struct MarginalCheck {
  double expected = 0.0;  // (1-p)^count
  double observed = 0.0;
  double sigma = 0.0;     // binomial sd of the observed frequency
  std::int64_t draws = 0;
  bool within_3_sigma = false;
};

// Empirical Pr[g in Core_A] over window draws against the closed form.
// Membership depends only on the inclusion bits of the moved vertices, so
// only those bits are evaluated; the keyed stream makes this identical in
// law to drawing the entire window.
template <Oracle O>
MarginalCheck core_marginal_check(const O& o, const VertexWindow<O>& window, const Word& g,
                                  double p, std::int64_t draws, std::uint64_t seed) {
  const auto moved = moved_vertices(o, window, g);
  MarginalCheck mc;
  mc.draws = draws;
  mc.expected = std::pow(1.0 - p, static_cast<double>(moved.size()));
  std::int64_t hits = 0;
  for (std::int64_t dr = 0; dr < draws; ++dr) {
    bool in_core = true;
    for (const auto vi : moved) {
      if (bernoulli_keyed(seed, static_cast<std::uint64_t>(dr),
                          static_cast<std::uint64_t>(vi), p)) {
        in_core = false;
        break;
      }
    }
    if (in_core) ++hits;
  }
  mc.observed = static_cast<double>(hits) / static_cast<double>(draws);
  mc.sigma = std::sqrt(mc.expected * (1.0 - mc.expected) / static_cast<double>(draws));
  mc.within_3_sigma = std::abs(mc.observed - mc.expected) <= 3.0 * mc.sigma + 1e-12;
  return mc;
}

}  // namespace irswalk
