#pragma once

// Locality verification: every vertex far from the root must have an
// r-ball isomorphic to a reference ball from one of the model graphs
// (the nilpotent Cayley graph or an integer line with loops), or to one
// of the finitely many seam shapes where attachments meet their leaf.

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "irswalk/green.hpp"
#include "irswalk/schreier.hpp"

namespace irswalk {

struct ReferenceSignatures {
  // signature bytes -> human-readable label
  std::unordered_map<std::string, std::string> by_signature;

  void add(std::string sig, const std::string& label) {
    by_signature.emplace(std::move(sig), label);
  }
};

// Interior references (one base point suffices by transitivity) plus seam
// variants: ray/line starts and copy elements near the deleted edge, over
// every leaf (or a large deterministic sample when the tree is huge).
inline ReferenceSignatures locality_references(const GluedOracle& o, int r,
                                               const CopyDistanceTable& copy_dist,
                                               std::int64_t max_leaves = 4096) {
  const int d = o.rank();
  const int n = o.depth();
  ReferenceSignatures refs;
  for (int s = 1; s <= d; ++s) {
    ZsOracle zs(d, s);
    refs.add(ball_signature(zs, zs.root(), r), "line[" + std::to_string(s) + "]");
  }
  {
    NilCayleyOracle nil(d);
    refs.add(ball_signature(nil, nil.root(), r), "nil-interior");
  }

  std::vector<Word> leaves;
  if (ball_size(d, n) - ball_size(d, n - 1) <= static_cast<double>(max_leaves)) {
    for (auto& w : ball(d, n))
      if (w.size() == n) leaves.push_back(std::move(w));
  } else {
    Rng rng(0x6c656166);
    for (std::int64_t i = 0; i < max_leaves; ++i)
      leaves.push_back(random_reduced_word(d, n, rng));
  }

  std::vector<NilElement> near_seam;
  for (int k = 1; k <= std::min(r + 1, copy_dist.radius()); ++k)
    for (auto& e : copy_dist.shell(k)) near_seam.push_back(e);

  for (const Word& leaf : leaves) {
    const Letter t = leaf.back();
    GluedVertex base;
    base.leaf = leaf;
    for (int gidx = 0; gidx < 2 * d; ++gidx) {
      const Letter dir = detail::letter_at(d, gidx);
      if (leaf.back() == letter_inverse(dir)) continue;  // parent edge
      auto v = o.step(base, dir);
      if (v.kind == GluedVertex::Kind::ray) {
        for (int k = 1; k <= r + 1; ++k) {
          refs.add(ball_signature(o, v, r),
                   "seam-ray[" + std::to_string(int(v.line_gen)) + "]");
          v = o.step(v, dir);
        }
      }
    }
    if (letter_gen(t) != 1) {
      GluedVertex v;
      v.kind = GluedVertex::Kind::copy;
      v.leaf = leaf;
      for (const auto& e : near_seam) {
        v.elt = e;
        refs.add(ball_signature(o, v, r), "seam-copy");
      }
    }
  }
  return refs;
}

struct LocalityReport {
  std::int64_t checked = 0;
  std::int64_t violations = 0;
  std::map<std::string, std::int64_t> matched;  // reference label -> count
  std::vector<std::string> violation_examples;
  bool ok() const { return violations == 0 && checked > 0; }
};

template <class Vertices>
LocalityReport verify_locality(const GluedOracle& o, int r, std::int64_t R,
                               const ReferenceSignatures& refs, const Vertices& vertices,
                               const CopyDistanceTable& copy_dist) {
  LocalityReport rep;
  for (const auto& v : vertices) {
    const auto dist = glued_root_distance(o, v, copy_dist);
    if (dist && *dist <= R) continue;  // the definition only constrains |v| > R
    ++rep.checked;
    const auto sig = ball_signature(o, v, r);
    auto it = refs.by_signature.find(sig);
    if (it == refs.by_signature.end()) {
      ++rep.violations;
      if (rep.violation_examples.size() < 8)
        rep.violation_examples.push_back(o.describe(v));
    } else {
      ++rep.matched[it->second];
    }
  }
  return rep;
}

// Deterministic sample of vertices beyond distance R: ray and line points
// past the junction and copy elements drawn from distance shells.
inline std::vector<GluedVertex> sample_far_vertices(const GluedOracle& o, std::int64_t R,
                                                    std::int64_t count,
                                                    const CopyDistanceTable& copy_dist,
                                                    Rng& rng) {
  const int d = o.rank();
  const int n = o.depth();
  std::vector<GluedVertex> out;
  const std::int64_t base = std::max<std::int64_t>(1, R - n + 1);
  // shells of the copy attachment beyond the cutoff
  std::vector<std::vector<NilElement>> shells;
  for (int k = static_cast<int>(base); k <= copy_dist.radius(); ++k)
    shells.push_back(copy_dist.shell(k));
  while (static_cast<std::int64_t>(out.size()) < count) {
    const Word leaf = random_reduced_word(d, n, rng);
    const Letter t = leaf.back();
    GluedVertex v;
    v.leaf = leaf;
    const auto mode = rng.below(3);
    if (mode == 2 && letter_gen(t) != 1 && !shells.empty()) {
      const auto& shell = shells[static_cast<std::size_t>(rng.below(shells.size()))];
      if (shell.empty()) continue;
      v.kind = GluedVertex::Kind::copy;
      v.elt = shell[static_cast<std::size_t>(rng.below(shell.size()))];
      out.push_back(v);
      continue;
    }
    // a ray or line direction valid at this leaf
    v.kind = GluedVertex::Kind::ray;
    const std::int64_t pos = base + 1 + static_cast<std::int64_t>(rng.below(24));
    if (letter_gen(t) == 1) {
      // one-way a-ray on the side of t, or any two-sided line
      if (rng.below(2) == 0) {
        v.line_gen = 1;
        v.line_pos = t > 0 ? pos : -pos;
      } else {
        v.line_gen = static_cast<std::int8_t>(2 + rng.below(static_cast<std::uint64_t>(d - 1)));
        v.line_pos = rng.below(2) ? pos : -pos;
      }
    } else {
      if (rng.below(2) == 0) {
        v.line_gen = static_cast<std::int8_t>(letter_gen(t));
        v.line_pos = t > 0 ? pos : -pos;
      } else {
        // a two-sided line with a generator outside {a, t}; for d = 2 there
        // is none, fall back to the t-ray
        std::vector<int> candidates;
        for (int g = 2; g <= d; ++g)
          if (g != letter_gen(t)) candidates.push_back(g);
        if (candidates.empty()) {
          v.line_gen = static_cast<std::int8_t>(letter_gen(t));
          v.line_pos = t > 0 ? pos : -pos;
        } else {
          v.line_gen = static_cast<std::int8_t>(candidates[rng.below(candidates.size())]);
          v.line_pos = rng.below(2) ? pos : -pos;
        }
      }
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace irswalk
