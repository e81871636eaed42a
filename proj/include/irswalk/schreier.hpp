#pragma once

// Lazy proper rooted S-labeled oriented multigraphs.  An oracle exposes a
// root and a successor function per letter; vertices are structured
// addresses, nothing is ever materialized.  Properness means every label
// acts bijectively, so the inverse label is the inverse map.

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <tuple>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "irswalk/errors.hpp"
#include "irswalk/nilquot.hpp"
#include "irswalk/words.hpp"

namespace irswalk {

template <class O>
concept Oracle = requires(const O& o, const typename O::vertex_type& v, Letter s) {
  { o.root() } -> std::same_as<typename O::vertex_type>;
  { o.step(v, s) } -> std::same_as<typename O::vertex_type>;
  { o.rank() } -> std::convertible_to<int>;
  { o.describe(v) } -> std::convertible_to<std::string>;
};

template <class V>
struct VertexHash {
  std::size_t operator()(const V& v) const { return static_cast<std::size_t>(v.hash()); }
};

// --- concrete oracle families ----------------------------------------------

struct ZsVertex {
  std::int64_t pos = 0;
  bool operator==(const ZsVertex&) const = default;
  std::uint64_t hash() const { return splitmix64(static_cast<std::uint64_t>(pos)); }
};

// The integer line in direction s with loops for every other generator.
class ZsOracle {
 public:
  using vertex_type = ZsVertex;
  ZsOracle(int d, int s) : d_(d), s_(s) {
    if (s < 1 || s > d) throw std::invalid_argument("bad line generator");
  }
  vertex_type root() const { return {}; }
  vertex_type step(const vertex_type& v, Letter l) const {
    check_letter(l, d_);
    if (letter_gen(l) != s_) return v;
    return {v.pos + (l > 0 ? 1 : -1)};
  }
  void step_inplace(vertex_type& v, Letter l) const { v = step(v, l); }
  int rank() const { return d_; }
  std::string describe(const vertex_type& v) const { return std::to_string(v.pos); }

 private:
  int d_, s_;
};

// Cayley graph of the 2-step nilpotent quotient.
class NilCayleyOracle {
 public:
  using vertex_type = NilElement;
  explicit NilCayleyOracle(int d) : d_(d) { NilElement::identity(d); }
  vertex_type root() const { return NilElement::identity(d_); }
  vertex_type step(const vertex_type& v, Letter l) const {
    check_letter(l, d_);
    return v * NilElement::generator(d_, l);
  }
  void step_inplace(vertex_type& v, Letter l) const { v = step(v, l); }
  int rank() const { return d_; }
  std::string describe(const vertex_type& v) const { return v.describe(); }

 private:
  int d_;
};

struct ZdVertex {
  std::array<std::int32_t, kMaxNilRank> coord{};
  bool operator==(const ZdVertex&) const = default;
  std::uint64_t hash() const {
    std::uint64_t h = 0x2545f4914f6cdd1dULL;
    for (auto c : coord) h = splitmix64(h ^ static_cast<std::uint32_t>(c));
    return h;
  }
};

// Cayley graph of the abelianization Z^d.
class AbelianOracle {
 public:
  using vertex_type = ZdVertex;
  explicit AbelianOracle(int d) : d_(d) {
    if (d < 2 || d > kMaxNilRank) throw std::invalid_argument("abelian rank out of range");
  }
  vertex_type root() const { return {}; }
  vertex_type step(const vertex_type& v, Letter l) const {
    vertex_type w = v;
    step_inplace(w, l);
    return w;
  }
  void step_inplace(vertex_type& v, Letter l) const {
    check_letter(l, d_);
    v.coord[static_cast<std::size_t>(letter_gen(l) - 1)] += (l > 0 ? 1 : -1);
  }
  int rank() const { return d_; }
  std::string describe(const vertex_type& v) const {
    std::string s = "(";
    for (int i = 0; i < d_; ++i)
      s += (i ? "," : "") + std::to_string(v.coord[static_cast<std::size_t>(i)]);
    return s + ")";
  }

 private:
  int d_;
};

struct FreeVertex {
  Word word;
  bool operator==(const FreeVertex&) const = default;
  std::uint64_t hash() const { return word.hash(); }
};

// Cayley graph of F_d itself (the trivial-subgroup Schreier graph).
class FreeOracle {
 public:
  using vertex_type = FreeVertex;
  explicit FreeOracle(int d) : d_(d) {}
  vertex_type root() const { return {}; }
  vertex_type step(const vertex_type& v, Letter l) const {
    vertex_type w = v;
    step_inplace(w, l);
    return w;
  }
  void step_inplace(vertex_type& v, Letter l) const {
    check_letter(l, d_);
    v.word.push(l);
  }
  int rank() const { return d_; }
  std::string describe(const vertex_type& v) const { return format_word(v.word); }

 private:
  int d_;
};

// --- the glued graph ---------------------------------------------------------
//
// Depth-n tree of reduced words with an attachment hanging off each leaf f
// (|f| = n, incoming tree edge labeled t):
//   * t in {a, a^-1} (a = a_1): the missing a-direction continues into a
//     one-way a-labeled ray; every other generator gets a two-sided line
//     through f; non-matching labels loop on ray and line vertices.
//   * otherwise: the missing t-direction continues into a one-way t-ray,
//     generators outside {a, t} get two-sided lines, and the a-edges at f
//     are spliced into a fresh copy of the nilpotent Cayley graph whose
//     oriented edge (1, a) has been deleted:  f.a = copy(a), copy(1).a = f.
//
// Every attachment meets the rest of the graph only at its leaf, so each
// tree ancestor is a cut vertex; this is what makes prefixes well defined.

struct GluedVertex {
  enum class Kind : std::uint8_t { tree, ray, copy };
  Kind kind = Kind::tree;
  std::int8_t line_gen = 0;   // ray: positive generator index of the line
  std::int64_t line_pos = 0;  // ray: nonzero position, the leaf sits at 0
  Word leaf;                  // tree: the word itself; ray/copy: the leaf word
  NilElement elt;             // copy: element of the nilpotent quotient

  bool operator==(const GluedVertex&) const = default;
  std::uint64_t hash() const {
    std::uint64_t h = leaf.hash() ^ (static_cast<std::uint64_t>(kind) << 60);
    if (kind == Kind::ray)
      h = splitmix64(h ^ static_cast<std::uint64_t>(line_pos) ^
                     (static_cast<std::uint64_t>(line_gen) << 48));
    if (kind == Kind::copy) h = splitmix64(h ^ elt.hash());
    return h;
  }
};

class GluedOracle {
 public:
  using vertex_type = GluedVertex;

  GluedOracle(int n, int d) : n_(n), d_(d) {
    if (n < 1) throw std::invalid_argument("glued graph needs depth n >= 1");
    if (d < 2 || d > kMaxNilRank)
      throw std::invalid_argument("glued graph supports 2 <= d <= 4");
    nil_a_ = NilElement::generator(d, 1);
  }

  int depth() const { return n_; }
  int rank() const { return d_; }
  vertex_type root() const { return {}; }

  vertex_type step(const vertex_type& v, Letter l) const {
    vertex_type w = v;
    step_inplace(w, l);
    return w;
  }

  void step_inplace(vertex_type& v, Letter l) const {
    check_letter(l, d_);
    switch (v.kind) {
      case GluedVertex::Kind::tree: {
        if (!v.leaf.empty() && v.leaf.back() == letter_inverse(l)) {
          v.leaf.pop();
          return;
        }
        if (v.leaf.size() < n_) {
          v.leaf.push(l);
          return;
        }
        leaf_exit(v, l);
        return;
      }
      case GluedVertex::Kind::ray: {
        if (letter_gen(l) != v.line_gen) return;  // loop
        v.line_pos += (l > 0 ? 1 : -1);
        if (v.line_pos == 0) {
          v.kind = GluedVertex::Kind::tree;
          v.line_gen = 0;
        }
        return;
      }
      case GluedVertex::Kind::copy: {
        if (letter_gen(l) == 1) {
          if (l > 0 && v.elt.is_identity()) {  // deleted edge (1,a): splice to leaf
            v.kind = GluedVertex::Kind::tree;
            v.elt = NilElement{};
            return;
          }
          if (l < 0 && v.elt == nil_a_) {
            v.kind = GluedVertex::Kind::tree;
            v.elt = NilElement{};
            return;
          }
        }
        v.elt = v.elt * NilElement::generator(d_, l);
        return;
      }
    }
    throw contract_error("corrupt vertex kind");
  }

  std::string describe(const vertex_type& v) const {
    switch (v.kind) {
      case GluedVertex::Kind::tree:
        return "tree:" + format_word(v.leaf);
      case GluedVertex::Kind::ray:
        return "ray:" + format_word(v.leaf) + ":" + std::to_string(int(v.line_gen)) +
               ":" + std::to_string(v.line_pos);
      case GluedVertex::Kind::copy:
        return "copy:" + format_word(v.leaf) + ":" + v.elt.describe();
    }
    return "?";
  }

 private:
  void leaf_exit(vertex_type& v, Letter l) const {
    const int tgen = letter_gen(v.leaf.back());
    const int lgen = letter_gen(l);
    if (tgen != 1 && lgen == 1) {
      // splice into the nilpotent copy around the deleted edge
      v.kind = GluedVertex::Kind::copy;
      v.elt = (l > 0) ? nil_a_ : NilElement::identity(d_);
      return;
    }
    // one-way ray in the leaf's own direction, two-sided lines otherwise
    v.kind = GluedVertex::Kind::ray;
    v.line_gen = static_cast<std::int8_t>(lgen);
    v.line_pos = (l > 0) ? 1 : -1;
  }

  std::int64_t n_;
  int d_;
  NilElement nil_a_;
};

// Componentwise product; the stabilizer of the root pair is the
// intersection of the factor stabilizers.
template <Oracle O1, Oracle O2>
class ProductOracle {
 public:
  struct vertex_type {
    typename O1::vertex_type first;
    typename O2::vertex_type second;
    bool operator==(const vertex_type&) const = default;
    std::uint64_t hash() const { return mix_keys(first.hash(), second.hash()); }
  };

  ProductOracle(O1 a, O2 b) : a_(std::move(a)), b_(std::move(b)) {
    if (a_.rank() != b_.rank()) throw std::invalid_argument("rank mismatch in product");
  }
  vertex_type root() const { return {a_.root(), b_.root()}; }
  vertex_type step(const vertex_type& v, Letter l) const {
    return {a_.step(v.first, l), b_.step(v.second, l)};
  }
  int rank() const { return a_.rank(); }
  std::string describe(const vertex_type& v) const {
    return "(" + a_.describe(v.first) + "|" + b_.describe(v.second) + ")";
  }

 private:
  O1 a_;
  O2 b_;
};

// --- the action --------------------------------------------------------------

template <Oracle O>
void act_inplace(const O& o, typename O::vertex_type& v, std::span<const Letter> letters) {
  if constexpr (requires { o.step_inplace(v, Letter{1}); }) {
    for (Letter l : letters) o.step_inplace(v, l);
  } else {
    for (Letter l : letters) v = o.step(v, l);
  }
}

template <Oracle O>
void act_inplace(const O& o, typename O::vertex_type& v, const Word& g) {
  act_inplace(o, v, g.letters());
}

template <Oracle O>
typename O::vertex_type act(const O& o, typename O::vertex_type v,
                            std::span<const Letter> letters) {
  act_inplace(o, v, letters);
  return v;
}

template <Oracle O>
typename O::vertex_type act(const O& o, const typename O::vertex_type& v, const Word& g) {
  return act(o, v, g.letters());
}

// --- breadth-first machinery -------------------------------------------------

template <Oracle O>
struct BfsBall {
  std::vector<typename O::vertex_type> vertices;  // discovery order
  std::vector<std::int32_t> dist;
  std::unordered_map<typename O::vertex_type, std::int32_t, VertexHash<typename O::vertex_type>> index;
};

template <Oracle O>
BfsBall<O> bfs_ball(const O& o, const typename O::vertex_type& center, int radius,
                    std::int64_t cap = 20'000'000) {
  BfsBall<O> ball;
  ball.vertices.push_back(center);
  ball.dist.push_back(0);
  ball.index.emplace(center, 0);
  std::size_t head = 0;
  const int d = o.rank();
  while (head < ball.vertices.size()) {
    const auto v = ball.vertices[head];
    const auto dv = ball.dist[head];
    ++head;
    if (dv == radius) continue;
    for (int idx = 0; idx < 2 * d; ++idx) {
      const auto w = o.step(v, detail::letter_at(d, idx));
      if (ball.index.emplace(w, static_cast<std::int32_t>(ball.vertices.size())).second) {
        ball.vertices.push_back(w);
        ball.dist.push_back(dv + 1);
        if (static_cast<std::int64_t>(ball.vertices.size()) > cap)
          throw resource_error("bfs ball exceeded cap");
      }
    }
  }
  return ball;
}

struct PropernessReport {
  std::int64_t checked = 0;
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

// Round-trip check: successor then predecessor (and the reverse) is the
// identity at every window vertex, for every positive label.
template <Oracle O>
PropernessReport verify_properness(const O& o,
                                   std::span<const typename O::vertex_type> window,
                                   std::size_t max_violations = 16) {
  PropernessReport rep;
  const int d = o.rank();
  for (const auto& v : window) {
    ++rep.checked;
    for (int g = 1; g <= d; ++g) {
      const auto s = static_cast<Letter>(g);
      if (!(o.step(o.step(v, s), letter_inverse(s)) == v))
        rep.violations.push_back("succ/pred[" + std::to_string(g) + "] " + o.describe(v));
      if (!(o.step(o.step(v, letter_inverse(s)), s) == v))
        rep.violations.push_back("pred/succ[" + std::to_string(g) + "] " + o.describe(v));
      if (rep.violations.size() >= max_violations) return rep;
    }
  }
  return rep;
}

// True iff the radius-n ball at the root is a tree with the free-group
// ball count, i.e. no word of length <= 2n stabilizes the root.
template <Oracle O>
bool verify_rad(const O& o, int n) {
  const int d = o.rank();
  std::unordered_map<typename O::vertex_type, std::int32_t, VertexHash<typename O::vertex_type>>
      seen;
  std::vector<typename O::vertex_type> order{o.root()};
  std::vector<std::int32_t> dist{0};
  std::vector<std::int32_t> parent{-1};
  seen.emplace(o.root(), 0);
  std::size_t head = 0;
  while (head < order.size()) {
    const auto v = order[head];
    const auto dv = dist[head];
    const auto pv = parent[head];
    const auto vi = static_cast<std::int32_t>(head);
    ++head;
    int parent_hits = 0;
    for (int idx = 0; idx < 2 * d; ++idx) {
      const auto w = o.step(v, detail::letter_at(d, idx));
      auto it = seen.find(w);
      if (it == seen.end()) {
        if (dv < n) {  // depth n+1 targets lie outside the ball
          seen.emplace(w, static_cast<std::int32_t>(order.size()));
          order.push_back(w);
          dist.push_back(dv + 1);
          parent.push_back(vi);
        }
      } else if (it->second == vi) {
        return false;  // loop
      } else if (it->second == pv) {
        ++parent_hits;
      } else {
        return false;  // cross edge: not a tree
      }
    }
    if (vi != 0 && parent_hits != 1) return false;  // multi-edge to parent
  }
  return static_cast<double>(order.size()) == ball_size(d, n);
}

// --- canonical ball signatures ------------------------------------------------
//
// Label-ordered BFS assigns discovery indices; the encoding records, per
// vertex in discovery order and per direction, the index of the target or
// an out-of-ball marker.  Equal signatures <=> isomorphic rooted balls.

inline constexpr std::uint32_t kOutOfBall = 0xffffffffu;

template <Oracle O>
std::string ball_signature(const O& o, const typename O::vertex_type& center, int r) {
  const int d = o.rank();
  std::unordered_map<typename O::vertex_type, std::uint32_t, VertexHash<typename O::vertex_type>>
      index;
  std::vector<typename O::vertex_type> order{center};
  std::vector<std::int32_t> dist{0};
  index.emplace(center, 0);
  std::vector<std::uint32_t> code{static_cast<std::uint32_t>(d),
                                  static_cast<std::uint32_t>(r)};
  for (std::size_t head = 0; head < order.size(); ++head) {
    const auto v = order[head];
    const auto dv = dist[head];
    for (int idx = 0; idx < 2 * d; ++idx) {
      const auto w = o.step(v, detail::letter_at(d, idx));
      auto it = index.find(w);
      if (it != index.end()) {
        code.push_back(it->second);
        continue;
      }
      if (dv < r) {
        const auto id = static_cast<std::uint32_t>(order.size());
        index.emplace(w, id);
        order.push_back(w);
        dist.push_back(dv + 1);
        code.push_back(id);
      } else {
        code.push_back(kOutOfBall);  // one layer past the ball
      }
    }
  }
  std::string bytes;
  bytes.reserve(code.size() * 4);
  for (std::uint32_t c : code)
    for (int k = 0; k < 4; ++k) bytes += static_cast<char>((c >> (8 * k)) & 0xff);
  return bytes;
}

inline std::string hex_encode(const std::string& bytes) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (unsigned char c : bytes) {
    out += digits[c >> 4];
    out += digits[c & 0xf];
  }
  return out;
}

// --- graph prefixes -----------------------------------------------------------
//
// The depth-r tree ancestor every root path must cross.  On the glued
// graph this is an address computation; attachments hang below their leaf,
// so the ancestor of a ray or copy vertex is the leaf's word prefix.

inline Word graph_prefix(const GluedOracle& o, const GluedVertex& v, std::int64_t r) {
  if (r > o.depth())
    throw contract_error("prefix radius exceeds the glued depth guarantee");
  return v.leaf.prefix(r);
}

// Fallback for any oracle whose root ball is known to be a tree out to
// radius r (caller vouches via rad_verified).  Works by intersecting a
// ball around the root with a reverse search from the vertex.
template <Oracle O>
Word graph_prefix_generic(const O& o, const typename O::vertex_type& v, int r,
                          bool rad_verified, std::int64_t cap = 4'000'000) {
  if (!rad_verified)
    throw contract_error("graph_prefix needs rad >= r verified first");
  const int d = o.rank();
  // geodesic words from the root, by BFS target
  std::unordered_map<typename O::vertex_type, Word, VertexHash<typename O::vertex_type>> word_of;
  std::vector<typename O::vertex_type> frontier{o.root()};
  word_of.emplace(o.root(), Word{});
  for (int depth = 0; depth < r; ++depth) {
    std::vector<typename O::vertex_type> next;
    for (const auto& u : frontier) {
      const Word base = word_of.at(u);
      for (int idx = 0; idx < 2 * d; ++idx) {
        const Letter l = detail::letter_at(d, idx);
        auto w = o.step(u, l);
        if (word_of.count(w)) continue;
        Word ext = base;
        ext.push(l);
        word_of.emplace(w, std::move(ext));
        next.push_back(w);
      }
    }
    frontier = std::move(next);
  }
  if (auto it = word_of.find(v); it != word_of.end()) return it->second;  // |v| <= r
  // reverse BFS from v until the depth-r sphere is met; under the tree
  // property the first sphere vertex reached is the unique gate
  std::unordered_set<typename O::vertex_type, VertexHash<typename O::vertex_type>> seen{v};
  std::vector<typename O::vertex_type> layer{v};
  while (!layer.empty()) {
    std::vector<typename O::vertex_type> next;
    for (const auto& u : layer) {
      for (int idx = 0; idx < 2 * d; ++idx) {
        auto w = o.step(u, detail::letter_at(d, idx));
        if (!seen.insert(w).second) continue;
        if (auto it = word_of.find(w); it != word_of.end()) {
          if (it->second.size() == r) return it->second;
          continue;  // inside the ball but not on the sphere: skip, gate is deeper
        }
        next.push_back(w);
        if (static_cast<std::int64_t>(seen.size()) > cap)
          throw resource_error("prefix reverse search exceeded cap");
      }
    }
    layer = std::move(next);
  }
  throw contract_error("vertex not connected to the root");
}

}  // namespace irswalk
