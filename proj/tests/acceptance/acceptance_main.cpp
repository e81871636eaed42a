// Acceptance runner: eleven quantitative checks, one line of output each.
// Every tolerance is fixed here.  Run all criteria or a single one with
// --only K; exit status is nonzero if any executed criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "irswalk/experiments.hpp"
#include "irswalk/sl2.hpp"

using namespace irswalk;

namespace {

constexpr std::uint64_t kSeed = 20240817;
constexpr int kThreads = 4;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

// 1. speed of the simple walk: mean |X_1000|/1000 = 0.500 +- 0.005
Outcome criterion_speed() {
  const auto speed = walk_speed(StepLaw::srw(2), 1000, 100000, kSeed, kThreads);
  const bool pass = std::abs(speed.mean() - 0.5) <= 0.005;
  return {pass, "mean=" + fmt(speed.mean()) + " target 0.500+-0.005 (se=" +
                    fmt(speed.stderror()) + ")"};
}

// 2. entropy bracket: exact increments non-increasing to t=12; the
//    prefix-conditional lower bound and delta_12 bracket (1/2)ln3 with
//    total slack at most 5%
Outcome criterion_bracket() {
  const double target = 0.5 * std::log(3.0);
  const auto conv = exact_convolution_entropies(StepLaw::srw(2), 12);
  for (int t = 2; t <= 12; ++t)
    if (conv.increment[static_cast<std::size_t>(t)] >
        conv.increment[static_cast<std::size_t>(t - 1)] + 1e-12)
      return {false, "increments not monotone at t=" + std::to_string(t)};
  const double upper = conv.increment[12];
  const auto lower =
      prefix_conditional_rate(StepLaw::srw(2), 3, 6, 60, 100000, kSeed, 0, kThreads);
  const double slack =
      std::max(0.0, lower.lower - target) + std::max(0.0, target - upper);
  const bool pass = slack <= 0.05 * target && lower.lower <= upper;
  return {pass, "bracket [" + fmt(lower.lower) + ", " + fmt(upper) + "] target " +
                    fmt(target) + " slack " + fmt(slack) + " (allowed " +
                    fmt(0.05 * target) + ")"};
}

// 3. glued-graph invariants for n = 2..6
Outcome criterion_glue() {
  std::string detail;
  for (int n = 2; n <= 6; ++n) {
    const auto res = run_glue_verify(n, 2, 2, 1200, kSeed);
    const auto expected_ball = static_cast<std::int64_t>(2 * std::pow(3.0, n) - 1);
    if (!res.properness_ok) return {false, "properness failed at n=" + std::to_string(n)};
    if (!res.rad_ok || res.ball_count != expected_ball)
      return {false, "tree ball failed at n=" + std::to_string(n) + " (count " +
                         std::to_string(res.ball_count) + ")"};
    if (!res.locality.ok() || res.locality.checked < 1000)
      return {false, "locality failed at n=" + std::to_string(n) + " violations=" +
                         std::to_string(res.locality.violations)};
    detail += std::to_string(n) + ":ok(" + std::to_string(res.locality.checked) + ") ";
  }
  return {true, "properness+tree+locality " + detail + "(n=6 ball 1457)"};
}

// 4. Kac identity and hitting-measure symmetry
Outcome criterion_kac() {
  const auto table = build_coset_table();
  if (table.index != 12)
    return {false, "coset enumeration returned index " + std::to_string(table.index)};

  std::map<std::string, std::int64_t> atom_counts;
  MeanAccumulator ret;
  std::int64_t censored = 0;
  const std::int64_t samples = 1'000'000;
  for (std::int64_t rep = 0; rep < samples; ++rep) {
    Rng rng(kSeed, 0x68697474, static_cast<std::uint64_t>(rep));
    const auto s = hitting_sample(table, rng);
    if (s.censored) {
      ++censored;
      continue;
    }
    ret.add(static_cast<double>(s.return_time));
    ++atom_counts[format_word(s.witness)];
  }
  if (censored > 0) return {false, "censored samples: " + std::to_string(censored)};
  if (std::abs(ret.mean() - 12.0) > 0.12)
    return {false, "mean return " + fmt(ret.mean()) + " outside 12 +- 0.12"};

  // top-20 atoms: counts of w and w^-1 agree within 3 sigma
  std::vector<std::pair<std::int64_t, std::string>> by_count;
  for (const auto& [w, c] : atom_counts) by_count.emplace_back(c, w);
  std::sort(by_count.rbegin(), by_count.rend());
  int checked = 0;
  for (std::size_t i = 0; i < by_count.size() && checked < 20; ++i) {
    const auto& w = by_count[i].second;
    const Word parsed = parse_word(w, 2);
    const std::string winv = format_word(parsed.inverse());
    if (winv == w) continue;
    const double cg = static_cast<double>(by_count[i].first);
    const double ci = static_cast<double>(atom_counts.count(winv) ? atom_counts[winv] : 0);
    if (std::abs(cg - ci) > 3.0 * std::sqrt(cg + ci))
      return {false, "asymmetric atom " + w + ": " + fmt(cg) + " vs " + fmt(ci)};
    ++checked;
  }
  return {true, "E[T]=" + fmt(ret.mean()) + " (index 12), " + std::to_string(checked) +
                    " atom pairs symmetric"};
}

// 5. induced-walk entropy rate: ratio within 12(1 +- 0.1), T_k/k near 12
Outcome criterion_abramov() {
  const auto table = build_coset_table();
  const auto meas = abramov_measurement(table, 2'500'000, 12, kSeed);
  const auto tk = return_time_ratio(table, 2000, 50, kSeed ^ 0x77);
  const bool ratio_ok = meas.ratio >= 12.0 * 0.9 && meas.ratio <= 12.0 * 1.1;
  const bool tk_ok = std::abs(tk.mean() - 12.0) <= 0.1;
  return {ratio_ok && tk_ok,
          "rate ratio=" + fmt(meas.ratio) + " (+-" + fmt(1.96 * meas.ratio_se) +
              ") in [10.8,13.2]; T_k/k=" + fmt(tk.mean())};
}

// 6. Bernoulli membership law over stabilized words
Outcome criterion_core_marginal() {
  GluedOracle oracle(4, 2);
  const auto window = make_window(oracle, 18);
  const auto family = core_word_family(20);
  double max_dev = 0.0;
  for (const auto& g : family) {
    const auto nc = norm_on_window(oracle, window, g, 2);
    if (!nc.stabilized)
      return {false, "count not stabilized for " + format_word(g)};
    for (const double p : {0.1, 0.5, 0.9}) {
      const auto mc = core_marginal_check(oracle, window, g, p, 10000, kSeed);
      if (!mc.within_3_sigma)
        return {false, "marginal mismatch for " + format_word(g) + " at p=" + fmt(p) +
                           ": expected " + fmt(mc.expected) + " observed " +
                           fmt(mc.observed)};
      max_dev = std::max(max_dev, std::abs(mc.observed - mc.expected));
    }
  }
  return {true,
          "20 words stabilized on the R=18 window; all 60 marginals within 3 sigma "
          "(max dev " +
              fmt(max_dev) + ")"};
}

// 7. window-entropy sweep: zero endpoint, refinement monotonicity on fixed
//    samples, and the data-processing cap at p = 1
Outcome criterion_sweep() {
  GluedOracle oracle(4, 2);
  const auto srw = StepLaw::srw(2);
  std::vector<double> grid;
  for (int i = 0; i <= 10; ++i) grid.push_back(0.1 * i);
  const auto sweep = irs_entropy_sweep(oracle, 8, grid, 6, 6000, 6, srw, kSeed);
  if (sweep.rows.front().h != 0.0) return {false, "h(0) is not exactly zero"};

  // the matched-time upper estimate of the ambient rate: H(X_6)/6 exact;
  // the coset tuple is a function of the word, so its entropy sits below
  const auto conv = exact_convolution_entropies(srw, 6);
  const double ambient_upper = conv.entropy[6] / 6.0;
  const auto& last = sweep.rows.back();
  if (last.h > ambient_upper + 1.96 * last.se + 1e-9)
    return {false, "h(1)=" + fmt(last.h) + " above the ambient bound " +
                       fmt(ambient_upper)};
  for (const auto& row : sweep.rows)
    if (row.h > last.h + 1.96 * (row.se + last.se) + 1e-9)
      return {false, "h(1) not maximal over the grid"};

  // adding a root to a fixed window sample never decreases tuple entropy
  const auto window = bfs_ball(oracle, oracle.root(), 8);
  Rng rng(kSeed, 0x6d6f6e6f);
  std::vector<Word> words;
  for (int i = 0; i < 3000; ++i) {
    Word x;
    for (int t = 0; t < 6; ++t) srw.sample_into(x, rng);
    words.push_back(x);
  }
  const auto tuple_plugin = [&](const std::vector<std::size_t>& idxs) {
    Tally t;
    GluedVertex scratch;
    for (const auto& w : words) {
      std::uint64_t h = 0x5eed;
      for (auto vi : idxs) {
        scratch = window.vertices[vi];
        act_inplace(oracle, scratch, w);
        h = mix_keys(h, scratch.hash());
      }
      t.add(h);
    }
    return empirical_entropy(t, 1, 0).plug_in;
  };
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<std::size_t> base;
    for (std::size_t vi = 0; vi < window.vertices.size(); ++vi)
      if (rng.bernoulli(0.0008)) base.push_back(vi);
    auto extended = base;
    extended.push_back(static_cast<std::size_t>(rng.below(window.vertices.size())));
    if (tuple_plugin(extended) < tuple_plugin(base) - 1e-9)
      return {false, "tuple entropy decreased when a root was added"};
  }
  return {true, "h(0)=0, refinement monotone (25 trials), h(1)=" + fmt(last.h) +
                    " <= H(X_6)/6=" + fmt(ambient_upper)};
}

// 8. crossing inequality on the glued graph, nearest-neighbor and heavy tail
Outcome criterion_crossing() {
  GluedOracle oracle(4, 2);
  std::string detail;
  for (const auto& law : {StepLaw::srw(2), StepLaw::geodesic_tail(2, 2.5, 16)}) {
    const auto rep = stankov_check(oracle, 2, 0, law, 20000, 1200, kSeed, kThreads);
    if (!rep.holds_within_ci)
      return {false, law.id() + ": lhs " + fmt(rep.lhs) + " > rhs " + fmt(rep.rhs)};
    detail += law.id() + ": " + fmt(rep.lhs) + " <= " + fmt(rep.rhs) + "  ";
  }
  return {true, detail};
}

// 9. time in balls grows no faster than the cubic bound
Outcome criterion_visit_bound() {
  const std::vector<int> rs{1, 2, 3, 4, 5, 6, 7, 8};
  const auto prof = visit_count_profile(StepLaw::srw(2), rs, 100000, 2000, kSeed);
  const bool pass = prof.growth_exponent <= 3.0;
  return {pass, "fitted exponent " + fmt(prof.growth_exponent) + " <= 3"};
}

// 10. nilpotent projection loses entropy; the free walk does not
Outcome criterion_nil_decay() {
  const auto srw = StepLaw::srw(2);
  const auto rows =
      norm_entropy_decay(NilCayleyOracle(2), srw, 20, 300000, kSeed, kThreads);
  const double d2 = rows[2].increment, d20 = rows[20].increment;
  if (!(d20 < 0.5 * d2))
    return {false, "delta_20=" + fmt(d20) + " not below half of delta_2=" + fmt(d2)};
  const auto conv = exact_convolution_entropies(srw, 12);
  const bool control =
      conv.increment[12] > 0.5 && (conv.increment[10] - conv.increment[12]) < 0.025;
  if (!control) return {false, "free-group increments do not stabilize above 0.5"};
  return {true, "projected delta_20=" + fmt(d20) + " < delta_2/2=" + fmt(0.5 * d2) +
                    "; free control delta_12=" + fmt(conv.increment[12])};
}

// 11. prefix agreement at exit times improves with the radius
Outcome criterion_prefix_flip() {
  const auto law = StepLaw::geodesic_tail(2, 6.0, 64);
  std::vector<double> probs, cis;
  std::string detail;
  for (const std::int64_t n : {8, 16, 32}) {
    GluedOracle oracle(static_cast<int>(n * n * n), 2);
    const auto est = prefix_flip_rate(oracle, law, 4, n, 30000, 0, kSeed, kThreads);
    probs.push_back(est.mismatch_prob);
    cis.push_back(est.mismatch_ci);
    detail += "n=" + std::to_string(n) + ":" + fmt(est.mismatch_prob) + " ";
  }
  const bool pass = probs[1] <= probs[0] + cis[0] + cis[1] &&
                    probs[2] <= probs[1] + cis[1] + cis[2];
  return {pass, "mismatch " + detail + "(non-increasing within CI)"};
}

struct Criterion {
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {"walk-speed", criterion_speed},
      {"entropy-bracket", criterion_bracket},
      {"glued-invariants", criterion_glue},
      {"kac-identity", criterion_kac},
      {"abramov-ratio", criterion_abramov},
      {"core-marginal-law", criterion_core_marginal},
      {"window-entropy-sweep", criterion_sweep},
      {"crossing-inequality", criterion_crossing},
      {"visit-count-bound", criterion_visit_bound},
      {"nilpotent-decay", criterion_nil_decay},
      {"prefix-flip-decay", criterion_prefix_flip},
  };

  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) only = std::atoi(argv[i + 1]);
    if (std::strcmp(argv[i], "--list") == 0) {
      for (std::size_t k = 0; k < criteria.size(); ++k)
        std::printf("%2zu %s\n", k + 1, criteria[k].name);
      return 0;
    }
  }

  bool all_pass = true;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    if (only != 0 && static_cast<int>(k + 1) != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[k].run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%2zu/11] %-22s %s  %s  (%.1fs)\n", k + 1, criteria[k].name,
                out.pass ? "PASS" : "FAIL", out.detail.c_str(), secs);
    std::fflush(stdout);
    all_pass = all_pass && out.pass;
  }
  return all_pass ? 0 : 1;
}
