// Experiment runner: every subcommand writes a CSV of results plus a JSON
// manifest (config, seed, version, timings) into --out.  Reruns with the
// same config and seed reproduce the CSV byte for byte.

#include <CLI11.hpp>
#include <chrono>
#include <filesystem>
#include <iostream>
#include <map>

#include "irswalk/csvio.hpp"
#include "irswalk/experiments.hpp"
#include "irswalk/sl2.hpp"

using namespace irswalk;

namespace {

constexpr const char* kVersion = "0.1.0";

struct CommonOpts {
  std::uint64_t seed = 1;
  int threads = 1;
  std::string out = ".";
};

StepLaw law_from_name(const std::string& name, int d, double alpha, double beta, int lmax) {
  if (name == "srw") return StepLaw::srw(d);
  if (name == "lazy") return StepLaw::lazy(d, alpha);
  if (name == "geodesic_tail") return StepLaw::geodesic_tail(d, beta, lmax);
  throw CLI::ValidationError("law", "unknown law: " + name);
}

class Runner {
 public:
  Runner(const CommonOpts& opts, std::string experiment)
      : opts_(opts), manifest_(), t0_(std::chrono::steady_clock::now()) {
    manifest_.experiment = std::move(experiment);
    manifest_.seed = opts.seed;
    manifest_.version = kVersion;
    manifest_.started = iso8601_now();
    std::filesystem::create_directories(opts_.out);
  }

  CsvWriter csv(const std::vector<std::string>& columns) {
    return CsvWriter(path(manifest_.experiment + ".csv"), columns);
  }

  std::string path(const std::string& name) const {
    return (std::filesystem::path(opts_.out) / name).string();
  }

  void config(const std::string& key, CsvValue v) { manifest_.config[key] = std::move(v); }
  void result(const std::string& key, CsvValue v) {
    manifest_.results_summary[key] = std::move(v);
  }

  void finish() {
    manifest_.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
    write_manifest(path(manifest_.experiment + "_manifest.json"), manifest_);
  }

 private:
  CommonOpts opts_;
  RunManifest manifest_;
  std::chrono::steady_clock::time_point t0_;
};

int run_entropy_bracket(const CommonOpts& opts, int d, const std::string& law_name,
                        double alpha, double beta, int lmax, int t_conv, int r, int t_cond,
                        std::int64_t n, std::int64_t samples) {
  Runner run(opts, "entropy-bracket");
  const auto law = law_from_name(law_name, d, alpha, beta, lmax);
  run.config("d", std::int64_t{d});
  run.config("law", law.id());
  run.config("t_conv", std::int64_t{t_conv});
  run.config("r", std::int64_t{r});
  run.config("t_cond", std::int64_t{t_cond});
  run.config("n", n);
  run.config("samples", samples);

  auto csv = run.csv({"quantity", "t", "value", "ci", "samples", "seed"});
  const auto conv = exact_convolution_entropies(law, t_conv);
  for (int t = 1; t <= t_conv; ++t) {
    csv.row({std::string("H_exact"), std::int64_t{t}, conv.entropy[static_cast<std::size_t>(t)],
             0.0, std::int64_t{0}, static_cast<std::int64_t>(opts.seed)});
    csv.row({std::string("delta_exact"), std::int64_t{t},
             conv.increment[static_cast<std::size_t>(t)], 0.0, std::int64_t{0},
             static_cast<std::int64_t>(opts.seed)});
  }
  const auto lower =
      prefix_conditional_rate(law, r, t_cond, n, samples, opts.seed, 0, opts.threads);
  csv.row({std::string("prefix_lower"), std::int64_t{t_cond}, lower.lower,
           lower.ci_halfwidth, lower.samples_used, static_cast<std::int64_t>(opts.seed)});
  csv.row({std::string("excluded_rate"), std::int64_t{t_cond}, lower.excluded_rate, 0.0,
           lower.excluded, static_cast<std::int64_t>(opts.seed)});
  const auto speed = walk_speed(law, 1000, std::min<std::int64_t>(samples, 100000),
                                opts.seed ^ 0x5eed, opts.threads);
  csv.row({std::string("speed_1000"), std::int64_t{1000}, speed.mean(),
           1.96 * speed.stderror(), speed.count(), static_cast<std::int64_t>(opts.seed)});

  run.result("delta_last", conv.increment[static_cast<std::size_t>(t_conv)]);
  run.result("prefix_lower", lower.lower);
  run.result("speed", speed.mean());
  run.finish();
  return 0;
}

int run_glue_verify_cmd(const CommonOpts& opts, int n_max, int d, int r,
                        std::int64_t locality_samples) {
  Runner run(opts, "glue-verify");
  run.config("n_max", std::int64_t{n_max});
  run.config("d", std::int64_t{d});
  run.config("r", std::int64_t{r});
  run.config("locality_samples", locality_samples);
  auto csv = run.csv({"n", "check", "pass", "checked", "detail"});
  bool all_ok = true;
  for (int n = 2; n <= n_max; ++n) {
    const auto res = run_glue_verify(n, d, r, locality_samples, opts.seed);
    all_ok = all_ok && res.ok();
    csv.row({std::int64_t{n}, std::string("properness"),
             std::string(res.properness_ok ? "1" : "0"), res.properness_checked,
             std::string("radius n+3 window")});
    csv.row({std::int64_t{n}, std::string("rad"), std::string(res.rad_ok ? "1" : "0"),
             res.ball_count, std::string("tree ball count")});
    std::string matched;
    for (const auto& [label, cnt] : res.locality.matched)
      matched += label + ":" + std::to_string(cnt) + " ";
    csv.row({std::int64_t{n}, std::string("locality"),
             std::string(res.locality.ok() ? "1" : "0"), res.locality.checked, matched});
  }
  run.result("all_ok", std::int64_t{all_ok ? 1 : 0});
  run.finish();
  return all_ok ? 0 : 1;
}

int run_irs_sweep_cmd(const CommonOpts& opts, int n, int d, int R, int t,
                      const std::vector<double>& p_grid, std::int64_t walk_samples,
                      int core_samples, const std::string& law_name, double alpha,
                      double beta, int lmax) {
  Runner run(opts, "irs-sweep");
  const auto law = law_from_name(law_name, d, alpha, beta, lmax);
  run.config("n", std::int64_t{n});
  run.config("R", std::int64_t{R});
  run.config("t", std::int64_t{t});
  run.config("walk_samples", walk_samples);
  run.config("core_samples", std::int64_t{core_samples});
  run.config("law", law.id());

  GluedOracle oracle(n, d);
  const auto sweep =
      irs_entropy_sweep(oracle, R, p_grid, t, walk_samples, core_samples, law, opts.seed);
  auto csv = run.csv({"p", "h", "se", "draws", "empty_draws", "window", "R", "t"});
  for (const auto& row : sweep.rows)
    csv.row({row.p, row.h, row.se, row.draws, row.empty_draws, sweep.window_size,
             std::int64_t{R}, std::int64_t{t}});
  run.result("window", sweep.window_size);
  run.result("h_at_1", sweep.rows.empty() ? 0.0 : sweep.rows.back().h);
  run.finish();
  return 0;
}

int run_norm_count(const CommonOpts& opts, int n, int d, std::int64_t R, std::int64_t delta,
                   int words, const std::vector<double>& marginal_p,
                   std::int64_t marginal_draws) {
  Runner run(opts, "norm-count");
  run.config("n", std::int64_t{n});
  run.config("R", R);
  run.config("delta", delta);
  run.config("words", std::int64_t{words});
  run.config("marginal_draws", marginal_draws);

  GluedOracle oracle(n, d);
  const auto window = make_window(oracle, R);
  const auto family = core_word_family(static_cast<std::size_t>(words));
  auto csv = run.csv({"word", "R", "count", "stabilized", "certified", "p", "expected",
                      "observed", "sigma", "pass"});
  bool all_ok = true;
  for (const auto& g : family) {
    const auto nc = norm_on_window(oracle, window, g, delta);
    csv.row({format_word(g), R, nc.count, std::int64_t{nc.stabilized ? 1 : 0},
             std::int64_t{nc.locality_certified ? 1 : 0}, -1.0, 0.0, 0.0, 0.0,
             std::string("")});
    all_ok = all_ok && nc.stabilized;
    for (const double p : marginal_p) {
      const auto mc = core_marginal_check(oracle, window, g, p, marginal_draws, opts.seed);
      csv.row({format_word(g), R, nc.count, std::int64_t{nc.stabilized ? 1 : 0},
               std::int64_t{nc.locality_certified ? 1 : 0}, p, mc.expected, mc.observed,
               mc.sigma, std::string(mc.within_3_sigma ? "1" : "0")});
      all_ok = all_ok && mc.within_3_sigma;
    }
  }
  run.result("all_ok", std::int64_t{all_ok ? 1 : 0});
  run.finish();
  return all_ok ? 0 : 1;
}

int run_prefix_flip(const CommonOpts& opts, const std::vector<std::int64_t>& n_list, int r,
                    std::int64_t samples, std::int64_t horizon, const std::string& law_name,
                    int d, double alpha, double beta, int lmax) {
  Runner run(opts, "prefix-flip");
  const auto law = law_from_name(law_name, d, alpha, beta, lmax);
  run.config("r", std::int64_t{r});
  run.config("samples", samples);
  run.config("horizon", horizon);
  run.config("law", law.id());
  auto csv = run.csv({"n", "depth", "mismatch", "mismatch_ci", "change", "change_ci",
                      "samples", "censored"});
  for (const auto n : n_list) {
    const std::int64_t depth = n * n * n;
    GluedOracle oracle(static_cast<int>(depth), d);
    const auto est =
        prefix_flip_rate(oracle, law, r, n, samples, horizon, opts.seed, opts.threads);
    csv.row({n, depth, est.mismatch_prob, est.mismatch_ci, est.change_prob, est.change_ci,
             est.samples_used, est.censored});
  }
  run.finish();
  return 0;
}

int run_stankov_cmd(const CommonOpts& opts, int n, int d, int rho, std::int64_t m,
                    const std::string& law_name, double alpha, double beta, int lmax,
                    std::int64_t samples, std::int64_t horizon) {
  Runner run(opts, "stankov");
  const auto law = law_from_name(law_name, d, alpha, beta, lmax);
  run.config("n", std::int64_t{n});
  run.config("rho", std::int64_t{rho});
  run.config("m", m);
  run.config("law", law.id());
  run.config("samples", samples);
  run.config("horizon", horizon);
  GluedOracle oracle(n, d);
  const auto rep =
      stankov_check(oracle, rho, m, law, samples, horizon, opts.seed, opts.threads);
  auto csv = run.csv({"law", "lhs", "lhs_se", "rhs", "rhs_se", "ball", "holds"});
  csv.row({law.id(), rep.lhs, rep.lhs_se, rep.rhs, rep.rhs_se, rep.ball_count,
           std::int64_t{rep.holds_within_ci ? 1 : 0}});
  run.result("holds", std::int64_t{rep.holds_within_ci ? 1 : 0});
  run.finish();
  return rep.holds_within_ci ? 0 : 1;
}

int run_green_cmd(const CommonOpts& opts, const std::string& family, int n, int d,
                  std::int64_t m, std::int64_t target_radius, std::int64_t samples,
                  std::int64_t horizon, bool profile) {
  Runner run(opts, "green");
  run.config("family", family);
  run.config("n", std::int64_t{n});
  run.config("m", m);
  run.config("target_radius", target_radius);
  run.config("samples", samples);
  run.config("horizon", horizon);
  run.config("profile", std::int64_t{profile ? 1 : 0});
  const auto law = StepLaw::srw(d);
  auto csv = run.csv({"kind", "r", "value", "se", "stabilized", "tail_fraction"});
  if (profile) {
    std::vector<int> rs;
    for (int rr = 0; rr <= static_cast<int>(target_radius); ++rr) rs.push_back(rr);
    const auto prof = visit_count_profile(law, rs, samples, horizon, opts.seed);
    for (const auto& rowp : prof.rows)
      csv.row({std::string("ball_time"), std::int64_t{rowp.r}, rowp.mean, rowp.stderror,
               std::int64_t{1}, 0.0});
    csv.row({std::string("growth_exponent"), std::int64_t{0}, prof.growth_exponent, 0.0,
             std::int64_t{1}, 0.0});
    run.result("growth_exponent", prof.growth_exponent);
  } else if (family == "glued") {
    GluedOracle oracle(n, d);
    const CopyDistanceTable copy_dist(d, static_cast<int>(target_radius) + 2);
    const auto est = green_estimate(
        oracle, oracle.root(),
        [&](const GluedVertex& v) {
          const auto dd = glued_root_distance(oracle, v, copy_dist);
          return dd && *dd <= target_radius;
        },
        m, law, samples, horizon, opts.seed);
    csv.row({std::string("ball_visits"), target_radius, est.mean, est.stderror,
             std::int64_t{est.stabilized ? 1 : 0}, est.tail_fraction});
    run.result("mean", est.mean);
    run.result("stabilized", std::int64_t{est.stabilized ? 1 : 0});
  } else if (family == "line") {
    ZsOracle oracle(d, 1);
    const auto est = green_estimate(
        oracle, oracle.root(),
        [&](const ZsVertex& v) { return std::llabs(v.pos) <= target_radius; }, m, law,
        samples, horizon, opts.seed);
    csv.row({std::string("ball_visits"), target_radius, est.mean, est.stderror,
             std::int64_t{est.stabilized ? 1 : 0}, est.tail_fraction});
    run.result("stabilized", std::int64_t{est.stabilized ? 1 : 0});
  } else {
    throw CLI::ValidationError("family", "unknown family: " + family);
  }
  run.finish();
  return 0;
}

int run_sl2_hitting(const CommonOpts& opts, std::int64_t samples, std::int64_t cap,
                    int top) {
  Runner run(opts, "sl2-hitting");
  run.config("samples", samples);
  run.config("cap", cap);
  run.config("top", std::int64_t{top});
  const auto table = build_coset_table();

  struct AtomInfo {
    std::int64_t count = 0;
    Mat2 mat;
  };
  std::map<std::string, AtomInfo> atoms;
  MeanAccumulator ret;
  std::int64_t censored = 0;
  for (std::int64_t rep = 0; rep < samples; ++rep) {
    Rng rng(opts.seed, 0x68697474, static_cast<std::uint64_t>(rep));
    const auto s = hitting_sample(table, rng, cap);
    if (s.censored) {
      ++censored;
      continue;
    }
    ret.add(static_cast<double>(s.return_time));
    auto& a = atoms[format_word(s.witness)];
    if (a.count == 0) a.mat = s.position;
    ++a.count;
  }
  std::vector<std::pair<std::int64_t, std::string>> by_count;
  for (const auto& [w, info] : atoms) by_count.emplace_back(info.count, w);
  std::sort(by_count.rbegin(), by_count.rend());

  auto csv = run.csv({"witness", "a", "b", "c", "d", "count", "probability"});
  for (int i = 0; i < std::min<int>(top, static_cast<int>(by_count.size())); ++i) {
    const auto& info = atoms.at(by_count[static_cast<std::size_t>(i)].second);
    csv.row({by_count[static_cast<std::size_t>(i)].second, info.mat.a.str(),
             info.mat.b.str(), info.mat.c.str(), info.mat.d.str(), info.count,
             static_cast<double>(info.count) / static_cast<double>(ret.count())});
  }
  run.result("mean_return_time", ret.mean());
  run.result("se", ret.stderror());
  run.result("index", std::int64_t{table.index});
  run.result("censored", censored);
  run.finish();
  return 0;
}

int run_abramov(const CommonOpts& opts, std::int64_t samples, int t_star,
                std::int64_t ratio_k, std::int64_t ratio_runs, int mod_q) {
  Runner run(opts, "abramov");
  run.config("samples", samples);
  run.config("t_star", std::int64_t{t_star});
  run.config("ratio_k", ratio_k);
  run.config("ratio_runs", ratio_runs);
  run.config("mod_q", std::int64_t{mod_q});
  const auto table = build_coset_table();

  auto csv = run.csv({"quantity", "value", "ci", "detail"});
  const auto meas = abramov_measurement(table, samples, t_star, opts.seed);
  csv.row({std::string("H_Y1"), meas.h_y1, 0.0, std::string("first-return entropy")});
  csv.row({std::string("H_Y2"), meas.h_y2, 0.0, std::string("second-return entropy")});
  csv.row({std::string("H_X_tstar"), meas.h_xt, 0.0, std::string("")});
  csv.row({std::string("H_X_2tstar"), meas.h_x2t, 0.0, std::string("")});
  csv.row({std::string("induced_increment"), meas.induced_increment, 0.0, std::string("")});
  csv.row({std::string("ambient_rate"), meas.ambient_increment_rate, 0.0, std::string("")});
  csv.row({std::string("ratio"), meas.ratio, 1.96 * meas.ratio_se,
           std::string("induced increment over ambient rate")});
  csv.row({std::string("mean_T2_over_2"), meas.mean_return_ratio, 0.0, std::string("")});
  const auto tk = return_time_ratio(table, ratio_k, ratio_runs, opts.seed ^ 0x77);
  csv.row({std::string("mean_Tk_over_k"), tk.mean(), 1.96 * tk.stderror(),
           std::string("k=" + std::to_string(ratio_k))});

  // finite-quotient control: increments collapse once the chain mixes
  {
    const std::int64_t np = std::min<std::int64_t>(samples, 200000);
    double prev_h = 0.0;
    for (int t = 1; t <= 16; ++t) {
      Tally tal;
      for (std::int64_t rep = 0; rep < np; ++rep) {
        Rng rng(opts.seed, 0x6d6f6451, static_cast<std::uint64_t>(rep));
        std::int64_t aa = 1 % mod_q, bb = 0, cc = 0, dd = 1 % mod_q;
        for (int s = 0; s < t; ++s) {
          const int g = static_cast<int>(rng.below(4));
          static const std::int64_t GM[4][4] = {
              {0, -1, 1, 0}, {0, 1, -1, 0}, {1, 1, 0, 1}, {1, -1, 0, 1}};
          const std::int64_t na = aa * GM[g][0] + bb * GM[g][2];
          const std::int64_t nb = aa * GM[g][1] + bb * GM[g][3];
          const std::int64_t ncc = cc * GM[g][0] + dd * GM[g][2];
          const std::int64_t ndd = cc * GM[g][1] + dd * GM[g][3];
          aa = ((na % mod_q) + mod_q) % mod_q;
          bb = ((nb % mod_q) + mod_q) % mod_q;
          cc = ((ncc % mod_q) + mod_q) % mod_q;
          dd = ((ndd % mod_q) + mod_q) % mod_q;
        }
        tal.add(static_cast<std::uint64_t>(((aa * mod_q + bb) * mod_q + cc) * mod_q + dd));
      }
      const auto e = empirical_entropy(tal, opts.seed + static_cast<std::uint64_t>(t), 0);
      csv.row({std::string("modq_delta"), e.value - prev_h, 0.0,
               std::string("t=" + std::to_string(t))});
      prev_h = e.value;
    }
  }

  run.result("ratio", meas.ratio);
  run.result("mean_Tk_over_k", tk.mean());
  run.result("censored", meas.censored);
  run.finish();
  return 0;
}

int run_nil_decay(const CommonOpts& opts, const std::string& quotient, int d, int t_max,
                  std::int64_t samples) {
  Runner run(opts, "nil-decay");
  run.config("quotient", quotient);
  run.config("d", std::int64_t{d});
  run.config("t_max", std::int64_t{t_max});
  run.config("samples", samples);
  const auto law = StepLaw::srw(d);
  std::vector<DecayRow> rows;
  if (quotient == "lambda") {
    rows = norm_entropy_decay(NilCayleyOracle(d), law, t_max, samples, opts.seed,
                              opts.threads);
  } else if (quotient == "line") {
    rows = norm_entropy_decay(ZsOracle(d, 1), law, t_max, samples, opts.seed, opts.threads);
  } else if (quotient == "abelian") {
    rows = norm_entropy_decay(AbelianOracle(d), law, t_max, samples, opts.seed,
                              opts.threads);
  } else if (quotient == "free") {
    rows = norm_entropy_decay(FreeOracle(d), law, t_max, samples, opts.seed, opts.threads);
  } else {
    throw CLI::ValidationError("quotient", "unknown quotient: " + quotient);
  }
  auto csv = run.csv({"t", "H", "delta", "ci"});
  for (const auto& row : rows)
    csv.row({std::int64_t{row.t}, row.entropy, row.increment, row.ci_halfwidth});
  if (!rows.empty()) run.result("delta_last", rows.back().increment);
  run.finish();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random-walk experiments on free-group coset graphs"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "read options from a TOML/INI file");
  app.allow_config_extras(CLI::config_extras_mode::ignore_all);

  CommonOpts opts;
  app.add_option("--seed", opts.seed, "master seed; streams derive from it")
      ->capture_default_str();
  app.add_option("--threads", opts.threads, "worker threads (results do not depend on it)")
      ->capture_default_str();
  app.add_option("--out", opts.out, "output directory")->capture_default_str();

  int d = 2;
  std::string law = "srw";
  double alpha = 0.5, beta = 6.0;
  int lmax = 64;

  auto* eb = app.add_subcommand(
      "entropy-bracket",
      "exact convolution increments, prefix-conditional lower bound, walk speed.\n"
      "CSV columns: quantity,t,value,ci,samples,seed");
  int eb_tconv = 12, eb_r = 3, eb_tcond = 6;
  std::int64_t eb_n = 60, eb_samples = 100000;
  eb->add_option("--d", d)->capture_default_str();
  eb->add_option("--law", law)->capture_default_str();
  eb->add_option("--alpha", alpha)->capture_default_str();
  eb->add_option("--beta", beta)->capture_default_str();
  eb->add_option("--lmax", lmax)->capture_default_str();
  eb->add_option("--t", eb_tconv, "convolution horizon")->capture_default_str();
  eb->add_option("--r", eb_r, "prefix radius")->capture_default_str();
  eb->add_option("--t-cond", eb_tcond, "conditioned time")->capture_default_str();
  eb->add_option("--n", eb_n, "exit radius for the prefix sample")->capture_default_str();
  eb->add_option("--samples", eb_samples)->capture_default_str();

  auto* gv = app.add_subcommand("glue-verify",
                                "properness, tree-ball and locality checks on glued graphs.\n"
                                "CSV columns: n,check,pass,checked,detail");
  int gv_n = 6, gv_r = 2;
  std::int64_t gv_samples = 1200;
  gv->add_option("--n", gv_n, "largest tree depth (runs 2..n)")->capture_default_str();
  gv->add_option("--r", gv_r, "locality ball radius")->capture_default_str();
  gv->add_option("--samples", gv_samples, "far vertices sampled per depth")
      ->capture_default_str();

  auto* is = app.add_subcommand("irs-sweep",
                                "window-entropy curve over inclusion probabilities.\n"
                                "CSV columns: p,h,se,draws,empty_draws,window,R,t");
  int is_n = 4, is_R = 8, is_t = 6, is_core = 6;
  std::int64_t is_walks = 6000;
  std::vector<double> is_grid{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  is->add_option("--n", is_n)->capture_default_str();
  is->add_option("--R", is_R, "window radius")->capture_default_str();
  is->add_option("--t", is_t, "walk length")->capture_default_str();
  is->add_option("--p", is_grid, "inclusion probabilities")->delimiter(',');
  is->add_option("--walk-samples", is_walks)->capture_default_str();
  is->add_option("--core-samples", is_core, "window draws per p")->capture_default_str();
  is->add_option("--law", law)->capture_default_str();

  auto* nc = app.add_subcommand("norm-count",
                                "truncated conjugate-norm counts and the Bernoulli "
                                "membership law.\nCSV columns: word,R,count,stabilized,"
                                "certified,p,expected,observed,sigma,pass");
  int nc_n = 4, nc_words = 20;
  std::int64_t nc_R = 18, nc_delta = 2, nc_draws = 10000;
  std::vector<double> nc_p{0.1, 0.5, 0.9};
  nc->add_option("--n", nc_n)->capture_default_str();
  nc->add_option("--R", nc_R)->capture_default_str();
  nc->add_option("--delta", nc_delta)->capture_default_str();
  nc->add_option("--words", nc_words)->capture_default_str();
  nc->add_option("--p", nc_p)->delimiter(',');
  nc->add_option("--draws", nc_draws)->capture_default_str();

  auto* pf = app.add_subcommand("prefix-flip",
                                "prefix agreement between the free walk and deep glued "
                                "graphs.\nCSV columns: n,depth,mismatch,mismatch_ci,"
                                "change,change_ci,samples,censored");
  std::vector<std::int64_t> pf_n{8, 16, 32};
  int pf_r = 4;
  std::int64_t pf_samples = 30000, pf_horizon = 400;
  std::string pf_law = "geodesic_tail";
  pf->add_option("--n", pf_n, "exit radii")->delimiter(',');
  pf->add_option("--r", pf_r)->capture_default_str();
  pf->add_option("--samples", pf_samples)->capture_default_str();
  pf->add_option("--horizon", pf_horizon, "steps tracked past the exit")
      ->capture_default_str();
  pf->add_option("--law", pf_law)->capture_default_str();
  pf->add_option("--beta", beta)->capture_default_str();
  pf->add_option("--lmax", lmax)->capture_default_str();

  auto* sk = app.add_subcommand("stankov",
                                "component-crossing bound on a glued graph.\n"
                                "CSV columns: law,lhs,lhs_se,rhs,rhs_se,ball,holds");
  int sk_n = 4, sk_rho = 2;
  std::int64_t sk_m = 0, sk_samples = 20000, sk_horizon = 1200;
  sk->add_option("--n", sk_n)->capture_default_str();
  sk->add_option("--rho", sk_rho, "separating ball radius")->capture_default_str();
  sk->add_option("--m", sk_m, "start time of the tail sum")->capture_default_str();
  sk->add_option("--law", law)->capture_default_str();
  sk->add_option("--alpha", alpha)->capture_default_str();
  sk->add_option("--beta", beta)->capture_default_str();
  sk->add_option("--lmax", lmax)->capture_default_str();
  sk->add_option("--samples", sk_samples)->capture_default_str();
  sk->add_option("--horizon", sk_horizon)->capture_default_str();

  auto* gr = app.add_subcommand("green",
                                "visit-count estimates (and the r-profile with --profile).\n"
                                "CSV columns: kind,r,value,se,stabilized,tail_fraction");
  std::string gr_family = "glued";
  int gr_n = 4;
  std::int64_t gr_m = 0, gr_radius = 8, gr_samples = 30000, gr_horizon = 1500;
  bool gr_profile = false;
  gr->add_option("--family", gr_family, "glued | line")->capture_default_str();
  gr->add_option("--n", gr_n)->capture_default_str();
  gr->add_option("--m", gr_m)->capture_default_str();
  gr->add_option("--target-radius", gr_radius)->capture_default_str();
  gr->add_option("--samples", gr_samples)->capture_default_str();
  gr->add_option("--horizon", gr_horizon)->capture_default_str();
  gr->add_flag("--profile", gr_profile, "free-group ball-time profile over r");

  auto* sh = app.add_subcommand("sl2-hitting",
                                "first-return samples to the free subgroup.\n"
                                "CSV columns: witness,a,b,c,d,count,probability");
  std::int64_t sh_samples = 1000000, sh_cap = 1000000;
  int sh_top = 40;
  sh->add_option("--samples", sh_samples)->capture_default_str();
  sh->add_option("--cap", sh_cap)->capture_default_str();
  sh->add_option("--top", sh_top, "atoms exported")->capture_default_str();

  auto* ab = app.add_subcommand("abramov",
                                "induced-walk entropy rate against the ambient rate.\n"
                                "CSV columns: quantity,value,ci,detail");
  std::int64_t ab_samples = 2500000, ab_k = 2000, ab_runs = 50;
  int ab_tstar = 12, ab_q = 3;
  ab->add_option("--samples", ab_samples)->capture_default_str();
  ab->add_option("--t-star", ab_tstar)->capture_default_str();
  ab->add_option("--ratio-k", ab_k)->capture_default_str();
  ab->add_option("--ratio-runs", ab_runs)->capture_default_str();
  ab->add_option("--mod-q", ab_q, "modulus for the finite-quotient control")
      ->capture_default_str();

  auto* nd = app.add_subcommand("nil-decay",
                                "entropy increments of projected walks.\n"
                                "CSV columns: t,H,delta,ci");
  std::string nd_quotient = "lambda";
  int nd_tmax = 20;
  std::int64_t nd_samples = 300000;
  nd->add_option("--quotient", nd_quotient, "lambda | line | abelian | free")
      ->capture_default_str();
  nd->add_option("--t-max", nd_tmax)->capture_default_str();
  nd->add_option("--samples", nd_samples)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (eb->parsed())
      return run_entropy_bracket(opts, d, law, alpha, beta, lmax, eb_tconv, eb_r, eb_tcond,
                                 eb_n, eb_samples);
    if (gv->parsed()) return run_glue_verify_cmd(opts, gv_n, d, gv_r, gv_samples);
    if (is->parsed())
      return run_irs_sweep_cmd(opts, is_n, d, is_R, is_t, is_grid, is_walks, is_core, law,
                               alpha, beta, lmax);
    if (nc->parsed())
      return run_norm_count(opts, nc_n, d, nc_R, nc_delta, nc_words, nc_p, nc_draws);
    if (pf->parsed())
      return run_prefix_flip(opts, pf_n, pf_r, pf_samples, pf_horizon, pf_law, d, alpha,
                             beta, lmax);
    if (sk->parsed())
      return run_stankov_cmd(opts, sk_n, d, sk_rho, sk_m, law, alpha, beta, lmax,
                             sk_samples, sk_horizon);
    if (gr->parsed())
      return run_green_cmd(opts, gr_family, gr_n, d, gr_m, gr_radius, gr_samples,
                           gr_horizon, gr_profile);
    if (sh->parsed()) return run_sl2_hitting(opts, sh_samples, sh_cap, sh_top);
    if (ab->parsed()) return run_abramov(opts, ab_samples, ab_tstar, ab_k, ab_runs, ab_q);
    if (nd->parsed()) return run_nil_decay(opts, nd_quotient, d, nd_tmax, nd_samples);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
