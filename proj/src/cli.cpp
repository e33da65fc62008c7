#include "onebit/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <sstream>

#include "onebit/config.hpp"
#include "onebit/harness.hpp"
#include "onebit/probes.hpp"
#include "onebit/selftest.hpp"
#include "onebit/sparse_ops.hpp"

namespace onebit {

namespace {

constexpr std::string_view kHelp = R"(usage: onebit <command> [options]

One-bit compressed sensing: NBIHT, BIHT, IHT and one-shot recovery, Monte
Carlo error-decay sweeps, and empirical probes of the analysis.

commands:
  recover    run one seeded instance and print the final error
  sweep      Monte Carlo sweep over m, slope fit, CSV + manifest + SVG report
  probe      run a named probe: unbiased | embedding | raic | width |
             projection | decomposition
  theory     print the multiscale radius schedule and decay exponents
  selftest   run the built-in example checks

common options:
  --config PATH        INI file; keys of section [<command>] use the flag
                       names without dashes. Flags override file values.
  -h, --help           show this text

recover options:
  --n INT              signal dimension N (default 512)
  --s INT              sparsity s (default 4)
  --m INT              number of measurements (default 4096)
  --algo LIST          nbiht | biht | one_shot | iht, comma separated
                       (default nbiht)
  --tau REAL           step size (default sqrt(pi/2))
  --max-iters INT      iteration budget (default 300)
  --stop-tol REAL      stop when the iterate moves less than this (1e-10)
  --init NAME          random_sparse | matched_filter (default random_sparse)
  --seed INT           master seed (required)
  --noise-std REAL     pre-quantization Gaussian noise level (default 0)

sweep options:
  --n INT, --s INT     problem size (default 512, 4)
  --m-grid LIST        strictly increasing m values
                       (default 256,512,1024,2048,4096,8192)
  --algo LIST          algorithms (default nbiht,one_shot)
  --trials INT         trials per (m, algorithm) cell (default 50)
  --tau, --max-iters, --stop-tol, --init, --noise-std   as for recover
  --seed INT           master seed (required)
  --workers INT        worker threads, 0 = logical processors (default 0)
  --out-dir PATH       report directory (default sweep_out)
  --constants-cb REAL          C_b (default 1)
  --constants-cb-lower REAL    c_b (default 1)
  --constants-c10 REAL         C_10 (default max{1, 1, 2 C_b^2} + pi)
  --support-rule NAME  uniform_random | first_s (default uniform_random)
  --value-rule NAME    gaussian | rademacher | flat (default gaussian)
  --degenerate-policy NAME     keep_previous | fail (default keep_previous)

probe options:
  <name>               probe to run (or key `probe` in the config file)
  --n INT, --s INT, --m INT    sizes (default 256, 4, 1024)
  --trials INT         trials / pairs / samples (default 100)
  --seed INT           seed (required)
  --r-lb REAL, --r-ub REAL     raic annulus (default 0.1, 0.5)
  --levels INT         raic sub-annuli fitted separately (default 1)
  --nu REAL            raic scale (default sqrt(pi/2)/m)

theory options:
  --n INT, --s INT     problem size (default 512, 4)
  --m REAL             number of measurements, may exceed 2^64 (default 1e100)
  --levels INT         number of radii to print (default L + 1)
  --constants-cb, --constants-cb-lower, --constants-c10   as for sweep

exit status: 0 success, 1 invalid input, 2 runtime failure
)";

using KeyMap = std::map<std::string, std::string>;

struct Command {
  CLI::App* app = nullptr;
  std::vector<std::string> keys;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
  std::string positional;
};

const std::vector<std::string> kRecoverKeys{"n",    "s",         "m",        "algo",
                                            "tau",  "max-iters", "stop-tol", "init",
                                            "seed", "noise-std", "support-rule",
                                            "value-rule", "degenerate-policy"};
const std::vector<std::string> kSweepKeys{
    "n",         "s",        "m-grid",   "algo",         "tau",
    "max-iters", "stop-tol", "init",     "seed",         "trials",
    "noise-std", "workers",  "out-dir",  "constants-cb", "constants-cb-lower",
    "constants-c10", "support-rule", "value-rule", "degenerate-policy"};
const std::vector<std::string> kProbeKeys{"n",    "s",    "m",      "trials", "seed",
                                          "r-lb", "r-ub", "levels", "nu"};
const std::vector<std::string> kTheoryKeys{"n", "s", "m", "levels", "constants-cb",
                                           "constants-cb-lower", "constants-c10"};

// File section values first, then flags given on the command line.
KeyMap merged_keys(const Command& cmd, const std::string& section, const std::string& config) {
  KeyMap keys;
  if (!config.empty()) {
    const auto doc = IniDocument::load(config);
    for (const auto& [key, value] : doc.section(section)) keys[key] = value;
  }
  for (const auto& [key, opt] : cmd.options)
    if (opt->count() > 0) keys[key] = cmd.values.at(key);
  return keys;
}

std::string take(KeyMap& keys, const std::string& key, const std::string& fallback) {
  const auto it = keys.find(key);
  if (it == keys.end()) return fallback;
  std::string v = it->second;
  keys.erase(it);
  return v;
}

void require_seed(const KeyMap& keys, const char* command) {
  if (!keys.count("seed"))
    throw InvalidArgument(std::string(command) +
                          ": a seed is required (--seed or `seed` in the config file)");
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void run_recover(KeyMap keys, std::ostream& out) {
  require_seed(keys, "recover");
  SweepConfig cfg;
  cfg.m_grid = {4096};
  cfg.algorithms = {Algorithm::nbiht};
  cfg.trials_per_cell = 1;
  apply_sweep_keys(keys, cfg);
  cfg.validate();
  const Index m = cfg.m_grid.front();
  const auto seeds = cell_seeds(cfg.master_seed, 0, m, 1, 0);
  for (const auto algorithm : cfg.algorithms) {
    const auto rec = run_instance(algorithm, cfg, seeds);
    out << "algorithm=" << rec.algorithm << " m=" << rec.m << " N=" << rec.n << " s=" << rec.s
        << " seed=" << cfg.master_seed << " final_l2_error=" << fmt(rec.final_l2_error)
        << " iterations=" << rec.iterations_used << " sign_agreement=" << fmt(rec.sign_agreement)
        << " stop_reason=" << rec.stop_reason << '\n';
  }
}

void run_sweep_command(KeyMap keys, std::ostream& out) {
  require_seed(keys, "sweep");
  const std::string out_dir = take(keys, "out-dir", "sweep_out");
  SweepConfig cfg;
  apply_sweep_keys(keys, cfg);
  cfg.validate();
  const auto result = run_sweep(cfg);
  const auto paths = emit_report(result.records, result.manifest, out_dir);

  std::vector<std::string> names;
  for (const auto& rec : result.records)
    if (std::find(names.begin(), names.end(), rec.algorithm) == names.end())
      names.push_back(rec.algorithm);
  for (const auto& name : names) {
    out << "algorithm=" << name;
    for (const auto& [m, value] : error_by_m(result.records, name, ErrorStat::median))
      out << " median@" << m << '=' << fmt_short(value);
    out << '\n';
    try {
      const auto fit = fit_slope(result.records, name, ErrorStat::median);
      out << "slope[" << name << "]=" << fmt_short(fit.slope)
          << " intercept=" << fmt_short(fit.intercept) << " r2=" << fmt_short(fit.r_squared)
          << '\n';
    } catch (const InvalidArgument& e) {
      out << "slope[" << name << "]=n/a (" << e.what() << ")\n";
    }
  }
  out << "records=" << paths.csv.string() << '\n' << "manifest=" << paths.manifest.string() << '\n';
  if (!paths.plot.empty()) out << "plot=" << paths.plot.string() << '\n';
}

void run_probe(KeyMap keys, const std::string& name, std::ostream& out) {
  require_seed(keys, "probe");
  const Index n = parse_int_value(take(keys, "n", "256"), "n");
  const Index s = parse_int_value(take(keys, "s", "4"), "s");
  const Index m = parse_int_value(take(keys, "m", "1024"), "m");
  const Index trials = parse_int_value(take(keys, "trials", "100"), "trials");
  const std::uint64_t seed = parse_u64_value(take(keys, "seed", "0"), "seed");
  const double r_lb = parse_real_value(take(keys, "r-lb", "0.1"), "r-lb");
  const double r_ub = parse_real_value(take(keys, "r-ub", "0.5"), "r-ub");
  const int levels = static_cast<int>(parse_int_value(take(keys, "levels", "1"), "levels"));
  const double nu = parse_real_value(take(keys, "nu", "0"), "nu");
  take(keys, "probe", "");
  if (!keys.empty()) throw InvalidArgument("probe: unknown key " + keys.begin()->first);
  if (n < 1 || s < 1 || s > n || m < 1)
    throw InvalidArgument("probe: need 1 <= s <= N and m >= 1");

  out << "probe=" << name << " N=" << n << " s=" << s << " m=" << m << " trials=" << trials
      << " seed=" << seed << '\n';
  if (name == "unbiased") {
    const auto y = gen_sparse_signal(split_seed(seed, 0), n, s).values();
    const double dev = check_unbiasedness(y, m, trials, split_seed(seed, 1));
    const double band =
        4.0 * std::sqrt(kUnbiasedStep * kUnbiasedStep / (static_cast<double>(trials * m)));
    out << "max_coordinate_deviation=" << fmt(dev) << "\nfour_sigma_band=" << fmt(band) << '\n';
  } else if (name == "embedding") {
    const double dev = check_embedding(n, s, m, trials, seed);
    out << "max_abs_hamming_minus_geodesic=" << fmt(dev) << '\n';
  } else if (name == "raic") {
    RaicProbeConfig cfg;
    cfg.n = n;
    cfg.s = s;
    cfg.m = m;
    cfg.samples = trials;
    cfg.seed = seed;
    cfg.r_lb = r_lb;
    cfg.r_ub = r_ub;
    cfg.levels = levels;
    cfg.nu = nu;
    const auto res = raic_probe(cfg);
    out << "nu=" << fmt(cfg.effective_nu()) << "\nfitted_delta=" << fmt(res.fitted_delta)
        << "\nfitted_eta=" << fmt(res.fitted_eta) << "\nmax_residual=" << fmt(res.max_residual)
        << '\n';
    for (const auto& lvl : res.per_level)
      out << "level r=[" << fmt_short(lvl.r_lo) << ", " << fmt_short(lvl.r_hi)
          << "] delta=" << fmt(lvl.delta) << " eta=" << fmt(lvl.eta) << " count=" << lvl.count
          << '\n';
  } else if (name == "width") {
    const double w = gaussian_width_estimate(n, s, trials, seed);
    const double ref = n > s ? width_reference(n, s) : 0.0;
    out << "width_estimate=" << fmt(w) << "\nreference_sqrt_2s_log_n_over_s=" << fmt(ref) << '\n';
    if (ref > 0.0) out << "empirical_C_b=" << fmt(w / ref) << '\n';
  } else if (name == "projection") {
    out << "max_violation_thresholded=" << fmt(projection_inequality_check(trials, n, s, seed))
        << "\nmax_violation_normalized="
        << fmt(normalized_projection_check(trials, n, s, split_seed(seed, 1))) << '\n';
  } else if (name == "decomposition") {
    RngStream rng(seed, 0);
    double worst_recon = 0, worst_u = 0, worst_v = 0;
    Vector a(n);
    for (Index t = 0; t < trials; ++t) {
      for (Index j = 0; j < n; ++j) a[j] = rng.gaussian();
      const Vector x = draw_sparse_signal(rng, n, s).values();
      const Vector y = draw_sparse_signal(rng, n, s).values();
      if ((x - y).norm() <= 1e-12 || (x + y).norm() <= 1e-12) continue;
      const auto r = decomposition_check(a, x, y);
      worst_recon = std::max(worst_recon, r.recon_residual);
      worst_u = std::max(worst_u, r.ortho_u);
      worst_v = std::max(worst_v, r.ortho_v);
    }
    out << "max_recon_residual=" << fmt(worst_recon) << "\nmax_ortho_u=" << fmt(worst_u)
        << "\nmax_ortho_v=" << fmt(worst_v) << '\n';
  } else {
    throw InvalidArgument("probe: unknown probe '" + name +
                          "' (expected unbiased, embedding, raic, width, projection or "
                          "decomposition)");
  }
}

void run_theory(KeyMap keys, std::ostream& out) {
  const Index n = parse_int_value(take(keys, "n", "512"), "n");
  const Index s = parse_int_value(take(keys, "s", "4"), "s");
  const double m = parse_real_value(take(keys, "m", "1e100"), "m");
  const int terms = static_cast<int>(parse_int_value(take(keys, "levels", "0"), "levels"));
  TheoryConstants constants;
  constants.c_big_b = parse_real_value(take(keys, "constants-cb", "1"), "constants-cb");
  constants.c_small_b =
      parse_real_value(take(keys, "constants-cb-lower", "1"), "constants-cb-lower");
  constants.c_10 = parse_real_value(take(keys, "constants-c10", "0"), "constants-c10");
  if (!keys.empty()) throw InvalidArgument("theory: unknown key " + keys.begin()->first);
  if (terms < 0) throw InvalidArgument("theory: levels must be >= 0");

  const auto sched = theory_schedule(m, n, s, constants, terms);
  out << "m=" << fmt(m) << " N=" << n << " s=" << s << '\n'
      << "C_b=" << fmt(constants.c_big_b) << " c_b=" << fmt(constants.c_small_b)
      << " C_10=" << fmt(constants.effective_c10()) << '\n'
      << "C(N,s,m)=" << fmt(sched.c_nsm) << '\n'
      << "L=" << sched.levels << (sched.has_levels ? "" : " (m <= 24^48: no multiscale levels)")
      << '\n'
      << "r_nonincreasing=" << (sched.nonincreasing ? "true" : "false") << '\n'
      << "i,r_i,delta_i\n";
  for (std::size_t i = 0; i < sched.r.size(); ++i)
    out << i + 1 << ',' << fmt(sched.r[i]) << ',' << fmt(sched.delta[i]) << '\n';
  out << "k,decay_exponent\n";
  for (int k = 0; k <= 250; k += 25) out << k << ',' << fmt(decay_exponent(k)) << '\n';
}

}  // namespace

std::string_view help_text() { return kHelp; }

int parse_and_dispatch(const std::vector<std::string>& args, std::ostream& out,
                       std::ostream& err) {
  if (args.empty()) {
    err << "onebit: missing command\n\n" << kHelp;
    return kExitValidation;
  }
  if (std::find_if(args.begin(), args.end(), [](const std::string& a) {
        return a == "-h" || a == "--help";
      }) != args.end() || args.front() == "help") {
    out << kHelp;
    return kExitOk;
  }

  CLI::App app{"one-bit compressed sensing", "onebit"};
  app.set_help_flag();
  app.require_subcommand(1);
  std::string config;

  std::map<std::string, Command> commands;
  const auto add_command = [&](const std::string& name, const std::vector<std::string>& keys) {
    Command& cmd = commands[name];
    cmd.app = app.add_subcommand(name);
    cmd.app->set_help_flag();
    cmd.app->add_option("--config", config);
    cmd.keys = keys;
    for (const auto& key : keys) cmd.values[key];
    for (const auto& key : keys) cmd.options[key] = cmd.app->add_option("--" + key, cmd.values[key]);
  };
  add_command("recover", kRecoverKeys);
  add_command("sweep", kSweepKeys);
  add_command("probe", kProbeKeys);
  add_command("theory", kTheoryKeys);
  add_command("selftest", {});
  commands["probe"].app->add_option("name", commands["probe"].positional);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    err << "onebit: " << e.what() << "\n\n" << kHelp;
    return kExitValidation;
  }

  try {
    if (commands["selftest"].app->parsed()) {
      const int failures = run_selftest(out);
      out << (failures == 0 ? "selftest: all checks passed\n"
                            : "selftest: " + std::to_string(failures) + " check(s) failed\n");
      return failures == 0 ? kExitOk : kExitRuntime;
    }
    for (auto& [name, cmd] : commands) {
      if (!cmd.app->parsed()) continue;
      KeyMap keys = merged_keys(cmd, name, config);
      if (name == "recover") {
        run_recover(std::move(keys), out);
      } else if (name == "sweep") {
        run_sweep_command(std::move(keys), out);
      } else if (name == "probe") {
        std::string probe = cmd.positional.empty() ? take(keys, "probe", "") : cmd.positional;
        if (probe.empty()) throw InvalidArgument("probe: missing probe name");
        run_probe(std::move(keys), probe, out);
      } else if (name == "theory") {
        run_theory(std::move(keys), out);
      }
    }
  } catch (const InvalidArgument& e) {
    err << "onebit: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "onebit: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace onebit
