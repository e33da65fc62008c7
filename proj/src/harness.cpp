#include "onebit/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include "onebit/sparse_ops.hpp"

namespace onebit {

std::string to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::nbiht: return "nbiht";
    case Algorithm::biht: return "biht";
    case Algorithm::one_shot: return "one_shot";
    case Algorithm::iht: return "iht";
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
  if (name == "nbiht") return Algorithm::nbiht;
  if (name == "biht") return Algorithm::biht;
  if (name == "one_shot" || name == "one-shot") return Algorithm::one_shot;
  if (name == "iht") return Algorithm::iht;
  throw InvalidArgument("unknown algorithm: " + std::string(name) +
                        " (expected nbiht, biht, one_shot or iht)");
}

std::string to_string(InitKind init) {
  return init == InitKind::random_sparse ? "random_sparse" : "matched_filter";
}

InitKind parse_init_kind(std::string_view name) {
  if (name == "random_sparse" || name == "random") return InitKind::random_sparse;
  if (name == "matched_filter" || name == "matched") return InitKind::matched_filter;
  throw InvalidArgument("unknown init: " + std::string(name) +
                        " (expected random_sparse or matched_filter)");
}

std::string to_string(ErrorStat stat) { return stat == ErrorStat::median ? "median" : "mean"; }

ErrorStat parse_error_stat(std::string_view name) {
  if (name == "median") return ErrorStat::median;
  if (name == "mean") return ErrorStat::mean;
  throw InvalidArgument("unknown error statistic: " + std::string(name));
}

void SweepConfig::validate() const {
  if (n < 1) throw InvalidArgument("sweep: N must be >= 1");
  if (s < 1 || s > n) throw InvalidArgument("sweep: need 1 <= s <= N");
  if (m_grid.empty()) throw InvalidArgument("sweep: m grid is empty");
  for (std::size_t i = 0; i < m_grid.size(); ++i) {
    if (m_grid[i] < 1) throw InvalidArgument("sweep: m values must be >= 1");
    if (i > 0 && m_grid[i] <= m_grid[i - 1])
      throw InvalidArgument("sweep: m grid must be strictly increasing");
  }
  if (algorithms.empty()) throw InvalidArgument("sweep: no algorithms selected");
  if (trials_per_cell < 1) throw InvalidArgument("sweep: trials per cell must be >= 1");
  if (!(noise_std >= 0.0)) throw InvalidArgument("sweep: noise std must be nonnegative");
  if (workers < 0) throw InvalidArgument("sweep: workers must be >= 0");
  AlgorithmConfig probe;
  probe.step_size = step_size;
  probe.sparsity = s;
  probe.max_iters = max_iters;
  probe.stop_tol = stop_tol;
  probe.validate();
  constants.validate();
}

CellSeeds cell_seeds(std::uint64_t master_seed, std::size_t m_position, Index m,
                     Index trials_per_cell, Index trial) {
  CellSeeds seeds;
  seeds.m = m;
  seeds.trial = trial;
  const auto index = static_cast<std::uint64_t>(m_position) *
                         static_cast<std::uint64_t>(trials_per_cell) +
                     static_cast<std::uint64_t>(trial);
  seeds.cell = split_seed(master_seed, index);
  seeds.signal = split_seed(seeds.cell, 0);
  seeds.matrix = split_seed(seeds.cell, 1);
  seeds.init = split_seed(seeds.cell, 2);
  seeds.noise = split_seed(seeds.cell, 3);
  return seeds;
}

bool same_outcome(const SweepRecord& a, const SweepRecord& b) {
  const auto bits_equal = [](double p, double q) {
    return std::memcmp(&p, &q, sizeof(double)) == 0;
  };
  return a.algorithm == b.algorithm && a.m == b.m && a.n == b.n && a.s == b.s &&
         a.trial_index == b.trial_index && bits_equal(a.final_l2_error, b.final_l2_error) &&
         a.iterations_used == b.iterations_used &&
         bits_equal(a.sign_agreement, b.sign_agreement) && a.stop_reason == b.stop_reason;
}

namespace {

// RFC 4180 quoting; line breaks become spaces so every record stays on one line.
std::string csv_field(std::string text) {
  for (auto& c : text)
    if (c == '\n' || c == '\r') c = ' ';
  if (text.find_first_of(",\"") == std::string::npos) return text;
  std::string out = "\"";
  for (const char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::vector<std::string> split_csv_line(const std::string& line, const std::string& where) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c != '"') {
        fields.back() += c;
      } else if (i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else {
        quoted = false;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  if (quoted) throw InvalidArgument(where + ": unterminated quote");
  return fields;
}

AlgorithmConfig algorithm_config(const SweepConfig& cfg, const CellSeeds& seeds) {
  AlgorithmConfig out;
  out.step_size = cfg.step_size;
  out.sparsity = cfg.s;
  out.max_iters = cfg.max_iters;
  out.stop_tol = cfg.stop_tol;
  out.degenerate_policy = cfg.degenerate_policy;
  if (cfg.init == InitKind::matched_filter)
    out.init = MatchedFilterInit{};
  else
    out.init = RandomSparseInit{seeds.init};
  return out;
}

SweepRecord run_one(Algorithm algorithm, const SweepConfig& cfg, const CellSeeds& seeds,
                    const UnitSparseVector& truth, const MeasurementEnsemble& a,
                    const BinaryObservation& b) {
  SweepRecord rec;
  rec.algorithm = to_string(algorithm);
  rec.m = seeds.m;
  rec.n = cfg.n;
  rec.s = cfg.s;
  rec.trial_index = seeds.trial;
  const auto start = std::chrono::steady_clock::now();
  try {
    const AlgorithmConfig acfg = algorithm_config(cfg, seeds);
    switch (algorithm) {
      case Algorithm::nbiht:
      case Algorithm::biht: {
        const IterateTrace trace = algorithm == Algorithm::nbiht ? nbiht_run(a, b, acfg, truth)
                                                                 : biht_run(a, b, acfg, truth);
        rec.final_l2_error = l2_error(trace.estimate, truth.values());
        rec.iterations_used = trace.iterations();
        rec.sign_agreement = trace.sign_agreement.back();
        rec.stop_reason = to_string(trace.stop_reason);
        break;
      }
      case Algorithm::one_shot: {
        const auto est = one_shot_estimate(a, b, cfg.s, cfg.step_size);
        rec.final_l2_error = l2_error(est.values(), truth.values());
        rec.iterations_used = 1;
        rec.sign_agreement =
            1.0 - hamming_distance(sign_quantize(sparse_matvec(a.matrix(), est.values())), b);
        rec.stop_reason = "one_shot";
        break;
      }
      case Algorithm::iht: {
        // Linear data with the same noise draw that produced b.
        Vector y = a.matrix() * truth.values();
        if (cfg.noise_std > 0.0) {
          RngStream rng(seeds.noise, 0);
          for (Index i = 0; i < y.size(); ++i) y[i] += cfg.noise_std * rng.gaussian();
        }
        const IterateTrace trace = iht_run(a, y, acfg, truth);
        rec.final_l2_error = l2_error(trace.estimate, truth.values());
        rec.iterations_used = trace.iterations();
        rec.sign_agreement = trace.sign_agreement.back();
        rec.stop_reason = to_string(trace.stop_reason);
        break;
      }
    }
  } catch (const std::exception& e) {
    rec.final_l2_error = std::numeric_limits<double>::quiet_NaN();
    rec.iterations_used = 0;
    rec.sign_agreement = std::numeric_limits<double>::quiet_NaN();
    rec.stop_reason = std::string("error:") + e.what();
  }
  rec.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

std::vector<SweepRecord> run_cell(const std::vector<Algorithm>& algorithms,
                                  const SweepConfig& cfg, const CellSeeds& seeds) {
  const auto truth = gen_sparse_signal(seeds.signal, cfg.n, cfg.s, cfg.support_rule, cfg.value_rule);
  const auto a = gen_gaussian_matrix(seeds.matrix, seeds.m, cfg.n);
  const auto b = measure(a, truth.values(), cfg.noise_std, seeds.noise);
  std::vector<SweepRecord> out;
  out.reserve(algorithms.size());
  for (const auto algorithm : algorithms) out.push_back(run_one(algorithm, cfg, seeds, truth, a, b));
  return out;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

SweepRecord run_instance(Algorithm algorithm, const SweepConfig& cfg, const CellSeeds& seeds) {
  cfg.validate();
  return run_cell({algorithm}, cfg, seeds).front();
}

SweepResult run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  std::vector<CellSeeds> cells;
  for (std::size_t p = 0; p < cfg.m_grid.size(); ++p)
    for (Index t = 0; t < cfg.trials_per_cell; ++t)
      cells.push_back(cell_seeds(cfg.master_seed, p, cfg.m_grid[p], cfg.trials_per_cell, t));

  // Distinct algorithms, in a fixed order.
  std::vector<Algorithm> algorithms = cfg.algorithms;
  std::sort(algorithms.begin(), algorithms.end());
  algorithms.erase(std::unique(algorithms.begin(), algorithms.end()), algorithms.end());

  std::vector<std::vector<SweepRecord>> per_cell(cells.size());
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t width =
      std::min<std::size_t>(cells.size(), cfg.workers > 0 ? static_cast<unsigned>(cfg.workers) : hw);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      try {
        per_cell[i] = run_cell(algorithms, cfg, cells[i]);
      } catch (...) {
        const std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (width <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(width);
    for (std::size_t w = 0; w < width; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  SweepResult result;
  for (auto& recs : per_cell)
    for (auto& rec : recs) result.records.push_back(std::move(rec));
  std::sort(result.records.begin(), result.records.end(),
            [](const SweepRecord& a, const SweepRecord& b) {
              return std::tie(a.algorithm, a.m, a.trial_index) <
                     std::tie(b.algorithm, b.m, b.trial_index);
            });
  result.manifest.config = cfg;
  result.manifest.rng_algorithm = std::string(RngStream::algorithm_name);
  result.manifest.library_version = std::string(kLibraryVersion);
  result.manifest.timestamp = utc_timestamp();
  result.manifest.cells = std::move(cells);
  return result;
}

std::map<Index, double> error_by_m(const std::vector<SweepRecord>& records,
                                   std::string_view algorithm, ErrorStat stat) {
  std::map<Index, std::vector<double>> groups;
  for (const auto& rec : records)
    if (rec.algorithm == algorithm && std::isfinite(rec.final_l2_error))
      groups[rec.m].push_back(rec.final_l2_error);
  std::map<Index, double> out;
  for (auto& [m, values] : groups) {
    if (stat == ErrorStat::mean) {
      double sum = 0.0;
      for (const double v : values) sum += v;
      out[m] = sum / static_cast<double>(values.size());
    } else {
      std::sort(values.begin(), values.end());
      const std::size_t k = values.size();
      out[m] = k % 2 == 1 ? values[k / 2] : 0.5 * (values[k / 2 - 1] + values[k / 2]);
    }
  }
  return out;
}

SlopeFit fit_slope(const std::vector<SweepRecord>& records, std::string_view algorithm,
                   ErrorStat stat) {
  const auto stats = error_by_m(records, algorithm, stat);
  if (stats.size() < 3)
    throw InvalidArgument("fit_slope: need at least 3 distinct m values for " +
                          std::string(algorithm) + ", have " + std::to_string(stats.size()));
  SlopeFit fit;
  std::vector<double> xs, ys;
  for (const auto& [m, value] : stats) {
    if (!(value > 0.0))
      throw InvalidArgument("fit_slope: nonpositive error statistic at m=" + std::to_string(m));
    fit.m_values.push_back(m);
    fit.stat_values.push_back(value);
    xs.push_back(std::log(static_cast<double>(m)));
    ys.push_back(std::log(value));
  }
  const double k = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= k;
  my /= k;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
    ss_res += r * r;
  }
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string records_to_csv(const std::vector<SweepRecord>& records) {
  std::ostringstream out;
  out << kCsvHeader << '\n';
  for (const auto& r : records) {
    out << r.algorithm << ',' << r.m << ',' << r.n << ',' << r.s << ',' << r.trial_index << ','
        << format_double(r.final_l2_error) << ',' << r.iterations_used << ','
        << format_double(r.sign_agreement) << ',' << csv_field(r.stop_reason) << ','
        << format_double(r.wall_time_ms) << '\n';
  }
  return out.str();
}

std::vector<SweepRecord> records_from_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("records csv: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) throw InvalidArgument("records csv: unexpected header '" + line + "'");
  std::vector<SweepRecord> out;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = "csv line " + std::to_string(line_no);
    const auto fields = split_csv_line(line, where);
    if (fields.size() != 10) throw InvalidArgument(where + ": expected 10 fields");
    SweepRecord r;
    r.algorithm = fields[0];
    r.m = parse_int_value(fields[1], where + " m");
    r.n = parse_int_value(fields[2], where + " N");
    r.s = parse_int_value(fields[3], where + " s");
    r.trial_index = parse_int_value(fields[4], where + " trial_index");
    r.final_l2_error = parse_real_value(fields[5], where + " final_l2_error");
    r.iterations_used = static_cast<int>(parse_int_value(fields[6], where + " iterations_used"));
    r.sign_agreement = parse_real_value(fields[7], where + " sign_agreement");
    r.stop_reason = fields[8];
    r.wall_time_ms = parse_real_value(fields[9], where + " wall_time_ms");
    out.push_back(std::move(r));
  }
  return out;
}

std::map<std::string, std::string> sweep_keys(const SweepConfig& cfg) {
  std::map<std::string, std::string> keys;
  std::string grid, algos;
  for (const auto m : cfg.m_grid) grid += (grid.empty() ? "" : ",") + std::to_string(m);
  for (const auto a : cfg.algorithms) algos += (algos.empty() ? "" : ",") + to_string(a);
  keys["n"] = std::to_string(cfg.n);
  keys["s"] = std::to_string(cfg.s);
  keys["m-grid"] = grid;
  keys["algo"] = algos;
  keys["trials"] = std::to_string(cfg.trials_per_cell);
  keys["seed"] = std::to_string(cfg.master_seed);
  keys["tau"] = format_double(cfg.step_size);
  keys["max-iters"] = std::to_string(cfg.max_iters);
  keys["stop-tol"] = format_double(cfg.stop_tol);
  keys["init"] = to_string(cfg.init);
  keys["degenerate-policy"] = to_string(cfg.degenerate_policy);
  keys["noise-std"] = format_double(cfg.noise_std);
  keys["support-rule"] = to_string(cfg.support_rule);
  keys["value-rule"] = to_string(cfg.value_rule);
  keys["workers"] = std::to_string(cfg.workers);
  keys["constants-cb"] = format_double(cfg.constants.c_big_b);
  keys["constants-cb-lower"] = format_double(cfg.constants.c_small_b);
  keys["constants-c10"] = format_double(cfg.constants.effective_c10());
  return keys;
}

void apply_sweep_keys(const std::map<std::string, std::string>& keys, SweepConfig& cfg) {
  for (const auto& [key, value] : keys) {
    if (key == "n") {
      cfg.n = parse_int_value(value, key);
    } else if (key == "s") {
      cfg.s = parse_int_value(value, key);
    } else if (key == "m-grid") {
      cfg.m_grid.clear();
      for (const auto& piece : split_list(value)) cfg.m_grid.push_back(parse_int_value(piece, key));
    } else if (key == "m") {
      cfg.m_grid = {static_cast<Index>(parse_int_value(value, key))};
    } else if (key == "algo") {
      cfg.algorithms.clear();
      for (const auto& piece : split_list(value)) cfg.algorithms.push_back(parse_algorithm(piece));
    } else if (key == "trials") {
      cfg.trials_per_cell = parse_int_value(value, key);
    } else if (key == "seed") {
      cfg.master_seed = parse_u64_value(value, key);
    } else if (key == "tau") {
      cfg.step_size = parse_real_value(value, key);
    } else if (key == "max-iters") {
      cfg.max_iters = static_cast<int>(parse_int_value(value, key));
    } else if (key == "stop-tol") {
      cfg.stop_tol = parse_real_value(value, key);
    } else if (key == "init") {
      cfg.init = parse_init_kind(value);
    } else if (key == "degenerate-policy") {
      cfg.degenerate_policy = parse_degenerate_policy(value);
    } else if (key == "noise-std") {
      cfg.noise_std = parse_real_value(value, key);
    } else if (key == "support-rule") {
      cfg.support_rule = parse_support_rule(value);
    } else if (key == "value-rule") {
      cfg.value_rule = parse_value_rule(value);
    } else if (key == "workers") {
      cfg.workers = static_cast<int>(parse_int_value(value, key));
    } else if (key == "constants-cb") {
      cfg.constants.c_big_b = parse_real_value(value, key);
    } else if (key == "constants-cb-lower") {
      cfg.constants.c_small_b = parse_real_value(value, key);
    } else if (key == "constants-c10") {
      cfg.constants.c_10 = parse_real_value(value, key);
    } else {
      throw InvalidArgument("unknown sweep key: " + key);
    }
  }
}

IniDocument manifest_to_ini(const RunManifest& manifest) {
  IniDocument doc;
  doc.set("manifest", "library_version", manifest.library_version);
  doc.set("manifest", "rng_algorithm", manifest.rng_algorithm);
  doc.set("manifest", "timestamp", manifest.timestamp);
  doc.set("manifest", "cell_seed_rule",
          "cell=split_seed(seed, m_position*trials+trial); "
          "signal/matrix/init/noise=split_seed(cell, 0/1/2/3)");
  doc.set("manifest", "constants.C_b", format_double(manifest.config.constants.c_big_b));
  doc.set("manifest", "constants.c_b", format_double(manifest.config.constants.c_small_b));
  doc.set("manifest", "constants.C_l", format_double(manifest.config.constants.c_l));
  doc.set("manifest", "constants.C_L", format_double(manifest.config.constants.c_big_l));
  doc.set("manifest", "constants.C_10", format_double(manifest.config.constants.effective_c10()));
  doc.set("manifest", "cells", std::to_string(manifest.cells.size()));
  for (const auto& [key, value] : sweep_keys(manifest.config)) doc.set("sweep", key, value);
  for (const auto& c : manifest.cells)
    doc.set("seeds", "cell." + std::to_string(c.m) + "." + std::to_string(c.trial),
            std::to_string(c.cell));
  return doc;
}

std::string manifest_to_text(const RunManifest& manifest) {
  return "# one-bit recovery sweep manifest; `onebit sweep --config <this file>` reruns it\n" +
         manifest_to_ini(manifest).to_string();
}

namespace {

const char* series_color(std::size_t i) {
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  return palette[i % 5];
}

std::string xml_escape(std::string_view text) {
  std::string out;
  for (const char c : text) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_svg(const std::vector<SweepRecord>& records, const RunManifest& manifest,
                       const ReportOptions& options) {
  std::set<std::string> names;
  for (const auto& r : records) names.insert(r.algorithm);

  struct Series {
    std::string name;
    std::vector<std::pair<double, double>> points;  // (log10 m, log10 stat)
  };
  std::vector<Series> series;
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& name : names) {
    Series sr{name, {}};
    for (const auto& [m, value] : error_by_m(records, name, options.stat)) {
      if (!(value > 0.0)) continue;
      const double x = std::log10(static_cast<double>(m));
      const double y = std::log10(value);
      sr.points.emplace_back(x, y);
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
    series.push_back(std::move(sr));
  }

  // Reference with the limiting theoretical exponent, anchored at the first
  // point of the nbiht series (or the first series).
  std::vector<std::pair<double, double>> reference;
  if (options.overlay_theory) {
    const Series* anchor = nullptr;
    for (const auto& sr : series)
      if (sr.name == "nbiht" && !sr.points.empty()) anchor = &sr;
    if (!anchor)
      for (const auto& sr : series)
        if (!sr.points.empty() && !anchor) anchor = &sr;
    if (anchor && anchor->points.size() >= 2) {
      const double rate = decay_exponent(-1);
      const auto [x0, y0] = anchor->points.front();
      for (const auto& [x, y] : anchor->points) {
        const double yr = y0 - rate * (x - x0);
        reference.emplace_back(x, yr);
        ymin = std::min(ymin, yr);
        ymax = std::max(ymax, yr);
      }
    }
  }
  if (!std::isfinite(xmin)) {
    xmin = 0;
    xmax = 1;
    ymin = -1;
    ymax = 0;
  }
  xmin = std::floor(xmin * 10.0) / 10.0 - 0.05;
  xmax = std::ceil(xmax * 10.0) / 10.0 + 0.05;
  ymin = std::floor(ymin) - 0.0;
  ymax = std::ceil(ymax);
  if (ymax - ymin < 1.0) ymax = ymin + 1.0;

  const double width = 800, height = 520, left = 80, right = 250, top = 40, bottom = 60;
  const double pw = width - left - right, ph = height - top - bottom;
  const auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
  const auto py = [&](double y) { return top + (ymax - y) / (ymax - ymin) * ph; };

  std::ostringstream svg;
  svg.setf(std::ios::fixed);
  svg.precision(2);
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << left << "\" y=\"24\" font-size=\"15\">" << to_string(options.stat)
      << " l2 error vs m (N=" << manifest.config.n << ", s=" << manifest.config.s
      << ", trials=" << manifest.config.trials_per_cell << ")</text>\n"
      << "<rect class=\"frame\" x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw
      << "\" height=\"" << ph << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int d = static_cast<int>(std::ceil(ymin)); d <= static_cast<int>(std::floor(ymax)); ++d) {
    svg << "<line class=\"grid\" x1=\"" << left << "\" x2=\"" << left + pw << "\" y1=\"" << py(d)
        << "\" y2=\"" << py(d) << "\" stroke=\"#ddd\"/>\n"
        << "<text x=\"" << left - 8 << "\" y=\"" << py(d) + 4
        << "\" font-size=\"12\" text-anchor=\"end\">1e" << d << "</text>\n";
  }
  std::set<Index> ms;
  for (const auto& r : records) ms.insert(r.m);
  for (const auto m : ms) {
    const double x = px(std::log10(static_cast<double>(m)));
    svg << "<line class=\"tick\" x1=\"" << x << "\" x2=\"" << x << "\" y1=\"" << top + ph
        << "\" y2=\"" << top + ph + 5 << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << x << "\" y=\"" << top + ph + 20
        << "\" font-size=\"11\" text-anchor=\"middle\">" << m << "</text>\n";
  }
  svg << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 15
      << "\" font-size=\"13\" text-anchor=\"middle\">m (log10 axis)</text>\n"
      << "<text x=\"20\" y=\"" << top + ph / 2 << "\" font-size=\"13\" text-anchor=\"middle\" "
      << "transform=\"rotate(-90 20 " << top + ph / 2 << ")\">error (log10 axis)</text>\n";

  double legend_y = top + 10;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& sr = series[i];
    if (sr.points.empty()) continue;
    svg << "<polyline class=\"series\" data-algorithm=\"" << xml_escape(sr.name)
        << "\" fill=\"none\" stroke=\"" << series_color(i) << "\" stroke-width=\"2\" points=\"";
    for (const auto& [x, y] : sr.points) svg << px(x) << ',' << py(y) << ' ';
    svg << "\"/>\n";
    for (const auto& [x, y] : sr.points)
      svg << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"3\" fill=\""
          << series_color(i) << "\"/>\n";
    std::string label = sr.name;
    try {
      const auto fit = fit_slope(records, sr.name, options.stat);
      char buf[96];
      std::snprintf(buf, sizeof buf, ": slope %.3f (r2 %.3f)", fit.slope, fit.r_squared);
      label += buf;
    } catch (const InvalidArgument&) {
    }
    svg << "<text class=\"slope\" x=\"" << left + pw + 15 << "\" y=\"" << legend_y
        << "\" font-size=\"12\" fill=\"" << series_color(i) << "\">" << xml_escape(label)
        << "</text>\n";
    legend_y += 18;
  }
  if (!reference.empty()) {
    svg << "<polyline class=\"theory\" fill=\"none\" stroke=\"#555\" stroke-dasharray=\"6,4\" "
           "points=\"";
    for (const auto& [x, y] : reference) svg << px(x) << ',' << py(y) << ' ';
    svg << "\"/>\n"
        << "<text class=\"theory-label\" x=\"" << left + pw + 15 << "\" y=\"" << legend_y
        << "\" font-size=\"12\" fill=\"#555\">reference slope -1 (O(1/m))</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << content;
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace

ReportPaths emit_report(const std::vector<SweepRecord>& records, const RunManifest& manifest,
                        const std::filesystem::path& out_dir, const ReportOptions& options) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory: " + out_dir.string());
  ReportPaths paths;
  paths.csv = out_dir / "records.csv";
  paths.manifest = out_dir / "manifest.ini";
  write_file(paths.csv, records_to_csv(records));
  write_file(paths.manifest, manifest_to_text(manifest));
  if (!records.empty()) {
    paths.plot = out_dir / "error_vs_m.svg";
    write_file(paths.plot, render_svg(records, manifest, options));
  }
  return paths;
}

}  // namespace onebit
