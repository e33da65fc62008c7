#include "onebit/probes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "onebit/sparse_ops.hpp"

namespace onebit {

namespace {

void require_unit(const Vector& v, const char* who) {
  if (!(std::abs(v.norm() - 1.0) <= 1e-9))
    throw InvalidArgument(std::string(who) + ": expected a unit vector");
}

// A^T (p - q) over the rows where the two sign patterns differ.
Vector sign_difference_backprojection(const Matrix& a, const BinaryObservation& p,
                                      const BinaryObservation& q) {
  Vector out = Vector::Zero(a.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    const int diff = p[i] - q[i];
    if (diff != 0) out.noalias() += static_cast<double>(diff) * a.row(i).transpose();
  }
  return out;
}

}  // namespace

double check_unbiasedness(const Vector& y, Index m, Index trials, std::uint64_t seed) {
  if (m < 1 || trials < 1 || static_cast<double>(m) * static_cast<double>(trials) < 1e4)
    throw InvalidArgument("check_unbiasedness: trials * m must be at least 1e4 (got trials=" +
                          std::to_string(trials) + ", m=" + std::to_string(m) + ")");
  require_unit(y, "check_unbiasedness");
  const Index n = y.size();
  Vector acc = Vector::Zero(n);
  Vector row(n);
  for (Index t = 0; t < trials; ++t) {
    // One fresh m x N ensemble per trial, generated row by row.
    RngStream rng(seed, static_cast<std::uint64_t>(t));
    for (Index i = 0; i < m; ++i) {
      for (Index j = 0; j < n; ++j) row[j] = rng.gaussian();
      if (row.dot(y) > 0.0)
        acc += row;
      else
        acc -= row;
    }
  }
  const double scale = kUnbiasedStep / (static_cast<double>(trials) * static_cast<double>(m));
  return (scale * acc - y).cwiseAbs().maxCoeff();
}

double check_embedding(Index n, Index s, Index m, Index pairs, std::uint64_t seed, PairMode mode) {
  if (pairs < 1) throw InvalidArgument("check_embedding: pairs must be >= 1");
  const auto ensemble = gen_gaussian_matrix(split_seed(seed, 0), m, n);
  RngStream rng(seed, 1);
  double worst = 0.0;
  for (Index p = 0; p < pairs; ++p) {
    const Vector x = draw_sparse_signal(rng, n, s).values();
    Vector y;
    switch (mode) {
      case PairMode::independent: y = draw_sparse_signal(rng, n, s).values(); break;
      case PairMode::identical: y = x; break;
      case PairMode::antipodal: y = -x; break;
    }
    const auto bx = sign_quantize(sparse_matvec(ensemble.matrix(), x));
    const auto by = sign_quantize(sparse_matvec(ensemble.matrix(), y));
    worst = std::max(worst, std::abs(hamming_distance(bx, by) - geodesic_distance(x, y)));
  }
  return worst;
}

double RaicProbeConfig::effective_nu() const {
  return nu > 0.0 ? nu : kUnbiasedStep / static_cast<double>(m);
}

void RaicProbeConfig::validate() const {
  if (n < 1 || m < 1 || s < 1 || s > n) throw InvalidArgument("raic_probe: need 1 <= s <= N, m >= 1");
  if (samples < 1) throw InvalidArgument("raic_probe: samples must be >= 1");
  if (levels < 1) throw InvalidArgument("raic_probe: levels must be >= 1");
  if (retry_budget < 1) throw InvalidArgument("raic_probe: retry budget must be >= 1");
  const bool lower_ok = diagnostic ? r_lb >= 0.0 : r_lb > 0.0;
  if (!lower_ok || !(r_lb <= r_ub) || !(r_ub <= 2.0))
    throw InvalidArgument("raic_probe: need 0 < r_lb <= r_ub <= 2 (r_lb = 0 only in diagnostic mode)");
}

RaicFit fit_raic_line(const std::vector<RaicSample>& samples) {
  RaicFit fit;
  fit.count = static_cast<Index>(samples.size());
  if (samples.empty()) return fit;
  fit.r_lo = samples.front().distance;
  fit.r_hi = samples.front().distance;
  double sd = 0, sl = 0;
  for (const auto& p : samples) {
    sd += p.distance;
    sl += p.lhs;
    fit.r_lo = std::min(fit.r_lo, p.distance);
    fit.r_hi = std::max(fit.r_hi, p.distance);
  }
  const double k = static_cast<double>(samples.size());
  const double mean_d = sd / k;
  const double mean_l = sl / k;
  double sxx = 0, sxy = 0, sdd = 0, sdl = 0;
  for (const auto& p : samples) {
    sxx += (p.distance - mean_d) * (p.distance - mean_d);
    sxy += (p.distance - mean_d) * (p.lhs - mean_l);
    sdd += p.distance * p.distance;
    sdl += p.distance * p.lhs;
  }
  if (sxx > 0.0) {
    fit.delta = sxy / sxx;
    fit.eta = mean_l - fit.delta * mean_d;
    if (fit.eta < 0.0) {
      fit.delta = sdd > 0.0 ? sdl / sdd : 0.0;
      fit.eta = 0.0;
    }
  } else {
    fit.delta = 0.0;
    fit.eta = std::max(0.0, mean_l);
  }
  fit.max_residual = 0.0;
  for (const auto& p : samples)
    fit.max_residual = std::max(fit.max_residual, p.lhs - (fit.delta * p.distance + fit.eta));
  return fit;
}

RaicProbeResult raic_probe(const RaicProbeConfig& cfg) {
  cfg.validate();
  const double nu = cfg.effective_nu();
  RngStream base(cfg.seed, 0);
  const Vector x = draw_sparse_signal(base, cfg.n, cfg.s).values();
  const auto ensemble = gen_gaussian_matrix(split_seed(cfg.seed, 1), cfg.m, cfg.n);
  const Matrix& a = ensemble.matrix();
  const auto bx = sign_quantize(sparse_matvec(a, x));

  std::vector<Index> x_support;
  for (Index j = 0; j < cfg.n; ++j)
    if (x[j] != 0.0) x_support.push_back(j);

  // Level j covers [edges[j], edges[j+1]].
  std::vector<double> edges(static_cast<std::size_t>(cfg.levels) + 1);
  for (int j = 0; j <= cfg.levels; ++j) {
    const double t = static_cast<double>(j) / cfg.levels;
    edges[static_cast<std::size_t>(j)] =
        cfg.r_lb > 0.0 ? cfg.r_lb * std::pow(cfg.r_ub / cfg.r_lb, t)
                       : cfg.r_lb + (cfg.r_ub - cfg.r_lb) * t;
  }
  edges.front() = cfg.r_lb;
  edges.back() = cfg.r_ub;

  const auto lhs_of = [&](const Vector& y) {
    const auto by = sign_quantize(sparse_matvec(a, y));
    const Vector w = nu * sign_difference_backprojection(a, bx, by) - (x - y);
    return sparse_dual_norm(w, cfg.s);
  };

  std::vector<RaicSample> samples;
  std::vector<int> sample_level;
  Index first = 0;
  if (cfg.diagnostic) {
    samples.push_back({0.0, lhs_of(x)});
    sample_level.push_back(0);
    first = 1;
  }
  for (Index i = first; i < cfg.samples; ++i) {
    const int level = static_cast<int>(i % cfg.levels);
    const double lo = edges[static_cast<std::size_t>(level)];
    const double hi = edges[static_cast<std::size_t>(level) + 1];
    RngStream rng(cfg.seed, 2 + static_cast<std::uint64_t>(i));
    bool accepted = false;
    for (Index attempt = 0; attempt < cfg.retry_budget && !accepted; ++attempt) {
      // Direction on x's support with a random number of positions swapped
      // out, so y can move both along and off the support.
      std::vector<Index> support = x_support;
      const Index outside = cfg.n - cfg.s;
      const Index swaps =
          std::min<Index>(outside, static_cast<Index>(rng.uniform_index(cfg.s + 1)));
      for (Index k = 0; k < swaps; ++k) {
        Index candidate;
        do {
          candidate = static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(cfg.n)));
        } while (std::find(support.begin(), support.end(), candidate) != support.end());
        support[static_cast<std::size_t>(rng.uniform_index(support.size()))] = candidate;
      }
      Vector direction = Vector::Zero(cfg.n);
      for (const Index j : support) direction[j] = rng.gaussian();
      const double dnorm = direction.norm();
      if (dnorm == 0.0) continue;
      direction /= dnorm;
      const double step = (0.5 * lo + (2.0 * hi - 0.5 * lo) * rng.uniform());
      const Vector moved = hard_threshold(x + step * direction, cfg.s);
      const double mnorm = moved.norm();
      if (mnorm == 0.0) continue;
      const Vector y = moved / mnorm;
      const double dist = (x - y).norm();
      if (dist < lo || dist > hi) continue;
      samples.push_back({dist, lhs_of(y)});
      sample_level.push_back(level);
      accepted = true;
    }
    if (!accepted)
      throw SamplingExhausted("raic_probe: no sample in annulus [" + std::to_string(lo) + ", " +
                              std::to_string(hi) + "] after " +
                              std::to_string(cfg.retry_budget) + " attempts");
  }

  RaicProbeResult result;
  if (cfg.levels > 1) {
    for (int j = 0; j < cfg.levels; ++j) {
      std::vector<RaicSample> subset;
      for (std::size_t k = 0; k < samples.size(); ++k)
        if (sample_level[k] == j) subset.push_back(samples[k]);
      std::sort(subset.begin(), subset.end(), [](const RaicSample& p, const RaicSample& q) {
        return p.distance < q.distance || (p.distance == q.distance && p.lhs < q.lhs);
      });
      RaicFit fit = fit_raic_line(subset);
      fit.r_lo = edges[static_cast<std::size_t>(j)];
      fit.r_hi = edges[static_cast<std::size_t>(j) + 1];
      result.per_level.push_back(fit);
    }
  }
  std::sort(samples.begin(), samples.end(), [](const RaicSample& p, const RaicSample& q) {
    return p.distance < q.distance || (p.distance == q.distance && p.lhs < q.lhs);
  });
  const RaicFit pooled = fit_raic_line(samples);
  result.fitted_delta = pooled.delta;
  result.fitted_eta = pooled.eta;
  result.max_residual = pooled.max_residual;
  result.per_sample = std::move(samples);
  return result;
}

DecompositionResult decomposition_check(const Vector& a, const Vector& x, const Vector& y) {
  if (a.size() != x.size() || x.size() != y.size())
    throw InvalidArgument("decomposition_check: length mismatch");
  require_unit(x, "decomposition_check");
  require_unit(y, "decomposition_check");
  const double dn = (x - y).norm();
  const double sn = (x + y).norm();
  if (dn <= 1e-12 || sn <= 1e-12)
    throw InvalidArgument("decomposition_check: x = +-y leaves the directions undefined");
  const Vector u = (x - y) / dn;
  const Vector v = (x + y) / sn;
  const double au = a.dot(u);
  const double av = a.dot(v);
  const Vector rest = a - au * u - av * v;
  return {(a - (au * u + av * v + rest)).norm(), std::abs(rest.dot(u)), std::abs(rest.dot(v))};
}

double gaussian_width_estimate(Index n, Index s, Index trials, std::uint64_t seed) {
  if (trials < 100) throw InvalidArgument("gaussian_width_estimate: trials must be >= 100");
  if (n < 1 || s < 1) throw InvalidArgument("gaussian_width_estimate: need N >= 1, s >= 1");
  RngStream rng(seed, 0);
  Vector h(n);
  double sum = 0.0;
  for (Index t = 0; t < trials; ++t) {
    for (Index j = 0; j < n; ++j) h[j] = rng.gaussian();
    sum += sparse_dual_norm(h, s);
  }
  return sum / static_cast<double>(trials);
}

double width_reference(Index n, Index s) {
  if (s < 1 || s > n) throw InvalidArgument("width_reference: need 1 <= s <= N");
  return std::sqrt(2.0 * static_cast<double>(s) *
                   std::log(static_cast<double>(n) / static_cast<double>(s)));
}

namespace {

// Perturbation families cycled through by the projection searches:
// dense noise, mass on a support disjoint from z (large), noise confined to
// supp(z), and quantized values that force magnitude ties.
Vector perturbed(RngStream& rng, const Vector& z, Index s, Index sample) {
  const Index n = z.size();
  const double scale = std::pow(10.0, -3.0 + 6.0 * rng.uniform());
  Vector w = z;
  switch (sample % 4) {
    case 0:
      for (Index j = 0; j < n; ++j) w[j] += scale * rng.gaussian();
      break;
    case 1: {
      const double big = std::pow(10.0, 6.0 * rng.uniform());
      for (Index j = 0; j < n; ++j)
        if (z[j] == 0.0 && rng.uniform() < static_cast<double>(s) / static_cast<double>(n))
          w[j] += big * rng.gaussian();
      break;
    }
    case 2:
      for (Index j = 0; j < n; ++j)
        if (z[j] != 0.0) w[j] += scale * rng.gaussian();
      break;
    default:
      for (Index j = 0; j < n; ++j) {
        const auto level = static_cast<double>(rng.uniform_index(3)) - 1.0;
        w[j] = level * scale;
      }
      break;
  }
  return w;
}

template <typename Excess>
double projection_search(Index samples, Index n, Index s, std::uint64_t seed, Excess excess) {
  if (samples < 1) throw InvalidArgument("projection check: samples must be >= 1");
  if (s < 1 || s > n) throw InvalidArgument("projection check: need 1 <= s <= N");
  RngStream rng(seed, 0);
  double worst = -std::numeric_limits<double>::infinity();
  for (Index i = 0; i < samples; ++i) {
    const Vector z = draw_sparse_signal(rng, n, s).values();
    const Vector w = i == 0 ? z : perturbed(rng, z, s, i);
    worst = std::max(worst, excess(w, z));
  }
  return worst;
}

}  // namespace

double projection_inequality_check(Index samples, Index n, Index s, std::uint64_t seed) {
  return projection_search(samples, n, s, seed, [s](const Vector& w, const Vector& z) {
    return (hard_threshold(w, s) - z).norm() - 2.0 * sparse_dual_norm(w - z, s);
  });
}

double normalized_projection_check(Index samples, Index n, Index s, std::uint64_t seed) {
  return projection_search(samples, n, s, seed, [s](const Vector& w, const Vector& z) {
    const Vector t = hard_threshold(w, s);
    if (t.norm() == 0.0) return -std::numeric_limits<double>::infinity();
    return (normalize(t) - z).norm() - 4.0 * sparse_dual_norm(w - z, s);
  });
}

double TheoryConstants::effective_c10() const {
  if (c_10 > 0.0) return c_10;
  return std::max({c_l, c_big_l, 2.0 * c_big_b * c_big_b}) + std::numbers::pi;
}

void TheoryConstants::validate() const {
  if (!(c_big_b > 0.0) || !(c_small_b > 0.0) || !(c_l > 0.0) || !(c_big_l > 0.0))
    throw InvalidArgument("theory constants must be positive");
}

double c_nsm(double m, Index n, Index s, const TheoryConstants& constants) {
  if (!(m >= 2.0)) throw InvalidArgument("theory_schedule: m must be >= 2");
  if (s < 1 || s > n) throw InvalidArgument("theory_schedule: need 1 <= s <= N");
  constants.validate();
  const double sd = static_cast<double>(s);
  return 3.0 * (constants.c_big_b * std::sqrt(sd * std::log(static_cast<double>(n) / sd)) +
                std::sqrt(5.0 * std::log(m) / constants.c_small_b));
}

int schedule_levels(double m) {
  if (!(m > 1.0)) return 0;
  const long double log_m = std::log(static_cast<long double>(m));
  const long double threshold = 40.0L * std::log(24.0L);
  int levels = 0;
  long double factor = 5.0L / 6.0L;
  while (factor * log_m > threshold) {
    ++levels;
    factor *= 5.0L / 6.0L;
  }
  return levels;
}

namespace {

struct ScheduleLogs {
  long double log_600c10;
  long double log_m;
  long double log_log_m;
  long double log_c;
};

ScheduleLogs schedule_logs(double m, Index n, Index s, const TheoryConstants& constants) {
  const double c = c_nsm(m, n, s, constants);
  const long double log_m = std::log(static_cast<long double>(m));
  return {std::log(600.0L * constants.effective_c10()), log_m, std::log(log_m),
          std::log(static_cast<long double>(c))};
}

}  // namespace

double schedule_radius(int i, double m, Index n, Index s, const TheoryConstants& constants) {
  if (i < 0) throw InvalidArgument("schedule_radius: index must be >= 0");
  const auto l = schedule_logs(m, n, s, constants);
  const long double q = std::pow(5.0L / 6.0L, static_cast<long double>(i));
  const long double log_r = 3.0L * (1.0L - q) * l.log_600c10 - (1.0L - 0.5L * q) * l.log_m +
                            7.0L * (1.0L - q) * l.log_log_m + (6.0L - 5.0L * q) * l.log_c;
  return static_cast<double>(std::exp(log_r));
}

double schedule_delta(int i, double m, Index n, Index s, const TheoryConstants& constants) {
  if (i < 0) throw InvalidArgument("schedule_delta: index must be >= 0");
  const auto l = schedule_logs(m, n, s, constants);
  const long double q = std::pow(5.0L / 6.0L, static_cast<long double>(i));
  const long double log_d = 2.0L * (1.0L - q) * l.log_600c10 - (1.0L - q / 3.0L) * l.log_m +
                            ((14.0L / 3.0L) * (1.0L - q) + 4.0L / 3.0L) * l.log_log_m +
                            (5.0L - (10.0L / 3.0L) * q) * l.log_c;
  return static_cast<double>(std::exp(log_d));
}

TheorySchedule theory_schedule(double m, Index n, Index s, const TheoryConstants& constants,
                               int terms) {
  TheorySchedule out;
  out.m = m;
  out.constants = constants;
  out.c_nsm = c_nsm(m, n, s, constants);
  out.levels = schedule_levels(m);
  out.has_levels = out.levels >= 1;
  const int count = terms > 0 ? terms : out.levels + 1;
  for (int i = 0; i < count; ++i) {
    out.r.push_back(schedule_radius(i, m, n, s, constants));
    out.delta.push_back(schedule_delta(i, m, n, s, constants));
  }
  // r_{i+1} interpolates geometrically between r_1 and the fixed point
  // (600 C_10)^3 C^6 (log m)^7 / m, so it is nonincreasing iff r_1 is above it.
  const auto l = schedule_logs(m, n, s, constants);
  const long double log_r1 = -0.5L * l.log_m + l.log_c;
  const long double log_fixed = 3.0L * l.log_600c10 - l.log_m + 7.0L * l.log_log_m + 6.0L * l.log_c;
  out.nonincreasing = log_r1 >= log_fixed;
  return out;
}

double decay_exponent(int k) {
  if (k < 0) return 1.0;
  return 1.0 - 0.5 * std::pow(5.0 / 6.0, static_cast<double>(k / 25 - 1));
}

double error_bound_shape(double m, Index n, Index s, int k, double scale) {
  if (!(m > 1.0)) throw InvalidArgument("error_bound_shape: m must exceed 1");
  const double sd = static_cast<double>(s);
  const double log_ns = std::log(static_cast<double>(n) / sd);
  return scale * std::pow(sd * log_ns, 3.5) * std::pow(std::log(m), 12.0) /
         std::pow(m, decay_exponent(k));
}

}  // namespace onebit
