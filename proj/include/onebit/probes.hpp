#ifndef ONEBIT_PROBES_HPP
#define ONEBIT_PROBES_HPP

#include <cstdint>
#include <vector>

#include "onebit/core_model.hpp"
#include "onebit/recon.hpp"

namespace onebit {

/// max_j | (sqrt(pi/2) / (trials m)) sum_t (A_t^T sign(A_t y))_j - y_j | over
/// `trials` fresh m x N ensembles. Requires trials * m >= 1e4.
double check_unbiasedness(const Vector& y, Index m, Index trials, std::uint64_t seed);

enum class PairMode { independent, identical, antipodal };

/// One ensemble, `pairs` random s-sparse unit pairs (x, y); returns
/// max |d_H(sign(Ax), sign(Ay)) - d_g(x, y)|.
double check_embedding(Index n, Index s, Index m, Index pairs, std::uint64_t seed,
                       PairMode mode = PairMode::independent);

struct RaicProbeConfig {
  Index n = 256;
  Index s = 4;
  Index m = 8192;
  // Scale of the back-projection; <= 0 selects sqrt(pi/2) / m.
  double nu = 0.0;
  double r_lb = 0.1;
  double r_ub = 0.5;
  Index samples = 200;
  std::uint64_t seed = 0;
  // Number of geometric sub-annuli fitted separately (1 = pooled only).
  int levels = 1;
  // Admits r_lb = 0 and prepends the y = x endpoint sample.
  bool diagnostic = false;
  // Rejection attempts allowed per sample before SamplingExhausted.
  Index retry_budget = 100000;

  double effective_nu() const;
  void validate() const;
};

struct RaicSample {
  double distance;  // ||x - y||_2
  double lhs;       // || nu A^T (sign(Ax) - sign(Ay)) - (x - y) ||_{K_1 dual}
};

struct RaicFit {
  double r_lo = 0.0;
  double r_hi = 0.0;
  double delta = 0.0;
  double eta = 0.0;
  double max_residual = 0.0;
  Index count = 0;
};

struct RaicProbeResult {
  double fitted_delta = 0.0;
  double fitted_eta = 0.0;
  double max_residual = 0.0;
  std::vector<RaicSample> per_sample;  // sorted by (distance, lhs)
  std::vector<RaicFit> per_level;      // empty when levels == 1
};

/// Least squares lhs ~ delta * distance + eta with eta clamped to >= 0
/// (refit through the origin when the free intercept is negative).
RaicFit fit_raic_line(const std::vector<RaicSample>& samples);

RaicProbeResult raic_probe(const RaicProbeConfig& cfg);

struct DecompositionResult {
  double recon_residual;
  double ortho_u;
  double ortho_v;
};

/// Splits a along u = (x-y)/||x-y||, v = (x+y)/||x+y|| and the orthogonal
/// remainder. Throws InvalidArgument when x = +-y.
DecompositionResult decomposition_check(const Vector& a, const Vector& x, const Vector& y);

/// Monte Carlo mean of sparse_dual_norm(h, s) for h ~ N(0, I_N).
double gaussian_width_estimate(Index n, Index s, Index trials, std::uint64_t seed);

/// sqrt(2 s log(N/s)), the reference scale for the width estimate.
double width_reference(Index n, Index s);

/// Largest value of ||T_s(w) - z|| - 2 ||w - z||_{K_1 dual} over sampled
/// (w, z). Nonpositive whenever the inequality holds.
double projection_inequality_check(Index samples, Index n, Index s, std::uint64_t seed);

/// Same search for the normalized form ||normalize(T_s(w)) - z|| <= 4 ||w - z||.
double normalized_projection_check(Index samples, Index n, Index s, std::uint64_t seed);

struct TheoryConstants {
  double c_big_b = 1.0;    // C_b
  double c_small_b = 1.0;  // c_b
  double c_l = 1.0;
  double c_big_l = 1.0;
  // <= 0 selects max{C_l, C_L, 2 C_b^2} + pi.
  double c_10 = 0.0;

  double effective_c10() const;
  void validate() const;
};

struct TheorySchedule {
  double m = 0.0;
  double c_nsm = 0.0;  // C(N, s, m)
  int levels = 0;      // L
  bool has_levels = false;
  // r_1 >= fixed point of the recurrence, so r never increases.
  bool nonincreasing = false;
  std::vector<double> r;      // r_1, r_2, ...
  std::vector<double> delta;  // delta_1, delta_2, ...
  TheoryConstants constants;
};

double c_nsm(double m, Index n, Index s, const TheoryConstants& constants);

/// Largest positive L with m^((1/40)(5/6)^L) > 24, or 0 when there is none
/// (m <= 24^48).
int schedule_levels(double m);

/// Multiscale radii r_1, r_2, ... and net resolutions delta_1, delta_2, ...
/// evaluated from their closed forms (in log space, so m up to the double
/// range is fine). The number of terms is L + 1 (at least 1) unless `terms`
/// is positive.
TheorySchedule theory_schedule(double m, Index n, Index s, const TheoryConstants& constants = {},
                               int terms = 0);

/// r_{i+1} and delta_{i+1} for i >= 0.
double schedule_radius(int i, double m, Index n, Index s, const TheoryConstants& constants);
double schedule_delta(int i, double m, Index n, Index s, const TheoryConstants& constants);

/// 1 - (1/2)(5/6)^(floor(k/25) - 1): the error exponent after k iterations.
double decay_exponent(int k);

/// scale * (s log(N/s))^(7/2) (log m)^12 / m^decay_exponent(k). With
/// k < 0 the exponent is its limit 1.
double error_bound_shape(double m, Index n, Index s, int k = -1, double scale = 1.0);

}  // namespace onebit

#endif  // ONEBIT_PROBES_HPP
