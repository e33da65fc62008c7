#ifndef ONEBIT_RECON_HPP
#define ONEBIT_RECON_HPP

#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "onebit/core_model.hpp"

namespace onebit {

/// sqrt(pi/2): the step at which the first iterate is an unbiased estimate.
inline constexpr double kUnbiasedStep = 1.2533141373155002512;

enum class DegeneratePolicy { keep_previous, fail };
enum class StopReason { max_iters, converged, degenerate };

std::string to_string(StopReason reason);
std::string to_string(DegeneratePolicy policy);
DegeneratePolicy parse_degenerate_policy(std::string_view name);

/// Random s-sparse unit vector drawn with gen_sparse_signal(seed, N, s).
struct RandomSparseInit {
  std::uint64_t seed = 0;
};
/// Start from the one-shot estimate (T_s of the back-projected data).
struct MatchedFilterInit {};
/// Caller-supplied start; projected onto the algorithm's model set.
struct ProvidedInit {
  Vector x0;
};
using Initialization = std::variant<RandomSparseInit, MatchedFilterInit, ProvidedInit>;

std::string init_name(const Initialization& init);

struct AlgorithmConfig {
  double step_size = kUnbiasedStep;
  Index sparsity = 1;
  int max_iters = 500;
  // Stop once ||x_{k+1} - x_k||_2 < stop_tol.
  double stop_tol = 1e-10;
  Initialization init = RandomSparseInit{};
  DegeneratePolicy degenerate_policy = DegeneratePolicy::keep_previous;

  void validate() const;
};

/// Iterates x_0, x_1, ... with per-iterate diagnostics. All sequences share
/// one length. For the binary algorithms `estimate` is the last iterate on
/// the unit sphere; for IHT it is the raw last iterate.
struct IterateTrace {
  std::vector<Vector> iterates;
  std::vector<double> errors_vs_truth;  // empty when no truth was supplied
  std::vector<double> sign_agreement;   // 1 - d_H(sign(A x_k), b)
  StopReason stop_reason = StopReason::max_iters;
  Vector estimate;

  int iterations() const noexcept { return static_cast<int>(iterates.size()) - 1; }
};

/// One normalized BIHT update:
///   normalize(T_s(x_k + (tau/m) A^T (b - sign(A x_k)))).
/// With keep_previous a zero thresholded vector returns x_k; with fail it
/// throws DegenerateIterate.
UnitSparseVector nbiht_step(const MeasurementEnsemble& a, const BinaryObservation& b,
                            const UnitSparseVector& x_k, double tau, Index s,
                            DegeneratePolicy policy = DegeneratePolicy::keep_previous);

IterateTrace nbiht_run(const MeasurementEnsemble& a, const BinaryObservation& b,
                       const AlgorithmConfig& cfg,
                       const std::optional<UnitSparseVector>& truth = std::nullopt);

/// Unnormalized BIHT. Internal iterates are never rescaled; only
/// `estimate` is normalized.
IterateTrace biht_run(const MeasurementEnsemble& a, const BinaryObservation& b,
                      const AlgorithmConfig& cfg,
                      const std::optional<UnitSparseVector>& truth = std::nullopt);

/// Classical IHT on linear measurements y = A x with unit step 1/m:
///   x_{k+1} = T_s(x_k + (1/m) A^T (y - A x_k)).
/// cfg.step_size is ignored.
IterateTrace iht_run(const MeasurementEnsemble& a, const Vector& y, const AlgorithmConfig& cfg,
                     const std::optional<UnitSparseVector>& truth = std::nullopt);

/// normalize(T_s((tau/m) A^T b)).
UnitSparseVector one_shot_estimate(const MeasurementEnsemble& a, const BinaryObservation& b,
                                   Index s, double tau = kUnbiasedStep);

}  // namespace onebit

#endif  // ONEBIT_RECON_HPP
