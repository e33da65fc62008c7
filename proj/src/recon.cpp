#include "onebit/recon.hpp"

#include <cmath>
#include <string>

#include "onebit/sparse_ops.hpp"

namespace onebit {

std::string to_string(StopReason reason) {
  switch (reason) {
    case StopReason::max_iters: return "max_iters";
    case StopReason::converged: return "converged";
    case StopReason::degenerate: return "degenerate";
  }
  return "unknown";
}

std::string to_string(DegeneratePolicy policy) {
  return policy == DegeneratePolicy::keep_previous ? "keep_previous" : "fail";
}

DegeneratePolicy parse_degenerate_policy(std::string_view name) {
  if (name == "keep_previous") return DegeneratePolicy::keep_previous;
  if (name == "fail") return DegeneratePolicy::fail;
  throw InvalidArgument("unknown degenerate policy: " + std::string(name));
}

std::string init_name(const Initialization& init) {
  struct Visitor {
    std::string operator()(const RandomSparseInit&) const { return "random_sparse"; }
    std::string operator()(const MatchedFilterInit&) const { return "matched_filter"; }
    std::string operator()(const ProvidedInit&) const { return "provided"; }
  };
  return std::visit(Visitor{}, init);
}

void AlgorithmConfig::validate() const {
  if (!(step_size > 0.0) || !std::isfinite(step_size))
    throw InvalidArgument("step size must be positive and finite");
  if (sparsity < 1) throw InvalidArgument("sparsity must be >= 1");
  if (max_iters < 1) throw InvalidArgument("max_iters must be >= 1");
  if (!(stop_tol >= 0.0)) throw InvalidArgument("stop_tol must be nonnegative");
}

namespace {

void check_dimensions(const MeasurementEnsemble& a, Index data_len, Index s, const char* who) {
  if (data_len != a.rows())
    throw InvalidArgument(std::string(who) + ": data length " + std::to_string(data_len) +
                          " does not match m=" + std::to_string(a.rows()));
  if (s < 1 || s > a.cols())
    throw InvalidArgument(std::string(who) + ": need 1 <= s <= N (s=" + std::to_string(s) +
                          ", N=" + std::to_string(a.cols()) + ")");
}

struct SignState {
  BinaryObservation signs;
  Index mismatches;
};

SignState sign_state(const Matrix& a, const Vector& x, const BinaryObservation& b) {
  auto signs = sign_quantize(sparse_matvec(a, x));
  Index mismatches = 0;
  for (Index i = 0; i < b.size(); ++i) mismatches += signs[i] != b[i];
  return {std::move(signs), mismatches};
}

// x + (tau/m) A^T (b - q), summing only the rows where b and q disagree.
Vector corrected(const Matrix& a, const Vector& x, const BinaryObservation& b,
                 const BinaryObservation& q, double tau) {
  Vector grad = Vector::Zero(a.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    const int diff = b[i] - q[i];
    if (diff != 0) grad.noalias() += static_cast<double>(diff) * a.row(i).transpose();
  }
  return x + (tau / static_cast<double>(a.rows())) * grad;
}

Vector back_projection(const Matrix& a, const Vector& data, double scale) {
  return scale * (a.transpose() * data);
}

Vector initial_point(const MeasurementEnsemble& a, const AlgorithmConfig& cfg,
                     const Vector& back_projected, bool unit) {
  struct Visitor {
    const MeasurementEnsemble& a;
    const AlgorithmConfig& cfg;
    const Vector& back_projected;
    bool unit;
    Vector operator()(const RandomSparseInit& init) const {
      return gen_sparse_signal(init.seed, a.cols(), cfg.sparsity).values();
    }
    Vector operator()(const MatchedFilterInit&) const {
      Vector x = hard_threshold(back_projected, cfg.sparsity);
      return unit ? normalize(x) : x;
    }
    Vector operator()(const ProvidedInit& init) const {
      if (init.x0.size() != a.cols())
        throw InvalidArgument("provided initialization has length " +
                              std::to_string(init.x0.size()) + ", expected " +
                              std::to_string(a.cols()));
      Vector x = hard_threshold(init.x0, cfg.sparsity);
      return unit ? normalize(x) : x;
    }
  };
  return std::visit(Visitor{a, cfg, back_projected, unit}, cfg.init);
}

class TraceRecorder {
 public:
  TraceRecorder(IterateTrace& trace, const std::optional<UnitSparseVector>& truth, bool unit)
      : trace_(trace), truth_(truth), unit_(unit) {}

  void push(const Vector& x, double agreement) {
    trace_.iterates.push_back(x);
    trace_.sign_agreement.push_back(agreement);
    if (truth_) {
      const double err = unit_ || x.norm() == 0.0 ? l2_error(x, truth_->values())
                                                  : l2_error(x / x.norm(), truth_->values());
      trace_.errors_vs_truth.push_back(err);
    }
  }

 private:
  IterateTrace& trace_;
  const std::optional<UnitSparseVector>& truth_;
  bool unit_;
};

double agreement_of(Index mismatches, Index m) {
  return 1.0 - static_cast<double>(mismatches) / static_cast<double>(m);
}

// Shared loop for NBIHT (normalized) and BIHT (raw iterates).
IterateTrace binary_iht(const MeasurementEnsemble& a, const BinaryObservation& b,
                        const AlgorithmConfig& cfg, const std::optional<UnitSparseVector>& truth,
                        bool normalized, const char* who) {
  cfg.validate();
  check_dimensions(a, b.size(), cfg.sparsity, who);
  if (truth && truth->size() != a.cols()) throw InvalidArgument(std::string(who) + ": truth length");
  const Matrix& mat = a.matrix();
  const Index m = a.rows();

  Vector back;
  if (std::holds_alternative<MatchedFilterInit>(cfg.init))
    back = back_projection(mat, b.as_vector(), cfg.step_size / static_cast<double>(m));
  Vector x = initial_point(a, cfg, back, /*unit=*/true);

  IterateTrace trace;
  TraceRecorder recorder(trace, truth, normalized);
  SignState state = sign_state(mat, x, b);
  recorder.push(x, agreement_of(state.mismatches, m));

  trace.stop_reason = StopReason::max_iters;
  for (int it = 0; it < cfg.max_iters; ++it) {
    if (state.mismatches == 0) {
      trace.stop_reason = StopReason::converged;
      break;
    }
    Vector next = hard_threshold(corrected(mat, x, b, state.signs, cfg.step_size), cfg.sparsity);
    if (next.norm() == 0.0) {
      if (cfg.degenerate_policy == DegeneratePolicy::fail)
        throw DegenerateIterate(std::string(who) + ": thresholded iterate is zero at iteration " +
                                std::to_string(it + 1));
      trace.stop_reason = StopReason::degenerate;
      break;
    }
    if (normalized) next /= next.norm();
    const double movement = (next - x).norm();
    x = std::move(next);
    state = sign_state(mat, x, b);
    recorder.push(x, agreement_of(state.mismatches, m));
    if (movement < cfg.stop_tol) {
      trace.stop_reason = StopReason::converged;
      break;
    }
  }
  trace.estimate = normalized ? x : normalize(x);
  return trace;
}

}  // namespace

UnitSparseVector nbiht_step(const MeasurementEnsemble& a, const BinaryObservation& b,
                            const UnitSparseVector& x_k, double tau, Index s,
                            DegeneratePolicy policy) {
  check_dimensions(a, b.size(), s, "nbiht_step");
  if (x_k.size() != a.cols()) throw InvalidArgument("nbiht_step: iterate length does not match N");
  if (!(tau >= 0.0)) throw InvalidArgument("nbiht_step: step size must be nonnegative");
  const SignState state = sign_state(a.matrix(), x_k.values(), b);
  Vector next = hard_threshold(corrected(a.matrix(), x_k.values(), b, state.signs, tau), s);
  if (next.norm() == 0.0) {
    if (policy == DegeneratePolicy::fail)
      throw DegenerateIterate("nbiht_step: thresholded iterate is zero");
    return x_k;
  }
  return UnitSparseVector(SparseVector(normalize(next), s));
}

IterateTrace nbiht_run(const MeasurementEnsemble& a, const BinaryObservation& b,
                       const AlgorithmConfig& cfg, const std::optional<UnitSparseVector>& truth) {
  return binary_iht(a, b, cfg, truth, /*normalized=*/true, "nbiht_run");
}

IterateTrace biht_run(const MeasurementEnsemble& a, const BinaryObservation& b,
                      const AlgorithmConfig& cfg, const std::optional<UnitSparseVector>& truth) {
  return binary_iht(a, b, cfg, truth, /*normalized=*/false, "biht_run");
}

IterateTrace iht_run(const MeasurementEnsemble& a, const Vector& y, const AlgorithmConfig& cfg,
                     const std::optional<UnitSparseVector>& truth) {
  cfg.validate();
  check_dimensions(a, y.size(), cfg.sparsity, "iht_run");
  if (truth && truth->size() != a.cols()) throw InvalidArgument("iht_run: truth length");
  const Matrix& mat = a.matrix();
  const Index m = a.rows();
  const double inv_m = 1.0 / static_cast<double>(m);
  const auto target_signs = sign_quantize(y);

  Vector back;
  if (std::holds_alternative<MatchedFilterInit>(cfg.init)) back = back_projection(mat, y, inv_m);
  Vector x = initial_point(a, cfg, back, /*unit=*/false);

  IterateTrace trace;
  const auto record = [&](const Vector& v, const Vector& ax) {
    trace.iterates.push_back(v);
    trace.sign_agreement.push_back(1.0 - hamming_distance(sign_quantize(ax), target_signs));
    if (truth) trace.errors_vs_truth.push_back(l2_error(v, truth->values()));
  };

  Vector ax = sparse_matvec(mat, x);
  record(x, ax);
  trace.stop_reason = StopReason::max_iters;
  for (int it = 0; it < cfg.max_iters; ++it) {
    const Vector residual = y - ax;
    if (residual.squaredNorm() == 0.0) {
      trace.stop_reason = StopReason::converged;
      break;
    }
    Vector next = hard_threshold(x + inv_m * (mat.transpose() * residual), cfg.sparsity);
    const double movement = (next - x).norm();
    x = std::move(next);
    ax = sparse_matvec(mat, x);
    record(x, ax);
    if (movement < cfg.stop_tol) {
      trace.stop_reason = StopReason::converged;
      break;
    }
  }
  trace.estimate = x;
  return trace;
}

UnitSparseVector one_shot_estimate(const MeasurementEnsemble& a, const BinaryObservation& b,
                                   Index s, double tau) {
  check_dimensions(a, b.size(), s, "one_shot_estimate");
  const Vector back =
      back_projection(a.matrix(), b.as_vector(), tau / static_cast<double>(a.rows()));
  const Vector thresholded = hard_threshold(back, s);
  if (thresholded.norm() == 0.0)
    throw DegenerateIterate("one_shot_estimate: thresholded back-projection is zero");
  return UnitSparseVector(SparseVector(normalize(thresholded), s));
}

}  // namespace onebit
