#ifndef ONEBIT_CORE_MODEL_HPP
#define ONEBIT_CORE_MODEL_HPP

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace onebit {

using Vector = Eigen::VectorXd;
// Rows are the measurement vectors a_i.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Index = Eigen::Index;

class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Thresholding or normalization produced the zero vector.
class DegenerateIterate : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SamplingExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// SplitMix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed of substream `stream_index` under `master_seed`:
/// splitmix64(master_seed ^ splitmix64(stream_index + 0x9E3779B97F4A7C15)).
std::uint64_t split_seed(std::uint64_t master_seed, std::uint64_t stream_index) noexcept;

/// Deterministic random stream. The engine is std::mt19937_64 (its output
/// sequence is fixed by the standard), seeded with split_seed(master, index).
/// Uniforms take the top 53 bits; normals use the Marsaglia polar method.
/// No std::*_distribution is used, so draws are identical across standard
/// libraries.
class RngStream {
 public:
  static constexpr std::string_view algorithm_name =
      "mt19937_64;seed=splitmix64(master^splitmix64(index+golden));uniform=top53bits;"
      "normal=marsaglia-polar";

  explicit RngStream(std::uint64_t master_seed, std::uint64_t stream_index = 0);

  std::uint64_t master_seed() const noexcept { return master_seed_; }
  std::uint64_t stream_index() const noexcept { return stream_index_; }

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1).
  double uniform();
  /// Uniform integer on [0, n), n >= 1, by rejection (no modulo bias).
  std::uint64_t uniform_index(std::uint64_t n);
  double gaussian();

 private:
  std::uint64_t master_seed_;
  std::uint64_t stream_index_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// A length-N vector with at most `sparsity_budget` nonzero entries.
class SparseVector {
 public:
  SparseVector(Vector values, Index sparsity_budget);

  const Vector& values() const noexcept { return values_; }
  Index sparsity_budget() const noexcept { return budget_; }
  Index size() const noexcept { return values_.size(); }
  Index nonzeros() const noexcept;

 private:
  Vector values_;
  Index budget_;
};

/// SparseVector on the unit sphere (relative tolerance 1e-12).
class UnitSparseVector {
 public:
  explicit UnitSparseVector(SparseVector inner);

  const SparseVector& inner() const noexcept { return inner_; }
  const Vector& values() const noexcept { return inner_.values(); }
  Index sparsity_budget() const noexcept { return inner_.sparsity_budget(); }
  Index size() const noexcept { return inner_.size(); }

 private:
  SparseVector inner_;
};

class MeasurementEnsemble {
 public:
  explicit MeasurementEnsemble(Matrix matrix, std::uint64_t seed = 0);

  const Matrix& matrix() const noexcept { return matrix_; }
  std::uint64_t seed() const noexcept { return seed_; }
  Index rows() const noexcept { return matrix_.rows(); }
  Index cols() const noexcept { return matrix_.cols(); }

 private:
  Matrix matrix_;
  std::uint64_t seed_;
};

/// Vector of one-bit measurements, every entry exactly -1 or +1.
class BinaryObservation {
 public:
  explicit BinaryObservation(std::vector<std::int8_t> bits);

  const std::vector<std::int8_t>& bits() const noexcept { return bits_; }
  Index size() const noexcept { return static_cast<Index>(bits_.size()); }
  std::int8_t operator[](Index i) const { return bits_[static_cast<std::size_t>(i)]; }
  Vector as_vector() const;

  friend bool operator==(const BinaryObservation&, const BinaryObservation&) = default;

 private:
  std::vector<std::int8_t> bits_;
};

enum class SupportRule { uniform_random, first_s };
enum class ValueRule { gaussian, rademacher, flat };

std::string to_string(SupportRule rule);
std::string to_string(ValueRule rule);
SupportRule parse_support_rule(std::string_view name);
ValueRule parse_value_rule(std::string_view name);

/// m x N matrix of i.i.d. standard normals, filled row by row from
/// RngStream(seed, 0).
MeasurementEnsemble gen_gaussian_matrix(std::uint64_t seed, Index m, Index n);

/// Unit-norm vector with exactly s nonzeros.
UnitSparseVector gen_sparse_signal(std::uint64_t seed, Index n, Index s,
                                   SupportRule support_rule = SupportRule::uniform_random,
                                   ValueRule value_rule = ValueRule::gaussian);

/// Same draw as gen_sparse_signal, taken from an existing stream.
UnitSparseVector draw_sparse_signal(RngStream& rng, Index n, Index s,
                                    SupportRule support_rule = SupportRule::uniform_random,
                                    ValueRule value_rule = ValueRule::gaussian);

/// Elementwise sign with sign(0) = -1.
BinaryObservation sign_quantize(const Vector& v);

/// sign(Ax + e), e ~ N(0, noise_std^2) i.i.d. from RngStream(noise_seed, 0).
BinaryObservation measure(const MeasurementEnsemble& a, const Vector& x, double noise_std = 0.0,
                          std::uint64_t noise_seed = 0);

}  // namespace onebit

#endif  // ONEBIT_CORE_MODEL_HPP
