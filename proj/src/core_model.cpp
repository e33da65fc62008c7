#include "onebit/core_model.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace onebit {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t split_seed(std::uint64_t master_seed, std::uint64_t stream_index) noexcept {
  return splitmix64(master_seed ^ splitmix64(stream_index + 0x9E3779B97F4A7C15ULL));
}

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_index)
    : master_seed_(master_seed),
      stream_index_(stream_index),
      engine_(split_seed(master_seed, stream_index)) {}

double RngStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t RngStream::uniform_index(std::uint64_t n) {
  if (n == 0) throw InvalidArgument("uniform_index: n must be positive");
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t draw;
  do {
    draw = engine_();
  } while (draw >= limit);
  return draw % n;
}

double RngStream::gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, q;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    q = u * u + v * v;
  } while (q >= 1.0 || q == 0.0);
  const double f = std::sqrt(-2.0 * std::log(q) / q);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

SparseVector::SparseVector(Vector values, Index sparsity_budget)
    : values_(std::move(values)), budget_(sparsity_budget) {
  if (budget_ < 1) throw InvalidArgument("SparseVector: sparsity budget must be >= 1");
  if (values_.size() < budget_)
    throw InvalidArgument("SparseVector: length " + std::to_string(values_.size()) +
                          " is smaller than sparsity budget " + std::to_string(budget_));
  if (nonzeros() > budget_)
    throw InvalidArgument("SparseVector: " + std::to_string(nonzeros()) +
                          " nonzeros exceed budget " + std::to_string(budget_));
}

Index SparseVector::nonzeros() const noexcept {
  return (values_.array() != 0.0).count();
}

UnitSparseVector::UnitSparseVector(SparseVector inner) : inner_(std::move(inner)) {
  const double norm = inner_.values().norm();
  if (!(std::abs(norm - 1.0) <= 1e-12))
    throw InvalidArgument("UnitSparseVector: norm " + std::to_string(norm) + " is not 1");
}

MeasurementEnsemble::MeasurementEnsemble(Matrix matrix, std::uint64_t seed)
    : matrix_(std::move(matrix)), seed_(seed) {
  if (matrix_.rows() < 1 || matrix_.cols() < 1)
    throw InvalidArgument("MeasurementEnsemble: dimensions must be positive");
}

BinaryObservation::BinaryObservation(std::vector<std::int8_t> bits) : bits_(std::move(bits)) {
  for (const auto b : bits_)
    if (b != 1 && b != -1) throw InvalidArgument("BinaryObservation: entries must be -1 or +1");
}

Vector BinaryObservation::as_vector() const {
  Vector out(size());
  for (Index i = 0; i < size(); ++i) out[i] = (*this)[i];
  return out;
}

std::string to_string(SupportRule rule) {
  return rule == SupportRule::uniform_random ? "uniform_random" : "first_s";
}

std::string to_string(ValueRule rule) {
  switch (rule) {
    case ValueRule::gaussian: return "gaussian";
    case ValueRule::rademacher: return "rademacher";
    case ValueRule::flat: return "flat";
  }
  return "unknown";
}

SupportRule parse_support_rule(std::string_view name) {
  if (name == "uniform_random") return SupportRule::uniform_random;
  if (name == "first_s") return SupportRule::first_s;
  throw InvalidArgument("unknown support rule: " + std::string(name));
}

ValueRule parse_value_rule(std::string_view name) {
  if (name == "gaussian") return ValueRule::gaussian;
  if (name == "rademacher") return ValueRule::rademacher;
  if (name == "flat") return ValueRule::flat;
  throw InvalidArgument("unknown value rule: " + std::string(name));
}

MeasurementEnsemble gen_gaussian_matrix(std::uint64_t seed, Index m, Index n) {
  if (m < 1 || n < 1)
    throw InvalidArgument("gen_gaussian_matrix: dimensions must be positive (m=" +
                          std::to_string(m) + ", N=" + std::to_string(n) + ")");
  RngStream rng(seed, 0);
  Matrix a(m, n);
  double* data = a.data();
  for (Index k = 0; k < m * n; ++k) data[k] = rng.gaussian();
  return MeasurementEnsemble(std::move(a), seed);
}

UnitSparseVector draw_sparse_signal(RngStream& rng, Index n, Index s, SupportRule support_rule,
                                    ValueRule value_rule) {
  if (s < 1 || s > n)
    throw InvalidArgument("gen_sparse_signal: need 1 <= s <= N (s=" + std::to_string(s) +
                          ", N=" + std::to_string(n) + ")");
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  if (support_rule == SupportRule::uniform_random) {
    // Partial Fisher-Yates: the first s slots become a uniform s-subset.
    for (Index i = 0; i < s; ++i) {
      const auto j = i + static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(n - i)));
      std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
    }
  }
  Vector values = Vector::Zero(n);
  for (Index i = 0; i < s; ++i) {
    double v = 1.0;
    switch (value_rule) {
      case ValueRule::gaussian:
        do {
          v = rng.gaussian();
        } while (v == 0.0);
        break;
      case ValueRule::rademacher:
        v = (rng.next_u64() >> 63) ? 1.0 : -1.0;
        break;
      case ValueRule::flat:
        break;
    }
    values[order[static_cast<std::size_t>(i)]] = v;
  }
  values /= values.norm();
  return UnitSparseVector(SparseVector(std::move(values), s));
}

UnitSparseVector gen_sparse_signal(std::uint64_t seed, Index n, Index s, SupportRule support_rule,
                                   ValueRule value_rule) {
  RngStream rng(seed, 0);
  return draw_sparse_signal(rng, n, s, support_rule, value_rule);
}

BinaryObservation sign_quantize(const Vector& v) {
  std::vector<std::int8_t> bits(static_cast<std::size_t>(v.size()));
  for (Index i = 0; i < v.size(); ++i) bits[static_cast<std::size_t>(i)] = v[i] > 0.0 ? 1 : -1;
  return BinaryObservation(std::move(bits));
}

BinaryObservation measure(const MeasurementEnsemble& a, const Vector& x, double noise_std,
                          std::uint64_t noise_seed) {
  if (x.size() != a.cols())
    throw InvalidArgument("measure: signal length " + std::to_string(x.size()) +
                          " does not match N=" + std::to_string(a.cols()));
  if (!(noise_std >= 0.0)) throw InvalidArgument("measure: noise_std must be nonnegative");
  Vector y = a.matrix() * x;
  if (noise_std > 0.0) {
    RngStream rng(noise_seed, 0);
    for (Index i = 0; i < y.size(); ++i) y[i] += noise_std * rng.gaussian();
  }
  return sign_quantize(y);
}

}  // namespace onebit
