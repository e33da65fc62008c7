#include "onebit/sparse_ops.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace onebit {

Support::Support(std::vector<Index> indices) : indices_(std::move(indices)) {
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    if (indices_[i] < 0) throw InvalidArgument("Support: negative index");
    if (i > 0 && indices_[i] <= indices_[i - 1])
      throw InvalidArgument("Support: indices must be strictly increasing");
  }
}

bool Support::contains(Index i) const {
  return std::binary_search(indices_.begin(), indices_.end(), i);
}

Support top_support(const Vector& v, Index k) {
  k = std::clamp<Index>(k, 0, v.size());
  std::vector<Index> order(static_cast<std::size_t>(v.size()));
  std::iota(order.begin(), order.end(), Index{0});
  // Strict total order: larger magnitude first, then lower index.
  const auto before = [&v](Index a, Index b) {
    const double ma = std::abs(v[a]);
    const double mb = std::abs(v[b]);
    return ma > mb || (ma == mb && a < b);
  };
  if (k < v.size()) std::nth_element(order.begin(), order.begin() + k, order.end(), before);
  order.resize(static_cast<std::size_t>(k));
  std::sort(order.begin(), order.end());
  return Support(std::move(order));
}

Vector hard_threshold(const Vector& v, Index s) {
  if (s < 1 || s > v.size())
    throw InvalidArgument("hard_threshold: need 1 <= s <= " + std::to_string(v.size()) +
                          " (s=" + std::to_string(s) + ")");
  Vector out = Vector::Zero(v.size());
  const Support keep = top_support(v, s);
  for (const Index i : keep.indices()) out[i] = v[i];
  return out;
}

Vector normalize(const Vector& v) {
  const double norm = v.norm();
  if (!(norm > 0.0)) throw DegenerateIterate("normalize: zero vector");
  return v / norm;
}

double sparse_dual_norm(const Vector& v, Index s) {
  if (s < 1) throw InvalidArgument("sparse_dual_norm: s must be >= 1");
  const Index k = std::min<Index>(2 * s, v.size());
  double sum = 0.0;
  const Support top = top_support(v, k);
  for (const Index i : top.indices()) sum += v[i] * v[i];
  return std::sqrt(sum);
}

namespace {

void require_unit(const Vector& v, const char* name) {
  if (!(std::abs(v.norm() - 1.0) <= 1e-9))
    throw InvalidArgument(std::string("geodesic_distance: ") + name + " is not a unit vector");
}

}  // namespace

double geodesic_distance(const Vector& x, const Vector& y) {
  if (x.size() != y.size()) throw InvalidArgument("geodesic_distance: length mismatch");
  require_unit(x, "x");
  require_unit(y, "y");
  // Same angle as acos(<x, y>) on the sphere, without its loss of precision near +-1.
  return 2.0 * std::atan2((x - y).norm(), (x + y).norm()) / std::numbers::pi;
}

double hamming_distance(const BinaryObservation& b1, const BinaryObservation& b2) {
  if (b1.size() != b2.size()) throw InvalidArgument("hamming_distance: length mismatch");
  if (b1.size() == 0) return 0.0;
  Index differ = 0;
  for (Index i = 0; i < b1.size(); ++i) differ += b1[i] != b2[i];
  return static_cast<double>(differ) / static_cast<double>(b1.size());
}

double l2_error(const Vector& x, const Vector& y) {
  if (x.size() != y.size()) throw InvalidArgument("l2_error: length mismatch");
  return (x - y).norm();
}

Vector sparse_matvec(const Matrix& a, const Vector& x) {
  if (x.size() != a.cols()) throw InvalidArgument("sparse_matvec: length mismatch");
  Vector out = Vector::Zero(a.rows());
  for (Index j = 0; j < x.size(); ++j)
    if (x[j] != 0.0) out.noalias() += x[j] * a.col(j);
  return out;
}

Vector sparse_rmatvec(const Matrix& a, const Vector& r) {
  if (r.size() != a.rows()) throw InvalidArgument("sparse_rmatvec: length mismatch");
  Vector out = Vector::Zero(a.cols());
  for (Index i = 0; i < r.size(); ++i)
    if (r[i] != 0.0) out.noalias() += r[i] * a.row(i).transpose();
  return out;
}

}  // namespace onebit
