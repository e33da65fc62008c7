#ifndef ONEBIT_SPARSE_OPS_HPP
#define ONEBIT_SPARSE_OPS_HPP

#include <vector>

#include "onebit/core_model.hpp"

namespace onebit {

/// Strictly increasing index set in [0, N).
class Support {
 public:
  Support() = default;
  explicit Support(std::vector<Index> indices);

  const std::vector<Index>& indices() const noexcept { return indices_; }
  std::size_t size() const noexcept { return indices_.size(); }
  bool contains(Index i) const;

 private:
  std::vector<Index> indices_;
};

/// Indices of the k largest-magnitude entries; ties go to the lower index.
/// k is capped at v.size().
Support top_support(const Vector& v, Index k);

/// Keeps the s largest-magnitude entries of v (lowest index wins ties) and
/// zeros the rest. Requires 1 <= s <= v.size().
Vector hard_threshold(const Vector& v, Index s);

/// v / ||v||_2. Throws DegenerateIterate on the zero vector.
Vector normalize(const Vector& v);

/// sup of <v, u> over 2s-sparse u with ||u||_2 <= 1, i.e. the Euclidean norm
/// of the 2s largest-magnitude entries (2s capped at v.size()).
double sparse_dual_norm(const Vector& v, Index s);

/// arccos(<x, y>) / pi for unit x, y (unit within 1e-9).
double geodesic_distance(const Vector& x, const Vector& y);

/// Fraction of disagreeing positions, (1/2m) ||b1 - b2||_1.
double hamming_distance(const BinaryObservation& b1, const BinaryObservation& b2);

double l2_error(const Vector& x, const Vector& y);

/// A x touching only the columns where x is nonzero.
Vector sparse_matvec(const Matrix& a, const Vector& x);

/// A^T r touching only the rows where r is nonzero.
Vector sparse_rmatvec(const Matrix& a, const Vector& r);

}  // namespace onebit

#endif  // ONEBIT_SPARSE_OPS_HPP
