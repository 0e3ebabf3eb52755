// Copyright 2026 The spherclt Authors
// SPDX-License-Identifier: Apache-2.0
//
// Points on the unit sphere S_{n-1} and the tangent projector
// sigma(x) = Id - x x^T, with its algebraic identities:
//
//   sigma(x) x = 0,        sigma(x) y = y  (y orthogonal to x),
//   sigma(x)^2 = sigma(x), sigma(x) m = m - (m.x) x,
//   (sigma(x) m).(sigma(x) m') = m.m' - (m.x)(m'.x).
//
// The matrix-free forms are the hot path of the simulator (O(n) per step);
// the dense matrix exists for tests and for covariance assembly.

#ifndef SPHERCLT_GEOMETRY_HPP
#define SPHERCLT_GEOMETRY_HPP

#include <Eigen/Dense>
#include <cmath>
#include <utility>

#include "spherclt/errors.hpp"

namespace spherclt {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

inline constexpr double kUnitNormTolerance = 1e-12;

// A point on S_{n-1}. Construction rejects vectors whose norm deviates from 1
// by more than 1e-12 instead of silently renormalizing: a simulator that
// drifts off the sphere should fail loudly, not be patched up. Use
// normalize() when renormalization is the intent.
template <typename Scalar = double>
class UnitVector {
 public:
  explicit UnitVector(VectorX<Scalar> coords) : coords_(std::move(coords)) {
    if (coords_.size() < 2) {
      throw InvalidInput("UnitVector: dimension must be >= 2");
    }
    const Scalar norm = coords_.norm();
    if (!(std::abs(norm - Scalar(1)) <= Scalar(kUnitNormTolerance))) {
      throw InvalidInput("UnitVector: |coords| deviates from 1 beyond 1e-12");
    }
  }

  const VectorX<Scalar>& coords() const { return coords_; }
  Eigen::Index dim() const { return coords_.size(); }

  Scalar operator[](Eigen::Index i) const { return coords_[i]; }

 private:
  VectorX<Scalar> coords_;
};

// v / |v|; rejects near-zero input rather than returning garbage.
template <typename Derived>
UnitVector<typename Derived::Scalar> normalize(
    const Eigen::MatrixBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  const Scalar norm = v.norm();
  if (!std::isfinite(static_cast<double>(norm))) {
    throw InvalidInput("normalize: non-finite input");
  }
  if (norm <= Scalar(1e-300)) {
    throw DegenerateInput("normalize: vector too close to zero");
  }
  return UnitVector<Scalar>(v / norm);
}

// Dense tangent projector sigma(x) = Id - x x^T (symmetric, idempotent,
// rank n-1).
template <typename Scalar>
MatrixX<Scalar> projection_matrix(const UnitVector<Scalar>& x) {
  const auto& c = x.coords();
  MatrixX<Scalar> p = MatrixX<Scalar>::Identity(x.dim(), x.dim());
  p.noalias() -= c * c.transpose();
  // Symmetrize exactly; the outer product is symmetric in exact arithmetic
  // but rounding may differ across (i,j)/(j,i).
  p = ((p + p.transpose()) / Scalar(2)).eval();
  return p;
}

// Matrix-free sigma(x) m = m - (m.x) x.
template <typename Scalar, typename Derived>
VectorX<Scalar> apply_projection(const UnitVector<Scalar>& x,
                                 const Eigen::MatrixBase<Derived>& m) {
  if (m.size() != x.dim()) {
    throw InvalidInput("apply_projection: dimension mismatch");
  }
  const auto& c = x.coords();
  return m - (c.dot(m)) * c;
}

// (sigma(x) m).(sigma(x) m') evaluated without forming either projection:
// m.m' - (m.x)(m'.x).
template <typename Scalar, typename DerivedA, typename DerivedB>
Scalar tangent_gram(const UnitVector<Scalar>& x,
                    const Eigen::MatrixBase<DerivedA>& m,
                    const Eigen::MatrixBase<DerivedB>& m2) {
  if (m.size() != x.dim() || m2.size() != x.dim()) {
    throw InvalidInput("tangent_gram: dimension mismatch");
  }
  const auto& c = x.coords();
  return m.dot(m2) - c.dot(m) * c.dot(m2);
}

namespace detail {

// In-place tangent projection on raw vectors; no UnitVector validation.
// Used by the step loop where the state is maintained unit-norm by
// construction.
template <typename Scalar>
void project_tangent_inplace(const VectorX<Scalar>& x, VectorX<Scalar>& m) {
  m -= x.dot(m) * x;
}

}  // namespace detail

using UnitVectorXd = UnitVector<double>;

}  // namespace spherclt

#endif  // SPHERCLT_GEOMETRY_HPP
