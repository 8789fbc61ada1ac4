#pragma once

// Exact 2x2 complex linear algebra for spin-1/2 states and SU(2) unitaries:
// density operators, the (xi, delta, zeta) angle parametrization and its
// inverse, axis rotations, unitary channels, and the Bloch/SO(3) pictures.
// Basis ordering is {|+z>, |-z>} throughout.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include "su2pol/errors.hpp"

namespace su2pol {

template <typename Scalar = double>
using Complex = std::complex<Scalar>;
template <typename Scalar = double>
using Matrix2c = Eigen::Matrix<std::complex<Scalar>, 2, 2>;
template <typename Scalar = double>
using Vector2c = Eigen::Matrix<std::complex<Scalar>, 2, 1>;
template <typename Scalar = double>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar = double>
using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;

// Tolerance for structural matrix invariants (hermiticity, unitarity, ...).
template <typename Scalar>
inline constexpr Scalar structural_tol = Scalar(1e-12);

template <typename Scalar = double>
inline constexpr Scalar pi = std::numbers::pi_v<Scalar>;

template <typename Scalar>
Matrix2c<Scalar> pauli(int axis) {
  using C = Complex<Scalar>;
  Matrix2c<Scalar> m;
  switch (axis) {
    case 0: m << C(0, 0), C(1, 0), C(1, 0), C(0, 0); break;
    case 1: m << C(0, 0), C(0, -1), C(0, 1), C(0, 0); break;
    case 2: m << C(1, 0), C(0, 0), C(0, 0), C(-1, 0); break;
    default: throw std::domain_error("pauli: axis must be 0, 1 or 2");
  }
  return m;
}

template <typename Scalar = double>
Vector2c<Scalar> spin_up() {
  return Vector2c<Scalar>(Complex<Scalar>(1, 0), Complex<Scalar>(0, 0));
}

template <typename Scalar = double>
Vector2c<Scalar> spin_down() {
  return Vector2c<Scalar>(Complex<Scalar>(0, 0), Complex<Scalar>(1, 0));
}

// Spin coherent state |n>: eigenvector of n.sigma with eigenvalue +1.
template <typename Scalar>
Vector2c<Scalar> spinor_along(const Vector3<Scalar>& n) {
  const Scalar rho = std::hypot(n.x(), n.y());
  const Scalar theta = std::atan2(rho, n.z());
  const Scalar phi = std::atan2(n.y(), n.x());
  Vector2c<Scalar> v;
  v << Complex<Scalar>(std::cos(theta / 2), 0),
      std::polar(std::sin(theta / 2), phi);
  return v;
}

// Maps angles returned by std::arg/atan2 into (-pi, pi].
template <typename Scalar>
Scalar canonical_angle(Scalar a) {
  if (a <= -pi<Scalar>) a += 2 * pi<Scalar>;
  return a;
}

template <typename Scalar>
Scalar wrap_two_pi(Scalar a) {
  a = std::fmod(a, 2 * pi<Scalar>);
  if (a < Scalar(0)) a += 2 * pi<Scalar>;
  return a;
}

template <typename Scalar>
bool all_finite(const Matrix2c<Scalar>& m) {
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
  return true;
}

// The SU(2) angles: xi in [0, pi/2], delta and zeta in (-pi, pi].
// With xi restricted to the first quadrant, cos(xi) >= 0, which pins the
// branch of the associated phase definitions.
template <typename Scalar = double>
struct SU2Params {
  Scalar xi;
  Scalar delta;
  Scalar zeta;

  SU2Params(Scalar xi_, Scalar delta_, Scalar zeta_) : xi(xi_), delta(delta_), zeta(zeta_) {
    if (!(xi >= Scalar(0) && xi <= pi<Scalar> / 2))
      throw std::domain_error("SU2Params: xi must lie in [0, pi/2]");
    if (!(delta > -pi<Scalar> && delta <= pi<Scalar>))
      throw std::domain_error("SU2Params: delta must lie in (-pi, pi]");
    if (!(zeta > -pi<Scalar> && zeta <= pi<Scalar>))
      throw std::domain_error("SU2Params: zeta must lie in (-pi, pi]");
  }
};

// 2x2 special unitary, validated on construction: U U^dagger = 1 and det U = +1
// within structural_tol.
template <typename Scalar = double>
class SU2Matrix {
 public:
  template <typename Derived>
  explicit SU2Matrix(const Eigen::MatrixBase<Derived>& m) : mat_(m) {
    validate();
  }

  static SU2Matrix identity() { return SU2Matrix(Matrix2c<Scalar>::Identity()); }

  const Matrix2c<Scalar>& matrix() const { return mat_; }

  SU2Matrix adjoint() const { return SU2Matrix(mat_.adjoint()); }

  friend SU2Matrix operator*(const SU2Matrix& a, const SU2Matrix& b) {
    return SU2Matrix(a.mat_ * b.mat_);
  }

 private:
  void validate() const {
    if (!all_finite(mat_)) throw std::invalid_argument("SU2Matrix: non-finite entries");
    const Matrix2c<Scalar> dev = mat_.adjoint() * mat_ - Matrix2c<Scalar>::Identity();
    if (dev.cwiseAbs().maxCoeff() > structural_tol<Scalar>)
      throw std::invalid_argument("SU2Matrix: matrix is not unitary");
    if (std::abs(mat_.determinant() - Complex<Scalar>(1, 0)) > structural_tol<Scalar>)
      throw std::invalid_argument("SU2Matrix: determinant is not +1");
  }

  Matrix2c<Scalar> mat_;
};

// Spin-1/2 density operator: Hermitian, unit trace, positive semidefinite
// (all within structural_tol).
template <typename Scalar = double>
class DensityOperator {
 public:
  template <typename Derived>
  explicit DensityOperator(const Eigen::MatrixBase<Derived>& m) : mat_(m) {
    validate();
  }

  const Matrix2c<Scalar>& matrix() const { return mat_; }

 private:
  void validate() const {
    if (!all_finite(mat_)) throw std::invalid_argument("DensityOperator: non-finite entries");
    const Matrix2c<Scalar> dev = mat_ - mat_.adjoint().eval();
    if (dev.cwiseAbs().maxCoeff() > structural_tol<Scalar>)
      throw std::invalid_argument("DensityOperator: matrix is not Hermitian");
    if (std::abs(mat_.trace() - Complex<Scalar>(1, 0)) > structural_tol<Scalar>)
      throw std::invalid_argument("DensityOperator: trace is not 1");
    // For a Hermitian unit-trace 2x2 matrix the eigenvalues are (1 +- |s|)/2,
    // s being the Bloch vector, so positivity reduces to |s| <= 1.
    const Scalar sx = 2 * mat_(1, 0).real();
    const Scalar sy = 2 * mat_(1, 0).imag();
    const Scalar sz = mat_(0, 0).real() - mat_(1, 1).real();
    const Scalar s = std::sqrt(sx * sx + sy * sy + sz * sz);
    if ((1 - s) / 2 < -structural_tol<Scalar>)
      throw std::invalid_argument("DensityOperator: negative eigenvalue");
  }

  Matrix2c<Scalar> mat_;
};

// rho = (1 + r sigma_z)/2 for a beam polarized along +z with degree r.
template <typename Scalar>
DensityOperator<Scalar> density_from_polarization(Scalar r) {
  if (!(r >= Scalar(0) && r <= Scalar(1)))
    throw std::domain_error("density_from_polarization: r must lie in [0, 1]");
  Matrix2c<Scalar> m = Matrix2c<Scalar>::Zero();
  m(0, 0) = Complex<Scalar>((1 + r) / 2, 0);
  m(1, 1) = Complex<Scalar>((1 - r) / 2, 0);
  return DensityOperator<Scalar>(m);
}

// U = [[e^{i delta} cos xi, -e^{-i zeta} sin xi],
//      [e^{i zeta}  sin xi,  e^{-i delta} cos xi]]
template <typename Scalar>
SU2Matrix<Scalar> su2_from_params(const SU2Params<Scalar>& p) {
  const Scalar c = std::cos(p.xi);
  const Scalar s = std::sin(p.xi);
  Matrix2c<Scalar> m;
  m(0, 0) = std::polar(c, p.delta);
  m(0, 1) = -std::polar(s, -p.zeta);
  m(1, 0) = std::polar(s, p.zeta);
  m(1, 1) = std::polar(c, -p.delta);
  return SU2Matrix<Scalar>(m);
}

// Inverse of su2_from_params. Branches: xi = arccos|U00| in [0, pi/2];
// on the degenerate lines (xi = 0 leaves zeta free, xi = pi/2 leaves delta
// free) the undetermined angle comes out as 0.
template <typename Scalar>
SU2Params<Scalar> params_from_su2(const SU2Matrix<Scalar>& u) {
  const Complex<Scalar> a = u.matrix()(0, 0);
  const Complex<Scalar> b = u.matrix()(1, 0);
  const Scalar xi = std::acos(std::clamp(std::abs(a), Scalar(0), Scalar(1)));
  const Scalar delta = canonical_angle(std::arg(a));
  const Scalar zeta = canonical_angle(std::arg(b));
  return SU2Params<Scalar>(xi, delta, zeta);
}

// exp(-i angle (axis.sigma)/2). axis_rotation(y, pi/2) sends |+z> to
// (|+z> + |-z>)/sqrt(2), and the induced Bloch rotation is right-handed.
template <typename Scalar>
SU2Matrix<Scalar> axis_rotation(const Vector3<Scalar>& axis, Scalar angle) {
  if (std::abs(axis.norm() - Scalar(1)) > structural_tol<Scalar>)
    throw std::domain_error("axis_rotation: axis must be a unit vector");
  const Scalar c = std::cos(angle / 2);
  const Scalar s = std::sin(angle / 2);
  Matrix2c<Scalar> m;
  m(0, 0) = Complex<Scalar>(c, -s * axis.z());
  m(0, 1) = Complex<Scalar>(-s * axis.y(), -s * axis.x());
  m(1, 0) = Complex<Scalar>(s * axis.y(), -s * axis.x());
  m(1, 1) = Complex<Scalar>(c, s * axis.z());
  return SU2Matrix<Scalar>(m);
}

// Unitary channel rho -> U rho U^dagger.
template <typename Scalar>
DensityOperator<Scalar> evolve(const DensityOperator<Scalar>& rho, const SU2Matrix<Scalar>& u) {
  return DensityOperator<Scalar>(u.matrix() * rho.matrix() * u.matrix().adjoint());
}

// Bloch vector s = (Tr rho sigma_x, Tr rho sigma_y, Tr rho sigma_z).
template <typename Scalar>
Vector3<Scalar> bloch_of(const DensityOperator<Scalar>& rho) {
  const Matrix2c<Scalar>& m = rho.matrix();
  return Vector3<Scalar>(2 * m(1, 0).real(), 2 * m(1, 0).imag(),
                         m(0, 0).real() - m(1, 1).real());
}

// The SO(3) rotation R with U (n.sigma) U^dagger = (R n).sigma.
template <typename Scalar>
Matrix3<Scalar> so3_of(const SU2Matrix<Scalar>& u) {
  Matrix3<Scalar> r;
  for (int j = 0; j < 3; ++j) {
    // U sigma_j U^dagger is traceless Hermitian, i.e. a.sigma with a = R e_j.
    const Matrix2c<Scalar> m = u.matrix() * pauli<Scalar>(j) * u.matrix().adjoint();
    r(0, j) = m(1, 0).real();
    r(1, j) = m(1, 0).imag();
    r(2, j) = (m(0, 0).real() - m(1, 1).real()) / 2;
  }
  return r;
}

}  // namespace su2pol
