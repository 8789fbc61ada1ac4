#pragma once

// Closed-form relative phase and visibility for pure and mixed spin-1/2
// states under SU(2) evolution, plus geodesic-polygon unitaries and the
// enclosed solid angle used for geometric-phase cross-checks.

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "su2pol/errors.hpp"
#include "su2pol/spin.hpp"

namespace su2pol {

// Phase/visibility magnitudes below this are treated as undefined: the
// argument of a near-zero complex amplitude carries no information.
template <typename Scalar>
inline constexpr Scalar degenerate_tol = Scalar(1e-12);

// phi = arg<+z|U|+z> in (-pi, pi], nu = |<+z|U|+z>|. When nu vanishes the
// phase is undefined and `defined` is false (phi is then meaningless).
template <typename Scalar = double>
struct PureReport {
  Scalar phi = 0;
  Scalar nu = 0;
  bool defined = false;
};

// Mixed-state relative phase Phi in (-pi/2, pi/2] and visibility V.
// Phi is a theory-side convenience; the polarimetric observable is cos^2 Phi,
// so Phi is reported modulo pi on the arctan branch.
template <typename Scalar = double>
struct MixedReport {
  Scalar Phi = 0;
  Scalar V = 0;
  bool defined = false;
};

template <typename Scalar>
PureReport<Scalar> pure_phase_visibility(const SU2Matrix<Scalar>& u) {
  const Complex<Scalar> a = u.matrix()(0, 0);
  PureReport<Scalar> rep;
  rep.nu = std::abs(a);
  rep.defined = rep.nu >= degenerate_tol<Scalar>;
  rep.phi = rep.defined ? canonical_angle(std::arg(a)) : Scalar(0);
  return rep;
}

// V e^{i Phi} = Tr(rho U) with rho = (1 + r sigma_z)/2, i.e. the
// polarization-weighted sum of the |+z> and |-z> phase factors. Phi is
// reduced modulo pi into (-pi/2, pi/2].
template <typename Scalar>
MixedReport<Scalar> mixed_phase_visibility(Scalar r, const SU2Matrix<Scalar>& u) {
  const DensityOperator<Scalar> rho = density_from_polarization(r);
  const Complex<Scalar> z = (rho.matrix() * u.matrix()).trace();
  MixedReport<Scalar> rep;
  rep.V = std::abs(z);
  rep.defined = rep.V >= degenerate_tol<Scalar>;
  if (rep.defined) {
    Scalar phi = std::arg(z);
    if (phi > pi<Scalar> / 2) phi -= pi<Scalar>;
    if (phi <= -pi<Scalar> / 2) phi += pi<Scalar>;
    rep.Phi = phi;
  }
  return rep;
}

// cos^2 Phi = 1/(1 + r^2 tan^2 delta), evaluated as
// cos^2/(cos^2 + r^2 sin^2) so delta = +-pi/2 hits its finite limit
// (0 for r > 0; 1 for r = 0, where the phase pattern is flat).
template <typename Scalar>
Scalar cos2_mixed_phase(Scalar r, Scalar delta) {
  if (!(r >= Scalar(0) && r <= Scalar(1)))
    throw std::domain_error("cos2_mixed_phase: r must lie in [0, 1]");
  const Scalar c = std::cos(delta);
  const Scalar s = std::sin(delta);
  if (std::abs(c) < Scalar(1e-15)) return r > Scalar(0) ? Scalar(0) : Scalar(1);
  return c * c / (c * c + r * r * s * s);
}

// Ordered Bloch-sphere vertices starting at +z. Consecutive vertices must be
// distinct and non-antipodal so each connecting great-circle arc is unique.
template <typename Scalar = double>
class GeodesicPath {
 public:
  explicit GeodesicPath(std::vector<Vector3<Scalar>> vertices) : vertices_(std::move(vertices)) {
    if (vertices_.empty()) throw std::invalid_argument("GeodesicPath: empty vertex list");
    for (auto& v : vertices_) {
      if (std::abs(v.norm() - Scalar(1)) > structural_tol<Scalar>)
        throw std::invalid_argument("GeodesicPath: vertices must be unit vectors");
      v.normalize();
    }
    if ((vertices_.front() - Vector3<Scalar>(0, 0, 1)).norm() > structural_tol<Scalar>)
      throw std::invalid_argument("GeodesicPath: path must start at +z");
    for (std::size_t k = 0; k + 1 < vertices_.size(); ++k)
      check_arc(vertices_[k], vertices_[k + 1]);
  }

  const std::vector<Vector3<Scalar>>& vertices() const { return vertices_; }

  bool closed() const {
    return vertices_.size() > 1 &&
           (vertices_.back() - vertices_.front()).norm() <= structural_tol<Scalar>;
  }

  static void check_arc(const Vector3<Scalar>& p, const Vector3<Scalar>& q) {
    if (p.cross(q).norm() > structural_tol<Scalar>) return;
    if (p.dot(q) < Scalar(0))
      throw AmbiguousGeodesicError("GeodesicPath: antipodal vertices have no unique geodesic");
    throw std::invalid_argument("GeodesicPath: coincident consecutive vertices");
  }

 private:
  std::vector<Vector3<Scalar>> vertices_;
};

// Signed solid angle in steradians, |omega| <= 4 pi.
template <typename Scalar = double>
struct SolidAngle {
  Scalar omega = 0;
};

namespace detail {

// Rotation axis and arc angle carrying p to q along their great circle.
template <typename Scalar>
std::pair<Vector3<Scalar>, Scalar> arc_between(const Vector3<Scalar>& p, const Vector3<Scalar>& q) {
  GeodesicPath<Scalar>::check_arc(p, q);
  const Vector3<Scalar> cross = p.cross(q);
  const Scalar sin_theta = cross.norm();
  const Scalar theta = std::atan2(sin_theta, p.dot(q));
  return {cross / sin_theta, theta};
}

template <typename Scalar>
Scalar reduce_mod_four_pi(Scalar x) {
  // Representative in (-2 pi, 2 pi].
  Scalar w = std::fmod(x + 2 * pi<Scalar>, 4 * pi<Scalar>);
  if (w <= Scalar(0)) w += 4 * pi<Scalar>;
  return w - 2 * pi<Scalar>;
}

}  // namespace detail

// Parallel-transporting unitary of the path: the ordered product of
// great-circle rotations exp(-i theta_k (a_k.sigma)/2), a_k normal to the
// k-th arc. Each factor transports Bloch vectors on its arc without
// accumulating dynamical phase.
template <typename Scalar>
SU2Matrix<Scalar> geodesic_unitary(const GeodesicPath<Scalar>& path) {
  const auto& v = path.vertices();
  if (v.size() < 2) throw std::invalid_argument("geodesic_unitary: need at least two vertices");
  SU2Matrix<Scalar> u = SU2Matrix<Scalar>::identity();
  for (std::size_t k = 0; k + 1 < v.size(); ++k) {
    const auto [axis, theta] = detail::arc_between(v[k], v[k + 1]);
    u = axis_rotation(axis, theta) * u;
  }
  return u;
}

// Signed solid angle enclosed by the path (closed with the shortest geodesic
// back to +z when open): Gauss-Bonnet spherical excess, 2 pi minus the sum of
// signed turning angles at the vertices, reduced modulo 4 pi into
// (-2 pi, 2 pi]. Orientation: the octant +z -> +x -> +y -> +z is positive.
template <typename Scalar>
SolidAngle<Scalar> solid_angle(const GeodesicPath<Scalar>& path) {
  std::vector<Vector3<Scalar>> cycle = path.vertices();
  if (path.closed()) cycle.pop_back();
  if (cycle.size() >= 2) GeodesicPath<Scalar>::check_arc(cycle.back(), cycle.front());
  const std::size_t n = cycle.size();
  if (n < 2) return {Scalar(0)};

  Scalar turning_sum = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const Vector3<Scalar>& prev = cycle[(k + n - 1) % n];
    const Vector3<Scalar>& here = cycle[k];
    const Vector3<Scalar>& next = cycle[(k + 1) % n];
    const Vector3<Scalar> t_in = detail::arc_between(prev, here).first.cross(here).normalized();
    const Vector3<Scalar> t_out = detail::arc_between(here, next).first.cross(here).normalized();
    const Scalar sin_turn = t_in.cross(t_out).dot(here);
    const Scalar cos_turn = t_in.dot(t_out);
    // A retraced arc reverses the tangent; canonicalize the turn to +pi so
    // zero-area spikes cancel exactly.
    if (cos_turn < Scalar(0) && std::abs(sin_turn) < Scalar(1e-9))
      turning_sum += pi<Scalar>;
    else
      turning_sum += std::atan2(sin_turn, cos_turn);
  }
  return {detail::reduce_mod_four_pi(2 * pi<Scalar> - turning_sum)};
}

}  // namespace su2pol
