#pragma once

// Inversion of measured extreme intensities into the relative phase
// (as cos^2 Phi; polarimetry sees phases only modulo pi and up to a sign),
// the visibility, and the polarization degree. The two physical
// degeneracies -- an unpolarized beam (r = 0) and evolution into an
// orthogonal state (nu = 0) -- are reported through the status field rather
// than as errors.

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include "su2pol/errors.hpp"

namespace su2pol {

enum class EstimateStatus { ok, phase_undefined, visibility_undetermined };

inline const char* to_string(EstimateStatus s) {
  switch (s) {
    case EstimateStatus::ok: return "ok";
    case EstimateStatus::phase_undefined: return "phase_undefined";
    case EstimateStatus::visibility_undetermined: return "visibility_undetermined";
  }
  return "unknown";
}

// Extracted (cos^2 Phi, V). Fields are populated only when the status
// permits: phase_undefined leaves cos2_phi empty, visibility_undetermined
// leaves visibility empty.
template <typename Scalar = double>
struct PhaseEstimate {
  std::optional<Scalar> cos2_phi;
  std::optional<Scalar> visibility;
  EstimateStatus status = EstimateStatus::ok;
};

// Differences between the eta-sweep extremes and the analyzer extremes.
// Nonnegative for physically consistent data; values within eps_clamp below
// zero are numerical dust and get clamped.
template <typename Scalar = double>
struct DeltaIntensities {
  Scalar d_min;
  Scalar d_max;
  Scalar d_tilde;
};

namespace detail {

// Below this an amplitude squared is considered degenerate, above -eps it is
// considered dust; data violating it further is inconsistent.
template <typename Scalar>
inline constexpr Scalar eps_clamp = Scalar(1e-9);

template <typename Scalar>
void require_ordered_pair(Scalar lo, Scalar hi, const char* what) {
  if (!(lo >= Scalar(0) && hi <= Scalar(1) && lo <= hi))
    throw std::domain_error(std::string(what) + ": need 0 <= i_min <= i_max <= 1");
}

}  // namespace detail

// cos^2 phi = I_min / (1 - I_max + I_min), nu = sqrt(1 - I_max + I_min).
// The denominator is nu^2; when it vanishes the spinor evolved into an
// orthogonal state and the phase is undefined.
template <typename Scalar>
PhaseEstimate<Scalar> pure_from_extrema(Scalar i_min, Scalar i_max) {
  detail::require_ordered_pair(i_min, i_max, "pure_from_extrema");
  const Scalar nu2 = (1 - i_max) + i_min;
  PhaseEstimate<Scalar> est;
  est.visibility = std::sqrt(std::max(nu2, Scalar(0)));
  if (nu2 < detail::eps_clamp<Scalar>) {
    est.status = EstimateStatus::phase_undefined;
    return est;
  }
  est.cos2_phi = std::clamp(i_min / nu2, Scalar(0), Scalar(1));
  return est;
}

// Mixed-state inversion with known polarization degree r:
//   A = [I_min - (1-r)/2]/r,  B = r[(1+r)/2 - I_max],
//   cos^2 Phi = A/(B + A),    V = sqrt(B + A).
// r = 0 is a singular limit: the flat intensity pattern fixes cos^2 Phi = 1
// but cannot determine V.
template <typename Scalar>
PhaseEstimate<Scalar> mixed_from_extrema(Scalar i_min, Scalar i_max, Scalar r) {
  detail::require_ordered_pair(i_min, i_max, "mixed_from_extrema");
  if (!(r >= Scalar(0) && r <= Scalar(1)))
    throw std::domain_error("mixed_from_extrema: r must lie in [0, 1]");
  const Scalar eps = detail::eps_clamp<Scalar>;
  if (i_min < (1 - r) / 2 - eps)
    throw InconsistentDataError("mixed_from_extrema: i_min below the physical window (1-r)/2");
  if (i_max > (1 + r) / 2 + eps)
    throw InconsistentDataError("mixed_from_extrema: i_max above the physical window (1+r)/2");

  PhaseEstimate<Scalar> est;
  if (r < eps) {
    est.cos2_phi = Scalar(1);
    est.status = EstimateStatus::visibility_undetermined;
    return est;
  }
  const Scalar a = std::max((i_min - (1 - r) / 2) / r, Scalar(0));
  const Scalar b = std::max(r * ((1 + r) / 2 - i_max), Scalar(0));
  const Scalar v2 = b + a;
  est.visibility = std::sqrt(v2);
  if (v2 < eps) {
    est.status = EstimateStatus::phase_undefined;
    return est;
  }
  est.cos2_phi = std::clamp(a / v2, Scalar(0), Scalar(1));
  return est;
}

// r = I~_max - I~_min. The analyzer intensity oscillates between (1 -+ r)/2,
// so the extremes must sum to 1.
template <typename Scalar>
Scalar polarization_from_analyzer(Scalar i_min_t, Scalar i_max_t) {
  detail::require_ordered_pair(i_min_t, i_max_t, "polarization_from_analyzer");
  if (std::abs(i_min_t + i_max_t - 1) > Scalar(1e-6))
    throw InconsistentDataError(
        "polarization_from_analyzer: analyzer extremes do not sum to 1");
  return std::clamp(i_max_t - i_min_t, Scalar(0), Scalar(1));
}

template <typename Scalar>
DeltaIntensities<Scalar> delta_intensities(Scalar i_min_rho, Scalar i_max_rho, Scalar i_min_t,
                                           Scalar i_max_t) {
  const Scalar eps = detail::eps_clamp<Scalar>;
  auto checked = [eps](Scalar value, const char* what) {
    if (value < -eps)
      throw InconsistentDataError(std::string("delta_intensities: ") + what + " is negative");
    return std::max(value, Scalar(0));
  };
  DeltaIntensities<Scalar> d;
  d.d_min = checked(i_min_rho - i_min_t, "delta_i_min");
  d.d_max = checked(i_max_t - i_max_rho, "delta_i_max");
  d.d_tilde = checked(i_max_t - i_min_t, "delta_i_tilde");
  return d;
}

// Blind inversion from both sweeps, with no prior knowledge of r:
//   r = dI~,  cos^2 Phi = (dI_min/dI~) / (dI~ dI_max + dI_min/dI~),
//   V = sqrt(dI~ dI_max + dI_min/dI~).
// Algebraically this is mixed_from_extrema evaluated at r = dI~.
template <typename Scalar>
std::pair<PhaseEstimate<Scalar>, Scalar> blind_estimate(Scalar i_min_rho, Scalar i_max_rho,
                                                        Scalar i_min_t, Scalar i_max_t) {
  detail::require_ordered_pair(i_min_rho, i_max_rho, "blind_estimate (eta sweep)");
  detail::require_ordered_pair(i_min_t, i_max_t, "blind_estimate (analyzer sweep)");
  const DeltaIntensities<Scalar> d = delta_intensities(i_min_rho, i_max_rho, i_min_t, i_max_t);
  const Scalar r = d.d_tilde;

  PhaseEstimate<Scalar> est;
  const Scalar eps = detail::eps_clamp<Scalar>;
  if (d.d_tilde < eps) {
    est.cos2_phi = Scalar(1);
    est.status = EstimateStatus::visibility_undetermined;
    return {est, r};
  }
  const Scalar a = d.d_min / d.d_tilde;
  const Scalar b = d.d_tilde * d.d_max;
  const Scalar v2 = b + a;
  est.visibility = std::sqrt(v2);
  if (v2 < eps) {
    est.status = EstimateStatus::phase_undefined;
    return {est, r};
  }
  est.cos2_phi = std::clamp(a / v2, Scalar(0), Scalar(1));
  return {est, r};
}

}  // namespace su2pol
