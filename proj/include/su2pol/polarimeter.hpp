#pragma once

// Operator-level simulation of the polarimetric setup: a pi/2 spin flipper,
// the SU(2) device under test, a -pi/2 flipper, and projection onto |+z>.
// The tunable phase eta enters by rigid translation of the flipper pair in
// the guide field, which conjugates the device unitary by z rotations.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "su2pol/errors.hpp"
#include "su2pol/spin.hpp"

namespace su2pol {

// Guide-field hardware: magnetic moment mu [J/T], guide field B [T], particle
// speed v [m/s], and the integer n fixing the flipper separation
// L0 = n pi hbar v / (mu B) so the between-flipper precession is a multiple
// of 2 pi.
template <typename Scalar = double>
struct HardwareConfig {
  Scalar mu;
  Scalar guide_field;
  Scalar speed;
  int n = 1;
  Scalar hbar = Scalar(1.054571817e-34);  // [J s]

  void validate() const {
    if (!(mu > Scalar(0)) || !(guide_field > Scalar(0)) || !(speed > Scalar(0)) ||
        !(hbar > Scalar(0)) || n < 1)
      throw std::domain_error("HardwareConfig: all parameters must be positive");
    if (!std::isfinite(mu * guide_field) || !std::isfinite(speed / (mu * guide_field)))
      throw std::domain_error("HardwareConfig: implied flipper separation is not finite");
  }
};

template <typename Scalar = double>
struct SweepConfig {
  int samples = 1024;
  Scalar refine_tol = Scalar(1e-10);

  void validate() const {
    if (samples < 16) throw std::domain_error("SweepConfig: samples must be >= 16");
    if (!(refine_tol > Scalar(0))) throw std::domain_error("SweepConfig: refine_tol must be > 0");
  }
};

// Sampled I(eta) curve over one period. `model` is the exact generating
// closure when the trace was produced in-process; traces loaded from files
// have none and extrema are refined by interpolation instead.
template <typename Scalar = double>
struct IntensityTrace {
  struct Point {
    Scalar eta;
    Scalar intensity;
  };
  std::vector<Point> points;
  std::optional<Scalar> r;
  std::optional<SU2Params<Scalar>> params;
  std::function<Scalar(Scalar)> model;
  Scalar refine_tol = Scalar(1e-10);
};

template <typename Scalar>
void validate_trace(const IntensityTrace<Scalar>& trace) {
  if (trace.points.empty()) throw InconsistentDataError("trace: no sample points");
  Scalar prev = Scalar(-1);
  for (const auto& pt : trace.points) {
    if (!(pt.eta >= Scalar(0)) || !(pt.eta < 2 * pi<Scalar>))
      throw InconsistentDataError("trace: eta outside [0, 2 pi)");
    if (!(pt.eta > prev)) throw InconsistentDataError("trace: eta not strictly increasing");
    if (!(pt.intensity >= -structural_tol<Scalar>) ||
        !(pt.intensity <= 1 + structural_tol<Scalar>))
      throw InconsistentDataError("trace: intensity outside [0, 1]");
    prev = pt.eta;
  }
}

template <typename Scalar = double>
struct Extrema {
  Scalar i_min;
  Scalar i_max;
  Scalar eta_min;
  Scalar eta_max;
};

// Analyzer rotation curve: intensity versus analyzer direction n.
template <typename Scalar = double>
struct AnalyzerTrace {
  struct Point {
    Vector3<Scalar> direction;
    Scalar intensity;
  };
  std::vector<Point> points;
  Scalar i_min = 0;
  Scalar i_max = 0;
};

template <typename Scalar = double>
struct CountTrace {
  struct Point {
    Scalar eta;
    long long counts_up;
    long long shots;
  };
  std::vector<Point> points;
  std::uint64_t seed = 0;
};

//---------------------------------------------------------------------------
// Deterministic counting statistics
//---------------------------------------------------------------------------

namespace rng {

struct SplitMix64 {
  std::uint64_t state;
  std::uint64_t next() {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
};

// Per-point generator seed derived from (run seed, stream, point index), so
// grid points may be drawn in any order (or in parallel) with identical
// results.
inline std::uint64_t derive_point_seed(std::uint64_t seed, std::uint64_t stream,
                                       std::uint64_t index) {
  SplitMix64 a{seed};
  SplitMix64 b{a.next() + stream};
  SplitMix64 c{b.next() + index};
  return c.next();
}

inline constexpr std::uint64_t kEtaStream = 0;
inline constexpr std::uint64_t kAnalyzerStream = 1;

template <typename Scalar>
long long binomial_draw(Scalar prob, long long shots, std::uint64_t engine_seed) {
  if (!(prob >= Scalar(0))) prob = Scalar(0);
  if (prob <= Scalar(0)) return 0;
  if (prob >= Scalar(1)) return shots;
  std::mt19937_64 engine(engine_seed);
  std::binomial_distribution<long long> dist(shots, static_cast<double>(prob));
  return dist(engine);
}

}  // namespace rng

//---------------------------------------------------------------------------
// Forward model
//---------------------------------------------------------------------------

// T(eta) = F_- G(-eta) U G(eta) F_+ with F_+- the +-pi/2 flippers about y and
// G(eta) the z rotation by eta. Conjugation by G shifts zeta -> zeta - eta
// and leaves delta fixed; guide-field segments outside the flipper pair only
// contribute global phases on |+-z> and are dropped.
template <typename Scalar>
SU2Matrix<Scalar> pipeline_operator(const SU2Params<Scalar>& p, Scalar eta) {
  const Vector3<Scalar> y_axis(0, 1, 0);
  const Vector3<Scalar> z_axis(0, 0, 1);
  const SU2Matrix<Scalar> flip_in = axis_rotation(y_axis, pi<Scalar> / 2);
  const SU2Matrix<Scalar> flip_out = axis_rotation(y_axis, -pi<Scalar> / 2);
  return flip_out * axis_rotation(z_axis, -eta) * su2_from_params(p) *
         axis_rotation(z_axis, eta) * flip_in;
}

// <+z| T rho T^dagger |+z> for the beam (1 + r sigma_z)/2. Equals
// cos^2 xi cos^2 delta + sin^2 xi sin^2(zeta - eta) at r = 1 and
// (1-r)/2 + r I in general.
template <typename Scalar>
Scalar pipeline_intensity(Scalar r, const SU2Params<Scalar>& p, Scalar eta) {
  const SU2Matrix<Scalar> t = pipeline_operator(p, eta);
  const DensityOperator<Scalar> out = evolve(density_from_polarization(r), t);
  return out.matrix()(0, 0).real();
}

template <typename Scalar>
IntensityTrace<Scalar> sweep_eta(Scalar r, const SU2Params<Scalar>& p,
                                 const SweepConfig<Scalar>& cfg) {
  cfg.validate();
  IntensityTrace<Scalar> trace;
  trace.points.reserve(cfg.samples);
  for (int k = 0; k < cfg.samples; ++k) {
    const Scalar eta = 2 * pi<Scalar> * k / cfg.samples;
    trace.points.push_back({eta, pipeline_intensity(r, p, eta)});
  }
  trace.r = r;
  trace.params = p;
  trace.model = [r, p](Scalar eta) { return pipeline_intensity(r, p, eta); };
  trace.refine_tol = cfg.refine_tol;
  return trace;
}

template <typename Scalar>
CountTrace<Scalar> simulate_counts(Scalar r, const SU2Params<Scalar>& p,
                                   const SweepConfig<Scalar>& cfg, long long shots,
                                   std::uint64_t seed) {
  cfg.validate();
  if (shots < 1) throw std::domain_error("simulate_counts: shots must be >= 1");
  CountTrace<Scalar> counts;
  counts.seed = seed;
  counts.points.reserve(cfg.samples);
  for (int k = 0; k < cfg.samples; ++k) {
    const Scalar eta = 2 * pi<Scalar> * k / cfg.samples;
    const Scalar prob = std::clamp(pipeline_intensity(r, p, eta), Scalar(0), Scalar(1));
    const long long up =
        rng::binomial_draw(prob, shots, rng::derive_point_seed(seed, rng::kEtaStream, k));
    counts.points.push_back({eta, up, shots});
  }
  return counts;
}

//---------------------------------------------------------------------------
// Extrema location
//---------------------------------------------------------------------------

namespace detail {

template <typename Scalar>
struct SeriesExtremum {
  Scalar value;
  Scalar x;
};

// Golden-section search for the minimum of f on [a, b]; returns the best
// evaluated point once the bracket is narrower than tol.
template <typename Scalar, typename F>
SeriesExtremum<Scalar> golden_min(F&& f, Scalar a, Scalar b, Scalar tol) {
  constexpr Scalar inv_phi = Scalar(0.6180339887498949);
  Scalar x1 = b - inv_phi * (b - a);
  Scalar x2 = a + inv_phi * (b - a);
  Scalar f1 = f(x1);
  Scalar f2 = f(x2);
  SeriesExtremum<Scalar> best = f1 <= f2 ? SeriesExtremum<Scalar>{f1, x1}
                                         : SeriesExtremum<Scalar>{f2, x2};
  for (int iter = 0; iter < 256 && (b - a) > tol; ++iter) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    }
    const SeriesExtremum<Scalar> cand =
        f1 <= f2 ? SeriesExtremum<Scalar>{f1, x1} : SeriesExtremum<Scalar>{f2, x2};
    if (cand.value < best.value) best = cand;
  }
  return best;
}

// Refine one bracketed extremum of a periodic sampled series. With an exact
// model, golden-section within the bracketing neighbors; without one, the
// vertex of the parabola through the three bracket points, accepted only when
// it is an interior extremum of the right kind (noisy brackets otherwise keep
// the grid value).
template <typename Scalar>
SeriesExtremum<Scalar> refine_extremum(const std::vector<Scalar>& xs,
                                       const std::vector<Scalar>& ys, std::size_t idx,
                                       bool find_min, const std::function<Scalar(Scalar)>& model,
                                       Scalar tol, Scalar period) {
  const std::size_t n = xs.size();
  const Scalar x0 = xs[idx];
  const Scalar y0 = ys[idx];
  if (n < 3 && !model) return {y0, x0};

  const std::size_t il = (idx + n - 1) % n;
  const std::size_t ir = (idx + 1) % n;
  const Scalar xl = idx == 0 ? xs[il] - period : xs[il];
  const Scalar xr = idx == n - 1 ? xs[ir] + period : xs[ir];

  if (model) {
    const Scalar sign = find_min ? Scalar(1) : Scalar(-1);
    auto f = [&](Scalar x) { return sign * model(wrap_two_pi(x)); };
    const SeriesExtremum<Scalar> got = golden_min(f, xl, xr, tol);
    if (got.value < sign * y0) return {sign * got.value, wrap_two_pi(got.x)};
    return {y0, x0};
  }

  const Scalar ul = xl - x0;
  const Scalar ur = xr - x0;
  const Scalar yl = ys[il];
  const Scalar yr = ys[ir];
  const Scalar a = ((yl - y0) / ul - (yr - y0) / ur) / (ul - ur);
  if ((find_min && a > Scalar(0)) || (!find_min && a < Scalar(0))) {
    const Scalar b = (yl - y0) / ul - a * ul;
    const Scalar vertex = -b / (2 * a);
    if (vertex >= ul && vertex <= ur)
      return {y0 - b * b / (4 * a), wrap_two_pi(x0 + vertex)};
  }
  return {y0, x0};
}

template <typename Scalar>
Extrema<Scalar> series_extrema(const std::vector<Scalar>& xs, const std::vector<Scalar>& ys,
                               const std::function<Scalar(Scalar)>& model, Scalar tol,
                               Scalar period) {
  std::size_t imin = 0;
  std::size_t imax = 0;
  for (std::size_t k = 1; k < ys.size(); ++k) {
    if (ys[k] < ys[imin]) imin = k;
    if (ys[k] > ys[imax]) imax = k;
  }
  const SeriesExtremum<Scalar> lo = refine_extremum(xs, ys, imin, true, model, tol, period);
  const SeriesExtremum<Scalar> hi = refine_extremum(xs, ys, imax, false, model, tol, period);
  Extrema<Scalar> out;
  out.i_min = std::clamp(lo.value, Scalar(0), Scalar(1));
  out.i_max = std::clamp(hi.value, Scalar(0), Scalar(1));
  out.eta_min = lo.x;
  out.eta_max = hi.x;
  return out;
}

}  // namespace detail

// Closed-form extreme intensities of I(eta): the minimum sits at eta = zeta
// (mod pi) and the maximum a quarter turn away.
template <typename Scalar>
Extrema<Scalar> analytic_extrema(Scalar r, const SU2Params<Scalar>& p) {
  if (!(r >= Scalar(0) && r <= Scalar(1)))
    throw std::domain_error("analytic_extrema: r must lie in [0, 1]");
  const Scalar c = std::cos(p.xi);
  const Scalar s = std::sin(p.xi);
  const Scalar cd = std::cos(p.delta);
  const Scalar base = c * c * cd * cd;
  Extrema<Scalar> out;
  out.i_min = (1 - r) / 2 + r * base;
  out.i_max = (1 - r) / 2 + r * (base + s * s);
  out.eta_min = wrap_two_pi(p.zeta);
  out.eta_max = wrap_two_pi(p.zeta + pi<Scalar> / 2);
  return out;
}

// blind = true: grid argmin/argmax refined within the bracketing neighbors
// (golden section against the generating model when the trace has one,
// parabolic interpolation otherwise). blind = false: closed-form extremes
// from the generation metadata (or the supplied parameters).
template <typename Scalar>
Extrema<Scalar> find_extrema(const IntensityTrace<Scalar>& trace, bool blind = true,
                             const std::optional<SU2Params<Scalar>>& params = {}) {
  if (trace.points.empty()) throw std::invalid_argument("find_extrema: empty trace");
  if (!blind) {
    const std::optional<SU2Params<Scalar>>& p = params ? params : trace.params;
    if (!p || !trace.r)
      throw std::invalid_argument("find_extrema: analytic mode needs r and SU(2) parameters");
    return analytic_extrema(*trace.r, *p);
  }
  std::vector<Scalar> xs;
  std::vector<Scalar> ys;
  xs.reserve(trace.points.size());
  ys.reserve(trace.points.size());
  for (const auto& pt : trace.points) {
    xs.push_back(pt.eta);
    ys.push_back(pt.intensity);
  }
  return detail::series_extrema(xs, ys, trace.model, trace.refine_tol, 2 * pi<Scalar>);
}

//---------------------------------------------------------------------------
// Analyzer rotation
//---------------------------------------------------------------------------

// I~(n) = 1/2 + (r/2)(|<n|U|+z>|^2 - |<n|U|-z>|^2), cross-checked against the
// Bloch form (1 + r n.(R z))/2 with R = so3_of(U).
template <typename Scalar>
Scalar analyzer_intensity(Scalar r, const SU2Matrix<Scalar>& u_total, const Vector3<Scalar>& n) {
  if (!(r >= Scalar(0) && r <= Scalar(1)))
    throw std::domain_error("analyzer_intensity: r must lie in [0, 1]");
  if (std::abs(n.norm() - Scalar(1)) > structural_tol<Scalar>)
    throw std::domain_error("analyzer_intensity: n must be a unit vector");
  const Vector2c<Scalar> ket_n = spinor_along(n);
  const Vector2c<Scalar> up = u_total.matrix() * spin_up<Scalar>();
  const Vector2c<Scalar> down = u_total.matrix() * spin_down<Scalar>();
  const Scalar amp_up = std::norm(ket_n.dot(up));
  const Scalar amp_down = std::norm(ket_n.dot(down));
  const Scalar spinor_form = Scalar(0.5) + r / 2 * (amp_up - amp_down);

  const Vector3<Scalar> m = so3_of(u_total) * Vector3<Scalar>(0, 0, 1);
  const Scalar bloch_form = (1 + r * n.dot(m)) / 2;
  if (std::abs(spinor_form - bloch_form) > structural_tol<Scalar>)
    throw std::logic_error("analyzer_intensity: evaluation routes disagree");
  return spinor_form;
}

// Sweep n around the great circle through the output Bloch direction R z
// (so both extrema are attained) and a perpendicular axis.
template <typename Scalar>
AnalyzerTrace<Scalar> analyzer_sweep(Scalar r, const SU2Matrix<Scalar>& u_total, int samples,
                                     Scalar refine_tol = Scalar(1e-10)) {
  if (samples < 4) throw std::domain_error("analyzer_sweep: samples must be >= 4");
  if (!(r >= Scalar(0) && r <= Scalar(1)))
    throw std::domain_error("analyzer_sweep: r must lie in [0, 1]");
  const Vector3<Scalar> m = so3_of(u_total) * Vector3<Scalar>(0, 0, 1);
  int least = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(m[i]) < std::abs(m[least])) least = i;
  const Vector3<Scalar> q = m.cross(Vector3<Scalar>::Unit(least)).normalized();

  AnalyzerTrace<Scalar> trace;
  trace.points.reserve(samples);
  std::vector<Scalar> xs;
  std::vector<Scalar> ys;
  auto intensity_at = [&](Scalar t) {
    const Vector3<Scalar> n = std::cos(t) * m + std::sin(t) * q;
    return (1 + r * n.dot(m)) / 2;
  };
  for (int k = 0; k < samples; ++k) {
    const Scalar t = 2 * pi<Scalar> * k / samples;
    const Vector3<Scalar> n = std::cos(t) * m + std::sin(t) * q;
    const Scalar value = intensity_at(t);
    trace.points.push_back({n, value});
    xs.push_back(t);
    ys.push_back(value);
  }
  const Extrema<Scalar> ext =
      detail::series_extrema<Scalar>(xs, ys, intensity_at, refine_tol, 2 * pi<Scalar>);
  trace.i_min = ext.i_min;
  trace.i_max = ext.i_max;
  return trace;
}

enum class AnalyzerMode { analytic, sweep };

// Extreme analyzer intensities (1 -+ r)/2: closed form, or located on a
// 512-step rotation sweep.
template <typename Scalar>
std::pair<Scalar, Scalar> analyzer_extrema(Scalar r, const SU2Matrix<Scalar>& u_total,
                                           AnalyzerMode mode, int samples = 512) {
  if (!(r >= Scalar(0) && r <= Scalar(1)))
    throw std::domain_error("analyzer_extrema: r must lie in [0, 1]");
  if (mode == AnalyzerMode::analytic) return {(1 - r) / 2, (1 + r) / 2};
  const AnalyzerTrace<Scalar> trace = analyzer_sweep(r, u_total, samples);
  return {trace.i_min, trace.i_max};
}

//---------------------------------------------------------------------------
// Guide-field translation
//---------------------------------------------------------------------------

// L0 = n pi hbar v / (mu B): flipper separation making the between-flipper
// precession a multiple of 2 pi.
template <typename Scalar>
Scalar flipper_separation(const HardwareConfig<Scalar>& hw) {
  hw.validate();
  return hw.n * pi<Scalar> * hw.hbar * hw.speed / (hw.mu * hw.guide_field);
}

// eta = (2 mu B / (hbar v)) d, mod 2 pi: the |+z>/|-z> precession phase
// difference accumulated over a rigid translation d of the flipper pair.
template <typename Scalar>
Scalar translation_to_eta(Scalar d, const HardwareConfig<Scalar>& hw) {
  hw.validate();
  return wrap_two_pi(2 * hw.mu * hw.guide_field * d / (hw.hbar * hw.speed));
}

}  // namespace su2pol
