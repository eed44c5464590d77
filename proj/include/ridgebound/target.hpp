#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "ridgebound/errors.hpp"
#include "ridgebound/io.hpp"
#include "ridgebound/quadrature.hpp"

namespace ridgebound {

inline constexpr double kTwoPi = 6.283185307179586476925287;
inline constexpr double kSqrtTwoPi = 2.5066282746310005024157653;

/// One Gaussian component: amplitude * exp(-(x - center)^2 / (2 scale^2)).
struct Bump {
  double center;
  double scale;
  double amplitude;
};

enum class TargetKind { GaussianBump, GaussianMix, Chirp, WindowedSine, Tabulated };

/// A real function on R (m = 1 in this release) with evaluators, Fourier
/// transform and norm oracles. Gaussian kinds carry exact analytic Fourier
/// data; the rest fall back to quadrature. All instances are immutable and
/// safe to share across threads.
///
/// Fourier convention (pinned project-wide): fhat(xi) = Int f(x) e^{-i xi x} dx.
/// All 2*pi bookkeeping lives here; note that with this convention
/// ||f||_{H^0}^2 = 2*pi * ||f||_{L^2}^2 in one dimension.
class Target {
 public:
  static Target gaussian_bump(double center, double scale, double amplitude) {
    check_scale(scale);
    Target t(TargetKind::GaussianBump);
    t.bumps_.push_back({center, scale, amplitude});
    return t;
  }

  static Target gaussian_mix(std::vector<Bump> bumps) {
    if (bumps.empty()) throw UsageError("gaussian mix needs at least one bump");
    for (const auto& b : bumps) check_scale(b.scale);
    Target t(TargetKind::GaussianMix);
    t.bumps_ = std::move(bumps);
    return t;
  }

  /// The two-bump benchmark target
  ///   0.2 exp(-(x-0.4)^2/sigma^2) + 0.5 exp(-(x-0.6)^2/sigma^2);
  /// exp(-z^2/sigma^2) == exp(-z^2 / (2 (sigma/sqrt(2))^2)), hence the
  /// component scales below.
  static Target sim_mixture(double sigma) {
    check_scale(sigma);
    const double s = sigma / std::sqrt(2.0);
    Target t(TargetKind::GaussianMix);
    t.bumps_ = {{0.4, s, 0.2}, {0.6, s, 0.5}};
    t.descriptor_hint_ = "sim:" + format_double(sigma);
    return t;
  }

  /// g(x) = 0.5 cos(22 pi x^2) + 0.5 x^2 on [0,1], zero outside.
  static Target chirp() { return Target(TargetKind::Chirp); }

  /// sin(omega x) hard-windowed to [lo, hi].
  static Target windowed_sine(double omega, double lo = 0.0, double hi = 1.0) {
    if (!(hi > lo)) throw UsageError("windowed sine needs hi > lo");
    Target t(TargetKind::WindowedSine);
    t.omega_ = omega;
    t.support_ = {lo, hi};
    return t;
  }

  static Target tabulated(std::vector<double> x, std::vector<double> v) {
    if (x.size() != v.size() || x.size() < 2) {
      throw UsageError("tabulated target needs >= 2 (x, value) pairs");
    }
    for (std::size_t i = 1; i < x.size(); ++i) {
      if (!(x[i] > x[i - 1])) throw UsageError("tabulated x grid must increase");
    }
    Target t(TargetKind::Tabulated);
    t.grid_x_ = std::move(x);
    t.grid_v_ = std::move(v);
    t.support_ = {t.grid_x_.front(), t.grid_x_.back()};
    return t;
  }

  static Target tabulated_from_csv(const std::string& path) {
    auto [x, v] = read_xy_csv(path);
    return tabulated(std::move(x), std::move(v));
  }

  TargetKind kind() const { return kind_; }
  int dimension() const { return 1; }
  const std::vector<Bump>& bumps() const { return bumps_; }
  bool is_gaussian_family() const {
    return kind_ == TargetKind::GaussianBump || kind_ == TargetKind::GaussianMix;
  }

  double operator()(double x) const {
    switch (kind_) {
      case TargetKind::GaussianBump:
      case TargetKind::GaussianMix: {
        double v = 0.0;
        for (const auto& b : bumps_) {
          const double z = (x - b.center) / b.scale;
          v += b.amplitude * std::exp(-0.5 * z * z);
        }
        return v;
      }
      case TargetKind::Chirp:
        if (x < 0.0 || x > 1.0) return 0.0;
        return 0.5 * std::cos(22.0 * M_PI * x * x) + 0.5 * x * x;
      case TargetKind::WindowedSine:
        if (x < support_.first || x > support_.second) return 0.0;
        return std::sin(omega_ * x);
      case TargetKind::Tabulated: {
        if (x < grid_x_.front() || x > grid_x_.back()) {
          throw DomainError("tabulated query x = " + format_double(x) +
                            " outside grid [" + format_double(grid_x_.front()) +
                            ", " + format_double(grid_x_.back()) + "]");
        }
        const auto it = std::upper_bound(grid_x_.begin(), grid_x_.end(), x);
        const std::size_t hi = std::min<std::size_t>(
            grid_x_.size() - 1,
            static_cast<std::size_t>(std::max<std::ptrdiff_t>(1, it - grid_x_.begin())));
        const std::size_t lo = hi - 1;
        const double t = (x - grid_x_[lo]) / (grid_x_[hi] - grid_x_[lo]);
        return (1.0 - t) * grid_v_[lo] + t * grid_v_[hi];
      }
    }
    return 0.0;
  }

  /// Analytic derivative of the chirp, used by the Simulation-3 outputs.
  static double chirp_derivative(double x) {
    return -22.0 * M_PI * x * std::sin(22.0 * M_PI * x * x) + x;
  }

  bool has_analytic_fourier() const { return is_gaussian_family(); }

  std::complex<double> fourier(double xi, const QuadratureSpec& spec = {}) const {
    if (is_gaussian_family()) {
      std::complex<double> v{0.0, 0.0};
      for (const auto& b : bumps_) {
        const double mag =
            b.amplitude * b.scale * kSqrtTwoPi * std::exp(-0.5 * b.scale * b.scale * xi * xi);
        v += mag * std::exp(std::complex<double>(0.0, -xi * b.center));
      }
      return v;
    }
    // Quadrature over the (compact) support; panel count resolves e^{-i xi x}.
    const auto [lo, hi] = effective_support();
    QuadratureSpec s = spec;
    const double periods = std::abs(xi) * (hi - lo) / kTwoPi;
    s.initial_panels = std::max(spec.initial_panels, 1 + static_cast<int>(periods / 4.0));
    auto est = integrate_complex(
        [&](double x) {
          return (*this)(x)*std::exp(std::complex<double>(0.0, -xi * x));
        },
        lo, hi, s);
    return est.value;
  }

  /// Effective support: interval outside which |f| < ~1e-16 of its peak.
  /// Gaussian tails are cut at 8.6 scales; compact kinds return their window.
  std::pair<double, double> effective_support() const {
    switch (kind_) {
      case TargetKind::GaussianBump:
      case TargetKind::GaussianMix: {
        double lo = bumps_.front().center, hi = lo;
        for (const auto& b : bumps_) {
          lo = std::min(lo, b.center - kTailScales * b.scale);
          hi = std::max(hi, b.center + kTailScales * b.scale);
        }
        return {lo, hi};
      }
      case TargetKind::Chirp:
        return {0.0, 1.0};
      case TargetKind::WindowedSine:
      case TargetKind::Tabulated:
        return support_;
    }
    return {0.0, 0.0};
  }

  /// Largest s such that |fhat(xi)| <= C exp(-s^2 xi^2 / 2); 0 when no
  /// Gaussian frequency envelope is claimed (compact / tabulated kinds).
  double spectral_scale() const {
    if (!is_gaussian_family()) return 0.0;
    double s = bumps_.front().scale;
    for (const auto& b : bumps_) s = std::min(s, b.scale);
    return s;
  }

  IntegralEstimate l1_norm_detailed(const QuadratureSpec& spec = {}) const {
    if (is_gaussian_family()) {
      const bool one_sign =
          std::all_of(bumps_.begin(), bumps_.end(), [](const Bump& b) {
            return b.amplitude >= 0.0;
          }) ||
          std::all_of(bumps_.begin(), bumps_.end(), [](const Bump& b) {
            return b.amplitude <= 0.0;
          });
      if (one_sign) {
        double v = 0.0;
        for (const auto& b : bumps_) v += std::abs(b.amplitude) * b.scale * kSqrtTwoPi;
        return {v, 0.0};
      }
    }
    const auto [lo, hi] = effective_support();
    return integrate([&](double x) { return std::abs((*this)(x)); }, lo, hi, spec);
  }

  double l1_norm(const QuadratureSpec& spec = {}) const {
    return l1_norm_detailed(spec).value;
  }

  IntegralEstimate l2_norm_detailed(const QuadratureSpec& spec = {}) const {
    if (is_gaussian_family()) return {std::sqrt(l2_norm_squared_analytic()), 0.0};
    const auto [lo, hi] = effective_support();
    auto est = integrate([&](double x) { const double v = (*this)(x); return v * v; },
                         lo, hi, spec);
    return {std::sqrt(std::max(0.0, est.value)), est.error_estimate};
  }

  double l2_norm(const QuadratureSpec& spec = {}) const {
    return l2_norm_detailed(spec).value;
  }

  /// Exact ||f||_2^2 for Gaussian mixtures (cross terms included).
  double l2_norm_squared_analytic() const {
    if (!is_gaussian_family()) {
      throw PreconditionError("analytic L2 norm only for Gaussian kinds");
    }
    double tot = 0.0;
    for (const auto& p : bumps_) {
      for (const auto& q : bumps_) {
        const double s2 = p.scale * p.scale + q.scale * q.scale;
        tot += p.amplitude * q.amplitude * kSqrtTwoPi * p.scale * q.scale /
               std::sqrt(s2) * std::exp(-0.5 * (p.center - q.center) * (p.center - q.center) / s2);
      }
    }
    return tot;
  }

  /// Sobolev norm per the frequency-domain definition
  ///   ||f||_{H^s}^2 = Int |fhat(xi)|^2 (1 + xi^2)^s dxi
  /// (no 2*pi normalization; see the class comment).
  ///
  /// Gaussian kinds integrate to the analytic frequency cutoff. Compactly
  /// supported kinds have |fhat|^2 tails decaying only polynomially (driven
  /// by endpoint/kink jumps); those are integrated to a moving cutoff with
  /// the leading jump-asymptotic tail added, doubling the cutoff until the
  /// corrected total stabilizes.
  double sobolev_norm(double s, const QuadratureSpec& spec = {}) const {
    if (s < 0.0) throw UsageError("sobolev_norm needs s >= 0");
    auto integrand = [&](double xi) {
      const double m = std::abs(fourier(xi, spec));
      return m * m * std::pow(1.0 + xi * xi, s);
    };
    if (is_gaussian_family()) {
      const double cut = 12.0 / spectral_scale();
      double total = 0.0;
      double lo = 0.0, hi = std::min(1.0, cut);
      while (lo < cut) {
        total += integrate(integrand, lo, hi, spec).value;
        lo = hi;
        hi = std::min(hi * 2.0, cut);
      }
      return std::sqrt(2.0 * total);
    }
    // Jump magnitudes controlling the tail: J0 from f itself at the window
    // edges (tail ~ xi^{2s-2}), J1 from slope discontinuities (xi^{2s-4}).
    const auto [lo_s, hi_s] = effective_support();
    const double j0 = sq((*this)(lo_s)) + sq((*this)(hi_s));
    const double j1 = slope_jump_energy();
    const bool order1 = j0 > 1e-14 * std::max(1.0, j1);
    if (order1 && s >= 0.5) {
      throw ToleranceError("sobolev_norm: tail diverges (window jumps need s < 1/2)",
                           0.0, j0);
    }
    if (!order1 && s >= 1.5) {
      throw ToleranceError("sobolev_norm: tail diverges (slope jumps need s < 3/2)",
                           0.0, j1);
    }
    const double len = hi_s - lo_s;
    QuadratureSpec os = spec;
    double cut = 64.0;
    double total = 0.0;
    {
      double lo = 0.0, hi = 1.0;
      while (lo < cut) {
        os.initial_panels = 1 + static_cast<int>((hi - lo) * len / (4.0 * kTwoPi));
        total += integrate(integrand, lo, hi, os).value;
        lo = hi;
        hi = std::min(hi * 2.0, cut);
      }
    }
    auto tail_correction = [&](double cap) {
      // one-sided Int_cap^inf of the leading asymptotic, doubled below
      return order1 ? j0 * std::pow(cap, 2.0 * s - 1.0) / (1.0 - 2.0 * s)
                    : j1 * std::pow(cap, 2.0 * s - 3.0) / (3.0 - 2.0 * s);
    };
    double corrected = total + tail_correction(cut);
    for (int round = 0; round < 12; ++round) {
      const double next_cut = cut * 2.0;
      os.initial_panels = 1 + static_cast<int>(cut * len / (4.0 * kTwoPi));
      total += integrate(integrand, cut, next_cut, os).value;
      cut = next_cut;
      const double next_corrected = total + tail_correction(cut);
      const bool stable =
          std::abs(next_corrected - corrected) <= 3e-7 * std::abs(next_corrected);
      corrected = next_corrected;
      if (stable && cut >= 256.0) return std::sqrt(2.0 * corrected);
    }
    throw ToleranceError("sobolev_norm: corrected frequency tail did not stabilize",
                         std::sqrt(2.0 * corrected), 0.0);
  }

  json descriptor() const {
    json j;
    switch (kind_) {
      case TargetKind::GaussianBump:
        j["kind"] = "gaussian_bump";
        break;
      case TargetKind::GaussianMix:
        j["kind"] = "gaussian_mix";
        break;
      case TargetKind::Chirp:
        j["kind"] = "chirp";
        break;
      case TargetKind::WindowedSine:
        j["kind"] = "windowed_sine";
        j["omega"] = omega_;
        j["support"] = {support_.first, support_.second};
        break;
      case TargetKind::Tabulated:
        j["kind"] = "tabulated";
        j["points"] = grid_x_.size();
        break;
    }
    if (is_gaussian_family()) {
      json arr = json::array();
      for (const auto& b : bumps_) {
        arr.push_back({{"center", b.center}, {"scale", b.scale}, {"amplitude", b.amplitude}});
      }
      j["bumps"] = arr;
    }
    if (!descriptor_hint_.empty()) j["spec_string"] = descriptor_hint_;
    return j;
  }

  /// Analytic f'' for Gaussian kinds (used by the polar reconstruction).
  double second_derivative(double x) const {
    if (!is_gaussian_family()) {
      throw NotImplementedError("second_derivative: only Gaussian kinds supported");
    }
    double v = 0.0;
    for (const auto& b : bumps_) {
      const double s2 = b.scale * b.scale;
      const double z = x - b.center;
      v += b.amplitude * std::exp(-0.5 * z * z / s2) * (z * z - s2) / (s2 * s2);
    }
    return v;
  }

 private:
  static constexpr double kTailScales = 8.6;  // exp(-8.6^2/2) ~ 8e-17

  static void check_scale(double s) {
    if (!(s > 0.0) || !std::isfinite(s)) throw UsageError("scale must be positive and finite");
  }

  static double sq(double v) { return v * v; }

  explicit Target(TargetKind k) : kind_(k) {}

  /// Sum of squared slope discontinuities (window edges plus interior kinks
  /// of tabulated data); drives the xi^{-4} tail of |fhat|^2.
  double slope_jump_energy() const {
    const auto [lo, hi] = effective_support();
    if (kind_ == TargetKind::Tabulated) {
      double e = 0.0;
      double prev_slope = 0.0;  // zero outside the grid
      for (std::size_t i = 0; i + 1 < grid_x_.size(); ++i) {
        const double slope = (grid_v_[i + 1] - grid_v_[i]) / (grid_x_[i + 1] - grid_x_[i]);
        e += sq(slope - prev_slope);
        prev_slope = slope;
      }
      e += sq(prev_slope);
      return e;
    }
    const double h = 1e-6 * (hi - lo);
    const double dlo = ((*this)(lo + h) - (*this)(lo)) / h;
    const double dhi = ((*this)(hi) - (*this)(hi - h)) / h;
    return sq(dlo) + sq(dhi);
  }

  TargetKind kind_;
  std::vector<Bump> bumps_;
  double omega_ = 0.0;
  std::pair<double, double> support_{0.0, 1.0};
  std::vector<double> grid_x_, grid_v_;
  std::string descriptor_hint_;
};

}  // namespace ridgebound
