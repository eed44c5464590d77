#pragma once

#include <array>
#include <cmath>
#include <string>

#include "ridgebound/activation.hpp"
#include "ridgebound/errors.hpp"
#include "ridgebound/quadrature.hpp"
#include "ridgebound/random_net.hpp"
#include "ridgebound/target.hpp"

namespace ridgebound {

enum class BoundMode { AsPrinted, Corrected };

inline std::string bound_mode_name(BoundMode m) {
  return m == BoundMode::AsPrinted ? "as-printed" : "corrected";
}

inline BoundMode bound_mode_from_string(const std::string& s) {
  if (s == "as-printed" || s == "asprinted" || s == "printed") return BoundMode::AsPrinted;
  if (s == "corrected") return BoundMode::Corrected;
  throw UsageError("unknown bound mode: " + s + " (expected corrected|as-printed)");
}

/// All constants entering the spectrum decay envelope and the closed-form
/// lower bound. For m = 1 the direction-dependent constant C_{f,s}(u) is
/// stored at u = +1 and u = -1.
struct BoundConstants {
  double c0 = 0.0;          // ||f||_1 * ||rho||_inf
  double c_rho_s = 0.0;     // sqrt( 1/(2 (2 pi)^2) Int |rhohat|^2 |w|^{-(2s+m-1)} dw )
  std::array<double, 2> c_f_s{0.0, 0.0};  // u = +1, u = -1
  double c_inf = 0.0;       // ||f||_{H^s} * c_rho_s
  double s = 1.0;
  int m = 1;
  double v_m = 2.0;         // volume of the m-unit ball
  double omega_m1 = 2.0;    // surface of S^{m-1} = m * v_m
  double f_l2_sq = 0.0;     // ||f||_2^2
  double f_hs = 0.0;        // ||f||_{H^s}
  double theta_as_printed = 0.0;
  double theta_corrected = 0.0;
};

/// C_{f,s}(u)^2 = Int_0^inf (1+w^2)^s |fhat(w u)|^2 w^{m-1} dw, m = 1.
inline double c_f_s_squared(const Target& f, double s, int u_sign,
                            const QuadratureSpec& spec = {}) {
  const double scale = f.spectral_scale();
  const double cut = scale > 0.0 ? 12.0 / scale : 4096.0;
  auto integrand = [&](double w) {
    const double mag = std::abs(f.fourier(u_sign * w, spec));
    return mag * mag * std::pow(1.0 + w * w, s);
  };
  double total = 0.0;
  double lo = 0.0, hi = std::min(1.0, cut);
  while (lo < cut) {
    total += integrate(integrand, lo, hi, spec).value;
    lo = hi;
    hi = std::min(hi * 2.0, cut);
  }
  return total;
}

/// C_{rho,s}^2; throws when the integrand diverges at the origin, naming the
/// required vanishing order.
inline double c_rho_s_squared(const Activation& rho, double s, int m,
                              const QuadratureSpec& spec = {}) {
  if (!rho.has_fourier()) {
    throw PreconditionError("C_{rho,s} needs a Fourier-evaluable rho");
  }
  const double expo = 2.0 * s + m - 1.0;
  if (rho.kind() == ActivationKind::GaussianDerivative ||
      rho.kind() == ActivationKind::Gaussian) {
    // |rhohat(w)|^2 ~ w^{2n} near 0: integrable iff 2n - expo > -1.
    const int n = rho.kind() == ActivationKind::Gaussian ? 0 : rho.order();
    if (!(2.0 * n - expo > -1.0)) {
      throw PreconditionError(
          "C_{rho,s} diverges: rhohat must vanish at omega=0 to order > " +
          format_double(s + 0.5 * m - 1.0) + " (have order " + std::to_string(n) + ")");
    }
  }
  const double cut = rho.fourier_cutoff();
  auto integrand = [&](double w) {
    const double mag = std::abs(rho.fourier(w));
    return mag * mag * std::pow(std::abs(w), -expo);
  };
  // double the one-sided integral; split the origin octaves explicitly
  double total = 0.0;
  double hi = cut;
  for (int k = 0; k < 60 && hi > 1e-14 * cut; ++k) {
    const double lo = hi * 0.5;
    total += integrate(integrand, lo, hi, spec).value;
    hi = lo;
  }
  // full-line integral = 2 * total; constant has prefactor 1 / (2 (2 pi)^2)
  return total / (kTwoPi * kTwoPi);
}

inline double theta_from(double c0, double c_inf, double s, int m, BoundMode mode) {
  if (!(c0 > 0.0) || !(c_inf > 0.0)) {
    throw PreconditionError("theta undefined for zero constants");
  }
  const double mvm = m * unit_ball_volume(m);
  const double ratio = mvm * c0 * c0 / (c_inf * c_inf);
  const double p = 1.0 / (2.0 * s + m);
  // Theorem-5 display: theta = (m V_m C0^2 / Cinf^2)^{1/(2s+m)}.
  // The appendix crossover condition C0^2 Omega_{m-1} = Cinf^2 theta^{-2s-m}
  // gives the reciprocal; both are exposed.
  return mode == BoundMode::AsPrinted ? std::pow(ratio, p) : std::pow(1.0 / ratio, p);
}

inline BoundConstants compute_constants(const Target& f, const Activation& rho,
                                        double s, int m,
                                        const QuadratureSpec& spec = {}) {
  if (m != 1) throw NotImplementedError("constants implemented for m = 1 targets");
  BoundConstants c;
  c.s = s;
  c.m = m;
  c.v_m = unit_ball_volume(m);
  c.omega_m1 = sphere_surface(m);
  c.c0 = f.l1_norm(spec) * rho.sup_norm();
  c.c_rho_s = std::sqrt(c_rho_s_squared(rho, s, m, spec));
  c.c_f_s[0] = std::sqrt(c_f_s_squared(f, s, +1, spec));
  c.c_f_s[1] = std::sqrt(c_f_s_squared(f, s, -1, spec));
  c.f_hs = f.sobolev_norm(s, spec);
  c.c_inf = c.f_hs * c.c_rho_s;
  c.f_l2_sq = f.is_gaussian_family() ? f.l2_norm_squared_analytic()
                                     : std::pow(f.l2_norm(spec), 2);
  if (c.c0 > 0.0 && c.c_inf > 0.0) {
    c.theta_as_printed = theta_from(c.c0, c.c_inf, s, m, BoundMode::AsPrinted);
    c.theta_corrected = theta_from(c.c0, c.c_inf, s, m, BoundMode::Corrected);
  }
  return c;
}

inline double theta(const BoundConstants& c, BoundMode mode) {
  return theta_from(c.c0, c.c_inf, c.s, c.m, mode);
}

/// Pointwise envelope of the spectrum magnitude:
/// |R[f](r u, b)| <= min{ C0, C_{rho,s} C_{f,s}(u) r^{-s-m/2} }.
inline double decay_envelope(const BoundConstants& c, double r, int u_sign = +1) {
  if (!(r > 0.0)) throw UsageError("decay_envelope needs r > 0");
  const double cfs = u_sign >= 0 ? c.c_f_s[0] : c.c_f_s[1];
  const double decay = c.c_rho_s * cfs * std::pow(r, -c.s - 0.5 * c.m);
  return std::min(c.c0, decay);
}

}  // namespace ridgebound
