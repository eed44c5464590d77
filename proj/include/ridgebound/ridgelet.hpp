#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "ridgebound/activation.hpp"
#include "ridgebound/decay.hpp"
#include "ridgebound/errors.hpp"
#include "ridgebound/io.hpp"
#include "ridgebound/parallel.hpp"
#include "ridgebound/quadrature.hpp"
#include "ridgebound/target.hpp"

namespace ridgebound {

/// Activation sigma paired with an admissible rho. self_admissible means
/// rho == sigma, which is what the Plancherel identity requires.
struct AdmissiblePair {
  Activation sigma = Activation::sigmoid();
  Activation rho = Activation::gaussian_derivative(1, 1.0);
  int m = 1;
  double k_adm = 1.0;
  bool self_admissible = false;
};

/// Controls for the truncated (a, b)-box quadratures. The box is grown in
/// octaves of |a|; per-row frequency windows shrink like 1/|a| for targets
/// with a Gaussian frequency envelope, so cost is logarithmic in the box.
struct BoxQuadSpec {
  double rel_tol = 1e-4;
  double base_density = 1.0;
  double max_density = 8.0;
  double ladder_step = 1.5;  // density multiplier between refinement passes
  int max_octaves = 44;
  double first_octave = 1.0;
  int jobs = 1;  // parallel rows; accumulation order stays deterministic
};

namespace detail {

/// Frequency integration data for one spectrum row (fixed a):
/// R[f](a, b) = (1/2pi) Int fhat(w a) conj(rhohat(w)) e^{i w b} dw.
struct SpectrumRow {
  std::vector<double> w;                 // omega nodes
  std::vector<std::complex<double>> g;   // fhat(w a) conj(rhohat(w)) * weight

  void build(const Target& f, const Activation& rho, double a, double b_absmax,
             double density, const QuadratureSpec& fspec) {
    const double sf = f.spectral_scale();
    const double tau = rho.envelope_tau();
    const double wcut = std::min(rho.fourier_cutoff(),
                                 10.0 / std::sqrt(sf * sf * a * a + tau * tau));
    const double periods = wcut * b_absmax / M_PI;
    const long panels = static_cast<long>(std::ceil((periods / 5.0 + 2.0) * density));
    std::vector<double> xs, ws;
    panel_nodes(QuadratureRule::GaussLegendre, 32, -wcut, wcut, panels, xs, ws);
    w = std::move(xs);
    g.resize(w.size());
    for (std::size_t k = 0; k < w.size(); ++k) {
      g[k] = f.fourier(w[k] * a, fspec) * std::conj(rho.fourier(w[k])) * ws[k];
    }
  }

  std::complex<double> eval(double b) const {
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t k = 0; k < w.size(); ++k) {
      acc += g[k] * std::exp(std::complex<double>(0.0, w[k] * b));
    }
    return acc / kTwoPi;
  }

  void eval_many(const std::vector<double>& b, std::vector<std::complex<double>>& out) const {
    const std::size_t nb = b.size();
    std::vector<double> re(nb, 0.0), im(nb, 0.0);
    for (std::size_t k = 0; k < w.size(); ++k) {
      const double gr = g[k].real();
      const double gi = g[k].imag();
      const double wk = w[k];
      for (std::size_t j = 0; j < nb; ++j) {
        const double ph = wk * b[j];
        const double c = std::cos(ph);
        const double s = std::sin(ph);
        re[j] += gr * c - gi * s;
        im[j] += gr * s + gi * c;
      }
    }
    out.resize(nb);
    const double inv = 1.0 / kTwoPi;
    for (std::size_t j = 0; j < nb; ++j) {
      out[j] = {re[j] * inv, im[j] * inv};
    }
  }
};

/// b-interval where R[f](a, .) is non-negligible: the slab a * supp(f)
/// widened by the reach of rho plus the Gaussian smearing of f's spectrum.
inline std::pair<double, double> row_b_window(const Target& f, const Activation& rho,
                                              double a) {
  const auto [x1, x2] = f.effective_support();
  const double lo_slab = std::min(a * x1, a * x2);
  const double hi_slab = std::max(a * x1, a * x2);
  const double sf = f.spectral_scale();
  const double tau = rho.envelope_tau();
  const double margin =
      7.5 * std::sqrt(sf * sf * a * a + tau * tau) + 8.0 * tau * (1.0 + 0.3 * rho.order());
  return {lo_slab - margin, hi_slab + margin};
}

/// Variation scale of R[f](a, .): the row is bandlimited to wcut(a).
inline double row_b_scale(const Target& f, const Activation& rho, double a) {
  const double sf = f.spectral_scale();
  const double tau = rho.envelope_tau();
  const double wcut = std::min(rho.fourier_cutoff(),
                               10.0 / std::sqrt(sf * sf * a * a + tau * tau));
  return M_PI / wcut;
}

inline void clip_window(std::pair<double, double>& win, double lo, double hi) {
  win.first = std::max(win.first, lo);
  win.second = std::min(win.second, hi);
}

}  // namespace detail

/// R[f](a, b) by quadrature of the defining integral Int f(x) conj(rho(a x - b)) dx.
inline std::complex<double> ridgelet_direct(const Target& f, const Activation& rho,
                                            double a, double b,
                                            const QuadratureSpec& spec = {}) {
  const auto [lo, hi] = f.effective_support();
  const double rho_scale = rho.has_fourier() ? rho.envelope_tau() : 1.0;
  const double feature = rho_scale / std::max(std::abs(a), 1e-6);
  QuadratureSpec s = spec;
  s.initial_panels = std::max<int>(
      spec.initial_panels,
      1 + static_cast<int>(std::min(200000.0, (hi - lo) / (3.0 * feature))));
  auto est = integrate_complex(
      [&](double x) {
        return f(x) * std::conj(std::complex<double>(rho(a * x - b), 0.0));
      },
      lo, hi, s);
  return est.value;
}

/// R[f](a, b) via the Fourier form; agrees with ridgelet_direct within the
/// combined quadrature tolerances.
inline std::complex<double> ridgelet_fourier(const Target& f, const Activation& rho,
                                             double a, double b,
                                             const QuadratureSpec& spec = {}) {
  detail::SpectrumRow row;
  std::complex<double> prev{0.0, 0.0};
  double err = 0.0;
  const double scale_floor = 1e-18;
  for (int density = 1; density <= 64; density *= 2) {
    row.build(f, rho, a, std::abs(b), density, spec);
    const std::complex<double> cur = row.eval(b);
    if (density > 1) {
      err = std::abs(cur - prev);
      double mass = 0.0;
      for (const auto& gk : row.g) mass += std::abs(gk);
      const double scale = std::max(std::abs(cur), mass / kTwoPi);
      if (err <= std::max(1e-10 * scale, scale_floor)) return cur;
    }
    prev = cur;
  }
  throw ToleranceError("ridgelet_fourier did not converge", std::abs(prev), err);
}

/// Left-hand side of the admissibility condition
///   (2 pi)^{m-1} Int sigmahat(w) conj(rhohat(w)) |w|^{-m} dw.
/// Divergence at w -> 0 (non-vanishing transforms) is detected by dyadic
/// shells whose contributions fail to decay.
inline double admissibility_constant(const Activation& sigma, const Activation& rho,
                                     int m, const QuadratureSpec& spec = {}) {
  if (!sigma.has_fourier() || !rho.has_fourier()) {
    throw PreconditionError(
        "admissibility check needs Fourier-evaluable sigma and rho "
        "(non-integrable activations are out of scope here)");
  }
  const double cut = std::max(sigma.fourier_cutoff(), rho.fourier_cutoff());
  auto integrand = [&](double w) {
    return sigma.fourier(w) * std::conj(rho.fourier(w)) * std::pow(std::abs(w), -m);
  };
  std::complex<double> one_side{0.0, 0.0};
  double hi = cut;
  double prev_mag = -1.0;
  int flat_shells = 0;
  for (int k = 0; k < 64; ++k) {
    const double lo = 0.5 * hi;
    const auto piece = integrate_complex(integrand, lo, hi, spec);
    const double mag = std::abs(piece.value);
    one_side += piece.value;
    if (k >= 6) {
      if (prev_mag > 0.0 && mag > 0.55 * prev_mag &&
          mag > 1e-13 * std::max(std::abs(one_side), 1.0)) {
        ++flat_shells;
      } else {
        flat_shells = 0;
      }
      if (flat_shells >= 5) {
        throw NotAdmissibleError(
            "admissibility integrand diverges near omega = 0 "
            "(transform does not vanish fast enough at the origin)");
      }
      if (mag <= 1e-16 * std::max(std::abs(one_side), 1e-300)) break;
    }
    prev_mag = mag;
    hi = lo;
  }
  const double value = 2.0 * one_side.real();  // integrand(-w) = conj(integrand(w))
  return std::pow(kTwoPi, m - 1) * value;
}

/// Self variant: uses |rhohat|^2.
inline double admissibility_self(const Activation& rho, int m,
                                 const QuadratureSpec& spec = {}) {
  return admissibility_constant(rho, rho, m, spec);
}

/// rho = C * (d/dz)^n gaussian(tau), with C chosen so that rho is admissible
/// with itself (constant 1). Requires 2n - m > 0.
inline AdmissiblePair make_self_admissible(int order, double tau, int m,
                                           const QuadratureSpec& spec = {}) {
  if (2 * order - m <= 0) {
    throw PreconditionError("self-admissible Gaussian derivative needs 2n - m > 0");
  }
  const Activation base = Activation::gaussian_derivative(order, tau, 1.0);
  const double raw = admissibility_self(base, m, spec);
  if (!(raw > 0.0) || !std::isfinite(raw)) {
    throw NotAdmissibleError("self-admissibility integral is not positive/finite");
  }
  const double c = 1.0 / std::sqrt(raw);
  AdmissiblePair pair;
  pair.sigma = Activation::gaussian_derivative(order, tau, c);
  pair.rho = pair.sigma;
  pair.m = m;
  pair.k_adm = admissibility_self(pair.rho, m, spec);
  pair.self_admissible = true;
  return pair;
}

/// Normalize rho_base so that (sigma, rho) satisfies the admissibility
/// condition with constant 1. Fails when the pairing integral vanishes
/// (e.g. odd-order Gaussian derivatives against an even sigma).
inline AdmissiblePair make_admissible_pair(const Activation& sigma,
                                           const Activation& rho_base, int m,
                                           const QuadratureSpec& spec = {}) {
  const double raw = admissibility_constant(sigma, rho_base, m, spec);
  const double scale_ref = sigma.sup_norm() * rho_base.sup_norm();
  if (std::abs(raw) < 1e-12 * std::max(scale_ref, 1e-30)) {
    throw NotAdmissibleError("pairing integral vanishes; cannot normalize rho");
  }
  AdmissiblePair pair;
  pair.sigma = sigma;
  pair.rho = Activation::gaussian_derivative(rho_base.order(), rho_base.tau(),
                                             rho_base.coeff() / raw);
  pair.m = m;
  pair.k_adm = admissibility_constant(sigma, pair.rho, m, spec);
  pair.self_admissible = false;
  return pair;
}

namespace detail {

/// Int over the b-window of |R[f](a, .)|^2 for one fixed a.
inline double row_mass(const Target& f, const Activation& rho, double a,
                       double b_lo_cap, double b_hi_cap, double density,
                       const QuadratureSpec& fspec) {
  auto win = row_b_window(f, rho, a);
  clip_window(win, b_lo_cap, b_hi_cap);
  if (!(win.second > win.first)) return 0.0;
  const double scale = row_b_scale(f, rho, a);
  const long panels = static_cast<long>(
      std::ceil(((win.second - win.first) / (4.0 * scale) + 1.0) * density));
  std::vector<double> bn, bw;
  panel_nodes(QuadratureRule::GaussLegendre, 16, win.first, win.second, panels, bn, bw);
  SpectrumRow row;
  row.build(f, rho, a, std::max(std::abs(win.first), std::abs(win.second)), density, fspec);
  std::vector<std::complex<double>> rv;
  row.eval_many(bn, rv);
  double rowsum = 0.0;
  for (std::size_t j = 0; j < bn.size(); ++j) rowsum += bw[j] * std::norm(rv[j]);
  return rowsum;
}

/// One octave slab { lo <= |a| <= hi } of Int |R[f](a,b)|^2 db da, with b
/// restricted to [b_lo_cap, b_hi_cap] (pass +-inf for the full-line mass).
/// Both signs of a are included; rows may run in parallel (the weighted sum
/// is taken in index order, so the result does not depend on scheduling).
inline double octave_mass(const Target& f, const Activation& rho, double a_lo,
                          double a_hi, double b_lo_cap, double b_hi_cap, double density,
                          int jobs, const QuadratureSpec& fspec) {
  std::vector<double> an, aw;
  const long a_panels = density < 2.0 ? 2 : 3;
  panel_nodes(QuadratureRule::GaussLegendre, 16, a_lo, a_hi, a_panels, an, aw);
  // |R(-a,-b)|^2 = |R(a,b)|^2 for Gaussian-family rho (definite parity) and
  // real f; with a symmetric b-cap the a<0 half contributes the same mass.
  const bool parity_fold =
      rho.has_fourier() && (b_lo_cap == -b_hi_cap ||
                            (std::isinf(b_lo_cap) && std::isinf(b_hi_cap)));
  const int signs = parity_fold ? 1 : 2;
  const int n_rows = static_cast<int>(an.size()) * signs;
  std::vector<double> row_values(n_rows, 0.0);
  parallel_for(n_rows, jobs, [&](int r) {
    const int sign = (r % signs == 0) ? 1 : -1;
    const double a = sign * an[r / signs];
    row_values[r] = row_mass(f, rho, a, b_lo_cap, b_hi_cap, density, fspec);
  });
  double total = 0.0;
  for (int r = 0; r < n_rows; ++r) total += aw[r / signs] * row_values[r];
  return parity_fold ? 2.0 * total : total;
}

struct MassResult {
  double mass = 0.0;
  double a_extent = 0.0;
  double tail_estimate = 0.0;
};

/// Sum octave masses until the ratio-extrapolated remainder is below
/// tol_abs, or the |a| cap is reached.
inline MassResult accumulate_mass(const Target& f, const Activation& rho,
                                  double a_cap, double b_lo, double b_hi,
                                  double tol_abs, double density,
                                  const BoxQuadSpec& box,
                                  const QuadratureSpec& fspec) {
  MassResult res;
  double lo = 0.0;
  double hi = std::min(box.first_octave, a_cap);
  double prev = -1.0;
  for (int oct = 0; oct < box.max_octaves; ++oct) {
    const double piece =
        octave_mass(f, rho, lo, hi, b_lo, b_hi, density, box.jobs, fspec);
    res.mass += piece;
    res.a_extent = hi;
    if (hi >= a_cap) {
      res.tail_estimate = 0.0;  // box reached; nothing beyond by definition
      return res;
    }
    if (prev > 0.0 && piece < prev) {
      const double ratio = piece / prev;
      const double tail = piece * ratio / (1.0 - ratio);
      res.tail_estimate = tail;
      if (tail <= tol_abs && piece <= tol_abs) return res;
    } else if (piece == 0.0 && res.mass == 0.0 && oct >= 2) {
      return res;  // identically zero spectrum (f == 0)
    }
    prev = piece;
    lo = hi;
    hi = std::min(hi * 2.0, a_cap);
  }
  throw EnlargeBoxError("spectrum mass did not converge within the |a| octave budget",
                        res.a_extent * 2.0, std::max(std::abs(b_lo), std::abs(b_hi)));
}

}  // namespace detail

/// || R[f] ||^2 over the box { |a| <= lambda } x { |b| <= kappa/2 }, by the
/// octave/row quadrature with one density refinement as error control.
inline double spectrum_mass_in_box(const Target& f, const Activation& rho,
                                   double lambda, double kappa,
                                   const BoxQuadSpec& box = {},
                                   const QuadratureSpec& fspec = {}) {
  if (!(lambda > 0.0) || !(kappa > 0.0)) return 0.0;
  const double scale = f.is_gaussian_family() ? f.l2_norm_squared_analytic()
                                              : std::pow(f.l2_norm(fspec), 2);
  const double tol_abs = 0.25 * box.rel_tol * std::max(scale, 1e-300);
  double prev = -1.0;
  for (double density = box.base_density; density <= box.max_density;
       density *= box.ladder_step) {
    const auto res = detail::accumulate_mass(f, rho, lambda, -0.5 * kappa, 0.5 * kappa,
                                             tol_abs, density, box, fspec);
    if (prev >= 0.0 && std::abs(res.mass - prev) <= box.rel_tol * std::max(scale, prev)) {
      return res.mass;
    }
    prev = res.mass;
  }
  throw ToleranceError("spectrum box mass did not converge under refinement", prev, 0.0);
}

/// Relative Plancherel gap | ||R[f]||_grid - ||f||_2 | / ||f||_2 with the
/// (a, b) box auto-grown until the ratio-extrapolated tail is negligible.
inline double plancherel_gap(const Target& f, const AdmissiblePair& pair,
                             const BoxQuadSpec& box = {},
                             const QuadratureSpec& fspec = {}) {
  if (!pair.self_admissible) {
    throw PreconditionError("plancherel_gap requires a self-admissible rho");
  }
  const double f_l2 = f.is_gaussian_family() ? std::sqrt(f.l2_norm_squared_analytic())
                                             : f.l2_norm(fspec);
  if (!(f_l2 > 0.0)) {
    throw UndefinedMetricError("plancherel gap undefined for the zero function");
  }
  const double tol_abs = 0.2 * box.rel_tol * f_l2 * f_l2;
  const double inf = std::numeric_limits<double>::infinity();
  double prev = -1.0;
  for (double density = box.base_density; density <= box.max_density;
       density *= box.ladder_step) {
    const auto res = detail::accumulate_mass(f, pair.rho, inf, -inf, inf, tol_abs,
                                             density, box, fspec);
    const double mass = res.mass + res.tail_estimate;
    if (prev >= 0.0 && std::abs(mass - prev) <= 0.25 * box.rel_tol * f_l2 * f_l2) {
      return std::abs(std::sqrt(std::max(0.0, mass)) - f_l2) / f_l2;
    }
    prev = mass;
  }
  throw ToleranceError("plancherel mass did not converge under refinement",
                       std::sqrt(std::max(0.0, prev)), 0.0);
}

/// S[R[f]](x) over the truncated box, for a whole grid of x at once (the
/// spectrum rows are shared). Returns real values; f and rho are real.
inline std::vector<double> reconstruct_many(const Target& f, const AdmissiblePair& pair,
                                            const std::vector<double>& xs,
                                            const BoxQuadSpec& box = {},
                                            const QuadratureSpec& fspec = {}) {
  if (std::abs(pair.k_adm - 1.0) > 1e-6) {
    throw PreconditionError("reconstruct needs an admissible pair (K_adm == 1)");
  }
  // reference amplitude for tolerances
  double f_sup = 0.0;
  {
    const auto [lo, hi] = f.effective_support();
    for (int i = 0; i <= 64; ++i) {
      f_sup = std::max(f_sup, std::abs(f(lo + (hi - lo) * i / 64.0)));
    }
  }
  if (f_sup == 0.0) return std::vector<double>(xs.size(), 0.0);
  const double tol_abs = 0.25 * box.rel_tol * f_sup;

  // For parity-even pairs (all valid Gaussian-family pairs: the admissibility
  // integral vanishes otherwise) the a<0 half-plane duplicates the a>0 one.
  const bool parity_fold =
      pair.rho.has_fourier() && pair.sigma.has_fourier() &&
      (pair.rho.order() + pair.sigma.order()) % 2 == 0;
  const int signs = parity_fold ? 1 : 2;
  std::vector<double> prev;
  for (double density = box.base_density; density <= box.max_density;
       density *= box.ladder_step) {
    std::vector<double> acc(xs.size(), 0.0);
    double lo = 0.0;
    double hi = box.first_octave;
    double prev_piece = -1.0;
    bool done = false;
    std::vector<double> an, aw;
    for (int oct = 0; oct < box.max_octaves && !done; ++oct) {
      double piece_max = 0.0;
      std::vector<double> piece(xs.size(), 0.0);
      const long a_panels = density < 2.0 ? 2 : 3;
      panel_nodes(QuadratureRule::GaussLegendre, 16, lo, hi, a_panels, an, aw);
      const int n_rows = static_cast<int>(an.size()) * signs;
      std::vector<std::vector<double>> row_vals(n_rows);
      const double x_min = *std::min_element(xs.begin(), xs.end());
      const double x_max = *std::max_element(xs.begin(), xs.end());
      // reach of sigma: |sigma(z)| is negligible past this many z-units
      const double sig_reach = 10.0 * pair.sigma.envelope_tau() *
                               (1.0 + 0.3 * pair.sigma.order());
      parallel_for(n_rows, box.jobs, [&](int r) {
        const int sign = (r % signs == 0) ? 1 : -1;
        const double a = sign * an[r / signs];
        auto win = detail::row_b_window(f, pair.rho, a);
        // only b reachable from some grid x through sigma contributes
        detail::clip_window(win, std::min(a * x_min, a * x_max) - sig_reach,
                            std::max(a * x_min, a * x_max) + sig_reach);
        auto& vals = row_vals[r];
        vals.assign(xs.size(), 0.0);
        if (!(win.second > win.first)) return;
        const double sig_scale = pair.sigma.envelope_tau();
        const double scale = std::min(detail::row_b_scale(f, pair.rho, a), sig_scale);
        const long panels = static_cast<long>(
            std::ceil(((win.second - win.first) / (3.0 * scale) + 1.0) * density));
        std::vector<double> bn, bw;
        panel_nodes(QuadratureRule::GaussLegendre, 16, win.first, win.second, panels,
                    bn, bw);
        detail::SpectrumRow row;
        row.build(f, pair.rho, a, std::max(std::abs(win.first), std::abs(win.second)),
                  density, fspec);
        std::vector<std::complex<double>> rv;
        row.eval_many(bn, rv);
        for (std::size_t q = 0; q < xs.size(); ++q) {
          const double ax = a * xs[q];
          // sigma-windowed b sub-range (bn is sorted ascending)
          const auto j0 = std::lower_bound(bn.begin(), bn.end(), ax - sig_reach);
          const auto j1 = std::upper_bound(bn.begin(), bn.end(), ax + sig_reach);
          double s = 0.0;
          for (std::size_t j = j0 - bn.begin(); j < static_cast<std::size_t>(j1 - bn.begin()); ++j) {
            s += bw[j] * rv[j].real() * pair.sigma(ax - bn[j]);
          }
          vals[q] = s;
        }
      });
      const double fold = parity_fold ? 2.0 : 1.0;
      for (int r = 0; r < n_rows; ++r) {
        for (std::size_t q = 0; q < xs.size(); ++q) {
          piece[q] += fold * aw[r / signs] * row_vals[r][q];
        }
      }
      for (std::size_t q = 0; q < xs.size(); ++q) {
        acc[q] += piece[q];
        piece_max = std::max(piece_max, std::abs(piece[q]));
      }
      if (prev_piece >= 0.0 && piece_max < prev_piece) {
        const double ratio = piece_max / std::max(prev_piece, 1e-300);
        const double tail = piece_max * ratio / std::max(1.0 - ratio, 0.25);
        if (tail <= tol_abs && piece_max <= tol_abs) done = true;
      }
      prev_piece = piece_max;
      lo = hi;
      hi *= 2.0;
    }
    if (!done) {
      throw EnlargeBoxError("reconstruction octaves did not converge; enlarge the box",
                            hi * 2.0, hi);
    }
    if (!prev.empty()) {
      double diff = 0.0;
      for (std::size_t q = 0; q < xs.size(); ++q) {
        diff = std::max(diff, std::abs(acc[q] - prev[q]));
      }
      if (diff <= box.rel_tol * f_sup) return acc;
    }
    prev = std::move(acc);
  }
  throw ToleranceError("reconstruction did not converge under density refinement",
                       0.0, 0.0);
}

inline double reconstruct(const Target& f, const AdmissiblePair& pair, double x,
                          const BoxQuadSpec& box = {},
                          const QuadratureSpec& fspec = {}) {
  return reconstruct_many(f, pair, {x}, box, fspec)[0];
}

/// R[f] on a tensor grid, for heatmap export. Cell errors are recorded per
/// row (difference of the two finest frequency refinements), not fatal.
struct SpectrumGrid {
  std::vector<double> a_nodes, b_nodes;
  Eigen::MatrixXcd values;          // (a index, b index)
  std::vector<double> row_error;    // per a-row refinement delta
  json metadata;

  void export_csv(const std::string& path) const {
    CsvWriter csv(path, {"a", "b", "re", "im", "magnitude"});
    for (std::size_t i = 0; i < a_nodes.size(); ++i) {
      for (std::size_t j = 0; j < b_nodes.size(); ++j) {
        const auto v = values(i, j);
        csv.row({a_nodes[i], b_nodes[j], v.real(), v.imag(), std::abs(v)});
      }
    }
  }
};

inline SpectrumGrid spectrum_grid(const Target& f, const Activation& rho,
                                  double a_lo, double a_hi, double b_lo, double b_hi,
                                  int res_a, int res_b,
                                  const QuadratureSpec& fspec = {}) {
  if (res_a < 2 || res_b < 2) throw UsageError("spectrum grid needs resolution >= 2");
  SpectrumGrid grid;
  grid.a_nodes.resize(res_a);
  grid.b_nodes.resize(res_b);
  for (int i = 0; i < res_a; ++i) {
    grid.a_nodes[i] = a_lo + (a_hi - a_lo) * i / (res_a - 1);
  }
  for (int j = 0; j < res_b; ++j) {
    grid.b_nodes[j] = b_lo + (b_hi - b_lo) * j / (res_b - 1);
  }
  grid.values.resize(res_a, res_b);
  grid.row_error.assign(res_a, 0.0);
  const double b_absmax = std::max(std::abs(b_lo), std::abs(b_hi));
  detail::SpectrumRow row;
  std::vector<std::complex<double>> coarse(res_b), fine(res_b);
  for (int i = 0; i < res_a; ++i) {
    const double a = grid.a_nodes[i];
    row.build(f, rho, a, b_absmax, 1, fspec);
    row.eval_many(grid.b_nodes, coarse);
    row.build(f, rho, a, b_absmax, 2, fspec);
    row.eval_many(grid.b_nodes, fine);
    double err = 0.0;
    for (int j = 0; j < res_b; ++j) {
      err = std::max(err, std::abs(fine[j] - coarse[j]));
      grid.values(i, j) = fine[j];
    }
    grid.row_error[i] = err;
  }
  grid.metadata = {{"target", f.descriptor()},
                   {"rho", rho.descriptor()},
                   {"a_range", {a_lo, a_hi}},
                   {"b_range", {b_lo, b_hi}},
                   {"resolution", {res_a, res_b}}};
  return grid;
}

/// Polar reconstruction for k-homogeneous activations, m = k = 1:
///   f(x) = c * sum_{u in {-1,+1}} Int (-f''(t u)) (u x - t)_+ dt,  c = -1/2.
/// Integration by parts shows the identity for decaying twice-differentiable f.
inline double homogeneous_reconstruct(const Target& f, int k, double x,
                                      const QuadratureSpec& spec = {}) {
  if (k != 1 || f.dimension() != 1) {
    throw NotImplementedError("homogeneous reconstruction supports (m, k) = (1, 1) only");
  }
  const auto [lo0, hi0] = f.effective_support();
  // widen: f'' reaches slightly past the 1e-16 envelope of f
  const double pad = 0.1 * (hi0 - lo0) + 1.0;
  const double lo = lo0 - pad, hi = hi0 + pad;
  const double c = -0.5;
  double total = 0.0;
  for (int u = -1; u <= 1; u += 2) {
    // f''(t u) lives on [lo, hi] for u = +1 and on [-hi, -lo] for u = -1;
    // the ramp (u x - t)_+ restricts to t < u x.
    const double t_lo = u > 0 ? lo : -hi;
    const double t_hi = u > 0 ? hi : -lo;
    const double upper = std::min(t_hi, u * x);
    if (upper <= t_lo) continue;
    auto est = integrate(
        [&](double t) { return -f.second_derivative(t * u) * (u * x - t); }, t_lo,
        upper, spec);
    total += est.value;
  }
  return c * total;
}

}  // namespace ridgebound
