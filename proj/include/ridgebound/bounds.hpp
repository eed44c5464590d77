#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "ridgebound/decay.hpp"
#include "ridgebound/errors.hpp"
#include "ridgebound/random_net.hpp"
#include "ridgebound/ridgelet.hpp"
#include "ridgebound/target.hpp"

namespace ridgebound {

/// Closed-form approximation lower bound on ||f - g_p||_2^2.
///
/// AsPrinted evaluates the published display verbatim:
///   ||f||^2 - C0^2 V_m kappa lambda^m                  for lambda <= theta
///   ||f||^2 - (Cinf^2 kappa / 2s) { lambda^{-2s} + ((2s-m)/m) theta^{-2s} }
/// Corrected evaluates the branch produced by integrating the decay envelope
/// across the crossover (continuous at theta and monotone in lambda):
///   ||f||^2 - (Cinf^2 kappa / 2s) { ((2s+m)/m) theta^{-2s} - lambda^{-2s} }
/// The value may be negative; that regime is vacuous, not an error.
inline double lower_bound_closed_form(const BoundConstants& c, double lambda,
                                      double kappa, BoundMode mode) {
  if (lambda < 0.0 || kappa < 0.0) throw UsageError("lambda, kappa must be >= 0");
  if (lambda == 0.0 || kappa == 0.0) return c.f_l2_sq;
  const double th = theta(c, mode);
  if (lambda <= th) {
    return c.f_l2_sq - c.c0 * c.c0 * c.v_m * kappa * std::pow(lambda, c.m);
  }
  if (!(c.s > 0.0)) {
    throw PreconditionError("decaying branch needs s > 0");
  }
  const double pref = c.c_inf * c.c_inf * kappa / (2.0 * c.s);
  const double lam_term = std::pow(lambda, -2.0 * c.s);
  const double th_term = std::pow(th, -2.0 * c.s);
  const double bracket =
      mode == BoundMode::AsPrinted
          ? lam_term + (2.0 * c.s - c.m) / c.m * th_term
          : (2.0 * c.s + c.m) / c.m * th_term - lam_term;
  return c.f_l2_sq - pref * bracket;
}

/// Exact spectral-tail lower bound ||R[f]||^2_{L^2(V^c)} =
/// ||f||_2^2 - Int_V |R[f]|^2, clipped below at zero. Requires rho = sigma
/// (self-admissible) so the Plancherel identity applies.
inline double tail_bound_quadrature(const Target& f, const AdmissiblePair& pair,
                                    double lambda, double kappa,
                                    const BoxQuadSpec& box = {},
                                    const QuadratureSpec& fspec = {}) {
  if (!pair.self_admissible) {
    throw PreconditionError("tail bound requires a self-admissible rho (= sigma)");
  }
  const double f2 = f.is_gaussian_family() ? f.l2_norm_squared_analytic()
                                           : std::pow(f.l2_norm(fspec), 2);
  if (lambda <= 0.0 || kappa <= 0.0) return f2;  // empty box: full mass outside
  const double captured = spectrum_mass_in_box(f, pair.rho, lambda, kappa, box, fspec);
  return std::max(0.0, f2 - captured);
}

struct SweepRow {
  double lambda = 0.0;
  double kappa = 0.0;
  double s = 0.0;
  std::string mode;
  double closed_form = 0.0;
  double quadrature_tail = 0.0;
  double empirical_error = 0.0;  // dense-grid || f - g_p ||_2^2
  double train_rel_error = 0.0;
  bool vacuous = false;
};

struct SweepConfig {
  std::vector<double> lambdas{0.1, 0.5, 1.0, 2.0, 5.0, 20.0};
  double kappa_factor = 2.0;  // kappa = factor * lambda
  double s = 1.0;
  BoundMode mode = BoundMode::Corrected;
  int width = 2000;
  int dataset_n = 1000;
  int dataset_train = 500;
  std::uint64_t seed = 1;
  int dense_grid_n = 4001;
  int rho_order = 1;
  double rho_tau = 1.0;
};

/// For each lambda: train a random net whose activation equals the
/// self-admissible rho (so the tail bound applies verbatim), then record the
/// closed-form bound, the quadrature tail bound, the empirical relative
/// training error, and a dense-grid estimate of ||f - g_p||_2^2 over a domain
/// covering f's effective support and the data range.
inline std::vector<SweepRow> bound_vs_training(const Target& f, const SweepConfig& cfg,
                                               const BoxQuadSpec& box = {},
                                               const QuadratureSpec& fspec = {}) {
  const AdmissiblePair pair = make_self_admissible(cfg.rho_order, cfg.rho_tau, 1);
  const BoundConstants consts = compute_constants(f, pair.rho, cfg.s, 1, fspec);
  const Dataset data = Dataset::from_target(f, cfg.dataset_n, cfg.dataset_train, cfg.seed);
  const Eigen::VectorXd tx = data.train_x();
  const Eigen::VectorXd ty = data.train_y();

  const auto [supp_lo, supp_hi] = f.effective_support();
  const double grid_lo = std::min(supp_lo, -0.5);
  const double grid_hi = std::max(supp_hi, 1.5);

  std::vector<SweepRow> rows;
  for (std::size_t li = 0; li < cfg.lambdas.size(); ++li) {
    const double lambda = cfg.lambdas[li];
    const double kappa = cfg.kappa_factor * lambda;
    SweepRow row;
    row.lambda = lambda;
    row.kappa = kappa;
    row.s = cfg.s;
    row.mode = bound_mode_name(cfg.mode);
    row.closed_form = lower_bound_closed_form(consts, lambda, kappa, cfg.mode);
    row.vacuous = row.closed_form < 0.0;
    row.quadrature_tail = tail_bound_quadrature(f, pair, lambda, kappa, box, fspec);

    if (lambda > 0.0 && cfg.width > 0) {
      RandomNet net;
      net.activation = pair.sigma;
      net.hidden = sample_hidden({lambda, kappa, 1}, cfg.width,
                                 split_seed(cfg.seed, 1000 + li));
      const Eigen::MatrixXd g = design_matrix(net.hidden, tx, net.activation);
      TrainConfig tc;
      tc.width = cfg.width;
      net.c = fit_output(g, ty, tc).coeffs;
      row.train_rel_error = relative_error(g * net.c, ty);
      // dense-grid L2 error (squared), trapezoid on a uniform grid
      const int n = cfg.dense_grid_n;
      const double h = (grid_hi - grid_lo) / (n - 1);
      double acc = 0.0;
      for (int i = 0; i < n; ++i) {
        const double x = grid_lo + i * h;
        const double d = f(x) - net.predict(x);
        const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
        acc += w * d * d;
      }
      row.empirical_error = acc * h;
    } else {
      row.train_rel_error = 1.0;
      row.empirical_error = consts.f_l2_sq;
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace ridgebound
