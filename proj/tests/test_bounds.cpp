#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"
#include "ridgebound/bounds.hpp"
#include "ridgebound/rng.hpp"

using namespace ridgebound;

namespace {
const Target kNarrowBump = Target::gaussian_bump(0.5, 0.1, 1.0);

BoundConstants narrow_constants(double s) {
  const AdmissiblePair pair = make_self_admissible(2, 1.0, 1);
  return compute_constants(kNarrowBump, pair.rho, s, 1);
}
}  // namespace

TEST_CASE("constants: sphere-sum identity of C_{f,s}") {
  const BoundConstants c = narrow_constants(1.0);
  const double sum = c.c_f_s[0] * c.c_f_s[0] + c.c_f_s[1] * c.c_f_s[1];
  const double hs2 = c.f_hs * c.f_hs;
  CHECK(std::abs(sum - hs2) / hs2 <= 1e-6);
}

TEST_CASE("constants: C0 and C_rho_s against independent oracles") {
  const AdmissiblePair pair = make_self_admissible(2, 1.0, 1);
  const BoundConstants c = compute_constants(kNarrowBump, pair.rho, 1.0, 1);
  // C0 = ||f||_1 ||rho||_inf with ||f||_1 = 0.1 sqrt(2 pi)
  const double f_l1 = 0.1 * std::sqrt(2.0 * M_PI);
  CHECK(c.c0 == Catch::Approx(f_l1 * pair.rho.sup_norm()).epsilon(1e-10));
  // C_rho_s^2 = 1/(2 (2pi)^2) Int |rhohat|^2 |w|^{-2s} dw (m = 1)
  auto integrand = [&](double w) {
    const double m = std::abs(pair.rho.fourier(w));
    return m * m / (w * w);
  };
  const double oracle =
      2.0 * oracles::trapezoid(integrand, 1e-7, 12.0, 2000001) / (2.0 * kTwoPi * kTwoPi);
  CHECK(c.c_rho_s * c.c_rho_s == Catch::Approx(oracle).epsilon(1e-6));
}

TEST_CASE("constants: zero target zeroes C0 and C_inf") {
  const AdmissiblePair pair = make_self_admissible(2, 1.0, 1);
  const Target zero = Target::gaussian_bump(0.0, 1.0, 0.0);
  const BoundConstants c = compute_constants(zero, pair.rho, 1.0, 1);
  CHECK(c.c0 == 0.0);
  CHECK(c.c_inf == 0.0);
}

TEST_CASE("constants: divergent C_rho_s names the required vanishing order") {
  const Activation rho1 = make_self_admissible(1, 1.0, 1).rho;
  try {
    compute_constants(kNarrowBump, rho1, 2.0, 1);  // needs order > 1.5
    FAIL("expected divergence");
  } catch (const PreconditionError& e) {
    CHECK(std::string(e.what()).find("vanish") != std::string::npos);
  }
}

TEST_CASE("decay envelope: flat branch near r = 0 and continuity at crossover") {
  const BoundConstants c = narrow_constants(1.0);
  CHECK(decay_envelope(c, 1e-9) == c.c0);
  CHECK_THROWS_AS(decay_envelope(c, 0.0), UsageError);
  // crossover radius solves C0 = C_rho_s C_f_s r^{-s-1/2}
  const double r_star =
      std::pow(c.c_rho_s * c.c_f_s[0] / c.c0, 1.0 / (c.s + 0.5));
  const double lo = decay_envelope(c, r_star * (1.0 - 1e-9));
  const double hi = decay_envelope(c, r_star * (1.0 + 1e-9));
  CHECK(std::abs(lo - hi) <= 1e-7 * c.c0);
}

TEST_CASE("decay envelope dominates the measured spectrum (sampled)") {
  const AdmissiblePair pair = make_self_admissible(2, 1.0, 1);
  for (double s : {1.0, 2.0}) {
    const BoundConstants c = compute_constants(kNarrowBump, pair.rho, s, 1);
    Rng rng(71);
    for (int k = 0; k < 100; ++k) {
      const double r = rng.uniform(1e-3, 50.0);
      const int u = rng.uniform() < 0.5 ? 1 : -1;
      const double b = rng.uniform(-10.0, 10.0);
      const double mag = std::abs(ridgelet_fourier(kNarrowBump, pair.rho, r * u, b));
      CHECK(mag <= decay_envelope(c, r, u) * (1.0 + 1e-6));
    }
  }
}

TEST_CASE("theta: symmetric point, reciprocity, and branch equality") {
  BoundConstants c;
  c.s = 1.0;
  c.m = 1;
  c.v_m = 2.0;
  c.omega_m1 = 2.0;
  c.c0 = 0.7;
  c.c_inf = std::sqrt(1.0 * c.v_m) * c.c0;  // C_inf^2 = m V_m C0^2
  CHECK(theta(c, BoundMode::AsPrinted) == Catch::Approx(1.0).epsilon(1e-14));
  CHECK(theta(c, BoundMode::Corrected) == Catch::Approx(1.0).epsilon(1e-14));

  const BoundConstants real_c = narrow_constants(1.0);
  const double ta = theta(real_c, BoundMode::AsPrinted);
  const double tc = theta(real_c, BoundMode::Corrected);
  CHECK(ta * tc == Catch::Approx(1.0).epsilon(1e-12));
  // corrected theta satisfies the appendix crossover identity
  CHECK(real_c.c0 * real_c.c0 * real_c.omega_m1 * std::pow(tc, 2.0 * real_c.s + 1.0) ==
        Catch::Approx(real_c.c_inf * real_c.c_inf).epsilon(1e-10));

  // the two corrected branches agree at lambda = theta
  const double kappa = 3.0;
  const double from_flat = lower_bound_closed_form(real_c, tc * (1.0 - 1e-12), kappa,
                                                   BoundMode::Corrected);
  const double from_decay = lower_bound_closed_form(real_c, tc * (1.0 + 1e-12), kappa,
                                                    BoundMode::Corrected);
  CHECK(std::abs(from_flat - from_decay) <=
        1e-9 * std::max(std::abs(from_flat), 1e-30));

  BoundConstants zero;
  zero.c0 = 0.0;
  zero.c_inf = 0.0;
  CHECK_THROWS_AS(theta(zero, BoundMode::Corrected), PreconditionError);
}

TEST_CASE("closed form: lambda = 0 returns the full L2 mass") {
  const BoundConstants c = narrow_constants(1.0);
  CHECK(lower_bound_closed_form(c, 0.0, 5.0, BoundMode::Corrected) == c.f_l2_sq);
  CHECK(lower_bound_closed_form(c, 2.0, 0.0, BoundMode::AsPrinted) == c.f_l2_sq);
}

TEST_CASE("closed form: the printed display is evaluated verbatim") {
  const BoundConstants c = narrow_constants(1.0);
  const double lambda = 3.0 * c.theta_as_printed;  // decaying branch
  const double kappa = 2.0;
  const double printed = lower_bound_closed_form(c, lambda, kappa, BoundMode::AsPrinted);
  const double bracket = std::pow(lambda, -2.0 * c.s) +
                         (2.0 * c.s - 1.0) / 1.0 * std::pow(c.theta_as_printed, -2.0 * c.s);
  const double expected = c.f_l2_sq - c.c_inf * c.c_inf * kappa / (2.0 * c.s) * bracket;
  CHECK(printed == Catch::Approx(expected).epsilon(1e-14));
}

TEST_CASE("closed form: corrected mode is non-increasing in lambda") {
  const BoundConstants c = narrow_constants(1.0);
  const double th = c.theta_corrected;
  double prev = 1e300;
  for (int k = 0; k < 20; ++k) {
    const double lambda = th * std::pow(2.0, -3.0 + 6.0 * k / 19.0);
    const double v = lower_bound_closed_form(c, lambda, 4.0, BoundMode::Corrected);
    CHECK(v <= prev + 1e-12);
    prev = v;
  }
}

TEST_CASE("closed form: s = 0 rejects the decaying branch") {
  BoundConstants c = narrow_constants(1.0);
  c.s = 0.0;
  CHECK_THROWS_AS(
      lower_bound_closed_form(c, 10.0 * c.theta_corrected, 1.0, BoundMode::Corrected),
      PreconditionError);
}

TEST_CASE("tail bound: empty box, exhausted box, and a brute-force value") {
  const AdmissiblePair pair = make_self_admissible(1, 1.0, 1);
  const Target f = Target::gaussian_bump(0.0, 1.0, 1.0);
  const double f2 = f.l2_norm_squared_analytic();

  CHECK(tail_bound_quadrature(f, pair, 0.0, 4.0) == f2);
  CHECK(tail_bound_quadrature(f, pair, 2.0, 0.0) == f2);

  // generous box absorbs nearly all mass
  CHECK(tail_bound_quadrature(f, pair, 400.0, 60.0) <= 1e-3 * f2);

  // (lambda, kappa) = (2, 4) against a dense brute-force grid of |R|^2
  const double tail = tail_bound_quadrature(f, pair, 2.0, 4.0);
  const int na = 400, nb = 400;
  double mass = 0.0;
  for (int i = 0; i < na; ++i) {
    const double a = -2.0 + 4.0 * (i + 0.5) / na;
    for (int j = 0; j < nb; ++j) {
      const double b = -2.0 + 4.0 * (j + 0.5) / nb;
      const double r = oracles::ridgelet([&](double x) { return f(x); },
                                         [&](double z) { return pair.rho(z); }, a, b,
                                         -9.0, 9.0, 4001);
      mass += r * r;
    }
  }
  mass *= (4.0 / na) * (4.0 / nb);
  const double oracle_tail = std::max(0.0, f2 - mass);
  CHECK(tail == Catch::Approx(oracle_tail).margin(2e-4 * f2));
}

TEST_CASE("tail bound: non-increasing in lambda and kappa") {
  const AdmissiblePair pair = make_self_admissible(1, 1.0, 1);
  const Target f = Target::gaussian_bump(0.5, 0.3, 1.0);
  double prev = 1e300;
  for (int k = 1; k <= 10; ++k) {
    const double v = tail_bound_quadrature(f, pair, 0.4 * k, 4.0);
    CHECK(v <= prev + 1e-9);
    prev = v;
  }
  prev = 1e300;
  for (int k = 1; k <= 10; ++k) {
    const double v = tail_bound_quadrature(f, pair, 2.0, 0.8 * k);
    CHECK(v <= prev + 1e-9);
    prev = v;
  }
}

TEST_CASE("closed form lower-bounds the quadrature tail") {
  const AdmissiblePair pair = make_self_admissible(2, 1.0, 1);
  const Target f = kNarrowBump;
  const BoundConstants c = compute_constants(f, pair.rho, 1.0, 1);
  for (double lambda : {0.5, 2.0, 5.0, 12.0, 30.0}) {
    const double kappa = 2.0 * lambda;
    const double closed = lower_bound_closed_form(c, lambda, kappa, BoundMode::Corrected);
    const double tail = tail_bound_quadrature(f, pair, lambda, kappa);
    CHECK(closed <= tail + 1e-3 * c.f_l2_sq);
  }
}

TEST_CASE("bound_vs_training: inequality holds on a small sweep") {
  SweepConfig cfg;
  cfg.lambdas = {0.5, 2.0, 10.0};
  cfg.width = 300;
  cfg.dataset_n = 300;
  cfg.dataset_train = 150;
  cfg.dense_grid_n = 1501;
  cfg.seed = 5;
  const auto rows = bound_vs_training(Target::sim_mixture(0.1), cfg);
  REQUIRE(rows.size() == 3);
  double prev_tail = 1e300;
  for (const auto& r : rows) {
    CHECK(r.empirical_error >= r.quadrature_tail - 1e-3);
    CHECK(r.quadrature_tail <= prev_tail + 1e-9);
    prev_tail = r.quadrature_tail;
    CHECK(r.closed_form <= r.quadrature_tail + 1e-3 * rows.front().quadrature_tail + 1e-9);
  }
}

TEST_CASE("bound_vs_training: zero width degenerates to the full mass") {
  SweepConfig cfg;
  cfg.lambdas = {1.0};
  cfg.width = 0;
  const auto rows = bound_vs_training(Target::sim_mixture(0.2), cfg);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].empirical_error >= rows[0].quadrature_tail - 1e-9);
  CHECK(rows[0].train_rel_error == 1.0);
}
