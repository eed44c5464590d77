#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "ridgebound/random_net.hpp"

using namespace ridgebound;

TEST_CASE("sample_hidden: box constraints and determinism") {
  const ParameterDomain d{1.0, 2.0, 1};
  const HiddenLayer h = sample_hidden(d, 3, 7);
  for (int j = 0; j < 3; ++j) {
    CHECK(std::abs(h.a(j, 0)) <= 1.0);
    CHECK(std::abs(h.b(j)) <= 1.0);
  }
  const HiddenLayer h2 = sample_hidden(d, 3, 7);
  CHECK(h.a == h2.a);
  CHECK(h.b == h2.b);
}

TEST_CASE("sample_hidden: uniform moments at lambda = 20") {
  const int p = 10000;
  const double lambda = 20.0;
  const HiddenLayer h = sample_hidden({lambda, 40.0, 1}, p, 123);
  const double mean = h.a.col(0).mean();
  // Var(U(-L, L)) = L^2 / 3; the sample mean concentrates within 3 sigma/sqrt(p)
  CHECK(std::abs(mean) <= 3.0 * lambda / std::sqrt(3.0 * p));
}

TEST_CASE("sample_hidden: lambda = 0 degenerates without error") {
  const HiddenLayer h = sample_hidden({0.0, 2.0, 1}, 5, 9);
  CHECK(h.a.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("sample_hidden: widening keeps the prefix") {
  const ParameterDomain d{3.0, 6.0, 1};
  const HiddenLayer narrow = sample_hidden(d, 10, 42);
  const HiddenLayer wide = sample_hidden(d, 25, 42);
  CHECK(wide.a.topRows(10) == narrow.a);
  CHECK(wide.b.head(10) == narrow.b);
}

TEST_CASE("sample_hidden_excluding: keeps nothing inside the inner box") {
  const ParameterDomain outer{2.0, 4.0, 1};
  const ParameterDomain inner{1.0, 2.0, 1};
  const HiddenLayer h = sample_hidden_excluding(outer, inner, 1000, 5);
  for (int j = 0; j < 1000; ++j) {
    const bool inside = std::abs(h.a(j, 0)) <= 1.0 && std::abs(h.b(j)) <= 1.0;
    CHECK_FALSE(inside);
    CHECK(std::abs(h.a(j, 0)) <= 2.0);
    CHECK(std::abs(h.b(j)) <= 2.0);
  }
}

TEST_CASE("sample_hidden_excluding: degenerate inner = outer rejected") {
  const ParameterDomain outer{2.0, 4.0, 1};
  CHECK_THROWS_AS(sample_hidden_excluding(outer, outer, 10, 1), ConfigError);
}

TEST_CASE("sample_hidden_excluding: tiny inner box approaches U(outer)") {
  // Kolmogorov-Smirnov check of the a marginal against U(-2, 2), n = 1e4.
  const ParameterDomain outer{2.0, 4.0, 1};
  const ParameterDomain inner{1e-9, 1e-9, 1};
  const int n = 10000;
  const HiddenLayer h = sample_hidden_excluding(outer, inner, n, 17);
  std::vector<double> a(h.a.col(0).data(), h.a.col(0).data() + n);
  std::sort(a.begin(), a.end());
  double ks = 0.0;
  for (int i = 0; i < n; ++i) {
    const double cdf = (a[i] + 2.0) / 4.0;
    ks = std::max(ks, std::abs(cdf - (i + 1.0) / n));
    ks = std::max(ks, std::abs(cdf - static_cast<double>(i) / n));
  }
  // critical value at alpha = 0.001 is ~1.95 / sqrt(n)
  CHECK(ks <= 1.95 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("design_matrix entries") {
  HiddenLayer h;
  h.domain = {1.0, 2.0, 1};
  h.a.resize(3, 1);
  h.b.resize(3);
  h.a << 0.0, 1.0, 1.0;
  h.b << 0.0, 0.0, 0.0;
  Eigen::VectorXd x(2);
  x << -1.0, std::log(3.0) / 2.0;

  const Eigen::MatrixXd gs = design_matrix(h, x, Activation::sigmoid());
  CHECK(gs(0, 0) == Catch::Approx(0.5));
  CHECK(gs(1, 0) == Catch::Approx(0.5));

  const Eigen::MatrixXd gr = design_matrix(h, x, Activation::relu());
  CHECK(gr(0, 1) == 0.0);

  const Eigen::MatrixXd gt = design_matrix(h, x, Activation::tanh_act());
  CHECK(gt(1, 2) == Catch::Approx(0.5).epsilon(1e-14));  // tanh(ln 3 / 2)
}

TEST_CASE("fit_output: exact recovery when y lies in the column span") {
  Rng rng(3);
  Eigen::MatrixXd g(20, 5);
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 5; ++j) g(i, j) = rng.normal();
  Eigen::VectorXd c_true(5);
  c_true << 1.0, -2.0, 0.5, 0.0, 3.0;
  const Eigen::VectorXd y = g * c_true;
  const auto fit = fit_output(g, y, {});
  CHECK(fit.residual <= 1e-10 * y.norm());
  CHECK((fit.coeffs - c_true).norm() < 1e-8);
}

TEST_CASE("fit_output: single column reduces to the normal equation") {
  Rng rng(4);
  Eigen::MatrixXd g(30, 1);
  Eigen::VectorXd y(30);
  for (int i = 0; i < 30; ++i) {
    g(i, 0) = rng.normal();
    y(i) = rng.normal();
  }
  const auto fit = fit_output(g, y, {});
  const double oracle = g.col(0).dot(y) / g.col(0).squaredNorm();
  CHECK(fit.coeffs(0) == Catch::Approx(oracle).epsilon(1e-12));
}

TEST_CASE("fit_output: overparameterized generic design interpolates") {
  Rng rng(5);
  const int n = 40, p = 120;
  Eigen::MatrixXd g(n, p);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    y(i) = rng.normal();
    for (int j = 0; j < p; ++j) g(i, j) = rng.normal();
  }
  const auto fit = fit_output(g, y, {});
  CHECK(fit.rank == n);
  CHECK(fit.residual <= 1e-10 * y.norm());
}

TEST_CASE("fit_output: all-zero design is flagged, not fatal") {
  const Eigen::MatrixXd g = Eigen::MatrixXd::Zero(10, 4);
  Eigen::VectorXd y = Eigen::VectorXd::Ones(10);
  const auto fit = fit_output(g, y, {});
  CHECK(fit.zero_design);
  CHECK(fit.coeffs.norm() == 0.0);
  CHECK(fit.residual == Catch::Approx(y.norm()));
}

TEST_CASE("fit_output: minimum-norm property against null-space perturbations") {
  Rng rng(6);
  const int n = 15, p = 40;
  Eigen::MatrixXd g(n, p);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    y(i) = rng.normal();
    for (int j = 0; j < p; ++j) g(i, j) = rng.normal();
  }
  const auto fit = fit_output(g, y, {});
  Eigen::BDCSVD<Eigen::MatrixXd> svd(g, Eigen::ComputeFullV);
  const Eigen::MatrixXd null_basis = svd.matrixV().rightCols(p - n);
  for (int k = 0; k < 5; ++k) {
    Eigen::VectorXd mix(p - n);
    for (int j = 0; j < p - n; ++j) mix(j) = rng.normal();
    const Eigen::VectorXd perturbed = fit.coeffs + null_basis * mix;
    CHECK((g * perturbed - y).norm() <= fit.residual + 1e-9 * y.norm());
    CHECK(perturbed.norm() >= fit.coeffs.norm() - 1e-12);
  }
}

TEST_CASE("fit_output: ridge approaches the min-norm solution as eps -> 0") {
  Rng rng(8);
  const int n = 50, p = 12;  // full column rank
  Eigen::MatrixXd g(n, p);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    y(i) = rng.normal();
    for (int j = 0; j < p; ++j) g(i, j) = rng.normal();
  }
  const auto svd_fit = fit_output(g, y, {});
  double prev = 1e100;
  for (double eps : {1e-2, 1e-4, 1e-6}) {
    TrainConfig tc;
    tc.solver = Solver::Ridge;
    tc.ridge_eps = eps;
    const auto ridge_fit = fit_output(g, y, tc);
    const double dist = (ridge_fit.coeffs - svd_fit.coeffs).norm();
    CHECK(dist < prev);
    prev = dist;
  }
  CHECK(prev < 1e-6 * std::max(1.0, svd_fit.coeffs.norm()));
}

TEST_CASE("nested-width monotonicity of the training residual") {
  const Target f = Target::sim_mixture(0.1);
  const Dataset data = Dataset::from_target(f, 200, 100, 21);
  const Eigen::VectorXd tx = data.train_x(), ty = data.train_y();
  const ParameterDomain d{5.0, 10.0, 1};
  double prev_residual = 1e100;
  for (int p : {10, 20, 40, 80}) {
    const HiddenLayer h = sample_hidden(d, p, 77);  // same seed: nested columns
    const auto fit = fit_output(design_matrix(h, tx, Activation::sigmoid()), ty, {});
    CHECK(fit.residual <= prev_residual + 1e-9);
    prev_residual = fit.residual;
  }
}

TEST_CASE("relative_error basics") {
  Eigen::VectorXd y(3), p0(3), pz(3);
  y << 1.0, 2.0, -2.0;
  p0 = y;
  pz.setZero();
  CHECK(relative_error(p0, y) == 0.0);
  CHECK(relative_error(pz, y) == 1.0);
  CHECK_THROWS_AS(relative_error(p0, Eigen::VectorXd::Zero(3)), UndefinedMetricError);
  // scale equivariance
  const Eigen::VectorXd p = 0.7 * y;
  CHECK(relative_error(3.0 * p, 3.0 * y) == Catch::Approx(relative_error(p, y)));
}

TEST_CASE("dataset: split is disjoint and exhaustive, grid inclusive") {
  const Dataset d = Dataset::from_target(Target::chirp(), 100, 40, 11);
  CHECK(d.x(0) == 0.0);
  CHECK(d.x(99) == 1.0);
  std::vector<int> seen(100, 0);
  for (int i : d.order) seen[i]++;
  CHECK(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
}

TEST_CASE("prune_and_refit: empty inner domain changes nothing") {
  const Target f = Target::sim_mixture(0.1);
  const Dataset data = Dataset::from_target(f, 200, 100, 33);
  const Eigen::VectorXd tx = data.train_x(), ty = data.train_y();
  RandomNet net;
  net.activation = Activation::sigmoid();
  net.hidden = sample_hidden({5.0, 10.0, 1}, 50, 3);
  net.c = fit_output(design_matrix(net.hidden, tx, net.activation), ty, {}).coeffs;

  auto [same, report] = prune_and_refit(net, tx, ty, {0.0, 0.0, 1}, {});
  CHECK(report.removed == 0);
  CHECK(report.prediction_diff == 0.0);

  CHECK_THROWS_AS(prune_and_refit(net, tx, ty, net.hidden.domain, {}), ConfigError);
}

TEST_CASE("prune_and_refit: removal count near the binomial expectation") {
  const Target g = Target::chirp();
  const Dataset data = Dataset::from_target(g, 400, 200, 55);
  const Eigen::VectorXd tx = data.train_x(), ty = data.train_y();
  RandomNet net;
  net.activation = Activation::sigmoid();
  net.hidden = sample_hidden({100.0, 200.0, 1}, 300, 8);
  net.c = fit_output(design_matrix(net.hidden, tx, net.activation), ty, {}).coeffs;
  auto [pruned, report] = prune_and_refit(net, tx, ty, {30.0, 60.0, 1}, {});
  // expectation 300 * 0.3 * 0.3 = 27; allow ~4 sigma of binomial noise
  CHECK(report.removed >= 8);
  CHECK(report.removed <= 60);
  CHECK(pruned.hidden.width() + report.removed == 300);
}

TEST_CASE("gd_train: zero learning rate leaves parameters at initialization") {
  Eigen::VectorXd x(20), y(20);
  for (int i = 0; i < 20; ++i) {
    x(i) = i / 19.0;
    y(i) = std::sin(x(i));
  }
  GdConfig cfg;
  cfg.width = 4;
  cfg.steps = 50;
  cfg.learning_rate = 0.0;
  cfg.seed = 5;
  const auto run = gd_train(x, y, Activation::tanh_act(), cfg);
  // reconstruct the initialization from the same seed
  Rng rng(5);
  for (int j = 0; j < 4; ++j) CHECK(run.params[j].a == 0.5 * rng.normal());
  for (int j = 0; j < 4; ++j) CHECK(run.params[j].b == 0.5 * rng.normal());
  for (int j = 0; j < 4; ++j) CHECK(run.params[j].c == 0.5 * rng.normal());
  CHECK(run.final_loss == run.initial_loss);
}

TEST_CASE("gd_train: fits a linear target with two ReLU units") {
  Eigen::VectorXd x(50), y(50);
  for (int i = 0; i < 50; ++i) {
    x(i) = -1.0 + 2.0 * i / 49.0;
    y(i) = 0.6 * x(i) + 0.2;
  }
  GdConfig cfg;
  cfg.width = 2;
  cfg.steps = 20000;
  cfg.learning_rate = 0.02;
  cfg.seed = 12;
  const auto run = gd_train(x, y, Activation::relu(), cfg);
  CHECK(run.final_loss < 1e-4);
}

TEST_CASE("gd_train: deterministic under a fixed seed") {
  Eigen::VectorXd x(30), y(30);
  for (int i = 0; i < 30; ++i) {
    x(i) = i / 29.0;
    y(i) = std::cos(3.0 * x(i));
  }
  GdConfig cfg;
  cfg.width = 5;
  cfg.steps = 500;
  cfg.learning_rate = 0.05;
  cfg.seed = 31;
  const auto r1 = gd_train(x, y, Activation::tanh_act(), cfg);
  const auto r2 = gd_train(x, y, Activation::tanh_act(), cfg);
  for (int j = 0; j < 5; ++j) {
    CHECK(r1.params[j].a == r2.params[j].a);
    CHECK(r1.params[j].b == r2.params[j].b);
    CHECK(r1.params[j].c == r2.params[j].c);
  }
}

TEST_CASE("gd_train: divergence names the learning rate") {
  Eigen::VectorXd x(20), y(20);
  for (int i = 0; i < 20; ++i) {
    x(i) = i / 19.0;
    y(i) = std::sin(6.0 * x(i));
  }
  GdConfig cfg;
  cfg.width = 8;
  cfg.steps = 5000;
  cfg.learning_rate = 50.0;
  cfg.seed = 2;
  try {
    gd_train(x, y, Activation::tanh_act(), cfg);
    FAIL("expected divergence");
  } catch (const DivergenceError& e) {
    CHECK(std::string(e.what()).find("50") != std::string::npos);
  }
}

TEST_CASE("random net serializes to the documented JSON shape") {
  RandomNet net;
  net.activation = Activation::sigmoid();
  net.hidden = sample_hidden({2.0, 4.0, 1}, 3, 19);
  net.c = Eigen::VectorXd::Ones(3);
  const json j = net.to_json(Solver::MinNormSvd, 0.5, 0.6);
  CHECK(j.at("seed") == 19);
  CHECK(j.at("a").size() == 3);
  CHECK(j.at("b").size() == 3);
  CHECK(j.at("c").size() == 3);
  CHECK(j.at("solver") == "minnorm-svd");
  CHECK(j.at("domain").at("lambda") == 2.0);
  CHECK(j.at("residuals").at("train") == 0.5);
}
