#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "ridgebound/activation.hpp"
#include "ridgebound/errors.hpp"
#include "ridgebound/rng.hpp"
#include "ridgebound/target.hpp"

namespace ridgebound {

inline double unit_ball_volume(int m) {
  return std::pow(M_PI, 0.5 * m) / std::tgamma(0.5 * m + 1.0);
}

inline double sphere_surface(int m) {  // |S^{m-1}|
  return m * unit_ball_volume(m);
}

/// The sampling box V = { |a| <= lambda, |b| <= kappa/2 }.
struct ParameterDomain {
  double lambda = 1.0;
  double kappa = 2.0;
  int dim = 1;

  double volume() const {
    return unit_ball_volume(dim) * std::pow(lambda, dim) * kappa;
  }

  json to_json() const { return {{"lambda", lambda}, {"kappa", kappa}, {"dim", dim}}; }
  static ParameterDomain from_json(const json& j) {
    return {j.at("lambda"), j.at("kappa"), j.value("dim", 1)};
  }
};

/// Frozen hidden parameters. Regeneration from (seed, width, domain) is
/// bit-identical; rows are drawn sequentially so the first p rows of a wider
/// layer with the same seed coincide with the narrower layer.
struct HiddenLayer {
  Eigen::MatrixXd a;  // p x m
  Eigen::VectorXd b;  // p
  std::uint64_t seed = 0;
  ParameterDomain domain;

  int width() const { return static_cast<int>(b.size()); }
};

inline void sample_hidden_row(Rng& rng, const ParameterDomain& d, Eigen::MatrixXd& a,
                              int row, double& b_out) {
  if (d.dim == 1) {
    a(row, 0) = rng.uniform(-d.lambda, d.lambda);
  } else {
    // uniform in the |a| <= lambda ball: Gaussian direction, radius ~ u^{1/m}
    double norm2 = 0.0;
    for (int k = 0; k < d.dim; ++k) {
      a(row, k) = rng.normal();
      norm2 += a(row, k) * a(row, k);
    }
    const double norm = std::sqrt(std::max(norm2, 1e-300));
    const double r = d.lambda * std::pow(rng.uniform(), 1.0 / d.dim);
    a.row(row) *= r / norm;
  }
  b_out = rng.uniform(-0.5 * d.kappa, 0.5 * d.kappa);
}

inline HiddenLayer sample_hidden(const ParameterDomain& domain, int p,
                                 std::uint64_t seed) {
  if (p < 1) throw UsageError("hidden width must be >= 1");
  HiddenLayer h;
  h.seed = seed;
  h.domain = domain;
  h.a.resize(p, domain.dim);
  h.b.resize(p);
  Rng rng(seed);
  for (int j = 0; j < p; ++j) {
    sample_hidden_row(rng, domain, h.a, j, h.b(j));
  }
  return h;
}

/// Rejection sampling from U(outer), keeping (a, b) unless both the sup-norm
/// of a is inside the inner lambda and |b| is inside the inner kappa/2.
inline HiddenLayer sample_hidden_excluding(const ParameterDomain& outer,
                                           const ParameterDomain& inner, int p,
                                           std::uint64_t seed) {
  if (p < 1) throw UsageError("hidden width must be >= 1");
  if (!(inner.lambda < outer.lambda) || !(inner.kappa < outer.kappa)) {
    throw ConfigError("inner domain must be strictly inside the outer domain");
  }
  // acceptance probability for the product box (dim = 1)
  const double frac = (inner.lambda / outer.lambda) * (inner.kappa / outer.kappa);
  if (1.0 - frac < 1e-3) {
    throw ConfigError("rejection acceptance probability below 1e-3");
  }
  HiddenLayer h;
  h.seed = seed;
  h.domain = outer;
  h.a.resize(p, outer.dim);
  h.b.resize(p);
  Rng rng(seed);
  for (int j = 0; j < p; ++j) {
    while (true) {
      sample_hidden_row(rng, outer, h.a, j, h.b(j));
      const double a_inf = h.a.row(j).cwiseAbs().maxCoeff();
      const bool in_inner = a_inf <= inner.lambda && std::abs(h.b(j)) <= 0.5 * inner.kappa;
      if (!in_inner) break;
    }
  }
  return h;
}

/// Entry (i, j) = sigma(a_j . x_i - b_j).
inline Eigen::MatrixXd design_matrix(const HiddenLayer& hidden,
                                     const Eigen::VectorXd& x,
                                     const Activation& act) {
  const Eigen::Index n = x.size();
  const Eigen::Index p = hidden.b.size();
  Eigen::MatrixXd g(n, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const double aj = hidden.a(j, 0);
    const double bj = hidden.b(j);
    for (Eigen::Index i = 0; i < n; ++i) {
      g(i, j) = act(aj * x(i) - bj);
    }
  }
  return g;
}

enum class Solver { MinNormSvd, Ridge };

inline std::string solver_name(Solver s) {
  return s == Solver::MinNormSvd ? "minnorm-svd" : "ridge";
}

struct TrainConfig {
  int width = 100;  // p, a.k.a. L
  Solver solver = Solver::MinNormSvd;
  double svd_threshold = 1e-14;  // relative to the largest singular value
  double ridge_eps = 1e-8;
  std::uint64_t seed = 0;
};

struct FitResult {
  Eigen::VectorXd coeffs;
  double residual = 0.0;  // ||G c - y||_2
  Eigen::Index rank = 0;
  bool zero_design = false;  // all-zero design with nonzero y (flag, not error)
};

/// MinNormSvd: minimum-L2-norm least squares with singular values below
/// threshold * sigma_max treated as zero. Ridge: (G^T G + eps I)^{-1} G^T y.
inline FitResult fit_output(const Eigen::MatrixXd& design, const Eigen::VectorXd& y,
                            const TrainConfig& cfg) {
  if (design.rows() != y.size()) throw UsageError("design rows must match y size");
  if (!design.allFinite() || !y.allFinite()) {
    throw UsageError("fit_output requires finite design and targets");
  }
  FitResult r;
  if (design.lpNorm<Eigen::Infinity>() == 0.0) {
    r.coeffs = Eigen::VectorXd::Zero(design.cols());
    r.residual = y.norm();
    r.rank = 0;
    r.zero_design = y.norm() > 0.0;
    return r;
  }
  if (cfg.solver == Solver::Ridge) {
    const Eigen::MatrixXd gtg = design.transpose() * design;
    Eigen::MatrixXd reg = gtg;
    reg.diagonal().array() += cfg.ridge_eps;
    r.coeffs = reg.ldlt().solve(design.transpose() * y);
    r.rank = design.cols();
  } else {
    if (!(cfg.svd_threshold > 0.0 && cfg.svd_threshold < 1.0)) {
      throw UsageError("svd threshold must lie in (0, 1)");
    }
    Eigen::BDCSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(cfg.svd_threshold);
    r.coeffs = svd.solve(y);
    r.rank = svd.rank();
  }
  r.residual = (design * r.coeffs - y).norm();
  return r;
}

/// Trained shallow net: prediction is linear in c for the frozen hidden layer.
struct RandomNet {
  HiddenLayer hidden;
  Eigen::VectorXd c;
  Activation activation = Activation::sigmoid();

  double predict(double x) const {
    double v = 0.0;
    for (Eigen::Index j = 0; j < c.size(); ++j) {
      v += c(j) * activation(hidden.a(j, 0) * x - hidden.b(j));
    }
    return v;
  }

  Eigen::VectorXd predict(const Eigen::VectorXd& x) const {
    return design_matrix(hidden, x, activation) * c;
  }

  json to_json(Solver solver, double train_residual, double test_residual) const {
    json j;
    j["seed"] = hidden.seed;
    j["domain"] = hidden.domain.to_json();
    j["activation"] = activation.descriptor();
    j["a"] = std::vector<double>(hidden.a.data(), hidden.a.data() + hidden.a.size());
    j["b"] = std::vector<double>(hidden.b.data(), hidden.b.data() + hidden.b.size());
    j["c"] = std::vector<double>(c.data(), c.data() + c.size());
    j["solver"] = solver_name(solver);
    j["residuals"] = {{"train", train_residual}, {"test", test_residual}};
    return j;
  }
};

/// Equispaced samples on [0, 1] with a seeded uniform split permutation;
/// train and test index sets are disjoint and exhaustive.
struct Dataset {
  Eigen::VectorXd x, y;
  std::vector<int> order;
  int n_train = 0;
  std::uint64_t seed = 0;

  static Dataset from_target(const Target& f, int n, int n_train, std::uint64_t seed) {
    if (n < 2 || n_train < 1 || n_train >= n) throw UsageError("bad dataset sizes");
    Dataset d;
    d.x.resize(n);
    d.y.resize(n);
    for (int i = 0; i < n; ++i) {
      d.x(i) = static_cast<double>(i) / (n - 1);
      d.y(i) = f(d.x(i));
    }
    Rng rng(seed);
    d.order = rng.permutation(n);
    d.n_train = n_train;
    d.seed = seed;
    return d;
  }

  Eigen::VectorXd gather(bool train, const Eigen::VectorXd& src) const {
    const int begin = train ? 0 : n_train;
    const int count = train ? n_train : static_cast<int>(order.size()) - n_train;
    Eigen::VectorXd out(count);
    for (int i = 0; i < count; ++i) out(i) = src(order[begin + i]);
    return out;
  }

  Eigen::VectorXd train_x() const { return gather(true, x); }
  Eigen::VectorXd train_y() const { return gather(true, y); }
  Eigen::VectorXd test_x() const { return gather(false, x); }
  Eigen::VectorXd test_y() const { return gather(false, y); }
};

/// Euclidean relative error ||targets - predictions|| / ||targets||.
inline double relative_error(const Eigen::VectorXd& predictions,
                             const Eigen::VectorXd& targets) {
  const double denom = targets.norm();
  if (denom == 0.0) {
    throw UndefinedMetricError("relative error undefined for zero-norm targets");
  }
  return (targets - predictions).norm() / denom;
}

inline double relative_error(const RandomNet& net, const Eigen::VectorXd& x,
                             const Eigen::VectorXd& y) {
  return relative_error(net.predict(x), y);
}

struct PruneReport {
  int removed = 0;
  double prediction_diff = 0.0;  // ||pred_before - pred_after|| / ||pred_before||
};

/// Drop neurons whose (|a_j|, |b_j|) both fall inside the inner domain, then
/// refit the output weights of the survivors on the same training data.
inline std::pair<RandomNet, PruneReport> prune_and_refit(
    const RandomNet& net, const Eigen::VectorXd& train_x,
    const Eigen::VectorXd& train_y, const ParameterDomain& inner,
    const TrainConfig& cfg) {
  const int p = net.hidden.width();
  std::vector<int> keep;
  keep.reserve(p);
  for (int j = 0; j < p; ++j) {
    const double a_inf = net.hidden.a.row(j).cwiseAbs().maxCoeff();
    const bool inside = a_inf <= inner.lambda && std::abs(net.hidden.b(j)) <= 0.5 * inner.kappa;
    if (!inside) keep.push_back(j);
  }
  if (keep.empty()) throw ConfigError("prune_and_refit would remove every neuron");

  RandomNet pruned;
  pruned.activation = net.activation;
  pruned.hidden.seed = net.hidden.seed;
  pruned.hidden.domain = net.hidden.domain;
  pruned.hidden.a.resize(keep.size(), net.hidden.a.cols());
  pruned.hidden.b.resize(keep.size());
  for (std::size_t k = 0; k < keep.size(); ++k) {
    pruned.hidden.a.row(k) = net.hidden.a.row(keep[k]);
    pruned.hidden.b(k) = net.hidden.b(keep[k]);
  }
  const Eigen::MatrixXd g = design_matrix(pruned.hidden, train_x, net.activation);
  pruned.c = fit_output(g, train_y, cfg).coeffs;

  PruneReport report;
  report.removed = p - static_cast<int>(keep.size());
  const Eigen::VectorXd before = net.predict(train_x);
  const Eigen::VectorXd after = g * pruned.c;
  const double denom = before.norm();
  report.prediction_diff = denom > 0.0 ? (before - after).norm() / denom : 0.0;
  return {std::move(pruned), report};
}

struct GdConfig {
  int width = 10;
  long steps = 200000;
  double learning_rate = 0.05;
  double init_scale = 0.5;  // standard normal times this
  std::uint64_t seed = 0;
};

struct GdTriple {
  double a, b, c;
};

struct GdResult {
  std::vector<GdTriple> params;
  double initial_loss = 0.0;
  double final_loss = 0.0;
};

/// Full-batch gradient descent on mean squared error over all parameters.
inline GdResult gd_train(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                         const Activation& act, const GdConfig& cfg) {
  if (cfg.width < 1) throw UsageError("gd width must be >= 1");
  const Eigen::Index n = x.size();
  const int p = cfg.width;
  Rng rng(cfg.seed);
  Eigen::VectorXd a(p), b(p), c(p);
  for (int j = 0; j < p; ++j) a(j) = cfg.init_scale * rng.normal();
  for (int j = 0; j < p; ++j) b(j) = cfg.init_scale * rng.normal();
  for (int j = 0; j < p; ++j) c(j) = cfg.init_scale * rng.normal();

  Eigen::MatrixXd z(n, p), s(n, p), ds(n, p);
  auto loss_of = [&](const Eigen::VectorXd& resid) {
    return resid.squaredNorm() / static_cast<double>(n);
  };

  GdResult out;
  Eigen::VectorXd resid(n);
  for (long step = 0; step <= cfg.steps; ++step) {
    for (int j = 0; j < p; ++j) {
      for (Eigen::Index i = 0; i < n; ++i) {
        const double zij = a(j) * x(i) - b(j);
        z(i, j) = zij;
        s(i, j) = act(zij);
        ds(i, j) = act.grad(zij);
      }
    }
    resid = s * c - y;
    const double loss = loss_of(resid);
    if (step == 0) out.initial_loss = loss;
    if (!std::isfinite(loss) || loss > 1e6 * std::max(out.initial_loss, 1e-30)) {
      throw DivergenceError("gradient descent diverged at learning rate " +
                            format_double(cfg.learning_rate));
    }
    out.final_loss = loss;
    if (step == cfg.steps) break;
    const double scale = 2.0 / static_cast<double>(n);
    const Eigen::VectorXd grad_c = scale * (s.transpose() * resid);
    const Eigen::VectorXd rc = resid;  // n
    Eigen::VectorXd grad_a(p), grad_b(p);
    for (int j = 0; j < p; ++j) {
      double ga = 0.0, gb = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double t = rc(i) * c(j) * ds(i, j);
        ga += t * x(i);
        gb -= t;
      }
      grad_a(j) = scale * ga;
      grad_b(j) = scale * gb;
    }
    a -= cfg.learning_rate * grad_a;
    b -= cfg.learning_rate * grad_b;
    c -= cfg.learning_rate * grad_c;
  }
  out.params.resize(p);
  for (int j = 0; j < p; ++j) out.params[j] = {a(j), b(j), c(j)};
  return out;
}

}  // namespace ridgebound
