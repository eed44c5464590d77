#pragma once

#include <chrono>
#include <filesystem>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "ridgebound/bounds.hpp"
#include "ridgebound/io.hpp"
#include "ridgebound/parallel.hpp"
#include "ridgebound/random_net.hpp"
#include "ridgebound/ridgelet.hpp"
#include "ridgebound/svg.hpp"
#include "ridgebound/target.hpp"

namespace ridgebound {

#ifndef RIDGEBOUND_VERSION
#define RIDGEBOUND_VERSION "0.0.0"
#endif

/// Parse a target descriptor string:
///   gaussian:center,scale,amplitude | mix:c,s,A;c,s,A;... | sim:sigma |
///   chirp | wsine:omega[,lo,hi] | tabulated:path.csv
inline Target parse_target(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string head = spec.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
  auto nums = [](const std::string& s) {
    std::vector<double> out;
    std::istringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (!tok.empty()) out.push_back(std::stod(tok));
    }
    return out;
  };
  if (head == "gaussian") {
    const auto v = nums(rest);
    if (v.size() != 3) throw UsageError("gaussian:center,scale,amplitude");
    return Target::gaussian_bump(v[0], v[1], v[2]);
  }
  if (head == "mix") {
    std::vector<Bump> bumps;
    std::istringstream ss(rest);
    std::string part;
    while (std::getline(ss, part, ';')) {
      const auto v = nums(part);
      if (v.size() != 3) throw UsageError("mix:c,s,A;c,s,A;...");
      bumps.push_back({v[0], v[1], v[2]});
    }
    return Target::gaussian_mix(std::move(bumps));
  }
  if (head == "sim") {
    const auto v = nums(rest);
    if (v.size() != 1) throw UsageError("sim:sigma");
    return Target::sim_mixture(v[0]);
  }
  if (head == "chirp") return Target::chirp();
  if (head == "wsine") {
    const auto v = nums(rest);
    if (v.size() == 1) return Target::windowed_sine(v[0]);
    if (v.size() == 3) return Target::windowed_sine(v[0], v[1], v[2]);
    throw UsageError("wsine:omega[,lo,hi]");
  }
  if (head == "tabulated") return Target::tabulated_from_csv(rest);
  throw UsageError("unknown target descriptor: " + spec);
}

/// Parse an activation descriptor: sigmoid | tanh | relu | gauss:tau |
/// dgauss:n,tau (self-normalized derivative-of-Gaussian when normalize).
inline Activation parse_activation(const std::string& spec, bool self_normalize = false) {
  const auto colon = spec.find(':');
  const std::string head = spec.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (head == "sigmoid") return Activation::sigmoid();
  if (head == "tanh") return Activation::tanh_act();
  if (head == "relu") return Activation::relu();
  if (head == "gauss") {
    return Activation::gaussian(rest.empty() ? 1.0 : std::stod(rest));
  }
  if (head == "dgauss") {
    std::istringstream ss(rest);
    std::string a, b;
    std::getline(ss, a, ',');
    std::getline(ss, b, ',');
    const int n = a.empty() ? 1 : std::stoi(a);
    const double tau = b.empty() ? 1.0 : std::stod(b);
    if (self_normalize) return make_self_admissible(n, tau, 1).rho;
    return Activation::gaussian_derivative(n, tau);
  }
  throw UsageError("unknown activation descriptor: " + spec);
}

inline Solver parse_solver(const std::string& s) {
  if (s == "minnorm-svd" || s == "svd") return Solver::MinNormSvd;
  if (s == "ridge") return Solver::Ridge;
  throw UsageError("unknown solver: " + s + " (expected minnorm-svd|ridge)");
}

namespace detail {

class StopWatch {
 public:
  StopWatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

inline std::filesystem::path ensure_dir(const std::string& out_dir) {
  std::filesystem::path p(out_dir);
  std::filesystem::create_directories(p);
  return p;
}

inline json manifest_skeleton(const std::string& experiment, const json& config) {
  return json{{"experiment", experiment},
              {"toolkit_version", RIDGEBOUND_VERSION},
              {"config", config}};
}

inline double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / v.size();
}

inline double stddev_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return std::sqrt(acc / (v.size() - 1));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Simulation 1: two-bump target, the four (lambda, L) configurations.
// ---------------------------------------------------------------------------

inline json sim1_default_config() {
  return json{{"sigma", 0.05},
              {"lambdas", {1.0, 1.0, 1.0, 20.0}},
              {"widths", {100, 500, 10000, 200}},
              {"n", 1000},
              {"train", 500},
              {"solver", "minnorm-svd"},
              {"threshold", 1e-14},
              {"seed", 20240001}};
}

inline json run_sim1(const json& config, const std::string& out_dir, int jobs = 1) {
  detail::StopWatch watch;
  const auto dir = detail::ensure_dir(out_dir);
  const double sigma = config.at("sigma");
  const std::vector<double> lambdas = config.at("lambdas");
  const std::vector<int> widths = config.at("widths");
  if (lambdas.size() != widths.size()) {
    throw UsageError("sim1 needs matching lambdas/widths lists");
  }
  const std::uint64_t seed = config.at("seed");
  const Target f = Target::sim_mixture(sigma);
  const Dataset data = Dataset::from_target(f, config.at("n"), config.at("train"),
                                            split_seed(seed, 0));
  TrainConfig tc;
  tc.solver = parse_solver(config.at("solver"));
  tc.svd_threshold = config.at("threshold");

  struct RunOut {
    double train_e, test_e;
    Eigen::VectorXd pred;
  };
  std::vector<RunOut> outs(lambdas.size());
  const Eigen::VectorXd tx = data.train_x(), ty = data.train_y();
  const Eigen::VectorXd vx = data.test_x(), vy = data.test_y();
  parallel_for(static_cast<int>(lambdas.size()), jobs, [&](int k) {
    RandomNet net;
    net.activation = Activation::sigmoid();
    net.hidden = sample_hidden({lambdas[k], 2.0 * lambdas[k], 1}, widths[k],
                               split_seed(seed, 100 + k));
    const Eigen::MatrixXd g = design_matrix(net.hidden, tx, net.activation);
    net.c = fit_output(g, ty, tc).coeffs;
    outs[k].train_e = relative_error(g * net.c, ty);
    outs[k].test_e = relative_error(net.predict(vx), vy);
    outs[k].pred = net.predict(data.x);
  });

  json runs = json::array();
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    std::ostringstream name;
    name << "predictions_lam" << lambdas[k] << "_L" << widths[k] << ".csv";
    CsvWriter csv(dir / name.str(), {"x", "target", "prediction", "is_train"});
    std::vector<char> is_train(data.x.size(), 0);
    for (int i = 0; i < data.n_train; ++i) is_train[data.order[i]] = 1;
    for (Eigen::Index i = 0; i < data.x.size(); ++i) {
      csv.row({data.x(i), data.y(i), outs[k].pred(i), static_cast<double>(is_train[i])});
    }
    runs.push_back({{"lambda", lambdas[k]},
                    {"L", widths[k]},
                    {"train_relative_error", outs[k].train_e},
                    {"test_relative_error", outs[k].test_e},
                    {"predictions_csv", name.str()}});

    SvgPlot plot(560, 360, 0.0, 1.0, -0.2, 0.8,
                 "sim1 lambda=" + format_double(lambdas[k]) + " L=" + std::to_string(widths[k]));
    std::vector<double> xs(data.x.data(), data.x.data() + data.x.size());
    std::vector<double> ys(data.y.data(), data.y.data() + data.y.size());
    std::vector<double> ps(outs[k].pred.data(), outs[k].pred.data() + outs[k].pred.size());
    plot.polyline(xs, ys, "#222");
    plot.polyline(xs, ps, "#d62728");
    plot.save((dir / (name.str() + ".svg")).string());
  }

  json manifest = detail::manifest_skeleton("sim1", config);
  manifest["runs"] = runs;
  manifest["wall_time_seconds"] = watch.seconds();
  write_json_file(dir / "manifest.json", manifest);
  return manifest;
}

// ---------------------------------------------------------------------------
// Simulation 2: the (lambda, sigma) mean relative training error table.
// ---------------------------------------------------------------------------

inline json sim2_default_config(const std::string& preset = "desk") {
  json cfg{{"lambdas", {0.1, 0.5, 1.0, 5.0, 10.0, 50.0, 100.0, 200.0}},
           {"sigmas", {0.01, 0.05, 0.1, 0.5}},
           {"n", 1000},
           {"train", 500},
           {"solver", "minnorm-svd"},
           {"threshold", 1e-14},
           {"seed", 20240002},
           {"preset", preset}};
  if (preset == "full") {
    cfg["L"] = 10000;
    cfg["trials"] = 50;
  } else {
    cfg["L"] = 2000;
    cfg["trials"] = 10;
  }
  return cfg;
}

inline json run_sim2(const json& config, const std::string& out_dir, int jobs = 1) {
  detail::StopWatch watch;
  const auto dir = detail::ensure_dir(out_dir);
  const std::vector<double> lambdas = config.at("lambdas");
  const std::vector<double> sigmas = config.at("sigmas");
  const int width = config.at("L");
  const int trials = config.at("trials");
  if (trials < 1) throw UsageError("sim2 needs trials >= 1");
  const std::uint64_t seed = config.at("seed");
  TrainConfig tc;
  tc.solver = parse_solver(config.at("solver"));
  tc.svd_threshold = config.at("threshold");
  const int n = config.at("n");
  const int n_train = config.at("train");

  const int cells = static_cast<int>(lambdas.size() * sigmas.size());
  std::vector<std::vector<double>> cell_errors(cells, std::vector<double>(trials, 0.0));
  parallel_for(cells * trials, jobs, [&](int job) {
    const int cell = job / trials;
    const int trial = job % trials;
    const double lambda = lambdas[cell / sigmas.size()];
    const double sigma = sigmas[cell % sigmas.size()];
    const Target f = Target::sim_mixture(sigma);
    const std::uint64_t trial_seed = split_seed(seed, static_cast<std::uint64_t>(job));
    const Dataset data = Dataset::from_target(f, n, n_train, split_seed(trial_seed, 0));
    RandomNet net;
    net.activation = Activation::sigmoid();
    net.hidden = sample_hidden({lambda, 2.0 * lambda, 1}, width, split_seed(trial_seed, 1));
    const Eigen::VectorXd tx = data.train_x(), ty = data.train_y();
    const Eigen::MatrixXd g = design_matrix(net.hidden, tx, net.activation);
    const auto fit = fit_output(g, ty, tc);
    cell_errors[cell][trial] = relative_error(g * fit.coeffs, ty);
  });

  CsvWriter table(dir / "table.csv", [&] {
    std::vector<std::string> h{"lambda"};
    for (double s : sigmas) h.push_back("sigma=" + format_double(s));
    return h;
  }());
  CsvWriter cells_csv(dir / "cells.csv", {"lambda", "sigma", "trial", "relative_error"});
  json aggregate = json::array();
  for (std::size_t li = 0; li < lambdas.size(); ++li) {
    std::vector<double> row{lambdas[li]};
    for (std::size_t si = 0; si < sigmas.size(); ++si) {
      const int cell = static_cast<int>(li * sigmas.size() + si);
      const auto& errs = cell_errors[cell];
      for (int t = 0; t < trials; ++t) {
        cells_csv.row({lambdas[li], sigmas[si], static_cast<double>(t), errs[t]});
      }
      const double mean = detail::mean_of(errs);
      row.push_back(mean);
      aggregate.push_back({{"lambda", lambdas[li]},
                           {"sigma", sigmas[si]},
                           {"mean_relative_error", mean},
                           {"stddev", detail::stddev_of(errs)}});
    }
    table.row(row);
  }

  json manifest = detail::manifest_skeleton("sim2", config);
  manifest["cells"] = aggregate;
  manifest["wall_time_seconds"] = watch.seconds();
  write_json_file(dir / "manifest.json", manifest);
  return manifest;
}

// ---------------------------------------------------------------------------
// Simulation 3: chirp target, narrow vs wide sampling, prune-and-refit.
// ---------------------------------------------------------------------------

inline json sim3_default_config() {
  return json{{"lambda_small", 1.0},  {"L_small", 10000}, {"lambda_large", 100.0},
              {"L_large", 300},       {"inner", 30.0},    {"n", 1000},
              {"train", 500},         {"solver", "minnorm-svd"},
              {"threshold", 1e-14},   {"seed", 3}};
}

inline json run_sim3(const json& config, const std::string& out_dir, int jobs = 1) {
  detail::StopWatch watch;
  const auto dir = detail::ensure_dir(out_dir);
  const std::uint64_t seed = config.at("seed");
  const Target g = Target::chirp();
  const Dataset data = Dataset::from_target(g, config.at("n"), config.at("train"),
                                            split_seed(seed, 0));
  TrainConfig tc;
  tc.solver = parse_solver(config.at("solver"));
  tc.svd_threshold = config.at("threshold");
  const Eigen::VectorXd tx = data.train_x(), ty = data.train_y();

  const double lam_small = config.at("lambda_small");
  const double lam_large = config.at("lambda_large");
  const int l_small = config.at("L_small");
  const int l_large = config.at("L_large");

  RandomNet small, large;
  double train_small = 0.0, train_large = 0.0;
  parallel_for(2, jobs, [&](int k) {
    RandomNet& net = k == 0 ? small : large;
    net.activation = Activation::sigmoid();
    const double lam = k == 0 ? lam_small : lam_large;
    const int width = k == 0 ? l_small : l_large;
    net.hidden = sample_hidden({lam, 2.0 * lam, 1}, width, split_seed(seed, 100 + k));
    const Eigen::MatrixXd gm = design_matrix(net.hidden, tx, net.activation);
    net.c = fit_output(gm, ty, tc).coeffs;
    (k == 0 ? train_small : train_large) = relative_error(gm * net.c, ty);
  });

  const double inner = config.at("inner");
  auto [pruned, prune_report] =
      prune_and_refit(large, tx, ty, {inner, 2.0 * inner, 1}, tc);
  const double train_pruned = relative_error(pruned.predict(tx), ty);

  {
    CsvWriter csv(dir / "predictions.csv",
                  {"x", "target", "pred_small", "pred_large", "pred_pruned", "is_train"});
    std::vector<char> is_train(data.x.size(), 0);
    for (int i = 0; i < data.n_train; ++i) is_train[data.order[i]] = 1;
    const Eigen::VectorXd ps = small.predict(data.x);
    const Eigen::VectorXd pl = large.predict(data.x);
    const Eigen::VectorXd pp = pruned.predict(data.x);
    for (Eigen::Index i = 0; i < data.x.size(); ++i) {
      csv.row({data.x(i), data.y(i), ps(i), pl(i), pp(i), static_cast<double>(is_train[i])});
    }
  }
  {
    CsvWriter csv(dir / "derivative.csv", {"x", "g", "g_prime"});
    for (Eigen::Index i = 0; i < data.x.size(); ++i) {
      csv.row({data.x(i), data.y(i), Target::chirp_derivative(data.x(i))});
    }
  }
  {
    // N1 vs N2 on the training grid, sorted by x
    std::vector<int> idx(data.order.begin(), data.order.begin() + data.n_train);
    std::sort(idx.begin(), idx.end());
    CsvWriter csv(dir / "prune_compare.csv", {"x", "y1", "y2", "difference"});
    for (int i : idx) {
      const double y1 = large.predict(data.x(i));
      const double y2 = pruned.predict(data.x(i));
      csv.row({data.x(i), y1, y2, y1 - y2});
    }
  }

  json manifest = detail::manifest_skeleton("sim3", config);
  manifest["results"] = {{"train_relative_error_small", train_small},
                         {"train_relative_error_large", train_large},
                         {"train_relative_error_pruned", train_pruned},
                         {"pruned_removed", prune_report.removed},
                         {"prune_prediction_diff", prune_report.prediction_diff}};
  manifest["wall_time_seconds"] = watch.seconds();
  write_json_file(dir / "manifest.json", manifest);
  return manifest;
}

// ---------------------------------------------------------------------------
// Fig. 1: GD-trained parameter scatter vs the ridgelet spectrum heatmap.
// ---------------------------------------------------------------------------

inline json fig1_default_config() {
  return json{{"nets", 100},       {"width", 10},        {"steps", 200000},
              {"learning_rate", 0.05}, {"init_scale", 0.5},
              {"n", 1000},         {"train", 500},       {"omega", kTwoPi},
              {"a_range", {-15.0, 15.0}}, {"b_range", {-10.0, 10.0}},
              {"resolution", {201, 201}}, {"rho_order", 1}, {"rho_tau", 1.0},
              {"gd_activation", "tanh"},  {"seed", 20240004}};
}

inline json run_fig1(const json& config, const std::string& out_dir, int jobs = 1) {
  detail::StopWatch watch;
  const auto dir = detail::ensure_dir(out_dir);
  const std::uint64_t seed = config.at("seed");
  const double omega = config.at("omega");
  const Target f = Target::windowed_sine(omega, 0.0, 1.0);
  const Dataset data = Dataset::from_target(f, config.at("n"), config.at("train"),
                                            split_seed(seed, 0));
  const Eigen::VectorXd tx = data.train_x(), ty = data.train_y();
  const Activation gd_act = parse_activation(config.at("gd_activation"));

  const int nets = config.at("nets");
  GdConfig gd;
  gd.width = config.at("width");
  gd.steps = config.at("steps");
  gd.learning_rate = config.at("learning_rate");
  gd.init_scale = config.at("init_scale");

  std::vector<std::vector<GdTriple>> collected(nets);
  std::vector<char> diverged(nets, 0);
  parallel_for(nets, jobs, [&](int k) {
    GdConfig local = gd;
    local.seed = split_seed(seed, 100 + k);
    try {
      collected[k] = gd_train(tx, ty, gd_act, local).params;
    } catch (const DivergenceError&) {
      diverged[k] = 1;
    }
  });

  int n_diverged = 0;
  {
    CsvWriter csv(dir / "gd_scatter.csv", {"net", "a", "b", "c"});
    for (int k = 0; k < nets; ++k) {
      if (diverged[k]) {
        ++n_diverged;
        continue;
      }
      for (const auto& t : collected[k]) {
        csv.row({static_cast<double>(k), t.a, t.b, t.c});
      }
    }
  }

  const std::vector<double> a_range = config.at("a_range");
  const std::vector<double> b_range = config.at("b_range");
  const std::vector<int> res = config.at("resolution");
  const AdmissiblePair pair =
      make_self_admissible(config.at("rho_order"), config.at("rho_tau"), 1);
  SpectrumGrid grid = spectrum_grid(f, pair.rho, a_range[0], a_range[1], b_range[0],
                                    b_range[1], res[0], res[1]);
  grid.export_csv((dir / "spectrum.csv").string());
  write_json_file(dir / "spectrum_meta.json", grid.metadata);

  // Riemann check: cell-sum of |R|^2 against ||f||_2^2 (Plancherel)
  const double da = (a_range[1] - a_range[0]) / (res[0] - 1);
  const double db = (b_range[1] - b_range[0]) / (res[1] - 1);
  const double riemann = grid.values.array().abs2().sum() * da * db;
  const double f_l2_sq = std::pow(f.l2_norm(), 2);

  {
    SvgPlot plot(640, 480, a_range[0], a_range[1], b_range[0], b_range[1],
                 "GD parameters over |R[f]| heatmap");
    plot.heatmap(grid.values.array().abs().matrix());
    std::vector<double> sa, sb;
    for (int k = 0; k < nets; ++k) {
      if (diverged[k]) continue;
      for (const auto& t : collected[k]) {
        sa.push_back(t.a);
        sb.push_back(t.b);
      }
    }
    plot.scatter(sa, sb, "#ff2222", 2.0);
    plot.save((dir / "fig1.svg").string());
  }

  json manifest = detail::manifest_skeleton("fig1", config);
  manifest["results"] = {{"nets_diverged", n_diverged},
                         {"riemann_mass", riemann},
                         {"f_l2_squared", f_l2_sq},
                         {"axis_ranges", {{"a", a_range}, {"b", b_range}}}};
  manifest["wall_time_seconds"] = watch.seconds();
  write_json_file(dir / "manifest.json", manifest);
  return manifest;
}

// ---------------------------------------------------------------------------
// Bound sweep: closed-form and quadrature tail bounds vs trained nets.
// ---------------------------------------------------------------------------

inline json sweep_default_config() {
  return json{{"target", "sim:0.05"},
              {"lambdas", {0.1, 0.5, 1.0, 2.0, 5.0, 20.0}},
              {"kappa_factor", 2.0},
              {"s", 1.0},
              {"mode", "corrected"},
              {"L", 2000},
              {"n", 1000},
              {"train", 500},
              {"rho_order", 1},
              {"rho_tau", 1.0},
              {"seed", 20240005}};
}

inline json run_sweep(const json& config, const std::string& out_dir, int jobs = 1) {
  (void)jobs;  // rows are cheap; the heavy quadrature is already refined inline
  detail::StopWatch watch;
  const auto dir = detail::ensure_dir(out_dir);
  const Target f = parse_target(config.at("target"));
  SweepConfig sc;
  sc.lambdas = config.at("lambdas").get<std::vector<double>>();
  sc.kappa_factor = config.at("kappa_factor");
  sc.s = config.at("s");
  sc.mode = bound_mode_from_string(config.at("mode"));
  sc.width = config.at("L");
  sc.dataset_n = config.at("n");
  sc.dataset_train = config.at("train");
  sc.rho_order = config.at("rho_order");
  sc.rho_tau = config.at("rho_tau");
  sc.seed = config.at("seed");

  const auto rows = bound_vs_training(f, sc);
  CsvWriter csv(dir / "sweep.csv",
                {"lambda", "kappa", "s", "mode", "closed_form", "quadrature_tail",
                 "empirical_error", "vacuous_flag"});
  json jrows = json::array();
  for (const auto& r : rows) {
    csv.row_mixed({format_double(r.lambda), format_double(r.kappa), format_double(r.s),
                   r.mode, format_double(r.closed_form), format_double(r.quadrature_tail),
                   format_double(r.empirical_error), r.vacuous ? "1" : "0"});
    jrows.push_back({{"lambda", r.lambda},
                     {"kappa", r.kappa},
                     {"closed_form", r.closed_form},
                     {"quadrature_tail", r.quadrature_tail},
                     {"empirical_error", r.empirical_error},
                     {"train_relative_error", r.train_rel_error},
                     {"vacuous", r.vacuous}});
  }
  json manifest = detail::manifest_skeleton("sweep", config);
  manifest["rows"] = jrows;
  manifest["wall_time_seconds"] = watch.seconds();
  write_json_file(dir / "manifest.json", manifest);
  return manifest;
}

/// Dispatch by experiment name (used by the CLI and the rerun-from-manifest
/// determinism check).
inline json run_experiment(const std::string& name, const json& config,
                           const std::string& out_dir, int jobs) {
  if (name == "sim1") return run_sim1(config, out_dir, jobs);
  if (name == "sim2") return run_sim2(config, out_dir, jobs);
  if (name == "sim3") return run_sim3(config, out_dir, jobs);
  if (name == "fig1") return run_fig1(config, out_dir, jobs);
  if (name == "sweep") return run_sweep(config, out_dir, jobs);
  throw UsageError("unknown experiment: " + name);
}

}  // namespace ridgebound
