// ridgebound command-line interface: training, ridgelet identities, bounds,
// and the scripted experiment reproductions.
//
// Exit codes: 0 success, 1 usage error, 2 numerical error.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ridgebound/bounds.hpp"
#include "ridgebound/decay.hpp"
#include "ridgebound/experiments.hpp"
#include "ridgebound/io.hpp"
#include "ridgebound/parallel.hpp"
#include "ridgebound/random_net.hpp"
#include "ridgebound/ridgelet.hpp"

namespace rb = ridgebound;
using rb::json;

namespace {

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::istringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(std::stod(tok));
  }
  if (out.empty()) throw rb::UsageError("empty numeric list: " + s);
  return out;
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  for (double v : parse_list(s)) out.push_back(static_cast<int>(v));
  return out;
}

int resolve_jobs(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("RIDGEBOUND_JOBS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return rb::default_jobs();
}

/// Experiment-config assembly with precedence: preset defaults < config file
/// < explicitly set command-line flags. Unknown config-file keys are
/// rejected.
struct ConfigBuilder {
  json cli_vals = json::object();
  std::string config_path;

  json resolve(const json& defaults) const {
    json cfg = defaults;
    if (!config_path.empty()) {
      const json file = rb::read_json_file(config_path);
      for (auto it = file.begin(); it != file.end(); ++it) {
        if (!cfg.contains(it.key())) {
          throw rb::UsageError("unknown config key: " + it.key());
        }
        cfg[it.key()] = it.value();
      }
    }
    for (auto it = cli_vals.begin(); it != cli_vals.end(); ++it) {
      cfg[it.key()] = it.value();
    }
    return cfg;
  }
};

/// Register one overridable option backed by the defaults json: the flag's
/// name, type and default all come from the key, which keeps flags and
/// manifest keys in lockstep.
void add_cfg_option(CLI::App* cmd, ConfigBuilder& b, const json& defaults,
                    const std::string& key, const std::string& help) {
  const json dv = defaults.at(key);
  const std::string flag = "--" + key;
  const std::string help_full = help + " [default: " + dv.dump() + "]";
  if (dv.is_number_integer()) {
    cmd->add_option_function<long long>(
           flag, [&b, key](const long long& v) { b.cli_vals[key] = v; }, help_full)
        ->type_name("INT");
  } else if (dv.is_number()) {
    cmd->add_option_function<double>(
           flag, [&b, key](const double& v) { b.cli_vals[key] = v; }, help_full)
        ->type_name("REAL");
  } else if (dv.is_array() && !dv.empty() && dv[0].is_number_integer()) {
    cmd->add_option_function<std::string>(
           flag, [&b, key](const std::string& v) { b.cli_vals[key] = parse_int_list(v); },
           help_full)
        ->type_name("INT,INT,...");
  } else if (dv.is_array()) {
    cmd->add_option_function<std::string>(
           flag, [&b, key](const std::string& v) { b.cli_vals[key] = parse_list(v); },
           help_full)
        ->type_name("REAL,REAL,...");
  } else {
    cmd->add_option_function<std::string>(
           flag, [&b, key](const std::string& v) { b.cli_vals[key] = v; }, help_full)
        ->type_name("STR");
  }
}

struct ExperimentCmd {
  std::string name;
  json defaults;
  ConfigBuilder builder;
  std::string out;
  int jobs = 0;
  CLI::App* cmd = nullptr;
};

void print_kv(const std::string& k, double v) {
  std::cout << k << " = " << rb::format_double(v) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ridgebound: random-net training, ridgelet transforms and "
               "approximation lower bounds"};
  app.require_subcommand(1);

  // ---- train ---------------------------------------------------------------
  auto* train_cmd = app.add_subcommand("train", "train a single random net");
  json train_defaults{{"target", "sim:0.05"}, {"lambda", 20.0}, {"kappa", -1.0},
                      {"L", 200},             {"activation", "sigmoid"},
                      {"solver", "minnorm-svd"}, {"threshold", 1e-14},
                      {"ridge_eps", 1e-8},    {"n", 1000}, {"train", 500},
                      {"seed", 1}};
  ConfigBuilder train_b;
  for (const auto& [key, help] :
       std::vector<std::pair<std::string, std::string>>{
           {"target", "target descriptor"},
           {"lambda", "input-weight bound"},
           {"kappa", "bias range (kappa; -1 means 2*lambda)"},
           {"L", "hidden width"},
           {"activation", "activation descriptor"},
           {"solver", "minnorm-svd | ridge"},
           {"threshold", "SVD truncation threshold (relative)"},
           {"ridge_eps", "ridge regularization"},
           {"n", "dataset size"},
           {"train", "training subset size"},
           {"seed", "root seed"}}) {
    add_cfg_option(train_cmd, train_b, train_defaults, key, help);
  }
  std::string train_out;
  train_cmd->add_option("--out", train_out, "output directory")->required();
  train_cmd->add_option("--config", train_b.config_path, "flat JSON config file");

  // ---- spectrum ------------------------------------------------------------
  auto* spec_cmd = app.add_subcommand("spectrum", "export a ridgelet spectrum grid");
  json spec_defaults{{"target", "wsine:6.2831853071795862"},
                     {"rho", "dgauss:1,1"},
                     {"a_range", {-15.0, 15.0}},
                     {"b_range", {-10.0, 10.0}},
                     {"resolution", {201, 201}}};
  ConfigBuilder spec_b;
  for (const auto& [key, help] : std::vector<std::pair<std::string, std::string>>{
           {"target", "target descriptor"},
           {"rho", "ridgelet function (self-normalized)"},
           {"a_range", "a axis range lo,hi"},
           {"b_range", "b axis range lo,hi"},
           {"resolution", "grid resolution ra,rb"}}) {
    add_cfg_option(spec_cmd, spec_b, spec_defaults, key, help);
  }
  std::string spec_out;
  spec_cmd->add_option("--out", spec_out, "output directory")->required();
  spec_cmd->add_option("--config", spec_b.config_path, "flat JSON config file");

  // ---- admissible ----------------------------------------------------------
  auto* adm_cmd = app.add_subcommand("admissible", "check / normalize an admissible rho");
  std::string adm_rho = "dgauss:1,1";
  std::string adm_sigma;
  int adm_m = 1;
  adm_cmd->add_option("--rho", adm_rho, "rho descriptor [default: dgauss:1,1]");
  adm_cmd->add_option("--sigma", adm_sigma,
                      "activation to pair with (omit for self-admissibility)");
  adm_cmd->add_option("--m", adm_m, "input dimension [default: 1]");

  // ---- reconstruct ---------------------------------------------------------
  auto* rec_cmd = app.add_subcommand("reconstruct", "check S[R[f]] = f (Prop. 1)");
  std::string rec_target = "gaussian:0,1,1";
  std::string rec_sigma = "gauss:1";
  std::string rec_rho = "dgauss:2,1";
  std::string rec_grid = "-3,3,201";
  std::string rec_out;
  double rec_tol = 1e-4;
  rec_cmd->add_option("--target", rec_target, "target descriptor");
  rec_cmd->add_option("--sigma", rec_sigma, "activation descriptor");
  rec_cmd->add_option("--rho", rec_rho, "base rho (normalized against sigma)");
  rec_cmd->add_option("--xgrid", rec_grid, "evaluation grid lo,hi,n");
  rec_cmd->add_option("--tol", rec_tol, "box quadrature tolerance");
  rec_cmd->add_option("--out", rec_out, "output directory (optional)");

  // ---- plancherel ----------------------------------------------------------
  auto* pl_cmd = app.add_subcommand("plancherel", "Plancherel gap (Prop. 2)");
  std::string pl_target = "gaussian:0.5,0.1,1";
  std::string pl_rho = "dgauss:1,1";
  double pl_tol = 5e-4;
  pl_cmd->add_option("--target", pl_target, "target descriptor");
  pl_cmd->add_option("--rho", pl_rho, "self-admissible rho (normalized)");
  pl_cmd->add_option("--tol", pl_tol, "box quadrature tolerance");

  // ---- bound ---------------------------------------------------------------
  auto* bound_cmd = app.add_subcommand("bound", "closed-form + quadrature lower bounds");
  std::string bd_target = "gaussian:0.5,0.1,1";
  std::string bd_rho = "dgauss:1,1";
  std::string bd_mode = "corrected";
  double bd_s = 1.0, bd_lambda = 2.0, bd_kappa = 4.0;
  std::string bd_out;
  bound_cmd->add_option("--target", bd_target, "target descriptor");
  bound_cmd->add_option("--rho", bd_rho, "self-admissible rho (normalized)");
  bound_cmd->add_option("--s", bd_s, "smoothness order");
  bound_cmd->add_option("--lambda", bd_lambda, "weight bound");
  bound_cmd->add_option("--kappa", bd_kappa, "bias range");
  bound_cmd->add_option("--mode", bd_mode, "corrected | as-printed");
  bound_cmd->add_option("--out", bd_out, "output directory (optional)");

  // ---- experiments ---------------------------------------------------------
  std::vector<ExperimentCmd> experiments;
  experiments.push_back({"sim1", rb::sim1_default_config(), {}, "", 0, nullptr});
  experiments.push_back({"sim2", rb::sim2_default_config("desk"), {}, "", 0, nullptr});
  experiments.push_back({"sim3", rb::sim3_default_config(), {}, "", 0, nullptr});
  experiments.push_back({"fig1", rb::fig1_default_config(), {}, "", 0, nullptr});
  experiments.push_back({"sweep", rb::sweep_default_config(), {}, "", 0, nullptr});
  const std::map<std::string, std::string> exp_help{
      {"sim1", "Simulation 1: four (lambda, L) configurations on the two-bump target"},
      {"sim2", "Simulation 2: mean relative training error table"},
      {"sim3", "Simulation 3: chirp target and prune-and-refit"},
      {"fig1", "GD parameter scatter vs ridgelet spectrum"},
      {"sweep", "bound-vs-training sweep over lambda"}};
  for (auto& ec : experiments) {
    ec.cmd = app.add_subcommand(ec.name, exp_help.at(ec.name));
    for (auto it = ec.defaults.begin(); it != ec.defaults.end(); ++it) {
      if (ec.name == "sim2" && it.key() == "preset") continue;  // handled below
      add_cfg_option(ec.cmd, ec.builder, ec.defaults, it.key(), "config: " + it.key());
    }
    if (ec.name == "sim2") {
      ec.cmd->add_option_function<std::string>(
          "--preset",
          [&ec](const std::string& v) {
            if (v != "desk" && v != "full") {
              throw CLI::ValidationError("--preset", "expected desk|full");
            }
            ec.builder.cli_vals["preset"] = v;
          },
          "desk (L=2000, 10 trials) or full (L=10000, 50 trials)");
    }
    ec.cmd->add_option("--out", ec.out, "output directory")->required();
    ec.cmd->add_option("--config", ec.builder.config_path, "flat JSON config file");
    ec.cmd->add_option("--jobs", ec.jobs, "parallel jobs (default: cores; env RIDGEBOUND_JOBS)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*train_cmd) {
      json cfg = train_b.resolve(train_defaults);
      if (cfg["kappa"].get<double>() < 0.0) {
        cfg["kappa"] = 2.0 * cfg["lambda"].get<double>();
      }
      const rb::Target f = rb::parse_target(cfg.at("target"));
      const rb::Dataset data = rb::Dataset::from_target(
          f, cfg.at("n"), cfg.at("train"), rb::split_seed(cfg.at("seed"), 0));
      rb::RandomNet net;
      net.activation = rb::parse_activation(cfg.at("activation"));
      net.hidden = rb::sample_hidden({cfg.at("lambda"), cfg.at("kappa"), 1},
                                     cfg.at("L"), rb::split_seed(cfg.at("seed"), 1));
      rb::TrainConfig tc;
      tc.solver = rb::parse_solver(cfg.at("solver"));
      tc.svd_threshold = cfg.at("threshold");
      tc.ridge_eps = cfg.at("ridge_eps");
      const Eigen::VectorXd tx = data.train_x(), ty = data.train_y();
      const Eigen::MatrixXd g = rb::design_matrix(net.hidden, tx, net.activation);
      const auto fit = rb::fit_output(g, ty, tc);
      net.c = fit.coeffs;
      const double train_e = rb::relative_error(g * net.c, ty);
      const double test_e = rb::relative_error(net.predict(data.test_x()), data.test_y());
      const auto dir = std::filesystem::path(train_out);
      std::filesystem::create_directories(dir);
      rb::write_json_file(dir / "net.json", net.to_json(tc.solver, train_e, test_e));
      {
        rb::CsvWriter csv(dir / "dataset.csv", {"x", "y", "is_train"});
        std::vector<char> is_train(data.x.size(), 0);
        for (int i = 0; i < data.n_train; ++i) is_train[data.order[i]] = 1;
        for (Eigen::Index i = 0; i < data.x.size(); ++i) {
          csv.row({data.x(i), data.y(i), static_cast<double>(is_train[i])});
        }
      }
      {
        rb::CsvWriter csv(dir / "predictions.csv", {"x", "target", "prediction"});
        const Eigen::VectorXd pred = net.predict(data.x);
        for (Eigen::Index i = 0; i < data.x.size(); ++i) {
          csv.row({data.x(i), data.y(i), pred(i)});
        }
      }
      json manifest = rb::detail::manifest_skeleton("train", cfg);
      manifest["results"] = {{"train_relative_error", train_e},
                             {"test_relative_error", test_e},
                             {"rank", fit.rank},
                             {"zero_design", fit.zero_design}};
      rb::write_json_file(dir / "manifest.json", manifest);
      print_kv("train_relative_error", train_e);
      print_kv("test_relative_error", test_e);
    } else if (*spec_cmd) {
      json cfg = spec_b.resolve(spec_defaults);
      const rb::Target f = rb::parse_target(cfg.at("target"));
      const rb::Activation rho = rb::parse_activation(cfg.at("rho"), true);
      const std::vector<double> ar = cfg.at("a_range"), br = cfg.at("b_range");
      const std::vector<int> res = cfg.at("resolution");
      rb::SpectrumGrid grid =
          rb::spectrum_grid(f, rho, ar[0], ar[1], br[0], br[1], res[0], res[1]);
      const auto dir = std::filesystem::path(spec_out);
      std::filesystem::create_directories(dir);
      grid.export_csv((dir / "spectrum.csv").string());
      rb::write_json_file(dir / "spectrum_meta.json", grid.metadata);
      json manifest = rb::detail::manifest_skeleton("spectrum", cfg);
      manifest["results"] = {{"rows", res[0]}, {"cols", res[1]}};
      rb::write_json_file(dir / "manifest.json", manifest);
      rb::SvgPlot plot(640, 480, ar[0], ar[1], br[0], br[1], "|R[f](a,b)|");
      plot.heatmap(grid.values.array().abs().matrix());
      plot.save((dir / "spectrum.svg").string());
      std::cout << "spectrum grid written to " << spec_out << "\n";
    } else if (*adm_cmd) {
      const rb::Activation base = rb::parse_activation(adm_rho);
      if (adm_sigma.empty()) {
        if (base.kind() != rb::ActivationKind::GaussianDerivative &&
            base.kind() != rb::ActivationKind::Gaussian) {
          throw rb::UsageError("self-admissibility requires a Gaussian-family rho");
        }
        // probe the integral first: a non-vanishing rhohat(0) diverges here
        rb::admissibility_self(base, adm_m);
        const rb::AdmissiblePair pair =
            rb::make_self_admissible(base.order(), base.tau(), adm_m);
        print_kv("C", pair.rho.coeff());
        print_kv("admissibility_constant", pair.k_adm);
      } else {
        const rb::Activation sigma = rb::parse_activation(adm_sigma);
        const rb::AdmissiblePair pair = rb::make_admissible_pair(sigma, base, adm_m);
        print_kv("C", pair.rho.coeff());
        print_kv("admissibility_constant", pair.k_adm);
      }
    } else if (*rec_cmd) {
      const rb::Target f = rb::parse_target(rec_target);
      const rb::Activation sigma = rb::parse_activation(rec_sigma);
      const rb::Activation rho_base = rb::parse_activation(rec_rho);
      const rb::AdmissiblePair pair = rb::make_admissible_pair(sigma, rho_base, 1);
      const auto gv = parse_list(rec_grid);
      if (gv.size() != 3) throw rb::UsageError("--xgrid needs lo,hi,n");
      const int n = static_cast<int>(gv[2]);
      std::vector<double> xs(n);
      for (int i = 0; i < n; ++i) xs[i] = gv[0] + (gv[1] - gv[0]) * i / (n - 1);
      rb::BoxQuadSpec box;
      box.rel_tol = rec_tol;
      box.jobs = rb::default_jobs();
      const auto rec = rb::reconstruct_many(f, pair, xs, box);
      double num = 0.0, den = 0.0;
      for (int i = 0; i < n; ++i) {
        const double fv = f(xs[i]);
        num += (rec[i] - fv) * (rec[i] - fv);
        den += fv * fv;
      }
      const double rel_l2 = std::sqrt(num / std::max(den, 1e-300));
      print_kv("relative_l2_error", rel_l2);
      if (!rec_out.empty()) {
        const auto dir = std::filesystem::path(rec_out);
        std::filesystem::create_directories(dir);
        rb::CsvWriter csv(dir / "reconstruction.csv", {"x", "f", "reconstruction"});
        for (int i = 0; i < n; ++i) csv.row({xs[i], f(xs[i]), rec[i]});
        json manifest = rb::detail::manifest_skeleton(
            "reconstruct", json{{"target", rec_target}, {"sigma", rec_sigma},
                                {"rho", rec_rho}, {"xgrid", rec_grid}, {"tol", rec_tol}});
        manifest["results"] = {{"relative_l2_error", rel_l2}};
        rb::write_json_file(dir / "manifest.json", manifest);
      }
    } else if (*pl_cmd) {
      const rb::Target f = rb::parse_target(pl_target);
      const rb::Activation base = rb::parse_activation(pl_rho);
      const rb::AdmissiblePair pair = rb::make_self_admissible(base.order(), base.tau(), 1);
      rb::BoxQuadSpec box;
      box.rel_tol = pl_tol;
      box.jobs = rb::default_jobs();
      print_kv("plancherel_gap", rb::plancherel_gap(f, pair, box));
    } else if (*bound_cmd) {
      const rb::Target f = rb::parse_target(bd_target);
      const rb::Activation base = rb::parse_activation(bd_rho);
      const rb::AdmissiblePair pair = rb::make_self_admissible(base.order(), base.tau(), 1);
      const rb::BoundConstants c = rb::compute_constants(f, pair.rho, bd_s, 1);
      print_kv("C0", c.c0);
      print_kv("C_rho_s", c.c_rho_s);
      print_kv("C_f_s_plus", c.c_f_s[0]);
      print_kv("C_f_s_minus", c.c_f_s[1]);
      print_kv("C_inf", c.c_inf);
      print_kv("theta_as_printed", c.theta_as_printed);
      print_kv("theta_corrected", c.theta_corrected);
      print_kv("f_l2_squared", c.f_l2_sq);
      const rb::BoundMode mode = rb::bound_mode_from_string(bd_mode);
      const double closed = rb::lower_bound_closed_form(c, bd_lambda, bd_kappa, mode);
      const double other = rb::lower_bound_closed_form(
          c, bd_lambda, bd_kappa,
          mode == rb::BoundMode::Corrected ? rb::BoundMode::AsPrinted
                                           : rb::BoundMode::Corrected);
      rb::BoxQuadSpec box;
      box.jobs = rb::default_jobs();
      const double tail = rb::tail_bound_quadrature(f, pair, bd_lambda, bd_kappa, box);
      print_kv(bd_mode == "corrected" ? "closed_form_corrected" : "closed_form_as_printed",
               closed);
      print_kv(bd_mode == "corrected" ? "closed_form_as_printed" : "closed_form_corrected",
               other);
      print_kv("quadrature_tail", tail);
      if (closed < 0.0) std::cout << "note: closed-form value is vacuous (negative)\n";
      if (!bd_out.empty()) {
        const auto dir = std::filesystem::path(bd_out);
        std::filesystem::create_directories(dir);
        json manifest = rb::detail::manifest_skeleton(
            "bound", json{{"target", bd_target}, {"rho", bd_rho}, {"s", bd_s},
                          {"lambda", bd_lambda}, {"kappa", bd_kappa}, {"mode", bd_mode}});
        manifest["results"] = {{"closed_form", closed},
                               {"quadrature_tail", tail},
                               {"vacuous", closed < 0.0}};
        rb::write_json_file(dir / "manifest.json", manifest);
      }
    } else {
      for (auto& ec : experiments) {
        if (!(*ec.cmd)) continue;
        json cfg;
        if (ec.name == "sim2") {
          // preset decides the defaults the other layers override
          std::string preset = "desk";
          if (!ec.builder.config_path.empty()) {
            const json file = rb::read_json_file(ec.builder.config_path);
            if (file.contains("preset")) preset = file.at("preset");
          }
          if (ec.builder.cli_vals.contains("preset")) {
            preset = ec.builder.cli_vals.at("preset");
          }
          cfg = ec.builder.resolve(rb::sim2_default_config(preset));
        } else {
          cfg = ec.builder.resolve(ec.defaults);
        }
        const json manifest =
            rb::run_experiment(ec.name, cfg, ec.out, resolve_jobs(ec.jobs));
        std::cout << ec.name << " written to " << ec.out << " ("
                  << manifest.at("wall_time_seconds").get<double>() << " s)\n";
      }
    }
  } catch (const rb::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const rb::ToleranceError& e) {
    std::cerr << "numerical error: " << e.what()
              << " (achieved value " << rb::format_double(e.value)
              << ", error estimate " << rb::format_double(e.error_estimate) << ")\n";
    return 2;
  } catch (const rb::EnlargeBoxError& e) {
    std::cerr << "numerical error: " << e.what() << " (suggested |a| extent "
              << rb::format_double(e.suggested_a_extent) << ", |b| extent "
              << rb::format_double(e.suggested_b_extent) << ")\n";
    return 2;
  } catch (const rb::Error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
