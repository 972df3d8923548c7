#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "stein/experiment.hpp"
#include "stein/indeptest.hpp"
#include "stein/limit_distribution.hpp"
#include "stein/stein_solution.hpp"

namespace {

using nlohmann::ordered_json;

struct GFlags {
  std::string kind = "linear";
  double a = 1.0;
  double coef = 1.0 / 3.0;
  int exponent = 3;
};

void add_g_flags(CLI::App* cmd, GFlags& gf) {
  cmd->add_option("--g", gf.kind, "drift kind: linear | odd_power")
      ->check(CLI::IsMember({"linear", "odd_power"}))
      ->capture_default_str();
  cmd->add_option("--a", gf.a, "linear slope, g(x) = a x")
      ->capture_default_str();
  cmd->add_option("--coef", gf.coef, "odd_power coefficient")
      ->capture_default_str();
  cmd->add_option("--exponent", gf.exponent, "odd_power exponent (odd)")
      ->capture_default_str();
}

stein::GFunction g_from_flags(const GFlags& gf) {
  if (gf.kind == "linear") return stein::linear_g(gf.a);
  return stein::odd_power_g(gf.coef, gf.exponent);
}

ordered_json condition_json(const stein::ConditionReport& c) {
  ordered_json j;
  j["a1"] = c.a1;
  j["a1_monotone_margin"] = c.a1_monotone_margin;
  j["a1_sign_margin"] = c.a1_sign_margin;
  j["a2"] = c.a2;
  j["a2_margin"] = c.a2_margin;
  j["a3"] = c.a3;
  j["a3_left"] = c.a3_left;
  j["a3_right"] = c.a3_right;
  j["a4"] = c.a4;
  j["a4_max_ratio"] = c.a4_max_ratio;
  j["a4_k_tau"] = c.a4_k_tau;
  j["all"] = c.all();
  return j;
}

// whole cell must parse as a number; trailing garbage is an error
double parse_cell(const std::string& cell, const std::string& path) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument(path + ": bad number '" + cell + "'");
  }
  if (cell.find_first_not_of(" \t\r", pos) != std::string::npos)
    throw std::invalid_argument(path + ": bad number '" + cell + "'");
  return v;
}

// dense numeric CSV; returns row-major values, sets rows/cols
std::vector<double> read_dense_csv(const std::string& path, int& rows,
                                   int& cols) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read " + path);
  std::vector<double> data;
  rows = 0;
  cols = -1;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    int c = 0;
    while (std::getline(ss, cell, ',')) {
      data.push_back(parse_cell(cell, path));
      ++c;
    }
    if (cols == -1) cols = c;
    if (c != cols)
      throw std::invalid_argument(path + ": ragged row " +
                                  std::to_string(rows));
    ++rows;
  }
  if (rows == 0) throw std::invalid_argument(path + ": empty");
  return data;
}

int execute(stein::ExperimentConfig cfg, int workers, bool check) {
  try {
    stein::validate_config(cfg);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  if (check && cfg.preset.empty()) {
    std::cerr << "error: --check needs a preset (thresholds are preset-bound)\n";
    return 2;
  }
  try {
    stein::ExperimentResult res = stein::run_experiment(cfg, workers);
    auto files = stein::write_outputs(res, cfg, workers);

    std::cout << cfg.application;
    if (!cfg.preset.empty()) std::cout << " [" << cfg.preset << "]";
    std::cout << "  mc=" << cfg.mc << " seed=" << cfg.seed << "\n";
    for (const auto& m : res.summary.per_size) {
      std::cout << "  size " << m.size << ": sup=" << m.sup_raw
                << " tail_w=" << m.tail_weighted_z2 << " ks=" << m.ks_exact
                << " certificate=" << m.bound.certificate() << "\n";
    }
    auto show_fit = [](const char* name, const stein::RateFit& f) {
      std::cout << "  fit " << name << ": ";
      if (f.refused)
        std::cout << "refused (" << f.reason << ")\n";
      else
        std::cout << "slope=" << f.slope << " r2=" << f.r_squared << "\n";
    };
    show_fit("sup_raw", res.summary.fit_sup_raw);
    show_fit("ks", res.summary.fit_ks);
    show_fit("certificate", res.summary.fit_certificate);
    for (const auto& c : res.checks)
      std::cout << "  [" << (c.pass ? "PASS" : "FAIL") << "] " << c.name << ": "
                << c.detail << "\n";
    std::cout << "wrote " << files.size() << " files under " << cfg.output_dir
              << " (" << res.wall_seconds << " s)\n";
    if (check && !res.checks_pass) return 3;
    return 0;
  } catch (const stein::ExperimentError& e) {
    try {
      stein::write_outputs(e.partial, cfg, workers);
      std::cerr << "error: " << e.what() << " (partial outputs flushed to "
                << cfg.output_dir << ")\n";
    } catch (const std::exception& inner) {
      std::cerr << "error: " << e.what() << "; flush failed: " << inner.what()
                << "\n";
    }
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exchangeable-pair normal/non-normal approximation experiments"};
  app.require_subcommand(1);
  std::cout.precision(6);

  // limitdist inspect
  auto* ld = app.add_subcommand("limitdist", "limit-law tools");
  ld->require_subcommand(1);
  auto* ldi = ld->add_subcommand(
      "inspect", "print the law spec and condition report as JSON");
  GFlags ldi_g;
  double ldi_tol = 1e-10;
  int ldi_grid = 2001;
  add_g_flags(ldi, ldi_g);
  ldi->add_option("--quad-tol", ldi_tol, "quadrature tolerance")
      ->capture_default_str();
  ldi->add_option("--grid", ldi_grid, "condition grid points")
      ->capture_default_str();

  // stein eval
  auto* st = app.add_subcommand("stein", "Stein equation tools");
  st->require_subcommand(1);
  auto* ste =
      st->add_subcommand("eval", "evaluate the half-line solution f_z at x");
  GFlags ste_g;
  double ste_z = 0.0, ste_x = 0.0, ste_tol = 1e-10;
  add_g_flags(ste, ste_g);
  ste->add_option("--z", ste_z, "indicator threshold")->required();
  ste->add_option("--x", ste_x, "evaluation point")->required();
  ste->add_option("--quad-tol", ste_tol, "quadrature tolerance")
      ->capture_default_str();

  // shared experiment flags
  struct RunFlags {
    std::vector<long long> sizes;
    long long mc = 0;
    int batches = 16;
    std::uint64_t seed = 1;
    int workers = 0;
    std::string law;
    std::string out;
    double alpha = 0.05;
    bool check = false;
  };
  auto add_run_flags = [](CLI::App* cmd, RunFlags& rf, bool with_check) {
    cmd->add_option("--sizes", rf.sizes, "comma-separated model sizes")
        ->delimiter(',');
    cmd->add_option("--mc", rf.mc, "Monte Carlo replicates per size");
    cmd->add_option("--batches", rf.batches, "RNG batches (must divide mc)")
        ->capture_default_str();
    cmd->add_option("--seed", rf.seed, "RNG seed")->capture_default_str();
    cmd->add_option("--workers", rf.workers, "worker threads (0 = auto)")
        ->capture_default_str();
    cmd->add_option("--law", rf.law, "base law name or JSON file");
    cmd->add_option("--out", rf.out, "output directory");
    cmd->add_option("--alpha", rf.alpha, "DKW band level")
        ->capture_default_str();
    if (with_check)
      cmd->add_flag("--check", rf.check,
                    "exit 3 if preset thresholds fail");
  };

  // quadform run
  auto* qf = app.add_subcommand("quadform", "quadratic-form statistic");
  qf->require_subcommand(1);
  auto* qfr = qf->add_subcommand("run", "sweep sizes and write reports");
  RunFlags qf_rf;
  std::string qf_matrix = "tridiagonal", qf_format = "auto";
  qfr->add_option("--matrix", qf_matrix, "tridiagonal or a CSV file")
      ->capture_default_str();
  qfr->add_option("--matrix-format", qf_format, "auto | dense | triplet")
      ->check(CLI::IsMember({"auto", "dense", "triplet"}))
      ->capture_default_str();
  add_run_flags(qfr, qf_rf, false);

  // curieweiss run
  auto* cw = app.add_subcommand("curieweiss", "mean-field spin statistic");
  cw->require_subcommand(1);
  auto* cwr = cw->add_subcommand("run", "sweep sizes and write reports");
  RunFlags cw_rf;
  double cw_beta = 1.0;
  cwr->add_option("--beta", cw_beta, "inverse temperature in (0, 1]")
      ->capture_default_str();
  add_run_flags(cwr, cw_rf, false);

  // indeptest run
  auto* it = app.add_subcommand("indeptest", "correlation-matrix statistic");
  it->require_subcommand(1);
  auto* itr = it->add_subcommand("run", "sweep p and write reports");
  RunFlags it_rf;
  int it_nobs = 0, it_inner = 200;
  std::string it_data;
  itr->add_option("--np", it_rf.sizes, "comma-separated p values (p = n)")
      ->delimiter(',');
  itr->add_option("--n-obs", it_nobs, "fixed observation count (0: n = p)")
      ->capture_default_str();
  itr->add_option("--inner", it_inner, "inner MC replicates")
      ->capture_default_str();
  itr->add_option("--data", it_data,
                  "dense CSV (rows = variables): print W and its tail "
                  "probability instead of simulating");
  add_run_flags(itr, it_rf, false);

  // generic runner
  auto* run = app.add_subcommand("run", "run a config file or preset");
  RunFlags run_rf;
  std::string run_config, run_preset, run_app_name, run_matrix, run_format;
  double run_beta = 0.0;
  int run_nobs = -1, run_inner = 0;
  run->add_option("--config", run_config, "experiment config JSON");
  run->add_option("--preset", run_preset,
                  "thm4.1 | cw-beta0.5 | cw-beta1 | thm4.4");
  run->add_option("--application", run_app_name,
                  "quadform | curieweiss | indeptest");
  run->add_option("--matrix", run_matrix, "quadform matrix");
  run->add_option("--matrix-format", run_format, "auto | dense | triplet");
  run->add_option("--beta", run_beta, "curieweiss beta");
  run->add_option("--n-obs", run_nobs, "indeptest fixed n");
  run->add_option("--inner", run_inner, "indeptest inner MC");
  add_run_flags(run, run_rf, true);

  CLI11_PARSE(app, argc, argv);

  try {
    if (ldi->parsed()) {
      stein::LimitDistribution dist(g_from_flags(ldi_g), ldi_tol);
      ordered_json j;
      j["g_kind"] = dist.g().kind;
      j["params"] = dist.g().params;
      j["c1"] = dist.c1();
      j["x_max"] = dist.x_max();
      j["quad_tol"] = dist.quad_tol();
      j["conditions"] =
          condition_json(stein::check_conditions(dist.g(), dist, ldi_grid));
      std::cout << j.dump(2) << "\n";
      return 0;
    }
    if (ste->parsed()) {
      stein::LimitDistribution dist(g_from_flags(ste_g), ste_tol);
      ordered_json j;
      j["g_kind"] = dist.g().kind;
      j["z"] = ste_z;
      j["x"] = ste_x;
      j["f"] = stein::stein_f(dist, ste_z, ste_x);
      j["fprime"] = stein::stein_fprime(dist, ste_z, ste_x);
      j["sup_bound"] = stein::stein_bound_fz(dist, ste_z);
      std::cout << j.dump(2) << "\n";
      return 0;
    }

    auto fill_common = [](stein::ExperimentConfig& cfg, const RunFlags& rf) {
      if (!rf.sizes.empty()) cfg.sizes = rf.sizes;
      if (rf.mc > 0) cfg.mc = rf.mc;
      cfg.batches = rf.batches;
      cfg.seed = rf.seed;
      cfg.alpha = rf.alpha;
      if (!rf.law.empty()) cfg.law = rf.law;
      if (!rf.out.empty()) cfg.output_dir = rf.out;
    };

    if (qfr->parsed()) {
      stein::ExperimentConfig cfg;
      cfg.application = "quadform";
      cfg.matrix = qf_matrix;
      cfg.matrix_format = qf_format;
      cfg.sizes = {64, 128, 256, 512};
      cfg.mc = 400000;
      cfg.output_dir = "out/quadform";
      fill_common(cfg, qf_rf);
      return execute(cfg, qf_rf.workers, false);
    }
    if (cwr->parsed()) {
      stein::ExperimentConfig cfg;
      cfg.application = "curieweiss";
      cfg.beta = cw_beta;
      cfg.sizes = {64, 256, 1024};
      cfg.mc = 200000;
      cfg.output_dir = "out/curieweiss";
      fill_common(cfg, cw_rf);
      return execute(cfg, cw_rf.workers, false);
    }
    if (itr->parsed()) {
      if (!it_data.empty()) {
        int p = 0, n = 0;
        std::vector<double> rows = read_dense_csv(it_data, p, n);
        stein::CorrState st = stein::IndepModel::statistic_from_rows(n, p, rows);
        stein::LimitDistribution normal(stein::linear_g(1.0));
        ordered_json j;
        j["n"] = n;
        j["p"] = p;
        j["t"] = st.t;
        j["w"] = st.w;
        j["normal_upper_tail"] = std::exp(normal.log_sf(st.w));
        std::cout << j.dump(2) << "\n";
        return 0;
      }
      stein::ExperimentConfig cfg;
      cfg.application = "indeptest";
      cfg.n_obs = it_nobs;
      cfg.inner = it_inner;
      cfg.sizes = {20, 40, 80};
      cfg.mc = 20000;
      cfg.output_dir = "out/indeptest";
      fill_common(cfg, it_rf);
      return execute(cfg, it_rf.workers, false);
    }
    if (run->parsed()) {
      stein::ExperimentConfig cfg;
      if (!run_preset.empty()) {
        cfg = stein::preset_config(run_preset);
      } else if (!run_config.empty()) {
        std::ifstream in(run_config);
        if (!in) {
          std::cerr << "error: cannot read " << run_config << "\n";
          return 2;
        }
        cfg = stein::config_from_json(nlohmann::json::parse(in));
      } else {
        std::cerr << "error: run needs --preset or --config\n";
        return 2;
      }
      if (!run_app_name.empty()) cfg.application = run_app_name;
      if (!run_matrix.empty()) cfg.matrix = run_matrix;
      if (!run_format.empty()) cfg.matrix_format = run_format;
      if (run->count("--beta")) cfg.beta = run_beta;
      if (run_nobs >= 0) cfg.n_obs = run_nobs;
      if (run_inner > 0) cfg.inner = run_inner;
      if (run->count("--batches") == 0) run_rf.batches = cfg.batches;
      if (run->count("--seed") == 0) run_rf.seed = cfg.seed;
      if (run->count("--alpha") == 0) run_rf.alpha = cfg.alpha;
      fill_common(cfg, run_rf);
      return execute(cfg, run_rf.workers, run_rf.check);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
