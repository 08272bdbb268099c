// Experiment driver: level-2 solver studies, omega sweeps, canned
// iteration-count tables, eigenvalue dumps, and solution-surface exports.

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

#include "fnls/experiment.hpp"
#include "fnls/krylov.hpp"
#include "fnls/preconditioners.hpp"

namespace {

struct CommonFlags {
  std::string case_name = "cnls";
  std::vector<double> alphas;
  std::vector<int> ms;
  std::string precond = "dncb";
  std::string circulant = "strang";
  std::string solver = "gmres";
  double omega = 0.2;
  std::vector<double> omega_sweep;  // start stop step
  double tau = 0.01;
  double t_end = 2.0;
  double a = -20.0;
  double b = 20.0;
  double gamma = 1.0;
  double rho = -2.0;
  double beta = 1.0;
  double tol = 1e-6;
  int maxit = 1000;
  std::string out = ".";
  bool desk = false;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--case", flags.case_name, "Problem case: dnls or cnls")
      ->check(CLI::IsMember({"dnls", "cnls"}));
  cmd->add_option("--alpha", flags.alphas, "Fractional order(s) in (1, 2]");
  cmd->add_option("--m", flags.ms, "Inner grid size(s)");
  cmd->add_option("--tau", flags.tau, "Time step");
  cmd->add_option("--t-end", flags.t_end, "Final time for full runs");
  cmd->add_option("--xa", flags.a, "Left endpoint of the domain");
  cmd->add_option("--xb", flags.b, "Right endpoint of the domain");
  cmd->add_option("--gamma", flags.gamma, "Dispersion coefficient (> 0)");
  cmd->add_option("--rho", flags.rho, "Nonlinearity strength (< 0, repulsive)");
  cmd->add_option("--beta", flags.beta, "Coupling strength (>= 0)");
  cmd->add_option("--solver", flags.solver, "Linear solver: gmres or ge")
      ->check(CLI::IsMember({"gmres", "ge"}));
  cmd->add_option("--precond", flags.precond,
                  "Preconditioner: none, dncb, or cpmhss")
      ->check(CLI::IsMember({"none", "dncb", "cpmhss"}));
  cmd->add_option("--circulant", flags.circulant,
                  "Circulant scheme: strang, tchan, rchan, modified-dirichlet, "
                  "von-hann, hamming, superoptimal");
  cmd->add_option("--omega", flags.omega, "Fixed preconditioning parameter");
  cmd->add_option("--omega-sweep", flags.omega_sweep,
                  "Sweep omega: START STOP STEP (overrides --omega)")
      ->expected(3);
  cmd->add_option("--tol", flags.tol, "Relative residual tolerance");
  cmd->add_option("--maxit", flags.maxit, "Iteration cap");
  cmd->add_option("--out", flags.out, "Output directory");
  cmd->add_flag("--desk", flags.desk, "Truncate canned tables to M <= 6400");
  cmd->set_config("--config", "", "Flat key = value configuration file");
}

bool to_config(const CommonFlags& flags, fnls::ExperimentConfig& config) {
  config.problem = flags.case_name == "dnls" ? fnls::ProblemCase::Dnls
                                             : fnls::ProblemCase::Cnls;
  if (!flags.alphas.empty()) config.alphas = flags.alphas;
  if (!flags.ms.empty()) config.ms = flags.ms;
  config.tau = flags.tau;
  config.t_end = flags.t_end;
  config.a = flags.a;
  config.b = flags.b;
  config.gamma = flags.gamma;
  config.rho = flags.rho;
  config.beta = flags.beta;
  config.tol = flags.tol;
  config.maxit = flags.maxit;
  config.out_dir = flags.out;
  config.desk = flags.desk;
  config.solver = flags.solver == "ge" ? fnls::StepSolverConfig::Path::Ge
                                       : fnls::StepSolverConfig::Path::Gmres;
  if (flags.precond == "none")
    config.precond = fnls::StepSolverConfig::Precond::None;
  else if (flags.precond == "cpmhss")
    config.precond = fnls::StepSolverConfig::Precond::Cpmhss;
  else
    config.precond = fnls::StepSolverConfig::Precond::Dncb;
  const auto scheme = fnls::parse_circulant_scheme(flags.circulant);
  if (!scheme) {
    std::cerr << "config error: unknown circulant scheme '" << flags.circulant
              << "'\n";
    return false;
  }
  config.scheme = *scheme;
  if (!flags.omega_sweep.empty()) {
    config.omega.mode = fnls::OmegaSpec::Mode::Sweep;
    config.omega.sweep_start = flags.omega_sweep[0];
    config.omega.sweep_stop = flags.omega_sweep[1];
    config.omega.sweep_step = flags.omega_sweep[2];
  } else {
    config.omega.mode = fnls::OmegaSpec::Mode::Fixed;
    config.omega.value = flags.omega;
  }
  return true;
}

int as_exit(fnls::ExitStatus status) { return static_cast<int>(status); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structured solvers for repulsive space-fractional "
               "Schrödinger time stepping"};
  app.require_subcommand(1);

  CommonFlags run_flags, sweep_flags, tables_flags, spectra_flags, dump_flags;

  CLI::App* cmd_run = app.add_subcommand(
      "run", "Solve the level-2 systems over an (alpha, M) matrix");
  add_common_flags(cmd_run, run_flags);

  CLI::App* cmd_sweep = app.add_subcommand(
      "sweep", "Omega sweep for one (alpha, M) cell; writes per-point data");
  add_common_flags(cmd_sweep, sweep_flags);
  bool sweep_exact = false;
  cmd_sweep->add_flag("--exact", sweep_exact,
                      "Run every sweep point to convergence (per-point curve)");

  CLI::App* cmd_tables = app.add_subcommand(
      "tables", "Reproduce the canned iteration-count tables");
  add_common_flags(cmd_tables, tables_flags);
  std::string subset = "table1";
  cmd_tables->add_option("--subset", subset,
                         "table1, tables2-6, or omega-tables")
      ->check(CLI::IsMember({"table1", "tables2-6", "omega-tables"}));

  CLI::App* cmd_spectra = app.add_subcommand(
      "spectra", "Dense eigenvalue dumps of the (preconditioned) systems");
  add_common_flags(cmd_spectra, spectra_flags);

  CLI::App* cmd_dump = app.add_subcommand(
      "dump", "Full time integration with solution/error surface export");
  add_common_flags(cmd_dump, dump_flags);
  int snapshot_every = 1;
  bool with_ge = false;
  cmd_dump->add_option("--every", snapshot_every, "Snapshot every k levels");
  cmd_dump->add_flag("--with-ge", with_ge,
                     "Pair a direct-solver run and write error surfaces");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_run->parsed()) {
      fnls::ExperimentConfig config;
      if (!to_config(run_flags, config)) return 1;
      return as_exit(fnls::run_experiment(config));
    }
    if (cmd_sweep->parsed()) {
      fnls::ExperimentConfig config;
      if (!to_config(sweep_flags, config)) return 1;
      if (config.alphas.size() != 1 || config.ms.size() != 1) {
        std::cerr << "config error: sweep expects one alpha and one M\n";
        return 1;
      }
      if (config.omega.mode != fnls::OmegaSpec::Mode::Sweep)
        config.omega.mode = fnls::OmegaSpec::Mode::Sweep;
      fnls::GridSpec grid(config.a, config.b, config.ms[0], config.tau,
                          config.gamma, fnls::FractionalOrder(config.alphas[0]));
      fnls::ModelParams params(config.gamma, config.rho, config.beta,
                               fnls::FractionalOrder(config.alphas[0]),
                               config.problem == fnls::ProblemCase::Cnls);
      fnls::LevelTwoCell cell =
          fnls::build_level_two_cell(config.problem, grid, params);

      std::vector<const fnls::BlockSystem*> systems{&cell.u};
      if (cell.v) systems.push_back(&*cell.v);
      const std::vector<double> grid_pts = fnls::uniform_grid(
          config.omega.sweep_start, config.omega.sweep_stop,
          config.omega.sweep_step);
      std::ofstream csv(config.out_dir + "/sweep.csv");
      csv << "field,omega,it,converged\n";
      const char* names[] = {"u", "v"};
      for (std::size_t f = 0; f < systems.size(); ++f) {
        const fnls::BlockSystem& sys = *systems[f];
        fnls::LinearMap a_map = [&sys](const fnls::Vector& x) {
          return fnls::block_matvec(sys, x);
        };
        fnls::CirculantOperator circ =
            fnls::CirculantOperator::approximate(*sys.T, config.scheme);
        auto factory =
            [&](double w) -> std::optional<fnls::LinearMap> {
          if (config.precond == fnls::StepSolverConfig::Precond::Cpmhss) {
            if (!(w > sys.D.inf_norm())) return std::nullopt;
            auto p = std::make_shared<fnls::CpmhssPreconditioner>(sys.D, circ, w);
            return fnls::LinearMap(
                [p](const fnls::Vector& r) { return p->apply(r); });
          }
          auto p = std::make_shared<fnls::DncbPreconditioner>(sys.D, circ, w);
          return fnls::LinearMap(
              [p](const fnls::Vector& r) { return p->apply(r); });
        };
        fnls::SweepOptions sopts;
        sopts.tol = config.tol;
        sopts.maxit = config.maxit;
        sopts.exact_curve = sweep_exact;
        fnls::SweepResult result =
            fnls::omega_sweep(a_map, sys.rhs, factory, grid_pts, sopts);
        for (const auto& pt : result.points)
          csv << names[f] << ',' << pt.omega << ',' << pt.iterations << ','
              << (pt.converged ? 1 : 0) << "\n";
        std::cout << names[f] << ": min IT " << result.best_iterations
                  << " on omega [" << result.omega_lo << ", "
                  << result.omega_hi << "]\n";
      }
      return 0;
    }
    if (cmd_tables->parsed()) {
      fnls::ExperimentConfig config;
      if (!to_config(tables_flags, config)) return 1;
      fnls::TableSubset ts = subset == "table1" ? fnls::TableSubset::Table1
                             : subset == "tables2-6"
                                 ? fnls::TableSubset::Tables2to6
                                 : fnls::TableSubset::OmegaTables;
      std::vector<std::string> lines;
      auto reports = fnls::reproduce_tables(ts, config, &lines);
      for (const auto& line : lines) std::cout << line << "\n";
      bool all = true;
      for (const auto& r : reports) all = all && r.match;
      std::cout << (all ? "all cells matched" : "some cells differ") << "\n";
      return 0;
    }
    if (cmd_spectra->parsed()) {
      fnls::ExperimentConfig config;
      if (!to_config(spectra_flags, config)) return 1;
      return as_exit(fnls::spectra_report(config, spectra_flags.omega));
    }
    if (cmd_dump->parsed()) {
      fnls::ExperimentConfig config;
      if (!to_config(dump_flags, config)) return 1;
      config.snapshot_every = snapshot_every;
      config.with_ge = with_ge;
      double max_error = 0.0;
      const fnls::ExitStatus status = fnls::dump_solution(config, &max_error);
      if (with_ge && status == fnls::ExitStatus::Ok)
        std::cout << "max |u_iter - u_direct| = " << max_error << "\n";
      return as_exit(status);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
