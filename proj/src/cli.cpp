#include "nsslope/cli.hpp"

#include "nsslope/csv.hpp"
#include "nsslope/experiment.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

namespace nsslope::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct SimulateOptions {
  std::string structure = "block";
  Eigen::Index p = 0;
  Eigen::Index n = 200;
  Eigen::Index block_size = 4;
  double diag_value = 1.0;
  double off_value = 0.3;
  double hub_value = 0.2;
  std::uint64_t seed = 1;
  bool header = false;
  std::string out = ".";
};

struct SolverFlags {
  double outer_tol = 1e-3;
  double gap_tol = 1e-7;
  int max_sweeps = 100;
  int max_iter = 20000;
  bool parallel = false;
  int threads = 0;
  bool bh = false;
  bool no_standardize = false;
  bool no_symmetrize = false;

  [[nodiscard]] FitConfig to_config() const {
    FitConfig c;
    c.outer_tol = outer_tol;
    c.gap_tol = gap_tol;
    c.max_sweeps = max_sweeps;
    c.max_iter = max_iter;
    c.mode = parallel ? SweepMode::JacobiParallel : SweepMode::Sequential;
    c.threads = resolve_threads(threads);
    c.use_adjusted_lambda = !bh;
    c.standardize = !no_standardize;
    c.symmetrize_output = !no_symmetrize;
    return c;
  }
};

struct FitOptions {
  std::string input;
  bool header = false;
  std::string method = "nsslope";
  double q = 0.05;
  double alpha = 0.05;
  SolverFlags solver;
  bool strict = false;
  std::string out = ".";
};

struct EvalOptions {
  std::string theta;
  std::string truth;
  bool header = false;
  double zero_tol = 1e-10;
  std::string out;
};

struct SweepOptions {
  std::string structure = "block";
  Eigen::Index p = 40;
  Eigen::Index block_size = 4;
  double diag_value = 1.0;
  double off_value = 0.3;
  double hub_value = 0.2;
  std::vector<Eigen::Index> n_values{100, 200, 400};
  int reps = 25;
  std::vector<std::string> methods{"nsslope", "mblasso"};
  std::uint64_t seed = 1;
  double q = 0.05;
  double alpha = 0.05;
  SolverFlags solver;
  std::string out = ".";
};

struct LambdaOptions {
  Eigen::Index d = 0;
  double q = 0.05;
  std::string kind = "bh";
  Eigen::Index n = 0;
  double alpha = 0.05;
  std::string out;
};

void add_solver_flags(CLI::App* app, SolverFlags& s) {
  app->add_option("--outer-tol", s.outer_tol, "Stop when the diagonal moves less than this")
      ->capture_default_str();
  app->add_option("--gap-tol", s.gap_tol, "Duality-gap tolerance of each regression")
      ->capture_default_str();
  app->add_option("--max-sweeps", s.max_sweeps, "Outer sweep limit")->capture_default_str();
  app->add_option("--max-iter", s.max_iter, "Iteration limit per regression")->capture_default_str();
  app->add_flag("--parallel", s.parallel, "Solve the columns of a sweep concurrently");
  app->add_option("--threads", s.threads, "Worker threads (0: NSSLOPE_THREADS or all cores)")
      ->capture_default_str();
  app->add_flag("--bh", s.bh, "Use the plain BH weights instead of the adjusted ones");
  app->add_flag("--no-standardize", s.no_standardize, "Solve on raw (unscaled) design columns");
  app->add_flag("--no-symmetrize", s.no_symmetrize, "Write the column estimate unsymmetrized");
}

json solver_json(const SolverFlags& s) {
  return {{"outer_tol", s.outer_tol},         {"gap_tol", s.gap_tol},
          {"max_sweeps", s.max_sweeps},       {"max_iter", s.max_iter},
          {"parallel", s.parallel},           {"threads", s.threads},
          {"adjusted_lambda", !s.bh},         {"standardize", !s.no_standardize},
          {"symmetrize", !s.no_symmetrize}};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw Error("cannot write '" + path.string() + "'");
  f << text;
  if (!f) throw Error("write failed for '" + path.string() + "'");
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

void write_matrix(const fs::path& path, const Matrix& m, bool header) {
  std::ofstream f(path);
  if (!f) throw Error("cannot write '" + path.string() + "'");
  if (header) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) f << (c ? "," : "") << "V" << (c + 1);
    f << '\n';
  }
  csv::write_matrix(f, m);
  if (!f) throw Error("write failed for '" + path.string() + "'");
}

fs::path prepare_dir(const std::string& dir) {
  fs::path p(dir);
  fs::create_directories(p);
  return p;
}

// The replayable config written next to every manifest: feeding it back
// through --config reproduces the run.
std::string replay_config(const CLI::App* sub) { return sub->config_to_str(true, false); }

json manifest_base(const std::string& command, const CLI::App* sub) {
  return {{"command", command},
          {"software", "nsslope"},
          {"version", kVersion},
          {"replay_config", replay_config(sub)}};
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int cmd_simulate(const SimulateOptions& o, const CLI::App* sub, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentConfig cfg;
  cfg.structure = parse_structure(o.structure);
  cfg.p = o.p;
  cfg.n = o.n;
  cfg.block_size = o.block_size;
  cfg.diag_value = o.diag_value;
  cfg.off_value = o.off_value;
  cfg.hub_value = o.hub_value;
  cfg.seed = o.seed;
  cfg.repetitions = 1;
  const GroundTruthModel model = cfg.make_model();
  const Dataset data = sample_mvn(model, cfg.n, cfg.seed);

  const fs::path dir = prepare_dir(o.out);
  const fs::path x_path = dir / "X.csv";
  const fs::path truth_path = dir / "truth.json";
  write_matrix(x_path, data.X(), o.header);

  json edges = json::array();
  for (const auto& [i, j] : model.edges) edges.push_back({i, j});
  json theta = json::array();
  json sigma = json::array();
  for (Eigen::Index r = 0; r < model.theta.rows(); ++r) {
    json trow = json::array();
    json srow = json::array();
    for (Eigen::Index c = 0; c < model.theta.cols(); ++c) {
      trow.push_back(model.theta(r, c));
      srow.push_back(model.sigma(r, c));
    }
    theta.push_back(std::move(trow));
    sigma.push_back(std::move(srow));
  }
  write_json(truth_path, {{"config", to_json(cfg)}, {"edges", edges}, {"theta", theta}, {"sigma", sigma}});

  json manifest = manifest_base("simulate", sub);
  manifest["config"] = to_json(cfg);
  manifest["seeds"] = {cfg.seed};
  manifest["outputs"] = {{"X", x_path.string()}, {"truth", truth_path.string()}};
  manifest["timings"] = {{"total_seconds", seconds_since(t0)}};
  write_json(dir / "manifest.json", manifest);
  write_text(dir / "config.ini", replay_config(sub));
  out << "wrote " << x_path.string() << " (" << data.n() << "x" << data.p() << ") and "
      << truth_path.string() << '\n';
  return 0;
}

int cmd_fit(const FitOptions& o, const CLI::App* sub, std::ostream& out, std::ostream& err) {
  const auto t0 = std::chrono::steady_clock::now();
  const Method method = parse_method(o.method);
  const Matrix raw = csv::read_matrix_file(o.input, o.header);
  const Dataset data = center_columns(raw);
  FitConfig config = o.solver.to_config();
  config.q = o.q;
  const auto t_fit = std::chrono::steady_clock::now();
  const PrecisionEstimate est = fit_method(method, data, o.q, o.alpha, config);
  const double fit_seconds = seconds_since(t_fit);

  const fs::path dir = prepare_dir(o.out);
  const fs::path theta_path = dir / "theta.csv";
  const fs::path edges_path = dir / "edges.csv";
  csv::write_matrix_file(theta_path.string(), est.theta);
  {
    std::ofstream f(edges_path);
    if (!f) throw Error("cannot write '" + edges_path.string() + "'");
    f << "i,j,value\n";
    for (const auto& [i, j] : discovered_edges(est.theta, 0.0)) {
      f << i << ',' << j << ',' << csv::format_double(est.theta(i, j)) << '\n';
    }
  }

  json manifest = manifest_base("fit", sub);
  manifest["config"] = {{"input", o.input},   {"method", o.method}, {"q", o.q},
                        {"alpha", o.alpha},   {"strict", o.strict}, {"solver", solver_json(o.solver)}};
  manifest["seeds"] = json::array();
  manifest["outputs"] = {{"theta", theta_path.string()}, {"edges", edges_path.string()}};
  manifest["result"] = {{"n", data.n()},
                        {"p", data.p()},
                        {"sweeps", est.sweeps},
                        {"converged", est.converged},
                        {"unconverged_subproblems", est.unconverged_subproblems}};
  manifest["timings"] = {{"fit_seconds", fit_seconds}, {"total_seconds", seconds_since(t0)}};
  write_json(dir / "manifest.json", manifest);
  write_text(dir / "config.ini", replay_config(sub));

  const bool clean = est.converged && est.unconverged_subproblems == 0;
  out << "fit " << o.method << ": p=" << data.p() << " n=" << data.n() << " sweeps=" << est.sweeps
      << (est.converged ? " converged" : " NOT converged") << '\n';
  if (!clean) {
    err << "warning: solver did not fully converge (" << est.unconverged_subproblems
        << " regression solves hit max-iter)\n";
    if (o.strict) return 1;
  }
  return 0;
}

GroundTruthModel load_truth(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open '" + path + "'");
  json j;
  try {
    j = json::parse(f);
  } catch (const json::exception& e) {
    throw ParseError("truth file '" + path + "': " + e.what());
  }
  try {
    const auto& rows = j.at("theta");
    const auto p = static_cast<Eigen::Index>(rows.size());
    Matrix theta(p, p);
    Matrix sigma(p, p);
    for (Eigen::Index r = 0; r < p; ++r) {
      for (Eigen::Index c = 0; c < p; ++c) {
        theta(r, c) = rows.at(static_cast<std::size_t>(r)).at(static_cast<std::size_t>(c)).get<double>();
        sigma(r, c) = j.at("sigma").at(static_cast<std::size_t>(r)).at(static_cast<std::size_t>(c)).get<double>();
      }
    }
    GroundTruthModel model = make_model(std::move(sigma), std::move(theta));
    model.edges.clear();
    for (const auto& e : j.at("edges")) {
      model.edges.emplace_back(e.at(0).get<Eigen::Index>(), e.at(1).get<Eigen::Index>());
    }
    return model;
  } catch (const json::exception& e) {
    throw ParseError("truth file '" + path + "': " + e.what());
  }
}

int cmd_eval(const EvalOptions& o, std::ostream& out) {
  const Matrix theta = csv::read_matrix_file(o.theta, o.header);
  const GroundTruthModel truth = load_truth(o.truth);
  const MetricsReport r = edge_metrics(theta, truth, o.zero_tol);
  const json j = to_json(r);
  if (!o.out.empty()) write_json(o.out, j);
  out << j.dump(2) << '\n';
  return 0;
}

int cmd_sweep(const SweepOptions& o, const CLI::App* sub, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  SweepGrid grid;
  grid.base.structure = parse_structure(o.structure);
  grid.base.p = o.p;
  grid.base.block_size = o.block_size;
  grid.base.diag_value = o.diag_value;
  grid.base.off_value = o.off_value;
  grid.base.hub_value = o.hub_value;
  grid.base.repetitions = o.reps;
  grid.base.seed = o.seed;
  grid.base.q = o.q;
  grid.base.alpha = o.alpha;
  grid.n_values = o.n_values;
  grid.methods.clear();
  for (const auto& m : o.methods) grid.methods.push_back(parse_method(m));
  grid.fit = o.solver.to_config();
  grid.fit.q = o.q;
  grid.threads = resolve_threads(o.solver.threads);

  const SweepResult result = run_sweep(grid);

  const fs::path dir = prepare_dir(o.out);
  const fs::path rows_path = dir / "metrics.csv";
  const fs::path agg_path = dir / "aggregate.json";
  {
    std::ofstream f(rows_path);
    if (!f) throw Error("cannot write '" + rows_path.string() + "'");
    write_rows_csv(f, result.rows);
  }
  json cfg = to_json(grid.base);
  cfg.erase("n");
  cfg["n_values"] = o.n_values;
  cfg["methods"] = o.methods;
  cfg["solver"] = solver_json(o.solver);
  write_json(agg_path, {{"config", cfg}, {"cells", cells_to_json(result.cells)}});

  json seeds = json::array();
  for (int r = 0; r < o.reps; ++r) seeds.push_back(o.seed + static_cast<std::uint64_t>(r));
  int failures = 0;
  for (const auto& c : result.cells) failures += c.failures;
  json manifest = manifest_base("sweep", sub);
  manifest["config"] = cfg;
  manifest["seeds"] = seeds;
  manifest["outputs"] = {{"metrics", rows_path.string()}, {"aggregate", agg_path.string()}};
  manifest["failed_cells"] = failures;
  manifest["timings"] = {{"total_seconds", seconds_since(t0)}};
  write_json(dir / "manifest.json", manifest);
  write_text(dir / "config.ini", replay_config(sub));

  for (const auto& c : result.cells) {
    out << to_string(c.method) << " n=" << c.n;
    if (c.summary.count > 0) {
      out << " fdr=" << c.summary.mean.fdr << " power=" << c.summary.mean.power
          << " mse_diag=" << c.summary.mean.mse_diag;
    }
    if (c.failures) out << " failures=" << c.failures;
    out << '\n';
  }
  return 0;
}

int cmd_lambda(const LambdaOptions& o, std::ostream& out) {
  LambdaSequence seq = [&] {
    if (o.kind == "bh") return bh_sequence(o.d, o.q);
    if (o.kind == "adjusted") {
      if (o.n < 1) throw DomainError("lambda: --kind adjusted needs --n");
      return adjusted_sequence(o.d, o.q, o.n);
    }
    if (o.kind == "fwer") return fwer_uniform_sequence(o.d, o.alpha, o.d + 1);
    throw DomainError("lambda: unknown kind '" + o.kind + "'");
  }();
  std::ostringstream text;
  text << "index,lambda\n";
  for (Eigen::Index i = 0; i < seq.size(); ++i) {
    text << (i + 1) << ',' << csv::format_double(seq[i]) << '\n';
  }
  if (o.out.empty()) {
    out << text.str();
  } else {
    write_text(o.out, text.str());
  }
  return 0;
}

}  // namespace

// Splices the entries of a --config file into the argument list. Keys given
// explicitly on the command line take precedence.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw CLI::FileError::Missing(path);
  std::set<std::string> given;
  for (const auto& a : args) {
    if (a.rfind("--", 0) == 0) given.insert(a.substr(2, a.find('=') - 2));
  }
  std::vector<std::string> out = args;
  for (const CLI::ConfigItem& item : CLI::ConfigINI().from_config(in)) {
    if (!item.parents.empty() || item.name == "config" || given.count(item.name) > 0) continue;
    if (item.inputs.size() == 1 && (item.inputs[0] == "true" || item.inputs[0] == "false")) {
      if (item.inputs[0] == "true") out.push_back("--" + item.name);
      continue;
    }
    out.push_back("--" + item.name);
    for (const auto& v : item.inputs) out.push_back(v);
  }
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::string config_file;
  CLI::App app{"Sparse precision matrix estimation with sorted-L1 neighbourhood regressions",
               "nsslope"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Draw a synthetic dataset and its ground truth");
  simulate->add_option("--config", config_file, "key=value file as written by a previous run; flags override it");
  simulate->add_option("--structure", sim.structure, "block or hub")
      ->check(CLI::IsMember({"block", "hub"}))
      ->capture_default_str();
  simulate->add_option("--p", sim.p, "Number of variables")->required();
  simulate->add_option("--n", sim.n, "Number of samples")->capture_default_str();
  simulate->add_option("--block-size", sim.block_size)->capture_default_str();
  simulate->add_option("--diag-value", sim.diag_value)->capture_default_str();
  simulate->add_option("--off-value", sim.off_value, "Within-block precision entry")
      ->capture_default_str();
  simulate->add_option("--hub-value", sim.hub_value)->capture_default_str();
  simulate->add_option("--seed", sim.seed)->capture_default_str();
  simulate->add_flag("--header", sim.header, "Write a header row in X.csv");
  simulate->add_option("--out", sim.out, "Output directory")->capture_default_str();

  FitOptions fit;
  auto* fit_cmd = app.add_subcommand("fit", "Estimate a precision matrix from a CSV sample matrix");
  fit_cmd->add_option("--config", config_file, "key=value file as written by a previous run; flags override it");
  fit_cmd->add_option("--input", fit.input, "Sample matrix CSV (rows = samples)")->required();
  fit_cmd->add_flag("--header", fit.header, "Input has a header row");
  fit_cmd->add_option("--method", fit.method, "nsslope or mblasso")
      ->check(CLI::IsMember({"nsslope", "mblasso"}))
      ->capture_default_str();
  fit_cmd->add_option("--q", fit.q, "Target FDR (nsslope)")->capture_default_str();
  fit_cmd->add_option("--alpha", fit.alpha, "Target FWER (mblasso)")->capture_default_str();
  add_solver_flags(fit_cmd, fit.solver);
  fit_cmd->add_flag("--strict", fit.strict, "Exit 1 if any solve fails to converge");
  fit_cmd->add_option("--out", fit.out, "Output directory")->capture_default_str();

  EvalOptions ev;
  auto* eval = app.add_subcommand("eval", "Score an estimate against a truth file");
  eval->add_option("--config", config_file, "key=value file as written by a previous run; flags override it");
  eval->add_option("--theta", ev.theta, "Estimated precision CSV")->required();
  eval->add_option("--truth", ev.truth, "truth.json written by simulate")->required();
  eval->add_flag("--header", ev.header, "Theta CSV has a header row");
  eval->add_option("--zero-tol", ev.zero_tol)->capture_default_str();
  eval->add_option("--out", ev.out, "Also write the report JSON here");

  SweepOptions sw;
  auto* sweep = app.add_subcommand("sweep", "Repeated simulate/fit/eval over a grid of sample sizes");
  sweep->add_option("--config", config_file, "key=value file as written by a previous run; flags override it");
  sweep->add_option("--structure", sw.structure)
      ->check(CLI::IsMember({"block", "hub"}))
      ->capture_default_str();
  sweep->add_option("--p", sw.p)->capture_default_str();
  sweep->add_option("--block-size", sw.block_size)->capture_default_str();
  sweep->add_option("--diag-value", sw.diag_value)->capture_default_str();
  sweep->add_option("--off-value", sw.off_value)->capture_default_str();
  sweep->add_option("--hub-value", sw.hub_value)->capture_default_str();
  sweep->add_option("--n-values", sw.n_values, "Sample sizes")->delimiter(',')->capture_default_str();
  sweep->add_option("--reps", sw.reps, "Repetitions per sample size")->capture_default_str();
  sweep->add_option("--methods", sw.methods)
      ->delimiter(',')
      ->check(CLI::IsMember({"nsslope", "mblasso"}))
      ->capture_default_str();
  sweep->add_option("--seed", sw.seed)->capture_default_str();
  sweep->add_option("--q", sw.q)->capture_default_str();
  sweep->add_option("--alpha", sw.alpha)->capture_default_str();
  add_solver_flags(sweep, sw.solver);
  sweep->add_option("--out", sw.out, "Output directory")->capture_default_str();

  LambdaOptions lam;
  auto* lambda = app.add_subcommand("lambda", "Print a weight sequence as CSV");
  lambda->add_option("--d", lam.d, "Sequence length (p - 1)")->required();
  lambda->add_option("--q", lam.q)->capture_default_str();
  lambda->add_option("--kind", lam.kind, "bh, adjusted or fwer")
      ->check(CLI::IsMember({"bh", "adjusted", "fwer"}))
      ->capture_default_str();
  lambda->add_option("--n", lam.n, "Sample count (adjusted)");
  lambda->add_option("--alpha", lam.alpha, "FWER level (fwer)")->capture_default_str();
  lambda->add_option("--out", lam.out, "Output file (default stdout)");

  try {
    const std::vector<std::string> expanded = expand_config(args);
    app.parse(std::vector<std::string>(expanded.rbegin(), expanded.rend()));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    if (auto* sub = app.get_subcommands().empty() ? nullptr : app.get_subcommands().front()) {
      err << sub->help();
    } else {
      err << "run with --help for usage\n";
    }
    return 2;
  }

  try {
    if (*simulate) return cmd_simulate(sim, simulate, out);
    if (*fit_cmd) return cmd_fit(fit, fit_cmd, out, err);
    if (*eval) return cmd_eval(ev, out);
    if (*sweep) return cmd_sweep(sw, sweep, out);
    if (*lambda) return cmd_lambda(lam, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace nsslope::cli
