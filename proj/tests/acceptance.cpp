// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "nsslope/estimator.hpp"
#include "nsslope/experiment.hpp"
#include "nsslope/lambda_seq.hpp"
#include "nsslope/metrics.hpp"
#include "nsslope/slope_solver.hpp"
#include "nsslope/sorted_l1.hpp"
#include "nsslope/synth.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include "oracles.hpp"

using namespace nsslope;

namespace {

// Tolerances and budgets.
constexpr double kProxTol = 1e-8;
constexpr double kProxSeconds = 5.0;
constexpr double kGapTol = 1e-7;
constexpr double kObjectiveTol = 1e-6;
constexpr double kSolverSeconds = 30.0;
constexpr double kLambdaTol = 1e-4;
constexpr double kFdrLevel = 0.10;
constexpr double kSweepSeconds = 600.0;
constexpr double kCouplingTol = 1e-12;
constexpr double kHubRecall = 0.5;

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v, int precision = 4) {
  std::ostringstream s;
  s.precision(precision);
  s << v;
  return s.str();
}

Outcome prox_correctness() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(20240601);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const Eigen::Index d = 1 + t % 8;
    const Vector z = oracle::random_vector(rng, d);
    const Vector lambda = oracle::random_lambda(rng, d);
    const Vector x = prox_sorted_l1(z, LambdaSequence(lambda));
    worst = std::max(worst, (x - oracle::prox_qp(z, lambda)).lpNorm<Eigen::Infinity>());
  }
  int inexact = 0;
  std::uniform_real_distribution<double> level(0.01, 3.0);
  for (int t = 0; t < 1000; ++t) {
    const Eigen::Index d = 1 + t % 8;
    const Vector z = oracle::random_vector(rng, d);
    const double v = level(rng);
    const Vector x = prox_sorted_l1(z, LambdaSequence::uniform(d, v));
    for (Eigen::Index i = 0; i < d; ++i) {
      const double soft = std::copysign(std::max(std::abs(z[i]) - v, 0.0), z[i]);
      if (x[i] != soft) ++inexact;
    }
  }
  const double secs = seconds_since(t0);
  return {worst <= kProxTol && inexact == 0 && secs < kProxSeconds,
          "max |prox - qp| = " + fmt(worst) + ", soft-threshold mismatches = " +
              std::to_string(inexact) + ", " + fmt(secs, 3) + " s"};
}

Outcome solver_certificate() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(20240602);
  double worst_gap = 0.0;
  double worst_obj = 0.0;
  int unconverged = 0;
  double oracle_secs = 0.0;
  for (int t = 0; t < 100; ++t) {
    const Matrix a = oracle::random_matrix(rng, 30, 10);
    const Vector b = oracle::random_vector(rng, 30);
    const Vector lambda = oracle::random_lambda(rng, 10);
    const SubproblemSpec spec(a, b, 1.0, LambdaSequence(lambda));
    const SubproblemSolution sol = solve_slope(spec);
    if (!sol.converged) ++unconverged;
    worst_gap = std::max(worst_gap, duality_gap(spec, sol.beta));
    const auto o0 = std::chrono::steady_clock::now();
    const Vector ref = oracle::slope_ista(a, b, 1.0, lambda);
    oracle_secs += seconds_since(o0);
    worst_obj = std::max(worst_obj, std::abs(oracle::slope_objective(a, b, 1.0, lambda, sol.beta) -
                                             oracle::slope_objective(a, b, 1.0, lambda, ref)));
  }
  const double secs = seconds_since(t0) - oracle_secs;
  return {worst_gap <= kGapTol && worst_obj <= kObjectiveTol && unconverged == 0 &&
              secs < kSolverSeconds,
          "max gap = " + fmt(worst_gap) + ", max |objective - oracle| = " + fmt(worst_obj) +
              ", unconverged = " + std::to_string(unconverged) + ", solver " + fmt(secs, 3) + " s"};
}

Outcome lambda_sequences() {
  const LambdaSequence bh = bh_sequence(4, 0.05);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < 4; ++i) {
    const double expected = oracle::normal_quantile(1.0 - static_cast<double>(i + 1) * 0.05 / 8.0);
    worst = std::max(worst, std::abs(bh[i] - expected));
  }
  const double last = std::abs(bh[3] - 1.9600);
  int grids = 0;
  int violations = 0;
  for (const Eigen::Index d : {1, 2, 3, 4, 10, 39, 100, 499}) {
    for (const Eigen::Index n : {2, 3, 5, 10, 40, 100, 200, 1000}) {
      for (const double q : {0.01, 0.05, 0.1, 0.2, 0.5}) {
        ++grids;
        const LambdaSequence adj = adjusted_sequence(d, q, n);
        for (Eigen::Index i = 1; i < adj.size(); ++i) {
          if (adj[i] > adj[i - 1]) {
            ++violations;
            break;
          }
        }
      }
    }
  }
  return {worst <= kLambdaTol && last <= kLambdaTol && violations == 0,
          "max |bh - oracle| = " + fmt(worst) + ", |lambda_4 - 1.9600| = " + fmt(last) +
              ", adjusted grids nonincreasing " + std::to_string(grids - violations) + "/" +
              std::to_string(grids)};
}

struct BlockSweep {
  SweepResult result;
  double seconds = 0.0;
  const SweepCell& cell(Method m, Eigen::Index n) const {
    for (const auto& c : result.cells) {
      if (c.method == m && c.n == n) return c;
    }
    throw Error("missing sweep cell");
  }
};

BlockSweep run_block_sweep() {
  SweepGrid grid;
  grid.base.structure = Structure::Block;
  grid.base.p = 40;
  grid.base.block_size = 4;
  grid.base.off_value = 0.3;
  grid.base.repetitions = 25;
  grid.base.seed = 1;
  grid.base.q = 0.05;
  grid.base.alpha = 0.05;
  grid.n_values = {100, 200, 400};
  grid.methods = {Method::NsSlope, Method::MbLasso};
  const auto t0 = std::chrono::steady_clock::now();
  BlockSweep sweep{run_sweep(grid), 0.0};
  sweep.seconds = seconds_since(t0);
  return sweep;
}

Outcome fdr_control(const BlockSweep& s) {
  bool pass = s.seconds < kSweepSeconds;
  std::string detail;
  for (const Eigen::Index n : {100, 200, 400}) {
    const SweepCell& c = s.cell(Method::NsSlope, n);
    pass = pass && c.failures == 0 && c.summary.mean.fdr <= kFdrLevel;
    detail += "n=" + std::to_string(n) + " fdr=" + fmt(c.summary.mean.fdr) + " (se " +
              fmt(c.summary.se_fdr, 2) + ", fp " + fmt(c.summary.mean_false_positives, 3) + "); ";
  }
  return {pass, detail + fmt(s.seconds, 3) + " s"};
}

Outcome power_dominance(const BlockSweep& s) {
  bool pass = true;
  std::string detail;
  for (const Eigen::Index n : {100, 200, 400}) {
    const double slope = s.cell(Method::NsSlope, n).summary.mean.power;
    const double l1 = s.cell(Method::MbLasso, n).summary.mean.power;
    pass = pass && slope >= l1;
    detail += "n=" + std::to_string(n) + " " + fmt(slope) + " vs " + fmt(l1) + "; ";
  }
  return {pass, detail};
}

Outcome mse_trend(const BlockSweep& s) {
  const double small = s.cell(Method::NsSlope, 100).summary.mean.mse_diag;
  const double large = s.cell(Method::NsSlope, 400).summary.mean.mse_diag;
  return {large < small, "mse_diag n=100 " + fmt(small) + ", n=400 " + fmt(large)};
}

Outcome estimator_invariants() {
  bool diag_positive = true;
  double coupling = 0.0;
  bool symmetric = true;
  bool reproducible = true;
  double modes = 0.0;
  FitConfig cfg;
  ExperimentConfig ec;
  ec.p = 40;
  std::vector<GroundTruthModel> models{ec.make_model()};
  ec.structure = Structure::Hub;
  models.push_back(ec.make_model());
  for (const auto& model : models) {
    for (const Eigen::Index n : {100, 400}) {
      for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const Dataset data = sample_mvn(model, n, seed);
        cfg.mode = SweepMode::Sequential;
        const PrecisionEstimate seq = fit_nsslope(data, cfg);
        const PrecisionEstimate again = fit_nsslope(data, cfg);
        cfg.mode = SweepMode::JacobiParallel;
        const PrecisionEstimate par = fit_nsslope(data, cfg);

        for (const auto& diag : seq.diagonal_history) diag_positive = diag_positive && (diag.array() > 0.0).all();
        for (Eigen::Index i = 0; i < data.p(); ++i) {
          const double tii = seq.theta_unsymmetrized(i, i);
          const Vector coupled = expand_without(Vector(-tii * seq.betas[static_cast<std::size_t>(i)]), i);
          for (Eigen::Index j = 0; j < data.p(); ++j) {
            if (j != i) coupling = std::max(coupling, std::abs(seq.theta_unsymmetrized(j, i) - coupled[j]));
          }
        }
        symmetric = symmetric && seq.theta == seq.theta.transpose();
        reproducible = reproducible && seq.theta == again.theta &&
                       seq.theta_unsymmetrized == again.theta_unsymmetrized;
        modes = std::max(modes, (seq.theta.diagonal() - par.theta.diagonal()).lpNorm<Eigen::Infinity>());
      }
    }
  }
  const bool pass = diag_positive && coupling <= kCouplingTol && symmetric && reproducible &&
                    modes <= 10.0 * cfg.outer_tol;
  return {pass, std::string("diagonal positive ") + (diag_positive ? "yes" : "no") +
                    ", coupling err " + fmt(coupling) + ", symmetric " + (symmetric ? "yes" : "no") +
                    ", bitwise reproducible " + (reproducible ? "yes" : "no") +
                    ", max |seq - parallel| diag " + fmt(modes)};
}

Outcome hub_recovery() {
  ExperimentConfig ec;
  ec.structure = Structure::Hub;
  ec.p = 20;
  ec.hub_value = 0.2;
  const GroundTruthModel model = ec.make_model();
  std::vector<Edge> hub_edges;
  for (const Edge& e : model.edges) {
    if (e.first == 0 || e.second == 0 || e.first == ec.p - 1 || e.second == ec.p - 1) hub_edges.push_back(e);
  }
  FitConfig cfg;
  cfg.q = 0.05;
  double recall_sum = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Dataset data = sample_mvn(model, 500, seed);
    const std::vector<Edge> found = discovered_edges(fit_nsslope(data, cfg).theta, cfg.zero_tol);
    int hits = 0;
    for (const Edge& e : hub_edges) {
      if (std::find(found.begin(), found.end(), e) != found.end()) ++hits;
    }
    recall_sum += static_cast<double>(hits) / static_cast<double>(hub_edges.size());
  }
  const double recall = recall_sum / 10.0;
  return {!hub_edges.empty() && recall >= kHubRecall,
          "mean hub-edge recall " + fmt(recall) + " over 10 seeds (" +
              std::to_string(hub_edges.size()) + " hub edges)"};
}

}  // namespace

int main() {
  int failed = 0;
  auto report = [&](int id, const std::string& name, const std::function<Outcome()>& check) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("[%s] %d. %s: %s\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  };

  report(1, "prox correctness", prox_correctness);
  report(2, "sub-solver certificate", solver_certificate);
  report(3, "weight sequences", lambda_sequences);
  BlockSweep sweep;
  bool swept = true;
  try {
    sweep = run_block_sweep();
  } catch (const std::exception& e) {
    swept = false;
    std::printf("block sweep threw: %s\n", e.what());
  }
  auto guarded = [&](Outcome (*f)(const BlockSweep&)) {
    return [&, f] { return swept ? f(sweep) : Outcome{false, "sweep unavailable"}; };
  };
  report(4, "FDR control", guarded(fdr_control));
  report(5, "power dominance", guarded(power_dominance));
  report(6, "diagonal MSE trend", guarded(mse_trend));
  report(7, "estimator invariants", estimator_invariants);
  report(8, "hub structure discovery", hub_recovery);

  std::printf("%d of 8 criteria passed\n", 8 - failed);
  return failed == 0 ? 0 : 1;
}
