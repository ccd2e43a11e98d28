// Acceptance suite: one PASS/FAIL line per criterion, with timings and the
// measured quantities. Exit status is nonzero if any blocking criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "pdopt/io.hpp"
#include "pdopt/netgen.hpp"
#include "pdopt/optimize.hpp"
#include "pdopt/simulate.hpp"
#include "pdopt/spectral.hpp"
#include "support.hpp"

using namespace pdopt;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(int id, bool pass, double secs, double limit, const std::string& detail, bool blocking = true) {
  const bool in_time = secs < limit;
  const bool ok = pass && in_time;
  std::string status = ok ? "PASS" : "FAIL";
  if (!ok && !blocking) status += " (recorded, non-blocking)";
  std::printf("criterion %d: %s  [%.2fs, limit %.0fs]  %s%s\n", id, status.c_str(), secs, limit, detail.c_str(),
              in_time ? "" : "  (time limit exceeded)");
  std::fflush(stdout);
  if (!ok && blocking) ++failures;
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

// ---------------------------------------------------------------------------
// 1. WTMs against an element-wise reimplementation.

void wtm_oracle() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int m = 1 + trial % 6;
    const DsmSet d = testing::random_dsms(m, testing::uniform(0.1, 1.0), testing::uniform(0.1, 1.0));
    const WtmSet w = build_wtms(d);
    const testing::RefPair ref = testing::reference_transitions(d);
    const TransitionPair lib = assemble_transitions(w);
    worst = std::max(worst, (lib.a1 - ref.a1).cwiseAbs().maxCoeff());
    worst = std::max(worst, (lib.a2 - ref.a2).cwiseAbs().maxCoeff());
    // The blocks of the reference pair are the WTMs themselves.
    worst = std::max(worst, (w.w_l - ref.a1.block(0, 0, m, m)).cwiseAbs().maxCoeff());
    worst = std::max(worst, (w.w_sl - ref.a1.block(0, m, m, m)).cwiseAbs().maxCoeff());
    worst = std::max(worst, (w.w_ls - ref.a1.block(m, 0, m, m)).cwiseAbs().maxCoeff());
    worst = std::max(worst, (w.w_s - ref.a1.block(m, m, m, m)).cwiseAbs().maxCoeff());
    worst = std::max(worst, (w.w_sh - ref.a2.block(2 * m, m, m, m)).cwiseAbs().maxCoeff());
  }
  report(1, worst <= 1e-15, seconds_since(t0), 1, "1000 DSM sets, max |difference| " + fmt("%.3g", worst));
}

// ---------------------------------------------------------------------------
// 2. Expected epoch states decay iff rho(M) < 1.

DsmSet scale_dependencies(const DsmSet& d, double c) {
  DsmSet out = d;
  for (Block b : {Block::L, Block::S, Block::LS, Block::SL}) {
    Eigen::MatrixXd& mat = out.block(b);
    const Eigen::VectorXd diag = mat.diagonal();
    mat *= c;
    if (b == Block::L || b == Block::S) mat.diagonal() = diag;
  }
  return out;
}

void epoch_decay() {
  const auto t0 = Clock::now();
  int agree = 0, total = 0, mc_checked = 0, mc_agree = 0;
  for (int trial = 0; trial < 200; ++trial) {
    DsmSet d = testing::random_dsms(3, 0.7, 0.5, 0.6);
    const FeedbackDistribution dist = testing::random_pmf(4);
    const double target = trial % 2 ? testing::uniform(0.5, 0.985) : testing::uniform(1.015, 1.5);
    // Bisection on the scale of every dependency so that rho hits the target.
    double lo = 0.0, hi = 1.0;
    while (testing::reference_rho(scale_dependencies(d, hi), dist) < target) hi *= 2;
    for (int k = 0; k < 100; ++k) {
      const double mid = 0.5 * (lo + hi);
      (testing::reference_rho(scale_dependencies(d, mid), dist) < target ? lo : hi) = mid;
    }
    d = scale_dependencies(d, 0.5 * (lo + hi));
    const double rho = testing::reference_rho(d, dist);
    if (rho >= 0.99 && rho <= 1.01) continue;
    ++total;

    const int epochs = static_cast<int>(std::ceil(30.0 / std::abs(std::log(rho))));
    const Eigen::VectorXd z0 = ProjectState::unit(3).stacked();
    const auto z = expected_epoch_states(d, dist, z0, epochs);
    const double ratio = z.back().norm() / z0.norm();
    const bool decays = ratio < std::exp(-15.0);
    const bool grows = ratio > std::exp(15.0);
    agree += rho < 1 ? decays : grows;

    if (rho < 0.9) {
      ++mc_checked;
      const int horizon = dist.h_max() * static_cast<int>(std::ceil(20.0 / std::abs(std::log(rho))));
      const auto mean = mean_unfinished(d, dist, ProjectState::unit(3), horizon, 500, 1000 + trial);
      mc_agree += mean.back() < 1e-4 * mean.front();
    }
  }
  report(2, agree == total && mc_agree == mc_checked && total == 200, seconds_since(t0), 30,
         std::to_string(agree) + "/" + std::to_string(total) + " epoch-state cases agree; Monte Carlo mean decays in " +
             std::to_string(mc_agree) + "/" + std::to_string(mc_checked) + " instances with rho < 0.9");
}

// ---------------------------------------------------------------------------
// 3. log rho is convex along segments in log-dependency space.

void kingman() {
  const auto t0 = Clock::now();
  double worst = 1e300;
  for (int trial = 0; trial < 100; ++trial) {
    const DsmSet d = testing::random_dsms(3);
    const FeedbackDistribution dist = testing::random_pmf(5);
    const double epsilon = testing::uniform(0.05, 0.9);
    const double theta = testing::uniform(0, 1);
    DependencyMap p1, p2, mix;
    for (const Coordinate& c : tunable_coordinates(d)) {
      const double w = d.block(c.block)(c.i, c.j);
      const double x1 = std::log(w * testing::uniform(epsilon, 1));
      const double x2 = std::log(w * testing::uniform(epsilon, 1));
      p1[c] = std::exp(x1);
      p2[c] = std::exp(x2);
      mix[c] = std::min(w, std::exp(theta * x1 + (1 - theta) * x2));
    }
    const auto log_rho = [&](const DependencyMap& p) { return std::log(feasibility_index(d, dist, p)); };
    worst = std::min(worst, theta * log_rho(p1) + (1 - theta) * log_rho(p2) - log_rho(mix));
  }
  report(3, worst >= -1e-9, seconds_since(t0), 10, "100 triples, min slack " + fmt("%.3g", worst));
}

// ---------------------------------------------------------------------------
// 4. Analytic gradient against central differences of a dense eigensolver.

void gradient() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  int instances = 0;
  while (instances < 50) {
    const DsmSet d = testing::random_dsms(1 + instances % 4, 0.7);
    const FeedbackDistribution dist = testing::random_pmf(5);
    if (testing::reference_rho(d, dist) < 1e-3) continue;
    ++instances;
    DependencyMap psi;
    for (const Coordinate& c : tunable_coordinates(d)) psi[c] = d.block(c.block)(c.i, c.j) * testing::uniform(0.3, 1);
    const DependencyMap grad = grad_log_rho(d, dist, psi);
    double scale = 0.0, err = 0.0;
    for (const auto& [c, g] : grad) {
      const auto at = [&](double xi) {
        DependencyMap q = psi;
        q[c] = std::exp(xi);
        DsmSet t = d;
        for (const auto& [cc, v] : q) t.block(cc.block)(cc.i, cc.j) = v;
        return std::log(testing::reference_rho(t, dist));
      };
      const double xi = std::log(psi.at(c)), h = 1e-5;
      const double fd = (at(xi + h) - at(xi - h)) / (2 * h);
      scale = std::max(scale, std::abs(fd));
      err = std::max(err, std::abs(g - fd));
    }
    // Elasticities are O(1); the floor keeps structurally inert instances
    // (zero gradient, differences at rounding level) from dividing by noise.
    worst = std::max(worst, err / std::max(scale, 1e-3));
  }
  report(4, worst < 1e-5, seconds_since(t0), 10,
         "50 instances, max |grad - fd| / max(max|fd|, 1e-3) " + fmt("%.3g", worst));
}

// ---------------------------------------------------------------------------
// 5. Both solvers against exhaustive search on small instances.

using Mat6 = Eigen::Matrix<double, 6, 6>;

// Largest real root of the characteristic polynomial (Faddeev-LeVerrier),
// by Newton from an upper bound: every derivative of the polynomial is
// positive to the right of the Perron root, so the iteration is monotone.
double perron_root(const Mat6& a) {
  double coef[7];
  coef[0] = 1.0;
  Mat6 mk = Mat6::Identity();
  for (int k = 1; k <= 6; ++k) {
    const Mat6 am = a * mk;
    coef[k] = -am.trace() / k;
    mk = am + coef[k] * Mat6::Identity();
  }
  double x = a.colwise().sum().maxCoeff();
  if (x <= 0.0) return 0.0;
  for (int it = 0; it < 500; ++it) {
    double p = coef[0], dp = 0.0;
    for (int k = 1; k <= 6; ++k) {
      dp = dp * x + p;
      p = p * x + coef[k];
    }
    if (dp <= 0.0) break;
    const double step = p / dp;
    x -= step;
    if (std::abs(step) <= 1e-15 * std::max(x, 1e-300)) break;
  }
  return std::max(x, 0.0);
}

struct SmallInstance {
  DsmSet nominal;
  std::vector<Coordinate> coords;
  std::vector<double> omega, coef, full;
  Mat6 base1, base2;
  std::vector<Mat6> d1, d2;  // A1, A2 are affine in the dependencies
  double epsilon = 0.3;

  double psi_of(int k, double spend) const { return std::pow(1.0 / omega[k] + spend / coef[k], -1.0); }

  double rho(const std::vector<double>& spend) const {
    Mat6 a1 = base1, a2 = base2;
    for (std::size_t k = 0; k < coords.size(); ++k) {
      const double p = psi_of(static_cast<int>(k), spend[k]);
      a1 += p * d1[k];
      a2 += p * d2[k];
    }
    // Intervals of 1 or 2 steps with equal probability.
    return perron_root(0.5 * (a1 + a2 * a1));
  }
};

SmallInstance small_instance(int d) {
  const std::vector<Block> blocks{Block::L, Block::S, Block::LS, Block::SL};
  for (;;) {
    SmallInstance s;
    DsmSet& n = s.nominal;
    n.omega_l = Eigen::MatrixXd::Zero(2, 2);
    n.omega_s = Eigen::MatrixXd::Zero(2, 2);
    n.omega_ls = Eigen::MatrixXd::Zero(2, 2);
    n.omega_sl = Eigen::MatrixXd::Zero(2, 2);
    for (int i = 0; i < 2; ++i) {
      n.omega_l(i, i) = testing::uniform(0.3, 0.9);
      n.omega_s(i, i) = testing::uniform(0.3, 0.9);
    }
    std::vector<Coordinate> candidates;
    for (Block b : blocks) {
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
          if ((b == Block::L || b == Block::S) && i == j) continue;
          candidates.push_back({b, i, j});
        }
      }
    }
    std::shuffle(candidates.begin(), candidates.end(), testing::rng());
    for (int k = 0; k < d; ++k) n.block(candidates[k].block)(candidates[k].i, candidates[k].j) = testing::uniform(0.1, 0.6);
    s.coords = tunable_coordinates(n);

    DsmSet zeroed = n;
    for (const Coordinate& c : s.coords) zeroed.block(c.block)(c.i, c.j) = 0.0;
    const testing::RefPair base = testing::reference_transitions(zeroed);
    s.base1 = base.a1;
    s.base2 = base.a2;
    for (const Coordinate& c : s.coords) {
      DsmSet unit = zeroed;
      unit.block(c.block)(c.i, c.j) = 1.0;
      const testing::RefPair r = testing::reference_transitions(unit);
      s.d1.push_back(r.a1 - base.a1);
      s.d2.push_back(r.a2 - base.a2);
      const double w = n.block(c.block)(c.i, c.j);
      s.omega.push_back(w);
      // f(psi) = c (1/psi - 1/omega), f(epsilon omega) = omega.
      s.coef.push_back(w * w / (1.0 / s.epsilon - 1.0));
      s.full.push_back(w);
    }
    const std::vector<double> none(d, 0.0);
    if (s.rho(none) - s.rho(s.full) > 0.01) return s;
  }
}

// Walks every point of the grid over the first d-1 spends in ascending
// order; `visit` returns false to skip the rest of the innermost axis.
void walk_grid(const SmallInstance& s, int points, const std::function<bool(std::vector<double>&, double)>& visit) {
  const int d = static_cast<int>(s.coords.size());
  std::vector<int> idx(d - 1, 0);
  std::vector<double> spend(d, 0.0);
  for (;;) {
    double used = 0.0;
    for (int k = 0; k < d - 2; ++k) {
      spend[k] = s.full[k] * idx[k] / (points - 1);
      used += spend[k];
    }
    for (int t = 0; t < points; ++t) {
      spend[d - 2] = s.full[d - 2] * t / (points - 1);
      if (!visit(spend, used + spend[d - 2])) break;
    }
    int k = d - 3;
    while (k >= 0 && ++idx[k] == points) idx[k--] = 0;
    if (k < 0) break;
  }
}

void optimizer_oracle() {
  const auto t0 = Clock::now();
  const int points = 200;
  double worst_budget = 0.0, worst_perf = 0.0, perf_above = -1e300;
  bool feasible = true;
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 2 + trial % 3;
    const SmallInstance s = small_instance(d);
    const FeedbackDistribution dist({{1, 0.5}, {2, 0.5}});
    const CostModel model = CostModel::inverse_power(s.nominal, s.epsilon, 1.0);
    const double total_full = std::accumulate(s.full.begin(), s.full.end(), 0.0);

    // Budget: rho is nondecreasing in every dependency, so the remaining
    // budget always goes to the last coordinate.
    const double budget = testing::uniform(0.1, 0.25) * total_full;
    double grid_rho = 1e300;
    walk_grid(s, points, [&](std::vector<double>& spend, double used) {
      if (used > budget) return false;
      spend[d - 1] = std::min(budget - used, s.full[d - 1]);
      grid_rho = std::min(grid_rho, s.rho(spend));
      return true;
    });
    const AllocationResult rb = solve_budget_constrained(s.nominal, dist, model, budget);
    worst_budget = std::max(worst_budget, std::abs(rb.rho_after - grid_rho));
    feasible = feasible && rb.total_cost <= budget * (1 + 1e-8);

    // Performance: the cheapest last spend meeting the target, by bisection,
    // only where it could beat the best cost found so far.
    const double rho_nom = s.rho(std::vector<double>(d, 0.0));
    const double target = rho_nom - testing::uniform(0.2, 0.5) * (rho_nom - s.rho(s.full));
    double best = total_full;
    walk_grid(s, points, [&](std::vector<double>& spend, double used) {
      if (used >= best) return false;
      const double room = std::min(best - used, s.full[d - 1]);
      spend[d - 1] = room;
      if (s.rho(spend) > target) return true;
      double lo = 0.0, hi = room;
      spend[d - 1] = 0.0;
      if (s.rho(spend) > target) {
        for (int k = 0; k < 60 && hi - lo > 1e-12 * s.full[d - 1]; ++k) {
          spend[d - 1] = 0.5 * (lo + hi);
          (s.rho(spend) > target ? lo : hi) = spend[d - 1];
        }
      } else {
        hi = 0.0;
      }
      best = std::min(best, used + hi);
      return true;
    });
    const AllocationResult rp = solve_performance_constrained(s.nominal, dist, model, target);
    worst_perf = std::max(worst_perf, std::abs(rp.total_cost - best));
    perf_above = std::max(perf_above, rp.total_cost - best);
    feasible = feasible && rp.rho_after <= target * (1 + 1e-6);
  }
  report(5, worst_budget <= 1e-3 && worst_perf <= 1e-3 && feasible, seconds_since(t0), 60,
         "20 instances, max |rho - grid| " + fmt("%.3g", worst_budget) + ", max |cost - grid| " +
             fmt("%.3g", worst_perf) + " (max cost - grid " + fmt("%.3g", perf_above) + ")" + (feasible ? "" : ", constraint violated"));
}

// ---------------------------------------------------------------------------
// 6 and 7 use the automotive project.

fs::path case_study_file(bool* transcribed) {
  const fs::path fig = fs::path(PDOPT_DATA_DIR) / "automotive_transcribed.json";
  *transcribed = fs::exists(fig);
  return *transcribed ? fig : fs::path(PDOPT_DATA_DIR) / "automotive_surrogate.json";
}

const std::set<int> kFocus{1, 2, 5};  // tasks 2, 3 and 6

void sweep() {
  const auto t0 = Clock::now();
  bool transcribed = false;
  const Project p = parse_project(case_study_file(&transcribed));
  const CostModel model = p.cost_model();
  double previous = 1e300, worst_rise = 0.0, worst_gap = -1e300;
  for (int k = 0; k < 30; ++k) {
    const double budget = 1.5 * k / 29;
    const AllocationResult opt = solve_budget_constrained(p.dsms, p.dist, model, budget);
    const AllocationResult base = baseline_allocation(p.dsms, p.dist, model, budget, kFocus);
    worst_rise = std::max(worst_rise, opt.rho_after - previous);
    worst_gap = std::max(worst_gap, opt.rho_after - base.rho_after);
    previous = opt.rho_after;
  }
  report(6, worst_rise <= 1e-6 && worst_gap <= 1e-9, seconds_since(t0), 60,
         "30 budgets on " + std::string(transcribed ? "the transcribed" : "the surrogate") +
             " project, max rise " + fmt("%.3g", worst_rise) + ", max (optimized - baseline) " +
             fmt("%.3g", worst_gap));
}

void case_study() {
  const auto t0 = Clock::now();
  bool transcribed = false;
  Project p = parse_project(case_study_file(&transcribed));
  p.epsilon = 0.85;
  p.dist = FeedbackDistribution({{4, 0.125}, {5, 0.125}, {6, 0.5}, {7, 0.125}, {8, 0.125}});
  std::string detail = transcribed ? "transcribed DSMs:" : "no transcription, surrogate DSMs:";
  bool matched = false;
  for (double exponent : {0.5, 10.0, 50.0}) {
    p.cost_exponent = exponent;
    const CostModel model = p.cost_model();
    const AllocationResult opt = solve_budget_constrained(p.dsms, p.dist, model, 1.5);
    const AllocationResult base = baseline_allocation(p.dsms, p.dist, model, 1.5, kFocus);
    detail += " p=" + fmt("%g", exponent) + " rho_opt " + fmt("%.4f", opt.rho_after) + " rho_base " +
              fmt("%.4f", base.rho_after) + ";";
    matched = matched || (std::abs(opt.rho_after - 0.8484) <= 0.01 && std::abs(base.rho_after - 0.9079) <= 0.01);
  }
  detail += " reference 0.8484 / 0.9079";
  report(7, matched && transcribed, seconds_since(t0), 120, detail, false);
}

// ---------------------------------------------------------------------------
// 8. Boundary experiment.

double top_decile_share(const std::vector<BoundaryRow>& rows, double BoundaryRow::*measure) {
  std::vector<const BoundaryRow*> order;
  for (const BoundaryRow& r : rows) order.push_back(&r);
  std::stable_sort(order.begin(), order.end(), [&](auto* a, auto* b) { return a->*measure > b->*measure; });
  const std::size_t top = std::max<std::size_t>(1, rows.size() / 10);
  double head = 0.0, all = 0.0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    all += order[k]->investment;
    if (k < top) head += order[k]->investment;
  }
  return all > 0 ? head / all : 0.0;
}

void boundary() {
  const auto t0 = Clock::now();
  const FeedbackDistribution dist({{4, 0.125}, {5, 0.125}, {6, 0.5}, {7, 0.125}, {8, 0.125}});
  bool ok = true, in_time = true;
  std::string detail;
  for (int m : {10, 200}) {
    for (GraphModel model : {GraphModel::ErdosRenyi, GraphModel::WattsStrogatz, GraphModel::BarabasiAlbert}) {
      const auto t = Clock::now();
      const BoundaryExperiment e = run_boundary_experiment(model, m, 2024, dist);
      const double secs = seconds_since(t);
      in_time = in_time && secs < (m == 10 ? 60.0 : 1800.0);
      ok = ok && e.allocation.rho_after < 1.0 && e.allocation.total_cost <= e.budget * (1 + 1e-8);
      const DsmSet nominal = e.calibration.dsm.split();
      for (const auto& [c, psi] : e.allocation.psi) {
        const double w = nominal.block(c.block)(c.i, c.j);
        ok = ok && psi <= w && psi >= 0.5 * w * (1 - 1e-12);
      }
      detail += std::string(graph_model_name(model)) + " m=" + std::to_string(m) + " " + fmt("%.1fs", secs) +
                " rho_after " + fmt("%.4f", e.allocation.rho_after);
      if (m == 200 && model == GraphModel::BarabasiAlbert) {
        detail += " top-decile share (betweenness/pagerank/hub) " +
                  fmt("%.2f", top_decile_share(e.rows, &BoundaryRow::betweenness)) + "/" +
                  fmt("%.2f", top_decile_share(e.rows, &BoundaryRow::pagerank)) + "/" +
                  fmt("%.2f", top_decile_share(e.rows, &BoundaryRow::hub));
      }
      detail += "; ";
    }
  }
  report(8, ok && in_time, seconds_since(t0), 3 * 60 + 3 * 1800, detail);
}

// ---------------------------------------------------------------------------
// 9. Byte-identical CLI output across runs.

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string shell_quote(const std::string& s) { return "'" + s + "'"; }

void determinism() {
  const auto t0 = Clock::now();
  const fs::path root = fs::temp_directory_path() / ("pdopt_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  const std::string project = (fs::path(PDOPT_DATA_DIR) / "automotive_surrogate.json").string();
  const std::vector<std::pair<std::string, std::string>> commands{
      {"feasibility", "feasibility " + project},
      {"simulate", "simulate " + project + " --runs 200 --horizon 150 --seed 7"},
      {"simulate_random_pmf", "simulate " + project + " --runs 200 --horizon 150 --seed 7 --random-pmf 4-8"},
      {"optimize_budget", "optimize budget " + project + " --budget 1.5"},
      {"optimize_performance", "optimize performance " + project + " --target 0.93"},
      {"baseline", "baseline " + project + " --budget 1.5 --focus 2,3,6"},
      {"sweep", "sweep-budget " + project + " --from 0 --to 1.5 --steps 8 --focus 2,3,6"},
      {"synth_er", "synth --model er --m 10 --seed 5"},
      {"synth_ws", "synth --model ws --m 10 --seed 5"},
      {"synth_ba", "synth --model ba --m 10 --seed 5"},
      {"centrality", "centrality " + project + " --budget 1.5"},
  };
  int identical = 0;
  std::string mismatches;
  for (const auto& [name, args] : commands) {
    std::string outputs[2];
    bool ran = true;
    for (int run = 0; run < 2; ++run) {
      const fs::path dir = root / (run == 0 ? "a" : "b") / name;
      fs::create_directories(dir);
      const fs::path out = dir.parent_path() / (name + ".stdout");
      const std::string cmd = shell_quote(PDOPT_CLI_PATH) + " --out " + shell_quote(dir.string()) + " " + args +
                              " > " + shell_quote(out.string()) + " 2>&1";
      ran = ran && std::system(cmd.c_str()) == 0;
      // Reported paths differ by directory; everything else must match.
      std::string text = slurp(out);
      for (std::size_t pos; (pos = text.find(dir.string())) != std::string::npos;) {
        text.replace(pos, dir.string().size(), "<out>");
      }
      std::vector<fs::path> files;
      for (const auto& entry : fs::directory_iterator(dir)) files.push_back(entry.path());
      std::sort(files.begin(), files.end());
      for (const fs::path& f : files) text += "\n--- " + f.filename().string() + "\n" + slurp(f);
      outputs[run] = text;
    }
    if (ran && outputs[0] == outputs[1]) {
      ++identical;
    } else {
      mismatches += " " + name + (ran ? "" : " (nonzero exit)");
    }
  }
  fs::remove_all(root);
  report(9, identical == static_cast<int>(commands.size()), seconds_since(t0), 60,
         std::to_string(identical) + "/" + std::to_string(commands.size()) + " commands byte-identical" +
             (mismatches.empty() ? "" : "; differing:" + mismatches));
}

}  // namespace

int main() {
  wtm_oracle();
  epoch_decay();
  kingman();
  gradient();
  optimizer_oracle();
  sweep();
  case_study();
  boundary();
  determinism();
  std::printf("%s\n", failures == 0 ? "all blocking criteria passed" : "some criteria failed");
  return failures == 0 ? 0 : 1;
}
