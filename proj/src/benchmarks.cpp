#include "pnlevp/benchmarks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

namespace pnlevp {

SamplingConfig BenchmarkSetup::sampling(Eigen::Index dim) const {
  return sampling_on(sample_domain, r, q, p_min, p_max, dim, seed);
}

bool BenchReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const BenchCheck& c) { return c.pass; });
}

std::vector<std::string> benchmark_names() {
  return {"linear-1", "linear-2", "delay", "damped-string-1", "damped-string-2"};
}

BenchmarkSetup benchmark_setup(const std::string& name) {
  BenchmarkSetup b;
  b.name = name;
  if (name == "linear-1" || name == "linear-2") {
    b.problem = "linear-demo";
    b.domain = name == "linear-1" ? ContourDomain::disk(0.0, 0.6)
                                  : ContourDomain::disk(Complex(0.0, 0.5), 0.25);
    b.sample_domain = b.domain.inflated(4.0 / 3.0);
    b.p_min = name == "linear-1" ? 0.75 : 1.25;
    b.p_max = name == "linear-1" ? 1.25 : 1.5;
    b.r = 20;
    b.q = 40;
    b.n_nodes = 512;
    b.seed = 1;
  } else if (name == "delay") {
    b.problem = "delay";
    b.domain = ContourDomain::disk(0.0, 0.075);
    b.sample_domain = b.domain.inflated(4.0 / 3.0);
    b.p_min = 30.0;
    b.p_max = 35.0;
    b.r = 20;
    b.q = 40;
    b.n_nodes = 128;
    b.seed = 7;
  } else if (name == "damped-string-1") {
    b.problem = "damped-string";
    b.domain = ContourDomain::ellipse(-3.0, 2.5, 10.0);
    b.sample_domain = ContourDomain::ellipse(-3.0, 3.0, 11.0);
    b.p_min = 3.0;
    b.p_max = 4.0;
    b.r = 250;
    b.q = 25;
    b.n_nodes = 1024;
    b.seed = 1;
  } else if (name == "damped-string-2") {
    b.problem = "damped-string";
    b.domain = ContourDomain::ellipse(-2.0, 1.75, 15.0);
    b.sample_domain = ContourDomain::ellipse(-2.0, 2.0, 16.0);
    b.p_min = 4.0;
    b.p_max = 5.0;
    b.r = 250;
    b.q = 25;
    b.n_nodes = 2048;
    b.seed = 1;
  } else {
    std::string list;
    for (const auto& n : benchmark_names()) list += " " + n;
    throw ArgumentError("unknown benchmark '" + name + "'; available:" + list);
  }
  return b;
}

namespace {

std::string fmt(Real x) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << x;
  return os.str();
}

BenchCheck at_most(const std::string& label, Real value, Real bound) {
  return {label, value <= bound, fmt(value) + " <= " + fmt(bound)};
}

BenchCheck in_range(const std::string& label, Real value, Real lo, Real hi) {
  std::ostringstream os;
  os << value << " in [" << lo << ", " << hi << "]";
  return {label, value >= lo && value <= hi, os.str()};
}

BenchCheck equals(const std::string& label, int value, int expected) {
  return {label, value == expected, std::to_string(value) + " == " + std::to_string(expected)};
}

Real max_residual(const std::vector<SweepRow>& rows) {
  Real worst = 0.0;
  for (const auto& row : rows)
    worst = std::isnan(row.max_residual) ? std::numeric_limits<Real>::infinity()
                                         : std::max(worst, row.max_residual);
  return worst;
}

// Largest distance from a computed eigenvalue to the nearest reference value.
Real match_error(const std::vector<Complex>& computed, const std::vector<Complex>& reference) {
  if (reference.empty()) return std::numeric_limits<Real>::infinity();
  Real worst = 0.0;
  for (const Complex z : computed) {
    Real best = std::numeric_limits<Real>::infinity();
    for (const Complex w : reference) best = std::min(best, std::abs(z - w));
    worst = std::max(worst, best);
  }
  return worst;
}

void linear_checks(BenchReport& rep, const PNlevpProblem& problem) {
  const bool first = rep.setup.name == "linear-1";
  rep.checks.push_back(equals("eigenvalue count m", rep.model.m, first ? 2 : 1));
  rep.checks.push_back(at_most("max residual over the sweep", max_residual(rep.sweep),
                               first ? 1e-10 : 1e-7));
  Real err = 0.0;
  for (const auto& row : rep.sweep) {
    const Complex p = row.p_hat;
    if (first && std::abs(p - 1.0) < 1e-2) continue;
    std::vector<Complex> ref{LinearDemoProblem::lambda2(p)};
    if (first) ref.push_back(LinearDemoProblem::lambda3(p));
    err = std::max(err, match_error(row.eigenvalues, ref));
    if (row.eigenvalues.size() != ref.size()) err = std::numeric_limits<Real>::infinity();
  }
  rep.checks.push_back(at_most(first ? "eigenvalues vs +-sqrt(1-p) (|p-1| >= 0.01)"
                                     : "eigenvalue vs +sqrt(1-p)",
                               err, first ? 1e-8 : 1e-6));
  if (first) {
    const EigenSolution sol = online(rep.model, 1.0);
    Real worst = 0.0;
    for (const Real r : residuals(problem, sol)) worst = std::max(worst, r);
    rep.checks.push_back(at_most("residual at the defective point p=1", worst, 1e-8));
  }
}

void delay_checks(BenchReport& rep, const PNlevpProblem& problem) {
  rep.checks.push_back(equals("eigenvalue count m", rep.model.m, 4));
  rep.checks.push_back(equals("z-degree", rep.model.scalar_model.z_degree(), 4));
  rep.checks.push_back(equals("p-degree", rep.model.scalar_model.p_degree(), 5));
  const ContourDomain wide = ContourDomain::disk(0.0, 0.2);
  for (const Real p : {30.0, 35.0}) {
    const EigenSolution sol = online(rep.model, p);
    Real err = match_error(sol.eigenvalues, newton_eigenvalues(problem, p, rep.setup.domain));
    if (sol.size() != 4) err = std::numeric_limits<Real>::infinity();
    rep.checks.push_back(at_most("p=" + std::to_string(int(p)) + " oracle error", err, 1e-6));
  }
  {
    const EigenSolution sol = online(rep.model, 20.0);
    const auto outside = std::count(sol.in_domain.begin(), sol.in_domain.end(), false);
    rep.checks.push_back(equals("p=20 eigenvalue count", static_cast<int>(sol.size()), 4));
    rep.checks.push_back(equals("p=20 flagged outside", static_cast<int>(outside), 2));
    rep.checks.push_back(at_most("p=20 oracle error",
                                 match_error(sol.eigenvalues, newton_eigenvalues(problem, 20.0, wide)),
                                 1e-4));
  }
  {
    const EigenSolution sol = online(rep.model, 50.0);
    rep.checks.push_back(equals("p=50 eigenvalue count", static_cast<int>(sol.size()), 4));
    rep.checks.push_back(at_most("p=50 oracle error",
                                 match_error(sol.eigenvalues, newton_eigenvalues(problem, 50.0, wide)),
                                 1e-4));
  }
}

void damped_checks(BenchReport& rep) {
  const bool first = rep.setup.name == "damped-string-1";
  rep.checks.push_back(at_most("max residual over the sweep", max_residual(rep.sweep),
                               first ? 3e-10 : 3e-8));
  if (first) {
    Real gap = std::numeric_limits<Real>::infinity();
    Real where = std::numeric_limits<Real>::quiet_NaN();
    for (const auto& row : rep.sweep)
      for (std::size_t a = 0; a < row.eigenvalues.size(); ++a)
        for (std::size_t b = a + 1; b < row.eigenvalues.size(); ++b) {
          const Real g = std::abs(row.eigenvalues[a] - row.eigenvalues[b]);
          if (g < gap) {
            gap = g;
            where = row.p_hat.real();
          }
        }
    rep.checks.push_back(in_range("coalescence (min pairwise gap) at p", where, 3.6, 3.8));
  } else {
    Real best = std::numeric_limits<Real>::infinity();
    Real where = std::numeric_limits<Real>::quiet_NaN();
    for (const auto& row : rep.sweep) {
      if (row.eigenvalues.empty()) continue;
      Real abscissa = -std::numeric_limits<Real>::infinity();
      for (const Complex z : row.eigenvalues) abscissa = std::max(abscissa, z.real());
      if (abscissa < best) {
        best = abscissa;
        where = row.p_hat.real();
      }
    }
    rep.checks.push_back(in_range("spectral abscissa minimizer p", where, 4.6, 4.8));
  }
}

}  // namespace

BenchReport run_benchmark(const std::string& name, unsigned workers) {
  using Clock = std::chrono::steady_clock;
  BenchReport rep;
  rep.setup = benchmark_setup(name);
  const ProblemPtr problem = make_problem(rep.setup.problem);
  FitOptions fit = rep.setup.fit;
  fit.workers = workers;

  const auto t0 = Clock::now();
  rep.model = offline(*problem, rep.setup.domain, rep.setup.sampling(problem->dim()),
                      rep.setup.n_nodes, fit);
  const auto t1 = Clock::now();
  rep.sweep = parameter_sweep(rep.model,
                              uniform_parameters(rep.setup.p_min, rep.setup.p_max, rep.setup.n_test),
                              problem.get(), workers);
  if (rep.setup.problem == "linear-demo")
    linear_checks(rep, *problem);
  else if (rep.setup.problem == "delay")
    delay_checks(rep, *problem);
  else
    damped_checks(rep);
  const auto t2 = Clock::now();
  rep.offline_seconds = std::chrono::duration<double>(t1 - t0).count();
  rep.total_seconds = std::chrono::duration<double>(t2 - t0).count();
  if (name == "linear-1")
    rep.checks.push_back(at_most("runtime [s]", rep.total_seconds, 60.0));
  return rep;
}

}  // namespace pnlevp
