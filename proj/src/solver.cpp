#include "pnlevp/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pnlevp/parallel.hpp"

namespace pnlevp {

Real OfflineModel::p_min() const {
  Real v = std::numeric_limits<Real>::infinity();
  for (const Complex p : sampling.parameter_points) v = std::min(v, p.real());
  return v;
}

Real OfflineModel::p_max() const {
  Real v = -std::numeric_limits<Real>::infinity();
  for (const Complex p : sampling.parameter_points) v = std::max(v, p.real());
  return v;
}

CMatrix scalar_probe_data(const ProbedSampleSet& samples, const SamplingConfig& config) {
  const int r = config.r();
  const Eigen::Index n = samples.dim();
  const CVector r_mean = config.right_dirs.rowwise().mean();
  CMatrix d(2 * r, samples.q());
  for (int j = 0; j < samples.q(); ++j) {
    // sum_k l_k^T H(s_i, p_j), row i
    CMatrix left_sum = CMatrix::Zero(2 * r, n);
    for (int k = 0; k < r; ++k) left_sum += samples.left_block(j).middleCols(k * n, n);
    d.col(j) = left_sum * r_mean / static_cast<Real>(r);
  }
  return d;
}

OfflineModel fit_offline_model(const std::string& problem_name, const ContourDomain& domain,
                               const SamplingConfig& config, const ProbedSampleSet& samples,
                               int m, const FitOptions& options) {
  const int r = config.r();
  const int q = config.q();
  if (q < 2) throw ArgumentError("offline: the parametric fit needs at least 2 parameter samples");
  if (m < 0) throw ArgumentError("offline: negative eigenvalue count");
  if (m + 1 > r)
    throw ArgumentError("offline: " + std::to_string(m) +
                        " eigenvalues need at least m+1 probing directions; increase r");
  if (samples.r() != r || samples.q() != q)
    throw ArgumentError("offline: samples do not match the sampling configuration");

  const CMatrix data = scalar_probe_data(samples, config);
  PaaaOptions popts;
  popts.tol = options.fit_tol;
  popts.min_z_nodes = m + 1;
  popts.node_lines = options.node_lines;
  popts.max_z_nodes = m + 1;
  popts.max_p_nodes = options.max_p_nodes;

  OfflineModel model;
  model.problem_name = problem_name;
  model.domain = domain;
  model.sampling = config;
  model.m = m;
  model.quadrature_nodes = samples.quadrature_nodes;
  model.fit_tol = options.fit_tol;
  model.rank_tol = options.rank_tol;
  model.scalar_model = paaa_fit(data, config.sample_points, config.parameter_points, popts);
  model.converged = model.scalar_model.converged;

  const auto& zi = model.scalar_model.z_node_index;
  const auto& pj = model.scalar_model.p_node_index;
  const auto mz = static_cast<Eigen::Index>(zi.size());
  const Eigen::Index count = mz * static_cast<Eigen::Index>(pj.size());
  const Eigen::Index n = samples.dim();
  for (int k = 0; k < r; ++k) {
    CMatrix lv(n, count), rv(n, count);
    for (std::size_t b = 0; b < pj.size(); ++b)
      for (std::size_t a = 0; a < zi.size(); ++a) {
        const Eigen::Index col = static_cast<Eigen::Index>(a) + static_cast<Eigen::Index>(b) * mz;
        lv.col(col) = samples.left(k, zi[a], pj[b]);
        rv.col(col) = samples.right(k, zi[a], pj[b]);
      }
    model.left_models.push_back(lift_vector(model.scalar_model, lv));
    model.right_models.push_back(lift_vector(model.scalar_model, rv));
  }
  return model;
}

OfflineModel offline(const PNlevpProblem& problem, const ContourDomain& domain,
                     const SamplingConfig& config, int n_nodes, const FitOptions& options) {
  if (config.q() < 2)
    throw ArgumentError("offline: the parametric fit needs at least 2 parameter samples");
  config.validate(domain);
  if (config.dim() != problem.dim())
    throw ArgumentError("offline: probing directions do not match the problem dimension");
  const QuadratureRule rule = build_trapezoid_rule(domain, n_nodes);
  const ProbedSampleSet samples = probe_samples(problem, rule, config, options.workers);
  if (!samples.all_finite()) throw NumericalError("offline: probed samples are not finite");
  const int m = consistency_rank_check(samples, config, options.rank_tol);
  return fit_offline_model(problem.name(), domain, config, samples, m, options);
}

EigenSolution online(const OfflineModel& model, Complex p_hat, std::optional<Real> rank_tol,
                     bool cap_rank) {
  const SamplingConfig& cfg = model.sampling;
  const int r = cfg.r();
  const Eigen::Index n = cfg.dim();
  if (static_cast<int>(model.left_models.size()) != r ||
      static_cast<int>(model.right_models.size()) != r)
    throw ArgumentError("online: model has the wrong number of vector surrogates");

  TangentialData data;
  data.theta = cfg.left_points();
  data.sigma = cfg.right_points();
  data.left_dirs = cfg.left_dirs;
  data.right_dirs = cfg.right_dirs;
  data.left_vals.resize(n, r);
  data.right_vals.resize(n, r);
  for (int k = 0; k < r; ++k) {
    data.left_vals.col(k) = eval_model(model.left_models[static_cast<std::size_t>(k)],
                                       data.theta[static_cast<std::size_t>(k)], p_hat);
    data.right_vals.col(k) = eval_model(model.right_models[static_cast<std::size_t>(k)],
                                        data.sigma[static_cast<std::size_t>(k)], p_hat);
  }

  EigenRealization real = realize(data, rank_tol.value_or(model.rank_tol),
                                  cap_rank ? std::optional<int>(model.m) : std::nullopt);

  EigenSolution sol;
  sol.p_hat = p_hat;
  const Real span = model.p_max() - model.p_min();
  if (p_hat.imag() != 0.0 || p_hat.real() < model.p_min() - 1e-12 * span ||
      p_hat.real() > model.p_max() + 1e-12 * span) {
    std::ostringstream os;
    os << "p=" << p_hat << " lies outside the sampled parameter range [" << model.p_min() << ", "
       << model.p_max() << "]; extrapolated result";
    sol.warnings.push_back(os.str());
  }
  if (!model.converged) sol.warnings.push_back("offline fit did not reach its tolerance");
  if (real.rank != model.m)
    sol.diagnostics.push_back("realized rank " + std::to_string(real.rank) +
                              " differs from offline m=" + std::to_string(model.m));
  for (const Complex z : real.eigenvalues) sol.in_domain.push_back(model.domain.contains(z));
  sol.eigenvalues = std::move(real.eigenvalues);
  sol.V = std::move(real.V);
  sol.W = std::move(real.W);
  sol.row_singular_values = std::move(real.row_singular_values);
  sol.column_singular_values = std::move(real.column_singular_values);
  sol.rank = real.rank;
  sol.rank_mismatch = real.rank_mismatch;
  sol.discarded_infinite = real.discarded_infinite;
  for (auto& d : real.diagnostics) sol.diagnostics.push_back(std::move(d));
  return sol;
}

std::vector<Real> residuals(const PNlevpProblem& problem, const EigenSolution& solution) {
  if (solution.eigenvalues.empty()) throw ArgumentError("residuals: empty solution");
  if (solution.V.rows() != problem.dim())
    throw ArgumentError("residuals: eigenvector length differs from the problem dimension");
  std::vector<Real> out;
  for (std::size_t j = 0; j < solution.eigenvalues.size(); ++j) {
    const CVector v = solution.V.col(static_cast<Eigen::Index>(j));
    const Real nv = v.norm();
    if (!(nv > 0.0)) throw NumericalError("residuals: zero eigenvector (invalid solution)");
    out.push_back((problem.eval(solution.eigenvalues[j], solution.p_hat) * v).norm() / nv);
  }
  return out;
}

std::vector<Real> uniform_parameters(Real lo, Real hi, int n) {
  if (n < 1) throw ArgumentError("uniform_parameters: need at least one point");
  if (hi < lo) throw ArgumentError("uniform_parameters: reversed range");
  std::vector<Real> out;
  if (n == 1) return {0.5 * (lo + hi)};
  for (int k = 0; k < n; ++k) out.push_back(lo + (hi - lo) * k / (n - 1.0));
  return out;
}

std::vector<SweepRow> parameter_sweep(const OfflineModel& model, const std::vector<Real>& p_values,
                                      const PNlevpProblem* problem, unsigned workers) {
  std::vector<SweepRow> rows(p_values.size());
  parallel_for(
      p_values.size(),
      [&](std::size_t k) {
        EigenSolution sol = online(model, p_values[k]);
        SweepRow& row = rows[k];
        row.p_hat = sol.p_hat;
        if (problem && !sol.eigenvalues.empty()) {
          Real worst = 0.0;
          for (const Real r : residuals(*problem, sol)) worst = std::max(worst, r);
          row.max_residual = worst;
        }
        row.eigenvalues = std::move(sol.eigenvalues);
        row.in_domain = std::move(sol.in_domain);
        row.warnings = std::move(sol.warnings);
      },
      resolve_workers(workers));
  return rows;
}

std::vector<Complex> scalar_probe_eigenvalues(const BarycentricModel2D& model, Complex p_hat) {
  return poles_at(model, p_hat);
}

std::vector<Complex> scalar_probe_eigenvalues(const OfflineModel& model, Complex p_hat) {
  return poles_at(model.scalar_model, p_hat);
}

}  // namespace pnlevp
