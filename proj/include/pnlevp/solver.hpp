#pragma once

#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "pnlevp/barycentric.hpp"
#include "pnlevp/contour.hpp"
#include "pnlevp/domain.hpp"
#include "pnlevp/loewner.hpp"
#include "pnlevp/problems.hpp"

namespace pnlevp {

struct FitOptions {
  Real fit_tol = 1e-12;
  Real rank_tol = 1e-10;
  int max_p_nodes = 0;  // 0: the whole parameter grid
  bool node_lines = true;
  unsigned workers = 0;  // 0: PNLEVP_THREADS / hardware
};

/// Result of the offline phase: one shared scalar barycentric fit and its
/// 2r vector lifts L_k ~ l_k^T H(z,p), R_k ~ H(z,p) r_k.
struct OfflineModel {
  std::string problem_name;
  ContourDomain domain;
  SamplingConfig sampling;
  int m = 0;
  BarycentricModel2D scalar_model;
  std::vector<VectorBarycentricModel> left_models;
  std::vector<VectorBarycentricModel> right_models;

  // metadata
  int quadrature_nodes = 0;
  Real fit_tol = 1e-12;
  Real rank_tol = 1e-10;
  bool converged = false;

  Real p_min() const;
  Real p_max() const;
};

struct EigenSolution {
  Complex p_hat;
  std::vector<Complex> eigenvalues;
  CMatrix V;
  CMatrix W;
  std::vector<bool> in_domain;
  RVector row_singular_values;
  RVector column_singular_values;
  int rank = 0;
  int rank_mismatch = 0;
  int discarded_infinite = 0;
  std::vector<std::string> warnings;
  std::vector<std::string> diagnostics;

  std::size_t size() const { return eigenvalues.size(); }
};

/// Offline phase: resolvent quadrature on the boundary of `domain` with
/// n_nodes trapezoid nodes, rank check, shared p-AAA fit and vector lifts.
OfflineModel offline(const PNlevpProblem& problem, const ContourDomain& domain,
                     const SamplingConfig& config, int n_nodes, const FitOptions& options = {});

/// Fits the rational surrogates from already probed samples with a known
/// eigenvalue count m (the z-node count is pinned to m + 1).
OfflineModel fit_offline_model(const std::string& problem_name, const ContourDomain& domain,
                               const SamplingConfig& config, const ProbedSampleSet& samples,
                               int m, const FitOptions& options = {});

/// Scalar data D(s_i, p_j) = l^T H(s_i, p_j) r with l, r the mean probing
/// directions; rows index sample points, columns parameters.
CMatrix scalar_probe_data(const ProbedSampleSet& samples, const SamplingConfig& config);

/// Online phase at p_hat. rank_tol defaults to the model's offline value.
/// With cap_rank the realization keeps at most m singular directions, which
/// stops surrogate noise from inflating the rank when extrapolating.
EigenSolution online(const OfflineModel& model, Complex p_hat,
                     std::optional<Real> rank_tol = std::nullopt, bool cap_rank = true);

/// ||T(lambda_j, p_hat) v_j||_2 / ||v_j||_2 for every eigenpair.
std::vector<Real> residuals(const PNlevpProblem& problem, const EigenSolution& solution);

/// Eigenvalues only: poles of the scalar surrogate frozen at p_hat. Loses
/// multiplicity information.
std::vector<Complex> scalar_probe_eigenvalues(const OfflineModel& model, Complex p_hat);
std::vector<Complex> scalar_probe_eigenvalues(const BarycentricModel2D& model, Complex p_hat);

struct SweepRow {
  Complex p_hat;
  std::vector<Complex> eigenvalues;
  std::vector<bool> in_domain;
  Real max_residual = std::numeric_limits<Real>::quiet_NaN();  // NaN without a problem
  std::vector<std::string> warnings;
};

/// n uniformly spaced real parameters in [lo, hi] (the midpoint when n = 1).
std::vector<Real> uniform_parameters(Real lo, Real hi, int n);

/// online() at every parameter, in parallel over p_hat; rows keep input order.
/// Residuals are computed when `problem` is given.
std::vector<SweepRow> parameter_sweep(const OfflineModel& model, const std::vector<Real>& p_values,
                                      const PNlevpProblem* problem = nullptr,
                                      unsigned workers = 0);

/// Versioned JSON model file; written atomically (temp file + rename).
void save_model(const OfflineModel& model, const std::filesystem::path& path);
OfflineModel load_model(const std::filesystem::path& path);
std::string model_to_string(const OfflineModel& model);
OfflineModel model_from_string(const std::string& text);

}  // namespace pnlevp
