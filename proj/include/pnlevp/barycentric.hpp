#pragma once

#include <vector>

#include "pnlevp/contour.hpp"
#include "pnlevp/loewner.hpp"
#include "pnlevp/types.hpp"

namespace pnlevp {

/// Bivariate barycentric rational function
///
///   f(z,p) = sum_ij a_ij D_ij / ((z - xi_i)(p - pi_j))
///            / sum_ij a_ij / ((z - xi_i)(p - pi_j)),
///
/// with nodes xi (z axis) and pi (p axis) taken from a sample grid.
/// `alpha` and `node_values` are (#xi) x (#pi).
struct BarycentricModel2D {
  std::vector<Complex> z_nodes;
  std::vector<Complex> p_nodes;
  std::vector<int> z_node_index;  // positions of the nodes in the fitting grid
  std::vector<int> p_node_index;
  CMatrix alpha;
  CMatrix node_values;

  // fit report
  bool converged = false;
  Real max_error = 0.0;  // relative to max |D| over the grid
  int iterations = 0;
  std::vector<Real> error_history;

  int z_degree() const { return static_cast<int>(z_nodes.size()) - 1; }
  int p_degree() const { return static_cast<int>(p_nodes.size()) - 1; }
};

/// Vector-valued lift sharing nodes and coefficients with a scalar model.
/// Column a + b * #xi of `node_vectors` is the value at (xi_a, pi_b).
struct VectorBarycentricModel {
  std::vector<Complex> z_nodes;
  std::vector<Complex> p_nodes;
  CMatrix alpha;
  CMatrix node_vectors;

  Eigen::Index dim() const { return node_vectors.rows(); }
};

struct PaaaOptions {
  Real tol = 1e-12;     // relative to max |D|
  int max_z_nodes = 0;  // 0: half the z grid
  int max_p_nodes = 0;  // 0: the whole p grid
  int min_z_nodes = 1;
  bool node_lines = true;  // residual rows on node rows/columns too
};

/// Normalized barycentric weights c with f(z,p) = sum_ij c_ij D_ij. At a node
/// coordinate (within 1e-14) the sums are restricted to that node's row or
/// column. Throws EvaluationError if the denominator underflows.
CMatrix barycentric_weights(const std::vector<Complex>& z_nodes,
                            const std::vector<Complex>& p_nodes, const CMatrix& alpha, Complex z,
                            Complex p);

Complex eval_model(const BarycentricModel2D& model, Complex z, Complex p);
CVector eval_model(const VectorBarycentricModel& model, Complex z, Complex p);

/// Greedy bivariate AAA fit of grid data D(s_i, p_j) (rows: s, columns: p).
BarycentricModel2D paaa_fit(const CMatrix& data, const std::vector<Complex>& s_points,
                            const std::vector<Complex>& p_points, const PaaaOptions& options = {});

/// Replaces the scalar node values with vectors; coefficients are unchanged.
VectorBarycentricModel lift_vector(const BarycentricModel2D& model, const CMatrix& node_vectors);

/// Poles in z of the model frozen at p_hat: finite eigenvalues of the
/// (#xi + 1) x (#xi + 1) arrowhead pencil built from the effective weights
/// beta_i = sum_j alpha_ij / (p_hat - pi_j).
std::vector<Complex> poles_at(const BarycentricModel2D& model, Complex p_hat);

/// Tangential data at parameter index j: b_i = l_i^T H(theta_i, p_j),
/// c_i = H(sigma_i, p_j) r_i.
TangentialData tangential_data_at(const ProbedSampleSet& samples, const SamplingConfig& config,
                                  int j);

/// Common numerical rank of the Loewner matrices L(p_j) over all sampled
/// parameters. Throws AssumptionViolation with the per-parameter ranks if they
/// disagree.
int consistency_rank_check(const ProbedSampleSet& samples, const SamplingConfig& config,
                           Real rank_tol = 1e-10);

/// Per-parameter ranks (no consistency check).
std::vector<int> loewner_ranks(const ProbedSampleSet& samples, const SamplingConfig& config,
                               Real rank_tol = 1e-10);

}  // namespace pnlevp
