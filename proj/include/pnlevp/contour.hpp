#pragma once

#include <cstdint>
#include <vector>

#include "pnlevp/domain.hpp"
#include "pnlevp/problems.hpp"
#include "pnlevp/types.hpp"

namespace pnlevp {

/// Discretization of the boundary integral so that
/// H(theta) ~= sum_t weights[t] / (theta - nodes[t]) * T(nodes[t])^{-1}.
struct QuadratureRule {
  std::vector<Complex> nodes;
  std::vector<Complex> weights;

  std::size_t size() const { return nodes.size(); }
};

/// Trapezoidal rule in the boundary parameter: z_t = gamma(2 pi t / N),
/// w_t = gamma'(2 pi t / N) / (i N).
QuadratureRule build_trapezoid_rule(const ContourDomain& domain, int n_nodes);

/// Sample points, parameter points and probing directions. Left points are the
/// even-indexed sample points, right points the odd-indexed ones.
struct SamplingConfig {
  std::vector<Complex> sample_points;     // s_1..s_{2r}
  std::vector<Complex> parameter_points;  // p_1..p_q
  CMatrix left_dirs;                      // n x r
  CMatrix right_dirs;                     // n x r
  std::uint64_t seed = 0;

  int r() const { return static_cast<int>(left_dirs.cols()); }
  int q() const { return static_cast<int>(parameter_points.size()); }
  Eigen::Index dim() const { return left_dirs.rows(); }
  Complex theta(int i) const { return sample_points[static_cast<std::size_t>(2 * i)]; }
  Complex sigma(int i) const { return sample_points[static_cast<std::size_t>(2 * i + 1)]; }
  std::vector<Complex> left_points() const;
  std::vector<Complex> right_points() const;

  /// Throws ArgumentError unless shapes agree and every sample point lies
  /// strictly outside the closed domain (margin 1e-10).
  void validate(const ContourDomain& domain) const;
};

/// 2r points uniformly spaced on the boundary of `sample_domain`, q uniformly
/// spaced parameters in [p_min, p_max], Gaussian probing directions.
SamplingConfig sampling_on(const ContourDomain& sample_domain, int r, int q, Real p_min,
                           Real p_max, Eigen::Index dim, std::uint64_t seed);

/// sampling_on applied to the domain inflated by `inflation`.
SamplingConfig default_sampling(const ContourDomain& domain, int r, int q, Real p_min,
                                Real p_max, Eigen::Index dim, std::uint64_t seed,
                                Real inflation = 4.0 / 3.0);

/// Probed samples l_k^T H(s_i,p_j) and H(s_i,p_j) r_k for every (k, i, j).
/// Per parameter j the data are stored as a (2r) x (n r) matrix whose row i,
/// column block k holds the n-vector for (k, i).
class ProbedSampleSet {
 public:
  ProbedSampleSet() = default;
  ProbedSampleSet(int r, int q, Eigen::Index n);

  int r() const { return r_; }
  int q() const { return q_; }
  Eigen::Index dim() const { return n_; }

  CVector left(int k, int i, int j) const;
  CVector right(int k, int i, int j) const;

  CMatrix& left_block(int j) { return left_[static_cast<std::size_t>(j)]; }
  CMatrix& right_block(int j) { return right_[static_cast<std::size_t>(j)]; }
  const CMatrix& left_block(int j) const { return left_[static_cast<std::size_t>(j)]; }
  const CMatrix& right_block(int j) const { return right_[static_cast<std::size_t>(j)]; }

  bool all_finite() const;

  // provenance
  int quadrature_nodes = 0;
  std::uint64_t seed = 0;

 private:
  int r_ = 0;
  int q_ = 0;
  Eigen::Index n_ = 0;
  std::vector<CMatrix> left_;
  std::vector<CMatrix> right_;
};

/// Resolvent quadrature of the probed samples. Each (node, parameter) pair
/// costs one LU factorization used for an r-column left solve and an r-column
/// right solve; sums run in ascending node order, so the result does not
/// depend on `workers`.
ProbedSampleSet probe_samples(const PNlevpProblem& problem, const QuadratureRule& rule,
                              const SamplingConfig& config, unsigned workers = 0);

}  // namespace pnlevp
