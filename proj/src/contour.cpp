#include "pnlevp/contour.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "pnlevp/parallel.hpp"

namespace pnlevp {

QuadratureRule build_trapezoid_rule(const ContourDomain& domain, int n_nodes) {
  if (n_nodes < 2) throw ArgumentError("quadrature needs at least 2 nodes");
  QuadratureRule rule;
  rule.nodes.reserve(static_cast<std::size_t>(n_nodes));
  rule.weights.reserve(static_cast<std::size_t>(n_nodes));
  const Real h = 2.0 * std::numbers::pi / n_nodes;
  for (int t = 0; t < n_nodes; ++t) {
    const Real tt = h * t;
    rule.nodes.push_back(domain.boundary(tt));
    // gamma'(t) dt / (2 pi i) with dt = 2 pi / N
    rule.weights.push_back(domain.boundary_derivative(tt) / (1i * static_cast<Real>(n_nodes)));
  }
  return rule;
}

// ---------------------------------------------------------------------------

std::vector<Complex> SamplingConfig::left_points() const {
  std::vector<Complex> out;
  for (int i = 0; i < r(); ++i) out.push_back(theta(i));
  return out;
}

std::vector<Complex> SamplingConfig::right_points() const {
  std::vector<Complex> out;
  for (int i = 0; i < r(); ++i) out.push_back(sigma(i));
  return out;
}

void SamplingConfig::validate(const ContourDomain& domain) const {
  if (r() < 1) throw ArgumentError("sampling: need at least one probing direction");
  if (right_dirs.cols() != left_dirs.cols() || right_dirs.rows() != left_dirs.rows())
    throw ArgumentError("sampling: left and right direction blocks differ in shape");
  if (sample_points.size() != static_cast<std::size_t>(2 * r()))
    throw ArgumentError("sampling: expected 2r sample points");
  if (parameter_points.empty()) throw ArgumentError("sampling: no parameter points");
  for (const Complex s : sample_points) {
    if (domain.contains(s) || !(domain.exterior_distance(s) > 1e-10)) {
      std::ostringstream os;
      os << "sampling: sample point " << s << " is not strictly outside " << domain.describe();
      throw ArgumentError(os.str());
    }
  }
  for (int i = 0; i < r(); ++i)
    for (int j = 0; j < r(); ++j)
      if (theta(i) == sigma(j)) throw ArgumentError("sampling: left and right points coincide");
}

SamplingConfig sampling_on(const ContourDomain& sample_domain, int r, int q, Real p_min,
                           Real p_max, Eigen::Index dim, std::uint64_t seed) {
  if (r < 1) throw ArgumentError("sampling: r must be >= 1");
  if (q < 1) throw ArgumentError("sampling: q must be >= 1");
  if (dim < 1) throw ArgumentError("sampling: dimension must be >= 1");
  if (p_max < p_min) throw ArgumentError("sampling: parameter range is reversed");

  SamplingConfig cfg;
  cfg.seed = seed;
  const int d = 2 * r;
  for (int i = 0; i < d; ++i)
    cfg.sample_points.push_back(sample_domain.boundary(2.0 * std::numbers::pi * i / d));
  if (q == 1) {
    cfg.parameter_points.push_back(0.5 * (p_min + p_max));
  } else {
    for (int j = 0; j < q; ++j)
      cfg.parameter_points.push_back(p_min + (p_max - p_min) * j / (q - 1.0));
  }
  std::mt19937_64 gen(seed);
  std::normal_distribution<Real> normal(0.0, 1.0);
  auto gaussian = [&](CMatrix& m) {
    m.resize(dim, r);
    for (int k = 0; k < r; ++k)
      for (Eigen::Index a = 0; a < dim; ++a) {
        const Real re = normal(gen);
        const Real im = normal(gen);
        m(a, k) = Complex(re, im);
      }
  };
  gaussian(cfg.left_dirs);
  gaussian(cfg.right_dirs);
  return cfg;
}

SamplingConfig default_sampling(const ContourDomain& domain, int r, int q, Real p_min,
                                Real p_max, Eigen::Index dim, std::uint64_t seed,
                                Real inflation) {
  if (!(inflation > 1.0)) throw ArgumentError("sampling: inflation must exceed 1");
  return sampling_on(domain.inflated(inflation), r, q, p_min, p_max, dim, seed);
}

// ---------------------------------------------------------------------------

ProbedSampleSet::ProbedSampleSet(int r, int q, Eigen::Index n) : r_(r), q_(q), n_(n) {
  left_.assign(static_cast<std::size_t>(q), CMatrix::Zero(2 * r, n * r));
  right_.assign(static_cast<std::size_t>(q), CMatrix::Zero(2 * r, n * r));
}

CVector ProbedSampleSet::left(int k, int i, int j) const {
  return left_block(j).row(i).segment(k * n_, n_).transpose();
}

CVector ProbedSampleSet::right(int k, int i, int j) const {
  return right_block(j).row(i).segment(k * n_, n_).transpose();
}

bool ProbedSampleSet::all_finite() const {
  for (int j = 0; j < q_; ++j)
    if (!left_block(j).allFinite() || !right_block(j).allFinite()) return false;
  return true;
}

ProbedSampleSet probe_samples(const PNlevpProblem& problem, const QuadratureRule& rule,
                              const SamplingConfig& config, unsigned workers) {
  const Eigen::Index n = problem.dim();
  const int r = config.r();
  const int q = config.q();
  if (config.dim() != n) throw ArgumentError("probe_samples: direction length differs from dim");
  if (rule.nodes.size() != rule.weights.size() || rule.size() < 2)
    throw ArgumentError("probe_samples: malformed quadrature rule");

  ProbedSampleSet out(r, q, n);
  out.quadrature_nodes = static_cast<int>(rule.size());
  out.seed = config.seed;

  const Eigen::Index d = 2 * r;
  parallel_for(
      static_cast<std::size_t>(q),
      [&](std::size_t jj) {
        const int j = static_cast<int>(jj);
        const Complex p = config.parameter_points[jj];
        CMatrix& left = out.left_block(j);
        CMatrix& right = out.right_block(j);
        // Nodes are processed in fixed blocks of ascending t; each block is
        // one matrix product, so the summation order never depends on workers.
        constexpr std::size_t kBlock = 64;
        CMatrix kernel(d, static_cast<Eigen::Index>(kBlock));
        CMatrix lsol(static_cast<Eigen::Index>(kBlock), n * r);
        CMatrix rsol(static_cast<Eigen::Index>(kBlock), n * r);
        for (std::size_t t0 = 0; t0 < rule.size(); t0 += kBlock) {
          const std::size_t len = std::min(kBlock, rule.size() - t0);
          for (std::size_t u = 0; u < len; ++u) {
            const std::size_t t = t0 + u;
            const Complex z = rule.nodes[t];
            std::optional<Factorization> fac;
            try {
              fac.emplace(problem.factorize(z, p));
            } catch (const RankError& e) {
              std::ostringstream os;
              os.precision(17);
              os << "probe_samples: T is singular at quadrature node z=" << z << ", p=" << p
                 << "; change the number of quadrature nodes or the contour";
              throw RankError(os.str(), z, p);
            }
            const CMatrix b = fac->solve_transpose(config.left_dirs);  // n x r
            const CMatrix c = fac->solve(config.right_dirs);           // n x r
            const auto row = static_cast<Eigen::Index>(u);
            lsol.row(row) = Eigen::Map<const Eigen::RowVectorXcd>(b.data(), n * r);
            rsol.row(row) = Eigen::Map<const Eigen::RowVectorXcd>(c.data(), n * r);
            for (Eigen::Index i = 0; i < d; ++i)
              kernel(i, row) =
                  rule.weights[t] / (config.sample_points[static_cast<std::size_t>(i)] - z);
          }
          const auto l = static_cast<Eigen::Index>(len);
          left.noalias() += kernel.leftCols(l) * lsol.topRows(l);
          right.noalias() += kernel.leftCols(l) * rsol.topRows(l);
        }
      },
      resolve_workers(workers));
  return out;
}

}  // namespace pnlevp
