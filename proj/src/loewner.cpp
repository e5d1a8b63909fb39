#include "pnlevp/loewner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "pnlevp/linalg.hpp"

namespace pnlevp {

void TangentialData::validate() const {
  const auto r = static_cast<Eigen::Index>(theta.size());
  if (static_cast<Eigen::Index>(sigma.size()) != r)
    throw ArgumentError("tangential data: theta and sigma differ in length");
  const Eigen::Index n = left_dirs.rows();
  for (const CMatrix* m : {&left_dirs, &right_dirs, &left_vals, &right_vals})
    if (m->rows() != n || m->cols() != r)
      throw ArgumentError("tangential data: direction/value blocks must be n x r");
  for (const Complex t : theta)
    for (const Complex s : sigma)
      if (t == s)
        throw ArgumentError("tangential data: a left point coincides with a right point");
}

LoewnerPair build_loewner(const TangentialData& data) {
  data.validate();
  const Eigen::Index r = data.r();
  // P_ij = b_i^T r_j, Q_ij = l_i^T c_j
  const CMatrix p = data.left_vals.transpose() * data.right_dirs;
  const CMatrix q = data.left_dirs.transpose() * data.right_vals;
  LoewnerPair out{CMatrix(r, r), CMatrix(r, r)};
  for (Eigen::Index j = 0; j < r; ++j) {
    const Complex s = data.sigma[static_cast<std::size_t>(j)];
    for (Eigen::Index i = 0; i < r; ++i) {
      const Complex t = data.theta[static_cast<std::size_t>(i)];
      const Complex denom = t - s;
      out.loewner(i, j) = (p(i, j) - q(i, j)) / denom;
      out.shifted(i, j) = (t * p(i, j) - s * q(i, j)) / denom;
    }
  }
  return out;
}

int numerical_rank(const CMatrix& m, Real rank_tol) {
  if (m.size() == 0) return 0;
  const RVector sv = singular_values(m);
  if (!(sv(0) > 0.0)) return 0;
  return static_cast<int>((sv.array() > rank_tol * sv(0)).count());
}

std::vector<std::size_t> eigen_order(const std::vector<Complex>& eigenvalues) {
  std::vector<std::size_t> idx(eigenvalues.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  auto key = [&](std::size_t k) {
    const Complex z = eigenvalues[k];
    return std::pair{std::round(z.real() * 1e9), z.imag()};
  };
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
  return idx;
}

namespace {

int count_above(const RVector& sv, Real tol) {
  if (sv.size() == 0 || !(sv(0) > 0.0)) return 0;
  return static_cast<int>((sv.array() > tol * sv(0)).count());
}

}  // namespace

EigenRealization realize(const TangentialData& data, Real rank_tol, std::optional<int> max_rank) {
  const LoewnerPair lp = build_loewner(data);
  const Eigen::Index r = data.r();
  const Eigen::Index n = data.dim();

  CMatrix row_stack(r, 2 * r);
  row_stack << lp.loewner, lp.shifted;
  CMatrix col_stack(2 * r, r);
  col_stack << lp.loewner, lp.shifted;

  Eigen::BDCSVD<CMatrix> row_svd(row_stack, Eigen::ComputeThinU);
  Eigen::BDCSVD<CMatrix> col_svd(col_stack, Eigen::ComputeThinV);

  EigenRealization out;
  out.row_singular_values = row_svd.singularValues();
  out.column_singular_values = col_svd.singularValues();
  const int m_row = count_above(out.row_singular_values, rank_tol);
  const int m_col = count_above(out.column_singular_values, rank_tol);
  out.rank = std::max(m_row, m_col);
  out.rank_mismatch = std::abs(m_row - m_col);
  if (out.rank_mismatch > 0)
    out.diagnostics.push_back("rank of [L Ls] (" + std::to_string(m_row) +
                              ") differs from rank of [L; Ls] (" + std::to_string(m_col) +
                              "); using " + std::to_string(out.rank));
  if (max_rank && out.rank > *max_rank) {
    out.diagnostics.push_back("numerical rank " + std::to_string(out.rank) + " truncated to " +
                              std::to_string(*max_rank));
    out.rank = *max_rank;
  }
  const Eigen::Index m = out.rank;
  out.V.resize(n, 0);
  out.W.resize(n, 0);
  if (m == 0) return out;

  const CMatrix x = row_svd.matrixU().leftCols(m);
  const CMatrix ys = col_svd.matrixV().leftCols(m);
  const CMatrix e = x.adjoint() * lp.loewner * ys;
  const CMatrix a = x.adjoint() * lp.shifted * ys;

  const RVector e_sv = singular_values(e);
  if (!(e_sv(m - 1) > 1e-14 * e_sv(0)))
    throw RealizationError(
        "projected Loewner matrix X*LYs is numerically singular; use more or different "
        "sample points");

  const GeneralizedEigen ge = generalized_eigen(a, e);
  const CMatrix& s = ge.vectors;

  // W^* = -S^{-1} (X^* L Ys)^{-1} X^* B, with B = [b_1 ... b_r]^T.
  const CMatrix b = data.left_vals.transpose();
  const CMatrix e_inv_xb = e.partialPivLu().solve(x.adjoint() * b);
  const CMatrix w_star = -s.partialPivLu().solve(e_inv_xb);
  const CMatrix v = data.right_vals * ys * s;

  std::vector<Complex> lambdas;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index k = 0; k < m; ++k) {
    const Complex al = ge.alpha(k);
    const Complex be = ge.beta(k);
    if (std::abs(be) <= std::numeric_limits<Real>::epsilon() * std::abs(al)) {
      ++out.discarded_infinite;
      continue;
    }
    lambdas.push_back(al / be);
    keep.push_back(k);
  }
  if (out.discarded_infinite > 0)
    out.diagnostics.push_back("discarded " + std::to_string(out.discarded_infinite) +
                              " infinite eigenvalue(s)");

  const auto order = eigen_order(lambdas);
  const auto mf = static_cast<Eigen::Index>(order.size());
  out.V.resize(n, mf);
  out.W.resize(n, mf);
  for (Eigen::Index c = 0; c < mf; ++c) {
    const std::size_t o = order[static_cast<std::size_t>(c)];
    out.eigenvalues.push_back(lambdas[o]);
    out.V.col(c) = v.col(keep[o]);
    out.W.col(c) = w_star.row(keep[o]).adjoint();
  }
  return out;
}

FilteredRealization filter_in_domain(EigenRealization realization, const ContourDomain& domain) {
  FilteredRealization out;
  for (const Complex z : realization.eigenvalues) out.inside.push_back(domain.contains(z));
  out.realization = std::move(realization);
  return out;
}

}  // namespace pnlevp
