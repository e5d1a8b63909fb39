#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pnlevp/domain.hpp"
#include "pnlevp/types.hpp"

namespace pnlevp {

/// Left data b_i = H(theta_i)^T l_i and right data c_j = H(sigma_j) r_j,
/// stored column-wise (n x r each), with their points and directions.
struct TangentialData {
  std::vector<Complex> theta;
  std::vector<Complex> sigma;
  CMatrix left_dirs;   // l_i
  CMatrix right_dirs;  // r_j
  CMatrix left_vals;   // b_i
  CMatrix right_vals;  // c_j

  int r() const { return static_cast<int>(theta.size()); }
  Eigen::Index dim() const { return left_dirs.rows(); }
  void validate() const;
};

struct LoewnerPair {
  CMatrix loewner;
  CMatrix shifted;
};

struct EigenRealization {
  std::vector<Complex> eigenvalues;
  CMatrix V;  // n x m right eigenvectors
  CMatrix W;  // n x m left eigenvectors
  RVector row_singular_values;     // of [L  Ls]
  RVector column_singular_values;  // of [L; Ls]
  int rank = 0;
  int rank_mismatch = 0;       // |rank([L Ls]) - rank([L; Ls])|
  int discarded_infinite = 0;  // infinite pencil eigenvalues dropped
  std::vector<std::string> diagnostics;
};

/// L_ij = (b_i^T r_j - l_i^T c_j) / (theta_i - sigma_j),
/// Ls_ij = (theta_i b_i^T r_j - sigma_j l_i^T c_j) / (theta_i - sigma_j).
LoewnerPair build_loewner(const TangentialData& data);

/// Number of singular values above rank_tol * sigma_max (0 for a zero matrix).
int numerical_rank(const CMatrix& m, Real rank_tol);

/// Eigenvalues and eigenvectors of the rational function behind `data` via the
/// projected Loewner pencil. Eigenvalues are returned in canonical order.
/// `max_rank` caps the truncation rank (reported in diagnostics).
EigenRealization realize(const TangentialData& data, Real rank_tol = 1e-10,
                         std::optional<int> max_rank = std::nullopt);

/// Permutation sorting eigenvalues ascending by real part (quantized to 1e-9),
/// then by imaginary part.
std::vector<std::size_t> eigen_order(const std::vector<Complex>& eigenvalues);

struct FilteredRealization {
  EigenRealization realization;
  std::vector<bool> inside;
};

/// Flags each eigenvalue with domain.contains(); nothing is removed.
FilteredRealization filter_in_domain(EigenRealization realization, const ContourDomain& domain);

}  // namespace pnlevp
