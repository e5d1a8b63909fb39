#pragma once

#include "pnlevp/types.hpp"

namespace pnlevp {

/// Generalized eigenvalues alpha/beta and right eigenvectors of the pencil
/// (A, B), A x = lambda B x. Backed by LAPACK zggev.
struct GeneralizedEigen {
  CVector alpha;
  CVector beta;
  CMatrix vectors;
};

GeneralizedEigen generalized_eigen(const CMatrix& a, const CMatrix& b, bool want_vectors = true);

/// Singular values in descending order.
RVector singular_values(const CMatrix& m);

}  // namespace pnlevp
