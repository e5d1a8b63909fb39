#include "pnlevp/linalg.hpp"

#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace pnlevp {

GeneralizedEigen generalized_eigen(const CMatrix& a, const CMatrix& b, bool want_vectors) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
    throw ArgumentError("generalized_eigen: pencil matrices must be square and equal in size");
  const auto n = static_cast<lapack_int>(a.rows());
  GeneralizedEigen out;
  out.alpha.resize(n);
  out.beta.resize(n);
  if (n == 0) return out;
  CMatrix aa = a;
  CMatrix bb = b;
  CMatrix vr(n, want_vectors ? n : 1);
  CMatrix vl(1, 1);
  const lapack_int info = LAPACKE_zggev(LAPACK_COL_MAJOR, 'N', want_vectors ? 'V' : 'N', n,
                                        aa.data(), n, bb.data(), n, out.alpha.data(),
                                        out.beta.data(), vl.data(), 1, vr.data(), n);
  if (info != 0)
    throw NumericalError("generalized_eigen: zggev failed with info=" + std::to_string(info));
  if (want_vectors) out.vectors = std::move(vr);
  return out;
}

RVector singular_values(const CMatrix& m) {
  if (m.size() == 0) return RVector();
  Eigen::BDCSVD<CMatrix> svd(m);
  return svd.singularValues();
}

}  // namespace pnlevp
