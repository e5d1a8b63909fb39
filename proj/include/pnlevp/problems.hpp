#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pnlevp/domain.hpp"
#include "pnlevp/types.hpp"

namespace pnlevp {

/// LU factorization of T(z,p) reused for right (T X = B) and left (T^T X = L)
/// solves. Construction fails with RankError when a pivot is negligible
/// relative to its column.
class Factorization {
 public:
  Factorization(const CMatrix& t, Complex z, Complex p);

  CMatrix solve(const CMatrix& b) const;
  CMatrix solve_transpose(const CMatrix& l) const;

 private:
  Eigen::PartialPivLU<CMatrix> lu_;
};

/// Matrix-valued function T(z,p) of a parametric nonlinear eigenvalue problem.
/// Implementations must be immutable after construction; all members are safe
/// to call concurrently.
class PNlevpProblem {
 public:
  virtual ~PNlevpProblem() = default;

  virtual std::string name() const = 0;
  virtual Eigen::Index dim() const = 0;
  virtual std::optional<std::string> analytic_note() const { return std::nullopt; }

  /// T(z,p); throws DomainError on a branch cut.
  CMatrix eval(Complex z, Complex p) const;

  /// dT/dz. The default is a central difference.
  virtual CMatrix eval_dz(Complex z, Complex p) const;

  virtual bool on_branch_cut(Complex /*z*/, Complex /*p*/) const { return false; }

  Factorization factorize(Complex z, Complex p) const { return {eval(z, p), z, p}; }
  CMatrix solve_right(Complex z, Complex p, const CMatrix& b) const;
  CMatrix solve_left(Complex z, Complex p, const CMatrix& l) const;

 protected:
  virtual CMatrix evaluate(Complex z, Complex p) const = 0;
};

using ProblemPtr = std::shared_ptr<const PNlevpProblem>;

/// User-supplied T(z,p).
class FunctionProblem final : public PNlevpProblem {
 public:
  using Function = std::function<CMatrix(Complex, Complex)>;
  FunctionProblem(std::string name, Eigen::Index dim, Function f);

  std::string name() const override { return name_; }
  Eigen::Index dim() const override { return dim_; }

 protected:
  CMatrix evaluate(Complex z, Complex p) const override;

 private:
  std::string name_;
  Eigen::Index dim_;
  Function f_;
};

/// T(z,p) = zI - A(p) with A(p) = [[0,1,0],[1-p,0,0],[0,1,p]];
/// det T = (p - z)(1 - p - z^2).
class LinearDemoProblem final : public PNlevpProblem {
 public:
  std::string name() const override { return "linear-demo"; }
  Eigen::Index dim() const override { return 3; }
  CMatrix eval_dz(Complex z, Complex p) const override;

  static Complex lambda1(Complex p) { return p; }
  // +0.0 turns a signed zero imaginary part positive, so real p > 1 gives
  // lambda2 = +i sqrt(p - 1).
  static Complex lambda2(Complex p) { return std::sqrt(Complex(1.0 - p.real(), -p.imag() + 0.0)); }
  static Complex lambda3(Complex p) { return -lambda2(p); }

  /// Closed-form pole part H(z,p) for the domain holding lambda2 and lambda3.
  static CMatrix keldysh_h(Complex z, Complex p);

 protected:
  CMatrix evaluate(Complex z, Complex p) const override;
};

/// Characteristic matrix (z + 0.01 exp(-p z)) I + E of a diagonal delay
/// system, E_ii log-spaced in [1e-4, 1e10].
class DelayProblem final : public PNlevpProblem {
 public:
  static constexpr Eigen::Index kDim = 10;
  static constexpr Real kDamping = 0.01;

  DelayProblem();

  std::string name() const override { return "delay"; }
  Eigen::Index dim() const override { return kDim; }
  CMatrix eval_dz(Complex z, Complex p) const override;

  const RVector& stiffness() const { return e_; }

 protected:
  CMatrix evaluate(Complex z, Complex p) const override;

 private:
  RVector e_;
};

/// Damped string on [0,1] with damping p on [1/4,3/4]. Uses the branch
/// zhat = sign * i sqrt(-z) sqrt(z + 2p), with cut (-inf,-2p] U [0,inf).
class DampedStringProblem final : public PNlevpProblem {
 public:
  explicit DampedStringProblem(int branch_sign = +1);

  std::string name() const override { return "damped-string"; }
  Eigen::Index dim() const override { return 4; }
  std::optional<std::string> analytic_note() const override;
  bool on_branch_cut(Complex z, Complex p) const override;

  Complex zhat(Complex z, Complex p) const;
  int branch_sign() const { return sign_; }

 protected:
  CMatrix evaluate(Complex z, Complex p) const override;

 private:
  int sign_;
};

/// lambda(p) = offset + slope * p.
struct AffineEigenvalue {
  Complex offset;
  Complex slope;
  Complex operator()(Complex p) const { return offset + slope * p; }
};

/// T(z,p) = X diag(z - lambda_1(p), ..., z - lambda_k(p), 1, ..., 1) Y with
/// random constant frames X, Y. Its resolvent has exactly the prescribed
/// simple poles, so the pole part is rational in both z and p.
class SyntheticRationalProblem final : public PNlevpProblem {
 public:
  SyntheticRationalProblem(std::uint64_t seed, Eigen::Index dim,
                           std::vector<AffineEigenvalue> eigenvalues);

  /// `m_inside` eigenvalue paths inside `domain` for every p in [p_min, p_max],
  /// plus one path well outside it.
  static SyntheticRationalProblem with_inside(std::uint64_t seed, Eigen::Index dim, int m_inside,
                                              const ContourDomain& domain, Real p_min,
                                              Real p_max);

  std::string name() const override { return "synthetic"; }
  Eigen::Index dim() const override { return x_.rows(); }
  CMatrix eval_dz(Complex z, Complex p) const override;

  std::uint64_t seed() const { return seed_; }
  const std::vector<AffineEigenvalue>& eigenvalue_paths() const { return lambdas_; }
  std::vector<Complex> eigenvalues(Complex p) const;

  /// Pole part of T^{-1} restricted to eigenvalues inside `domain` at p.
  CMatrix pole_part(Complex z, Complex p, const ContourDomain& domain) const;

 protected:
  CMatrix evaluate(Complex z, Complex p) const override;

 private:
  std::uint64_t seed_;
  std::vector<AffineEigenvalue> lambdas_;
  CMatrix x_, y_, x_inv_, y_inv_;
};

/// Benchmark lookup: "linear-demo", "delay", "damped-string", "synthetic".
ProblemPtr make_problem(const std::string& name);
std::vector<std::string> problem_names();

/// Zeros of det T(., p) found by Newton iteration seeded from a 60x60 grid over
/// the bounding box of `domain`, keeping the ones inside it.
std::vector<Complex> newton_eigenvalues(const PNlevpProblem& problem, Complex p,
                                        const ContourDomain& domain);

/// Reference eigenvalues of a benchmark problem at p (restricted to `domain`
/// when given). LinearDemo and Synthetic use closed forms.
std::vector<Complex> true_eigenvalues(const PNlevpProblem& problem, Complex p,
                                      const std::optional<ContourDomain>& domain = std::nullopt);

}  // namespace pnlevp
