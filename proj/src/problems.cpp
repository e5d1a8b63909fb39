#include "pnlevp/problems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace pnlevp {

namespace {

constexpr Real kEps = std::numeric_limits<Real>::epsilon();

std::string point_string(Complex z, Complex p) {
  std::ostringstream os;
  os.precision(17);
  os << "z=" << z << ", p=" << p;
  return os.str();
}

CMatrix gaussian_matrix(std::mt19937_64& gen, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<Real> normal(0.0, 1.0);
  CMatrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) {
      const Real re = normal(gen);
      const Real im = normal(gen);
      m(i, j) = Complex(re, im);
    }
  return m;
}

}  // namespace

// ---------------------------------------------------------------------------
// Factorization

Factorization::Factorization(const CMatrix& t, Complex z, Complex p) {
  if (!t.allFinite()) throw RankError("T(z,p) is not finite at " + point_string(z, p), z, p);
  lu_.compute(t);
  const CMatrix& u = lu_.matrixLU();
  const Real tol = 8.0 * static_cast<Real>(t.rows()) * kEps;
  for (Eigen::Index k = 0; k < t.cols(); ++k) {
    const Real scale = t.col(k).cwiseAbs().maxCoeff();
    if (!(std::abs(u(k, k)) > tol * scale))
      throw RankError("T(z,p) is singular to working precision at " + point_string(z, p), z, p);
  }
}

CMatrix Factorization::solve(const CMatrix& b) const { return lu_.solve(b); }

CMatrix Factorization::solve_transpose(const CMatrix& l) const {
  return lu_.transpose().solve(l);
}

// ---------------------------------------------------------------------------
// PNlevpProblem

CMatrix PNlevpProblem::eval(Complex z, Complex p) const {
  if (on_branch_cut(z, p))
    throw DomainError(name() + ": point lies on a branch cut (" + point_string(z, p) + ")");
  return evaluate(z, p);
}

CMatrix PNlevpProblem::eval_dz(Complex z, Complex p) const {
  const Real h = 1e-6 * std::max(1.0, std::abs(z));
  return (eval(z + h, p) - eval(z - h, p)) / (2.0 * h);
}

CMatrix PNlevpProblem::solve_right(Complex z, Complex p, const CMatrix& b) const {
  if (b.rows() != dim()) throw ArgumentError("solve_right: right-hand side has wrong row count");
  return factorize(z, p).solve(b);
}

CMatrix PNlevpProblem::solve_left(Complex z, Complex p, const CMatrix& l) const {
  if (l.rows() != dim()) throw ArgumentError("solve_left: right-hand side has wrong row count");
  return factorize(z, p).solve_transpose(l);
}

// ---------------------------------------------------------------------------
// FunctionProblem

FunctionProblem::FunctionProblem(std::string name, Eigen::Index dim, Function f)
    : name_(std::move(name)), dim_(dim), f_(std::move(f)) {
  if (dim_ < 1) throw ArgumentError("problem dimension must be positive");
  if (!f_) throw ArgumentError("problem function is empty");
}

CMatrix FunctionProblem::evaluate(Complex z, Complex p) const {
  CMatrix t = f_(z, p);
  if (t.rows() != dim_ || t.cols() != dim_)
    throw ArgumentError(name_ + ": eval returned a matrix of the wrong size");
  return t;
}

// ---------------------------------------------------------------------------
// LinearDemoProblem

CMatrix LinearDemoProblem::evaluate(Complex z, Complex p) const {
  CMatrix a = CMatrix::Zero(3, 3);
  a(0, 1) = 1.0;
  a(1, 0) = 1.0 - p;
  a(2, 1) = 1.0;
  a(2, 2) = p;
  return z * CMatrix::Identity(3, 3) - a;
}

CMatrix LinearDemoProblem::eval_dz(Complex, Complex) const { return CMatrix::Identity(3, 3); }

CMatrix LinearDemoProblem::keldysh_h(Complex z, Complex p) {
  const Complex u = z * z + p - 1.0;
  const Complex g = p * p + p - 1.0;
  CMatrix h = CMatrix::Zero(3, 3);
  h(0, 0) = z;
  h(0, 1) = 1.0;
  h(1, 0) = 1.0 - p;
  h(1, 1) = z;
  h(2, 0) = (p + z) * (p - 1.0) / g;
  h(2, 1) = (-p * z + p - 1.0) / g;
  return h / u;
}

// ---------------------------------------------------------------------------
// DelayProblem

DelayProblem::DelayProblem() : e_(kDim) {
  for (Eigen::Index i = 0; i < kDim; ++i)
    e_(i) = std::pow(10.0, -4.0 + 14.0 * static_cast<Real>(i) / static_cast<Real>(kDim - 1));
}

CMatrix DelayProblem::evaluate(Complex z, Complex p) const {
  const Complex s = z + kDamping * std::exp(-p * z);
  CMatrix t = CMatrix::Zero(kDim, kDim);
  for (Eigen::Index i = 0; i < kDim; ++i) t(i, i) = s + e_(i);
  return t;
}

CMatrix DelayProblem::eval_dz(Complex z, Complex p) const {
  const Complex d = 1.0 - kDamping * p * std::exp(-p * z);
  return d * CMatrix::Identity(kDim, kDim);
}

// ---------------------------------------------------------------------------
// DampedStringProblem

DampedStringProblem::DampedStringProblem(int branch_sign) : sign_(branch_sign >= 0 ? 1 : -1) {}

std::optional<std::string> DampedStringProblem::analytic_note() const {
  return "zhat = i*sqrt(-z)*sqrt(z+2p) (principal roots); cut (-inf,-2p] U [0,inf)";
}

bool DampedStringProblem::on_branch_cut(Complex z, Complex p) const {
  constexpr Real tol = 1e-14;
  const Complex a = -z;
  const Complex b = z + 2.0 * p;
  return (std::abs(a.imag()) <= tol && a.real() <= tol) ||
         (std::abs(b.imag()) <= tol && b.real() <= tol);
}

Complex DampedStringProblem::zhat(Complex z, Complex p) const {
  return static_cast<Real>(sign_) * 1i * std::sqrt(-z) * std::sqrt(z + 2.0 * p);
}

CMatrix DampedStringProblem::evaluate(Complex z, Complex p) const {
  const Complex w = zhat(z, p);
  const Complex sz = std::sinh(z / 4.0), cz = std::cosh(z / 4.0);
  const Complex sw = std::sinh(w / 4.0), cw = std::cosh(w / 4.0);
  const Complex s3 = std::sinh(3.0 * w / 4.0), c3 = std::cosh(3.0 * w / 4.0);
  CMatrix t(4, 4);
  t << -sz, sw, cw, 0.0,
       -z * cz, w * cw, w * sw, 0.0,
       0.0, -s3, -c3, sz,
       0.0, -w * c3, -w * s3, -z * cz;
  return t;
}

// ---------------------------------------------------------------------------
// SyntheticRationalProblem

SyntheticRationalProblem::SyntheticRationalProblem(std::uint64_t seed, Eigen::Index dim,
                                                   std::vector<AffineEigenvalue> eigenvalues)
    : seed_(seed), lambdas_(std::move(eigenvalues)) {
  if (dim < 1) throw ArgumentError("synthetic problem: dimension must be positive");
  if (static_cast<Eigen::Index>(lambdas_.size()) > dim)
    throw ArgumentError("synthetic problem: more eigenvalue paths than the dimension");
  std::mt19937_64 gen(seed);
  x_ = gaussian_matrix(gen, dim, dim);
  y_ = gaussian_matrix(gen, dim, dim);
  x_inv_ = x_.inverse();
  y_inv_ = y_.inverse();
}

SyntheticRationalProblem SyntheticRationalProblem::with_inside(std::uint64_t seed,
                                                               Eigen::Index dim, int m_inside,
                                                               const ContourDomain& domain,
                                                               Real p_min, Real p_max) {
  if (m_inside < 0 || m_inside + 1 > dim)
    throw ArgumentError("synthetic problem: need m_inside + 1 <= dim");
  if (!(p_max > p_min)) throw ArgumentError("synthetic problem: need p_min < p_max");
  // Path endpoints are drawn inside the domain shrunk to 60%, which keeps the
  // affine path inside it for the whole interval.
  std::mt19937_64 gen(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<Real> unit(-1.0, 1.0);
  const ContourDomain inner = domain.inflated(0.6);
  const auto [lo, hi] = inner.bounding_box();
  auto draw_inside = [&] {
    for (;;) {
      const Complex z(lo.real() + 0.5 * (unit(gen) + 1.0) * (hi.real() - lo.real()),
                      lo.imag() + 0.5 * (unit(gen) + 1.0) * (hi.imag() - lo.imag()));
      if (inner.contains(z)) return z;
    }
  };
  std::vector<AffineEigenvalue> paths;
  for (int k = 0; k < m_inside; ++k) {
    const Complex a = draw_inside();
    const Complex b = draw_inside();
    const Complex slope = (b - a) / (p_max - p_min);
    paths.push_back({a - slope * p_min, slope});
  }
  const auto [blo, bhi] = domain.bounding_box();
  const Real extent = std::abs(bhi - blo);
  paths.push_back({domain.center() + 2.0 * extent, Complex(0.0)});
  return SyntheticRationalProblem(seed, dim, std::move(paths));
}

CMatrix SyntheticRationalProblem::evaluate(Complex z, Complex p) const {
  CVector d = CVector::Ones(x_.rows());
  for (std::size_t k = 0; k < lambdas_.size(); ++k)
    d(static_cast<Eigen::Index>(k)) = z - lambdas_[k](p);
  return x_ * d.asDiagonal() * y_;
}

CMatrix SyntheticRationalProblem::eval_dz(Complex, Complex) const {
  CVector d = CVector::Zero(x_.rows());
  for (std::size_t k = 0; k < lambdas_.size(); ++k) d(static_cast<Eigen::Index>(k)) = 1.0;
  return x_ * d.asDiagonal() * y_;
}

std::vector<Complex> SyntheticRationalProblem::eigenvalues(Complex p) const {
  std::vector<Complex> out;
  for (const auto& l : lambdas_) out.push_back(l(p));
  return out;
}

CMatrix SyntheticRationalProblem::pole_part(Complex z, Complex p,
                                            const ContourDomain& domain) const {
  CMatrix h = CMatrix::Zero(x_.rows(), x_.rows());
  for (std::size_t k = 0; k < lambdas_.size(); ++k) {
    const Complex lam = lambdas_[k](p);
    if (!domain.contains(lam)) continue;
    const auto kk = static_cast<Eigen::Index>(k);
    h += y_inv_.col(kk) * x_inv_.row(kk) / (z - lam);
  }
  return h;
}

// ---------------------------------------------------------------------------
// Registry and reference eigenvalues

std::vector<std::string> problem_names() {
  return {"linear-demo", "delay", "damped-string", "synthetic"};
}

ProblemPtr make_problem(const std::string& name) {
  if (name == "linear-demo") return std::make_shared<LinearDemoProblem>();
  if (name == "delay") return std::make_shared<DelayProblem>();
  if (name == "damped-string") return std::make_shared<DampedStringProblem>();
  if (name == "synthetic")
    return std::make_shared<SyntheticRationalProblem>(SyntheticRationalProblem::with_inside(
        1, 6, 3, ContourDomain::disk(0.0, 1.0), 0.0, 1.0));
  throw ArgumentError("unknown problem '" + name + "'");
}

std::vector<Complex> newton_eigenvalues(const PNlevpProblem& problem, Complex p,
                                        const ContourDomain& domain) {
  constexpr int kGrid = 60;
  constexpr int kMaxSteps = 50;
  constexpr Real kStepTol = 1e-13;
  constexpr Real kMergeTol = 1e-9;

  const auto [lo, hi] = domain.bounding_box();
  std::vector<Complex> roots;
  for (int a = 0; a < kGrid; ++a) {
    for (int b = 0; b < kGrid; ++b) {
      Complex z(lo.real() + (hi.real() - lo.real()) * a / (kGrid - 1.0),
                lo.imag() + (hi.imag() - lo.imag()) * b / (kGrid - 1.0));
      bool converged = false;
      try {
        for (int it = 0; it < kMaxSteps; ++it) {
          // d/dz log det T = tr(T^{-1} T').
          const CMatrix t = problem.eval(z, p);
          Eigen::PartialPivLU<CMatrix> lu(t);
          const Complex trace = lu.solve(problem.eval_dz(z, p)).trace();
          if (!std::isfinite(trace.real()) || !std::isfinite(trace.imag()) ||
              trace == Complex(0.0)) {
            converged = std::abs(lu.determinant()) == 0.0;
            break;
          }
          const Complex step = 1.0 / trace;
          z -= step;
          if (std::abs(step) <= kStepTol * std::max(1.0, std::abs(z))) {
            converged = true;
            break;
          }
        }
      } catch (const DomainError&) {
        converged = false;
      }
      if (!converged || !std::isfinite(z.real()) || !std::isfinite(z.imag())) continue;
      if (!domain.contains(z)) continue;
      const bool duplicate = std::any_of(roots.begin(), roots.end(),
                                         [&](Complex r) { return std::abs(r - z) < kMergeTol; });
      if (!duplicate) roots.push_back(z);
    }
  }
  return roots;
}

std::vector<Complex> true_eigenvalues(const PNlevpProblem& problem, Complex p,
                                      const std::optional<ContourDomain>& domain) {
  auto filtered = [&](std::vector<Complex> all) {
    if (!domain) return all;
    std::vector<Complex> out;
    std::copy_if(all.begin(), all.end(), std::back_inserter(out),
                 [&](Complex z) { return domain->contains(z); });
    return out;
  };
  if (dynamic_cast<const LinearDemoProblem*>(&problem)) {
    return filtered({LinearDemoProblem::lambda1(p), LinearDemoProblem::lambda2(p),
                     LinearDemoProblem::lambda3(p)});
  }
  if (const auto* syn = dynamic_cast<const SyntheticRationalProblem*>(&problem))
    return filtered(syn->eigenvalues(p));
  if (dynamic_cast<const DelayProblem*>(&problem) ||
      dynamic_cast<const DampedStringProblem*>(&problem)) {
    if (!domain) throw ArgumentError(problem.name() + ": reference eigenvalues need a domain");
    return newton_eigenvalues(problem, p, *domain);
  }
  throw UnsupportedError("no reference eigenvalues for problem '" + problem.name() + "'");
}

}  // namespace pnlevp
