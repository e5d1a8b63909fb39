#include <doctest.h>

#include <numbers>
#include <random>

#include "oracles.hpp"
#include "pnlevp/barycentric.hpp"
#include "pnlevp/contour.hpp"
#include "pnlevp/problems.hpp"

using namespace pnlevp;

namespace {

std::vector<Complex> line(Real a, Real b, int n) {
  std::vector<Complex> out;
  for (int k = 0; k < n; ++k) out.push_back(a + (b - a) * k / (n - 1.0));
  return out;
}

std::vector<Complex> circle(Complex c, Real rho, int n, Real phase = 0.0) {
  std::vector<Complex> out;
  for (int k = 0; k < n; ++k)
    out.push_back(c + std::polar(rho, phase + 2.0 * std::numbers::pi * k / n));
  return out;
}

template <class F>
CMatrix grid(F f, const std::vector<Complex>& s, const std::vector<Complex>& p) {
  CMatrix d(static_cast<Eigen::Index>(s.size()), static_cast<Eigen::Index>(p.size()));
  for (std::size_t j = 0; j < p.size(); ++j)
    for (std::size_t i = 0; i < s.size(); ++i)
      d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = f(s[i], p[j]);
  return d;
}

Complex inv_diff(Complex s, Complex p) { return 1.0 / (s - p); }

}  // namespace

TEST_CASE("p-AAA recovers 1/(s-p) with two nodes per axis") {
  const auto s = line(2.0, 3.0, 10);
  const auto p = line(0.0, 1.0, 10);
  const auto model = paaa_fit(grid(inv_diff, s, p), s, p);
  CHECK(model.converged);
  CHECK(model.z_nodes.size() == 2);
  CHECK(model.p_nodes.size() == 2);
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<Real> us(2.0, 3.0), up(0.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    const Complex z = us(gen), q = up(gen);
    CHECK(std::abs(eval_model(model, z, q) - inv_diff(z, q)) <= 1e-12 * std::abs(inv_diff(z, q)));
  }
  CHECK(std::abs(eval_model(model, 5.0, 2.0) - 1.0 / 3.0) < 1e-13);
}

TEST_CASE("constant data need one node per axis") {
  const auto s = line(1.0, 2.0, 6);
  const auto p = line(0.0, 1.0, 5);
  const Complex c(2.0, -1.0);
  const auto model = paaa_fit(CMatrix::Constant(6, 5, c), s, p);
  CHECK(model.converged);
  CHECK(model.z_nodes.size() == 1);
  CHECK(model.p_nodes.size() == 1);
  CHECK(std::abs(eval_model(model, Complex(7.0, 3.0), 0.4) - c) < 1e-14);
}

TEST_CASE("p-AAA on an entry of the linear demo pole part") {
  // sample points on |z| = 0.8, parameters in [0.75, 1.25]
  const auto s = circle(0.0, 0.8, 40);
  const auto p = line(0.75, 1.25, 40);
  auto f = [](Complex z, Complex q) { return z / (z * z + q - 1.0); };
  PaaaOptions opts;
  opts.min_z_nodes = 3;
  opts.max_z_nodes = 3;
  const auto model = paaa_fit(grid(f, s, p), s, p, opts);
  CHECK(model.converged);
  CHECK(model.z_nodes.size() == 3);
  CHECK(model.max_error <= 1e-12);
  // held out
  const auto sh = circle(0.0, 0.9, 17, 0.1);
  for (const Complex z : sh)
    for (const Real q : {0.8, 0.93, 1.0, 1.11, 1.24}) {
      const Complex want = f(z, q);
      CHECK(std::abs(eval_model(model, z, q) - want) <= 1e-10 * std::abs(want));
    }
}

TEST_CASE("exact recovery of random bivariate rationals") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<Real> u(-1.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    const Complex a(u(gen), u(gen)), b(u(gen), u(gen)), c(u(gen), u(gen)), d(u(gen), u(gen));
    // z-degree 2, p-degree 2; poles at 2.2 + a p and -2.4 + b p stay off |z| <= 1.3
    auto f = [&](Complex z, Complex q) {
      return (1.0 + c * z * q * q + d * z) / ((z - 2.2 - 0.3 * a * q) * (z + 2.4 - 0.3 * b * q));
    };
    const auto s = circle(0.0, 1.0, 12);
    const auto p = line(0.0, 1.0, 12);
    const auto model = paaa_fit(grid(f, s, p), s, p);
    CHECK(model.converged);
    std::uniform_real_distribution<Real> ang(0.0, 2.0 * std::numbers::pi), up(0.0, 1.0);
    Real worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      const Complex z = std::polar(1.3 * up(gen), ang(gen));
      const Complex q = up(gen);
      worst = std::max(worst, std::abs(eval_model(model, z, q) - f(z, q)) / std::abs(f(z, q)));
    }
    CHECK(worst <= 1e-10);
  }
}

TEST_CASE("interpolation, the node limit and coefficient normalization") {
  const auto s = circle(0.0, 1.0, 16);
  const auto p = line(0.0, 1.0, 14);
  auto f = [](Complex z, Complex q) { return (z + q) / ((z - 1.8) * (z + 2.0 + q)); };
  const auto model = paaa_fit(grid(f, s, p), s, p);
  CHECK(std::abs(model.alpha.norm() - 1.0) <= 1e-14);
  for (std::size_t a = 0; a < model.z_nodes.size(); ++a)
    for (std::size_t b = 0; b < model.p_nodes.size(); ++b)
      CHECK(eval_model(model, model.z_nodes[a], model.p_nodes[b]) ==
            model.node_values(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)));

  // at z = xi_0 the model reduces to a 1-D barycentric interpolant in p over row 0
  const Complex q(0.37, 0.05);
  Complex num = 0.0, den = 0.0;
  for (std::size_t b = 0; b < model.p_nodes.size(); ++b) {
    const Complex w = model.alpha(0, static_cast<Eigen::Index>(b)) / (q - model.p_nodes[b]);
    num += w * model.node_values(0, static_cast<Eigen::Index>(b));
    den += w;
  }
  CHECK(std::abs(eval_model(model, model.z_nodes[0], q) - num / den) <= 1e-14 * std::abs(num / den));
}

TEST_CASE("greedy error history does not grow beyond noise") {
  const auto s = circle(0.0, 0.8, 40);
  const auto p = line(0.75, 1.25, 40);
  auto f = [](Complex z, Complex q) { return z / (z * z + q - 1.0); };
  const auto model = paaa_fit(grid(f, s, p), s, p);
  const auto& h = model.error_history;
  REQUIRE(h.size() >= 2);
  for (std::size_t k = 1; k < h.size(); ++k)
    CHECK(h[k] <= h[k - 1] + 10.0 * std::numeric_limits<Real>::epsilon());
}

TEST_CASE("invalid grids") {
  const auto s = line(2.0, 3.0, 4);
  const auto p = line(0.0, 1.0, 3);
  const CMatrix d = grid(inv_diff, s, p);
  PaaaOptions opts;
  opts.max_z_nodes = 5;
  CHECK_THROWS_AS(paaa_fit(d, s, p, opts), ArgumentError);
  opts = {};
  opts.min_z_nodes = 4;
  opts.max_z_nodes = 3;
  CHECK_THROWS_AS(paaa_fit(d, s, p, opts), ArgumentError);
  auto dup = s;
  dup[1] = dup[0];
  CHECK_THROWS_AS(paaa_fit(d, dup, p), ArgumentError);
  CHECK_THROWS_AS(paaa_fit(d.leftCols(2), s, p), ArgumentError);
}

TEST_CASE("vector lift shares the scalar fit") {
  const auto s = line(2.0, 3.0, 10);
  const auto p = line(0.0, 1.0, 10);
  const auto model = paaa_fit(grid(inv_diff, s, p), s, p);
  const auto mz = static_cast<Eigen::Index>(model.z_nodes.size());
  const auto mp = static_cast<Eigen::Index>(model.p_nodes.size());

  CMatrix scalar(1, mz * mp);
  for (Eigen::Index b = 0; b < mp; ++b)
    for (Eigen::Index a = 0; a < mz; ++a) scalar(0, a + b * mz) = model.node_values(a, b);
  const auto lift = lift_vector(model, scalar);
  CHECK(lift.alpha == model.alpha);
  CHECK(lift.z_nodes == model.z_nodes);
  CHECK(lift.p_nodes == model.p_nodes);
  for (const Complex z : {Complex(2.3), Complex(2.71, 0.2)})
    for (const Complex q : {Complex(0.1), Complex(0.55)})
      CHECK(std::abs(eval_model(lift, z, q)(0) - eval_model(model, z, q)) <=
            1e-15 * std::abs(eval_model(model, z, q)));

  const auto zero = lift_vector(model, CMatrix::Zero(3, mz * mp));
  CHECK(eval_model(zero, 2.5, 0.5).norm() == 0.0);
  CHECK_THROWS_AS(lift_vector(model, CMatrix::Zero(3, mz * mp - 1)), ArgumentError);
}

TEST_CASE("poles of the frozen model") {
  const auto s = circle(0.0, 2.0, 12);
  const auto p = line(0.0, 1.0, 8);
  const auto model = paaa_fit(grid(inv_diff, s, p), s, p);
  const auto poles = poles_at(model, 0.3);
  REQUIRE(poles.size() == 1);
  CHECK(std::abs(poles[0] - 0.3) < 1e-12);
  // at a parameter node the restricted weights apply
  const Complex pn = model.p_nodes[0];
  const auto at_node = poles_at(model, pn);
  REQUIRE(at_node.size() == 1);
  CHECK(std::abs(at_node[0] - pn) < 1e-12);
}

TEST_CASE("a pole of the identity multiplicity shows once") {
  // H(z,p) = I/(z-p); the mean-direction scalar data lose the multiplicity
  const auto s = circle(0.0, 2.0, 12);
  const auto p = line(0.0, 1.0, 8);
  std::mt19937_64 gen(4);
  const CMatrix l = oracle::random_matrix(gen, 3, 1), r = oracle::random_matrix(gen, 3, 1);
  const Complex lr = (l.transpose() * r)(0, 0);
  auto f = [&](Complex z, Complex q) { return lr / (z - q); };
  const auto model = paaa_fit(grid(f, s, p), s, p);
  CHECK(poles_at(model, 0.6).size() == 1);
}

TEST_CASE("consistency rank check") {
  const auto disk = ContourDomain::disk(0.0, 0.6);
  LinearDemoProblem lin;
  const auto cfg = default_sampling(disk, 20, 40, 0.75, 1.25, 3, 1);
  const auto samples = probe_samples(lin, build_trapezoid_rule(disk, 512), cfg);
  CHECK(consistency_rank_check(samples, cfg) == 2);
  for (const int r : loewner_ranks(samples, cfg)) CHECK(r == 2);

  // one eigenvalue path -0.5 + p crosses |z| = 0.3 twice for p in [0, 1]
  const SyntheticRationalProblem crossing(5, 4, {{0.1, 0.0}, {-0.5, 1.0}});
  const auto small = ContourDomain::disk(0.0, 0.3);
  const auto cfg2 = default_sampling(small, 5, 10, 0.0, 1.0, 4, 2);
  const auto samples2 = probe_samples(crossing, build_trapezoid_rule(small, 256), cfg2);
  try {
    consistency_rank_check(samples2, cfg2);
    FAIL("expected AssumptionViolation");
  } catch (const AssumptionViolation& e) {
    REQUIRE(e.ranks().size() == 10);
    CHECK(e.ranks().front() == 1);
    CHECK(e.ranks()[5] == 2);
    CHECK(e.ranks().back() == 1);
  }
}
