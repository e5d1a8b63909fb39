#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "oracles.hpp"
#include "pnlevp/solver.hpp"

using namespace pnlevp;

namespace {

const ContourDomain kLinearDisk = ContourDomain::disk(0.0, 0.6);
const ContourDomain kDelayDisk = ContourDomain::disk(0.0, 0.075);

const OfflineModel& linear_model() {
  static const OfflineModel model = [] {
    LinearDemoProblem prob;
    const auto cfg = default_sampling(kLinearDisk, 20, 40, 0.75, 1.25, 3, 1);
    return offline(prob, kLinearDisk, cfg, 512);
  }();
  return model;
}

const OfflineModel& delay_model() {
  static const OfflineModel model = [] {
    DelayProblem prob;
    const auto cfg = default_sampling(kDelayDisk, 20, 40, 30.0, 35.0, 10, 7);
    return offline(prob, kDelayDisk, cfg, 128);
  }();
  return model;
}

bool same(const EigenSolution& a, const EigenSolution& b) {
  return a.eigenvalues == b.eigenvalues && a.V == b.V && a.W == b.W && a.in_domain == b.in_domain &&
         a.rank == b.rank;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("pnlevp_test_" + name);
}

}  // namespace

TEST_CASE("linear demo offline model") {
  const auto& model = linear_model();
  CHECK(model.m == 2);
  CHECK(model.converged);
  CHECK(model.scalar_model.z_nodes.size() == 3);
  CHECK(model.left_models.size() == 20);
  CHECK(model.right_models.size() == 20);
  for (const auto& v : model.left_models) {
    CHECK(v.alpha == model.scalar_model.alpha);
    CHECK(v.z_nodes == model.scalar_model.z_nodes);
  }
}

TEST_CASE("linear demo online inside the parameter range") {
  LinearDemoProblem prob;
  const auto sol = online(linear_model(), 0.75);
  REQUIRE(sol.size() == 2);
  CHECK(oracle::set_distance(sol.eigenvalues, {0.5, -0.5}) < 1e-10);
  for (const Real r : residuals(prob, sol)) CHECK(r <= 1e-10);
  CHECK(sol.warnings.empty());
  CHECK(std::all_of(sol.in_domain.begin(), sol.in_domain.end(), [](bool b) { return b; }));

  const auto defective = online(linear_model(), 1.0);
  REQUIRE(defective.size() == 2);
  for (const Real r : residuals(prob, defective)) CHECK(r <= 1e-8);

  const auto probe = scalar_probe_eigenvalues(linear_model(), 0.75);
  CHECK(oracle::set_distance(probe, {0.5, -0.5}) < 1e-8);
}

TEST_CASE("eigenvalue trajectories follow the closed form") {
  LinearDemoProblem prob;
  Real worst = 0.0;
  for (const Real p : uniform_parameters(0.75, 1.25, 41)) {
    if (std::abs(p - 1.0) < 0.01) continue;
    const auto sol = online(linear_model(), p);
    const Complex l2 = std::sqrt(Complex(1.0 - p, 0.0));
    worst = std::max(worst, oracle::set_distance(sol.eigenvalues, {l2, -l2}));
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("residual metric") {
  LinearDemoProblem prob;
  EigenSolution exact;
  exact.p_hat = 0.75;
  exact.eigenvalues = {0.5};
  Eigen::ComplexEigenSolver<CMatrix> es(oracle::linear_a(0.75));
  Eigen::Index k = 0;
  (es.eigenvalues().array() - Complex(0.5)).abs().minCoeff(&k);
  exact.V = es.eigenvectors().col(k);
  CHECK(residuals(prob, exact)[0] <= 1e-14);

  std::mt19937_64 gen(1);
  EigenSolution random;
  random.p_hat = 0.75;
  random.eigenvalues = {Complex(0.2, 0.1)};
  random.V = oracle::random_matrix(gen, 3, 1);
  CHECK(residuals(prob, random)[0] > 1e-3);

  random.V.setZero();
  CHECK_THROWS_AS(residuals(prob, random), NumericalError);
  CHECK_THROWS_AS(residuals(prob, EigenSolution{}), ArgumentError);
}

TEST_CASE("offline input validation") {
  LinearDemoProblem prob;
  const auto one = default_sampling(kLinearDisk, 4, 1, 1.0, 1.0, 3, 1);
  CHECK_THROWS_AS(offline(prob, kLinearDisk, one, 64), ArgumentError);
  const auto wrong_dim = default_sampling(kLinearDisk, 4, 4, 0.8, 1.0, 5, 1);
  CHECK_THROWS_AS(offline(prob, kLinearDisk, wrong_dim, 64), ArgumentError);
  const auto few = default_sampling(kLinearDisk, 2, 4, 0.8, 1.0, 3, 1);
  CHECK_THROWS_AS(offline(prob, kLinearDisk, few, 64), ArgumentError);
}

TEST_CASE("offline rank inconsistency raises an assumption violation") {
  const SyntheticRationalProblem crossing(5, 4, {{0.1, 0.0}, {-0.5, 1.0}});
  const auto small = ContourDomain::disk(0.0, 0.3);
  const auto cfg = default_sampling(small, 5, 10, 0.0, 1.0, 4, 2);
  CHECK_THROWS_AS(offline(crossing, small, cfg, 256), AssumptionViolation);
}

TEST_CASE("surrogates reproduce the probed samples") {
  const auto& model = linear_model();
  LinearDemoProblem prob;
  const auto samples =
      probe_samples(prob, build_trapezoid_rule(kLinearDisk, 512), model.sampling);
  Real worst = 0.0, scale = 0.0;
  for (int j = 0; j < model.sampling.q(); j += 3)
    for (int i = 0; i < 2 * model.sampling.r(); i += 5)
      for (int k = 0; k < model.sampling.r(); k += 4) {
        const Complex s = model.sampling.sample_points[static_cast<std::size_t>(i)];
        const Complex p = model.sampling.parameter_points[static_cast<std::size_t>(j)];
        const CVector l = eval_model(model.left_models[static_cast<std::size_t>(k)], s, p);
        const CVector r = eval_model(model.right_models[static_cast<std::size_t>(k)], s, p);
        worst = std::max({worst, (l - samples.left(k, i, j)).norm(),
                          (r - samples.right(k, i, j)).norm()});
        scale = std::max({scale, samples.left(k, i, j).norm(), samples.right(k, i, j).norm()});
      }
  CHECK(worst <= 1e-10 * scale);
}

TEST_CASE("exact recovery through the whole pipeline") {
  const ContourDomain disk = ContourDomain::disk(0.0, 1.0);
  for (const int m : {1, 3}) {
    const auto prob = SyntheticRationalProblem::with_inside(40 + m, 6, m, disk, 0.0, 1.0);
    const auto cfg = default_sampling(disk, m + 3, 16, 0.0, 1.0, 6, 3);
    const auto model = offline(prob, disk, cfg, 256);
    CHECK(model.m == m);
    std::mt19937_64 gen(m);
    std::uniform_real_distribution<Real> u(0.0, 1.0);
    Real worst = 0.0;
    for (int k = 0; k < 50; ++k) {
      const Real p = u(gen);
      std::vector<Complex> want;
      for (const Complex z : prob.eigenvalues(p))
        if (disk.contains(z)) want.push_back(z);
      worst = std::max(worst, oracle::set_distance(online(model, p).eigenvalues, want));
    }
    CHECK(worst <= 1e-8);
  }
}

TEST_CASE("delay model degrees and eigenvalues") {
  const auto& model = delay_model();
  CHECK(model.m == 4);
  CHECK(model.scalar_model.z_degree() == 4);
  CHECK(model.scalar_model.p_degree() == 5);
  DelayProblem prob;
  const auto sol = online(model, 30.0);
  REQUIRE(sol.size() == 4);
  for (const Real r : residuals(prob, sol)) CHECK(r <= 1e-6);
  CHECK(oracle::set_distance(sol.eigenvalues, oracle::delay_roots(30.0, 0.075)) <= 1e-6);

  const auto far = online(model, 50.0);
  CHECK(far.size() == 4);
  CHECK_FALSE(far.warnings.empty());
  CHECK(oracle::delay_roots(50.0, 0.075).size() == 6);

  const auto low = online(model, 20.0);
  REQUIRE(low.size() == 4);
  CHECK(std::count(low.in_domain.begin(), low.in_domain.end(), false) == 2);
}

TEST_CASE("model file round trip") {
  const auto& model = linear_model();
  const std::string text = model_to_string(model);
  const OfflineModel back = model_from_string(text);
  CHECK(model_to_string(back) == text);
  CHECK(back.m == model.m);
  CHECK(back.domain == model.domain);
  CHECK(back.sampling.sample_points == model.sampling.sample_points);
  CHECK(back.sampling.left_dirs == model.sampling.left_dirs);
  CHECK(back.scalar_model.alpha == model.scalar_model.alpha);
  CHECK(back.scalar_model.node_values == model.scalar_model.node_values);
  CHECK(back.scalar_model.error_history == model.scalar_model.error_history);
  for (std::size_t k = 0; k < model.left_models.size(); ++k) {
    CHECK(back.left_models[k].node_vectors == model.left_models[k].node_vectors);
    CHECK(back.right_models[k].node_vectors == model.right_models[k].node_vectors);
  }

  const auto path = temp_path("roundtrip.model");
  save_model(model, path);
  const OfflineModel loaded = load_model(path);
  CHECK(same(online(loaded, 0.9), online(model, 0.9)));
  CHECK(same(online(loaded, 1.7), online(model, 1.7)));
  std::filesystem::remove(path);
}

TEST_CASE("malformed model files") {
  const std::string text = model_to_string(linear_model());
  CHECK_THROWS_AS(model_from_string(text.substr(0, text.size() / 2)), FormatError);
  CHECK_THROWS_AS(model_from_string("{}"), FormatError);
  std::string bumped = text;
  const auto pos = bumped.find("\"format_version\": 1");
  REQUIRE(pos != std::string::npos);
  bumped.replace(pos, 19, "\"format_version\": 2");
  CHECK_THROWS_AS(model_from_string(bumped), FormatError);
  CHECK_THROWS_AS(load_model(temp_path("does_not_exist.model")), std::ios_base::failure);
}

TEST_CASE("online results are identical across runs and worker counts") {
  const auto& model = linear_model();
  const auto a = online(model, 0.83);
  const auto b = online(model, 0.83);
  CHECK(same(a, b));
  const auto ps = uniform_parameters(0.75, 1.25, 9);
  const auto one = parameter_sweep(model, ps, nullptr, 1);
  const auto many = parameter_sweep(model, ps, nullptr, 4);
  REQUIRE(one.size() == many.size());
  for (std::size_t k = 0; k < one.size(); ++k) {
    CHECK(one[k].eigenvalues == many[k].eigenvalues);
    CHECK(one[k].p_hat == Complex(ps[k]));
    CHECK(std::isnan(one[k].max_residual));
  }
}

TEST_CASE("sweep rows and residuals") {
  LinearDemoProblem prob;
  const auto rows = parameter_sweep(linear_model(), uniform_parameters(0.75, 1.25, 5), &prob);
  REQUIRE(rows.size() == 5);
  for (const auto& row : rows) {
    CHECK(row.eigenvalues.size() == 2);
    CHECK(row.max_residual <= 1e-8);
  }
  CHECK(uniform_parameters(3.0, 4.0, 1) == std::vector<Real>{3.5});
  CHECK_THROWS_AS(uniform_parameters(1.0, 0.0, 3), ArgumentError);
  CHECK_THROWS_AS(uniform_parameters(0.0, 1.0, 0), ArgumentError);
}
