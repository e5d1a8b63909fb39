#include "pnlevp/barycentric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>

#include "pnlevp/linalg.hpp"

namespace pnlevp {

namespace {

constexpr Real kNodeTol = 1e-14;
constexpr Real kUnderflow = 1e-300;
constexpr Real kImprovement = 0.5;

std::optional<Eigen::Index> matching_node(const std::vector<Complex>& nodes, Complex x) {
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (std::abs(x - nodes[i]) <= kNodeTol * std::max(1.0, std::abs(nodes[i])))
      return static_cast<Eigen::Index>(i);
  return std::nullopt;
}

CVector cauchy_row(const std::vector<Complex>& nodes, Complex x) {
  CVector v(static_cast<Eigen::Index>(nodes.size()));
  for (std::size_t i = 0; i < nodes.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = 1.0 / (x - nodes[i]);
  return v;
}

void check_distinct(const std::vector<Complex>& pts, const char* axis) {
  for (std::size_t a = 0; a < pts.size(); ++a)
    for (std::size_t b = a + 1; b < pts.size(); ++b)
      if (pts[a] == pts[b])
        throw ArgumentError(std::string("paaa_fit: repeated ") + axis + " grid point");
}

}  // namespace

CMatrix barycentric_weights(const std::vector<Complex>& z_nodes,
                            const std::vector<Complex>& p_nodes, const CMatrix& alpha, Complex z,
                            Complex p) {
  const auto mz = static_cast<Eigen::Index>(z_nodes.size());
  const auto mp = static_cast<Eigen::Index>(p_nodes.size());
  const auto zi = matching_node(z_nodes, z);
  const auto pj = matching_node(p_nodes, p);

  CMatrix w = CMatrix::Zero(mz, mp);
  if (zi && pj) {
    w(*zi, *pj) = 1.0;
    return w;
  }
  if (zi) {
    w.row(*zi) = alpha.row(*zi).cwiseProduct(cauchy_row(p_nodes, p).transpose());
  } else if (pj) {
    w.col(*pj) = alpha.col(*pj).cwiseProduct(cauchy_row(z_nodes, z));
  } else {
    w = alpha.cwiseProduct(cauchy_row(z_nodes, z) * cauchy_row(p_nodes, p).transpose());
  }
  const Complex denom = w.sum();
  if (!(std::abs(denom) >= kUnderflow) || !std::isfinite(std::abs(denom))) {
    std::ostringstream os;
    os << "barycentric denominator vanishes at z=" << z << ", p=" << p << " (spurious pole)";
    throw EvaluationError(os.str());
  }
  return w / denom;
}

Complex eval_model(const BarycentricModel2D& model, Complex z, Complex p) {
  const CMatrix w = barycentric_weights(model.z_nodes, model.p_nodes, model.alpha, z, p);
  const auto zi = matching_node(model.z_nodes, z);
  const auto pj = matching_node(model.p_nodes, p);
  if (zi && pj) return model.node_values(*zi, *pj);
  return w.cwiseProduct(model.node_values).sum();
}

CVector eval_model(const VectorBarycentricModel& model, Complex z, Complex p) {
  const auto zi = matching_node(model.z_nodes, z);
  const auto pj = matching_node(model.p_nodes, p);
  if (zi && pj)
    return model.node_vectors.col(*zi + *pj * static_cast<Eigen::Index>(model.z_nodes.size()));
  const CMatrix w = barycentric_weights(model.z_nodes, model.p_nodes, model.alpha, z, p);
  return model.node_vectors * w.reshaped();
}

// ---------------------------------------------------------------------------
// p-AAA

namespace {

struct FitState {
  std::vector<int> zi;  // grid indices of z nodes
  std::vector<int> pj;  // grid indices of p nodes
  CMatrix alpha;
};

BarycentricModel2D assemble(const FitState& st, const CMatrix& data,
                            const std::vector<Complex>& s, const std::vector<Complex>& p) {
  BarycentricModel2D m;
  m.z_node_index = st.zi;
  m.p_node_index = st.pj;
  for (int i : st.zi) m.z_nodes.push_back(s[static_cast<std::size_t>(i)]);
  for (int j : st.pj) m.p_nodes.push_back(p[static_cast<std::size_t>(j)]);
  m.alpha = st.alpha;
  m.node_values.resize(static_cast<Eigen::Index>(st.zi.size()),
                       static_cast<Eigen::Index>(st.pj.size()));
  for (std::size_t a = 0; a < st.zi.size(); ++a)
    for (std::size_t b = 0; b < st.pj.size(); ++b)
      m.node_values(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
          data(st.zi[a], st.pj[b]);
  return m;
}

// Unit-norm alpha minimizing the linearized residual over grid points whose
// coordinates are both non-nodes. With node_lines, points on a node row or
// column contribute the linearized residual of the restricted 1-D form.
CMatrix solve_coefficients(const FitState& st, const CMatrix& data,
                           const std::vector<Complex>& s, const std::vector<Complex>& p,
                           bool node_lines) {
  const auto mz = static_cast<Eigen::Index>(st.zi.size());
  const auto mp = static_cast<Eigen::Index>(st.pj.size());
  std::vector<int> z_slot(s.size(), -1), p_slot(p.size(), -1);
  for (std::size_t a = 0; a < st.zi.size(); ++a) z_slot[static_cast<std::size_t>(st.zi[a])] = static_cast<int>(a);
  for (std::size_t b = 0; b < st.pj.size(); ++b) p_slot[static_cast<std::size_t>(st.pj[b])] = static_cast<int>(b);

  const auto free_s = static_cast<Eigen::Index>(s.size()) - mz;
  const auto free_p = static_cast<Eigen::Index>(p.size()) - mp;
  Eigen::Index rows = free_s * free_p;
  if (node_lines) rows += free_s * mp + mz * free_p;
  const Eigen::Index cols = mz * mp;
  CMatrix loewner = CMatrix::Zero(rows, cols);
  auto node_value = [&](Eigen::Index a, Eigen::Index b) {
    return data(st.zi[static_cast<std::size_t>(a)], st.pj[static_cast<std::size_t>(b)]);
  };
  auto z_node = [&](Eigen::Index a) { return s[static_cast<std::size_t>(st.zi[static_cast<std::size_t>(a)])]; };
  auto p_node = [&](Eigen::Index b) { return p[static_cast<std::size_t>(st.pj[static_cast<std::size_t>(b)])]; };

  Eigen::Index row = 0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      const int a0 = z_slot[i];
      const int b0 = p_slot[j];
      const Complex dij = data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (a0 < 0 && b0 < 0) {
        for (Eigen::Index b = 0; b < mp; ++b)
          for (Eigen::Index a = 0; a < mz; ++a)
            loewner(row, a + b * mz) = (dij - node_value(a, b)) / ((s[i] - z_node(a)) * (p[j] - p_node(b)));
      } else if (!node_lines || (a0 >= 0 && b0 >= 0)) {
        continue;
      } else if (b0 >= 0) {
        for (Eigen::Index a = 0; a < mz; ++a)
          loewner(row, a + b0 * mz) = (dij - node_value(a, b0)) / (s[i] - z_node(a));
      } else {
        for (Eigen::Index b = 0; b < mp; ++b)
          loewner(row, a0 + b * mz) = (dij - node_value(a0, b)) / (p[j] - p_node(b));
      }
      ++row;
    }
  }

  CVector v;
  if (rows >= cols && cols > 0) {
    // Reduce the tall system to its triangular factor before the SVD.
    Eigen::HouseholderQR<CMatrix> qr(loewner);
    const CMatrix r = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
    Eigen::BDCSVD<CMatrix> svd(r, Eigen::ComputeFullV);
    v = svd.matrixV().col(cols - 1);
  } else {
    Eigen::BDCSVD<CMatrix> svd(loewner, Eigen::ComputeFullV);
    v = svd.matrixV().col(cols - 1);
  }
  v.normalize();
  return v.reshaped(mz, mp);
}

}  // namespace

BarycentricModel2D paaa_fit(const CMatrix& data, const std::vector<Complex>& s_points,
                            const std::vector<Complex>& p_points, const PaaaOptions& options) {
  const auto ns = static_cast<int>(s_points.size());
  const auto np = static_cast<int>(p_points.size());
  if (data.rows() != ns || data.cols() != np)
    throw ArgumentError("paaa_fit: data must be |s_points| x |p_points|");
  if (ns < 1 || np < 1) throw ArgumentError("paaa_fit: empty grid");
  if (!data.allFinite()) throw ArgumentError("paaa_fit: data contains non-finite values");
  check_distinct(s_points, "s");
  check_distinct(p_points, "p");

  const int max_z = options.max_z_nodes > 0 ? options.max_z_nodes : std::max(1, ns / 2);
  const int max_p = options.max_p_nodes > 0 ? options.max_p_nodes : np;
  const int min_z = std::max(1, options.min_z_nodes);
  if (max_z > ns || max_p > np || min_z > max_z)
    throw ArgumentError("paaa_fit: grid has fewer distinct points than requested nodes");

  const Real scale = data.cwiseAbs().maxCoeff();
  Eigen::Index i0 = 0, j0 = 0;
  data.cwiseAbs().maxCoeff(&i0, &j0);

  FitState st;
  st.zi = {static_cast<int>(i0)};
  st.pj = {static_cast<int>(j0)};
  st.alpha = CMatrix::Ones(1, 1);

  std::optional<BarycentricModel2D> best;
  std::vector<Real> history;
  int iter = 0;
  for (;; ++iter) {
    BarycentricModel2D model = assemble(st, data, s_points, p_points);

    Eigen::MatrixXd err(ns, np);
    for (int j = 0; j < np; ++j)
      for (int i = 0; i < ns; ++i) {
        Real e;
        try {
          e = std::abs(eval_model(model, s_points[static_cast<std::size_t>(i)],
                                  p_points[static_cast<std::size_t>(j)]) -
                       data(i, j));
        } catch (const EvaluationError&) {
          e = std::numeric_limits<Real>::infinity();
        }
        err(i, j) = std::isfinite(e) ? e : std::numeric_limits<Real>::infinity();
      }
    const Real rel = scale > 0.0 ? err.maxCoeff() / scale : 0.0;
    history.push_back(rel);
    model.max_error = rel;
    model.iterations = iter;

    // A larger model replaces the best one only if it at least halves the
    // error; fluctuations at the noise floor do not buy extra degree.
    const bool enough_z = static_cast<int>(st.zi.size()) >= min_z;
    if (!best || (enough_z && (static_cast<int>(best->z_nodes.size()) < min_z ||
                               rel < kImprovement * best->max_error)))
      best = model;

    const bool accurate = rel <= options.tol;
    if (accurate && enough_z) {
      best = model;
      best->converged = true;
      break;
    }

    // Worst grid point that can still contribute a new node.
    std::vector<bool> z_node(static_cast<std::size_t>(ns), false), p_node(static_cast<std::size_t>(np), false);
    for (int i : st.zi) z_node[static_cast<std::size_t>(i)] = true;
    for (int j : st.pj) p_node[static_cast<std::size_t>(j)] = true;
    // Without node-line rows the least-squares problem needs a free row and column.
    const int keep = options.node_lines ? 0 : 1;
    const bool z_room = static_cast<int>(st.zi.size()) < std::min(max_z, ns - keep);
    const bool p_room = static_cast<int>(st.pj.size()) < std::min(max_p, np - keep) && !accurate;
    int wi = -1, wj = -1;
    Real worst = -1.0;
    for (int j = 0; j < np; ++j)
      for (int i = 0; i < ns; ++i) {
        const bool adds_z = z_room && !z_node[static_cast<std::size_t>(i)];
        const bool adds_p = p_room && !p_node[static_cast<std::size_t>(j)];
        if (!adds_z && !adds_p) continue;
        if (err(i, j) > worst) {
          worst = err(i, j);
          wi = i;
          wj = j;
        }
      }
    if (wi < 0) break;  // node budgets exhausted

    if (z_room && !z_node[static_cast<std::size_t>(wi)]) st.zi.push_back(wi);
    if (p_room && !p_node[static_cast<std::size_t>(wj)]) st.pj.push_back(wj);
    st.alpha = solve_coefficients(st, data, s_points, p_points, options.node_lines);
  }
  best->error_history = history;
  best->iterations = iter;
  return *best;
}

VectorBarycentricModel lift_vector(const BarycentricModel2D& model, const CMatrix& node_vectors) {
  const auto count = static_cast<Eigen::Index>(model.z_nodes.size() * model.p_nodes.size());
  if (node_vectors.cols() != count)
    throw ArgumentError("lift_vector: a vector is required for every node pair");
  if (!node_vectors.allFinite()) throw ArgumentError("lift_vector: non-finite node vector");
  return VectorBarycentricModel{model.z_nodes, model.p_nodes, model.alpha, node_vectors};
}

std::vector<Complex> poles_at(const BarycentricModel2D& model, Complex p_hat) {
  const auto mz = static_cast<Eigen::Index>(model.z_nodes.size());
  CVector beta;
  if (const auto pj = matching_node(model.p_nodes, p_hat)) {
    beta = model.alpha.col(*pj);
  } else {
    beta = model.alpha * cauchy_row(model.p_nodes, p_hat);
  }
  const Real bn = beta.norm();
  if (!(bn > 0.0) || !std::isfinite(bn))
    throw NumericalError("poles_at: effective barycentric weights vanish (degenerate model)");
  beta /= bn;

  CMatrix a = CMatrix::Zero(mz + 1, mz + 1);
  CMatrix b = CMatrix::Identity(mz + 1, mz + 1);
  b(0, 0) = 0.0;
  a.block(0, 1, 1, mz) = beta.transpose();
  a.block(1, 0, mz, 1).setOnes();
  for (Eigen::Index i = 0; i < mz; ++i) a(i + 1, i + 1) = model.z_nodes[static_cast<std::size_t>(i)];

  const GeneralizedEigen ge = generalized_eigen(a, b, false);
  // Two eigenvalues are infinite by construction; drop the two with the
  // smallest |beta|/|alpha| and anything else that is numerically infinite.
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(mz + 1));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  auto ratio = [&](Eigen::Index k) {
    return std::abs(ge.beta(k)) / (std::abs(ge.alpha(k)) + std::abs(ge.beta(k)));
  };
  std::sort(idx.begin(), idx.end(), [&](Eigen::Index x, Eigen::Index y) { return ratio(x) < ratio(y); });
  std::vector<Complex> poles;
  for (std::size_t k = 2; k < idx.size(); ++k) {
    const Eigen::Index e = idx[k];
    if (std::abs(ge.beta(e)) <= std::numeric_limits<Real>::epsilon() * std::abs(ge.alpha(e)))
      continue;
    poles.push_back(ge.alpha(e) / ge.beta(e));
  }
  const auto order = eigen_order(poles);
  std::vector<Complex> sorted;
  for (std::size_t o : order) sorted.push_back(poles[o]);
  return sorted;
}

// ---------------------------------------------------------------------------

TangentialData tangential_data_at(const ProbedSampleSet& samples, const SamplingConfig& config,
                                  int j) {
  const int r = config.r();
  const Eigen::Index n = samples.dim();
  TangentialData d;
  d.theta = config.left_points();
  d.sigma = config.right_points();
  d.left_dirs = config.left_dirs;
  d.right_dirs = config.right_dirs;
  d.left_vals.resize(n, r);
  d.right_vals.resize(n, r);
  for (int i = 0; i < r; ++i) {
    d.left_vals.col(i) = samples.left(i, 2 * i, j);
    d.right_vals.col(i) = samples.right(i, 2 * i + 1, j);
  }
  return d;
}

std::vector<int> loewner_ranks(const ProbedSampleSet& samples, const SamplingConfig& config,
                               Real rank_tol) {
  std::vector<int> ranks;
  for (int j = 0; j < samples.q(); ++j)
    ranks.push_back(numerical_rank(build_loewner(tangential_data_at(samples, config, j)).loewner,
                                   rank_tol));
  return ranks;
}

int consistency_rank_check(const ProbedSampleSet& samples, const SamplingConfig& config,
                           Real rank_tol) {
  const std::vector<int> ranks = loewner_ranks(samples, config, rank_tol);
  if (ranks.empty()) throw ArgumentError("consistency_rank_check: no parameter samples");
  if (std::adjacent_find(ranks.begin(), ranks.end(), std::not_equal_to<>()) != ranks.end()) {
    std::ostringstream os;
    os << "eigenvalue count in the domain changes across parameters; Loewner ranks:";
    for (std::size_t j = 0; j < ranks.size(); ++j)
      os << " p[" << j << "]=" << config.parameter_points[j] << ":" << ranks[j];
    throw AssumptionViolation(os.str(), ranks);
  }
  return ranks.front();
}

}  // namespace pnlevp
