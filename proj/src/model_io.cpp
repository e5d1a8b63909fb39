#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "pnlevp/solver.hpp"

namespace pnlevp {

namespace {

using nlohmann::json;

constexpr int kFormatVersion = 1;

json to_json(Complex z) { return json::array({z.real(), z.imag()}); }

Complex complex_from(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw FormatError("model file: complex numbers must be [re, im] arrays");
  return {j[0].get<Real>(), j[1].get<Real>()};
}

json to_json(const std::vector<Complex>& v) {
  json a = json::array();
  for (const Complex z : v) a.push_back(to_json(z));
  return a;
}

std::vector<Complex> complex_list(const json& j) {
  if (!j.is_array()) throw FormatError("model file: expected an array of complex numbers");
  std::vector<Complex> out;
  for (const auto& e : j) out.push_back(complex_from(e));
  return out;
}

// Matrices are stored as a list of rows.
json to_json(const CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(to_json(m(i, k)));
    rows.push_back(std::move(row));
  }
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(rows)}};
}

CMatrix matrix_from(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const json& data = j.at("data");
  if (rows < 0 || cols < 0 || !data.is_array() || static_cast<Eigen::Index>(data.size()) != rows)
    throw FormatError("model file: matrix shape does not match its data");
  CMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = data[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw FormatError("model file: matrix row has the wrong length");
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = complex_from(row[static_cast<std::size_t>(k)]);
  }
  return m;
}

// JSON has no infinities; non-finite reals are written as null.
json real_to_json(Real x) { return std::isfinite(x) ? json(x) : json(nullptr); }
Real real_from(const json& j) {
  return j.is_null() ? std::numeric_limits<Real>::infinity() : j.get<Real>();
}

json domain_to_json(const ContourDomain& d) {
  if (d.is_disk()) {
    const auto& disk = std::get<Disk>(d.shape());
    return {{"type", "disk"}, {"center", to_json(disk.center)}, {"radius", disk.radius}};
  }
  const auto& e = std::get<Ellipse>(d.shape());
  return {{"type", "ellipse"},
          {"center", to_json(e.center)},
          {"semi_real", e.semi_real},
          {"semi_imag", e.semi_imag}};
}

ContourDomain domain_from(const json& j) {
  const auto type = j.at("type").get<std::string>();
  if (type == "disk")
    return ContourDomain::disk(complex_from(j.at("center")), j.at("radius").get<Real>());
  if (type == "ellipse")
    return ContourDomain::ellipse(complex_from(j.at("center")), j.at("semi_real").get<Real>(),
                                  j.at("semi_imag").get<Real>());
  throw FormatError("model file: unknown domain type '" + type + "'");
}

}  // namespace

std::string model_to_string(const OfflineModel& model) {
  const BarycentricModel2D& s = model.scalar_model;
  json history = json::array();
  for (const Real e : s.error_history) history.push_back(real_to_json(e));

  json left = json::array(), right = json::array();
  for (const auto& l : model.left_models) left.push_back({{"node_vectors", to_json(l.node_vectors)}});
  for (const auto& r : model.right_models) right.push_back({{"node_vectors", to_json(r.node_vectors)}});

  json doc = {
      {"format_version", kFormatVersion},
      {"problem_name", model.problem_name},
      {"domain", domain_to_json(model.domain)},
      {"sampling",
       {{"points", to_json(model.sampling.sample_points)},
        {"parameters", to_json(model.sampling.parameter_points)},
        {"left_directions", to_json(model.sampling.left_dirs)},
        {"right_directions", to_json(model.sampling.right_dirs)},
        {"seed", model.sampling.seed}}},
      {"m", model.m},
      {"scalar_nodes",
       {{"z", to_json(s.z_nodes)},
        {"p", to_json(s.p_nodes)},
        {"z_index", s.z_node_index},
        {"p_index", s.p_node_index},
        {"values", to_json(s.node_values)}}},
      {"alpha", to_json(s.alpha)},
      {"left_models", std::move(left)},
      {"right_models", std::move(right)},
      {"metadata",
       {{"quadrature_nodes", model.quadrature_nodes},
        {"fit_tol", model.fit_tol},
        {"rank_tol", model.rank_tol},
        {"converged", model.converged},
        {"fit_converged", s.converged},
        {"max_fit_error", real_to_json(s.max_error)},
        {"fit_iterations", s.iterations},
        {"error_history", std::move(history)},
        {"z_degree", s.z_degree()},
        {"p_degree", s.p_degree()}}}};
  return doc.dump(1);
}

OfflineModel model_from_string(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("model file is malformed: ") + e.what());
  }
  try {
    if (!doc.is_object() || !doc.contains("format_version"))
      throw FormatError("model file: missing format_version");
    const int version = doc.at("format_version").get<int>();
    if (version != kFormatVersion)
      throw FormatError("model file: unsupported format_version " + std::to_string(version));

    OfflineModel m;
    m.problem_name = doc.at("problem_name").get<std::string>();
    m.domain = domain_from(doc.at("domain"));
    const json& smp = doc.at("sampling");
    m.sampling.sample_points = complex_list(smp.at("points"));
    m.sampling.parameter_points = complex_list(smp.at("parameters"));
    m.sampling.left_dirs = matrix_from(smp.at("left_directions"));
    m.sampling.right_dirs = matrix_from(smp.at("right_directions"));
    m.sampling.seed = smp.at("seed").get<std::uint64_t>();
    m.m = doc.at("m").get<int>();

    BarycentricModel2D& s = m.scalar_model;
    const json& nodes = doc.at("scalar_nodes");
    s.z_nodes = complex_list(nodes.at("z"));
    s.p_nodes = complex_list(nodes.at("p"));
    s.z_node_index = nodes.at("z_index").get<std::vector<int>>();
    s.p_node_index = nodes.at("p_index").get<std::vector<int>>();
    s.node_values = matrix_from(nodes.at("values"));
    s.alpha = matrix_from(doc.at("alpha"));

    const json& meta = doc.at("metadata");
    m.quadrature_nodes = meta.at("quadrature_nodes").get<int>();
    m.fit_tol = meta.at("fit_tol").get<Real>();
    m.rank_tol = meta.at("rank_tol").get<Real>();
    m.converged = meta.at("converged").get<bool>();
    s.converged = meta.at("fit_converged").get<bool>();
    s.max_error = real_from(meta.at("max_fit_error"));
    s.iterations = meta.at("fit_iterations").get<int>();
    for (const auto& e : meta.at("error_history")) s.error_history.push_back(real_from(e));

    const auto mz = static_cast<Eigen::Index>(s.z_nodes.size());
    const auto mp = static_cast<Eigen::Index>(s.p_nodes.size());
    if (s.alpha.rows() != mz || s.alpha.cols() != mp || s.node_values.rows() != mz ||
        s.node_values.cols() != mp)
      throw FormatError("model file: coefficient shape does not match the node counts");
    if (m.sampling.sample_points.size() != static_cast<std::size_t>(2 * m.sampling.r()))
      throw FormatError("model file: expected 2r sample points");

    auto read_models = [&](const json& arr) {
      std::vector<VectorBarycentricModel> out;
      for (const auto& e : arr) {
        CMatrix nv = matrix_from(e.at("node_vectors"));
        if (nv.cols() != mz * mp || nv.rows() != m.sampling.dim())
          throw FormatError("model file: node vector block has the wrong shape");
        out.push_back(VectorBarycentricModel{s.z_nodes, s.p_nodes, s.alpha, std::move(nv)});
      }
      if (static_cast<int>(out.size()) != m.sampling.r())
        throw FormatError("model file: expected one vector model per probing direction");
      return out;
    };
    m.left_models = read_models(doc.at("left_models"));
    m.right_models = read_models(doc.at("right_models"));
    return m;
  } catch (const json::exception& e) {
    throw FormatError(std::string("model file is malformed: ") + e.what());
  } catch (const ArgumentError& e) {
    throw FormatError(std::string("model file is malformed: ") + e.what());
  }
}

void save_model(const OfflineModel& model, const std::filesystem::path& path) {
  const std::string text = model_to_string(model);
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::ios_base::failure("cannot open '" + tmp.string() + "' for writing");
    out << text;
    out.flush();
    if (!out) throw std::ios_base::failure("failed writing '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

OfflineModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot open model file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return model_from_string(ss.str());
}

}  // namespace pnlevp
