#include "zeno/model_io.hpp"

#include <fstream>
#include <sstream>

#include "zeno/error.hpp"

namespace zeno {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& why) {
  throw Error(ErrorKind::ParseError, "model field '" + field + "': " + why);
}

double number(const json& j, const std::string& field) {
  if (!j.is_number()) fail(field, "expected a number");
  return j.get<double>();
}

const json& member(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) fail(key, "missing");
  return *it;
}

Complex complex_pair(const json& j, const std::string& field) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2) fail(field, "expected [re, im]");
  return {number(j[0], field + "[0]"), number(j[1], field + "[1]")};
}

json pair(Complex z) { return json::array({z.real(), z.imag()}); }

}  // namespace

ModelDescriptor parse_model(const json& j) {
  if (!j.is_object()) fail("<root>", "expected an object");
  const json& type = member(j, "type");
  if (!type.is_string()) fail("type", "expected a string");
  const std::string t = type.get<std::string>();

  ModelDescriptor out;
  try {
    if (t == "two_level") {
      TwoLevelModel m{number(member(j, "omega"), "omega"), number(member(j, "delta"), "delta")};
      if (m.omega < 0.0) fail("omega", "must be >= 0");
      build_generic(m);
      out = m;
    } else if (t == "continuum") {
      const json& om = member(j, "omegas");
      const json& cp = member(j, "couplings");
      if (!om.is_array()) fail("omegas", "expected an array");
      if (!cp.is_array()) fail("couplings", "expected an array");
      if (cp.empty()) fail("couplings", "must not be empty");
      if (om.size() != cp.size()) fail("couplings", "length differs from omegas");
      ContinuumModel m;
      for (std::size_t i = 0; i < om.size(); ++i) {
        m.omegas.push_back(number(om[i], "omegas[" + std::to_string(i) + "]"));
        m.couplings.push_back(complex_pair(cp[i], "couplings[" + std::to_string(i) + "]"));
      }
      build_generic(m);
      out = std::move(m);
    } else if (t == "generic") {
      const json& rows = member(j, "matrix");
      if (!rows.is_array() || rows.empty()) fail("matrix", "expected a non-empty array of rows");
      const std::size_t n = rows.size();
      std::vector<Complex> entries;
      entries.reserve(n * n);
      for (std::size_t i = 0; i < n; ++i) {
        if (!rows[i].is_array() || rows[i].size() != n) fail("matrix", "must be square");
        for (std::size_t k = 0; k < n; ++k)
          entries.push_back(complex_pair(rows[i][k], "matrix[" + std::to_string(i) + "][" + std::to_string(k) + "]"));
      }
      std::size_t index = 0;
      if (auto it = j.find("initial_index"); it != j.end()) {
        if (!it->is_number_unsigned()) fail("initial_index", "expected a non-negative integer");
        index = it->get<std::size_t>();
      }
      out = GenericModel(ComplexMatrix(n, n, std::move(entries)), index);
    } else {
      fail("type", "unknown model type '" + t + "'");
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ParseError) throw;
    throw Error(ErrorKind::ParseError, e.what());
  }
  return out;
}

ModelDescriptor load_model_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open model file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::ParseError, path.string() + ": " + e.what());
  }
  return parse_model(j);
}

json model_to_json(const ModelDescriptor& model) {
  return std::visit(
      [](const auto& m) -> json {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, TwoLevelModel>) {
          return {{"type", "two_level"}, {"omega", m.omega}, {"delta", m.delta}};
        } else if constexpr (std::is_same_v<T, ContinuumModel>) {
          json cp = json::array();
          for (const auto& v : m.couplings) cp.push_back(pair(v));
          return {{"type", "continuum"}, {"omegas", m.omegas}, {"couplings", cp}};
        } else {
          const auto& h = m.hamiltonian();
          json rows = json::array();
          for (std::size_t i = 0; i < h.rows(); ++i) {
            json row = json::array();
            for (std::size_t k = 0; k < h.cols(); ++k) row.push_back(pair(h(i, k)));
            rows.push_back(row);
          }
          return {{"type", "generic"}, {"matrix", rows}, {"initial_index", m.initial_index()}};
        }
      },
      model);
}

json to_json(const ModelSummary& s) {
  return {{"dim", s.dim}, {"delta_h_ee", s.delta_h_ee}, {"omega_bar", s.omega_bar}, {"h_ee_shift", s.h_ee_shift}};
}

ModelSummary summary_from_json(const json& j) {
  return {j.at("dim").get<std::size_t>(), j.at("delta_h_ee").get<double>(), j.at("omega_bar").get<double>(),
          j.at("h_ee_shift").get<double>()};
}

json to_json(const ValidityMargin& m) {
  return {{"margin", m.margin}, {"tau_omega_bar", m.tau_omega_bar}};
}

json to_json(const EstimationResult& r) {
  json j = {{"n_phi_hat", r.n_phi_hat},
            {"phi_hat", r.phi_hat},
            {"delta_h_hat", r.delta_h_hat},
            {"survived_rounds", r.survived_rounds},
            {"total_rounds", r.total_rounds},
            {"minus_rounds", r.minus_rounds},
            {"ci95_delta_h", json::array({r.ci95_delta_h.lower, r.ci95_delta_h.upper})},
            {"n_used", r.n_used},
            {"degenerate", r.degenerate},
            {"converged", r.converged},
            {"schedule", r.schedule}};
  if (r.derived) j["derived"] = {{"name", r.derived->name}, {"value", r.derived->value}};
  else j["derived"] = nullptr;
  return j;
}

EstimationResult estimation_from_json(const json& j) {
  EstimationResult r;
  r.n_phi_hat = j.at("n_phi_hat").get<double>();
  r.phi_hat = j.at("phi_hat").get<double>();
  r.delta_h_hat = j.at("delta_h_hat").get<double>();
  r.survived_rounds = j.at("survived_rounds").get<std::size_t>();
  r.total_rounds = j.at("total_rounds").get<std::size_t>();
  r.minus_rounds = j.at("minus_rounds").get<std::size_t>();
  r.ci95_delta_h = {j.at("ci95_delta_h").at(0).get<double>(), j.at("ci95_delta_h").at(1).get<double>()};
  r.n_used = j.at("n_used").get<double>();
  r.degenerate = j.at("degenerate").get<bool>();
  r.converged = j.at("converged").get<bool>();
  r.schedule = j.at("schedule").get<std::vector<double>>();
  if (const auto& d = j.at("derived"); !d.is_null())
    r.derived = DerivedCoupling{d.at("name").get<std::string>(), d.at("value").get<double>()};
  return r;
}

}  // namespace zeno
