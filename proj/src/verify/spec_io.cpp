#include <cmath>
#include <cstdlib>
#include <string>

#include "kf/errors.hpp"
#include "kf/verify.hpp"

namespace kf::verify {
namespace {

[[noreturn]] void bad(const std::string& what) { throw InputError("spec: " + what); }

double number(const nlohmann::json& j, const std::string& where) {
  if (!j.is_number()) bad(where + " must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) bad(where + " must be finite");
  return v;
}

// [re, im] or a bare real number.
cplx complex_value(const nlohmann::json& j, const std::string& where) {
  if (j.is_number()) return number(j, where);
  if (!j.is_array() || j.size() != 2) bad(where + " must be a [re, im] pair");
  return {number(j[0], where), number(j[1], where)};
}

std::vector<cplx> complex_vector(const nlohmann::json& j, std::size_t n, const std::string& where) {
  if (!j.is_array() || j.size() != n) bad(where + " must have " + std::to_string(n) + " entries");
  std::vector<cplx> v;
  for (std::size_t k = 0; k < n; ++k) v.push_back(complex_value(j[k], where));
  return v;
}

CMatrix complex_matrix(const nlohmann::json& j, int n, const std::string& where) {
  if (!j.is_array() || j.size() != static_cast<std::size_t>(n)) bad(where + " must have " + std::to_string(n) + " rows");
  CMatrix m(n, n);
  for (int r = 0; r < n; ++r) {
    const auto row = complex_vector(j[r], n, where);
    for (int c = 0; c < n; ++c) m(r, c) = row[c];
  }
  return m;
}

std::vector<std::pair<double, double>> ranges(const nlohmann::json& j, int n, const std::string& where) {
  if (!j.is_array() || j.size() != static_cast<std::size_t>(n)) bad(where + " needs one [lo, hi] per coordinate");
  std::vector<std::pair<double, double>> out;
  for (const auto& r : j) {
    if (!r.is_array() || r.size() != 2) bad(where + " entries must be [lo, hi]");
    const double lo = number(r[0], where), hi = number(r[1], where);
    if (!(lo < hi)) bad(where + " has an empty range");
    out.emplace_back(lo, hi);
  }
  return out;
}

json complex_json(cplx c) { return json::array({c.real(), c.imag()}); }

json vector_json(const std::vector<cplx>& v) {
  json a = json::array();
  for (const auto& c : v) a.push_back(complex_json(c));
  return a;
}

json ranges_json(const std::vector<std::pair<double, double>>& r) {
  json a = json::array();
  for (const auto& [lo, hi] : r) a.push_back(json::array({lo, hi}));
  return a;
}

}  // namespace

ManifoldSpec parse_spec(const nlohmann::json& doc) {
  if (!doc.is_object()) bad("top level must be an object");
  ManifoldSpec s;
  if (!doc.contains("name") || !doc["name"].is_string()) bad("missing string field 'name'");
  s.name = doc["name"].get<std::string>();
  if (!doc.contains("dim") || !doc["dim"].is_number_integer()) bad("missing integer field 'dim'");
  s.dim = doc["dim"].get<int>();
  if (s.dim < 1 || s.dim > 12) bad("dim must be between 1 and 12");
  if (!doc.contains("potential") || !doc["potential"].is_string()) bad("missing string field 'potential'");
  s.potential_text = doc["potential"].get<std::string>();
  s.potential = expr::parse(s.potential_text, s.dim);

  if (doc.contains("sample_domain")) {
    const auto& d = doc["sample_domain"];
    if (!d.is_object() || !d.contains("re") || !d.contains("im")) bad("sample_domain needs 're' and 'im'");
    s.domain.re = ranges(d["re"], s.dim, "sample_domain.re");
    s.domain.im = ranges(d["im"], s.dim, "sample_domain.im");
  } else {
    s.domain.re.assign(s.dim, {-1.0, 1.0});
    s.domain.im.assign(s.dim, {-1.0, 1.0});
  }

  if (doc.contains("lattice")) {
    const auto& l = doc["lattice"];
    if (!l.is_object() || !l.contains("generators") || !l["generators"].is_array())
      bad("lattice needs a 'generators' array");
    catalog::Lattice lat;
    lat.dim = s.dim;
    for (const auto& g : l["generators"]) lat.generators.push_back(complex_vector(g, s.dim, "lattice generator"));
    lat.validate();
    s.lattice = lat;
  }

  if (doc.contains("group")) {
    if (!s.lattice) bad("group given without a lattice");
    const auto& g = doc["group"];
    if (!g.is_object() || !g.contains("elements") || !g["elements"].is_array() || g["elements"].empty())
      bad("group needs a non-empty 'elements' array");
    catalog::GroupAction action;
    action.lattice = *s.lattice;
    action.name = s.name;
    for (const auto& e : g["elements"]) {
      if (!e.is_object() || !e.contains("A") || !e.contains("t")) bad("group elements need 'A' and 't'");
      action.elements.push_back({complex_matrix(e["A"], s.dim, "group element A"),
                                 complex_vector(e["t"], s.dim, "group element t")});
    }
    s.group = std::move(action);
  }

  if (doc.contains("expected_class")) {
    if (!doc["expected_class"].is_string()) bad("expected_class must be a string");
    const auto cls = catalog::expected_class_from_string(doc["expected_class"].get<std::string>());
    if (!cls) bad("unknown expected_class '" + doc["expected_class"].get<std::string>() + "'");
    s.expected_class = cls;
  }
  return s;
}

json spec_to_json(const ManifoldSpec& spec) {
  json j;
  j["name"] = spec.name;
  j["dim"] = spec.dim;
  j["potential"] = spec.potential_text;
  j["sample_domain"] = {{"re", ranges_json(spec.domain.re)}, {"im", ranges_json(spec.domain.im)}};
  if (spec.lattice) {
    json gens = json::array();
    for (const auto& g : spec.lattice->generators) gens.push_back(vector_json(g));
    j["lattice"] = {{"generators", gens}};
  }
  if (spec.group) {
    json elems = json::array();
    for (const auto& e : spec.group->elements) {
      json rows = json::array();
      for (Eigen::Index r = 0; r < e.A.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < e.A.cols(); ++c) row.push_back(complex_json(e.A(r, c)));
        rows.push_back(row);
      }
      elems.push_back({{"A", rows}, {"t", vector_json(e.t)}});
    }
    j["group"] = {{"elements", elems}};
  }
  if (spec.expected_class) j["expected_class"] = std::string(catalog::to_string(*spec.expected_class));
  return j;
}

ManifoldSpec spec_from_catalog(const catalog::CatalogEntry& entry) {
  if (entry.metadata_only || !entry.potential)
    throw InputError("catalog entry '" + entry.name + "' carries no potential data");
  ManifoldSpec s;
  s.name = entry.name;
  s.dim = entry.dim;
  s.potential_text = expr::print(*entry.potential);
  s.potential = *entry.potential;
  s.domain.re.assign(s.dim, {-1.0, 1.0});
  s.domain.im.assign(s.dim, {-1.0, 1.0});
  s.lattice = entry.lattice;
  s.group = entry.action;
  s.expected_class = entry.expected_class;
  return s;
}

void Tolerances::set(const std::string& name, double value) {
  if (!(value > 0.0) || !std::isfinite(value)) throw InputError("tolerance '" + name + "' must be positive");
  if (name == "structural") structural = value;
  else if (name == "fd") fd = value;
  else if (name == "theta") theta = value;
  else if (name == "multiplicativity") multiplicativity = value;
  else throw InputError("unknown tolerance '" + name + "'");
}

json Tolerances::to_json() const {
  return {{"structural", structural}, {"fd", fd}, {"theta", theta}, {"multiplicativity", multiplicativity}};
}

std::uint64_t seed_from_environment() {
  const char* env = std::getenv(seed_env_var);
  if (!env || !*env) return default_seed;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (*end != '\0' || env[0] == '-') throw InputError(std::string(seed_env_var) + " must be a non-negative integer");
  return v;
}

}  // namespace kf::verify
