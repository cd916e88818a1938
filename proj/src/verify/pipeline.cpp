#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <sstream>
#include <thread>

#include "kf/errors.hpp"
#include "kf/kahler.hpp"
#include "kf/random.hpp"
#include "kf/verify.hpp"
#include "kf/wirtinger.hpp"

namespace kf::verify {
namespace {

constexpr const char* disclaimer =
    "Checks are chart-local: residuals hold at the sampled points of the given chart. "
    "Compactness and global structure are not verified.";

// Runs body(i) for i in [0, count) on a small pool; each index is written by
// exactly one worker, so results land in index order.
void parallel_for(int count, unsigned threads, const std::function<void(int)>& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max(count, 1)));
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::jthread> pool;
  for (unsigned t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) body(i);
    });
}

double potential_value(const expr::PotentialExpr& phi, const std::vector<cplx>& z) {
  return expr::eval_point(phi, z).real();
}

// g_{a bbar} from central differences of Phi in the real coordinates:
//   d_a dbar_b = (D_xa D_xb + D_ya D_yb + i (D_xa D_yb - D_ya D_xb)) / 4.
double fd_metric_gap(const expr::PotentialExpr& phi, std::span<const cplx> point, const CMatrix& g) {
  constexpr double h = 1e-4;
  const int n = static_cast<int>(point.size());
  const std::vector<cplx> base(point.begin(), point.end());
  auto dir = [](int k, bool imag) { return std::pair{k, imag ? cplx{0.0, 1.0} : cplx{1.0, 0.0}}; };
  auto mixed = [&](std::pair<int, cplx> u, std::pair<int, cplx> v) {
    double acc = 0.0;
    for (int su : {1, -1})
      for (int sv : {1, -1}) {
        auto z = base;
        z[u.first] += static_cast<double>(su) * h * u.second;
        z[v.first] += static_cast<double>(sv) * h * v.second;
        acc += su * sv * potential_value(phi, z);
      }
    return acc / (4.0 * h * h);
  };
  double gap = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const double xx = mixed(dir(a, false), dir(b, false));
      const double yy = mixed(dir(a, true), dir(b, true));
      const double xy = mixed(dir(a, false), dir(b, true));
      const double yx = mixed(dir(a, true), dir(b, false));
      const cplx fd = cplx{xx + yy, xy - yx} / 4.0;
      gap = std::max(gap, std::abs(fd - g(a, b)));
    }
  return gap / std::max(1.0, kahler::max_abs(g));
}

json complex_json(cplx c) { return json::array({c.real(), c.imag()}); }

json point_json(const std::vector<cplx>& p) {
  json a = json::array();
  for (const auto& c : p) a.push_back(complex_json(c));
  return a;
}

json sample_json(const SampleResult& s) {
  json j;
  j["index"] = s.index;
  j["point"] = point_json(s.point);
  if (s.error) {
    j["error"] = *s.error;
    return j;
  }
  j["kahler_closure"] = s.closure;
  j["kahler_rank3_symmetry"] = s.rank3_symmetry;
  j["max_curvature"] = s.max_curvature;
  j["wdvv"] = s.wdvv;
  j["associator"] = s.associator;
  j["commutator"] = s.commutator;
  j["frobenius_compat"] = s.frobenius_compat;
  j["unit_exists"] = s.unit_exists;
  json pencil = json::array();
  for (const auto& row : s.pencil)
    pencil.push_back({{"lambda", row.lambda}, {"curvature", row.curvature}, {"he_trace", row.he_trace}});
  j["pencil"] = pencil;
  j["he_trace"] = s.he_trace;
  j["ricci_hermiticity"] = s.ricci_hermiticity;
  j["ricci_agreement"] = s.ricci_agreement;
  j["fd_metric"] = s.fd_metric;
  j["condition"] = s.condition;
  return j;
}

struct Maxima {
  double closure = 0, rank3 = 0, curvature = 0, wdvv = 0, associator = 0, commutator = 0, compat = 0;
  double pencil = 0, he = 0, ricci_herm = 0, ricci_agree = 0, fd = 0;
  int errors = 0;
};

Maxima maxima(const std::vector<SampleResult>& samples) {
  Maxima m;
  for (const auto& s : samples) {
    if (s.error) {
      ++m.errors;
      continue;
    }
    m.closure = std::max(m.closure, s.closure);
    m.rank3 = std::max(m.rank3, s.rank3_symmetry);
    m.curvature = std::max(m.curvature, s.max_curvature);
    m.wdvv = std::max(m.wdvv, s.wdvv);
    m.associator = std::max(m.associator, s.associator);
    m.commutator = std::max(m.commutator, s.commutator);
    m.compat = std::max(m.compat, s.frobenius_compat);
    for (const auto& row : s.pencil) m.pencil = std::max(m.pencil, row.curvature);
    m.he = std::max(m.he, s.he_trace);
    m.ricci_herm = std::max(m.ricci_herm, s.ricci_hermiticity);
    m.ricci_agree = std::max(m.ricci_agree, s.ricci_agreement);
    m.fd = std::max(m.fd, s.fd_metric);
  }
  return m;
}

}  // namespace

std::vector<std::vector<cplx>> sample_points(const Box& box, int count, std::uint64_t seed) {
  const int n = static_cast<int>(box.re.size());
  KroneckerSequence seq(2 * n, seed);
  std::vector<std::vector<cplx>> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    const auto p = seq.point(static_cast<std::uint64_t>(i));
    std::vector<cplx> z(n);
    for (int k = 0; k < n; ++k) {
      const auto [rlo, rhi] = box.re[k];
      const auto [ilo, ihi] = box.im[k];
      z[k] = {rlo + (rhi - rlo) * p[k], ilo + (ihi - ilo) * p[n + k]};
    }
    out.push_back(std::move(z));
  }
  return out;
}

SampleResult evaluate_sample(const expr::PotentialExpr& phi, std::span<const cplx> point,
                             const std::vector<double>& lambda_grid, int index) {
  SampleResult s;
  s.index = index;
  s.point.assign(point.begin(), point.end());
  try {
    const auto jet = wirtinger::jet_eval(phi, point);
    const auto md = kahler::metric_from_jet(jet, kahler::ChartPoint{s.point});
    const auto kr = kahler::kahler_residuals(md, jet);
    s.closure = kr.closure;
    s.rank3_symmetry = kr.rank3_symmetry;
    s.max_curvature = md.curvature.max_abs();
    s.wdvv = kahler::wdvv_residual_at(md);

    const auto [hol, anti] = frobenius::fiber_algebra_from_metric(md);
    s.associator = std::max(frobenius::associator(hol), frobenius::associator(anti));
    s.commutator = std::max(frobenius::commutator(hol), frobenius::commutator(anti));
    s.frobenius_compat = frobenius::frobenius_compat(frobenius::direct_sum_algebra(md));
    s.unit_exists = hol.unit.has_value();

    for (double lambda : lambda_grid) {
      const auto ps = frobenius::pencil_curvature(md, lambda);
      s.pencil.push_back({lambda, ps.curvature_norm, ps.trace_norm});
      s.he_trace = std::max(s.he_trace, ps.trace_norm);
    }
    s.ricci_hermiticity = kahler::ricci_c1_check(md).hermiticity;
    s.ricci_agreement = kahler::max_abs(frobenius::hermitian_einstein_endomorphism(md, 1.0) + md.ricci * md.g_inv);
    s.fd_metric = fd_metric_gap(phi, point, md.g);
    s.condition = md.condition;
  } catch (const std::exception& e) {
    s.error = e.what();
  }
  return s;
}

GroupVerdict check_group(const catalog::GroupAction& action) {
  GroupVerdict v;
  v.present = true;
  v.order = action.elements.size();
  v.valid = catalog::validate_group(action).valid();
  try {
    const auto fr = catalog::is_free(action);
    v.free = fr.free;
    v.fixing_element = fr.element;
    v.fixed_point = fr.witness;
  } catch (const InputError&) {
    v.free = false;
    v.valid = false;
  }
  v.translation_free = !catalog::contains_translations(action);
  double iso = 0.0;
  for (const auto& g : action.elements) {
    const auto n = g.A.rows();
    iso = std::max(iso, kahler::max_abs(g.A.adjoint() * g.A - CMatrix::Identity(n, n)));
  }
  v.isometric = iso <= 1e-12;
  return v;
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::frobenius:
      return "frobenius";
    case Verdict::pre_frobenius:
      return "pre-frobenius";
    case Verdict::not_frobenius:
      return "not-frobenius";
    case Verdict::error:
      break;
  }
  return "error";
}

Report run_verify(const ManifoldSpec& spec, const Config& config) {
  if (config.samples < 1) throw InputError("sample count must be positive");
  Report r;
  r.spec_name = spec.name;
  const auto points = sample_points(spec.domain, config.samples, config.seed);
  r.samples.resize(points.size());
  parallel_for(static_cast<int>(points.size()), config.threads, [&](int i) {
    r.samples[i] = evaluate_sample(spec.potential, points[i], config.lambda_grid, i);
  });
  if (spec.group) r.group = check_group(*spec.group);

  const auto m = maxima(r.samples);
  const auto& tol = config.tolerances;
  std::vector<std::string> hard, soft, numeric;
  if (m.errors > 0) numeric.push_back(std::to_string(m.errors) + " sample(s) failed to evaluate");
  if (m.fd > tol.fd) numeric.push_back("finite-difference metric disagrees with the jet metric");
  if (m.ricci_agree > tol.structural) numeric.push_back("Ricci contractions disagree");
  if (std::max(m.closure, m.rank3) > tol.structural) hard.push_back("Kähler symmetry residual above tolerance");
  if (m.ricci_herm > tol.structural) hard.push_back("Ricci form not hermitian");
  if (m.curvature > tol.structural) hard.push_back("curvature does not vanish");
  if (m.wdvv > tol.structural) hard.push_back("WDVV residual above tolerance");
  if (std::max(m.commutator, m.compat) > tol.structural) hard.push_back("fiber algebra not commutative Frobenius");
  if (m.he > tol.structural) hard.push_back("Hermitian-Einstein trace not proportional to identity");
  if (r.group.present) {
    if (!r.group.valid) hard.push_back("group axioms fail");
    if (!r.group.free) hard.push_back("action not free");
    if (!r.group.translation_free) hard.push_back("action contains translations");
    if (!r.group.isometric) hard.push_back("action not isometric");
  }
  if (m.associator > tol.structural) soft.push_back("associator nonzero");
  if (m.pencil > tol.structural) soft.push_back("pencil of connections not flat");

  if (!numeric.empty()) r.verdict = Verdict::error;
  else if (!hard.empty()) r.verdict = Verdict::not_frobenius;
  else if (!soft.empty()) r.verdict = Verdict::pre_frobenius;
  else r.verdict = Verdict::frobenius;
  for (auto* list : {&numeric, &hard, &soft}) r.reasons.insert(r.reasons.end(), list->begin(), list->end());
  return r;
}

json report_to_json(const Report& report, const Config& config) {
  json j;
  j["spec"] = report.spec_name;
  j["version"] = tool_version;
  j["seed"] = config.seed;
  j["tolerances"] = config.tolerances.to_json();
  j["lambda_grid"] = config.lambda_grid;
  j["disclaimer"] = disclaimer;
  json samples = json::array();
  for (const auto& s : report.samples) samples.push_back(sample_json(s));
  j["samples"] = samples;

  const auto m = maxima(report.samples);
  j["summary"] = {{"kahler_closure", m.closure},   {"kahler_rank3_symmetry", m.rank3},
                  {"max_curvature", m.curvature},  {"wdvv", m.wdvv},
                  {"associator", m.associator},    {"commutator", m.commutator},
                  {"frobenius_compat", m.compat},  {"pencil_curvature", m.pencil},
                  {"he_trace", m.he},              {"ricci_hermiticity", m.ricci_herm},
                  {"ricci_agreement", m.ricci_agree}, {"fd_metric", m.fd},
                  {"failed_samples", m.errors}};

  json g;
  g["present"] = report.group.present;
  if (report.group.present) {
    g["order"] = report.group.order;
    g["valid"] = report.group.valid;
    g["free"] = report.group.free;
    g["translation_free"] = report.group.translation_free;
    g["isometric"] = report.group.isometric;
    if (report.group.fixing_element) {
      g["fixing_element"] = *report.group.fixing_element;
      g["fixed_point"] = point_json(report.group.fixed_point);
    }
  }
  j["group"] = g;
  j["verdict"] = std::string(to_string(report.verdict));
  j["reasons"] = report.reasons;
  return j;
}

std::string report_to_text(const Report& report) {
  const auto m = maxima(report.samples);
  std::ostringstream os;
  os << report.spec_name << ": " << to_string(report.verdict) << "\n";
  os << "  samples " << report.samples.size() << " (failed " << m.errors << ")\n";
  os << "  max|R| " << m.curvature << "  wdvv " << m.wdvv << "  associator " << m.associator << "\n";
  os << "  pencil " << m.pencil << "  he-trace " << m.he << "  kahler " << std::max(m.closure, m.rank3) << "\n";
  if (report.group.present)
    os << "  group order " << report.group.order << (report.group.free ? ", free" : ", not free")
       << (report.group.translation_free ? "" : ", has translations") << "\n";
  for (const auto& reason : report.reasons) os << "  - " << reason << "\n";
  return os.str();
}

Verdict expected_verdict(const catalog::CatalogEntry& entry) {
  return entry.flags.frobenius ? Verdict::frobenius : Verdict::not_frobenius;
}

std::optional<Verdict> expected_verdict(const ManifoldSpec& spec) {
  if (!spec.expected_class) return std::nullopt;
  return *spec.expected_class == catalog::ExpectedClass::negative_control ? Verdict::not_frobenius
                                                                          : Verdict::frobenius;
}

std::vector<catalog::CatalogEntry> filter_catalog(const std::string& filter) {
  if (filter == "surfaces") return catalog::hyperelliptic_catalog();
  auto all = catalog::full_catalog();
  if (filter == "all" || filter.empty()) return all;
  std::vector<catalog::CatalogEntry> out;
  for (auto& e : all)
    if (e.name.find(filter) != std::string::npos) out.push_back(std::move(e));
  return out;
}

CatalogRun run_catalog(const std::string& filter, const Config& config) {
  const auto entries = filter_catalog(filter);
  if (entries.empty()) throw InputError("no catalog entry matches '" + filter + "'");
  CatalogRun run;
  run.entries = static_cast<int>(entries.size());

  json rows = json::array();
  for (const auto& e : entries) {
    json row;
    row["name"] = e.name;
    row["dim"] = e.dim;
    row["expected_class"] = std::string(catalog::to_string(e.expected_class));
    row["group_label"] = e.group_label;
    row["holonomy"] = e.holonomy;
    row["betti"] = e.betti;
    row["flags"] = {{"frobenius", e.flags.frobenius}, {"affine", e.flags.affine}, {"kahler", e.flags.kahler}};
    bool match = true;
    if (e.metadata_only) {
      row["metadata_only"] = true;
      if (e.hopf) {
        const auto v = catalog::hopf_affine_condition(e.hopf->a, e.hopf->b, e.hopf->c, e.hopf->m);
        row["hopf"] = {{"valid", v.valid}, {"affine", v.affine}, {"frobenius", v.frobenius}, {"kahler", false},
                       {"reason", v.reason}};
        match = v.valid && v.affine == e.flags.affine && v.frobenius == e.flags.frobenius && !e.flags.kahler;
      }
    } else {
      row["metadata_only"] = false;
      if (e.covering_action) row["covering_group_order"] = e.covering_action->elements.size();
      const auto spec = spec_from_catalog(e);
      const auto report = run_verify(spec, config);
      const auto want = expected_verdict(e);
      row["expected_verdict"] = std::string(to_string(want));
      row["report"] = report_to_json(report, config);
      match = report.verdict == want;
    }
    row["match"] = match;
    run.all_expected = run.all_expected && match;
    rows.push_back(row);
  }

  const auto counts = catalog::classification_counts();
  const bool counts_ok = counts.surfaces == 8 && counts.threefolds == 174;
  run.all_expected = run.all_expected && counts_ok;

  json j;
  j["kind"] = "catalog";
  j["filter"] = filter;
  j["version"] = tool_version;
  j["seed"] = config.seed;
  j["tolerances"] = config.tolerances.to_json();
  j["counts"] = {{"surfaces", counts.surfaces}, {"threefolds", counts.threefolds}, {"threefolds_source", "metadata"}};
  j["entries"] = rows;
  j["all_expected"] = run.all_expected;
  run.report = std::move(j);
  return run;
}

}  // namespace kf::verify
