#ifndef KF_VERIFY_HPP
#define KF_VERIFY_HPP

// Verification pipelines behind the frobenius-verify tool: spec-file
// ingestion, per-sample residual tables, verdicts and JSON reports.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "kf/catalog.hpp"
#include "kf/expr.hpp"
#include "kf/frobenius.hpp"
#include "kf/theta.hpp"

namespace kf::verify {

using json = nlohmann::ordered_json;
using kahler::CMatrix;

inline constexpr const char* tool_version = "1.0.0";
inline constexpr std::uint64_t default_seed = 20240917;
inline constexpr const char* seed_env_var = "FROBENIUS_VERIFY_SEED";

enum class ExitCode : int { ok = 0, mismatch = 1, input_error = 2, numeric_error = 3 };

struct Box {
  std::vector<std::pair<double, double>> re;
  std::vector<std::pair<double, double>> im;
};

struct ManifoldSpec {
  std::string name;
  int dim = 0;
  std::string potential_text;
  expr::PotentialExpr potential{expr::constant(0.0), 1};
  Box domain;
  std::optional<catalog::Lattice> lattice;
  std::optional<catalog::GroupAction> group;
  std::optional<catalog::ExpectedClass> expected_class;
};

// Throws InputError (structure) or ParseError (potential text).
ManifoldSpec parse_spec(const nlohmann::json& doc);
json spec_to_json(const ManifoldSpec& spec);

// Spec-file form of a catalog entry; default domain [-1, 1] per coordinate.
// Throws InputError for metadata-only entries.
ManifoldSpec spec_from_catalog(const catalog::CatalogEntry& entry);

struct Tolerances {
  double structural = 1e-9;
  double fd = 1e-4;
  double theta = 1e-8;
  double multiplicativity = 1e-7;

  // Throws InputError for an unknown name or a non-positive value.
  void set(const std::string& name, double value);
  json to_json() const;
};

struct Config {
  std::uint64_t seed = default_seed;
  int samples = 64;
  std::vector<double> lambda_grid = frobenius::default_lambda_grid();
  int radius = theta::default_radius;
  Tolerances tolerances;
  unsigned threads = 0;  // 0: hardware concurrency
};

// Seed from FROBENIUS_VERIFY_SEED when set, otherwise default_seed.
std::uint64_t seed_from_environment();

// Sample points in the domain box: shifted Kronecker sequence.
std::vector<std::vector<cplx>> sample_points(const Box& box, int count, std::uint64_t seed);

struct PencilRow {
  double lambda = 0.0;
  double curvature = 0.0;
  double he_trace = 0.0;
};

struct SampleResult {
  int index = 0;
  std::vector<cplx> point;
  std::optional<std::string> error;

  double closure = 0.0;
  double rank3_symmetry = 0.0;
  double max_curvature = 0.0;
  double wdvv = 0.0;
  double associator = 0.0;
  double commutator = 0.0;
  double frobenius_compat = 0.0;
  bool unit_exists = false;
  std::vector<PencilRow> pencil;
  double he_trace = 0.0;
  double ricci_hermiticity = 0.0;
  // |K_1 + Ricci g^{-1}|: K_1 the frobenius-side trace endomorphism at lambda = 1.
  double ricci_agreement = 0.0;
  // Relative gap between the jet metric and a central-difference metric.
  double fd_metric = 0.0;
  double condition = 0.0;
};

// Residual table at one point. Numeric failures are recorded in `error`.
SampleResult evaluate_sample(const expr::PotentialExpr& phi, std::span<const cplx> point,
                             const std::vector<double>& lambda_grid, int index = 0);

struct GroupVerdict {
  bool present = false;
  bool valid = true;
  bool free = true;
  bool translation_free = true;
  bool isometric = true;
  std::size_t order = 1;
  std::optional<std::size_t> fixing_element;
  std::vector<cplx> fixed_point;
};

GroupVerdict check_group(const catalog::GroupAction& action);

enum class Verdict { frobenius, pre_frobenius, not_frobenius, error };
std::string_view to_string(Verdict v);

struct Report {
  std::string spec_name;
  std::vector<SampleResult> samples;
  GroupVerdict group;
  Verdict verdict = Verdict::error;
  std::vector<std::string> reasons;
};

Report run_verify(const ManifoldSpec& spec, const Config& config);
json report_to_json(const Report& report, const Config& config);
std::string report_to_text(const Report& report);

// Verdict the catalog expects for a computational entry.
Verdict expected_verdict(const catalog::CatalogEntry& entry);
// Verdict implied by a spec file's expected_class.
std::optional<Verdict> expected_verdict(const ManifoldSpec& spec);

struct CatalogRun {
  json report;
  bool all_expected = true;
  int entries = 0;
};

// "all" selects every entry, "surfaces" the eight classified surfaces; any
// other filter selects names containing it.
std::vector<catalog::CatalogEntry> filter_catalog(const std::string& filter);
CatalogRun run_catalog(const std::string& filter, const Config& config);

struct ThetaParams {
  CMatrix tau = CMatrix::Constant(1, 1, cplx{0.0, 1.0});
  int level = 2;
  int samples = 0;  // 0: 8 s^g
  int points = 20;
};

struct ThetaRun {
  json report;
  bool pass = false;
};

// Throws InputError for an invalid tau or level.
ThetaRun run_theta(const ThetaParams& params, const Config& config);

}  // namespace kf::verify

#endif  // KF_VERIFY_HPP
