#include <algorithm>
#include <cmath>

#include "kf/errors.hpp"
#include "kf/random.hpp"
#include "kf/verify.hpp"

namespace kf::verify {

ThetaRun run_theta(const ThetaParams& params, const Config& config) {
  const auto base = theta::make_spec(params.tau);
  const int g = base.genus();
  if (params.level < 1) throw InputError("level must be a positive integer");
  if (config.radius < 1) throw InputError("radius must be positive");
  int count = 1;
  for (int k = 0; k < g; ++k) count *= params.level;
  const int samples = params.samples > 0 ? params.samples : 8 * count;

  // Seeded points u + tau v of the fundamental domain.
  KroneckerSequence seq(2 * g, config.seed);
  std::vector<std::vector<cplx>> points;
  for (int i = 0; i < params.points; ++i) {
    const auto p = seq.point(static_cast<std::uint64_t>(i));
    points.push_back(theta::fundamental_point(params.tau, std::span(p).first(g), std::span(p).subspan(g)));
  }

  const auto& tol = config.tolerances;
  std::vector<std::string> reasons;
  json quasi = json::array();
  bool monotone = true;
  double worst_quasi = 0.0;
  for (int k = 0; k < 2 * g; ++k) {
    double worst = 0.0, tail = 0.0;
    for (const auto& z : points) {
      worst = std::max(worst, theta::quasi_periodicity_residual(base, z, k, config.radius));
      tail = std::max(tail, theta::eval_riemann_theta(base, z, config.radius).tail_bound);
      const double r20 = theta::quasi_periodicity_residual(base, z, k, 20);
      const double r40 = theta::quasi_periodicity_residual(base, z, k, 40);
      monotone = monotone && r40 <= r20 + 1e-12;
    }
    worst_quasi = std::max(worst_quasi, worst);
    quasi.push_back({{"generator", k}, {"max_residual", worst}, {"max_tail_bound", tail}});
  }
  if (worst_quasi >= tol.theta) reasons.push_back("quasi-periodicity residual above tolerance");
  if (!monotone) reasons.push_back("residual grows with the truncation radius");

  const auto shifted = theta::make_spec(params.tau, std::vector<double>(g, 0.5), std::vector<double>(g, 0.5));
  double mult = 0.0;
  for (const auto& z : points)
    for (int k = 0; k < 2 * g; ++k)
      mult = std::max(mult, theta::multiplicativity_residual(base, shifted, z, k, config.radius));
  if (mult >= tol.multiplicativity) reasons.push_back("multiplicativity residual above tolerance");

  const auto level = theta::level_space_dimension(params.tau, params.level, samples, config.seed);
  if (level.dimension != count) reasons.push_back("level-space dimension differs from s^g");

  json tau = json::array();
  for (int r = 0; r < g; ++r) {
    json row = json::array();
    for (int c = 0; c < g; ++c) row.push_back(json::array({params.tau(r, c).real(), params.tau(r, c).imag()}));
    tau.push_back(row);
  }

  ThetaRun run;
  run.pass = reasons.empty();
  json j;
  j["kind"] = "theta";
  j["version"] = tool_version;
  j["seed"] = config.seed;
  j["tolerances"] = tol.to_json();
  j["tau"] = tau;
  j["level"] = params.level;
  j["radius"] = config.radius;
  j["points"] = params.points;
  j["quasi_periodicity"] = quasi;
  j["truncation_monotone"] = monotone;
  j["multiplicativity"] = mult;
  j["level_space"] = {{"dimension", level.dimension},
                      {"expected", count},
                      {"samples", samples},
                      {"ranks", level.ranks},
                      {"singular_values", level.singular_values}};
  j["verdict"] = run.pass ? "pass" : "fail";
  j["reasons"] = reasons;
  run.report = std::move(j);
  return run;
}

}  // namespace kf::verify
