// frobenius-verify: check Kähler potentials, catalog entries and theta
// functions, emitting deterministic JSON reports.
//
//   frobenius-verify verify spec.json [--samples N] [--seed S] [--tolerance name=value]...
//   frobenius-verify catalog [--catalog filter] [--export name]
//   frobenius-verify theta [--tau JSON] [--level s]
//
// Exit codes: 0 all as expected, 1 verdict mismatch, 2 input error,
// 3 numeric error.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "kf/errors.hpp"
#include "kf/verify.hpp"

namespace {

using kf::verify::ExitCode;
using kf::verify::json;

int code(ExitCode c) { return static_cast<int>(c); }

std::vector<double> parse_grid(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw kf::InputError("bad lambda grid entry '" + item + "'");
    }
  }
  if (out.empty()) throw kf::InputError("lambda grid is empty");
  return out;
}

kf::verify::CMatrix parse_tau(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw kf::InputError(std::string("tau is not valid JSON: ") + e.what());
  }
  if (!doc.is_array() || doc.empty()) throw kf::InputError("tau must be a non-empty matrix");
  const auto g = static_cast<Eigen::Index>(doc.size());
  kf::verify::CMatrix tau(g, g);
  for (Eigen::Index r = 0; r < g; ++r) {
    if (!doc[r].is_array() || static_cast<Eigen::Index>(doc[r].size()) != g)
      throw kf::InputError("tau must be square");
    for (Eigen::Index c = 0; c < g; ++c) {
      const auto& e = doc[r][c];
      if (e.is_number()) tau(r, c) = e.get<double>();
      else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number())
        tau(r, c) = {e[0].get<double>(), e[1].get<double>()};
      else throw kf::InputError("tau entries must be numbers or [re, im] pairs");
    }
  }
  return tau;
}

void emit(const json& j, bool text, const std::string& text_form) {
  if (text) std::cout << text_form;
  else std::cout << j.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verify Kähler-Frobenius structures on sampled charts"};
  app.require_subcommand(1);

  kf::verify::Config config;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> tolerances;
  std::string lambda_grid;
  bool as_text = false;
  int samples = config.samples;
  int radius = config.radius;
  unsigned threads = 0;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--seed", seed, "sampling seed (overrides FROBENIUS_VERIFY_SEED)");
    sub->add_option("--samples", samples, "sample points per chart")->check(CLI::PositiveNumber);
    sub->add_option("--tolerance", tolerances, "override a tolerance: structural, fd, theta, multiplicativity")
        ->type_name("NAME=VALUE");
    sub->add_option("--lambda-grid", lambda_grid, "comma-separated pencil parameters");
    sub->add_option("--radius", radius, "theta truncation radius")->check(CLI::PositiveNumber);
    sub->add_option("--threads", threads, "worker threads (0: all cores)");
    auto* json_flag = sub->add_flag("--json", "JSON report (default)");
    sub->add_flag("--text", as_text, "human-readable summary")->excludes(json_flag);
  };

  std::string spec_path;
  auto* verify = app.add_subcommand("verify", "verify a manifold spec file");
  verify->add_option("spec", spec_path, "spec file (JSON)")->required();
  common(verify);

  std::string filter = "all";
  std::string export_name;
  auto* catalog = app.add_subcommand("catalog", "verify catalog entries");
  catalog->add_option("--catalog,--filter", filter, "'all', 'surfaces', or a name substring");
  catalog->add_option("--export", export_name, "print the spec file of one entry and exit");
  common(catalog);

  std::string tau_text = "[[[0, 1]]]";
  kf::verify::ThetaParams theta_params;
  auto* theta = app.add_subcommand("theta", "theta-function checks");
  theta->add_option("--tau", tau_text, "period matrix as JSON, entries [re, im]");
  theta->add_option("--level", theta_params.level, "level s")->check(CLI::Range(1, 4));
  theta->add_option("--points", theta_params.points, "points for the residual checks")->check(CLI::PositiveNumber);
  common(theta);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : code(ExitCode::input_error);
  }

  try {
    config.seed = seed ? *seed : kf::verify::seed_from_environment();
    config.samples = samples;
    config.radius = radius;
    config.threads = threads;
    if (!lambda_grid.empty()) config.lambda_grid = parse_grid(lambda_grid);
    for (const auto& t : tolerances) {
      const auto eq = t.find('=');
      if (eq == std::string::npos) throw kf::InputError("tolerance must be NAME=VALUE, got '" + t + "'");
      double value = 0.0;
      try {
        value = std::stod(t.substr(eq + 1));
      } catch (const std::exception&) {
        throw kf::InputError("bad tolerance value in '" + t + "'");
      }
      config.tolerances.set(t.substr(0, eq), value);
    }

    if (*verify) {
      std::ifstream in(spec_path);
      if (!in) throw kf::InputError("cannot open " + spec_path);
      nlohmann::json doc;
      try {
        doc = nlohmann::json::parse(in);
      } catch (const nlohmann::json::parse_error& e) {
        throw kf::InputError(std::string("spec is not valid JSON: ") + e.what());
      }
      const auto spec = kf::verify::parse_spec(doc);
      const auto report = kf::verify::run_verify(spec, config);
      emit(kf::verify::report_to_json(report, config), as_text, kf::verify::report_to_text(report));
      if (report.verdict == kf::verify::Verdict::error) return code(ExitCode::numeric_error);
      const auto want = kf::verify::expected_verdict(spec);
      return want && *want != report.verdict ? code(ExitCode::mismatch) : code(ExitCode::ok);
    }

    if (*catalog) {
      if (!export_name.empty()) {
        for (const auto& e : kf::catalog::full_catalog())
          if (e.name == export_name) {
            std::cout << kf::verify::spec_to_json(kf::verify::spec_from_catalog(e)).dump(2) << "\n";
            return code(ExitCode::ok);
          }
        throw kf::InputError("no catalog entry named '" + export_name + "'");
      }
      const auto run = kf::verify::run_catalog(filter, config);
      std::ostringstream text;
      for (const auto& row : run.report["entries"]) {
        text << row["name"].get<std::string>() << ": " << (row["match"].get<bool>() ? "as expected" : "MISMATCH");
        if (row.contains("report")) text << " (" << row["report"]["verdict"].get<std::string>() << ")";
        text << "\n";
      }
      emit(run.report, as_text, text.str());
      return run.all_expected ? code(ExitCode::ok) : code(ExitCode::mismatch);
    }

    theta_params.tau = parse_tau(tau_text);
    theta_params.samples = samples == kf::verify::Config{}.samples ? 0 : samples;
    const auto run = kf::verify::run_theta(theta_params, config);
    emit(run.report, as_text, "theta: " + run.report["verdict"].get<std::string>() + "\n");
    return run.pass ? code(ExitCode::ok) : code(ExitCode::mismatch);
  } catch (const kf::ParseError& e) {
    std::cerr << "parse error at [" << e.span().start << ", " << e.span().end << "): " << e.what() << "\n";
    return code(ExitCode::input_error);
  } catch (const kf::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return code(ExitCode::input_error);
  } catch (const std::exception& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return code(ExitCode::numeric_error);
  }
}
