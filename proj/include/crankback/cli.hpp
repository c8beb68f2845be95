#pragma once

#include <cstdint>
#include <cstdlib>
#include <exception>
#include <iomanip>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "crankback/crankback.hpp"

namespace crankback::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitComputation = 1;
inline constexpr int kExitUsage = 2;

// Raised for flag combinations that are rejected before any computation.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

struct ScenarioFlags {
  std::string scenario_path;
  std::optional<int> n;
  std::optional<double> hop_mean;
  std::optional<double> hop_var;
  std::optional<double> deadline;
  std::optional<double> p_tr;
  std::optional<double> hop_distance;
  std::string format = "table";

  void attach(CLI::App& app) {
    app.add_option("--scenario", scenario_path, "Scenario file (YAML)");
    app.add_option("--n", n, "Node count (hops to the end node)");
    app.add_option("--hop-mean", hop_mean, "Mean hop delay M");
    app.add_option("--hop-var", hop_var, "Hop delay variance V");
    app.add_option("--deadline", deadline, "Delay budget T");
    app.add_option("--p-tr", p_tr, "Turn-back threshold probability");
    app.add_option("--hop-distance", hop_distance, "Distance between nodes (default: hop mean)");
    app.add_option("--format", format, "Output format")
        ->check(CLI::IsMember({"table", "csv", "json"}));
  }

  // File values first, inline flags on top.
  io::ScenarioFields fields() const {
    io::ScenarioFields f;
    if (!scenario_path.empty()) f = io::read_scenario_file(scenario_path);
    auto override_with = [&](auto& dst, const auto& src, const char* key) {
      if (src) {
        dst = src;
        f.lines.erase(key);
      }
    };
    override_with(f.n, n, "n");
    override_with(f.hop_mean, hop_mean, "hop_mean");
    override_with(f.hop_var, hop_var, "hop_var");
    override_with(f.deadline, deadline, "deadline");
    override_with(f.p_tr, p_tr, "p_tr");
    override_with(f.hop_distance, hop_distance, "hop_distance");
    return f;
  }

  io::Format output_format() const { return io::format_from_string(format); }
};

struct SimFlags {
  std::optional<std::uint64_t> trials;
  std::optional<std::uint64_t> seed;
  unsigned workers = 0;

  void attach(CLI::App& app) {
    app.add_option("--trials", trials, "Monte Carlo trials");
    app.add_option("--seed", seed, "RNG seed (default: $CRANKBACK_SEED, else 0)");
    app.add_option("--workers", workers, "Worker threads (0 = all cores); never changes results");
  }

  bool any() const { return trials.has_value() || seed.has_value(); }
};

// Seed precedence: flag, then CRANKBACK_SEED, then the file, then 0.
inline std::optional<std::uint64_t> env_seed() {
  const char* env = std::getenv("CRANKBACK_SEED");
  if (env == nullptr || *env == '\0') return std::nullopt;
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(env, &used);
    if (used != std::string(env).size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw UsageError(std::string("CRANKBACK_SEED is not an unsigned integer: ") + env);
  }
}

inline SimConfig sim_config(const io::ScenarioFields& fields, const SimFlags& flags) {
  SimConfig cfg = io::build_sim_config(fields);
  if (auto s = env_seed()) cfg.seed = *s;
  if (flags.seed) cfg.seed = *flags.seed;
  if (flags.trials) {
    if (*flags.trials < 1) throw UsageError("--trials must be >= 1");
    cfg.trials = *flags.trials;
  }
  cfg.workers = flags.workers;
  return cfg;
}

inline void print_comparisons(const std::vector<Comparison>& rows, io::Format fmt,
                              std::ostream& out) {
  auto opt = [](const std::optional<double>& v) { return v ? io::fmt6(*v) : std::string("-"); };
  bool all_pass = true;
  for (const auto& r : rows) all_pass = all_pass && r.pass;

  if (fmt == io::Format::json) {
    nlohmann::json doc = {{"schema_version", io::kSchemaVersionReports},
                          {"kind", "reproduce"},
                          {"all_pass", all_pass}};
    auto& list = doc["rows"] = nlohmann::json::array();
    auto jopt = [](const std::optional<double>& v) {
      return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
    };
    for (const auto& r : rows) {
      list.push_back({{"table", r.table},
                      {"quantity", r.quantity},
                      {"ref_calculated", jopt(r.ref_calculated)},
                      {"ref_single_run", jopt(r.ref_single_run)},
                      {"analytic", r.analytic},
                      {"simulated", jopt(r.simulated)},
                      {"pass", r.pass},
                      {"failures", r.failures}});
    }
    out << doc.dump(2) << '\n';
    return;
  }
  if (fmt == io::Format::csv) {
    out << "table,quantity,ref_calculated,ref_single_run,analytic,simulated,status\n";
    for (const auto& r : rows) {
      out << r.table << ',' << r.quantity << ',' << opt(r.ref_calculated) << ','
          << opt(r.ref_single_run) << ',' << io::fmt6(r.analytic) << ',' << opt(r.simulated)
          << ',' << (r.pass ? "PASS" : "FAIL") << '\n';
    }
    return;
  }
  out << std::left << std::setw(16) << "table" << std::setw(40) << "quantity" << std::right
      << std::setw(12) << "ref-calc" << std::setw(12) << "ref-sim" << std::setw(12)
      << "analytic" << std::setw(12) << "simulated" << "  status\n";
  for (const auto& r : rows) {
    out << std::left << std::setw(16) << r.table << std::setw(40) << r.quantity << std::right
        << std::setw(12) << opt(r.ref_calculated) << std::setw(12) << opt(r.ref_single_run)
        << std::setw(12) << io::fmt6(r.analytic) << std::setw(12) << opt(r.simulated) << "  "
        << (r.pass ? "PASS" : "FAIL");
    if (!r.pass) out << " (" << r.failures << ')';
    out << '\n';
  }
  out << (all_pass ? "ALL PASS" : "SOME CHECKS FAILED") << '\n';
}

}  // namespace detail

/// Entry point behind the crankback executable. Results go to `out`,
/// diagnostics to `err`. Returns 0 on success, 2 on usage or validation
/// errors, 1 on computation errors.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Crankback routing analysis under a hard delay budget", "crankback"};
  app.require_subcommand(1);

  detail::ScenarioFlags analyze_sc, simulate_sc, optimize_sc, waste_sc;
  detail::SimFlags simulate_sim, waste_sim, reproduce_sim;

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Analytic first-return profile");
  analyze_sc.attach(*analyze);
  std::string analyze_method = "grid";
  std::optional<int> grid_points;
  std::optional<int> depth;
  std::optional<double> quad_tol;
  analyze->add_option("--method", analyze_method, "Engine")
      ->check(CLI::IsMember({"grid", "quadrature", "approx"}));
  analyze->add_option("--grid-points", grid_points, "Grid resolution (grid method)");
  analyze->add_option("--depth", depth, "Deepest node (quadrature method, default 4)");
  analyze->add_option("--tol", quad_tol, "Absolute tolerance per entry (quadrature method)");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo first-return profile");
  simulate_sc.attach(*simulate);
  simulate_sim.attach(*simulate);
  std::optional<std::string> policy;
  std::optional<double> t_tr;
  simulate->add_option("--policy", policy, "Turn-back policy")
      ->check(CLI::IsMember({"quantile", "rest-time"}));
  simulate->add_option("--t-tr", t_tr, "Residual-time threshold (rest-time policy)");

  // optimize
  auto* optimize = app.add_subcommand("optimize", "Find p_tr meeting a success target");
  optimize_sc.attach(*optimize);
  double target = 0.0;
  double opt_tol = OptimizeOptions{}.tol;
  bool clip = false;
  optimize->add_option("--target", target, "Required success probability")->required();
  optimize->add_option("--tol", opt_tol, "Tolerance on the achieved success probability");
  optimize->add_flag("--clip", clip, "Accept the nearest endpoint for unattainable targets");

  // waste
  auto* waste = app.add_subcommand("waste", "Expected wasted distance under retries");
  waste_sc.attach(*waste);
  waste_sim.attach(*waste);
  std::string profile_source = "analytic";
  std::string waste_method = "grid";
  bool empirical = false;
  waste->add_option("--profile-source", profile_source, "Where the return profile comes from")
      ->check(CLI::IsMember({"analytic", "simulated"}));
  waste->add_option("--method", waste_method, "Analytic engine")
      ->check(CLI::IsMember({"grid", "quadrature"}));
  waste->add_flag("--empirical", empirical,
                  "Simulate retries until --trials deliveries instead of using the closed form");

  // reproduce
  auto* reproduce_cmd = app.add_subcommand("reproduce", "Check the published reference tables");
  reproduce_sim.attach(*reproduce_cmd);
  std::string reproduce_format = "table";
  reproduce_cmd->add_option("--format", reproduce_format, "Output format")
      ->check(CLI::IsMember({"table", "csv", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  // Usage and validation phase: nothing has been computed yet.
  io::Format fmt = io::Format::table;
  Scenario scenario;
  SimConfig sim_cfg;
  try {
    if (analyze->parsed()) {
      if (analyze_method != "quadrature" && (depth || quad_tol)) {
        throw UsageError("--depth/--tol apply only to --method quadrature");
      }
      if (analyze_method != "grid" && grid_points) {
        throw UsageError("--grid-points applies only to --method grid");
      }
      fmt = analyze_sc.output_format();
      scenario = io::build_scenario(analyze_sc.fields());
    } else if (simulate->parsed()) {
      fmt = simulate_sc.output_format();
      io::ScenarioFields fields = simulate_sc.fields();
      if (policy || t_tr) {
        const std::string p = policy.value_or(fields.sim && fields.sim->policy ? *fields.sim->policy
                                                                               : "quantile");
        if ((p == "quantile") && t_tr) throw UsageError("--t-tr requires --policy rest-time");
        if (!fields.sim) fields.sim = io::SimFields{};
        fields.sim->policy = p == "rest-time" ? "rest_time" : p;
        if (t_tr) fields.sim->t_tr = *t_tr;
        if (fields.sim->policy == "quantile") fields.sim->t_tr.reset();
      }
      scenario = io::build_scenario(fields);
      sim_cfg = detail::sim_config(fields, simulate_sim);
    } else if (optimize->parsed()) {
      fmt = optimize_sc.output_format();
      io::ScenarioFields fields = optimize_sc.fields();
      if (!fields.p_tr) fields.p_tr = 0.5;  // not used by the search
      scenario = io::build_scenario(fields);
      if (!(target > 0.0 && target < 1.0)) {
        throw ValidationError("target", "must lie strictly inside (0,1)");
      }
      if (!(opt_tol > 0.0)) throw ValidationError("tol", "must be > 0");
    } else if (waste->parsed()) {
      fmt = waste_sc.output_format();
      if (profile_source == "simulated" && waste->count("--method") > 0) {
        throw UsageError("--method applies only to --profile-source analytic");
      }
      if (profile_source == "analytic" && !empirical && waste_sim.any()) {
        throw UsageError("--trials/--seed need --profile-source simulated or --empirical");
      }
      const io::ScenarioFields fields = waste_sc.fields();
      scenario = io::build_scenario(fields);
      sim_cfg = detail::sim_config(fields, waste_sim);
      if (empirical && !std::holds_alternative<QuantilePolicy>(sim_cfg.policy)) {
        throw UsageError("--empirical requires the quantile policy");
      }
    } else {
      fmt = io::format_from_string(reproduce_format);
      sim_cfg = detail::sim_config({}, reproduce_sim);
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ValidationError& e) {
    err << "invalid scenario: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "scenario parse error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (analyze->parsed()) {
      ReturnProfile profile;
      if (analyze_method == "grid") {
        profile = return_profile_grid(scenario, grid_points.value_or(kDefaultGridPoints));
      } else if (analyze_method == "quadrature") {
        profile = return_profile_quadrature(
            scenario, depth.value_or(std::min(kDefaultQuadratureDepth, scenario.n - 1)),
            quad_tol.value_or(kDefaultQuadratureTol));
      } else {
        profile = approx_profile(scenario);
      }
      if (profile.quality_warning) {
        err << "warning: error estimate " << profile.error_estimate << " above budget\n";
      }
      io::write_report(profile, fmt, out);
    } else if (simulate->parsed()) {
      io::write_report(simulate_profile(scenario, sim_cfg), fmt, out);
    } else if (optimize->parsed()) {
      OptimizeOptions opts;
      opts.tol = opt_tol;
      const OptimizeResult r = optimize_ptr(scenario, target, opts);
      io::write_report(r, fmt, out);
      if (r.unattainable && !clip) {
        err << "error: target " << target << " unattainable; nearest endpoint p_tr=" << r.p_tr
            << " gives " << r.achieved << " (use --clip to accept)\n";
        return kExitComputation;
      }
    } else if (waste->parsed()) {
      if (empirical) {
        io::write_report(simulate_attempts(scenario, sim_cfg), fmt, out);
      } else {
        const ReturnProfile profile =
            profile_source == "simulated"
                ? simulate_profile(scenario, sim_cfg).profile
            : waste_method == "quadrature" ? return_profile_quadrature(scenario, scenario.n - 1)
                                           : return_profile_grid(scenario);
        io::write_report(waste_report(profile, scenario.hop_distance, scenario.n), fmt, out);
      }
    } else {
      ReproduceOptions opts;
      opts.trials = sim_cfg.trials;
      opts.seed = sim_cfg.seed;
      opts.workers = sim_cfg.workers;
      const std::vector<Comparison> rows = crankback::reproduce(opts);
      detail::print_comparisons(rows, fmt, out);
      for (const auto& r : rows) {
        if (!r.pass) return kExitComputation;
      }
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitComputation;
  }
  return kExitOk;
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"crankback"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace crankback::cli
