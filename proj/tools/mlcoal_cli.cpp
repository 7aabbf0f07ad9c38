// Command-line front end: simulate | limit | exact | verify | sweep.

#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mlcoal/mlcoal.hpp"

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kVerification = 2, kRuntime = 3 };

void error_record(const std::string& kind, const std::string& message) {
  nlohmann::json rec{{"error", {{"kind", kind}, {"message", message}}}};
  std::cerr << rec.dump() << '\n';
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw mlcoal::UsageError("cannot read config file " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

int main(int argc, char** argv) {
  using namespace mlcoal;
  CLI::App app{"Merging costs of Union-Find under the additive Marcus-Lushnikov coalescent"};
  app.require_subcommand(1);

  std::vector<std::string> n_raw, functionals;
  std::string embedding, format, alpha_grid, beta_grid, config_path, out, raw_out, oracle, only;
  std::uint64_t reps = 0, seed = 0, k = 0;
  double tol = 0, epsilon = 0;
  unsigned workers = 0;
  bool mutate = false;

  // Flags shared by all subcommands; their names double as config keys.
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--n", n_raw, "population size (repeatable for sweep)");
    sub->add_option("--reps", reps, "replications");
    sub->add_option("--seed", seed, "master seed");
    sub->add_option("--embedding", embedding, "direct | tree | parking");
    sub->add_option("--functional", functionals, "QF QFW QFB Prey Predator Displacement (repeatable)");
    sub->add_option("--alpha-grid", alpha_grid, "comma-separated alphas in [0,1)");
    sub->add_option("--beta-grid", beta_grid, "comma-separated betas in [0, sqrt n]");
    sub->add_option("--tol", tol, "quadrature tolerance");
    sub->add_option("--format", format, "csv | json");
    sub->add_option("--out", out, "output path (default stdout)");
    sub->add_option("--config", config_path, "flat key = value file");
    sub->add_option("--workers", workers, "replication threads; output does not depend on it");
  };
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo cost curves and totals");
  auto* limit = app.add_subcommand("limit", "deterministic limit curves phi(alpha)");
  auto* exact_cmd = app.add_subcommand(
      "exact", "exact oracles; caps: parking n<=8, trees n<=6, dp n<=20, rational p_mk m<=30");
  auto* verify = app.add_subcommand("verify", "run the acceptance suite");
  auto* sweep = app.add_subcommand("sweep", "largest-cluster regime sweep");
  for (auto* sub : {simulate, limit, exact_cmd, verify, sweep}) add_common(sub);
  simulate->add_option("--raw-out", raw_out, "per-replication totals, one record per line");
  exact_cmd->add_option("--oracle", oracle, "pmk | borel | dp | conditional-r | parking | trees | block-count");
  exact_cmd->add_option("--k", k, "arrival index for block-count");
  verify->add_option("--only", only, "run a single criterion by id");
  verify->add_flag("--mutate-pmk", mutate, "perturb p_mk to check the harness catches it");
  sweep->add_option("--epsilon", epsilon, "window exponent in (0, 1/2)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    error_record("usage", e.what());
    return kUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  try {
    RunConfig cfg;
    if (sub->count("--config")) cfg = parse_config(read_file(config_path));
    cfg.subcommand = sub->get_name();
    std::set<std::string> fresh;
    auto set = [&](const char* flag, const std::string& key, const std::string& value) {
      if (sub->get_option_no_throw(flag) && sub->count(flag)) apply_config_entry(cfg, key, value, fresh);
    };
    if (sub->count("--n")) {
      cfg.n.clear();
      for (const auto& v : n_raw) apply_config_entry(cfg, "n", v, fresh);
    }
    if (sub->count("--functional")) {
      cfg.functionals.clear();
      for (const auto& v : functionals) apply_config_entry(cfg, "functional", v, fresh);
    }
    set("--reps", "reps", std::to_string(reps));
    set("--seed", "seed", std::to_string(seed));
    set("--embedding", "embedding", embedding);
    set("--alpha-grid", "alpha-grid", alpha_grid);
    set("--beta-grid", "beta-grid", beta_grid);
    set("--tol", "tol", format_double(tol));
    set("--format", "format", format);
    set("--out", "out", out);
    set("--workers", "workers", std::to_string(workers));
    set("--raw-out", "raw-out", raw_out);
    set("--oracle", "oracle", oracle);
    set("--k", "k", std::to_string(k));
    set("--only", "only", only);
    set("--epsilon", "epsilon", format_double(epsilon));
    if (mutate) cfg.mutate_pmk = true;

    std::ofstream file;
    if (cfg.out) {
      file.open(*cfg.out);
      if (!file) throw std::runtime_error("cannot open output file " + *cfg.out);
    }
    std::ostream& sink = cfg.out ? static_cast<std::ostream&>(file) : std::cout;

    if (cfg.subcommand == "verify") {
      acceptance::Options opts;
      opts.workers = cfg.workers;
      opts.mutate_pmk = cfg.mutate_pmk;
      const auto outcomes = acceptance::run_all(opts, cfg.only, [](const acceptance::Outcome& o) {
        std::cerr << "[" << o.status() << "] " << o.id << " (" << o.seconds << " s): " << o.detail << '\n';
      });
      sink << acceptance::to_json(outcomes).dump(2) << '\n';
      return acceptance::all_fatal_passed(outcomes) ? kOk : kVerification;
    }
    Table table;
    if (cfg.subcommand == "simulate") table = cmd_simulate(cfg);
    else if (cfg.subcommand == "limit") table = cmd_limit(cfg);
    else if (cfg.subcommand == "exact") table = cmd_exact(cfg);
    else table = cmd_sweep(cfg);
    write_table(table, cfg.format, sink);
    if (!sink) throw std::runtime_error("write failure");
    return kOk;
  } catch (const UsageError& e) {
    error_record("usage", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    error_record("runtime", e.what());
    return kRuntime;
  }
}
