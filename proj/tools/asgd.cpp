// Command line front end: run experiments from a config file, inspect
// dataset sparsity, and evaluate theoretical bound / step-size curves.
#include <cmath>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "asgd/harness.hpp"
#include "asgd/theory.hpp"

namespace {

std::vector<double> parse_grid(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(std::stod(tok));
  }
  if (out.empty()) throw asgd::ConfigError("empty grid");
  return out;
}

// schedule token: family or family:key=val:key=val
asgd::StepSchedule parse_schedule(const std::string& token, double mu,
                                  double L, int D, double tau) {
  std::stringstream ss(token);
  std::string family;
  std::getline(ss, family, ':');
  double q = 1.0, K = -1.0, eta0 = 0.1, alpha = -1.0, beta = 1.0;
  std::string part;
  while (std::getline(ss, part, ':')) {
    std::size_t eq = part.find('=');
    if (eq == std::string::npos)
      throw asgd::ConfigError("bad schedule option '" + part + "'");
    std::string k = part.substr(0, eq);
    double v = std::stod(part.substr(eq + 1));
    if (k == "q") q = v;
    else if (k == "K") K = v;
    else if (k == "eta0") eta0 = v;
    else if (k == "alpha") alpha = v;
    else if (k == "beta") beta = v;
    else throw asgd::ConfigError("unknown schedule option '" + k + "'");
  }
  using S = asgd::StepSchedule;
  if (family == "theorem_sgd") return S::theorem_sgd(mu, L, alpha < 0 ? 2 : alpha);
  if (family == "hogwild")
    return S::hogwild(mu, L, D, tau, alpha < 0 ? 4 : alpha);
  if (family == "hogwild_as")
    return S::hogwild_as(L, D, beta, std::max(3.0 * tau, 1.0), tau, mu);
  if (family == "power")
    return S::power(q, K < 0 ? std::pow(2.0 * L, 1.0 / q) : K, L, mu);
  if (family == "stepped")
    return S::stepped(mu, std::max(2.0 * tau, 32.0 * L * D / mu));
  if (family == "constant") return S::constant(eta0, eta0, mu);
  if (family == "classic") return S::classic(eta0, mu);
  throw asgd::ConfigError("unknown schedule family '" + family + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"asynchronous SGD convergence laboratory"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "execute a config across seeds");
  std::string config_path, out_dir, seeds_csv;
  std::vector<std::string> overrides;
  run->add_option("--config", config_path, "key=value config file")
      ->required();
  run->add_option("--out", out_dir, "output directory for csv files");
  run->add_option("--seeds", seeds_csv, "comma separated seed list");
  run->add_option("--override", overrides, "key=val config override");

  // stats
  auto* stats = app.add_subcommand("stats", "dataset sparsity statistics");
  std::string ds_path;
  int stats_D = 1;
  std::uint32_t stats_dim = 0;
  stats->add_option("--dataset", ds_path, "sparse text file (.gz ok)")
      ->required();
  stats->add_option("--D", stats_D, "partition size D")->required();
  stats->add_option("--dim", stats_dim, "dimension override");

  // bounds
  auto* bounds = app.add_subcommand("bounds", "evaluate bound curves");
  std::string family, grid_csv;
  double b_mu = 1.0, b_L = 1.0, b_N = 1.0, b_alpha = -1.0, b_tau = 0.0,
         b_dist0 = 1.0;
  int b_D = 1;
  bounds->add_option("--family", family, "sgd_theorem2 | hogwild_theorem4")
      ->required();
  bounds->add_option("--grid", grid_csv, "comma separated t values")
      ->required();
  bounds->add_option("--mu", b_mu);
  bounds->add_option("--L", b_L);
  bounds->add_option("--N", b_N);
  bounds->add_option("--D", b_D);
  bounds->add_option("--alpha", b_alpha);
  bounds->add_option("--tau", b_tau);
  bounds->add_option("--dist0", b_dist0, "|w0 - w*|^2");

  // race
  auto* race = app.add_subcommand("race", "compare C(t) across schedules");
  std::string sched_csv, race_grid;
  double r_mu = 1.0, r_L = 1.0, r_tau = 0.0;
  int r_D = 1;
  race->add_option("--schedules", sched_csv,
                   "comma list, e.g. theorem_sgd,power:q=0.5")
      ->required();
  race->add_option("--grid", race_grid, "comma separated t values")->required();
  race->add_option("--mu", r_mu);
  race->add_option("--L", r_L);
  race->add_option("--D", r_D);
  race->add_option("--tau", r_tau);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      asgd::RunConfig cfg = asgd::RunConfig::from_file(config_path);
      if (!seeds_csv.empty()) cfg.set("seeds", seeds_csv);
      for (const std::string& ov : overrides) {
        std::size_t eq = ov.find('=');
        if (eq == std::string::npos)
          throw asgd::ConfigError("override must be key=val: " + ov);
        cfg.set(ov.substr(0, eq), ov.substr(eq + 1));
      }
      if (!out_dir.empty()) cfg.out_dir = out_dir;
      asgd::AggregateResult agg = asgd::run_config(cfg);
      if (!cfg.out_dir.empty()) {
        asgd::write_outputs(agg, cfg, cfg.out_dir);
        std::cerr << "wrote " << cfg.out_dir << "/mean.csv ("
                  << agg.rows.size() << " rows, "
                  << agg.diverged_seeds.size() << " diverged seeds)\n";
      } else {
        asgd::emit_csv(agg, cfg, std::cout);
      }
    } else if (*stats) {
      asgd::Dataset d = asgd::load_sparse_file(
          ds_path, stats_dim ? std::optional<std::uint32_t>(stats_dim)
                             : std::nullopt);
      asgd::SparsityStats st = asgd::sparsity_stats(d, stats_D);
      std::cout << "n=" << d.n() << "\ndim=" << d.dim
                << "\ndelta_bar=" << st.delta_bar
                << "\nmean_support=" << asgd::format_double(st.mean_support)
                << "\ndelta_bar_D=" << asgd::format_double(st.delta_bar_D)
                << "\ncollision=" << asgd::format_double(st.collision) << '\n';
    } else if (*bounds) {
      std::vector<double> grid = parse_grid(grid_csv);
      std::cout << "t,bound\n";
      for (double t : grid) {
        double b;
        if (family == "sgd_theorem2") {
          b = asgd::theorem2_bound(t, b_mu, b_L, b_N, b_dist0);
        } else if (family == "hogwild_theorem4") {
          double alpha = b_alpha < 0 ? 4.0 : b_alpha;
          double E = std::max(2.0 * b_tau, 4.0 * b_L * alpha * b_D / b_mu);
          b = asgd::hogwild_bound(t, alpha, b_mu, b_N, b_D, E);
        } else {
          throw asgd::ConfigError("unknown bound family '" + family + "'");
        }
        std::cout << asgd::format_double(t) << ','
                  << asgd::format_double(b) << '\n';
      }
    } else if (*race) {
      std::vector<std::string> names;
      std::vector<asgd::StepSchedule> scheds;
      std::stringstream ss(sched_csv);
      std::string tok;
      while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        names.push_back(tok);
        scheds.push_back(parse_schedule(tok, r_mu, r_L, r_D, r_tau));
      }
      if (scheds.empty()) throw asgd::ConfigError("no schedules given");
      std::vector<double> grid = parse_grid(race_grid);
      auto rows = asgd::schedule_race(scheds, grid);
      std::cout << "t";
      for (const std::string& n : names) std::cout << ",C[" << n << "]";
      std::cout << ",winner\n";
      for (const auto& r : rows) {
        std::cout << asgd::format_double(r.t);
        for (double c : r.C) std::cout << ',' << asgd::format_double(c);
        std::cout << ',' << names[r.winner] << '\n';
      }
    }
  } catch (const asgd::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const asgd::ParseError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const asgd::ScheduleError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const asgd::AllSeedsDiverged& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
