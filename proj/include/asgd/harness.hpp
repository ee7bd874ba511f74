#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "asgd/engine_hogwild.hpp"
#include "asgd/synthetic.hpp"
#include "asgd/trace.hpp"

namespace asgd {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class EngineMode { seq, filtered, batch, parallel, delay_sim, delay_sim_growing };

// Flat key=value run description. CLI flags override file keys.
struct RunConfig {
  // problem
  std::string dataset_path;                  // or
  std::string synthetic;                     // quad | two_component | logistic
  int synthetic_dim = 10;
  std::uint64_t synthetic_n = 1000;
  double synthetic_scale = 0.5;
  std::uint64_t synthetic_seed = 1;
  std::optional<std::uint32_t> dim_override;
  std::optional<std::uint64_t> subsample_m;
  std::uint64_t subsample_seed = 1;
  std::string objective = "logistic";        // logistic | least_squares
  double lambda = -1.0;                      // -1 = 1/n default
  bool reference = true;                     // solve for w* (desk scale)
  double reference_tol = 1e-10;

  // engine
  EngineMode engine = EngineMode::seq;
  int D = 1;
  std::uint64_t batch_k = 1;
  std::optional<double> fraction_v;          // experiment variant
  std::uint64_t tau = 0;
  std::string mask = "bernoulli";            // all_in | none_in | bernoulli | per_coord
  double mask_p = 0.5;
  int workers = 1;
  bool nonconvex = false;

  // schedule
  std::string schedule = "theorem_sgd";
  double alpha = -1.0;                       // family default when < 0
  double beta = 1.0;
  double k_offset = -1.0;                    // hogwild_as; -1 = 3 tau
  double q = 1.0;
  double K = -1.0;                           // power; -1 = (2L)^(1/q)
  double eta0 = 0.1;                         // constant / classic
  std::string alpha_rule = "constant4";

  // run
  std::uint64_t T = 0;
  std::optional<std::uint64_t> epochs;       // T = epochs * n when set
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::uint64_t record_every = 0;            // 0 = n/10
  std::string out_dir;
  std::string bound = "none";                // sgd_theorem2 | hogwild_theorem4

  static RunConfig from_file(const std::string& path);
  static RunConfig from_text(const std::string& text);
  void set(const std::string& key, const std::string& value);
  void validate() const;
  std::string dump() const;           // normalized key=value text
  std::uint64_t config_hash() const;  // FNV-1a of dump()
};

struct PreparedProblem {
  std::shared_ptr<Problem> problem;
  ProblemConstants constants;
  StepSchedule schedule;
  std::uint64_t T = 0;
  std::uint64_t record_every = 1;
  std::size_t n = 0;
};

// Resolves dataset/synthetic, constants, and the schedule; validates the
// schedule cap against the engine mode (kappa-scaled when nonconvex).
PreparedProblem prepare(const RunConfig& cfg);

struct AggregateRow {
  std::uint64_t t = 0;
  std::uint64_t t_prime = 0;  // from the first surviving seed
  double epoch = 0.0;
  double loss_mean = 0.0;
  double loss_std = 0.0;
  double dist_mean = 0.0;
  double dist_std = 0.0;
  double bound = std::numeric_limits<double>::quiet_NaN();
};

struct AggregateResult {
  std::vector<AggregateRow> rows;
  std::vector<Trace> per_seed;             // aligned with cfg.seeds
  std::vector<std::uint64_t> diverged_seeds;
  double wall_seconds = 0.0;
};

class AllSeedsDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

AggregateResult run_config(const RunConfig& cfg);
AggregateResult run_config(const RunConfig& cfg, const PreparedProblem& prep);

// Header: t,t_prime,epoch,loss_mean,loss_std,dist_mean,dist_std,bound.
// Metadata (config hash, seeds, wall time) goes into leading # comment
// lines; wall time is excluded from reproducibility comparisons.
void emit_csv(const AggregateResult& agg, const RunConfig& cfg,
              std::ostream& out);
void emit_seed_csv(const Trace& trace, std::ostream& out);

struct ParsedCsv {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};
ParsedCsv parse_csv(std::istream& in);

// mean.csv plus seed_<s>.csv under out_dir.
void write_outputs(const AggregateResult& agg, const RunConfig& cfg,
                   const std::string& out_dir);

std::string format_double(double x);  // locale-independent shortest form

}  // namespace asgd
