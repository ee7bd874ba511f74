#include "asgd/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "asgd/theory.hpp"

namespace asgd {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double to_real(const std::string& v, const std::string& key) {
  try {
    std::size_t pos = 0;
    double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("bad numeric value for " + key + ": '" + v + "'");
  }
}

std::uint64_t to_u64(const std::string& v, const std::string& key) {
  std::uint64_t x = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc{} || p != v.data() + v.size())
    throw ConfigError("bad integer value for " + key + ": '" + v + "'");
  return x;
}

bool to_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("bad boolean value for " + key + ": '" + v + "'");
}

EngineMode engine_from(const std::string& v) {
  if (v == "seq") return EngineMode::seq;
  if (v == "filtered") return EngineMode::filtered;
  if (v == "batch") return EngineMode::batch;
  if (v == "parallel") return EngineMode::parallel;
  if (v == "delay_sim") return EngineMode::delay_sim;
  if (v == "delay_sim_growing") return EngineMode::delay_sim_growing;
  throw ConfigError("unknown engine '" + v + "'");
}

std::string engine_name(EngineMode m) {
  switch (m) {
    case EngineMode::seq: return "seq";
    case EngineMode::filtered: return "filtered";
    case EngineMode::batch: return "batch";
    case EngineMode::parallel: return "parallel";
    case EngineMode::delay_sim: return "delay_sim";
    case EngineMode::delay_sim_growing: return "delay_sim_growing";
  }
  return "?";
}

MaskConfig mask_from(const std::string& name, double p) {
  MaskConfig m;
  m.p = p;
  if (name == "all_in") m.policy = MaskPolicy::all_in;
  else if (name == "none_in") m.policy = MaskPolicy::none_in;
  else if (name == "bernoulli") m.policy = MaskPolicy::bernoulli;
  else if (name == "per_coord") m.policy = MaskPolicy::per_coordinate_random;
  else throw ConfigError("unknown mask policy '" + name + "'");
  return m;
}

}  // namespace

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_text(ss.str());
}

RunConfig RunConfig::from_text(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected key=value at line " + std::to_string(lineno));
    cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  if (key == "dataset") dataset_path = value;
  else if (key == "synthetic") synthetic = value;
  else if (key == "synthetic_dim") synthetic_dim = (int)to_u64(value, key);
  else if (key == "synthetic_n") synthetic_n = to_u64(value, key);
  else if (key == "synthetic_scale") synthetic_scale = to_real(value, key);
  else if (key == "synthetic_seed") synthetic_seed = to_u64(value, key);
  else if (key == "dim_override")
    dim_override = static_cast<std::uint32_t>(to_u64(value, key));
  else if (key == "subsample") subsample_m = to_u64(value, key);
  else if (key == "subsample_seed") subsample_seed = to_u64(value, key);
  else if (key == "objective") objective = value;
  else if (key == "lambda") lambda = to_real(value, key);
  else if (key == "reference") reference = to_bool(value, key);
  else if (key == "reference_tol") reference_tol = to_real(value, key);
  else if (key == "engine") engine = engine_from(value);
  else if (key == "D") D = (int)to_u64(value, key);
  else if (key == "batch_k") batch_k = to_u64(value, key);
  else if (key == "v") fraction_v = to_real(value, key);
  else if (key == "tau") tau = to_u64(value, key);
  else if (key == "mask") mask = value;
  else if (key == "mask_p") mask_p = to_real(value, key);
  else if (key == "P") workers = (int)to_u64(value, key);
  else if (key == "nonconvex") nonconvex = to_bool(value, key);
  else if (key == "schedule") schedule = value;
  else if (key == "alpha") alpha = to_real(value, key);
  else if (key == "beta") beta = to_real(value, key);
  else if (key == "k_offset") k_offset = to_real(value, key);
  else if (key == "q") q = to_real(value, key);
  else if (key == "K") K = to_real(value, key);
  else if (key == "eta0") eta0 = to_real(value, key);
  else if (key == "alpha_rule") alpha_rule = value;
  else if (key == "T") T = to_u64(value, key);
  else if (key == "epochs") epochs = to_u64(value, key);
  else if (key == "record_every") record_every = to_u64(value, key);
  else if (key == "out") out_dir = value;
  else if (key == "bound") bound = value;
  else if (key == "seeds") {
    seeds.clear();
    std::istringstream ss(value);
    std::string tok;
    while (std::getline(ss, tok, ','))
      if (!trim(tok).empty()) seeds.push_back(to_u64(trim(tok), key));
    if (seeds.empty()) throw ConfigError("seeds list is empty");
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

void RunConfig::validate() const {
  if (dataset_path.empty() == synthetic.empty())
    throw ConfigError("exactly one of dataset= or synthetic= is required");
  if (!synthetic.empty() && synthetic != "quad" &&
      synthetic != "two_component" && synthetic != "logistic")
    throw ConfigError("unknown synthetic preset '" + synthetic + "'");
  if (objective != "logistic" && objective != "least_squares")
    throw ConfigError("unknown objective '" + objective + "'");
  if (D < 1) throw ConfigError("D must be >= 1");
  if (workers < 1) throw ConfigError("P must be >= 1");
  if (seeds.empty()) throw ConfigError("seeds must be non-empty");
  if (fraction_v && !(*fraction_v > 0.0 && *fraction_v <= 1.0))
    throw ConfigError("fraction v must lie in (0, 1]");
  mask_from(mask, mask_p);  // validates the name
}

std::string RunConfig::dump() const {
  std::ostringstream o;
  o << "dataset=" << dataset_path << '\n'
    << "synthetic=" << synthetic << '\n'
    << "synthetic_dim=" << synthetic_dim << '\n'
    << "synthetic_n=" << synthetic_n << '\n'
    << "synthetic_scale=" << format_double(synthetic_scale) << '\n'
    << "synthetic_seed=" << synthetic_seed << '\n';
  if (dim_override) o << "dim_override=" << *dim_override << '\n';
  if (subsample_m)
    o << "subsample=" << *subsample_m << "\nsubsample_seed=" << subsample_seed
      << '\n';
  o << "objective=" << objective << '\n'
    << "lambda=" << format_double(lambda) << '\n'
    << "reference=" << (reference ? "true" : "false") << '\n'
    << "reference_tol=" << format_double(reference_tol) << '\n'
    << "engine=" << engine_name(engine) << '\n'
    << "D=" << D << '\n'
    << "batch_k=" << batch_k << '\n';
  if (fraction_v) o << "v=" << format_double(*fraction_v) << '\n';
  o << "tau=" << tau << '\n'
    << "mask=" << mask << '\n'
    << "mask_p=" << format_double(mask_p) << '\n'
    << "P=" << workers << '\n'
    << "nonconvex=" << (nonconvex ? "true" : "false") << '\n'
    << "schedule=" << schedule << '\n'
    << "alpha=" << format_double(alpha) << '\n'
    << "beta=" << format_double(beta) << '\n'
    << "k_offset=" << format_double(k_offset) << '\n'
    << "q=" << format_double(q) << '\n'
    << "K=" << format_double(K) << '\n'
    << "eta0=" << format_double(eta0) << '\n'
    << "alpha_rule=" << alpha_rule << '\n'
    << "T=" << T << '\n';
  if (epochs) o << "epochs=" << *epochs << '\n';
  o << "record_every=" << record_every << '\n' << "bound=" << bound << '\n';
  o << "seeds=";
  for (std::size_t i = 0; i < seeds.size(); ++i)
    o << (i ? "," : "") << seeds[i];
  o << '\n';
  return o.str();
}

std::uint64_t RunConfig::config_hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

PreparedProblem prepare(const RunConfig& cfg) {
  cfg.validate();
  PreparedProblem prep;
  ProblemConstants& c = prep.constants;
  if (!cfg.synthetic.empty()) {
    SyntheticProblem sp;
    if (cfg.synthetic == "quad")
      sp = make_separable_least_squares(cfg.synthetic_dim, 1.0 / std::sqrt(2.0),
                                        1.0, 1.0);
    else if (cfg.synthetic == "two_component")
      sp = make_two_component_1d();
    else
      sp = make_synthetic_logistic(cfg.synthetic_dim, cfg.synthetic_n,
                                   cfg.synthetic_scale, cfg.synthetic_seed,
                                   cfg.lambda, cfg.reference_tol);
    prep.problem = sp.problem;
    c = sp.constants;
  } else {
    Dataset d = load_sparse_file(cfg.dataset_path, cfg.dim_override);
    if (cfg.subsample_m) d = subsample(d, *cfg.subsample_m, cfg.subsample_seed);
    double lambda =
        cfg.lambda < 0 ? 1.0 / static_cast<double>(d.n()) : cfg.lambda;
    auto data = std::make_shared<Dataset>(std::move(d));
    auto obj = std::make_shared<Objective>(
        cfg.objective == "logistic" ? LossKind::logistic
                                    : LossKind::least_squares,
        data, lambda);
    prep.problem = obj;
    c.L = estimate_L(*obj);
    c.mu = lambda > 0 ? estimate_mu(*obj) : 0.0;
    c.kappa = c.mu > 0 ? c.L / c.mu : 1.0;
    if (cfg.reference) {
      ReferenceSolution ref = solve_reference(*obj, cfg.reference_tol);
      c.f_star = ref.f_star;
      c.N = estimate_N(*obj, ref.w_star);
      c.w_star = std::move(ref.w_star);
    }
  }
  prep.n = prep.problem->size();
  prep.T = cfg.epochs ? *cfg.epochs * prep.n : cfg.T;
  prep.record_every = cfg.record_every
                          ? cfg.record_every
                          : std::max<std::uint64_t>(1, prep.n / 10);

  double mu = c.mu, L = c.L;
  auto need_mu = [&] {
    if (mu <= 0)
      throw ConfigError("schedule '" + cfg.schedule +
                        "' needs a strongly convex problem (mu > 0)");
  };
  double tau = static_cast<double>(cfg.tau);
  try {
    if (cfg.schedule == "theorem_sgd") {
      need_mu();
      prep.schedule = StepSchedule::theorem_sgd(
          mu, L, cfg.alpha < 0 ? 2.0 : cfg.alpha);
    } else if (cfg.schedule == "hogwild") {
      need_mu();
      AlphaRule rule = AlphaRule::constant4;
      if (cfg.alpha_rule == "constant_alpha") rule = AlphaRule::constant_alpha;
      else if (cfg.alpha_rule == "stepped") rule = AlphaRule::stepped;
      else if (cfg.alpha_rule != "constant4")
        throw ConfigError("unknown alpha_rule '" + cfg.alpha_rule + "'");
      prep.schedule = StepSchedule::hogwild(
          mu, L, cfg.D, tau, cfg.alpha < 0 ? 4.0 : cfg.alpha, rule);
    } else if (cfg.schedule == "hogwild_as") {
      double k = cfg.k_offset < 0 ? std::max(3.0 * tau, 1.0) : cfg.k_offset;
      prep.schedule =
          StepSchedule::hogwild_as(L, cfg.D, cfg.beta, k, tau,
                                   mu > 0 ? mu : 1.0);
    } else if (cfg.schedule == "power") {
      double K = cfg.K < 0 ? std::pow(2.0 * L, 1.0 / cfg.q) : cfg.K;
      prep.schedule = StepSchedule::power(cfg.q, K, L, mu > 0 ? mu : 1.0);
    } else if (cfg.schedule == "stepped") {
      need_mu();
      double E = std::max(2.0 * tau, 32.0 * L * cfg.D / mu);  // alpha = 8
      prep.schedule = StepSchedule::stepped(mu, E);
    } else if (cfg.schedule == "constant") {
      prep.schedule = StepSchedule::constant(cfg.eta0, cfg.eta0,
                                             mu > 0 ? mu : 1.0);
    } else if (cfg.schedule == "classic") {
      prep.schedule = StepSchedule::classic(cfg.eta0, mu > 0 ? mu : 1.0);
    } else if (cfg.schedule == "hogwild_growing") {
      need_mu();
      prep.schedule = StepSchedule::hogwild_growing(
          mu, L, cfg.D, default_growing_tau, cfg.alpha < 0 ? 12.0 : cfg.alpha);
    } else {
      throw ConfigError("unknown schedule '" + cfg.schedule + "'");
    }
  } catch (const ScheduleError& e) {
    throw ConfigError(e.what());
  }

  // engine/schedule admissibility; the nonconvex flag tightens caps by kappa
  double kappa = cfg.nonconvex ? c.kappa : 1.0;
  double eta0 = prep.schedule.eta(0);
  const double slack = 1.0 + 1e-12;
  bool theorem_family =
      cfg.schedule != "constant" && cfg.schedule != "classic";
  if (theorem_family) switch (cfg.engine) {
    case EngineMode::seq:
      if (L > 0 && eta0 > slack / (2.0 * L * kappa))
        throw ConfigError("eta0 exceeds the SGD cap 1/(2 L kappa)");
      break;
    case EngineMode::batch:
      if (L > 0 && eta0 > slack / (2.0 * L * cfg.D * kappa))
        throw ConfigError("eta0 exceeds the batch cap 1/(2 L D kappa)");
      break;
    default:
      if (L > 0 && eta0 > slack / (4.0 * L * cfg.D * kappa) &&
          (cfg.schedule == "hogwild" || cfg.schedule == "hogwild_as"))
        throw ConfigError("eta0 exceeds the Hogwild cap 1/(4 L D kappa)");
      break;
  }
  if (cfg.schedule == "hogwild_as" && cfg.k_offset >= 0 &&
      cfg.k_offset < 3.0 * tau)
    throw ConfigError("hogwild_as needs k_offset >= 3 tau");
  if (cfg.engine == EngineMode::batch &&
      (cfg.batch_k < 1 || cfg.batch_k > prep.n))
    throw ConfigError("batch_k out of range");
  return prep;
}

namespace {

Trace run_one(const RunConfig& cfg, const PreparedProblem& prep,
              std::uint64_t seed) {
  const std::vector<double>* ws =
      prep.constants.w_star ? &*prep.constants.w_star : nullptr;
  switch (cfg.engine) {
    case EngineMode::seq:
    case EngineMode::filtered:
    case EngineMode::batch: {
      SeqRunOptions o;
      if (cfg.engine == EngineMode::seq) o.mode = SeqMode::sgd;
      else if (cfg.engine == EngineMode::batch) o.mode = SeqMode::batch;
      else o.mode = cfg.fraction_v ? SeqMode::fraction : SeqMode::filtered;
      o.D = cfg.D;
      o.batch_k = cfg.batch_k;
      o.fraction_v = cfg.fraction_v.value_or(1.0);
      o.T = prep.T;
      o.record_every = prep.record_every;
      o.seed = seed;
      o.w_star = ws;
      return run_seq(*prep.problem, prep.schedule, o);
    }
    case EngineMode::parallel: {
      ParallelOptions o;
      o.D = cfg.D;
      o.use_fraction = cfg.fraction_v.has_value();
      o.fraction_v = cfg.fraction_v.value_or(1.0);
      o.workers = cfg.workers;
      o.T = prep.T;
      o.record_every = prep.record_every;
      o.seed = seed;
      o.w_star = ws;
      return run_parallel(*prep.problem, prep.schedule, o);
    }
    case EngineMode::delay_sim:
    case EngineMode::delay_sim_growing: {
      DelaySimOptions o;
      o.D = cfg.D;
      o.use_fraction = cfg.fraction_v.has_value();
      o.fraction_v = cfg.fraction_v.value_or(1.0);
      o.tau = cfg.tau;
      o.mask = mask_from(cfg.mask, cfg.mask_p);
      o.T = prep.T;
      o.record_every = prep.record_every;
      o.seed = seed;
      o.w_star = ws;
      if (cfg.engine == EngineMode::delay_sim)
        return run_delay_sim(*prep.problem, prep.schedule, o);
      return run_delay_sim_growing(*prep.problem, prep.schedule,
                                   default_growing_tau, o);
    }
  }
  throw ConfigError("unreachable engine mode");
}

}  // namespace

AggregateResult run_config(const RunConfig& cfg) {
  return run_config(cfg, prepare(cfg));
}

AggregateResult run_config(const RunConfig& cfg, const PreparedProblem& prep) {
  AggregateResult agg;
  auto start = std::chrono::steady_clock::now();
  std::vector<const Trace*> alive;
  for (std::uint64_t seed : cfg.seeds) {
    try {
      agg.per_seed.push_back(run_one(cfg, prep, seed));
    } catch (const DivergenceError&) {
      agg.per_seed.push_back(Trace{{}, seed, false});
      agg.diverged_seeds.push_back(seed);
    }
  }
  for (const Trace& t : agg.per_seed)
    if (!t.rows.empty()) alive.push_back(&t);
  if (alive.empty())
    throw AllSeedsDiverged("all seeds diverged");
  // Parallel traces snapshot at wall-clock driven t values, so seeds need
  // not share a grid; fall back to the deterministic endpoints when they
  // don't.
  const Trace& first = *alive.front();
  bool aligned = true;
  for (const Trace* t : alive) {
    if (t->rows.size() != first.rows.size()) { aligned = false; break; }
    for (std::size_t r = 0; r < t->rows.size(); ++r)
      if (t->rows[r].t != first.rows[r].t) { aligned = false; break; }
    if (!aligned) break;
  }
  std::vector<std::size_t> first_rows;  // indices into first
  std::vector<std::vector<std::size_t>> idx(alive.size());
  if (aligned) {
    for (std::size_t r = 0; r < first.rows.size(); ++r) first_rows.push_back(r);
    for (std::size_t a = 0; a < alive.size(); ++a) idx[a] = first_rows;
  } else {
    first_rows = {0, first.rows.size() - 1};
    for (std::size_t a = 0; a < alive.size(); ++a)
      idx[a] = {0, alive[a]->rows.size() - 1};
  }

  double mu = prep.constants.mu, L = prep.constants.L, N = prep.constants.N;
  double w0_dist = 0.0;
  if (prep.constants.w_star)
    for (double x : *prep.constants.w_star) w0_dist += x * x;

  for (std::size_t ri = 0; ri < first_rows.size(); ++ri) {
    AggregateRow row;
    row.t = first.rows[first_rows[ri]].t;
    row.t_prime = first.rows[first_rows[ri]].t_prime;
    row.epoch = static_cast<double>(row.t) / static_cast<double>(prep.n);
    double lm = 0, dm = 0;
    for (std::size_t a = 0; a < alive.size(); ++a) {
      lm += alive[a]->rows[idx[a][ri]].loss;
      dm += alive[a]->rows[idx[a][ri]].dist_sq;
    }
    lm /= alive.size();
    dm /= alive.size();
    double lv = 0, dv = 0;
    for (std::size_t a = 0; a < alive.size(); ++a) {
      double l = alive[a]->rows[idx[a][ri]].loss;
      double d = alive[a]->rows[idx[a][ri]].dist_sq;
      lv += (l - lm) * (l - lm);
      dv += (d - dm) * (d - dm);
    }
    std::size_t m = alive.size();
    row.loss_mean = lm;
    row.loss_std = m > 1 ? std::sqrt(lv / (m - 1)) : 0.0;
    row.dist_mean = dm;
    row.dist_std = m > 1 ? std::sqrt(dv / (m - 1)) : 0.0;
    if (cfg.bound == "sgd_theorem2" && N > 0 && mu > 0)
      row.bound = theorem2_bound(static_cast<double>(row.t), mu, L, N, w0_dist);
    else if (cfg.bound == "hogwild_theorem4" && mu > 0)
      row.bound = hogwild_bound(static_cast<double>(row.t),
                                prep.schedule.alpha(), mu, N, cfg.D,
                                prep.schedule.big_e());
    agg.rows.push_back(row);
  }
  agg.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return agg;
}

void emit_csv(const AggregateResult& agg, const RunConfig& cfg,
              std::ostream& out) {
  out << "# config_hash=" << cfg.config_hash() << '\n';
  out << "# seeds=";
  for (std::size_t i = 0; i < cfg.seeds.size(); ++i)
    out << (i ? "," : "") << cfg.seeds[i];
  out << '\n';
  if (!agg.diverged_seeds.empty()) {
    out << "# diverged=";
    for (std::size_t i = 0; i < agg.diverged_seeds.size(); ++i)
      out << (i ? "," : "") << agg.diverged_seeds[i];
    out << '\n';
  }
  out << "# wall_seconds=" << format_double(agg.wall_seconds) << '\n';
  out << "t,t_prime,epoch,loss_mean,loss_std,dist_mean,dist_std,bound\n";
  for (const AggregateRow& r : agg.rows) {
    out << r.t << ',' << r.t_prime << ',' << format_double(r.epoch) << ','
        << format_double(r.loss_mean) << ',' << format_double(r.loss_std)
        << ',' << format_double(r.dist_mean) << ','
        << format_double(r.dist_std) << ','
        << (std::isnan(r.bound) ? "" : format_double(r.bound)) << '\n';
  }
}

void emit_seed_csv(const Trace& trace, std::ostream& out) {
  out << "# seed=" << trace.seed << '\n';
  if (trace.inconsistent_reads) out << "# inconsistent-read metrics\n";
  out << "t,t_prime,loss,dist_sq\n";
  for (const TraceRow& r : trace.rows)
    out << r.t << ',' << r.t_prime << ',' << format_double(r.loss) << ','
        << format_double(r.dist_sq) << '\n';
}

ParsedCsv parse_csv(std::istream& in) {
  ParsedCsv out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields;
    std::istringstream ls(line);
    std::string tok;
    while (std::getline(ls, tok, ',')) fields.push_back(tok);
    if (out.header.empty()) {
      out.header = fields;
      continue;
    }
    std::vector<double> row;
    for (const std::string& f : fields)
      row.push_back(f.empty() ? std::numeric_limits<double>::quiet_NaN()
                              : std::stod(f));
    out.rows.push_back(std::move(row));
  }
  return out;
}

void write_outputs(const AggregateResult& agg, const RunConfig& cfg,
                   const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  {
    std::ofstream f(out_dir + "/mean.csv");
    emit_csv(agg, cfg, f);
  }
  for (const Trace& t : agg.per_seed) {
    if (t.rows.empty()) continue;
    std::ofstream f(out_dir + "/seed_" + std::to_string(t.seed) + ".csv");
    emit_seed_csv(t, f);
  }
}

}  // namespace asgd
