#include "phasemax/experiments.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "phasemax/oracles.hpp"

namespace phasemax {

using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

double deg(double rad) { return rad * 180.0 / kPi; }
double rad(double deg) { return deg * kPi / 180.0; }

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string to_string(Method method) {
  switch (method) {
    case Method::PhaseMax: return "phasemax";
    case Method::BasisPursuit: return "bp";
    case Method::GerchbergSaxton: return "gs";
  }
  return "unknown";
}

Method method_from_string(const std::string& name) {
  if (name == "phasemax" || name == "pm") return Method::PhaseMax;
  if (name == "bp") return Method::BasisPursuit;
  if (name == "gs") return Method::GerchbergSaxton;
  throw ConfigError("unknown method '" + name + "'");
}

void SweepConfig::validate() const {
  if (n == 0) throw ConfigError("sweep: n must be >= 1");
  if (beta_list.empty()) throw ConfigError("sweep: beta list is empty");
  if (m_grid.empty()) throw ConfigError("sweep: m grid is empty");
  if (trials_per_cell == 0) throw ConfigError("sweep: trials per cell must be >= 1");
  if (workers == 0) throw ConfigError("sweep: workers must be >= 1");
  for (double b : beta_list)
    if (!(b >= 0.0 && b <= kPi / 2)) throw ConfigError("sweep: beta must lie in [0, 90] degrees");
  for (std::size_t m : m_grid)
    if (m == 0) throw ConfigError("sweep: m must be >= 1");
  try {
    solver.validate();
    if (!init.at_angle) init.initializer.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

std::vector<std::size_t> arithmetic_grid(std::size_t lo, std::size_t hi, std::size_t step) {
  if (step == 0 || lo == 0 || hi < lo) throw ConfigError("grid: need 1 <= lo <= hi and step >= 1");
  std::vector<std::size_t> out;
  for (std::size_t m = lo; m <= hi; m += step) out.push_back(m);
  return out;
}

std::vector<std::size_t> parse_grid(const std::string& text) {
  std::size_t lo = 0, hi = 0, step = 0;
  char c1 = 0, c2 = 0;
  std::istringstream in(text);
  if (!(in >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':' || !in.eof())
    throw ConfigError("grid '" + text + "' is not of the form lo:hi:step");
  return arithmetic_grid(lo, hi, step);
}

SweepConfig sweep_config_from_json(const json& doc) {
  SweepConfig cfg;
  try {
    cfg.n = doc.value("n", cfg.n);
    cfg.field = field_from_string(doc.value("field", std::string("complex")));
    cfg.ensemble = ensemble_kind_from_string(doc.value("ensemble", std::string("unit-sphere")));
    for (double b : doc.at("beta_deg").get<std::vector<double>>()) cfg.beta_list.push_back(rad(b));
    const json& grid = doc.at("m_grid");
    if (grid.is_string()) {
      cfg.m_grid = parse_grid(grid.get<std::string>());
    } else if (grid.is_array()) {
      cfg.m_grid = grid.get<std::vector<std::size_t>>();
    } else {
      cfg.m_grid = arithmetic_grid(grid.at("lo").get<std::size_t>(), grid.at("hi").get<std::size_t>(),
                                   grid.at("step").get<std::size_t>());
    }
    cfg.trials_per_cell = doc.value("trials", cfg.trials_per_cell);
    cfg.method = method_from_string(doc.value("method", std::string("phasemax")));
    const std::string init = doc.value("init", std::string("at-angle"));
    if (init != "at-angle") {
      cfg.init.at_angle = false;
      cfg.init.initializer.kind = initializer_kind_from_string(init);
      cfg.init.init_m = doc.value("init_m", std::size_t{0});
      cfg.init.initializer.truncation_factor = doc.value("truncation_factor", 3.0);
    }
    cfg.noise = noise_model_from_string(doc.value("noise", std::string("none")));
    cfg.seed = doc.value("seed", cfg.seed);
    cfg.workers = doc.value("workers", cfg.workers);
    cfg.solver.max_iters = doc.value("max_iters", cfg.solver.max_iters);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("sweep config: ") + e.what());
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  cfg.validate();
  return cfg;
}

WilsonInterval wilson_interval(std::size_t successes, std::size_t trials, double z) {
  if (trials == 0) return {0.0, 1.0};
  const double nt = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / nt;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nt;
  const double centre = (p + z2 / (2.0 * nt)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nt + z2 / (4.0 * nt * nt)) / denom;
  return {std::max(0.0, std::min(p, centre - half)), std::min(1.0, std::max(p, centre + half))};
}

std::uint64_t trial_seed(std::uint64_t seed, std::size_t beta_index, std::size_t m_index, std::size_t trial) {
  return derive_seed(seed, {beta_index, m_index, trial});
}

TrialRecord run_trial(const SweepConfig& cfg, std::size_t beta_index, std::size_t m_index, std::size_t trial) {
  const auto start = std::chrono::steady_clock::now();
  TrialRecord rec;
  rec.beta_index = beta_index;
  rec.m_index = m_index;
  rec.beta = cfg.beta_list.at(beta_index);
  rec.m = cfg.m_grid.at(m_index);
  rec.trial = trial;
  rec.seed = trial_seed(cfg.seed, beta_index, m_index, trial);

  const std::size_t prefix = cfg.init.at_angle ? 0 : cfg.init.init_m;
  InstanceOptions opts;
  opts.n = cfg.n;
  opts.m = rec.m + prefix;
  opts.field = cfg.field;
  opts.kind = cfg.ensemble;
  opts.noise = cfg.noise;
  opts.seed = derive_seed(rec.seed, {1});
  ProblemInstance instance = gen_instance(opts);
  Rng init_rng = make_rng(derive_seed(rec.seed, {2}));

  Signal xhat;
  if (cfg.init.at_angle) {
    xhat = make_approx_at_angle(*instance.truth, rec.beta, init_rng);
  } else {
    const InitializerConfig& ic = cfg.init.initializer;
    if (ic.kind == InitializerConfig::Kind::Random) {
      xhat = random_init(cfg.n, cfg.field, init_rng);
    } else {
      InitializerConfig seeded = ic;
      seeded.seed = derive_seed(rec.seed, {3});
      const MeasurementEnsemble init_rows =
          prefix > 0 ? instance.ensemble.rows(0, prefix) : instance.ensemble;
      xhat = spectral_init(init_rows, seeded).x;
    }
    if (prefix > 0) instance.ensemble = instance.ensemble.rows(prefix, rec.m);
  }
  set_approximation(instance, xhat);
  rec.alpha = instance.alpha.value_or(0.0);

  switch (cfg.method) {
    case Method::PhaseMax: {
      RecoveryResult r = solve_phasemax(instance, cfg.solver);
      rec.rre = r.rre.value_or(1.0);
      rec.converged = r.converged;
      rec.iterations = r.iterations;
      break;
    }
    case Method::BasisPursuit: {
      DualSolution d = solve_basis_pursuit(instance.ensemble, instance.xhat, cfg.solver);
      rec.rre = rre(signal_from_dual(instance.ensemble, d), *instance.truth, false);
      rec.converged = d.converged;
      rec.iterations = d.iterations;
      break;
    }
    case Method::GerchbergSaxton: {
      RecoveryResult r = gerchberg_saxton(instance, instance.xhat, cfg.solver);
      rec.rre = r.rre.value_or(1.0);
      rec.converged = r.converged;
      rec.iterations = r.iterations;
      break;
    }
  }
  rec.success = rec.rre < kSuccessRre;
  rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

std::vector<TrialRecord> run_trials(const SweepConfig& cfg) {
  cfg.validate();
  const std::size_t nb = cfg.beta_list.size();
  const std::size_t nm = cfg.m_grid.size();
  const std::size_t nt = cfg.trials_per_cell;
  const std::size_t total = nb * nm * nt;
  std::vector<TrialRecord> records(total);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= total) return;
      try {
        records[k] = run_trial(cfg, k / (nm * nt), (k / nt) % nm, k % nt);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = total;
        return;
      }
    }
  };
  const std::size_t threads = std::min(cfg.workers, total);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return records;
}

SweepTable aggregate(const SweepConfig& cfg, const std::vector<TrialRecord>& records) {
  struct Cell {
    std::size_t trials = 0, successes = 0;
    double alpha_sum = 0.0;
  };
  std::map<std::pair<std::size_t, std::size_t>, Cell> cells;
  for (const TrialRecord& r : records) {
    Cell& c = cells[{r.beta_index, r.m_index}];
    ++c.trials;
    c.successes += r.success ? 1 : 0;
    c.alpha_sum += r.alpha;
  }
  SweepTable table;
  for (const auto& [key, c] : cells) {
    SweepRow row;
    const double beta = cfg.beta_list.at(key.first);
    row.beta_deg = std::round(deg(beta) * 1e9) / 1e9;
    row.m = cfg.m_grid.at(key.second);
    row.trials = c.trials;
    row.successes = c.successes;
    row.rate = static_cast<double>(c.successes) / static_cast<double>(c.trials);
    const WilsonInterval w = wilson_interval(c.successes, c.trials);
    row.wilson_lo = w.lo;
    row.wilson_hi = w.hi;
    const double alpha = cfg.init.at_angle ? 1.0 - 2.0 * beta / kPi : c.alpha_sum / static_cast<double>(c.trials);
    row.theory_bound = theory::phasemax_success_bound(static_cast<double>(row.m), static_cast<double>(cfg.n),
                                                      alpha, cfg.field).value;
    table.rows.push_back(row);
  }
  return table;
}

SweepTable run_sweep(const SweepConfig& cfg) { return aggregate(cfg, run_trials(cfg)); }

std::string sweep_csv_header() { return "beta_deg,m,trials,successes,rate,wilson_lo,wilson_hi,theory_bound"; }

std::string to_csv(const SweepTable& table) {
  std::ostringstream out;
  out << sweep_csv_header() << '\n';
  for (const SweepRow& r : table.rows) {
    out << format_double(r.beta_deg) << ',' << r.m << ',' << r.trials << ',' << r.successes << ','
        << format_double(r.rate) << ',' << format_double(r.wilson_lo) << ',' << format_double(r.wilson_hi)
        << ',' << format_double(r.theory_bound) << '\n';
  }
  return out.str();
}

SweepTable parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != sweep_csv_header())
    throw std::invalid_argument("csv: unexpected header");
  SweepTable table;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ls(line);
    std::string f;
    while (std::getline(ls, f, ',')) fields.push_back(f);
    if (fields.size() != 8) throw std::invalid_argument("csv: line " + std::to_string(lineno) + " needs 8 fields");
    try {
      SweepRow r;
      r.beta_deg = std::stod(fields[0]);
      r.m = std::stoul(fields[1]);
      r.trials = std::stoul(fields[2]);
      r.successes = std::stoul(fields[3]);
      r.rate = std::stod(fields[4]);
      r.wilson_lo = std::stod(fields[5]);
      r.wilson_hi = std::stod(fields[6]);
      r.theory_bound = std::stod(fields[7]);
      table.rows.push_back(r);
    } catch (const std::logic_error&) {
      throw std::invalid_argument("csv: malformed number on line " + std::to_string(lineno));
    }
  }
  return table;
}

std::vector<DominanceViolation> check_bound_dominance(const SweepTable& table, double n, Field field,
                                                      const BoundFunction& bound) {
  std::vector<DominanceViolation> out;
  for (const SweepRow& r : table.rows) {
    const double alpha = 1.0 - 2.0 * rad(r.beta_deg) / kPi;
    const theory::TheoryBound tb = bound(static_cast<double>(r.m), n, alpha, field);
    if (!tb.valid) continue;
    const double se = std::sqrt(r.rate * (1.0 - r.rate) / static_cast<double>(r.trials));
    if (r.rate + 3.0 * se < tb.value) out.push_back({r.beta_deg, r.m, r.rate, 3.0 * se, tb.value});
  }
  return out;
}

}  // namespace phasemax
