#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "phasemax/experiments.hpp"
#include "phasemax/instance_io.hpp"
#include "phasemax/oracles.hpp"
#include "phasemax/theory.hpp"

using namespace phasemax;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

constexpr double kPi = std::numbers::pi;

std::map<std::string, double> parse_params(const std::string& text) {
  std::map<std::string, double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError("parameter '" + item + "' is not of the form key=value");
    try {
      out[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
    } catch (const std::logic_error&) {
      throw ConfigError("parameter '" + item + "' has a non-numeric value");
    }
  }
  return out;
}

double require(const std::map<std::string, double>& p, const std::string& key) {
  auto it = p.find(key);
  if (it == p.end()) throw ConfigError("missing parameter '" + key + "'");
  return it->second;
}

double get_or(const std::map<std::string, double>& p, const std::string& key, double fallback) {
  auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

// alpha directly, or from beta_deg.
double alpha_param(const std::map<std::string, double>& p) {
  if (p.count("alpha")) return p.at("alpha");
  if (p.count("beta_deg")) return 1.0 - 2.0 * p.at("beta_deg") / 180.0;
  throw ConfigError("need 'alpha' or 'beta_deg'");
}

json bound_json(const theory::TheoryBound& b) {
  return {{"formula", theory::to_string(b.formula_id)}, {"value", b.value}, {"valid", b.valid}, {"params", b.params}};
}

json trace_json(const theory::CapCoverTrace& t) {
  return {{"epsilon_cos", t.epsilon_cos},
          {"lambda_floor", t.lambda_floor},
          {"log_combinatorial_factor", t.log_combinatorial_factor},
          {"combinatorial_factor", t.combinatorial_factor},
          {"exp_term", t.exp_term},
          {"hoeffding_term", t.hoeffding_term}};
}

json run_bounds(std::string formula, const std::map<std::string, double>& p) {
  static const std::map<std::string, std::string> aliases{
      {"thm1", "complex"}, {"thm4", "real"}, {"thm5", "nonuniform"},
      {"lem3", "neighbor"}, {"lem4", "small-caps"}};
  if (auto it = aliases.find(formula); it != aliases.end()) formula = it->second;

  if (formula == "complex" || formula == "real") {
    const Field f = formula == "complex" ? Field::Complex : Field::Real;
    return bound_json(theory::phasemax_success_bound(require(p, "m"), require(p, "n"), alpha_param(p), f));
  }
  if (formula == "neighbor")
    return bound_json(theory::neighbor_cover_bound(require(p, "m"), require(p, "n"), alpha_param(p)));
  if (formula == "nonuniform")
    return bound_json(theory::nonuniform_bound(require(p, "m"), require(p, "n"), alpha_param(p), require(p, "ell")));
  if (formula == "small-caps") {
    const auto c = theory::small_caps_cover_bound(require(p, "m"), require(p, "n"), require(p, "phi"));
    json out = bound_json(c.bound);
    out["trace"] = trace_json(c.trace);
    return out;
  }
  if (formula == "noise") {
    theory::NoiseConstants nc;
    nc.s = get_or(p, "s", 1.0);
    nc.r = get_or(p, "r", 0.0);
    nc.r_shrunk = get_or(p, "r_shrunk", nc.r);
    nc.nonnegative = nc.s >= 1.0;
    const double angle = p.count("angle") ? p.at("angle") : get_or(p, "beta_deg", 0.0) * kPi / 180.0;
    const auto nb = theory::noise_error_bound(require(p, "m"), require(p, "n"), angle, nc, require(p, "epsilon"),
                                              get_or(p, "truth_norm", 1.0));
    json out = bound_json(nb.probability);
    out["error_bound"] = nb.error_bound;
    out["theta"] = nb.theta;
    out["phi"] = nb.phi;
    out["trace"] = trace_json(nb.trace);
    return out;
  }
  throw ConfigError("unknown formula '" + formula + "'");
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw IoError("failed writing '" + path + "'");
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
  }
}

json complex_json(const CxVector& v) {
  json out = json::array();
  for (const Cx& z : v) out.push_back({z.real(), z.imag()});
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PhaseMax phase retrieval: solvers, bounds, oracles and sweeps"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a random instance");
  InstanceOptions gen_opts;
  std::string gen_field = "complex", gen_kind = "unit-sphere", gen_noise = "none", gen_out;
  double gen_beta_deg = 0.0;
  gen->add_option("--n", gen_opts.n, "Signal dimension")->required();
  gen->add_option("--m", gen_opts.m, "Number of measurements")->required();
  gen->add_option("--field", gen_field, "real|complex");
  gen->add_option("--ensemble", gen_kind, "unit-sphere|gaussian");
  gen->add_option("--noise", gen_noise, "none|nonneg:l|symmetric:l|relative:r");
  gen->add_option("--seed", gen_opts.seed);
  gen->add_option("--beta-deg", gen_beta_deg, "Angle between xhat and x0 (degrees)");
  gen->add_option("--out", gen_out, "Output JSON (stdout if omitted)");

  // recover
  auto* recover = app.add_subcommand("recover", "Solve one instance");
  std::string rec_instance, rec_method = "phasemax", rec_init, rec_out;
  std::size_t rec_init_m = 0;
  std::uint64_t rec_seed = 0;
  std::size_t rec_max_iters = SolverConfig{}.max_iters;
  recover->add_option("--instance", rec_instance, "Instance JSON")->required();
  recover->add_option("--method", rec_method, "phasemax|bp|gs");
  recover->add_option("--init", rec_init, "random|spectral|trunc-spectral (default: xhat from the instance)");
  recover->add_option("--init-m", rec_init_m, "Measurements reserved for the initializer");
  recover->add_option("--seed", rec_seed);
  recover->add_option("--max-iters", rec_max_iters);
  recover->add_option("--out", rec_out, "Result JSON (stdout if omitted)");

  // bounds
  auto* bounds = app.add_subcommand("bounds", "Evaluate a closed-form bound");
  std::string b_formula, b_params;
  bounds->add_option("--formula", b_formula, "complex|real|nonuniform|neighbor|small-caps|noise")->required();
  bounds->add_option("--params", b_params, "k=v,... (m, n, alpha|beta_deg, ell, phi, epsilon, r, s, angle)");

  // oracle
  auto* oracle = app.add_subcommand("oracle", "Independent geometric checkers");
  oracle->require_subcommand(1);
  auto* o_regions = oracle->add_subcommand("regions", "Brute-force region count");
  std::size_t o_n = 3, o_k = 5, o_samples = 1000000, o_m = 3, o_trials = 100000, o_probes = 64;
  std::uint64_t o_seed = 1;
  double o_theta_deg = 90.0;
  std::string o_field = "real", o_instance;
  o_regions->add_option("--n", o_n);
  o_regions->add_option("--k", o_k);
  o_regions->add_option("--samples", o_samples);
  o_regions->add_option("--seed", o_seed);
  auto* o_cover = oracle->add_subcommand("cover", "Monte Carlo cap coverage");
  o_cover->add_option("--n", o_n);
  o_cover->add_option("--m", o_m);
  o_cover->add_option("--trials", o_trials);
  o_cover->add_option("--theta-deg", o_theta_deg);
  o_cover->add_option("--probes", o_probes);
  o_cover->add_option("--field", o_field);
  o_cover->add_option("--seed", o_seed);
  auto* o_unique = oracle->add_subcommand("unique", "Uniqueness certificate for a noiseless instance");
  o_unique->add_option("--instance", o_instance)->required();

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Monte Carlo phase-transition sweep");
  std::string s_config, s_out, s_field = "complex", s_grid = "400:1400:50", s_method = "phasemax",
                           s_init = "at-angle", s_ensemble = "unit-sphere";
  std::vector<double> s_beta{45.0};
  std::size_t s_n = 100, s_trials = 100, s_workers = 1, s_init_m = 0;
  std::uint64_t s_seed = 1;
  sweep->add_option("--config", s_config, "Sweep JSON (overrides flags)");
  sweep->add_option("--n", s_n);
  sweep->add_option("--field", s_field);
  sweep->add_option("--ensemble", s_ensemble);
  sweep->add_option("--beta-deg", s_beta)->delimiter(',');
  sweep->add_option("--m-grid", s_grid, "lo:hi:step");
  sweep->add_option("--trials", s_trials);
  sweep->add_option("--method", s_method);
  sweep->add_option("--init", s_init, "at-angle|random|spectral|trunc-spectral");
  sweep->add_option("--init-m", s_init_m);
  sweep->add_option("--seed", s_seed);
  sweep->add_option("--workers", s_workers);
  sweep->add_option("--out", s_out, "CSV output (stdout if omitted)");

  auto* self = app.add_subcommand("selftest", "Reduced-scale invariant suite (JSON report)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*gen) {
      gen_opts.field = field_from_string(gen_field);
      gen_opts.kind = ensemble_kind_from_string(gen_kind);
      gen_opts.noise = noise_model_from_string(gen_noise);
      ProblemInstance inst = gen_instance(gen_opts);
      if (gen_beta_deg != 0.0) {
        Rng rng = make_rng(derive_seed(gen_opts.seed, {9}));
        set_approximation(inst, make_approx_at_angle(*inst.truth, gen_beta_deg * kPi / 180.0, rng));
      }
      write_text(gen_out, instance_to_json(inst).dump() + "\n");
    } else if (*recover) {
      ProblemInstance inst = read_instance(rec_instance);
      SolverConfig cfg;
      cfg.max_iters = rec_max_iters;
      if (!rec_init.empty()) {
        InitializerConfig ic;
        ic.kind = initializer_kind_from_string(rec_init);
        ic.seed = rec_seed;
        if (rec_init_m >= inst.ensemble.m()) throw ConfigError("--init-m must be smaller than m");
        Signal xhat;
        if (ic.kind == InitializerConfig::Kind::Random) {
          Rng rng = make_rng(rec_seed);
          xhat = random_init(inst.ensemble.n(), inst.ensemble.field, rng);
        } else {
          xhat = spectral_init(rec_init_m > 0 ? inst.ensemble.rows(0, rec_init_m) : inst.ensemble, ic).x;
        }
        if (rec_init_m > 0) inst.ensemble = inst.ensemble.rows(rec_init_m, inst.ensemble.m() - rec_init_m);
        if (inst.truth) {
          set_approximation(inst, xhat);
        } else {
          inst.xhat = xhat;
        }
      }
      json out;
      const Method method = method_from_string(rec_method);
      out["method"] = to_string(method);
      if (method == Method::BasisPursuit) {
        const DualSolution d = solve_basis_pursuit(inst.ensemble, inst.xhat, cfg);
        const Signal x = signal_from_dual(inst.ensemble, d);
        out["x_star"] = signal_to_json(x);
        out["z"] = complex_json(d.z);
        out["iterations"] = d.iterations;
        out["converged"] = d.converged;
        out["residuals"] = {{"equality", d.residual}, {"relative_gap", d.relative_gap}};
        out["l1_norm"] = d.l1_norm;
        if (inst.truth) {
          const double e = rre(x, *inst.truth, false);
          out["rre"] = e;
          out["success"] = e < kSuccessRre;
        }
      } else {
        const RecoveryResult r = method == Method::PhaseMax ? solve_phasemax(inst, cfg)
                                                            : gerchberg_saxton(inst, inst.xhat, cfg);
        out["x_star"] = signal_to_json(r.x_star);
        out["iterations"] = r.iterations;
        out["converged"] = r.converged;
        out["residuals"] = {{"max_constraint_violation", r.max_constraint_violation},
                            {"relative_gap", r.relative_gap},
                            {"dual_residual", r.dual_residual}};
        out["objective"] = r.objective;
        out["wall_ms"] = r.wall_ms;
        if (r.rre) {
          out["rre"] = *r.rre;
          out["success"] = *r.success;
        }
      }
      write_text(rec_out, out.dump(2) + "\n");
    } else if (*bounds) {
      std::cout << run_bounds(b_formula, parse_params(b_params)).dump(2) << "\n";
    } else if (*o_regions) {
      Rng rng = make_rng(o_seed);
      const auto count = regions_brute_force(o_n, o_k, rng, o_samples);
      json out{{"n", o_n}, {"k", o_k}, {"samples", o_samples}, {"count", count},
               {"exact", theory::regions_count(o_n, o_k).str()}};
      std::cout << out.dump(2) << "\n";
    } else if (*o_cover) {
      Rng rng = make_rng(o_seed);
      CoverageOptions opts;
      opts.probes = o_probes;
      const Field f = field_from_string(o_field);
      const double theta = o_theta_deg * kPi / 180.0;
      const double freq = coverage_mc(uniform_center_sampler(o_n, f), o_m, theta, o_trials, rng, opts);
      json out{{"n", o_n}, {"m", o_m}, {"trials", o_trials}, {"theta_deg", o_theta_deg}, {"frequency", freq}};
      if (o_theta_deg == 90.0)
        out["halfsphere_cover_prob"] = theory::halfsphere_cover_prob(o_m, f == Field::Complex ? 2 * o_n : o_n);
      std::cout << out.dump(2) << "\n";
    } else if (*o_unique) {
      const ProblemInstance inst = read_instance(o_instance);
      if (!inst.truth) throw ConfigError("instance has no x0");
      const auto rep = uniqueness_check(inst.ensemble, *inst.truth, inst.xhat);
      json out{{"nontrivial", rep.nontrivial},
               {"unique", !rep.nontrivial},
               {"objective_value", rep.objective_value},
               {"generic_directions_tried", rep.generic_directions_tried}};
      if (rep.witness) out["witness"] = signal_to_json(*rep.witness);
      std::cout << out.dump(2) << "\n";
    } else if (*sweep) {
      SweepConfig cfg;
      if (!s_config.empty()) {
        cfg = sweep_config_from_json(read_json(s_config));
      } else {
        try {
          cfg.n = s_n;
          cfg.field = field_from_string(s_field);
          cfg.ensemble = ensemble_kind_from_string(s_ensemble);
          cfg.beta_list.clear();
          for (double b : s_beta) cfg.beta_list.push_back(b * kPi / 180.0);
          cfg.m_grid = parse_grid(s_grid);
          cfg.trials_per_cell = s_trials;
          cfg.method = method_from_string(s_method);
          if (s_init != "at-angle") {
            cfg.init.at_angle = false;
            cfg.init.initializer.kind = initializer_kind_from_string(s_init);
            cfg.init.init_m = s_init_m;
          }
          cfg.seed = s_seed;
          cfg.workers = s_workers;
        } catch (const ConfigError&) {
          throw;
        } catch (const std::invalid_argument& e) {
          throw ConfigError(e.what());
        }
        cfg.validate();
      }
      write_text(s_out, to_csv(run_sweep(cfg)));
    } else if (*self) {
      const json report = selftest();
      std::cout << report.dump(2) << "\n";
      return report.at("passed").get<bool>() ? kExitOk : kExitFailure;
    }
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}
