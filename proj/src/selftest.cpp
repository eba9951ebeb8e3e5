#include <chrono>
#include <cmath>
#include <numbers>

#include "phasemax/experiments.hpp"
#include "phasemax/oracles.hpp"

namespace phasemax {

using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

Check regions_identity() {
  Check c{"regions_identity", true, ""};
  for (std::size_t n = 2; n <= 3; ++n) {
    for (std::size_t k = 1; k <= 5; ++k) {
      Rng rng = make_rng(derive_seed(11, {n, k}));
      const auto brute = regions_brute_force(n, k, rng, 200000);
      const auto exact = theory::regions_count(n, k);
      if (theory::BigInt(brute) != exact) {
        c.passed = false;
        c.detail += "n=" + std::to_string(n) + " k=" + std::to_string(k) + " brute=" + std::to_string(brute) +
                    " exact=" + exact.str() + "; ";
      }
    }
  }
  return c;
}

Check halfsphere_rational() {
  Check c{"halfsphere_rational_identity", true, ""};
  for (std::uint64_t n = 1; n <= 6; ++n) {
    for (std::uint64_t m = 1; m <= 12; ++m) {
      const theory::Rational lhs = theory::halfsphere_cover_prob_exact(m, n);
      const theory::Rational rhs =
          theory::Rational(1) - theory::Rational(theory::regions_count(n, m), theory::BigInt(1) << m);
      if (lhs != rhs) {
        c.passed = false;
        c.detail += "n=" + std::to_string(n) + " m=" + std::to_string(m) + "; ";
      }
    }
  }
  return c;
}

Check coverage_law() {
  Rng rng = make_rng(12);
  CoverageOptions opts;
  opts.probes = 8;
  const std::size_t trials = 4000;
  const double f = coverage_mc(uniform_center_sampler(2, Field::Real), 3, kPi / 2, trials, rng, opts);
  const double p = theory::halfsphere_cover_prob(3, 2);
  const double se = std::sqrt(p * (1 - p) / trials);
  return {"coverage_law", std::abs(f - p) <= 4 * se,
          "freq=" + std::to_string(f) + " exact=" + std::to_string(p)};
}

Check hoeffding_dominance() {
  Check c{"hoeffding_dominance", true, ""};
  for (std::uint64_t m : {10u, 25u, 60u}) {
    for (std::uint64_t k : {1u, 3u, 8u}) {
      for (int pn : {1, 3, 5}) {
        const theory::Rational p(pn, 6);
        const theory::BigFloat exact(theory::binomial_lower_tail_exact(m, k, p));
        if (exact > theory::hoeffding_tail_big(m, k, p) * (1 + 1e-40)) {
          c.passed = false;
          c.detail += "m=" + std::to_string(m) + " k=" + std::to_string(k) + "; ";
        }
      }
    }
  }
  return c;
}

Check duality() {
  InstanceOptions io;
  io.n = 6;
  io.m = 48;
  io.seed = 13;
  ProblemInstance inst = gen_instance(io);
  Rng rng = make_rng(14);
  set_approximation(inst, make_approx_at_angle(*inst.truth, 0.4, rng));
  const RecoveryResult pm = solve_phasemax(inst);
  const DualSolution bp = solve_basis_pursuit(inst.ensemble, inst.xhat);
  const double agree = rre(signal_from_dual(inst.ensemble, bp), pm.x_star, false);
  return {"bp_phasemax_duality", agree < 1e-6 && bp.relative_gap <= 1e-4,
          "rre=" + std::to_string(agree) + " gap=" + std::to_string(bp.relative_gap)};
}

Check uniqueness_agreement() {
  std::size_t agree = 0, total = 0;
  for (std::size_t m = 12; m <= 40; m += 4) {
    for (std::size_t t = 0; t < 3; ++t) {
      InstanceOptions io;
      io.n = 5;
      io.m = m;
      io.seed = derive_seed(15, {m, t});
      ProblemInstance inst = gen_instance(io);
      Rng rng = make_rng(derive_seed(16, {m, t}));
      set_approximation(inst, make_approx_at_angle(*inst.truth, 0.5, rng));
      const bool unique = !uniqueness_check(inst.ensemble, *inst.truth, inst.xhat).nontrivial;
      agree += unique == solve_phasemax(inst).success.value_or(false) ? 1 : 0;
      ++total;
    }
  }
  return {"uniqueness_vs_solver", agree * 10 >= total * 9,
          std::to_string(agree) + "/" + std::to_string(total) + " agree"};
}

SweepConfig small_sweep() {
  SweepConfig cfg;
  cfg.n = 10;
  cfg.beta_list = {kPi / 4};
  cfg.m_grid = arithmetic_grid(40, 160, 20);
  cfg.trials_per_cell = 20;
  cfg.seed = 17;
  return cfg;
}

Check bound_dominance(const SweepTable& table) {
  const auto v = check_bound_dominance(table, 10, Field::Complex, theory::phasemax_success_bound);
  return {"bound_dominance", v.empty(), std::to_string(v.size()) + " violating cells"};
}

theory::TheoryBound mutated_bound(double m, double n, double alpha, Field field) {
  // 4n -> 3n in the complex bound.
  return theory::phasemax_success_bound(m, 0.75 * n, alpha, field);
}

Check mutation_detected() {
  // Test double: a sweep whose rates sit exactly at the true bound.
  SweepTable table;
  const double n = 100;
  for (std::size_t m = 850; m <= 1400; m += 50) {
    SweepRow r;
    r.beta_deg = 45;
    r.m = m;
    r.trials = 10000;
    const double bound = theory::phasemax_success_bound(static_cast<double>(m), n, 0.5, Field::Complex).value;
    r.successes = static_cast<std::size_t>(std::ceil(bound * static_cast<double>(r.trials)));
    r.rate = static_cast<double>(r.successes) / static_cast<double>(r.trials);
    table.rows.push_back(r);
  }
  const auto clean = check_bound_dominance(table, n, Field::Complex, theory::phasemax_success_bound);
  const auto mutant = check_bound_dominance(table, n, Field::Complex, mutated_bound);
  return {"mutation_detected", clean.empty() && !mutant.empty(),
          "clean=" + std::to_string(clean.size()) + " mutant=" + std::to_string(mutant.size())};
}

Check csv_roundtrip(const SweepTable& table) {
  return {"csv_roundtrip", parse_csv(to_csv(table)) == table, ""};
}

Check abs_cos_brackets() {
  Check c{"abs_cos_brackets", true, ""};
  for (double n : {1.0, 2.0, 5.0, 20.0, 100.0}) {
    for (Field f : {Field::Real, Field::Complex}) {
      const auto mom = theory::expected_abs_cos(n, f);
      if (!(mom.lower <= mom.exact && mom.exact <= mom.upper)) {
        c.passed = false;
        c.detail += "n=" + std::to_string(n) + " " + to_string(f) + "; ";
      }
    }
  }
  return c;
}

}  // namespace

json selftest() {
  const auto start = std::chrono::steady_clock::now();
  std::vector<Check> checks;
  auto guarded = [&](const char* name, auto fn) {
    try {
      checks.push_back(fn());
    } catch (const std::exception& e) {
      checks.push_back({name, false, std::string("exception: ") + e.what()});
    }
  };
  guarded("regions_identity", regions_identity);
  guarded("halfsphere_rational_identity", halfsphere_rational);
  guarded("coverage_law", coverage_law);
  guarded("hoeffding_dominance", hoeffding_dominance);
  guarded("abs_cos_brackets", abs_cos_brackets);
  guarded("bp_phasemax_duality", duality);
  guarded("uniqueness_vs_solver", uniqueness_agreement);
  guarded("mutation_detected", mutation_detected);
  SweepTable table;
  try {
    table = run_sweep(small_sweep());
    checks.push_back(bound_dominance(table));
    checks.push_back(csv_roundtrip(table));
  } catch (const std::exception& e) {
    checks.push_back({"bound_dominance", false, std::string("exception: ") + e.what()});
  }

  json report;
  report["checks"] = json::array();
  bool all = true;
  for (const Check& c : checks) {
    all = all && c.passed;
    report["checks"].push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  }
  report["passed"] = all;
  report["elapsed_ms"] =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace phasemax
