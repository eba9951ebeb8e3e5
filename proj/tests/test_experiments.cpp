#include <doctest.h>

#include <cmath>

#include <json.hpp>

#include "helpers.hpp"
#include "phasemax/experiments.hpp"
#include "phasemax/oracles.hpp"

using namespace phasemax;
using phasemax::testing::kPi;

namespace {

SweepConfig small_config() {
  SweepConfig cfg;
  cfg.n = 6;
  cfg.beta_list = {kPi / 8, kPi / 4};
  cfg.m_grid = {18, 30, 42};
  cfg.trials_per_cell = 4;
  cfg.seed = 11;
  return cfg;
}

}  // namespace

TEST_CASE("sweep config validation") {
  SweepConfig cfg = small_config();
  CHECK_NOTHROW(cfg.validate());
  cfg.trials_per_cell = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = small_config();
  cfg.m_grid.clear();
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = small_config();
  cfg.beta_list = {2.0};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("grid parsing") {
  CHECK(parse_grid("400:1400:50").size() == 21);
  CHECK(parse_grid("10:10:3") == std::vector<std::size_t>{10});
  CHECK(arithmetic_grid(4, 12, 4) == std::vector<std::size_t>{4, 8, 12});
  CHECK_THROWS_AS(parse_grid("10:5:1"), ConfigError);
  CHECK_THROWS_AS(parse_grid("1:5:0"), ConfigError);
  CHECK_THROWS_AS(parse_grid("a:b:c"), ConfigError);
  CHECK_THROWS_AS(parse_grid("1:5"), ConfigError);
}

TEST_CASE("sweep config from JSON") {
  const auto doc = nlohmann::json::parse(R"({"n": 20, "field": "real", "beta_deg": [25, 45],
    "m_grid": "40:80:20", "trials": 3, "method": "bp", "seed": 9, "workers": 2})");
  const SweepConfig cfg = sweep_config_from_json(doc);
  CHECK(cfg.n == 20);
  CHECK(cfg.field == Field::Real);
  CHECK(cfg.beta_list.size() == 2);
  CHECK(cfg.beta_list[1] == doctest::Approx(kPi / 4));
  CHECK(cfg.m_grid == std::vector<std::size_t>{40, 60, 80});
  CHECK(cfg.method == Method::BasisPursuit);
  CHECK(cfg.workers == 2);
  CHECK_THROWS_AS(sweep_config_from_json(nlohmann::json::parse(R"({"n": 0})")), ConfigError);
  CHECK_THROWS_AS(sweep_config_from_json(nlohmann::json::parse(R"({"method": "magic"})")), std::invalid_argument);
}

TEST_CASE("method names") {
  CHECK(method_from_string("phasemax") == Method::PhaseMax);
  CHECK(method_from_string("bp") == Method::BasisPursuit);
  CHECK(method_from_string("gs") == Method::GerchbergSaxton);
  CHECK_THROWS(method_from_string("wirtinger"));
}

TEST_CASE("trials are deterministic and success matches the threshold") {
  const SweepConfig cfg = small_config();
  const TrialRecord a = run_trial(cfg, 1, 2, 3);
  const TrialRecord b = run_trial(cfg, 1, 2, 3);
  CHECK(a.seed == b.seed);
  CHECK(a.rre == b.rre);
  CHECK(a.success == b.success);
  CHECK(a.iterations == b.iterations);
  CHECK(a.success == (a.rre < kSuccessRre));
  CHECK(a.seed == trial_seed(cfg.seed, 1, 2, 3));
  CHECK(trial_seed(cfg.seed, 1, 2, 3) != trial_seed(cfg.seed, 1, 2, 4));
}

TEST_CASE("zero angle succeeds with ample measurements") {
  // m >= n alone is not enough: see the oracle test for m = n below.
  SweepConfig cfg;
  cfg.n = 8;
  cfg.beta_list = {0.0};
  cfg.m_grid = {56, 64};
  cfg.trials_per_cell = 5;
  for (const SweepRow& row : run_sweep(cfg).rows) CHECK(row.successes == row.trials);
}

TEST_CASE("exact approximation with m = n is generally not unique") {
  int nontrivial = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    InstanceOptions io;
    io.n = 8;
    io.m = 8;
    io.seed = seed;
    const ProblemInstance inst = gen_instance(io);
    nontrivial += uniqueness_check(inst.ensemble, *inst.truth, inst.xhat).nontrivial;
  }
  CHECK(nontrivial >= 9);
}

TEST_CASE("m = n with a poor approximation almost always fails") {
  SweepConfig cfg;
  cfg.n = 10;
  cfg.beta_list = {kPi / 4};
  cfg.m_grid = {10};
  cfg.trials_per_cell = 20;
  CHECK(run_sweep(cfg).rows[0].rate <= 0.1);
}

TEST_CASE("sweep tables do not depend on the worker count") {
  SweepConfig cfg = small_config();
  cfg.workers = 1;
  const SweepTable one = run_sweep(cfg);
  cfg.workers = 3;
  const SweepTable three = run_sweep(cfg);
  CHECK(one == three);
  CHECK(one.rows.size() == 6);
}

TEST_CASE("sweep rows are well formed") {
  const SweepTable t = run_sweep(small_config());
  for (const SweepRow& row : t.rows) {
    CHECK(row.wilson_lo <= row.rate);
    CHECK(row.rate <= row.wilson_hi);
    CHECK(row.rate == doctest::Approx(static_cast<double>(row.successes) / row.trials));
    const double alpha = 1 - row.beta_deg / 90.0;
    CHECK(row.theory_bound ==
          doctest::Approx(theory::phasemax_success_bound(row.m, 6, alpha, Field::Complex).value));
  }
  CHECK(t.rows[0].beta_deg == 22.5);
}

TEST_CASE("basis pursuit and gerchberg-saxton sweeps run") {
  SweepConfig cfg = small_config();
  cfg.beta_list = {kPi / 10};
  cfg.m_grid = {40};
  cfg.method = Method::BasisPursuit;
  CHECK(run_sweep(cfg).rows[0].rate >= 0.75);
  cfg.method = Method::GerchbergSaxton;
  cfg.init.at_angle = false;
  CHECK_NOTHROW(run_sweep(cfg));
}

TEST_CASE("sweep with a separate initialization prefix") {
  SweepConfig cfg = small_config();
  cfg.init.at_angle = false;
  cfg.init.init_m = 60;
  cfg.m_grid = {48};
  cfg.beta_list = {0.0};
  const auto records = run_trials(cfg);
  for (const TrialRecord& r : records) {
    CHECK(r.alpha > 0.0);
    CHECK(r.alpha <= 1.0);
  }
}

TEST_CASE("Wilson interval examples and coverage") {
  const WilsonInterval w0 = wilson_interval(0, 10);
  CHECK(w0.lo == 0.0);
  CHECK(w0.hi > 0.2);
  const WilsonInterval w1 = wilson_interval(10, 10);
  CHECK(w1.hi == doctest::Approx(1.0));
  CHECK(w1.lo < 0.8);
  const WilsonInterval mid = wilson_interval(50, 100);
  CHECK(mid.lo + mid.hi == doctest::Approx(1.0));
  CHECK(wilson_interval(0, 0).lo == 0.0);
  CHECK(wilson_interval(0, 0).hi == 1.0);

  Rng rng = make_rng(70);
  std::bernoulli_distribution coin(0.3);
  int covered = 0;
  const int reps = 1000;
  for (int r = 0; r < reps; ++r) {
    std::size_t s = 0;
    for (int i = 0; i < 100; ++i) s += coin(rng);
    const WilsonInterval w = wilson_interval(s, 100);
    covered += w.lo <= 0.3 && 0.3 <= w.hi;
  }
  CHECK(std::abs(covered / static_cast<double>(reps) - 0.95) <= 0.02);
}

TEST_CASE("CSV round trip") {
  SweepTable t;
  t.rows.push_back({25.0, 400, 100, 3, 0.03, 0.0103, 0.0846, 0.0});
  t.rows.push_back({36.000000000000007, 1400, 100, 100, 1.0, 0.963, 1.0, 0.99999999999999989});
  const std::string csv = to_csv(t);
  CHECK(csv.rfind(sweep_csv_header(), 0) == 0);
  CHECK(sweep_csv_header() == "beta_deg,m,trials,successes,rate,wilson_lo,wilson_hi,theory_bound");
  CHECK(parse_csv(csv) == t);
  CHECK(parse_csv(to_csv(run_sweep(small_config()))) == run_sweep(small_config()));
  CHECK_THROWS(parse_csv("nonsense\n1,2"));
}

TEST_CASE("bound dominance detects a weakened constant") {
  SweepTable t;
  const double n = 100, alpha = 0.5;
  for (std::size_t m = 850; m <= 1400; m += 50) {
    const double p = theory::phasemax_success_bound(static_cast<double>(m), n, alpha, Field::Complex).value;
    SweepRow row;
    row.beta_deg = 45;
    row.m = m;
    row.trials = 100;
    row.successes = static_cast<std::size_t>(std::ceil(p * 100));
    row.rate = static_cast<double>(row.successes) / 100;
    t.rows.push_back(row);
  }
  const BoundFunction honest = [](double m, double nn, double a, Field f) {
    return theory::phasemax_success_bound(m, nn, a, f);
  };
  const BoundFunction mutant = [](double m, double nn, double a, Field) {
    return theory::phasemax_success_bound(m, 0.75 * nn, a, Field::Complex);
  };
  CHECK(check_bound_dominance(t, n, Field::Complex, honest).empty());
  CHECK_FALSE(check_bound_dominance(t, n, Field::Complex, mutant).empty());
}

TEST_CASE("selftest passes and yields a JSON report") {
  const nlohmann::json report = selftest();
  CHECK(report.at("passed").get<bool>());
  CHECK(report.at("checks").is_array());
  CHECK(report.at("checks").size() >= 8);
  for (const auto& c : report.at("checks")) {
    INFO(c.dump());
    CHECK(c.at("passed").get<bool>());
  }
  CHECK(nlohmann::json::parse(report.dump()) == report);
}
