#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "helpers.hpp"
#include "phasemax/initializers.hpp"
#include "phasemax/theory.hpp"

using namespace phasemax;

namespace {

ProblemInstance gaussian_instance(std::size_t n, std::size_t m, std::uint64_t seed) {
  InstanceOptions io;
  io.n = n;
  io.m = m;
  io.kind = EnsembleKind::Gaussian;
  io.seed = seed;
  return gen_instance(io);
}

double cos2(const Signal& a, const Signal& b) {
  const double c = std::abs(inner(a, b)) / (a.norm() * b.norm());
  return c * c;
}

}  // namespace

TEST_CASE("initializer config validation and names") {
  InitializerConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.power_tol = 0.0;
  CHECK_THROWS(cfg.validate());
  cfg = {};
  cfg.truncation_factor = -1.0;
  CHECK_THROWS(cfg.validate());
  CHECK(initializer_kind_from_string("trunc-spectral") == InitializerConfig::Kind::TruncatedSpectral);
  CHECK(initializer_kind_from_string("spectral") == InitializerConfig::Kind::Spectral);
  CHECK(initializer_kind_from_string("random") == InitializerConfig::Kind::Random);
  CHECK_THROWS(initializer_kind_from_string("oracle"));
}

TEST_CASE("random init has unit norm and its accuracy clears the floor") {
  Rng rng = make_rng(20);
  const std::size_t n = 10;
  const Signal truth = sample_unit_sphere(n, Field::Real, rng);
  const int draws = 100000;
  double sum = 0, sq = 0;
  for (int i = 0; i < draws; ++i) {
    const Signal x = random_init(n, Field::Real, rng);
    REQUIRE(std::abs(x.norm() - 1.0) < 1e-12);
    // the sign of a real approximation is free, so use |cos|
    const double a = 1.0 - 2.0 / phasemax::testing::kPi * std::acos(std::min(1.0, std::abs(inner(truth, x).real())));
    sum += a;
    sq += a * a;
  }
  const double mean = sum / draws;
  const double se = std::sqrt((sq / draws - mean * mean) / draws);
  const double floor = std::sqrt(8.0 / (phasemax::testing::kPi * phasemax::testing::kPi * phasemax::testing::kPi * n));
  CHECK(mean >= floor - 3 * se);
}

TEST_CASE("n = 1 real random init is a sign") {
  Rng rng = make_rng(21);
  for (int i = 0; i < 10; ++i) CHECK(std::abs(random_init(1, Field::Real, rng)[0].real()) == doctest::Approx(1.0));
}

TEST_CASE("spectral init with one measurement is parallel to it") {
  ProblemInstance inst = gaussian_instance(5, 1, 22);
  InitializerConfig cfg;
  cfg.kind = InitializerConfig::Kind::Spectral;
  const SpectralResult r = spectral_init(inst.ensemble, cfg);
  const Signal a1(inst.ensemble.vectors.row(0).transpose(), Field::Complex);
  CHECK(cos2(r.x, a1) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("truncated spectral init correlates with the truth at m = 10n") {
  const std::size_t n = 50;
  int good = 0;
  for (int t = 0; t < 100; ++t) {
    ProblemInstance inst = gaussian_instance(n, 10 * n, 1000 + t);
    InitializerConfig cfg;
    cfg.seed = static_cast<std::uint64_t>(t);
    const SpectralResult r = spectral_init(inst.ensemble, cfg);
    good += cos2(r.x, *inst.truth) > 0.3;
  }
  CHECK(good >= 95);
}

TEST_CASE("huge truncation factor reproduces the plain spectral method") {
  ProblemInstance inst = gaussian_instance(8, 60, 23);
  InitializerConfig plain;
  plain.kind = InitializerConfig::Kind::Spectral;
  plain.seed = 4;
  InitializerConfig trunc = plain;
  trunc.kind = InitializerConfig::Kind::TruncatedSpectral;
  trunc.truncation_factor = 1e12;
  const SpectralResult a = spectral_init(inst.ensemble, plain);
  const SpectralResult b = spectral_init(inst.ensemble, trunc);
  CHECK((a.x - b.x).norm() == 0.0);
  CHECK(a.iterations == b.iterations);
}

TEST_CASE("degenerate truncation that drops every row is an error") {
  ProblemInstance inst = gaussian_instance(4, 20, 24);
  InitializerConfig cfg;
  cfg.truncation_factor = 1e-9;
  CHECK_THROWS(spectral_init(inst.ensemble, cfg));
}

TEST_CASE("spectral direction is invariant to measurement order") {
  ProblemInstance inst = gaussian_instance(6, 80, 25);
  InitializerConfig cfg;
  cfg.power_tol = 1e-14;
  cfg.power_iters = 5000;
  const SpectralResult a = spectral_init(inst.ensemble, cfg);

  MeasurementEnsemble perm = inst.ensemble;
  std::vector<Eigen::Index> order(perm.m());
  std::iota(order.begin(), order.end(), 0);
  Rng rng = make_rng(1);
  std::shuffle(order.begin(), order.end(), rng);
  for (std::size_t i = 0; i < order.size(); ++i) {
    perm.vectors.row(static_cast<Eigen::Index>(i)) = inst.ensemble.vectors.row(order[i]);
    perm.b[i] = inst.ensemble.b[static_cast<std::size_t>(order[i])];
    perm.eta[i] = inst.ensemble.eta[static_cast<std::size_t>(order[i])];
  }
  const SpectralResult b = spectral_init(perm, cfg);
  CHECK(cos2(a.x, b.x) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(a.x.norm() == doctest::Approx(b.x.norm()));
}

TEST_CASE("scaling magnitudes leaves the spectral direction unchanged") {
  ProblemInstance inst = gaussian_instance(6, 80, 26);
  InitializerConfig cfg;
  cfg.power_tol = 1e-14;
  cfg.power_iters = 5000;
  const SpectralResult a = spectral_init(inst.ensemble, cfg);
  MeasurementEnsemble scaled = inst.ensemble;
  for (double& v : scaled.b) v *= 7.0;
  const SpectralResult b = spectral_init(scaled, cfg);
  CHECK(cos2(a.x, b.x) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(b.x.norm() == doctest::Approx(7.0 * a.x.norm()));
}

TEST_CASE("Rayleigh quotients never decrease") {
  ProblemInstance inst = gaussian_instance(10, 100, 27);
  InitializerConfig cfg;
  cfg.power_tol = 1e-13;
  const SpectralResult r = spectral_init(inst.ensemble, cfg);
  REQUIRE(r.rayleigh_history.size() >= 2);
  for (std::size_t k = 1; k < r.rayleigh_history.size(); ++k)
    CHECK(r.rayleigh_history[k] >= r.rayleigh_history[k - 1] - 1e-12 * std::abs(r.rayleigh_history[k]));
  CHECK(r.rayleigh == doctest::Approx(r.rayleigh_history.back()));
}

TEST_CASE("spectral output norm defaults to the estimate and honours scale_to") {
  ProblemInstance inst = gaussian_instance(5, 50, 28);
  InitializerConfig cfg;
  CHECK(spectral_init(inst.ensemble, cfg).x.norm() == doctest::Approx(norm_estimate(inst.ensemble)));
  cfg.scale_to = 2.5;
  CHECK(spectral_init(inst.ensemble, cfg).x.norm() == doctest::Approx(2.5));
}

TEST_CASE("real ensembles give real spectral output") {
  InstanceOptions io;
  io.n = 6;
  io.m = 40;
  io.field = Field::Real;
  io.seed = 29;
  const SpectralResult r = spectral_init(gen_instance(io).ensemble, InitializerConfig{});
  CHECK(r.x.is_real());
  CHECK(r.x.values().imag().norm() == 0.0);
}
