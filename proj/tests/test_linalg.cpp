#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "phasemax/linalg.hpp"
#include "phasemax/rng.hpp"

using namespace phasemax;
using phasemax::testing::kPi;

namespace {

Signal cx(std::initializer_list<Cx> v) {
  CxVector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index k = 0;
  for (Cx z : v) out[k++] = z;
  return Signal(out, Field::Complex);
}

Signal random_signal(std::size_t n, Rng& rng) {
  std::normal_distribution<double> nd;
  CxVector v(static_cast<Eigen::Index>(n));
  for (auto& z : v) z = Cx(nd(rng), nd(rng));
  return Signal(v, Field::Complex);
}

}  // namespace

TEST_CASE("phase of zero, positive real and imaginary values") {
  CHECK(phase(Cx(0, 0)) == Cx(1, 0));
  CHECK(phase(Cx(3, 0)) == Cx(1, 0));
  const Cx p = phase(Cx(0, -2));
  CHECK(p.real() == doctest::Approx(0.0));
  CHECK(p.imag() == doctest::Approx(-1.0));
}

TEST_CASE("phase has unit modulus everywhere") {
  Rng rng = make_rng(1);
  std::normal_distribution<double> nd;
  for (int i = 0; i < 1000; ++i) {
    const Cx z(nd(rng) * std::pow(10.0, nd(rng) * 3), nd(rng));
    CHECK(std::abs(phase(z)) == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("inner product conjugates the first slot") {
  CHECK(inner(Signal::basis(3, 0, Field::Complex), Signal::basis(3, 0, Field::Complex)) == Cx(1, 0));
  const Cx v = inner(cx({Cx(0, 1), 0}), cx({1, 0}));
  CHECK(v.real() == doctest::Approx(0.0));
  CHECK(v.imag() == doctest::Approx(-1.0));
  const double r = 1 / std::sqrt(2.0);
  CHECK(std::abs(inner(cx({r, r}), cx({r, -r}))) < 1e-15);
}

TEST_CASE("inner rejects mismatched lengths") {
  CHECK_THROWS_AS(inner(Signal::zeros(2, Field::Complex), Signal::zeros(3, Field::Complex)), DimensionError);
}

TEST_CASE("inner of a vector with itself is its squared norm") {
  Rng rng = make_rng(2);
  for (int i = 0; i < 20; ++i) {
    const Signal x = random_signal(7, rng);
    const Cx v = inner(x, x);
    CHECK(v.imag() == doctest::Approx(0.0));
    CHECK(v.real() == doctest::Approx(x.squared_norm()));
  }
}

TEST_CASE("real part of inner is real-bilinear") {
  Rng rng = make_rng(3);
  const Signal a = random_signal(5, rng), b = random_signal(5, rng), c = random_signal(5, rng);
  const double s = 1.7, t = -0.3;
  const double lhs = inner(a.scaled(s) + b.scaled(t), c).real();
  CHECK(lhs == doctest::Approx(s * inner(a, c).real() + t * inner(b, c).real()));
}

TEST_CASE("angle_between examples") {
  const Signal x = cx({Cx(1, 2), Cx(-1, 0.5)});
  CHECK(angle_between(x, x) == doctest::Approx(0.0));
  CHECK(angle_between(x, -x) == doctest::Approx(kPi));
  CHECK(angle_between(Signal::basis(2, 0, Field::Real), Signal::basis(2, 1, Field::Real)) ==
        doctest::Approx(kPi / 2));
  CHECK_THROWS(angle_between(x, Signal::zeros(2, Field::Complex)));
}

TEST_CASE("angle_between is symmetric and scale invariant") {
  Rng rng = make_rng(4);
  for (int i = 0; i < 50; ++i) {
    const Signal x = random_signal(6, rng), y = random_signal(6, rng);
    const double a = angle_between(x, y);
    CHECK(a >= 0.0);
    CHECK(a <= kPi);
    CHECK(angle_between(y, x) == doctest::Approx(a));
    CHECK(angle_between(x.scaled(3.5), y.scaled(0.01)) == doctest::Approx(a));
  }
}

TEST_CASE("angle_between clamps rounding outside [-1, 1]") {
  const Signal x = cx({Cx(0.1, 0.2), Cx(0.3, 0.7)});
  CHECK(std::isfinite(angle_between(x, x.scaled(1.0 + 1e-16))));
}

TEST_CASE("align examples") {
  const Signal ref = cx({Cx(1, 1), Cx(2, 0)});
  const Signal aligned = align(ref.scaled(2.0), ref);
  CHECK((aligned - ref.scaled(2.0)).norm() < 1e-14);

  const Signal rotated = ref.scaled(Cx(0, 1));
  CHECK((align(rotated, ref) - ref).norm() < 1e-14);

  const Signal orth = cx({Cx(2, 0), Cx(-1, 1)});  // <orth, ref> = 0
  REQUIRE(std::abs(inner(orth, ref)) < 1e-14);
  CHECK((align(orth, ref) - orth).norm() == 0.0);
}

TEST_CASE("align is idempotent, norm preserving and leaves a nonnegative real inner product") {
  Rng rng = make_rng(5);
  for (int i = 0; i < 100; ++i) {
    const Signal x = random_signal(4, rng), r = random_signal(4, rng);
    const Signal a = align(x, r);
    CHECK(a.norm() == doctest::Approx(x.norm()));
    const Cx ip = inner(a, r);
    CHECK(std::abs(ip.imag()) < 1e-12 * x.norm() * r.norm());
    CHECK(ip.real() >= 0.0);
    CHECK((align(a, r) - a).norm() < 1e-13);
  }
}

TEST_CASE("real signals reject imaginary parts and complex scaling") {
  CxVector v(2);
  v << Cx(1, 0), Cx(0, 1e-3);
  CHECK_THROWS(Signal(v, Field::Real));
  const Signal r = Signal::basis(2, 0, Field::Real);
  CHECK_THROWS(r.scaled(Cx(0, 1)));
  CHECK(r.scaled(-2.0).is_real());
}

TEST_CASE("signals reject empty and non-finite data") {
  CHECK_THROWS(Signal(CxVector(0), Field::Complex));
  CxVector v(1);
  v << Cx(std::nan(""), 0);
  CHECK_THROWS(Signal(v, Field::Complex));
}

TEST_CASE("derived seeds are stable and key sensitive") {
  CHECK(derive_seed(1, {2, 3}) == derive_seed(1, {2, 3}));
  CHECK(derive_seed(1, {2, 3}) != derive_seed(1, {3, 2}));
  CHECK(derive_seed(1, {2}) != derive_seed(2, {2}));
}
