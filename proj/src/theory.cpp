#include "phasemax/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace phasemax::theory {

namespace {

constexpr double kPi = std::numbers::pi;

Rational rational_pow(const Rational& base, std::uint64_t e) {
  const unsigned k = static_cast<unsigned>(e);
  return Rational(boost::multiprecision::pow(numerator(base), k), boost::multiprecision::pow(denominator(base), k));
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

TheoryBound make_bound(FormulaId id, bool valid, double value,
                       std::map<std::string, double> params) {
  TheoryBound b;
  b.formula_id = id;
  b.valid = valid;
  b.value = valid ? clamp01(value) : 0.0;
  b.params = std::move(params);
  return b;
}

}  // namespace

std::string to_string(FormulaId id) {
  switch (id) {
    case FormulaId::NeighborCover: return "neighbor_cover";
    case FormulaId::PhaseMaxComplex: return "phasemax_complex";
    case FormulaId::PhaseMaxReal: return "phasemax_real";
    case FormulaId::NonUniform: return "nonuniform";
    case FormulaId::SmallCapsCover: return "small_caps_cover";
    case FormulaId::NoiseError: return "noise_error";
  }
  return "unknown";
}

BigInt binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  BigInt result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    result *= n - k + i;
    result /= i;
  }
  return result;
}

BigInt regions_count(std::uint64_t n, std::uint64_t k) {
  if (n == 0 || k == 0) throw std::invalid_argument("regions_count: need n >= 1 and k >= 1");
  BigInt sum = 0;
  for (std::uint64_t i = 0; i < n; ++i) sum += binomial(k - 1, i);
  return 2 * sum;
}

Rational halfsphere_cover_prob_exact(std::uint64_t m_a, std::uint64_t n) {
  if (m_a == 0 || n == 0) throw std::invalid_argument("halfsphere_cover_prob: need m_A >= 1 and n >= 1");
  BigInt sum = 0;
  for (std::uint64_t k = 0; k < n; ++k) sum += binomial(m_a - 1, k);
  BigInt denom = BigInt(1) << static_cast<unsigned>(m_a - 1);
  return Rational(1) - Rational(sum, denom);
}

double halfsphere_cover_prob(std::uint64_t m_a, std::uint64_t n) {
  return clamp01(static_cast<double>(halfsphere_cover_prob_exact(m_a, n)));
}

Rational binomial_lower_tail_exact(std::uint64_t m, std::uint64_t k, const Rational& p) {
  if (p < 0 || p > 1) throw std::invalid_argument("binomial tail: p must lie in [0, 1]");
  const Rational q = Rational(1) - p;
  Rational total = 0;
  for (std::uint64_t j = 0; j <= std::min(k, m); ++j) {
    Rational term = Rational(binomial(m, j));
    term *= rational_pow(p, j);
    term *= rational_pow(q, m - j);
    total += term;
  }
  return total;
}

double hoeffding_tail(double m, double k, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("hoeffding_tail: p must lie in [0, 1]");
  if (!(m > 0.0)) throw std::invalid_argument("hoeffding_tail: m must be positive");
  const double excess = p * m - k;
  if (excess <= 0.0) return 1.0;
  return std::exp(-2.0 * excess * excess / m);
}

BigFloat hoeffding_tail_big(std::uint64_t m, std::uint64_t k, const Rational& p) {
  const Rational excess = p * m - k;
  if (excess <= 0) return BigFloat(1);
  const Rational exponent = Rational(-2) * excess * excess / m;
  return boost::multiprecision::exp(BigFloat(exponent));
}

TheoryBound neighbor_cover_bound(double m, double n, double alpha) {
  const bool valid = m > 0.0 && alpha * m > 2.0 * n;
  // P[more than n heads among m coins of bias alpha/2] >= 1 - Hoeffding tail.
  const double value = valid ? 1.0 - hoeffding_tail(m, n, alpha / 2.0) : 0.0;
  return make_bound(FormulaId::NeighborCover, valid, value, {{"m", m}, {"n", n}, {"alpha", alpha}});
}

TheoryBound phasemax_success_bound(double m, double n, double alpha, Field field) {
  // C^n behaves like the real covering problem in dimension 2n.
  const double dim = field == Field::Complex ? 2.0 * n : n;
  TheoryBound b = neighbor_cover_bound(m, dim, alpha);
  b.formula_id = field == Field::Complex ? FormulaId::PhaseMaxComplex : FormulaId::PhaseMaxReal;
  b.params = {{"m", m}, {"n", n}, {"alpha", alpha}};
  return b;
}

double log_complex_sphere_area(double n) { return std::log(2.0) + n * std::log(kPi) - std::lgamma(n); }

TheoryBound nonuniform_bound(double m_d, double n, double alpha, double ell_d) {
  if (ell_d < 0.0) throw std::invalid_argument("nonuniform_bound: ell_D must be >= 0");
  const double log_s = log_complex_sphere_area(n);
  double m_u = 0.0;
  if (ell_d > 0.0) {
    const double raw = std::exp(std::log(m_d) + log_s + std::log(ell_d));
    // Absorb rounding so exact products such as m_D s_n (1/s_n) floor to m_D.
    m_u = std::floor(raw * (1.0 + 1e-12));
  }
  const bool valid = ell_d > 0.0 && m_u > 0.0 && alpha * m_u > 4.0 * n;
  TheoryBound inner = phasemax_success_bound(m_u, n, alpha, Field::Complex);
  return make_bound(FormulaId::NonUniform, valid, valid ? inner.value : 0.0,
                    {{"m_D", m_d}, {"n", n}, {"alpha", alpha}, {"ell_D", ell_d},
                     {"s_n", std::exp(log_s)}, {"m_U", m_u}});
}

CapCoverBound small_caps_cover_bound(double m, double n, double phi) {
  if (!(phi > 0.0 && phi <= kPi / 2 + 1e-15))
    throw std::invalid_argument("small_caps_cover_bound: phi must lie in (0, pi/2]");
  CapCoverBound out;
  CapCoverTrace& t = out.trace;
  const double cos_phi = std::max(std::cos(phi), 0.0);
  const double sin_phi = std::sin(phi);
  t.epsilon_cos = phi >= kPi / 2 ? 0.0 : cos_phi;
  t.lambda_floor = std::pow(sin_phi, n - 1.0) / std::sqrt(8.0 * n);
  t.log_combinatorial_factor = n * std::log(std::numbers::e * m) - (n - 1.0) * std::log(2.0 * n) +
                               0.5 * std::log(std::max(n - 1.0, 0.0));
  t.combinatorial_factor = std::exp(t.log_combinatorial_factor);
  t.exp_term = std::exp(-t.lambda_floor * (m - n));
  t.hoeffding_term = m > 1.0 ? std::exp(-(m - 2.0 * n + 1.0) * (m - 2.0 * n + 1.0) / (2.0 * m - 2.0)) : 1.0;

  double cap_term = 0.0;
  if (t.epsilon_cos > 0.0)
    cap_term = std::exp(t.log_combinatorial_factor - t.lambda_floor * (m - n) + std::log(t.epsilon_cos));
  const bool valid = n >= 9.0 && m > 2.0 * n;
  out.bound = make_bound(FormulaId::SmallCapsCover, valid, 1.0 - cap_term - t.hoeffding_term,
                         {{"m", m}, {"n", n}, {"phi", phi}});
  return out;
}

NoiseConstants noise_constants(const std::vector<double>& b_hat, const std::vector<double>& eta) {
  if (b_hat.size() != eta.size()) throw DimensionError("noise_constants: b_hat and eta differ in length");
  NoiseConstants nc;
  double min_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < b_hat.size(); ++i) {
    const double bh = b_hat[i];
    if (eta[i] < 0.0) nc.nonnegative = false;
    if (eta[i] <= -bh * bh)
      throw std::invalid_argument("noise_constants: eta_" + std::to_string(i) + " <= -bhat_i^2");
    if (bh > 0.0) min_ratio = std::min(min_ratio, (bh * bh + eta[i]) / (bh * bh));
  }
  nc.s = std::min(1.0, std::sqrt(min_ratio));
  // zeta_i = bhat_i^2 (1 - s^2) + eta_i >= 0; r_shrunk = max zeta_i / (s bhat_i).
  for (std::size_t i = 0; i < b_hat.size(); ++i) {
    const double bh = b_hat[i];
    if (bh > 0.0) {
      nc.r = std::max(nc.r, eta[i] / bh);
      const double zeta = bh * bh * (1.0 - nc.s * nc.s) + eta[i];
      nc.r_shrunk = std::max(nc.r_shrunk, zeta / (nc.s * bh));
    } else if (eta[i] > 0.0) {
      nc.r = nc.r_shrunk = std::numeric_limits<double>::infinity();
    }
  }
  nc.r = std::max(nc.r, 0.0);
  return nc;
}

NoiseBound noise_error_bound(double m, double n, double angle_x0_xhat,
                             const std::vector<double>& b_hat, const std::vector<double>& eta,
                             double epsilon, double truth_norm) {
  return noise_error_bound(m, n, angle_x0_xhat, noise_constants(b_hat, eta), epsilon, truth_norm);
}

NoiseBound noise_error_bound(double m, double n, double angle_x0_xhat, const NoiseConstants& nc,
                             double epsilon, double truth_norm) {
  if (!(nc.s > 0.0 && nc.s <= 1.0)) throw std::invalid_argument("noise_error_bound: s must lie in (0, 1]");
  if (!(epsilon > nc.r_shrunk / 2.0))
    throw std::invalid_argument("noise_error_bound: epsilon must exceed r/2 (r = " +
                                std::to_string(nc.r_shrunk) + ")");
  NoiseBound out;
  out.epsilon = epsilon;
  out.r = nc.r;
  out.s = nc.s;
  out.r_shrunk = nc.r_shrunk;
  out.nonnegative_noise = nc.nonnegative;
  out.error_bound = epsilon + (1.0 - nc.s) * truth_norm;
  out.theta = std::acos(std::clamp(nc.r_shrunk / (2.0 * epsilon), 0.0, 1.0));
  out.phi = out.theta - angle_x0_xhat;
  std::map<std::string, double> params{{"m", m}, {"n", n}, {"epsilon", epsilon}, {"r", nc.r},
                                       {"s", nc.s}, {"r_shrunk", nc.r_shrunk}, {"phi", out.phi}};
  if (out.phi > 0.0) {
    // Covering in real dimension 2n; n >= 5 and m > 4n are the same preconditions.
    CapCoverBound cover = small_caps_cover_bound(m, 2.0 * n, std::min(out.phi, kPi / 2));
    out.trace = cover.trace;
    out.probability = make_bound(FormulaId::NoiseError, cover.bound.valid, cover.bound.value, params);
  } else {
    out.probability = make_bound(FormulaId::NoiseError, false, 0.0, params);
  }
  return out;
}

AbsCosMoments expected_abs_cos(double n, Field field) {
  if (!(n >= 1.0)) throw std::invalid_argument("expected_abs_cos: n must be >= 1");
  const double dim = field == Field::Complex ? 2.0 * n : n;
  AbsCosMoments out;
  out.exact = std::exp(std::lgamma(dim / 2.0) - std::lgamma((dim + 1.0) / 2.0)) / std::sqrt(kPi);
  out.lower = std::sqrt(2.0 / (kPi * dim));
  out.upper = std::sqrt(2.0 / (kPi * (dim - 0.5)));
  return out;
}

AlphaFloor random_init_alpha_floor(double n, Field field) {
  if (!(n >= 1.0)) throw std::invalid_argument("random_init_alpha_floor: n must be >= 1");
  const double pi3 = kPi * kPi * kPi;
  AlphaFloor out;
  const double dim = field == Field::Complex ? 2.0 * n : n;
  out.floor = std::sqrt(8.0 / (pi3 * dim));
  out.constant = field == Field::Complex ? 2.0 * std::sqrt(pi3) : std::sqrt(pi3 / 2.0);
  out.measurements = out.constant * std::pow(n, 1.5);
  return out;
}

}  // namespace phasemax::theory
