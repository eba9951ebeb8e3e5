#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "phasemax/linalg.hpp"

namespace phasemax::theory {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
using BigFloat = boost::multiprecision::cpp_bin_float_50;

enum class FormulaId {
  NeighborCover,       // semisphere neighbour covering (real, dimension n)
  PhaseMaxComplex,     // exact recovery, complex signals
  PhaseMaxReal,        // exact recovery, real signals
  NonUniform,          // exact recovery, non-uniform densities
  SmallCapsCover,      // covering by caps of angle phi
  NoiseError,          // noisy recovery error bound
};

std::string to_string(FormulaId id);

//! A probability lower bound together with the parameters it was built from.
//! Invalid (precondition-violating) bounds report value 0.
struct TheoryBound {
  double value = 0.0;
  bool valid = false;
  std::map<std::string, double> params;
  FormulaId formula_id = FormulaId::NeighborCover;
};

//! Intermediate quantities of the small-cap covering bound.
struct CapCoverTrace {
  double epsilon_cos = 0.0;            // cos(phi)
  double lambda_floor = 0.0;           // sin^{n-1}(phi) / sqrt(8n)
  double log_combinatorial_factor = 0.0;
  double combinatorial_factor = 0.0;   // (em)^n sqrt(n-1) / (2n)^{n-1}, may be +inf
  double exp_term = 0.0;               // exp(-lambda_floor (m - n))
  double hoeffding_term = 0.0;         // exp(-(m-2n+1)^2 / (2m-2))
};

// ---- exact combinatorics -------------------------------------------------

BigInt binomial(std::uint64_t n, std::uint64_t k);

//! Number of regions cut from S^{n-1} by k generic planes through the origin:
//! 2 sum_{i<n} C(k-1, i).
BigInt regions_count(std::uint64_t n, std::uint64_t k);

//! Probability that m_A random semisphere caps drawn from a symmetric set cover
//! S^{n-1}: 1 - 2^{1-m_A} sum_{k<n} C(m_A - 1, k).
double halfsphere_cover_prob(std::uint64_t m_a, std::uint64_t n);
Rational halfsphere_cover_prob_exact(std::uint64_t m_a, std::uint64_t n);

//! P[Binomial(m, p) <= k], exact.
Rational binomial_lower_tail_exact(std::uint64_t m, std::uint64_t k, const Rational& p);

//! Hoeffding bound exp(-2 (p m - k)^2 / m) on P[Binomial(m, p) <= k]; 1 when p m <= k.
double hoeffding_tail(double m, double k, double p);
BigFloat hoeffding_tail_big(std::uint64_t m, std::uint64_t k, const Rational& p);

// ---- recovery bounds -----------------------------------------------------

//! 1 - exp(-(alpha m - 2n)^2 / (2m)), valid for alpha m > 2n.
TheoryBound neighbor_cover_bound(double m, double n, double alpha);

//! Exact-recovery lower bound: dimension constant 4n (complex) or 2n (real).
TheoryBound phasemax_success_bound(double m, double n, double alpha, Field field);

//! Non-uniform density D >= ell_D on the complex sphere: reduces to the uniform
//! bound at m_U = floor(m_D s_n ell_D), s_n = 2 pi^n / Gamma(n).
TheoryBound nonuniform_bound(double m_d, double n, double alpha, double ell_d);

//! log s_n for the complex sphere in C^n.
double log_complex_sphere_area(double n);

struct CapCoverBound {
  TheoryBound bound;
  CapCoverTrace trace;
};

//! Covering S^{n-1} with m uniform caps of angle phi; valid for n >= 9, m > 2n.
CapCoverBound small_caps_cover_bound(double m, double n, double phi);

struct NoiseBound {
  TheoryBound probability;  // small_caps_cover_bound(m, 2n, phi)
  CapCoverTrace trace;
  double error_bound = 0.0;  // epsilon + (1 - s) |x0|
  double epsilon = 0.0;
  double r = 0.0;            // max eta_i / bhat_i (nonnegative noise)
  double s = 1.0;            // shrink factor, min(1, min_i b_i / bhat_i)
  double r_shrunk = 0.0;     // max_i zeta_i / (s bhat_i)
  double theta = 0.0;        // arccos(r_shrunk / (2 epsilon))
  double phi = 0.0;          // theta - angle(x0, xhat)
  bool nonnegative_noise = true;
};

//! Shrink factor and effective relative noise of a noisy instance.
struct NoiseConstants {
  double r = 0.0;
  double s = 1.0;
  double r_shrunk = 0.0;
  bool nonnegative = true;
};
NoiseConstants noise_constants(const std::vector<double>& b_hat, const std::vector<double>& eta);

//! Error bound |x* - x0| <= epsilon + (1 - s)|x0| and the probability it holds.
//! Throws std::invalid_argument when epsilon <= r_shrunk / 2.
NoiseBound noise_error_bound(double m, double n, double angle_x0_xhat,
                             const std::vector<double>& b_hat, const std::vector<double>& eta,
                             double epsilon, double truth_norm = 1.0);
NoiseBound noise_error_bound(double m, double n, double angle_x0_xhat, const NoiseConstants& constants,
                             double epsilon, double truth_norm = 1.0);

// ---- random approximation vectors ----------------------------------------

struct AbsCosMoments {
  double exact = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

//! E|cos beta| between independent uniform points on the sphere of H^n.
AbsCosMoments expected_abs_cos(double n, Field field);

struct AlphaFloor {
  double floor = 0.0;      // lower bound on E[alpha]
  double constant = 0.0;   // c in m > c n^{3/2}
  double measurements = 0.0;  // c n^{3/2}
};

AlphaFloor random_init_alpha_floor(double n, Field field);

}  // namespace phasemax::theory
