#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "phasemax/linalg.hpp"
#include "phasemax/rng.hpp"

namespace phasemax {

enum class EnsembleKind { UnitSphere, Gaussian };

std::string to_string(EnsembleKind kind);
EnsembleKind ensemble_kind_from_string(const std::string& name);

//! Families of measurement noise.
//!
//! Levels are relative to the clean magnitudes so the noise constants of the
//! error bounds can be read off the instance exactly:
//!  - NonnegUniform(l):    eta_i ~ U[0, l * bhat_i]
//!  - SymmetricUniform(l): eta_i ~ U[-l * bhat_i^2, l * bhat_i^2], l < 1
//!  - RelativeBounded(r):  eta_i = r * bhat_i (every ratio eta_i/bhat_i equal to r)
struct NoiseModel {
  enum class Kind { None, NonnegUniform, SymmetricUniform, RelativeBounded };
  Kind kind = Kind::None;
  double level = 0.0;

  static NoiseModel none() { return {}; }
  static NoiseModel nonneg_uniform(double level) { return {Kind::NonnegUniform, level}; }
  static NoiseModel symmetric_uniform(double level) { return {Kind::SymmetricUniform, level}; }
  static NoiseModel relative_bounded(double r) { return {Kind::RelativeBounded, r}; }

  bool is_none() const { return kind == Kind::None; }
};

std::string to_string(const NoiseModel& model);
//! Parses "none", "nonneg:0.1", "symmetric:0.5", "relative:0.2".
NoiseModel noise_model_from_string(const std::string& text);

//! Measurement vectors a_i (row i of `vectors`), magnitudes b_i and noise eta_i.
struct MeasurementEnsemble {
  CxMatrix vectors;  // m x n, row i holds a_i
  std::vector<double> b;
  std::vector<double> eta;
  Field field = Field::Complex;
  bool normalized = false;
  std::uint64_t seed = 0;

  std::size_t m() const { return static_cast<std::size_t>(vectors.rows()); }
  std::size_t n() const { return static_cast<std::size_t>(vectors.cols()); }

  //! (<a_i, x>)_i
  CxVector measure(const CxVector& x) const;
  //! sum_i a_i u_i, the adjoint of measure().
  CxVector adjoint(const CxVector& u) const;

  Eigen::Map<const RealVector> b_vector() const {
    return {b.data(), static_cast<Eigen::Index>(b.size())};
  }

  //! Returns the ensemble restricted to rows [first, first + count).
  MeasurementEnsemble rows(std::size_t first, std::size_t count) const;

  //! Throws std::invalid_argument if shapes or invariants are violated.
  void validate() const;
};

struct ProblemInstance {
  MeasurementEnsemble ensemble;
  Signal xhat;
  std::optional<Signal> truth;
  std::optional<double> alpha;
};

//! Accuracy 1 - (2/pi) angle(x0, xhat).
double accuracy_alpha(const Signal& truth, const Signal& xhat);

//! Replaces the approximation vector, re-aligning the truth with it and
//! recomputing alpha. Magnitudes are unaffected by the global rotation.
void set_approximation(ProblemInstance& instance, Signal xhat);

Signal sample_unit_sphere(std::size_t n, Field field, Rng& rng);

//! Standard Gaussian vector: N(0,1) entries (real) or CN(0,1) entries (complex).
CxVector sample_gaussian(std::size_t n, Field field, Rng& rng);

struct InstanceOptions {
  std::size_t n = 1;
  std::size_t m = 1;
  Field field = Field::Complex;
  EnsembleKind kind = EnsembleKind::UnitSphere;
  NoiseModel noise;
  std::uint64_t seed = 0;
  double truth_norm = 1.0;
};

//! Generates x0, the measurement vectors and b_i = sqrt(|<a_i,x0>|^2 + eta_i).
//!
//! The approximation vector is initialised to x0 itself (alpha = 1); callers
//! install a real approximation with set_approximation().
ProblemInstance gen_instance(const InstanceOptions& options);

//! Vector at angle beta from truth with the same norm; <truth, result> is real
//! and nonnegative whenever n >= 2 (or the field is real).
Signal make_approx_at_angle(const Signal& truth, double beta, Rng& rng);

//! Noise draws for clean squared magnitudes bhat_i^2.
std::vector<double> apply_noise(const std::vector<double>& clean_squared, const NoiseModel& model,
                                Rng& rng);

}  // namespace phasemax
