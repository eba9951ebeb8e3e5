#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "phasemax/ensembles.hpp"
#include "phasemax/linalg.hpp"
#include "phasemax/rng.hpp"

namespace phasemax {

struct InitializerConfig {
  enum class Kind { Random, Spectral, TruncatedSpectral };
  Kind kind = Kind::TruncatedSpectral;
  std::size_t power_iters = 500;
  double power_tol = 1e-10;
  //! Measurements with b_i > truncation_factor * sqrt(mean(b^2)) get weight 0.
  double truncation_factor = 3.0;
  //! Output norm; <= 0 selects the norm estimate from the magnitudes.
  double scale_to = 0.0;
  //! Seed of the power-iteration start vector.
  std::uint64_t seed = 0;

  void validate() const;
};

std::string to_string(InitializerConfig::Kind kind);
//! Parses "random", "spectral", "trunc-spectral".
InitializerConfig::Kind initializer_kind_from_string(const std::string& name);

//! Uniform point on the unit sphere of H^n.
Signal random_init(std::size_t n, Field field, Rng& rng);

struct SpectralResult {
  Signal x;
  bool converged = false;
  std::size_t iterations = 0;
  //! Rayleigh quotient v^* Y v of the unit iterate, per iteration.
  std::vector<double> rayleigh_history;
  double rayleigh = 0.0;
};

//! Leading eigenvector of Y = (1/m) sum_i w_i b_i^2 a_i a_i^* by power iteration.
SpectralResult spectral_init(const MeasurementEnsemble& ensemble, const InitializerConfig& cfg);

//! Estimate of |x0| from the magnitudes: sqrt(n mean(b^2) / mean(|a_i|^2)).
double norm_estimate(const MeasurementEnsemble& ensemble);

}  // namespace phasemax
