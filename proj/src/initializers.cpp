#include "phasemax/initializers.hpp"

#include <cmath>
#include <stdexcept>

namespace phasemax {

void InitializerConfig::validate() const {
  if (!(power_tol > 0.0)) throw std::invalid_argument("initializer: power_tol must be positive");
  if (!(truncation_factor > 0.0))
    throw std::invalid_argument("initializer: truncation_factor must be positive");
  if (power_iters == 0) throw std::invalid_argument("initializer: power_iters must be >= 1");
}

std::string to_string(InitializerConfig::Kind kind) {
  switch (kind) {
    case InitializerConfig::Kind::Random: return "random";
    case InitializerConfig::Kind::Spectral: return "spectral";
    case InitializerConfig::Kind::TruncatedSpectral: return "trunc-spectral";
  }
  return "unknown";
}

InitializerConfig::Kind initializer_kind_from_string(const std::string& name) {
  if (name == "random") return InitializerConfig::Kind::Random;
  if (name == "spectral") return InitializerConfig::Kind::Spectral;
  if (name == "trunc-spectral" || name == "truncated-spectral")
    return InitializerConfig::Kind::TruncatedSpectral;
  throw std::invalid_argument("unknown initializer '" + name + "'");
}

Signal random_init(std::size_t n, Field field, Rng& rng) { return sample_unit_sphere(n, field, rng); }

double norm_estimate(const MeasurementEnsemble& ensemble) {
  const double mean_b2 = ensemble.b_vector().squaredNorm() / static_cast<double>(ensemble.m());
  const double mean_row2 = ensemble.vectors.squaredNorm() / static_cast<double>(ensemble.m());
  return std::sqrt(static_cast<double>(ensemble.n()) * mean_b2 / mean_row2);
}

SpectralResult spectral_init(const MeasurementEnsemble& ensemble, const InitializerConfig& cfg) {
  cfg.validate();
  ensemble.validate();
  const std::size_t m = ensemble.m();
  const std::size_t n = ensemble.n();

  const RealVector b = ensemble.b_vector();
  const double mean_b2 = b.squaredNorm() / static_cast<double>(m);
  RealVector weights(static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i) {
    const double b2 = b[static_cast<Eigen::Index>(i)] * b[static_cast<Eigen::Index>(i)];
    double w = 1.0;
    // Keep b_i <= factor * rms(b), i.e. b_i^2 <= factor^2 mean(b^2).
    if (cfg.kind == InitializerConfig::Kind::TruncatedSpectral &&
        b2 > cfg.truncation_factor * cfg.truncation_factor * mean_b2)
      w = 0.0;
    weights[static_cast<Eigen::Index>(i)] = w * b2 / static_cast<double>(m);
  }
  if (weights.maxCoeff() <= 0.0)
    throw std::invalid_argument("spectral_init: every measurement weight is zero");

  // Y v = (1/m) sum_i w_i b_i^2 a_i <a_i, v>
  auto apply = [&](const CxVector& v) -> CxVector {
    CxVector inner = ensemble.measure(v);
    inner.array() *= weights.array().cast<Cx>();
    return ensemble.adjoint(inner);
  };

  Rng rng = make_rng(cfg.seed);
  CxVector v = sample_unit_sphere(n, ensemble.field, rng).values();
  SpectralResult out;
  double previous = -1.0;
  for (std::size_t it = 0; it < cfg.power_iters; ++it) {
    CxVector yv = apply(v);
    const double rq = inner(v, yv).real();
    out.rayleigh_history.push_back(rq);
    out.iterations = it + 1;
    const double nrm = yv.norm();
    if (nrm == 0.0) break;
    if (std::abs(rq - previous) < cfg.power_tol * std::max(1.0, std::abs(rq))) {
      out.converged = true;
      break;
    }
    previous = rq;
    v = yv / nrm;
    if (ensemble.field == Field::Real) v = v.real().cast<Cx>();
  }
  out.rayleigh = out.rayleigh_history.back();
  const double scale = cfg.scale_to > 0.0 ? cfg.scale_to : norm_estimate(ensemble);
  out.x = Signal(v, ensemble.field).scaled(scale / v.norm());
  return out;
}

}  // namespace phasemax
