#include "phasemax/ensembles.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace phasemax {

std::string to_string(EnsembleKind kind) {
  return kind == EnsembleKind::UnitSphere ? "unit-sphere" : "gaussian";
}

EnsembleKind ensemble_kind_from_string(const std::string& name) {
  if (name == "unit-sphere" || name == "sphere") return EnsembleKind::UnitSphere;
  if (name == "gaussian") return EnsembleKind::Gaussian;
  throw std::invalid_argument("unknown ensemble '" + name + "' (expected unit-sphere|gaussian)");
}

std::string to_string(const NoiseModel& model) {
  std::ostringstream out;
  switch (model.kind) {
    case NoiseModel::Kind::None: return "none";
    case NoiseModel::Kind::NonnegUniform: out << "nonneg:"; break;
    case NoiseModel::Kind::SymmetricUniform: out << "symmetric:"; break;
    case NoiseModel::Kind::RelativeBounded: out << "relative:"; break;
  }
  out << model.level;
  return out.str();
}

NoiseModel noise_model_from_string(const std::string& text) {
  if (text.empty() || text == "none") return NoiseModel::none();
  const auto colon = text.find(':');
  if (colon == std::string::npos)
    throw std::invalid_argument("noise model '" + text + "' needs the form kind:level");
  const std::string kind = text.substr(0, colon);
  const double level = std::stod(text.substr(colon + 1));
  if (kind == "nonneg") return NoiseModel::nonneg_uniform(level);
  if (kind == "symmetric") return NoiseModel::symmetric_uniform(level);
  if (kind == "relative") return NoiseModel::relative_bounded(level);
  throw std::invalid_argument("unknown noise kind '" + kind + "'");
}

CxVector MeasurementEnsemble::measure(const CxVector& x) const {
  if (x.size() != vectors.cols()) throw DimensionError("measure: signal length differs from n");
  return vectors.conjugate() * x;
}

CxVector MeasurementEnsemble::adjoint(const CxVector& u) const {
  if (u.size() != vectors.rows()) throw DimensionError("adjoint: vector length differs from m");
  return vectors.transpose() * u;
}

MeasurementEnsemble MeasurementEnsemble::rows(std::size_t first, std::size_t count) const {
  if (first + count > m()) throw DimensionError("rows: range exceeds ensemble size");
  MeasurementEnsemble out;
  out.vectors = vectors.middleRows(static_cast<Eigen::Index>(first), static_cast<Eigen::Index>(count));
  out.b.assign(b.begin() + static_cast<std::ptrdiff_t>(first),
               b.begin() + static_cast<std::ptrdiff_t>(first + count));
  if (!eta.empty())
    out.eta.assign(eta.begin() + static_cast<std::ptrdiff_t>(first),
                   eta.begin() + static_cast<std::ptrdiff_t>(first + count));
  out.field = field;
  out.normalized = normalized;
  out.seed = seed;
  return out;
}

void MeasurementEnsemble::validate() const {
  if (vectors.rows() == 0 || vectors.cols() == 0)
    throw std::invalid_argument("ensemble needs m >= 1 and n >= 1");
  if (b.size() != m()) throw DimensionError("ensemble: b has " + std::to_string(b.size()) +
                                            " entries, expected m = " + std::to_string(m()));
  if (!eta.empty() && eta.size() != m()) throw DimensionError("ensemble: eta length differs from m");
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (!(b[i] >= 0.0) || !std::isfinite(b[i]))
      throw std::invalid_argument("ensemble: magnitude b_" + std::to_string(i) +
                                  " is negative or not finite");
  }
  if (field == Field::Real && vectors.imag().cwiseAbs().maxCoeff() != 0.0)
    throw std::invalid_argument("ensemble: real field with complex measurement vectors");
  if (normalized) {
    for (Eigen::Index i = 0; i < vectors.rows(); ++i) {
      if (std::abs(vectors.row(i).norm() - 1.0) > 1e-12)
        throw std::invalid_argument("ensemble: row " + std::to_string(i) + " is not unit norm");
    }
  }
}

double accuracy_alpha(const Signal& truth, const Signal& xhat) {
  return 1.0 - (2.0 / std::numbers::pi) * angle_between(truth, xhat);
}

void set_approximation(ProblemInstance& instance, Signal xhat) {
  if (xhat.size() != instance.ensemble.n())
    throw DimensionError("approximation length differs from n");
  if (xhat.norm() == 0.0) throw std::invalid_argument("approximation vector must be nonzero");
  instance.xhat = std::move(xhat);
  if (instance.truth) {
    instance.truth = align(*instance.truth, instance.xhat);
    instance.alpha = accuracy_alpha(*instance.truth, instance.xhat);
  }
}

CxVector sample_gaussian(std::size_t n, Field field, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CxVector v(static_cast<Eigen::Index>(n));
  const double s = field == Field::Complex ? std::sqrt(0.5) : 1.0;
  for (auto& z : v) {
    const double re = normal(rng);
    const double im = field == Field::Complex ? normal(rng) : 0.0;
    z = Cx(s * re, s * im);
  }
  return v;
}

Signal sample_unit_sphere(std::size_t n, Field field, Rng& rng) {
  if (n == 0) throw std::invalid_argument("sample_unit_sphere: n must be >= 1");
  CxVector v;
  double norm = 0.0;
  do {
    v = sample_gaussian(n, field, rng);
    norm = v.norm();
  } while (norm == 0.0);
  return Signal(v / norm, field);
}

std::vector<double> apply_noise(const std::vector<double>& clean_squared, const NoiseModel& model,
                                Rng& rng) {
  std::vector<double> eta(clean_squared.size(), 0.0);
  if (model.is_none()) return eta;
  if (model.level < 0.0) throw std::invalid_argument("noise level must be nonnegative");
  if (model.kind == NoiseModel::Kind::SymmetricUniform && model.level >= 1.0)
    throw std::invalid_argument("symmetric noise level must be < 1 to keep b_i^2 > 0");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t i = 0; i < eta.size(); ++i) {
    const double bhat_sq = clean_squared[i];
    const double bhat = std::sqrt(bhat_sq);
    switch (model.kind) {
      case NoiseModel::Kind::NonnegUniform: eta[i] = model.level * bhat * unit(rng); break;
      case NoiseModel::Kind::SymmetricUniform:
        eta[i] = model.level * bhat_sq * (2.0 * unit(rng) - 1.0);
        break;
      case NoiseModel::Kind::RelativeBounded: eta[i] = model.level * bhat; break;
      case NoiseModel::Kind::None: break;
    }
  }
  return eta;
}

ProblemInstance gen_instance(const InstanceOptions& options) {
  const std::size_t n = options.n;
  const std::size_t m = options.m;
  if (n == 0 || m == 0) throw std::invalid_argument("gen_instance: need n >= 1 and m >= 1");
  if (!(options.truth_norm > 0.0)) throw std::invalid_argument("gen_instance: truth norm must be > 0");

  Rng truth_rng = make_rng(derive_seed(options.seed, {1}));
  Rng rows_rng = make_rng(derive_seed(options.seed, {2}));
  Rng noise_rng = make_rng(derive_seed(options.seed, {3}));

  const Signal truth = sample_unit_sphere(n, options.field, truth_rng).scaled(options.truth_norm);

  // Noisy instances always get unit rows: relative noise levels are only
  // meaningful against a fixed row scale.
  const bool normalize =
      options.kind == EnsembleKind::UnitSphere || !options.noise.is_none();

  MeasurementEnsemble ens;
  ens.field = options.field;
  ens.seed = options.seed;
  ens.normalized = normalize;
  ens.vectors.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < m; ++i) {
    CxVector row = sample_gaussian(n, options.field, rows_rng);
    if (normalize) {
      while (row.norm() == 0.0) row = sample_gaussian(n, options.field, rows_rng);
      row /= row.norm();
    }
    ens.vectors.row(static_cast<Eigen::Index>(i)) = row.transpose();
  }

  const CxVector clean = ens.measure(truth.values());
  std::vector<double> clean_sq(m);
  for (std::size_t i = 0; i < m; ++i) clean_sq[i] = std::norm(clean[static_cast<Eigen::Index>(i)]);

  ens.eta = apply_noise(clean_sq, options.noise, noise_rng);
  ens.b.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double b_sq = clean_sq[i] + ens.eta[i];
    if (b_sq < 0.0)
      throw std::invalid_argument("gen_instance: noise drives b_" + std::to_string(i) +
                                  "^2 negative (eta_i must exceed -bhat_i^2)");
    ens.b[i] = options.noise.is_none() ? std::abs(clean[static_cast<Eigen::Index>(i)])
                                       : std::sqrt(b_sq);
  }

  ProblemInstance instance;
  instance.ensemble = std::move(ens);
  instance.truth = truth;
  instance.xhat = truth;
  instance.alpha = 1.0;
  return instance;
}

Signal make_approx_at_angle(const Signal& truth, double beta, Rng& rng) {
  if (!(beta >= 0.0 && beta <= std::numbers::pi / 2))
    throw std::invalid_argument("make_approx_at_angle: beta must lie in [0, pi/2]");
  const double tnorm = truth.norm();
  if (tnorm == 0.0) throw std::invalid_argument("make_approx_at_angle: zero truth");
  const std::size_t n = truth.size();
  const CxVector t = truth.values() / tnorm;
  if (beta == 0.0) return truth;

  CxVector u;
  if (n == 1) {
    if (truth.is_real())
      throw std::invalid_argument("make_approx_at_angle: real n = 1 has no orthogonal direction");
    // C^1 viewed as R^2: the only Re-orthogonal direction is j t.
    u = t * Cx(0.0, 1.0);
  } else {
    double norm = 0.0;
    do {
      u = sample_gaussian(n, truth.field(), rng);
      u -= t * t.dot(u);
      norm = u.norm();
    } while (norm < 1e-8);
    u /= norm;
  }
  CxVector v = (std::cos(beta) * t + std::sin(beta) * u) * tnorm;
  if (truth.is_real()) v = v.real().cast<Cx>();
  return Signal(std::move(v), truth.field());
}

}  // namespace phasemax
