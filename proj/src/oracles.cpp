#include "phasemax/oracles.hpp"

#include <algorithm>
#include <bitset>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "phasemax/lp.hpp"

namespace phasemax {

namespace {

Signal from_embedding(const Eigen::VectorXd& y, Field field) {
  if (field == Field::Real) return Signal(y.cast<Cx>(), Field::Real);
  const Eigen::Index n = y.size() / 2;
  CxVector v(n);
  for (Eigen::Index k = 0; k < n; ++k) v[k] = Cx(y[k], y[n + k]);
  return Signal(v, Field::Complex);
}

// Nonzero point of {y : G y <= 0} via box-bounded LPs over generic objectives.
ConeFeasibilityReport cone_search(const Eigen::MatrixXd& G, Field field, const ConeOptions& options) {
  const Eigen::Index d = G.cols();
  const Eigen::VectorXd h = Eigen::VectorXd::Zero(G.rows());
  Rng rng = make_rng(options.seed);
  std::normal_distribution<double> normal;
  ConeFeasibilityReport report;
  for (std::size_t k = 0; k < options.directions && !report.nontrivial; ++k) {
    Eigen::VectorXd g(d);
    for (Eigen::Index j = 0; j < d; ++j) g[j] = normal(rng);
    g.normalize();
    for (double sign : {1.0, -1.0}) {
      lp::LpResult res = lp::maximize_in_box(G, h, sign * g);
      ++report.generic_directions_tried;
      if (res.status == lp::Status::IterationLimit)
        throw std::runtime_error("cone check: simplex iteration limit reached");
      report.objective_value = std::max(report.objective_value, res.value);
      if (res.value > options.threshold && res.y.norm() > 0.0) {
        report.nontrivial = true;
        const Eigen::VectorXd unit = res.y / res.y.norm();
        report.witness_violation = G.rows() > 0 ? std::max(0.0, (G * unit).maxCoeff()) : 0.0;
        report.witness = from_embedding(unit, field);
        break;
      }
    }
  }
  return report;
}

constexpr double kHalfPi = std::numbers::pi / 2;

}  // namespace

Eigen::VectorXd real_embedding(const CxVector& v, Field field) {
  const Eigen::Index n = v.size();
  if (field == Field::Real) return v.real();
  Eigen::VectorXd out(2 * n);
  out.head(n) = v.real();
  out.tail(n) = v.imag();
  return out;
}

ConeFeasibilityReport uniqueness_check(const MeasurementEnsemble& ensemble, const Signal& truth,
                                       const Signal& xhat, const ConeOptions& options) {
  ensemble.validate();
  if (truth.size() != ensemble.n() || xhat.size() != ensemble.n())
    throw DimensionError("uniqueness_check: signal length differs from n");
  const double xhat_norm = xhat.norm();
  if (xhat_norm == 0.0) throw std::invalid_argument("uniqueness_check: xhat must be nonzero");
  const Field field = ensemble.field;
  const Eigen::Index n = static_cast<Eigen::Index>(ensemble.n());
  const Eigen::Index d = field == Field::Real ? n : 2 * n;
  const Eigen::Index m = static_cast<Eigen::Index>(ensemble.m());

  const CxVector proj = ensemble.measure(truth.values());
  const Eigen::Index extra = field == Field::Real ? 1 : 3;
  Eigen::MatrixXd G(m + extra, d);
  for (Eigen::Index i = 0; i < m; ++i) {
    const CxVector a = ensemble.vectors.row(i).transpose() * phase(proj[i]);
    const double nrm = a.norm();
    if (nrm > 0.0)
      G.row(i) = (real_embedding(a, field) / nrm).transpose();
    else
      G.row(i).setZero();
  }
  const CxVector xu = xhat.values() / xhat_norm;
  G.row(m) = -real_embedding(xu, field).transpose();
  if (field == Field::Complex) {
    // Im<delta, xhat> = Re(delta) . Im(xhat) - Im(delta) . Re(xhat)
    Eigen::VectorXd im_row(d);
    im_row.head(n) = xu.imag();
    im_row.tail(n) = -xu.real();
    G.row(m + 1) = im_row.transpose();
    G.row(m + 2) = -im_row.transpose();
  }
  return cone_search(G, field, options);
}

ConeFeasibilityReport halfspace_cone_check(const std::vector<Signal>& normals, const ConeOptions& options) {
  if (normals.empty()) throw std::invalid_argument("halfspace_cone_check: no normals");
  const Field field = normals.front().field();
  const Eigen::Index n = static_cast<Eigen::Index>(normals.front().size());
  const Eigen::Index d = field == Field::Real ? n : 2 * n;
  Eigen::MatrixXd G(static_cast<Eigen::Index>(normals.size()), d);
  for (std::size_t i = 0; i < normals.size(); ++i) {
    require_compatible(normals[i], normals.front(), "halfspace_cone_check");
    G.row(static_cast<Eigen::Index>(i)) = real_embedding(normals[i].values(), field).transpose();
  }
  return cone_search(G, field, options);
}

CenterSampler uniform_center_sampler(std::size_t n, Field field) {
  return [n, field](Rng& rng) { return sample_unit_sphere(n, field, rng); };
}

CenterSampler hourglass_center_sampler(const Signal& axis, double width) {
  if (!(width >= 0.0 && width < 1.0)) throw std::invalid_argument("hourglass: width must lie in [0, 1)");
  const Signal unit_axis = axis.scaled(1.0 / axis.norm());
  return [unit_axis, width](Rng& rng) {
    for (;;) {
      Signal s = sample_unit_sphere(unit_axis.size(), unit_axis.field(), rng);
      if (std::abs(inner(unit_axis, s).real()) >= width) return s;
    }
  };
}

bool caps_cover_sphere(const std::vector<Signal>& centers, double theta, const CoverageOptions& options,
                       Rng& rng) {
  if (!(theta > 0.0 && theta <= kHalfPi + 1e-15))
    throw std::invalid_argument("caps_cover_sphere: theta must lie in (0, pi/2]");
  if (centers.empty()) return false;
  const Field field = centers.front().field();
  const std::size_t n = centers.front().size();
  const Eigen::Index d = static_cast<Eigen::Index>(field == Field::Real ? n : 2 * n);
  Eigen::MatrixXd C(static_cast<Eigen::Index>(centers.size()), d);
  for (std::size_t i = 0; i < centers.size(); ++i)
    C.row(static_cast<Eigen::Index>(i)) = real_embedding(centers[i].values(), field).transpose();

  const bool semisphere = theta >= kHalfPi - 1e-15;
  const double level = semisphere ? 0.0 : std::cos(theta);
  std::normal_distribution<double> normal;
  Eigen::VectorXd probe(d);
  for (std::size_t p = 0; p < options.probes; ++p) {
    for (Eigen::Index j = 0; j < d; ++j) probe[j] = normal(rng);
    probe.normalize();
    if ((C * probe).maxCoeff() <= level) return false;
  }
  if (!semisphere) return true;
  return !halfspace_cone_check(centers, options.cone).nontrivial;
}

double coverage_mc(const CenterSampler& sampler, std::size_t m, double theta, std::size_t trials, Rng& rng,
                   const CoverageOptions& options) {
  if (trials == 0) throw std::invalid_argument("coverage_mc: trials must be >= 1");
  std::size_t covered = 0;
  std::vector<Signal> centers(m);
  for (std::size_t t = 0; t < trials; ++t) {
    for (auto& c : centers) c = sampler(rng);
    if (caps_cover_sphere(centers, theta, options, rng)) ++covered;
  }
  return static_cast<double>(covered) / static_cast<double>(trials);
}

std::uint64_t regions_brute_force(std::size_t n, std::size_t k, Rng& rng, std::size_t samples) {
  if (n < 1 || n > 5 || k < 1 || k > 8)
    throw std::invalid_argument("regions_brute_force: requires 1 <= n <= 5 and 1 <= k <= 8");
  std::normal_distribution<double> normal;
  const Eigen::Index nn = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd planes(static_cast<Eigen::Index>(k), nn);
  for (Eigen::Index i = 0; i < planes.size(); ++i) planes.data()[i] = normal(rng);

  // Cells can be tiny, but each one touches a vertex where n-1 planes meet, so
  // half of the points are drawn close to those vertices.
  std::vector<Eigen::VectorXd> vertices;
  if (n >= 2 && k >= n - 1) {
    std::vector<bool> pick(k, false);
    std::fill(pick.begin(), pick.begin() + static_cast<long>(n - 1), true);
    do {
      Eigen::MatrixXd sub(nn - 1, nn);
      Eigen::Index r = 0;
      for (std::size_t i = 0; i < k; ++i)
        if (pick[i]) sub.row(r++) = planes.row(static_cast<Eigen::Index>(i));
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(sub, Eigen::ComputeFullV);
      vertices.push_back(svd.matrixV().col(nn - 1));
    } while (std::prev_permutation(pick.begin(), pick.end()));
  }
  std::uniform_int_distribution<std::size_t> which(0, vertices.empty() ? 0 : vertices.size() - 1);
  std::uniform_real_distribution<double> log_scale(-6.0, -1.0);

  std::bitset<256> seen;
  Eigen::VectorXd p(nn);
  for (std::size_t s = 0; s < samples; ++s) {
    for (Eigen::Index j = 0; j < nn; ++j) p[j] = normal(rng);
    if (!vertices.empty() && s % 2 == 1) {
      const double eps = std::pow(10.0, log_scale(rng)) / p.norm();
      const double sign = normal(rng) < 0.0 ? -1.0 : 1.0;
      p = sign * vertices[which(rng)] + eps * p;
    }
    unsigned pattern = 0;
    for (Eigen::Index i = 0; i < planes.rows(); ++i)
      if (planes.row(i).dot(p) > 0.0) pattern |= 1u << i;
    seen.set(pattern);
  }
  return seen.count();
}

}  // namespace phasemax
