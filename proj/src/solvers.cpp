#include "phasemax/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace phasemax {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

double max_violation(const CxVector& kx, const std::vector<double>& b) {
  double worst = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < kx.size(); ++i)
    worst = std::max(worst, std::abs(kx[i]) - b[static_cast<std::size_t>(i)]);
  return std::max(worst, 0.0);
}

// Keeps a real-field iterate real; the operators preserve realness up to
// rounding, this removes the rounding.
void enforce_field(CxVector& v, Field field) {
  if (field == Field::Real) v = v.real().cast<Cx>();
}

// Conjugate gradients on gram x = rhs, warm-started at x. Returns iterations.
std::size_t conjugate_gradient(const CxMatrix& gram, const CxVector& rhs, CxVector& x, double rel_tol,
                               std::size_t max_iters) {
  const double rhs_norm = rhs.norm();
  CxVector r = rhs - gram * x;
  CxVector p = r;
  double rr = r.squaredNorm();
  std::size_t k = 0;
  for (; k < max_iters && std::sqrt(rr) > rel_tol * rhs_norm; ++k) {
    const CxVector gp = gram * p;
    const double pgp = p.dot(gp).real();
    if (!(pgp > 0.0)) break;  // rank deficient along p
    const double step = rr / pgp;
    x += step * p;
    r -= step * gp;
    const double rr_next = r.squaredNorm();
    p = r + (rr_next / rr) * p;
    rr = rr_next;
  }
  return k;
}

}  // namespace

void SolverConfig::validate() const {
  if (!(tol_feasibility > 0.0) || !(tol_objective > 0.0))
    throw std::invalid_argument("solver tolerances must be positive");
  if (!(step_product_margin > 0.0 && step_product_margin < 1.0))
    throw std::invalid_argument("step_product_margin must lie in (0, 1)");
  if (max_iters == 0) throw std::invalid_argument("max_iters must be >= 1");
  if (operator_norm_iters == 0) throw std::invalid_argument("operator_norm_iters must be >= 1");
  if (check_every == 0) throw std::invalid_argument("check_every must be >= 1");
}

Cx soft_threshold(Cx z, double tau) {
  const double mag = std::abs(z);
  if (mag <= tau) return Cx(0.0, 0.0);
  return z * ((mag - tau) / mag);
}

Cx project_disc(Cx z, double radius) {
  const double mag = std::abs(z);
  if (mag <= radius) return z;
  return z * (radius / mag);
}

double operator_norm(const MeasurementEnsemble& ensemble, std::size_t iters) {
  // Power iteration on A^* A from a fixed deterministic start.
  Rng rng = make_rng(0x5eed0f0bULL);
  CxVector v = sample_gaussian(ensemble.n(), Field::Complex, rng);
  v /= v.norm();
  double estimate = 0.0;
  for (std::size_t k = 0; k < iters; ++k) {
    CxVector w = ensemble.adjoint(ensemble.measure(v));
    const double next = std::sqrt(w.norm());
    if (next == 0.0) return 0.0;
    v = w / w.norm();
    const bool settled = k > 5 && std::abs(next - estimate) <= 1e-10 * next;
    estimate = next;
    if (settled) break;
  }
  return estimate;
}

namespace {

// Residuals of a PhaseMax primal-dual pair (x, u) for objective vector c.
struct PhaseMaxResiduals {
  double violation = 0.0;  // max_i (|<a_i,x>| - b_i)_+, absolute
  double primal_norm = 0.0;  // |(|Kx| - b)_+|_2
  double dual_norm = 0.0;    // |K^* u - c|_2
  double primal_obj = 0.0;   // Re<x, c>
  double dual_obj = 0.0;     // sum_i b_i |u_i|

  double gap() const { return std::abs(dual_obj - primal_obj); }
  double kkt(double weight) const {
    return std::sqrt(weight * weight * primal_norm * primal_norm +
                     dual_norm * dual_norm / (weight * weight) + gap() * gap());
  }
};

PhaseMaxResiduals phasemax_residuals(const CxVector& x, const CxVector& kx, const CxVector& u,
                                     const CxVector& ktu, const CxVector& c,
                                     const std::vector<double>& b) {
  PhaseMaxResiduals r;
  double worst = 0.0;
  double sq = 0.0;
  for (Eigen::Index i = 0; i < kx.size(); ++i) {
    const double bi = b[static_cast<std::size_t>(i)];
    const double excess = std::max(std::abs(kx[i]) - bi, 0.0);
    worst = std::max(worst, excess);
    sq += excess * excess;
    r.dual_obj += bi * std::abs(u[i]);
  }
  r.violation = worst;
  r.primal_norm = std::sqrt(sq);
  r.dual_norm = (ktu - c).norm();
  r.primal_obj = x.dot(c).real();
  return r;
}

// Restarted primal-dual iteration on the PhaseMax saddle point
//   max_x min_u Re<x, c> - Re<u, Kx> + sum_i b_i |u_i|   (roughly; u enters via soft-thresholding)
// whose dual program is min sum_i b_i |u_i| s.t. K^* u = c, i.e. Basis Pursuit
// in the variable z = B u.
struct PdhgOutput {
  CxVector x;
  CxVector u;
  PhaseMaxResiduals residuals;
  std::size_t iterations = 0;
  bool converged = false;
};

PdhgOutput run_pdhg(const MeasurementEnsemble& ens, const CxVector& c, const SolverConfig& cfg) {
  const Field field = ens.field;
  const CxMatrix K = ens.vectors.conjugate();  // (K x)_i = <a_i, x>
  const std::vector<double>& b = ens.b;
  const double b_max = *std::max_element(b.begin(), b.end());
  const double b_scale = b_max > 0.0 ? b_max : 1.0;
  const double c_norm = c.norm();

  // Primal step eta/w, dual step eta*w: their product stays eta^2 = margin/|A|^2.
  const double op_norm = operator_norm(ens, cfg.operator_norm_iters) * 1.01;
  const double eta = op_norm > 0.0 ? std::sqrt(cfg.step_product_margin) / op_norm : 1.0;
  double weight = 1.0;

  const Eigen::Index m = K.rows();
  const Eigen::Index dim = K.cols();
  CxVector x = CxVector::Zero(dim);
  CxVector u = CxVector::Zero(m);
  CxVector kx = CxVector::Zero(m);
  CxVector kx_bar = CxVector::Zero(m);
  CxVector ktu = CxVector::Zero(dim);

  // Running averages since the last restart.
  CxVector x_sum = CxVector::Zero(dim), u_sum = CxVector::Zero(m);
  CxVector kx_sum = CxVector::Zero(m), ktu_sum = CxVector::Zero(dim);
  std::size_t since_restart = 0;
  CxVector x_restart = x, u_restart = u;
  double kkt_restart = std::numeric_limits<double>::infinity();
  double kkt_candidate_prev = std::numeric_limits<double>::infinity();

  auto converged_at = [&](const PhaseMaxResiduals& r) {
    const double rel_gap = r.gap() / std::max({std::abs(r.dual_obj), std::abs(r.primal_obj), 1e-300});
    return r.violation <= cfg.tol_feasibility * b_scale && rel_gap <= cfg.tol_objective &&
           r.dual_norm <= cfg.tol_objective * c_norm;
  };

  PdhgOutput out;
  bool have_out = false;
  double best_kkt = std::numeric_limits<double>::infinity();

  std::size_t iter = 0;
  for (iter = 1; iter <= cfg.max_iters; ++iter) {
    const double tau = eta / weight;
    const double sigma = eta * weight;
    // Dual step: Moreau form of the disc projection, v - P_{sigma b}(v).
    for (Eigen::Index i = 0; i < m; ++i)
      u[i] = soft_threshold(u[i] + sigma * kx_bar[i], sigma * b[static_cast<std::size_t>(i)]);
    enforce_field(u, field);
    ktu.noalias() = K.adjoint() * u;
    // Primal step along the gradient of the linear objective.
    x.noalias() += tau * (c - ktu);
    enforce_field(x, field);
    CxVector kx_new = K * x;
    kx_bar = 2.0 * kx_new - kx;
    kx = std::move(kx_new);

    x_sum += x;
    u_sum += u;
    kx_sum += kx;
    ktu_sum += ktu;
    ++since_restart;

    if (iter % cfg.check_every != 0 && iter != cfg.max_iters) continue;

    const double inv = 1.0 / static_cast<double>(since_restart);
    const CxVector x_avg = x_sum * inv, u_avg = u_sum * inv;
    const CxVector kx_avg = kx_sum * inv, ktu_avg = ktu_sum * inv;
    const PhaseMaxResiduals r_cur = phasemax_residuals(x, kx, u, ktu, c, b);
    const PhaseMaxResiduals r_avg = phasemax_residuals(x_avg, kx_avg, u_avg, ktu_avg, c, b);
    const double kkt_cur = r_cur.kkt(weight);
    const double kkt_avg = r_avg.kkt(weight);
    const bool use_avg = kkt_avg < kkt_cur;
    const PhaseMaxResiduals& r_cand = use_avg ? r_avg : r_cur;
    const double kkt_cand = std::min(kkt_cur, kkt_avg);

    if (kkt_cand < best_kkt) {
      best_kkt = kkt_cand;
      out.x = use_avg ? x_avg : x;
      out.u = use_avg ? u_avg : u;
      out.residuals = r_cand;
      have_out = true;
    }
    if (converged_at(r_cand)) {
      out.x = use_avg ? x_avg : x;
      out.u = use_avg ? u_avg : u;
      out.residuals = r_cand;
      out.converged = true;
      break;
    }

    // Adaptive restart: sufficient decay, stalled decay, or a long epoch.
    const bool restart = kkt_cand <= 0.2 * kkt_restart ||
                         (kkt_cand <= 0.8 * kkt_restart && kkt_cand > kkt_candidate_prev) ||
                         static_cast<double>(since_restart) >= 0.36 * static_cast<double>(iter);
    kkt_candidate_prev = kkt_cand;
    if (!restart) continue;

    if (use_avg) {
      x = x_avg;
      u = u_avg;
      kx = kx_avg;
      ktu = ktu_avg;
    }
    kx_bar = kx;
    const double dx = (x - x_restart).norm();
    const double du = (u - u_restart).norm();
    if (dx > 1e-10 * std::max(1.0, x.norm()) && du > 1e-10 * std::max(1.0, u.norm()))
      weight = std::exp(0.5 * std::log(du / dx) + 0.5 * std::log(weight));
    x_restart = x;
    u_restart = u;
    kkt_restart = phasemax_residuals(x, kx, u, ktu, c, b).kkt(weight);
    kkt_candidate_prev = std::numeric_limits<double>::infinity();
    x_sum.setZero();
    u_sum.setZero();
    kx_sum.setZero();
    ktu_sum.setZero();
    since_restart = 0;
  }
  if (!have_out) {
    out.x = x;
    out.u = u;
    out.residuals = phasemax_residuals(x, kx, u, ktu, c, b);
  }
  out.iterations = std::min(iter, cfg.max_iters);
  return out;
}

// The maximiser is invariant under positive scaling of xhat. Rescale it so the
// multipliers start out comparable to the primal iterate; the primal weight
// adapts the balance from there.
double objective_scale(const MeasurementEnsemble& ens) {
  const double n = static_cast<double>(ens.n());
  const double frob_sq = ens.vectors.squaredNorm();
  const double b_sq_sum = ens.b_vector().squaredNorm();
  const double x_scale = frob_sq > 0.0 ? std::sqrt(b_sq_sum * n / frob_sq) : 1.0;
  return std::max(x_scale * std::sqrt(frob_sq / n), 1e-300);
}

double relative_gap_of(const PhaseMaxResiduals& r) {
  return r.gap() / std::max({std::abs(r.dual_obj), std::abs(r.primal_obj), 1e-300});
}

}  // namespace

RecoveryResult solve_phasemax(const ProblemInstance& instance, const SolverConfig& cfg) {
  cfg.validate();
  const auto start = Clock::now();
  const MeasurementEnsemble& ens = instance.ensemble;
  ens.validate();
  if (instance.xhat.size() != ens.n()) throw DimensionError("solve_phasemax: xhat length differs from n");
  const double xhat_norm = instance.xhat.norm();
  if (xhat_norm == 0.0) throw std::invalid_argument("solve_phasemax: xhat must be nonzero");

  const double target = objective_scale(ens);
  const CxVector c = instance.xhat.values() * (target / xhat_norm);
  const PdhgOutput run = run_pdhg(ens, c, cfg);
  const PhaseMaxResiduals& res = run.residuals;

  RecoveryResult result;
  result.converged = run.converged;
  result.iterations = run.iterations;
  result.max_constraint_violation = res.violation;
  result.relative_gap = relative_gap_of(res);
  result.dual_residual = res.dual_norm / c.norm();
  result.dual_objective = res.dual_obj * (xhat_norm / target);
  Signal x_star(run.x, ens.field);
  x_star = align(x_star, instance.xhat);
  result.objective = inner(x_star, instance.xhat).real();
  result.x_star = std::move(x_star);
  score_against_truth(result, instance, false);
  result.wall_ms = elapsed_ms(start);
  return result;
}

DualSolution solve_basis_pursuit(const MeasurementEnsemble& ensemble, const Signal& xhat,
                                 const SolverConfig& cfg) {
  cfg.validate();
  ensemble.validate();
  if (xhat.size() != ensemble.n()) throw DimensionError("solve_basis_pursuit: xhat length differs from n");
  for (std::size_t i = 0; i < ensemble.b.size(); ++i) {
    if (ensemble.b[i] <= 0.0)
      throw std::invalid_argument("solve_basis_pursuit: b_" + std::to_string(i) +
                                  " = 0 makes B singular; use the primal PhaseMax route");
  }
  const Eigen::Index m = static_cast<Eigen::Index>(ensemble.m());
  DualSolution sol;
  const double xhat_norm = xhat.norm();
  if (xhat_norm == 0.0) {
    sol.z = CxVector::Zero(m);
    sol.x_from_multiplier = CxVector::Zero(static_cast<Eigen::Index>(ensemble.n()));
    sol.converged = true;
    return sol;
  }

  // With z = B u the program reads min sum b_i |u_i| s.t. sum_i a_i u_i = xhat,
  // and the multiplier of the equality is the PhaseMax point.
  const double target = objective_scale(ensemble);
  const double scale = target / xhat_norm;
  const CxVector c = xhat.values() * scale;
  const PdhgOutput run = run_pdhg(ensemble, c, cfg);

  sol.z = ensemble.b_vector().cast<Cx>().cwiseProduct(run.u) / scale;
  sol.iterations = run.iterations;
  sol.converged = run.converged;
  sol.l1_norm = sol.z.cwiseAbs().sum();
  // Equality residual |A B^{-1} z - xhat| / |xhat|, from z itself.
  CxVector bz = sol.z;
  for (Eigen::Index i = 0; i < m; ++i) bz[i] /= ensemble.b[static_cast<std::size_t>(i)];
  sol.residual = (ensemble.adjoint(bz) - xhat.values()).norm() / xhat_norm;
  sol.x_from_multiplier = run.x;
  const double dual = run.x.dot(xhat.values()).real();
  sol.relative_gap = std::abs(sol.l1_norm - dual) / std::max({sol.l1_norm, std::abs(dual), 1e-300});
  return sol;
}

CxVector recover_phases_from_dual(const CxVector& z, const std::vector<double>& b) {
  if (static_cast<std::size_t>(z.size()) != b.size())
    throw DimensionError("recover_phases_from_dual: z and b differ in length");
  CxVector y(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) y[i] = phase(z[i]) * b[static_cast<std::size_t>(i)];
  return y;
}

LeastSquaresResult signal_from_phases(const MeasurementEnsemble& ensemble, const CxVector& y,
                                      double rel_tol, std::size_t max_iters) {
  if (static_cast<std::size_t>(y.size()) != ensemble.m())
    throw DimensionError("signal_from_phases: y length differs from m");
  if (ensemble.m() < ensemble.n())
    throw std::invalid_argument("signal_from_phases: need m >= n measurements");
  const Eigen::Index n = static_cast<Eigen::Index>(ensemble.n());
  if (max_iters == 0) max_iters = 10 * ensemble.n() + 50;

  // Conjugate gradients on A^* A x = A^* y with the Gram matrix formed once.
  const CxMatrix K = ensemble.vectors.conjugate();
  const CxMatrix gram = K.adjoint() * K;
  const CxVector rhs = K.adjoint() * y;
  const double rhs_norm = rhs.norm();

  LeastSquaresResult out;
  CxVector x = CxVector::Zero(n);
  if (rhs_norm == 0.0) {
    out.x = Signal(x, ensemble.field);
    out.converged = true;
    return out;
  }
  const std::size_t k = conjugate_gradient(gram, rhs, x, rel_tol, max_iters);
  enforce_field(x, ensemble.field);
  out.residual = (gram * x - rhs).norm() / rhs_norm;
  out.iterations = k;
  out.converged = out.residual <= std::max(rel_tol * 10.0, 1e-14);
  out.x = Signal(std::move(x), ensemble.field);
  return out;
}

Signal signal_from_dual(const MeasurementEnsemble& ensemble, const DualSolution& dual,
                        double support_tol) {
  if (static_cast<std::size_t>(dual.z.size()) != ensemble.m())
    throw DimensionError("signal_from_dual: z length differs from m");
  const double zmax = dual.z.size() > 0 ? dual.z.cwiseAbs().maxCoeff() : 0.0;
  std::vector<Eigen::Index> support;
  for (Eigen::Index i = 0; i < dual.z.size(); ++i)
    if (zmax > 0.0 && std::abs(dual.z[i]) > support_tol * zmax) support.push_back(i);
  if (support.size() < ensemble.n()) return Signal(dual.x_from_multiplier, ensemble.field);

  MeasurementEnsemble sub;
  sub.field = ensemble.field;
  sub.vectors.resize(static_cast<Eigen::Index>(support.size()), static_cast<Eigen::Index>(ensemble.n()));
  CxVector y(static_cast<Eigen::Index>(support.size()));
  for (std::size_t k = 0; k < support.size(); ++k) {
    const Eigen::Index i = support[k];
    sub.vectors.row(static_cast<Eigen::Index>(k)) = ensemble.vectors.row(i);
    sub.b.push_back(ensemble.b[static_cast<std::size_t>(i)]);
    y[static_cast<Eigen::Index>(k)] = phase(dual.z[i]) * ensemble.b[static_cast<std::size_t>(i)];
  }
  sub.eta.assign(support.size(), 0.0);
  return signal_from_phases(sub, y).x;
}

double rre(const Signal& x, const Signal& truth, bool phase_align) {
  require_compatible(x, truth, "rre");
  if (truth.norm() == 0.0) throw std::invalid_argument("rre: zero truth");
  if (phase_align && x.norm() > 0.0) return relative_squared_error(align(x, truth).values(), truth.values());
  return relative_squared_error(x.values(), truth.values());
}

void score_against_truth(RecoveryResult& result, const ProblemInstance& instance, bool phase_align) {
  if (!instance.truth) return;
  result.rre = rre(result.x_star, *instance.truth, phase_align);
  result.success = *result.rre < kSuccessRre;
}

RecoveryResult gerchberg_saxton(const ProblemInstance& instance, const Signal& x_init,
                                const SolverConfig& cfg) {
  cfg.validate();
  const auto start = Clock::now();
  const MeasurementEnsemble& ens = instance.ensemble;
  ens.validate();
  if (x_init.size() != ens.n()) throw DimensionError("gerchberg_saxton: x_init length differs from n");
  if (ens.m() < ens.n()) throw std::invalid_argument("gerchberg_saxton: need m >= n");

  const Field field = ens.field;
  const Eigen::Index m = static_cast<Eigen::Index>(ens.m());
  const CxMatrix K = ens.vectors.conjugate();
  const CxMatrix gram = K.adjoint() * K;

  auto misfit = [&](const CxVector& kx) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      const double d = std::abs(kx[i]) - ens.b[static_cast<std::size_t>(i)];
      s += d * d;
    }
    return std::sqrt(s);
  };

  RecoveryResult result;
  CxVector x = x_init.values();
  CxVector kx = K * x;
  result.misfit_history.push_back(misfit(kx));
  CxVector y(m);
  std::size_t iter = 0;
  for (iter = 1; iter <= cfg.max_iters; ++iter) {
    for (Eigen::Index i = 0; i < m; ++i) y[i] = phase(kx[i]) * ens.b[static_cast<std::size_t>(i)];
    if (field == Field::Real) y = y.real().cast<Cx>();
    // Warm-started conjugate gradients on the normal equations.
    const CxVector rhs = K.adjoint() * y;
    CxVector x_next = x;
    conjugate_gradient(gram, rhs, x_next, 1e-12, 10 * ens.n() + 50);
    enforce_field(x_next, field);
    const double denom = std::max(x_next.squaredNorm(), 1e-300);
    const double change = (x_next - x).squaredNorm() / denom;
    x = std::move(x_next);
    kx = K * x;
    result.misfit_history.push_back(misfit(kx));
    if (change < cfg.tol_objective) {
      result.converged = true;
      break;
    }
  }
  result.iterations = std::min(iter, cfg.max_iters);
  result.x_star = Signal(x, field);
  result.objective = inner(result.x_star, instance.xhat).real();
  result.max_constraint_violation = max_violation(kx, ens.b);
  score_against_truth(result, instance, true);
  result.wall_ms = elapsed_ms(start);
  return result;
}

}  // namespace phasemax
