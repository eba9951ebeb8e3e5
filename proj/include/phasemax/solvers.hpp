#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "phasemax/ensembles.hpp"
#include "phasemax/linalg.hpp"

namespace phasemax {

//! Success threshold on the relative reconstruction error.
inline constexpr double kSuccessRre = 1e-5;

//! Iteration controls shared by the first-order solvers.
//!
//! Tolerances are relative: primal feasibility of PhaseMax is measured
//! against max_i b_i, the Basis Pursuit equality residual against |xhat|,
//! and the duality gap against the objective magnitude.
struct SolverConfig {
  std::size_t max_iters = 50000;
  double tol_feasibility = 1e-9;
  double tol_objective = 1e-9;
  double step_product_margin = 0.95;
  std::size_t operator_norm_iters = 200;
  //! Iterations between residual evaluations.
  std::size_t check_every = 20;

  void validate() const;
};

struct RecoveryResult {
  Signal x_star;
  std::size_t iterations = 0;
  double max_constraint_violation = 0.0;
  //! Re<x_star, xhat>
  double objective = 0.0;
  //! Dual bound sum_i b_i |u_i| (PhaseMax route only).
  double dual_objective = 0.0;
  double relative_gap = 0.0;
  double dual_residual = 0.0;
  std::optional<double> rre;
  std::optional<bool> success;
  bool converged = false;
  double wall_ms = 0.0;
  //! Per-iteration measurement misfit | |Ax| - b |_2 (Gerchberg-Saxton only).
  std::vector<double> misfit_history;
};

struct DualSolution {
  CxVector z;
  //! |A B^{-1} z - xhat|_2 / |xhat|_2
  double residual = 0.0;
  double l1_norm = 0.0;
  //! PhaseMax point read off the dual variable of the equality constraint.
  CxVector x_from_multiplier;
  double relative_gap = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

struct LeastSquaresResult {
  Signal x;
  //! |A^*(Ax - y)| / |A^* y| at exit.
  double residual = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

//! Largest singular value of the measurement operator by power iteration.
double operator_norm(const MeasurementEnsemble& ensemble, std::size_t iters);

//! maximize Re<x, xhat> subject to |<a_i, x>| <= b_i, by primal-dual splitting.
RecoveryResult solve_phasemax(const ProblemInstance& instance, const SolverConfig& cfg = {});

//! minimize |z|_1 subject to xhat = A B^{-1} z, by primal-dual splitting with
//! complex soft-thresholding.
DualSolution solve_basis_pursuit(const MeasurementEnsemble& ensemble, const Signal& xhat,
                                 const SolverConfig& cfg = {});

//! y_i = phase(z_i) b_i.
CxVector recover_phases_from_dual(const CxVector& z, const std::vector<double>& b);

//! Least-squares solution of <a_i, x> = y_i by conjugate gradients on the
//! normal equations.
LeastSquaresResult signal_from_phases(const MeasurementEnsemble& ensemble, const CxVector& y,
                                      double rel_tol = 1e-12, std::size_t max_iters = 0);

//! Signal from the Basis Pursuit solution: least squares on the rows where
//! |z_i| > support_tol max|z| (phases known there), or the equality multiplier
//! when fewer than n such rows exist.
Signal signal_from_dual(const MeasurementEnsemble& ensemble, const DualSolution& dual,
                        double support_tol = 1e-6);

//! Alternating projections between magnitude constraints and range(A).
RecoveryResult gerchberg_saxton(const ProblemInstance& instance, const Signal& x_init,
                                const SolverConfig& cfg = {});

//! |truth - x|^2 / |truth|^2, optionally after removing the global phase of x.
double rre(const Signal& x, const Signal& truth, bool phase_align);

//! Complex soft-thresholding phase(z) max(|z| - tau, 0).
Cx soft_threshold(Cx z, double tau);
//! Radial projection onto the disc of the given radius.
Cx project_disc(Cx z, double radius);

//! Fills rre/success from the instance truth, if present.
void score_against_truth(RecoveryResult& result, const ProblemInstance& instance, bool phase_align);

}  // namespace phasemax
