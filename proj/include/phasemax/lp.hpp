#pragma once

#include <cstddef>

#include <Eigen/Dense>

namespace phasemax::lp {

enum class Status { Optimal, Unbounded, IterationLimit };

struct LpResult {
  Status status = Status::Optimal;
  double value = 0.0;
  Eigen::VectorXd y;
  std::size_t pivots = 0;
};

//! maximize g.y  subject to  G y <= h,  -bound <= y_k <= bound.
//!
//! Requires h >= 0 so the origin is a feasible start. Dense tableau simplex
//! with Bland's rule; intended for a few hundred rows at most.
LpResult maximize_in_box(const Eigen::MatrixXd& G, const Eigen::VectorXd& h, const Eigen::VectorXd& g,
                         double bound = 1.0, std::size_t max_pivots = 100000);

}  // namespace phasemax::lp
