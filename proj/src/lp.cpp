#include "phasemax/lp.hpp"

#include <limits>
#include <stdexcept>
#include <vector>

namespace phasemax::lp {

LpResult maximize_in_box(const Eigen::MatrixXd& G, const Eigen::VectorXd& h, const Eigen::VectorXd& g,
                         double bound, std::size_t max_pivots) {
  const Eigen::Index d = g.size();
  const Eigen::Index r = G.rows();
  if (G.cols() != d || h.size() != r) throw std::invalid_argument("lp: inconsistent shapes");
  if (r > 0 && h.minCoeff() < 0.0) throw std::invalid_argument("lp: right-hand side must be nonnegative");
  if (!(bound > 0.0)) throw std::invalid_argument("lp: bound must be positive");

  // y = p - q with p, q in [0, bound]; rows: G p - G q <= h, p <= bound, q <= bound.
  const Eigen::Index vars = 2 * d;
  const Eigen::Index rows = r + vars;
  const Eigen::Index cols = vars + rows + 1;  // structural, slack, rhs
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(rows + 1, cols);
  t.topLeftCorner(r, d) = G;
  t.block(0, d, r, d) = -G;
  for (Eigen::Index k = 0; k < vars; ++k) t(r + k, k) = 1.0;
  t.block(0, vars, rows, rows).setIdentity();
  t.col(cols - 1).head(r) = h;
  t.col(cols - 1).segment(r, vars).setConstant(bound);
  t.row(rows).head(d) = -g.transpose();
  t.row(rows).segment(d, d) = g.transpose();

  std::vector<Eigen::Index> basis(static_cast<std::size_t>(rows));
  for (Eigen::Index i = 0; i < rows; ++i) basis[static_cast<std::size_t>(i)] = vars + i;

  const double eps = 1e-12 * std::max(1.0, g.cwiseAbs().maxCoeff());
  LpResult out;
  for (;;) {
    Eigen::Index enter = -1;
    for (Eigen::Index j = 0; j < cols - 1; ++j) {
      if (t(rows, j) < -eps) {
        enter = j;
        break;
      }
    }
    if (enter < 0) {
      out.status = Status::Optimal;
      break;
    }
    if (out.pivots >= max_pivots) {
      out.status = Status::IterationLimit;
      break;
    }
    Eigen::Index leave = -1;
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double a = t(i, enter);
      if (a <= 1e-12) continue;
      const double ratio = std::max(t(i, cols - 1), 0.0) / a;
      if (leave < 0 || ratio < best - 1e-14) {
        best = ratio;
        leave = i;
      } else if (ratio <= best + 1e-14 &&
                 basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)]) {
        leave = i;
      }
    }
    if (leave < 0) {
      out.status = Status::Unbounded;
      break;
    }
    t.row(leave) /= t(leave, enter);
    for (Eigen::Index i = 0; i <= rows; ++i) {
      if (i == leave) continue;
      const double f = t(i, enter);
      if (f != 0.0) t.row(i) -= f * t.row(leave);
    }
    basis[static_cast<std::size_t>(leave)] = enter;
    ++out.pivots;
  }

  Eigen::VectorXd pq = Eigen::VectorXd::Zero(vars);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Eigen::Index b = basis[static_cast<std::size_t>(i)];
    if (b < vars) pq[b] = t(i, cols - 1);
  }
  out.y = pq.head(d) - pq.tail(d);
  out.value = g.dot(out.y);
  return out;
}

}  // namespace phasemax::lp
