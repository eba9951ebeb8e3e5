#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "phasemax/ensembles.hpp"
#include "phasemax/linalg.hpp"
#include "phasemax/rng.hpp"

namespace phasemax {

struct ConeFeasibilityReport {
  //! A nonzero failure direction exists.
  bool nontrivial = false;
  //! Unit direction in the cone, when nontrivial.
  std::optional<Signal> witness;
  //! Largest LP optimum over the generic objectives.
  double objective_value = 0.0;
  std::size_t generic_directions_tried = 0;
  //! Largest cone-constraint violation of the normalised witness.
  double witness_violation = 0.0;
};

struct ConeOptions {
  //! Random objectives g; each is also tried as -g.
  std::size_t directions = 4;
  double threshold = 1e-7;
  std::uint64_t seed = 0x5eed;
};

//! Decides whether {delta : Im<delta,xhat> = 0, Re<delta,xhat> >= 0,
//! Re<atilde_i,delta> <= 0} contains a nonzero point, atilde_i = phase(<a_i,x0>) a_i.
//! An empty cone certifies that x0 is the unique PhaseMax solution.
ConeFeasibilityReport uniqueness_check(const MeasurementEnsemble& ensemble, const Signal& truth,
                                       const Signal& xhat, const ConeOptions& options = {});

//! Real coordinates (Re v, Im v) of a vector, or Re v for real fields, so that
//! Re<u,v> becomes a dot product.
Eigen::VectorXd real_embedding(const CxVector& v, Field field);

//! True when {delta != 0 : Re<c_i, delta> <= 0 for all i} is nonempty.
ConeFeasibilityReport halfspace_cone_check(const std::vector<Signal>& normals, const ConeOptions& options = {});

using CenterSampler = std::function<Signal(Rng&)>;

CenterSampler uniform_center_sampler(std::size_t n, Field field);
//! Uniform on the symmetric set {delta : |Re<axis, delta>| >= width} of the unit sphere.
CenterSampler hourglass_center_sampler(const Signal& axis, double width);

struct CoverageOptions {
  //! Random probe directions per experiment.
  std::size_t probes = 20000;
  ConeOptions cone;
};

//! Whether the caps {delta : Re<c_i,delta> > cos(theta)} cover the unit sphere.
//! Exact at theta = pi/2 (probing plus intersection-emptiness LP); probing
//! only for smaller caps.
bool caps_cover_sphere(const std::vector<Signal>& centers, double theta, const CoverageOptions& options,
                       Rng& rng);

//! Fraction of `trials` experiments in which m freshly sampled caps cover the sphere.
double coverage_mc(const CenterSampler& sampler, std::size_t m, double theta, std::size_t trials, Rng& rng,
                   const CoverageOptions& options = {});

//! Distinct sign patterns (sign<a_i,p>)_i over sampled sphere points p for k
//! random planes in R^n. Requires n <= 5 and k <= 8.
std::uint64_t regions_brute_force(std::size_t n, std::size_t k, Rng& rng, std::size_t samples);

}  // namespace phasemax
