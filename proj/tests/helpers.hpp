#pragma once

#include <numbers>

#include "phasemax/ensembles.hpp"

namespace phasemax::testing {

inline constexpr double kPi = std::numbers::pi;

inline ProblemInstance instance_at_angle(std::size_t n, std::size_t m, double beta, std::uint64_t seed,
                                         Field field = Field::Complex,
                                         EnsembleKind kind = EnsembleKind::UnitSphere) {
  InstanceOptions io;
  io.n = n;
  io.m = m;
  io.field = field;
  io.kind = kind;
  io.seed = seed;
  ProblemInstance inst = gen_instance(io);
  Rng rng = make_rng(derive_seed(seed, {77}));
  set_approximation(inst, make_approx_at_angle(*inst.truth, beta, rng));
  return inst;
}

}  // namespace phasemax::testing
