#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "phasemax/ensembles.hpp"
#include "phasemax/initializers.hpp"
#include "phasemax/solvers.hpp"
#include "phasemax/theory.hpp"

namespace phasemax {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Method { PhaseMax, BasisPursuit, GerchbergSaxton };
std::string to_string(Method method);
Method method_from_string(const std::string& name);

//! How x-hat is produced for each trial.
struct InitPolicy {
  //! AtAngle places x-hat at exactly beta from x0; otherwise `initializer` runs
  //! on a reserved prefix of `init_m` extra measurements (or on all m if 0).
  bool at_angle = true;
  InitializerConfig initializer;
  std::size_t init_m = 0;
};

struct SweepConfig {
  std::size_t n = 100;
  Field field = Field::Complex;
  EnsembleKind ensemble = EnsembleKind::UnitSphere;
  std::vector<double> beta_list;  // radians
  std::vector<std::size_t> m_grid;
  std::size_t trials_per_cell = 100;
  Method method = Method::PhaseMax;
  InitPolicy init;
  NoiseModel noise;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  SolverConfig solver;

  void validate() const;
};

//! Arithmetic sequence lo, lo + step, ..., <= hi.
std::vector<std::size_t> arithmetic_grid(std::size_t lo, std::size_t hi, std::size_t step);
//! Parses "lo:hi:step".
std::vector<std::size_t> parse_grid(const std::string& text);

SweepConfig sweep_config_from_json(const nlohmann::json& doc);

struct TrialRecord {
  std::size_t beta_index = 0;
  std::size_t m_index = 0;
  double beta = 0.0;
  std::size_t m = 0;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  double rre = 0.0;
  bool success = false;
  bool converged = false;
  std::size_t iterations = 0;
  double wall_ms = 0.0;
  double alpha = 0.0;
};

struct SweepRow {
  double beta_deg = 0.0;
  std::size_t m = 0;
  std::size_t trials = 0;
  std::size_t successes = 0;
  double rate = 0.0;
  double wilson_lo = 0.0;
  double wilson_hi = 0.0;
  double theory_bound = 0.0;

  bool operator==(const SweepRow&) const = default;
};

struct SweepTable {
  std::vector<SweepRow> rows;
  bool operator==(const SweepTable&) const = default;
};

struct WilsonInterval {
  double lo = 0.0;
  double hi = 1.0;
};
WilsonInterval wilson_interval(std::size_t successes, std::size_t trials, double z = 1.959963984540054);

//! Child seed keyed on (seed, beta index, m index, trial).
std::uint64_t trial_seed(std::uint64_t seed, std::size_t beta_index, std::size_t m_index, std::size_t trial);

TrialRecord run_trial(const SweepConfig& cfg, std::size_t beta_index, std::size_t m_index, std::size_t trial);

//! All trials of the sweep, ordered by (beta, m, trial) whatever the scheduling.
std::vector<TrialRecord> run_trials(const SweepConfig& cfg);

SweepTable aggregate(const SweepConfig& cfg, const std::vector<TrialRecord>& records);
SweepTable run_sweep(const SweepConfig& cfg);

std::string sweep_csv_header();
std::string to_csv(const SweepTable& table);
SweepTable parse_csv(const std::string& text);

using BoundFunction = std::function<theory::TheoryBound(double m, double n, double alpha, Field field)>;

struct DominanceViolation {
  double beta_deg = 0.0;
  std::size_t m = 0;
  double rate = 0.0;
  double slack = 0.0;  // 3 SE
  double bound = 0.0;
};

//! Cells where rate + 3 SE < bound, with the bound recomputed by `bound`.
std::vector<DominanceViolation> check_bound_dominance(const SweepTable& table, double n, Field field,
                                                      const BoundFunction& bound);

//! Runs the reduced-scale invariant suite; "passed" is false on any failure.
nlohmann::json selftest();

}  // namespace phasemax
