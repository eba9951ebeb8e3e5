#pragma once

#include <string>

#include <json.hpp>

#include "phasemax/ensembles.hpp"

namespace phasemax {

//! Instance JSON:
//!   { "n", "m", "field": "real"|"complex", "seed", "normalized",
//!     "A": [[[re,im], ...] per row], "b": [...], "eta": [...],
//!     "xhat": [[re,im], ...], "x0": [[re,im], ...] (optional) }
//! Doubles are written in shortest round-trip form, so read(write(x)) is bit-exact.
nlohmann::json instance_to_json(const ProblemInstance& instance);
ProblemInstance instance_from_json(const nlohmann::json& doc);

nlohmann::json signal_to_json(const Signal& signal);
Signal signal_from_json(const nlohmann::json& doc, Field field);

void write_instance(const ProblemInstance& instance, const std::string& path);
ProblemInstance read_instance(const std::string& path);

//! Thrown for unreadable or unwritable files.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace phasemax
