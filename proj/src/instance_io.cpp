#include "phasemax/instance_io.hpp"

#include <fstream>

namespace phasemax {

using nlohmann::json;

namespace {

json complex_vector_to_json(const CxVector& v) {
  json out = json::array();
  for (const Cx& z : v) out.push_back({z.real(), z.imag()});
  return out;
}

CxVector complex_vector_from_json(const json& doc, const char* what) {
  if (!doc.is_array()) throw std::invalid_argument(std::string(what) + " must be an array");
  CxVector v(static_cast<Eigen::Index>(doc.size()));
  for (std::size_t k = 0; k < doc.size(); ++k) {
    const json& entry = doc[k];
    if (entry.is_number()) {
      v[static_cast<Eigen::Index>(k)] = Cx(entry.get<double>(), 0.0);
    } else if (entry.is_array() && entry.size() == 2) {
      v[static_cast<Eigen::Index>(k)] = Cx(entry[0].get<double>(), entry[1].get<double>());
    } else {
      throw std::invalid_argument(std::string(what) + ": entry " + std::to_string(k) +
                                  " must be a number or [re, im]");
    }
  }
  return v;
}

}  // namespace

json signal_to_json(const Signal& signal) { return complex_vector_to_json(signal.values()); }

Signal signal_from_json(const json& doc, Field field) {
  return Signal(complex_vector_from_json(doc, "signal"), field);
}

json instance_to_json(const ProblemInstance& instance) {
  const MeasurementEnsemble& ens = instance.ensemble;
  json doc;
  doc["n"] = ens.n();
  doc["m"] = ens.m();
  doc["field"] = to_string(ens.field);
  doc["seed"] = ens.seed;
  doc["normalized"] = ens.normalized;
  json rows = json::array();
  for (Eigen::Index i = 0; i < ens.vectors.rows(); ++i)
    rows.push_back(complex_vector_to_json(ens.vectors.row(i).transpose()));
  doc["A"] = std::move(rows);
  doc["b"] = ens.b;
  doc["eta"] = ens.eta.empty() ? std::vector<double>(ens.m(), 0.0) : ens.eta;
  doc["xhat"] = signal_to_json(instance.xhat);
  if (instance.truth) doc["x0"] = signal_to_json(*instance.truth);
  return doc;
}

ProblemInstance instance_from_json(const json& doc) {
  ProblemInstance instance;
  MeasurementEnsemble& ens = instance.ensemble;
  const auto n = doc.at("n").get<std::size_t>();
  const auto m = doc.at("m").get<std::size_t>();
  ens.field = field_from_string(doc.at("field").get<std::string>());
  ens.seed = doc.value("seed", std::uint64_t{0});
  ens.normalized = doc.value("normalized", false);

  const json& rows = doc.at("A");
  if (!rows.is_array() || rows.size() != m)
    throw std::invalid_argument("instance: A must have m rows");
  ens.vectors.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < m; ++i) {
    CxVector row = complex_vector_from_json(rows[i], "A row");
    if (static_cast<std::size_t>(row.size()) != n)
      throw std::invalid_argument("instance: row " + std::to_string(i) + " has wrong length");
    ens.vectors.row(static_cast<Eigen::Index>(i)) = row.transpose();
  }
  ens.b = doc.at("b").get<std::vector<double>>();
  ens.eta = doc.contains("eta") ? doc.at("eta").get<std::vector<double>>()
                                : std::vector<double>(m, 0.0);
  ens.validate();

  instance.xhat = signal_from_json(doc.at("xhat"), ens.field);
  if (instance.xhat.size() != n) throw std::invalid_argument("instance: xhat has wrong length");
  if (doc.contains("x0")) {
    instance.truth = signal_from_json(doc.at("x0"), ens.field);
    if (instance.truth->size() != n) throw std::invalid_argument("instance: x0 has wrong length");
    if (instance.xhat.norm() > 0.0) instance.alpha = accuracy_alpha(*instance.truth, instance.xhat);
  }
  return instance;
}

void write_instance(const ProblemInstance& instance, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << instance_to_json(instance).dump() << '\n';
  if (!out) throw IoError("failed writing '" + path + "'");
}

ProblemInstance read_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw IoError("'" + path + "' is not valid JSON: " + e.what());
  }
  return instance_from_json(doc);
}

}  // namespace phasemax
