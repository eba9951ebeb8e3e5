#include "phasemax/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace phasemax {

std::string to_string(Field field) { return field == Field::Real ? "real" : "complex"; }

Field field_from_string(const std::string& name) {
  if (name == "real") return Field::Real;
  if (name == "complex") return Field::Complex;
  throw std::invalid_argument("unknown field '" + name + "' (expected real|complex)");
}

Signal::Signal(CxVector values, Field field) : values_(std::move(values)), field_(field) {
  if (values_.size() == 0) throw DimensionError("signal must have length n >= 1");
  for (Eigen::Index k = 0; k < values_.size(); ++k) {
    if (!std::isfinite(values_[k].real()) || !std::isfinite(values_[k].imag()))
      throw std::invalid_argument("signal entry " + std::to_string(k) + " is not finite");
  }
  if (field_ == Field::Real) {
    for (Eigen::Index k = 0; k < values_.size(); ++k) {
      if (values_[k].imag() != 0.0)
        throw std::invalid_argument("real signal has nonzero imaginary part at entry " +
                                    std::to_string(k));
    }
  }
}

Signal Signal::zeros(std::size_t n, Field field) {
  return Signal(CxVector::Zero(static_cast<Eigen::Index>(n)), field);
}

Signal Signal::basis(std::size_t n, std::size_t k, Field field) {
  if (k >= n) throw DimensionError("basis index out of range");
  CxVector v = CxVector::Zero(static_cast<Eigen::Index>(n));
  v[static_cast<Eigen::Index>(k)] = 1.0;
  return Signal(std::move(v), field);
}

Signal Signal::real(const RealVector& values) { return Signal(values.cast<Cx>(), Field::Real); }

Signal Signal::scaled(Cx factor) const {
  if (field_ == Field::Real && factor.imag() != 0.0)
    throw std::invalid_argument("cannot scale a real signal by a complex factor");
  return Signal(values_ * factor, field_);
}

Signal Signal::scaled(double factor) const { return Signal(values_ * factor, field_); }

Signal Signal::operator+(const Signal& other) const {
  require_compatible(*this, other, "Signal::operator+");
  return Signal(values_ + other.values_, field_);
}

Signal Signal::operator-(const Signal& other) const {
  require_compatible(*this, other, "Signal::operator-");
  return Signal(values_ - other.values_, field_);
}

void require_compatible(const Signal& a, const Signal& b, const char* where) {
  if (a.size() != b.size())
    throw DimensionError(std::string(where) + ": length mismatch (" + std::to_string(a.size()) +
                         " vs " + std::to_string(b.size()) + ")");
  if (a.field() != b.field()) throw DimensionError(std::string(where) + ": field mismatch");
}

Cx phase(Cx z) {
  const double mag = std::abs(z);
  if (mag == 0.0) return Cx(1.0, 0.0);
  return z / mag;
}

Cx inner(const CxVector& a, const CxVector& b) {
  if (a.size() != b.size()) throw DimensionError("inner: length mismatch");
  return a.dot(b);  // Eigen conjugates the left operand
}

Cx inner(const Signal& a, const Signal& b) {
  require_compatible(a, b, "inner");
  return inner(a.values(), b.values());
}

double angle_between(const Signal& x, const Signal& y) {
  require_compatible(x, y, "angle_between");
  const double nx = x.norm();
  const double ny = y.norm();
  if (nx == 0.0 || ny == 0.0) throw std::invalid_argument("angle_between: zero-norm input");
  const double c = std::clamp(inner(x, y).real() / (nx * ny), -1.0, 1.0);
  return std::acos(c);
}

Signal align(const Signal& x, const Signal& ref) {
  require_compatible(x, ref, "align");
  if (ref.norm() == 0.0) throw std::invalid_argument("align: zero reference");
  // <w x, ref> = conj(w) <x, ref> = |<x, ref>|. For real signals w is exactly +-1.
  return x.scaled(phase(inner(x, ref)));
}

double relative_squared_error(const CxVector& x, const CxVector& truth) {
  const double denom = truth.squaredNorm();
  if (denom == 0.0) throw std::invalid_argument("relative error against a zero truth vector");
  return (truth - x).squaredNorm() / denom;
}

}  // namespace phasemax
