#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace phasemax {

using Cx = std::complex<double>;
using CxVector = Eigen::VectorXcd;
using CxMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

enum class Field { Real, Complex };

std::string to_string(Field field);
Field field_from_string(const std::string& name);

//! Error thrown when two operands disagree on length or field.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

//! Dense vector over R or C.
//!
//! Real signals share the complex container; every constructor and mutator
//! keeps the imaginary parts of a real signal at exactly zero.
class Signal {
 public:
  Signal() = default;
  Signal(CxVector values, Field field);

  static Signal zeros(std::size_t n, Field field);
  static Signal basis(std::size_t n, std::size_t k, Field field);
  //! Builds a real signal from real coefficients.
  static Signal real(const RealVector& values);

  std::size_t size() const { return static_cast<std::size_t>(values_.size()); }
  Field field() const { return field_; }
  bool is_real() const { return field_ == Field::Real; }

  const CxVector& values() const { return values_; }
  Cx operator[](std::size_t k) const { return values_[static_cast<Eigen::Index>(k)]; }

  double norm() const { return values_.norm(); }
  double squared_norm() const { return values_.squaredNorm(); }

  //! Multiplies by a scalar. For a real signal the scalar must be real.
  Signal scaled(Cx factor) const;
  Signal scaled(double factor) const;
  Signal operator+(const Signal& other) const;
  Signal operator-(const Signal& other) const;
  Signal operator-() const { return scaled(-1.0); }

 private:
  CxVector values_;
  Field field_ = Field::Complex;
};

//! z/|z| for z != 0 and 1 for z == 0.
Cx phase(Cx z);

//! <a,b> = a^* b, conjugate-linear in the first slot.
Cx inner(const Signal& a, const Signal& b);
Cx inner(const CxVector& a, const CxVector& b);

//! arccos(Re<x,y> / (|x||y|)), in [0, pi].
double angle_between(const Signal& x, const Signal& y);

//! Rotates x by phase(<x,ref>) so that <result,ref> is real and nonnegative.
Signal align(const Signal& x, const Signal& ref);

//! Throws DimensionError unless a and b agree in length and field.
void require_compatible(const Signal& a, const Signal& b, const char* where);

//! Relative squared distance |truth - x|^2 / |truth|^2.
double relative_squared_error(const CxVector& x, const CxVector& truth);

}  // namespace phasemax
