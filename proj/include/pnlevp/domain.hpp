#pragma once

#include <string>
#include <variant>

#include "pnlevp/types.hpp"

namespace pnlevp {

struct Disk {
  Complex center;
  Real radius;
};

struct Ellipse {
  Complex center;
  Real semi_real;
  Real semi_imag;
};

/// Bounded, simply connected target region for the eigenvalues: a disk or an
/// axis-aligned ellipse. Boundary points (within 1e-14) are not contained.
class ContourDomain {
 public:
  /// Unit disk.
  ContourDomain() : shape_(Disk{Complex(0.0), 1.0}) {}

  static ContourDomain disk(Complex center, Real radius);
  static ContourDomain ellipse(Complex center, Real semi_real, Real semi_imag);

  bool is_disk() const { return std::holds_alternative<Disk>(shape_); }
  const std::variant<Disk, Ellipse>& shape() const { return shape_; }
  Complex center() const;

  bool contains(Complex z) const;

  /// Lower bound on the distance of an exterior point to the boundary;
  /// non-positive for points in the closed domain.
  Real exterior_distance(Complex z) const;

  /// Boundary parametrization on [0, 2pi) and its derivative.
  Complex boundary(Real t) const;
  Complex boundary_derivative(Real t) const;

  /// Same shape with every semi-axis multiplied by `factor`.
  ContourDomain inflated(Real factor) const;

  /// Axis-aligned bounding box as (lower-left, upper-right).
  std::pair<Complex, Complex> bounding_box() const;

  std::string describe() const;

  friend bool operator==(const ContourDomain& a, const ContourDomain& b);

 private:
  explicit ContourDomain(std::variant<Disk, Ellipse> s) : shape_(s) {}
  std::variant<Disk, Ellipse> shape_;
};

}  // namespace pnlevp
