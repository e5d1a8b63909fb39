#include "pnlevp/domain.hpp"

#include <cmath>
#include <sstream>

namespace pnlevp {

namespace {
constexpr Real kBoundaryTol = 1e-14;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;
}  // namespace

ContourDomain ContourDomain::disk(Complex center, Real radius) {
  if (!(radius > 0.0) || !std::isfinite(radius))
    throw ArgumentError("disk radius must be positive and finite");
  return ContourDomain(Disk{center, radius});
}

ContourDomain ContourDomain::ellipse(Complex center, Real semi_real, Real semi_imag) {
  if (!(semi_real > 0.0) || !(semi_imag > 0.0) || !std::isfinite(semi_real) ||
      !std::isfinite(semi_imag))
    throw ArgumentError("ellipse semi-axes must be positive and finite");
  return ContourDomain(Ellipse{center, semi_real, semi_imag});
}

Complex ContourDomain::center() const {
  return std::visit([](const auto& s) { return s.center; }, shape_);
}

bool ContourDomain::contains(Complex z) const {
  return std::visit(
      overloaded{
          [&](const Disk& d) { return std::abs(z - d.center) < d.radius - kBoundaryTol; },
          [&](const Ellipse& e) {
            const Complex w = z - e.center;
            const Real rho = std::hypot(w.real() / e.semi_real, w.imag() / e.semi_imag);
            return rho < 1.0 - kBoundaryTol;
          }},
      shape_);
}

Real ContourDomain::exterior_distance(Complex z) const {
  return std::visit(
      overloaded{[&](const Disk& d) { return std::abs(z - d.center) - d.radius; },
                 [&](const Ellipse& e) {
                   const Complex w = z - e.center;
                   const Real rho = std::hypot(w.real() / e.semi_real, w.imag() / e.semi_imag);
                   return (rho - 1.0) * std::min(e.semi_real, e.semi_imag);
                 }},
      shape_);
}

Complex ContourDomain::boundary(Real t) const {
  return std::visit(
      overloaded{[&](const Disk& d) { return d.center + d.radius * std::exp(Complex(0.0, t)); },
                 [&](const Ellipse& e) {
                   return e.center + Complex(e.semi_real * std::cos(t), e.semi_imag * std::sin(t));
                 }},
      shape_);
}

Complex ContourDomain::boundary_derivative(Real t) const {
  return std::visit(
      overloaded{[&](const Disk& d) { return 1i * d.radius * std::exp(Complex(0.0, t)); },
                 [&](const Ellipse& e) {
                   return Complex(-e.semi_real * std::sin(t), e.semi_imag * std::cos(t));
                 }},
      shape_);
}

ContourDomain ContourDomain::inflated(Real factor) const {
  if (!(factor > 0.0)) throw ArgumentError("inflation factor must be positive");
  return std::visit(
      overloaded{[&](const Disk& d) { return disk(d.center, d.radius * factor); },
                 [&](const Ellipse& e) {
                   return ellipse(e.center, e.semi_real * factor, e.semi_imag * factor);
                 }},
      shape_);
}

std::pair<Complex, Complex> ContourDomain::bounding_box() const {
  return std::visit(
      overloaded{[&](const Disk& d) {
                   return std::pair{d.center - Complex(d.radius, d.radius),
                                    d.center + Complex(d.radius, d.radius)};
                 },
                 [&](const Ellipse& e) {
                   return std::pair{e.center - Complex(e.semi_real, e.semi_imag),
                                    e.center + Complex(e.semi_real, e.semi_imag)};
                 }},
      shape_);
}

std::string ContourDomain::describe() const {
  std::ostringstream os;
  std::visit(overloaded{[&](const Disk& d) {
                          os << "disk(center=" << d.center << ", radius=" << d.radius << ")";
                        },
                        [&](const Ellipse& e) {
                          os << "ellipse(center=" << e.center << ", semi_real=" << e.semi_real
                             << ", semi_imag=" << e.semi_imag << ")";
                        }},
             shape_);
  return os.str();
}

bool operator==(const ContourDomain& a, const ContourDomain& b) {
  if (a.shape_.index() != b.shape_.index()) return false;
  if (a.is_disk()) {
    const auto& x = std::get<Disk>(a.shape_);
    const auto& y = std::get<Disk>(b.shape_);
    return x.center == y.center && x.radius == y.radius;
  }
  const auto& x = std::get<Ellipse>(a.shape_);
  const auto& y = std::get<Ellipse>(b.shape_);
  return x.center == y.center && x.semi_real == y.semi_real && x.semi_imag == y.semi_imag;
}

}  // namespace pnlevp
