#include "qfield/quadrature.hpp"

#include <numbers>

namespace qfield {

double adaptive_quadrature(const std::function<double(double)>& f, double a, double b, double rel_tol) {
  QuadratureOptions opt;
  opt.rel_tol = rel_tol;
  return integrate<double>(f, a, b, opt).value;
}

double integrate_inverse_sqrt_endpoint(const std::function<double(double)>& g, double R, double rel_tol) {
  if (!(R > 0.0)) throw BadParameter("endpoint radius must be positive");
  QuadratureOptions opt;
  opt.rel_tol = rel_tol;
  auto h = [&](double theta) { return g(R * std::sin(theta)); };
  return integrate<double>(h, 0.0, std::numbers::pi / 2, opt).value;
}

} // namespace qfield
