#include "wdvv/numdiff.hpp"

namespace wdvv {

Eigen::MatrixXcd central_derivative(const MatrixFamily& f, double h, bool richardson) {
  auto d = [&](double s) -> Eigen::MatrixXcd { return (f(s) - f(-s)) / (2.0 * s); };
  if (!richardson) return d(h);
  const Eigen::MatrixXcd d1 = d(h), d2 = d(h / 2), d3 = d(h / 4);
  const Eigen::MatrixXcd r1 = (4.0 * d2 - d1) / 3.0;
  const Eigen::MatrixXcd r2 = (4.0 * d3 - d2) / 3.0;
  return (16.0 * r2 - r1) / 15.0;
}

}  // namespace wdvv
