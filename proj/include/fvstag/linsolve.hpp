#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace fvstag {

// Matrix-free operator y <- A(x) on a flat value array.
struct LinearOperator {
  std::size_t size = 0;
  std::function<void(std::span<const double>, std::span<double>)> apply;
  bool symmetric = true;
  // Optional diagonal of A, used by the Jacobi preconditioner.
  std::function<void(std::span<double>)> diagonal;
  // Inner-product weights; empty means the Euclidean inner product. A must be
  // self-adjoint with respect to <x, y> = sum_i w_i x_i y_i.
  std::vector<double> weights;
};

struct Pin {
  std::size_t index = 0;
  double value = 0.0;
};

struct CGOptions {
  double tol = 1e-12;
  // 0 selects 10 * size.
  std::size_t max_iter = 0;
  bool jacobi = false;
  std::optional<Pin> pin;
  bool record_history = false;
};

struct CGReport {
  std::size_t iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
  // The true residual stalled above tol at the round-off floor.
  bool stagnated = false;
  std::vector<double> residual_history;
};

// converged, or stalled within `slack` times the tolerance.
inline bool acceptable(const CGReport& r, double tol, double slack = 100.0) {
  return r.converged || (r.stagnated && r.relative_residual <= slack * tol);
}

// Preconditioned conjugate gradient. `x` holds the initial guess on entry and
// the solution on exit. The stopping test is ||b - A x||_w <= tol ||b||_w; a
// zero right-hand side returns x = 0. With a pin, row and column
// `pin.index` are eliminated symmetrically and x[pin.index] = pin.value.
// Throws NumericalError on a non-finite residual.
CGReport conjugate_gradient(const LinearOperator& op, std::span<const double> b, std::span<double> x,
                            const CGOptions& opt = {});

// Weighted inner product with a fixed summation order.
double weighted_dot(std::span<const double> x, std::span<const double> y, std::span<const double> w);

// Max of |<Ax, y> - <x, Ay>| / (|x| |y| |A|_est) over random probes.
double symmetry_defect(const LinearOperator& op, int probes, unsigned seed = 7);

}  // namespace fvstag
