#include <doctest.h>

#include <cmath>
#include <limits>
#include <memory>
#include <numbers>

#ifdef FVSTAG_HAVE_EIGEN
#include <Eigen/Dense>
#endif

#include "fvstag/linsolve.hpp"
#include "fvstag/operators.hpp"
#include "support.hpp"

using namespace fvstag;

namespace {

// Periodic 1D -d2/dx2 stencil on n points with unit spacing.
LinearOperator periodic_1d(std::size_t n) {
  LinearOperator op;
  op.size = n;
  op.apply = [n](std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < n; ++i) y[i] = 2 * x[i] - x[(i + n - 1) % n] - x[(i + 1) % n];
  };
  op.diagonal = [](std::span<double> d) { std::fill(d.begin(), d.end(), 2.0); };
  return op;
}

LinearOperator mesh_laplacian(const Mesh& m) {
  auto scratch = std::make_shared<std::vector<Vec3>>();
  LinearOperator op;
  op.size = m.num_unique_nodes();
  op.apply = [&m, scratch](std::span<const double> x, std::span<double> y) {
    apply_negative_laplacian(m, x, y, *scratch);
  };
  op.weights.assign(m.dual_areas_unique().begin(), m.dual_areas_unique().end());
  return op;
}

}  // namespace

TEST_CASE("identity operator converges in one iteration") {
  LinearOperator op;
  op.size = 5;
  op.apply = [](std::span<const double> x, std::span<double> y) { std::copy(x.begin(), x.end(), y.begin()); };
  const std::vector<double> b{1, -2, 3, 0.5, 7};
  std::vector<double> x(5, 0.0);
  const CGReport r = conjugate_gradient(op, b, x);
  CHECK(r.converged);
  CHECK(r.iterations == 1);
  for (int i = 0; i < 5; ++i) CHECK(x[i] == doctest::Approx(b[i]).epsilon(1e-15));
}

TEST_CASE("zero right-hand side returns the zero solution") {
  const LinearOperator op = periodic_1d(6);
  const std::vector<double> b(6, 0.0);
  std::vector<double> x{1, 1, 1, 1, 1, 1};
  const CGReport r = conjugate_gradient(op, b, x);
  CHECK(r.converged);
  CHECK(r.iterations == 0);
  for (double v : x) CHECK(v == 0.0);
}

#ifdef FVSTAG_HAVE_EIGEN
TEST_CASE("periodic 1D Laplacian matches a dense solve") {
  const std::size_t n = 8;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    A(i, i) = 2;
    A(i, (i + 1) % n) -= 1;
    A(i, (i + n - 1) % n) -= 1;
  }
  Eigen::VectorXd b(n);
  b << 1, -3, 2, 0.5, -0.25, 4, -2, 0;
  b.array() -= b.mean();
  // minimum-norm solution of the singular system
  const Eigen::VectorXd ref = A.completeOrthogonalDecomposition().solve(b);

  for (bool jacobi : {false, true}) {
    std::vector<double> x(n, 0.0);
    CGOptions opt;
    opt.jacobi = jacobi;
    const CGReport r = conjugate_gradient(periodic_1d(n), std::span(b.data(), n), x, opt);
    CHECK(r.converged);
    double mean = 0.0;
    for (double v : x) mean += v / n;
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(x[i] - mean - ref(i)) <= 1e-10);
  }

  // pinned gauge: same solution shifted so that x[0] = 0.75
  std::vector<double> x(n, 0.0);
  CGOptions opt;
  opt.pin = Pin{0, 0.75};
  const CGReport r = conjugate_gradient(periodic_1d(n), std::span(b.data(), n), x, opt);
  CHECK(r.converged);
  CHECK(x[0] == 0.75);
  for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(x[i] - 0.75 - (ref(i) - ref(0))) <= 1e-10);
}
#endif

TEST_CASE("pressure Poisson system on the 20x20 Taylor-Green mesh") {
  StructuredMeshOptions o;
  o.nx = o.ny = 20;
  o.domain = Rect{0, 2 * std::numbers::pi, 0, 2 * std::numbers::pi};
  o.periodic_x = o.periodic_y = true;
  const Mesh m = generate_structured_triangulation(o);
  const LinearOperator op = mesh_laplacian(m);
  CHECK(symmetry_defect(op, 5) < 1e-13);

  std::vector<double> b(op.size);
  double mean = 0.0, area = 0.0;
  for (std::size_t u = 0; u < b.size(); ++u) {
    const Vec3 x = m.nodes()[m.unique_representative(static_cast<int>(u))];
    b[u] = std::cos(2 * x.x) + std::cos(2 * x.y) + 0.1 * std::sin(x.x);
    mean += op.weights[u] * b[u];
    area += op.weights[u];
  }
  for (double& v : b) v -= mean / area;

  std::vector<double> x(op.size, 0.0);
  CGOptions opt;
  opt.pin = Pin{0, 0.0};
  const CGReport r = conjugate_gradient(op, b, x, opt);
  CHECK(r.converged);
  CHECK(r.relative_residual <= 1e-12);
  // frozen on first run; guards against silent loss of convergence speed
  CHECK(r.iterations <= 90);
  MESSAGE("pressure CG iterations: " << r.iterations);

  std::vector<double> xj(op.size, 0.0);
  opt.jacobi = true;
  const CGReport rj = conjugate_gradient(op, b, xj, opt);
  CHECK(rj.converged);
  for (std::size_t u = 0; u < x.size(); ++u) CHECK(std::abs(x[u] - xj[u]) < 1e-9);
}

TEST_CASE("weighted dot has a fixed order and the expected value") {
  const std::vector<double> x{1, 2, 3}, y{4, 5, 6}, w{0.5, 1, 2};
  CHECK(weighted_dot(x, y, w) == doctest::Approx(0.5 * 4 + 10 + 36));
  CHECK(weighted_dot(x, y, {}) == doctest::Approx(32));
}

TEST_CASE("invalid inputs") {
  const LinearOperator op = periodic_1d(4);
  std::vector<double> b(4, 1.0), x(3, 0.0);
  CHECK_THROWS_AS(conjugate_gradient(op, b, x), ConfigError);

  std::vector<double> xx(4, 0.0);
  b[2] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(conjugate_gradient(op, b, xx), NumericalError);

  b[2] = 1.0;
  CGOptions opt;
  opt.pin = Pin{9, 0.0};
  CHECK_THROWS_AS(conjugate_gradient(op, b, xx, opt), ConfigError);
}

TEST_CASE("iteration cap reports non-convergence") {
  const std::size_t n = 64;
  std::vector<double> b(n);
  for (std::size_t i = 0; i < n; ++i) b[i] = std::sin(0.3 * i) - std::sin(0.3 * (i + 1)) * 0.5;
  double mean = 0.0;
  for (double v : b) mean += v / n;
  for (double& v : b) v -= mean;
  std::vector<double> x(n, 0.0);
  CGOptions opt;
  opt.max_iter = 3;
  const CGReport r = conjugate_gradient(periodic_1d(n), b, x, opt);
  CHECK_FALSE(r.converged);
  CHECK(r.iterations == 3);
  CHECK_FALSE(acceptable(r, opt.tol));
}
