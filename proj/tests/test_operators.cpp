#include <doctest.h>

#include <cmath>
#include <random>

#ifdef FVSTAG_HAVE_EIGEN
#include <Eigen/Dense>
#endif

#include "fvstag/operators.hpp"
#include "fvstag/verify.hpp"
#include "support.hpp"

using namespace fvstag;
using fvstag::testing::p1_of_cell;
using fvstag::testing::unit_mesh;

namespace {

NodeScalarField sample(const Mesh& m, auto&& f) {
  NodeScalarField out(m.num_nodes());
  for (std::size_t i = 0; i < m.num_nodes(); ++i) out[i] = f(m.nodes()[i]);
  return out;
}

double max_norm(const CellVectorField& v) {
  double s = 0.0;
  for (const auto& x : v) s = std::max(s, norm(x));
  return s;
}

}  // namespace

TEST_CASE("primal gradient: constants vanish, linears are exact") {
  const Mesh m = unit_mesh(7, false, 0.25, 2);
  CHECK(max_norm(gradient_primal(NodeScalarField(m.num_nodes(), 7.0), m)) < 1e-13);
  const CellVectorField g = gradient_primal(sample(m, [](Vec3 x) { return 2 * x.x + 3 * x.y; }), m);
  for (const auto& v : g) {
    CHECK(v.x == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(v.y == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(v.z == 0.0);
  }
}

TEST_CASE("primal gradient on the reference triangle") {
  const Mesh m = fvstag::testing::single_triangle({0, 0, 0}, {1, 0, 0}, {0, 1, 0});
  NodeScalarField phi(3);
  phi[1] = 1.0;
  const Vec3 g = gradient_primal(phi, m)[0];
  CHECK(g.x == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(g.y) < 1e-15);
}

TEST_CASE("primal curl of out-of-plane potentials") {
  const Mesh m = unit_mesh(6, false, 0.2, 4);
  CHECK(max_norm(curl_primal(NodeVectorField(m.num_nodes(), Vec3{0, 0, 3}), m)) < 1e-13);
  NodeVectorField j(m.num_nodes());
  for (std::size_t i = 0; i < j.size(); ++i) j[i] = {0, 0, m.nodes()[i].x};
  for (const auto& b : curl_primal(j, m)) {
    CHECK(std::abs(b.x) < 1e-12);
    CHECK(b.y == doctest::Approx(-1.0).epsilon(1e-12));
  }
}

TEST_CASE("vector gradient: linear exactness and rows match the scalar gradient") {
  const Mesh m = unit_mesh(6, false, 0.2, 8);
  NodeVectorField w(m.num_nodes());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = {m.nodes()[i].x, m.nodes()[i].y, 0.0};
  for (const Mat3& g : gradient_primal_vector(w, m)) {
    CHECK(g(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(g(1, 1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(g(0, 1)) < 1e-12);
    CHECK(std::abs(g(2, 2)) < 1e-15);
  }
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(-1, 1);
  NodeVectorField r(m.num_nodes());
  for (auto& x : r) x = {d(rng), d(rng), d(rng)};
  const CellTensorField g = gradient_primal_vector(r, m);
  for (int i = 0; i < 3; ++i) {
    NodeScalarField comp(m.num_nodes());
    for (std::size_t k = 0; k < comp.size(); ++k) comp[k] = r[k][i];
    const CellVectorField gi = gradient_primal(comp, m);
    for (std::size_t c = 0; c < m.num_cells(); ++c) CHECK(norm(g[c].row(i) - gi[c]) < 1e-13);
  }
}

TEST_CASE("dual operators of a uniform field vanish on periodic meshes") {
  const Mesh m = unit_mesh(9, true, 0.2, 6);
  const CellVectorField v(m.num_cells(), Vec3{0.3, -1.7, 0.0});
  for (double x : divergence_dual(v, m)) CHECK(std::abs(x) < 1e-12);
  for (const Vec3& x : curl_dual(v, m)) CHECK(norm(x) < 1e-12);
  for (const Mat3& x : gradient_dual(v, m)) CHECK(frobenius(x) < 1e-12);
}

TEST_CASE("discrete identities on random fields") {
  const IdentityReport r = verify_operator_identities({8, 16}, {0.0, 0.2}, 10, 5, 11);
  CHECK(r.curl_grad <= 1e-13);
  CHECK(r.div_curl <= 1e-13);
  CHECK(r.sbp <= 1e-12);
}

TEST_CASE("dual gradient, curl and divergence are consistent componentwise") {
  const Mesh m = unit_mesh(8, true, 0.2, 12);
  const CellVectorField v = random_cell_field(m, 5);
  CellVectorField vx(m.num_cells()), vy(m.num_cells()), rot(m.num_cells());
  for (std::size_t c = 0; c < v.size(); ++c) {
    vx[c] = {v[c].x, 0, 0};
    vy[c] = {0, v[c].x, 0};
    rot[c] = {v[c].y, -v[c].x, 0};
  }
  const NodeTensorField g = gradient_dual(v, m);
  const NodeScalarField div = divergence_dual(v, m);
  const NodeScalarField dx = divergence_dual(vx, m);
  const NodeScalarField dy = divergence_dual(vy, m);
  const NodeScalarField curl_z = divergence_dual(rot, m);
  const NodeVectorField curl = curl_dual(v, m);
  for (std::size_t p = 0; p < m.num_nodes(); ++p) {
    CHECK(g[p].trace() == doctest::Approx(div[p]).epsilon(1e-13).scale(100));
    CHECK(g[p](0, 0) == doctest::Approx(dx[p]).epsilon(1e-13).scale(100));
    CHECK(g[p](0, 1) == doctest::Approx(dy[p]).epsilon(1e-13).scale(100));
    CHECK(curl[p].z == doctest::Approx(curl_z[p]).epsilon(1e-13).scale(100));
  }
}

TEST_CASE("dual curl of a rigid rotation") {
  const Mesh m = unit_mesh(9, false);
  CellVectorField v(m.num_cells());
  const auto bc = m.cell_barycenter();
  for (std::size_t c = 0; c < v.size(); ++c) v[c] = {-bc[c].y, bc[c].x, 0};
  const NodeVectorField w = curl_dual(v, m);
  for (std::size_t u = 0; u < m.num_unique_nodes(); ++u) {
    if (m.is_boundary_unique(static_cast<int>(u))) continue;
    CHECK(w[m.unique_representative(static_cast<int>(u))].z == doctest::Approx(2.0).epsilon(1e-12));
  }
}

TEST_CASE("cell to node averaging") {
  const Mesh m = unit_mesh(6, true, 0.2, 2);
  for (double x : average_cell_to_node(CellScalarField(m.num_cells(), 4.0), m))
    CHECK(x == doctest::Approx(4.0).epsilon(1e-14));

  CellScalarField one(m.num_cells());
  const int c0 = 7;
  one[c0] = 1.0;
  const NodeScalarField a = average_cell_to_node(one, m);
  for (int k = 0; k < 3; ++k) {
    const int p = m.triangles()[c0][k];
    CHECK(a[p] == doctest::Approx(m.subcell_area(c0, k) / m.dual_area(p)).epsilon(1e-14));
  }

  const CellScalarField r = [&] {
    CellScalarField f(m.num_cells());
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> d(-2, 5);
    for (auto& x : f) x = d(rng);
    return f;
  }();
  const NodeScalarField ra = average_cell_to_node(r, m);
  for (std::size_t u = 0; u < m.num_unique_nodes(); ++u) {
    double lo = 1e300, hi = -1e300;
    for (const Corner& k : m.node_cells(static_cast<int>(u))) {
      lo = std::min(lo, r[k.cell]);
      hi = std::max(hi, r[k.cell]);
    }
    const double v = ra[m.unique_representative(static_cast<int>(u))];
    CHECK(v >= lo - 1e-14);
    CHECK(v <= hi + 1e-14);
  }
}

TEST_CASE("node to cell averaging") {
  const Mesh m = fvstag::testing::single_triangle({0, 0, 0}, {1, 0, 0}, {0, 1, 0});
  NodeScalarField g(3);
  g[0] = 0;
  g[1] = 3;
  g[2] = 6;
  CHECK(average_node_to_cell(g, m)[0] == doctest::Approx(3.0));

  const Mesh big = unit_mesh(5, false, 0.2, 3);
  auto lin = [](Vec3 x) { return 1.5 - 2 * x.x + 0.5 * x.y; };
  const CellScalarField c = average_node_to_cell(sample(big, lin), big);
  for (std::size_t k = 0; k < c.size(); ++k)
    CHECK(c[k] == doctest::Approx(lin(big.cell_barycenter()[k])).epsilon(1e-14));
}

#ifdef FVSTAG_HAVE_EIGEN
namespace {

// Dense matrix of the primal gradient on unique nodes: row 2c+d, column u.
Eigen::MatrixXd dense_gradient(const Mesh& m) {
  const int nu = static_cast<int>(m.num_unique_nodes());
  const int nc = static_cast<int>(m.num_cells());
  Eigen::MatrixXd G(2 * nc, nu);
  for (int u = 0; u < nu; ++u) {
    std::vector<double> e(nu, 0.0);
    e[u] = 1.0;
    const CellVectorField g = gradient_primal(scatter_unique(e, m), m);
    for (int c = 0; c < nc; ++c) {
      G(2 * c, u) = g[c].x;
      G(2 * c + 1, u) = g[c].y;
    }
  }
  return G;
}

Eigen::MatrixXd dense_divergence(const Mesh& m) {
  const int nu = static_cast<int>(m.num_unique_nodes());
  const int nc = static_cast<int>(m.num_cells());
  Eigen::MatrixXd D(nu, 2 * nc);
  for (int j = 0; j < 2 * nc; ++j) {
    CellVectorField v(nc);
    v[j / 2][j % 2] = 1.0;
    const auto d = gather_unique(divergence_dual(v, m, BoundaryClosure::natural), m);
    for (int u = 0; u < nu; ++u) D(u, j) = d[u];
  }
  return D;
}

// P1 Lagrange gradient of the hat functions, assembled cell by cell.
Eigen::MatrixXd p1_gradient(const Mesh& m) {
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(2 * m.num_cells(), m.num_unique_nodes());
  for (int c = 0; c < static_cast<int>(m.num_cells()); ++c) {
    const auto el = p1_of_cell(m, c);
    for (int k = 0; k < 3; ++k) {
      const int u = m.unique_index(m.triangles()[c][k]);
      G(2 * c, u) += el.grad[k].x;
      G(2 * c + 1, u) += el.grad[k].y;
    }
  }
  return G;
}

Eigen::MatrixXd p1_stiffness(const Mesh& m) {
  const int nu = static_cast<int>(m.num_unique_nodes());
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(nu, nu);
  for (int c = 0; c < static_cast<int>(m.num_cells()); ++c) {
    const auto el = p1_of_cell(m, c);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        K(m.unique_index(m.triangles()[c][a]), m.unique_index(m.triangles()[c][b])) +=
            el.area * dot(el.grad[a], el.grad[b]);
  }
  return K;
}

Eigen::MatrixXd dense_laplacian(const Mesh& m) {
  const int nu = static_cast<int>(m.num_unique_nodes());
  Eigen::MatrixXd L(nu, nu);
  std::vector<Vec3> scratch;
  std::vector<double> e(nu), y(nu);
  for (int u = 0; u < nu; ++u) {
    std::fill(e.begin(), e.end(), 0.0);
    e[u] = 1.0;
    apply_negative_laplacian(m, e, y, scratch);
    for (int r = 0; r < nu; ++r) L(r, u) = m.dual_area_unique(r) * y[r];
  }
  return L;
}

}  // namespace

TEST_CASE("primal gradient equals the P1 gradient and the pressure matrix equals the P1 stiffness") {
  for (bool periodic : {true, false}) {
    const Mesh m = unit_mesh(8, periodic, 0.2, 21);
    CHECK((dense_gradient(m) - p1_gradient(m)).cwiseAbs().maxCoeff() <= 1e-13 * 8);
    const Eigen::MatrixXd K = p1_stiffness(m);
    CHECK((dense_laplacian(m) - K).cwiseAbs().maxCoeff() <= 1e-13 * std::max(1.0, K.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("dual divergence is the negative adjoint of the primal gradient") {
  for (bool periodic : {true, false}) {
    const Mesh m = unit_mesh(7, periodic, 0.25, 4);
    const Eigen::MatrixXd G = dense_gradient(m);
    const Eigen::MatrixXd D = dense_divergence(m);
    Eigen::VectorXd wc(2 * m.num_cells());
    for (std::size_t c = 0; c < m.num_cells(); ++c) wc(2 * c) = wc(2 * c + 1) = m.cell_area()[c];
    Eigen::VectorXd wp(m.num_unique_nodes());
    for (std::size_t u = 0; u < m.num_unique_nodes(); ++u) wp(u) = m.dual_area_unique(static_cast<int>(u));
    const Eigen::MatrixXd lhs = wc.asDiagonal() * G;
    const Eigen::MatrixXd rhs = -(wp.asDiagonal() * D).transpose();
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-13);
  }
}

TEST_CASE("pressure matrix is symmetric positive semi-definite with a one-dimensional kernel") {
  const Mesh m = unit_mesh(8, true, 0.2, 9);
  const Eigen::MatrixXd L = dense_laplacian(m);
  CHECK((L - L.transpose()).cwiseAbs().maxCoeff() <= 1e-13);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (L + L.transpose()));
  const auto& ev = es.eigenvalues();
  CHECK(std::abs(ev(0)) < 1e-12);
  CHECK(ev(1) > 1e-6);
}
#endif
