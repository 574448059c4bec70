#include "fvstag/linsolve.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "fvstag/types.hpp"

namespace fvstag {

double weighted_dot(std::span<const double> x, std::span<const double> y, std::span<const double> w) {
  double s = 0.0;
  if (w.empty()) {
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  } else {
    for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * x[i] * y[i];
  }
  return s;
}

namespace {

// Symmetric elimination of one unknown: row and column `pin.index` of A are
// replaced by the identity.
struct PinnedSystem {
  const LinearOperator& base;
  Pin pin;
  mutable std::vector<double> tmp;

  void apply(std::span<const double> x, std::span<double> y) const {
    tmp.assign(x.begin(), x.end());
    tmp[pin.index] = 0.0;
    base.apply(tmp, y);
    y[pin.index] = x[pin.index];
  }
};

}  // namespace

CGReport conjugate_gradient(const LinearOperator& op, std::span<const double> b_in, std::span<double> x,
                            const CGOptions& opt) {
  const std::size_t n = op.size;
  if (b_in.size() != n || x.size() != n) throw ConfigError("conjugate_gradient: size mismatch");
  const std::span<const double> w = op.weights;
  const std::size_t max_iter = opt.max_iter > 0 ? opt.max_iter : 10 * std::max<std::size_t>(n, 1);

  std::vector<double> b(b_in.begin(), b_in.end());
  std::optional<PinnedSystem> pinned;
  if (opt.pin) {
    if (opt.pin->index >= n) throw ConfigError("conjugate_gradient: pin index out of range");
    pinned.emplace(PinnedSystem{op, *opt.pin, {}});
    std::vector<double> e(n, 0.0);
    std::vector<double> ae(n, 0.0);
    e[opt.pin->index] = opt.pin->value;
    op.apply(e, ae);
    for (std::size_t i = 0; i < n; ++i) b[i] -= ae[i];
    b[opt.pin->index] = opt.pin->value;
    x[opt.pin->index] = opt.pin->value;
  }
  auto apply = [&](std::span<const double> in, std::span<double> out) {
    if (pinned)
      pinned->apply(in, out);
    else
      op.apply(in, out);
  };

  std::vector<double> inv_diag;
  if (opt.jacobi && op.diagonal) {
    inv_diag.assign(n, 1.0);
    op.diagonal(inv_diag);
    for (double& d : inv_diag) d = d > 0.0 ? 1.0 / d : 1.0;
    if (opt.pin) inv_diag[opt.pin->index] = 1.0;
  }
  auto precondition = [&](const std::vector<double>& r, std::vector<double>& z) {
    if (inv_diag.empty()) {
      z = r;
    } else {
      for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    }
  };

  CGReport rep;
  const double bnorm = std::sqrt(weighted_dot(b, b, w));
  if (bnorm == 0.0) {
    // x = 0 solves the system exactly (minimum norm when A is singular)
    std::fill(x.begin(), x.end(), 0.0);
    rep.converged = true;
    return rep;
  }

  std::vector<double> r(n), z(n), p(n), ap(n);
  auto true_residual = [&] {
    apply(std::span<const double>(x.data(), n), ap);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - ap[i];
    return std::sqrt(weighted_dot(r, r, w)) / bnorm;
  };

  double rel = true_residual();
  if (opt.record_history) rep.residual_history.push_back(rel);
  if (!std::isfinite(rel)) throw NumericalError("conjugate_gradient: non-finite initial residual");

  int restarts = 0;
  double last_true = rel;
  while (rel > opt.tol && rep.iterations < max_iter) {
    precondition(r, z);
    p = z;
    double rz = weighted_dot(r, z, w);
    bool recursive_converged = false;
    while (rep.iterations < max_iter) {
      apply(p, ap);
      const double pap = weighted_dot(p, ap, w);
      if (!(pap > 0.0)) {
        if (!std::isfinite(pap)) throw NumericalError("conjugate_gradient: non-finite curvature");
        break;
      }
      const double alpha = rz / pap;
      for (std::size_t i = 0; i < n; ++i) {
        x[i] += alpha * p[i];
        r[i] -= alpha * ap[i];
      }
      ++rep.iterations;
      rel = std::sqrt(weighted_dot(r, r, w)) / bnorm;
      if (!std::isfinite(rel)) {
        std::ostringstream os;
        os << "conjugate_gradient: non-finite residual at iteration " << rep.iterations;
        throw NumericalError(os.str());
      }
      if (opt.record_history) rep.residual_history.push_back(rel);
      if (rel <= opt.tol) {
        recursive_converged = true;
        break;
      }
      precondition(r, z);
      const double rz_new = weighted_dot(r, z, w);
      const double beta = rz_new / rz;
      rz = rz_new;
      for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    // The recursively updated residual drifts from b - A x near machine
    // precision; confirm with the true residual and restart if needed.
    rel = true_residual();
    if (!recursive_converged) break;
    if (rel > opt.tol && (++restarts > 5 || rel > 0.5 * last_true)) {
      // Restarts no longer reduce the true residual: round-off floor.
      rep.stagnated = true;
      break;
    }
    last_true = rel;
  }
  rep.relative_residual = rel;
  rep.converged = rel <= opt.tol;
  return rep;
}

double symmetry_defect(const LinearOperator& op, int probes, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> dist;
  const std::size_t n = op.size;
  std::vector<double> x(n), y(n), ax(n), ay(n);
  double worst = 0.0;
  for (int k = 0; k < probes; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = dist(rng);
      y[i] = dist(rng);
    }
    op.apply(x, ax);
    op.apply(y, ay);
    const std::span<const double> w = op.weights;
    const double nx = std::sqrt(weighted_dot(x, x, w));
    const double ny = std::sqrt(weighted_dot(y, y, w));
    const double a_est = std::max(std::sqrt(weighted_dot(ax, ax, w)) / nx, std::sqrt(weighted_dot(ay, ay, w)) / ny);
    const double d = std::abs(weighted_dot(ax, y, w) - weighted_dot(x, ay, w));
    worst = std::max(worst, d / (nx * ny * std::max(a_est, 1e-300)));
  }
  return worst;
}

}  // namespace fvstag
