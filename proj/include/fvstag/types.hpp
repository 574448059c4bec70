#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fvstag {

// Planar quantities are stored as 3-vectors; the z slot carries out-of-plane
// components such as A_z or E_z.
struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
  constexpr double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

  constexpr Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  constexpr Vec3& operator-=(const Vec3& o) {
    x -= o.x;
    y -= o.y;
    z -= o.z;
    return *this;
  }
  constexpr Vec3& operator*=(double s) {
    x *= s;
    y *= s;
    z *= s;
    return *this;
  }
};

constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
constexpr Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

// Row-major 3x3 tensor; (i, j) is row i, column j.
struct Mat3 {
  std::array<double, 9> a{};

  static constexpr Mat3 identity() {
    Mat3 m;
    m.a[0] = m.a[4] = m.a[8] = 1.0;
    return m;
  }
  static constexpr Mat3 diag(double d0, double d1, double d2) {
    Mat3 m;
    m.a[0] = d0;
    m.a[4] = d1;
    m.a[8] = d2;
    return m;
  }

  constexpr double& operator()(int i, int j) { return a[3 * i + j]; }
  constexpr double operator()(int i, int j) const { return a[3 * i + j]; }

  constexpr Vec3 row(int i) const { return {a[3 * i], a[3 * i + 1], a[3 * i + 2]}; }
  constexpr void set_row(int i, const Vec3& r) {
    a[3 * i] = r.x;
    a[3 * i + 1] = r.y;
    a[3 * i + 2] = r.z;
  }

  constexpr Mat3& operator+=(const Mat3& o) {
    for (int k = 0; k < 9; ++k) a[k] += o.a[k];
    return *this;
  }
  constexpr Mat3& operator-=(const Mat3& o) {
    for (int k = 0; k < 9; ++k) a[k] -= o.a[k];
    return *this;
  }
  constexpr Mat3& operator*=(double s) {
    for (auto& v : a) v *= s;
    return *this;
  }

  constexpr double trace() const { return a[0] + a[4] + a[8]; }

  constexpr Mat3 transposed() const {
    Mat3 t;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) t(i, j) = (*this)(j, i);
    return t;
  }
};

constexpr Mat3 operator+(Mat3 a, const Mat3& b) { return a += b; }
constexpr Mat3 operator-(Mat3 a, const Mat3& b) { return a -= b; }
constexpr Mat3 operator*(double s, Mat3 a) { return a *= s; }

constexpr Mat3 operator*(const Mat3& l, const Mat3& r) {
  Mat3 m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += l(i, k) * r(k, j);
      m(i, j) = s;
    }
  return m;
}

constexpr Vec3 operator*(const Mat3& m, const Vec3& v) {
  return {m(0, 0) * v.x + m(0, 1) * v.y + m(0, 2) * v.z,
          m(1, 0) * v.x + m(1, 1) * v.y + m(1, 2) * v.z,
          m(2, 0) * v.x + m(2, 1) * v.y + m(2, 2) * v.z};
}

// Outer product a b^T.
constexpr Mat3 outer(const Vec3& a, const Vec3& b) {
  Mat3 m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = a[i] * b[j];
  return m;
}

inline double frobenius(const Mat3& m) {
  double s = 0.0;
  for (double v : m.a) s += v * v;
  return std::sqrt(s);
}

enum class Location { node, cell };

// A value array tied to a mesh location. Node fields have one entry per mesh
// node (periodic copies included), cell fields one entry per triangle.
template <Location L, class T>
class Field {
 public:
  using value_type = T;
  static constexpr Location location = L;

  Field() = default;
  explicit Field(std::size_t n, const T& v = T{}) : data_(n, v) {}
  explicit Field(std::vector<T> v) : data_(std::move(v)) {}

  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  auto begin() { return data_.begin(); }
  auto end() { return data_.end(); }
  auto begin() const { return data_.begin(); }
  auto end() const { return data_.end(); }

  std::span<T> span() { return data_; }
  std::span<const T> span() const { return data_; }
  std::vector<T>& values() { return data_; }
  const std::vector<T>& values() const { return data_; }

 private:
  std::vector<T> data_;
};

using NodeScalarField = Field<Location::node, double>;
using NodeVectorField = Field<Location::node, Vec3>;
using NodeTensorField = Field<Location::node, Mat3>;
using CellScalarField = Field<Location::cell, double>;
using CellVectorField = Field<Location::cell, Vec3>;
using CellTensorField = Field<Location::cell, Mat3>;

class GeometryError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};
class TopologyError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};
class NumericalError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};
class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};
class SolverError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace fvstag
