#include "mixhom/kernels.hpp"

namespace mixhom::kernels::serial {

void matvec(std::span<const double> w, std::size_t n, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = w.data() + i * n;
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += row[j] * x[j];
    y[i] = acc;
  }
}

void select_matvec(std::span<const double> w, std::size_t n, std::span<const double> x, std::span<const double> alt,
                   std::span<const std::uint8_t> use_alt, std::span<double> y) {
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = w.data() + i * n;
    const double* src = use_alt[i] ? alt.data() : x.data();
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += row[j] * src[j];
    y[i] = acc;
  }
}

void stencil_add(StencilView stencil, double coef, std::span<const double> x, std::span<double> y) {
  const std::size_t n = stencil.offsets.size() - 1;
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t p = stencil.offsets[i]; p < stencil.offsets[i + 1]; ++p) acc += x[stencil.neighbours[p]] - x[i];
    y[i] += coef * acc;
  }
}

void axpy_into(std::span<const double> x, double a, std::span<const double> k, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + a * k[i];
}

void rk4_combine(std::span<double> x, double dt, std::span<const double> k1, std::span<const double> k2,
                 std::span<const double> k3, std::span<const double> k4) {
  const double c = dt / 6.0;
  for (std::size_t i = 0; i < x.size(); ++i) x[i] += c * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

double sum(std::span<const double> x) {
  double acc = 0.0;
  for (double v : x) acc += v;
  return acc;
}

double dot(std::span<const double> x, std::span<const double> y) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
  return acc;
}

}  // namespace mixhom::kernels::serial

namespace mixhom::kernels {

void matvec(Exec exec, std::span<const double> w, std::size_t n, std::span<const double> x, std::span<double> y) {
  exec == Exec::serial ? serial::matvec(w, n, x, y) : omp::matvec(w, n, x, y);
}

void select_matvec(Exec exec, std::span<const double> w, std::size_t n, std::span<const double> x,
                   std::span<const double> alt, std::span<const std::uint8_t> use_alt, std::span<double> y) {
  exec == Exec::serial ? serial::select_matvec(w, n, x, alt, use_alt, y)
                       : omp::select_matvec(w, n, x, alt, use_alt, y);
}

void stencil_add(Exec exec, StencilView stencil, double coef, std::span<const double> x, std::span<double> y) {
  exec == Exec::serial ? serial::stencil_add(stencil, coef, x, y) : omp::stencil_add(stencil, coef, x, y);
}

void axpy_into(Exec exec, std::span<const double> x, double a, std::span<const double> k, std::span<double> y) {
  exec == Exec::serial ? serial::axpy_into(x, a, k, y) : omp::axpy_into(x, a, k, y);
}

void rk4_combine(Exec exec, std::span<double> x, double dt, std::span<const double> k1, std::span<const double> k2,
                 std::span<const double> k3, std::span<const double> k4) {
  exec == Exec::serial ? serial::rk4_combine(x, dt, k1, k2, k3, k4) : omp::rk4_combine(x, dt, k1, k2, k3, k4);
}

double sum(Exec exec, std::span<const double> x) { return exec == Exec::serial ? serial::sum(x) : omp::sum(x); }

double dot(Exec exec, std::span<const double> x, std::span<const double> y) {
  return exec == Exec::serial ? serial::dot(x, y) : omp::dot(x, y);
}

}  // namespace mixhom::kernels
