#include <omp.h>

#include <vector>

#include "mixhom/kernels.hpp"

namespace mixhom::kernels::omp {

namespace {

// Below this many elements a parallel region costs more than it saves.
constexpr std::ptrdiff_t min_parallel = 1 << 14;

template <class Term>
double blocked_reduce(std::size_t n, Term term) {
  const std::size_t blocks = (n + reduction_block - 1) / reduction_block;
  std::vector<double> partial(blocks, 0.0);
  const auto nb = static_cast<std::ptrdiff_t>(blocks);
#pragma omp parallel for schedule(static) if (static_cast<std::ptrdiff_t>(n) >= min_parallel)
  for (std::ptrdiff_t b = 0; b < nb; ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * reduction_block;
    const std::size_t hi = std::min(n, lo + reduction_block);
    double acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i) acc += term(i);
    partial[static_cast<std::size_t>(b)] = acc;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

}  // namespace

void matvec(std::span<const double> w, std::size_t n, std::span<const double> x, std::span<double> y) {
  const auto rows = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static) if (rows * rows >= min_parallel)
  for (std::ptrdiff_t i = 0; i < rows; ++i) {
    const double* row = w.data() + static_cast<std::size_t>(i) * n;
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += row[j] * x[j];
    y[static_cast<std::size_t>(i)] = acc;
  }
}

void select_matvec(std::span<const double> w, std::size_t n, std::span<const double> x, std::span<const double> alt,
                   std::span<const std::uint8_t> use_alt, std::span<double> y) {
  const auto rows = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static) if (rows * rows >= min_parallel)
  for (std::ptrdiff_t i = 0; i < rows; ++i) {
    const auto r = static_cast<std::size_t>(i);
    const double* row = w.data() + r * n;
    const double* src = use_alt[r] ? alt.data() : x.data();
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += row[j] * src[j];
    y[r] = acc;
  }
}

void stencil_add(StencilView stencil, double coef, std::span<const double> x, std::span<double> y) {
  const auto n = static_cast<std::ptrdiff_t>(stencil.offsets.size() - 1);
#pragma omp parallel for schedule(static) if (n >= min_parallel)
  for (std::ptrdiff_t ii = 0; ii < n; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    double acc = 0.0;
    for (std::size_t p = stencil.offsets[i]; p < stencil.offsets[i + 1]; ++p) acc += x[stencil.neighbours[p]] - x[i];
    y[i] += coef * acc;
  }
}

void axpy_into(std::span<const double> x, double a, std::span<const double> k, std::span<double> y) {
  const auto n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for simd schedule(static) if (n >= min_parallel)
  for (std::ptrdiff_t i = 0; i < n; ++i) y[i] = x[i] + a * k[i];
}

void rk4_combine(std::span<double> x, double dt, std::span<const double> k1, std::span<const double> k2,
                 std::span<const double> k3, std::span<const double> k4) {
  const double c = dt / 6.0;
  const auto n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for simd schedule(static) if (n >= min_parallel)
  for (std::ptrdiff_t i = 0; i < n; ++i) x[i] += c * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

double sum(std::span<const double> x) {
  return blocked_reduce(x.size(), [&](std::size_t i) { return x[i]; });
}

double dot(std::span<const double> x, std::span<const double> y) {
  return blocked_reduce(x.size(), [&](std::size_t i) { return x[i] * y[i]; });
}

}  // namespace mixhom::kernels::omp
