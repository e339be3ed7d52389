#pragma once

// Data-parallel inner loops shared by the solvers. Every kernel exists twice:
// `serial` is the plain reference kept for testing, `omp` is the OpenMP
// version used in production. Row-wise kernels perform each row's reduction
// in the same order in both variants, so their results are bitwise equal and
// independent of the thread count. Global reductions use fixed-size blocks
// combined in block order.

#include <cstddef>
#include <cstdint>
#include <span>

namespace mixhom {

enum class Exec { serial, parallel };

namespace kernels {

/// Compressed neighbour lists for the Neumann Laplacian: the neighbours of
/// cell i are neighbours[offsets[i] .. offsets[i+1]).
struct StencilView {
  std::span<const std::size_t> offsets;
  std::span<const std::size_t> neighbours;
};

namespace serial {

/// y = W x for a dense row-major n x n matrix.
void matvec(std::span<const double> w, std::size_t n, std::span<const double> x, std::span<double> y);

/// y_i = sum_j W_ij (use_alt[i] ? alt_j : x_j): one pass over W for the
/// coupled generator, where B rows only see A sources.
void select_matvec(std::span<const double> w, std::size_t n, std::span<const double> x, std::span<const double> alt,
                   std::span<const std::uint8_t> use_alt, std::span<double> y);

/// y_i += coef * sum_{j ~ i} (x_j - x_i).
void stencil_add(StencilView stencil, double coef, std::span<const double> x, std::span<double> y);

/// y = x + a * k
void axpy_into(std::span<const double> x, double a, std::span<const double> k, std::span<double> y);

/// x += dt/6 (k1 + 2 k2 + 2 k3 + k4)
void rk4_combine(std::span<double> x, double dt, std::span<const double> k1, std::span<const double> k2,
                 std::span<const double> k3, std::span<const double> k4);

double sum(std::span<const double> x);
double dot(std::span<const double> x, std::span<const double> y);

}  // namespace serial

namespace omp {

void matvec(std::span<const double> w, std::size_t n, std::span<const double> x, std::span<double> y);
void select_matvec(std::span<const double> w, std::size_t n, std::span<const double> x, std::span<const double> alt,
                   std::span<const std::uint8_t> use_alt, std::span<double> y);
void stencil_add(StencilView stencil, double coef, std::span<const double> x, std::span<double> y);
void axpy_into(std::span<const double> x, double a, std::span<const double> k, std::span<double> y);
void rk4_combine(std::span<double> x, double dt, std::span<const double> k1, std::span<const double> k2,
                 std::span<const double> k3, std::span<const double> k4);
double sum(std::span<const double> x);
double dot(std::span<const double> x, std::span<const double> y);

}  // namespace omp

// Dispatch helpers.
void matvec(Exec exec, std::span<const double> w, std::size_t n, std::span<const double> x, std::span<double> y);
void select_matvec(Exec exec, std::span<const double> w, std::size_t n, std::span<const double> x,
                   std::span<const double> alt, std::span<const std::uint8_t> use_alt, std::span<double> y);
void stencil_add(Exec exec, StencilView stencil, double coef, std::span<const double> x, std::span<double> y);
void axpy_into(Exec exec, std::span<const double> x, double a, std::span<const double> k, std::span<double> y);
void rk4_combine(Exec exec, std::span<double> x, double dt, std::span<const double> k1, std::span<const double> k2,
                 std::span<const double> k3, std::span<const double> k4);
double sum(Exec exec, std::span<const double> x);
double dot(Exec exec, std::span<const double> x, std::span<const double> y);

/// Block length of the fixed-order global reductions.
inline constexpr std::size_t reduction_block = 4096;

}  // namespace kernels
}  // namespace mixhom
