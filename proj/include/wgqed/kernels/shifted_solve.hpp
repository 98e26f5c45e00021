// shifted_solve.hpp - batched dense complex solves (A - s_k·I)·x_k = b over a
// list of real shifts s_k.
//
// This is the inner loop of every detuning scan: one small matrix, one
// right-hand side, many probe detunings. The scalar kernel is the reference;
// the AVX2 kernel runs four shifts per register and performs the same IEEE
// operations in the same order, so both produce identical bits. Pivoting is
// partial (row), chosen per shift by the largest |a_ik|².

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace wgqed::kernels {

enum class Backend { scalar, avx2 };

std::string_view name(Backend b);

/// True when the running CPU and this build support the backend.
bool available(Backend b);

/// Best available backend, unless WGQED_KERNEL=scalar|avx2 overrides it.
Backend default_backend();

/// Row-major split-complex copy of the system, built once per scan.
struct ShiftedSystem {
  std::size_t n = 0;
  std::vector<double> a_re, a_im;  // n*n, row-major
  std::vector<double> b_re, b_im;  // n

  ShiftedSystem() = default;
  ShiftedSystem(std::size_t dim, std::span<const std::complex<double>> row_major_a,
                std::span<const std::complex<double>> rhs);
};

/// Per-shift output: x (n entries) and the pivot magnitude ratio
/// max|u_kk| / min|u_kk| of the LU factors (infinity for an exactly
/// singular pivot).
struct ShiftedSolution {
  std::size_t n = 0;
  std::vector<std::complex<double>> x;  // shifts.size() * n
  std::vector<double> pivot_ratio;      // shifts.size()

  std::span<const std::complex<double>> at(std::size_t k) const { return {x.data() + k * n, n}; }
};

ShiftedSolution solve_shifted(const ShiftedSystem& sys, std::span<const double> shifts, Backend backend);
inline ShiftedSolution solve_shifted(const ShiftedSystem& sys, std::span<const double> shifts) {
  return solve_shifted(sys, shifts, default_backend());
}

namespace detail {
// Each writes shifts.size() solutions into out (pre-sized).
void solve_scalar(const ShiftedSystem& sys, std::span<const double> shifts, ShiftedSolution& out);
void solve_avx2(const ShiftedSystem& sys, std::span<const double> shifts, ShiftedSolution& out);
}  // namespace detail

}  // namespace wgqed::kernels
