#include "wgqed/kernels/shifted_solve.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace wgqed::kernels {

std::string_view name(Backend b) { return b == Backend::avx2 ? "avx2" : "scalar"; }

bool available(Backend b) {
  if (b == Backend::scalar) return true;
#if defined(WGQED_HAVE_AVX2)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Backend default_backend() {
  static const Backend chosen = [] {
    if (const char* env = std::getenv("WGQED_KERNEL")) {
      const std::string v(env);
      if (v == "scalar") return Backend::scalar;
      if (v == "avx2" && available(Backend::avx2)) return Backend::avx2;
    }
    return available(Backend::avx2) ? Backend::avx2 : Backend::scalar;
  }();
  return chosen;
}

ShiftedSystem::ShiftedSystem(std::size_t dim, std::span<const std::complex<double>> a,
                             std::span<const std::complex<double>> rhs)
    : n(dim), a_re(dim * dim), a_im(dim * dim), b_re(dim), b_im(dim) {
  if (a.size() != dim * dim || rhs.size() != dim) throw std::invalid_argument("ShiftedSystem: size mismatch");
  for (std::size_t i = 0; i < dim * dim; ++i) {
    a_re[i] = a[i].real();
    a_im[i] = a[i].imag();
  }
  for (std::size_t i = 0; i < dim; ++i) {
    b_re[i] = rhs[i].real();
    b_im[i] = rhs[i].imag();
  }
}

ShiftedSolution solve_shifted(const ShiftedSystem& sys, std::span<const double> shifts, Backend backend) {
  ShiftedSolution out;
  out.n = sys.n;
  out.x.resize(shifts.size() * sys.n);
  out.pivot_ratio.resize(shifts.size());
  if (shifts.empty() || sys.n == 0) return out;
  if (backend == Backend::avx2 && available(Backend::avx2)) {
    detail::solve_avx2(sys, shifts, out);
  } else {
    detail::solve_scalar(sys, shifts, out);
  }
  return out;
}

}  // namespace wgqed::kernels
