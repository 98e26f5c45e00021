// Reference kernel. Complex arithmetic is spelled out on split re/im parts
// (no std::complex division) so the AVX2 kernel can mirror it exactly.

#include "wgqed/kernels/shifted_solve.hpp"

#include <cmath>
#include <limits>
#include <utility>

namespace wgqed::kernels::detail {

void solve_scalar(const ShiftedSystem& sys, std::span<const double> shifts, ShiftedSolution& out) {
  const std::size_t n = sys.n;
  std::vector<double> ar(n * n), ai(n * n), br(n), bi(n), inv_r(n), inv_i(n);

  for (std::size_t lane = 0; lane < shifts.size(); ++lane) {
    ar = sys.a_re;
    ai = sys.a_im;
    br = sys.b_re;
    bi = sys.b_im;
    for (std::size_t i = 0; i < n; ++i) ar[i * n + i] = ar[i * n + i] - shifts[lane];

    double max_d = 0.0;
    double min_d = std::numeric_limits<double>::infinity();

    for (std::size_t k = 0; k < n; ++k) {
      std::size_t piv = k;
      double best = ar[k * n + k] * ar[k * n + k] + ai[k * n + k] * ai[k * n + k];
      for (std::size_t i = k + 1; i < n; ++i) {
        const double m = ar[i * n + k] * ar[i * n + k] + ai[i * n + k] * ai[i * n + k];
        if (m > best) {
          best = m;
          piv = i;
        }
      }
      if (piv != k) {
        for (std::size_t j = k; j < n; ++j) {
          std::swap(ar[k * n + j], ar[piv * n + j]);
          std::swap(ai[k * n + j], ai[piv * n + j]);
        }
        std::swap(br[k], br[piv]);
        std::swap(bi[k], bi[piv]);
      }

      const double pr = ar[k * n + k];
      const double pi = ai[k * n + k];
      const double d = pr * pr + pi * pi;
      if (d > max_d) max_d = d;
      if (d < min_d) min_d = d;
      const bool zero = (d == 0.0);
      inv_r[k] = zero ? 0.0 : pr / d;
      inv_i[k] = zero ? 0.0 : -pi / d;

      for (std::size_t i = k + 1; i < n; ++i) {
        const double er = ar[i * n + k];
        const double ei = ai[i * n + k];
        const double fr = er * inv_r[k] - ei * inv_i[k];
        const double fi = er * inv_i[k] + ei * inv_r[k];
        for (std::size_t j = k + 1; j < n; ++j) {
          const double ur = ar[k * n + j];
          const double ui = ai[k * n + j];
          ar[i * n + j] = ar[i * n + j] - (fr * ur - fi * ui);
          ai[i * n + j] = ai[i * n + j] - (fr * ui + fi * ur);
        }
        const double ur = br[k];
        const double ui = bi[k];
        br[i] = br[i] - (fr * ur - fi * ui);
        bi[i] = bi[i] - (fr * ui + fi * ur);
      }
    }

    auto* x = out.x.data() + lane * n;
    for (std::size_t ii = n; ii-- > 0;) {
      double sr = br[ii];
      double si = bi[ii];
      for (std::size_t j = ii + 1; j < n; ++j) {
        const double ur = ar[ii * n + j];
        const double ui = ai[ii * n + j];
        const double xr = x[j].real();
        const double xi = x[j].imag();
        sr = sr - (ur * xr - ui * xi);
        si = si - (ur * xi + ui * xr);
      }
      x[ii] = {sr * inv_r[ii] - si * inv_i[ii], sr * inv_i[ii] + si * inv_r[ii]};
    }
    out.pivot_ratio[lane] = min_d == 0.0 ? std::numeric_limits<double>::infinity() : std::sqrt(max_d / min_d);
  }
}

}  // namespace wgqed::kernels::detail
