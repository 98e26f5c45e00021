// AVX2 kernel: four shifts per __m256d lane group. Mirrors solve_scalar
// operation for operation; row swaps become per-lane blends because each
// lane picks its own pivot row.

#include "wgqed/kernels/shifted_solve.hpp"

#include <immintrin.h>

#include <cmath>
#include <limits>

namespace wgqed::kernels::detail {

namespace {

struct Cv {
  __m256d re, im;
};

inline __m256d mag2(Cv a) { return _mm256_add_pd(_mm256_mul_pd(a.re, a.re), _mm256_mul_pd(a.im, a.im)); }

inline Cv mul(Cv a, Cv b) {
  return {_mm256_sub_pd(_mm256_mul_pd(a.re, b.re), _mm256_mul_pd(a.im, b.im)),
          _mm256_add_pd(_mm256_mul_pd(a.re, b.im), _mm256_mul_pd(a.im, b.re))};
}

inline Cv sub(Cv a, Cv b) { return {_mm256_sub_pd(a.re, b.re), _mm256_sub_pd(a.im, b.im)}; }

inline Cv blend(Cv a, Cv b, __m256d mask) {
  return {_mm256_blendv_pd(a.re, b.re, mask), _mm256_blendv_pd(a.im, b.im, mask)};
}

constexpr std::size_t kLanes = 4;

}  // namespace

void solve_avx2(const ShiftedSystem& sys, std::span<const double> shifts, ShiftedSolution& out) {
  const std::size_t n = sys.n;
  std::vector<Cv> a(n * n), b(n), inv(n), x(n);
  const __m256d zero = _mm256_setzero_pd();

  for (std::size_t base = 0; base < shifts.size(); base += kLanes) {
    alignas(32) double s[kLanes];
    const std::size_t live = std::min(kLanes, shifts.size() - base);
    for (std::size_t l = 0; l < kLanes; ++l) s[l] = shifts[base + std::min(l, live - 1)];
    const __m256d shift = _mm256_load_pd(s);

    for (std::size_t i = 0; i < n * n; ++i) a[i] = {_mm256_set1_pd(sys.a_re[i]), _mm256_set1_pd(sys.a_im[i])};
    for (std::size_t i = 0; i < n; ++i) {
      b[i] = {_mm256_set1_pd(sys.b_re[i]), _mm256_set1_pd(sys.b_im[i])};
      a[i * n + i].re = _mm256_sub_pd(a[i * n + i].re, shift);
    }

    __m256d max_d = zero;
    __m256d min_d = _mm256_set1_pd(std::numeric_limits<double>::infinity());

    for (std::size_t k = 0; k < n; ++k) {
      __m256d best = mag2(a[k * n + k]);
      __m256d piv = _mm256_set1_pd(static_cast<double>(k));
      for (std::size_t i = k + 1; i < n; ++i) {
        const __m256d m = mag2(a[i * n + k]);
        const __m256d gt = _mm256_cmp_pd(m, best, _CMP_GT_OQ);
        best = _mm256_blendv_pd(best, m, gt);
        piv = _mm256_blendv_pd(piv, _mm256_set1_pd(static_cast<double>(i)), gt);
      }
      for (std::size_t i = k + 1; i < n; ++i) {
        const __m256d sel = _mm256_cmp_pd(piv, _mm256_set1_pd(static_cast<double>(i)), _CMP_EQ_OQ);
        if (_mm256_movemask_pd(sel) == 0) continue;
        for (std::size_t j = k; j < n; ++j) {
          const Cv rk = a[k * n + j];
          const Cv ri = a[i * n + j];
          a[k * n + j] = blend(rk, ri, sel);
          a[i * n + j] = blend(ri, rk, sel);
        }
        const Cv bk = b[k];
        const Cv bi = b[i];
        b[k] = blend(bk, bi, sel);
        b[i] = blend(bi, bk, sel);
      }

      const Cv p = a[k * n + k];
      const __m256d d = mag2(p);
      max_d = _mm256_blendv_pd(max_d, d, _mm256_cmp_pd(d, max_d, _CMP_GT_OQ));
      min_d = _mm256_blendv_pd(min_d, d, _mm256_cmp_pd(d, min_d, _CMP_LT_OQ));
      const __m256d is_zero = _mm256_cmp_pd(d, zero, _CMP_EQ_OQ);
      const __m256d neg_im = _mm256_xor_pd(p.im, _mm256_set1_pd(-0.0));
      inv[k] = {_mm256_blendv_pd(_mm256_div_pd(p.re, d), zero, is_zero),
                _mm256_blendv_pd(_mm256_div_pd(neg_im, d), zero, is_zero)};

      for (std::size_t i = k + 1; i < n; ++i) {
        const Cv f = mul(a[i * n + k], inv[k]);
        for (std::size_t j = k + 1; j < n; ++j) a[i * n + j] = sub(a[i * n + j], mul(f, a[k * n + j]));
        b[i] = sub(b[i], mul(f, b[k]));
      }
    }

    for (std::size_t ii = n; ii-- > 0;) {
      Cv acc = b[ii];
      for (std::size_t j = ii + 1; j < n; ++j) acc = sub(acc, mul(a[ii * n + j], x[j]));
      x[ii] = mul(acc, inv[ii]);
    }

    alignas(32) double re[kLanes], im[kLanes], mx[kLanes], mn[kLanes];
    _mm256_store_pd(mx, max_d);
    _mm256_store_pd(mn, min_d);
    for (std::size_t i = 0; i < n; ++i) {
      _mm256_store_pd(re, x[i].re);
      _mm256_store_pd(im, x[i].im);
      for (std::size_t l = 0; l < live; ++l) out.x[(base + l) * n + i] = {re[l], im[l]};
    }
    for (std::size_t l = 0; l < live; ++l) {
      out.pivot_ratio[base + l] =
          mn[l] == 0.0 ? std::numeric_limits<double>::infinity() : std::sqrt(mx[l] / mn[l]);
    }
  }
}

}  // namespace wgqed::kernels::detail
