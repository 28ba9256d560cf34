// AVX2 kernel variants (4-lane double, widening f32 gather). This translation
// unit is compiled with -mavx2 -mfma; the dispatcher only installs this table
// after a runtime cpuid check.

#include "a3gnn/kernels.hpp"

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>

namespace a3gnn::kernels {

namespace {

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d yv = _mm256_loadu_pd(y + i);
    yv = _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), yv);
    _mm256_storeu_pd(y + i, yv);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void scale_avx2(double* x, double a, std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(x + i, _mm256_mul_pd(av, _mm256_loadu_pd(x + i)));
  }
  for (; i < n; ++i) x[i] *= a;
}

void add_avx2(const double* x, double* acc, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(acc + i, _mm256_add_pd(_mm256_loadu_pd(acc + i),
                                            _mm256_loadu_pd(x + i)));
  }
  for (; i < n; ++i) acc[i] += x[i];
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
  }
  __m128d lo = _mm256_castpd256_pd128(acc);
  __m128d hi = _mm256_extractf128_pd(acc, 1);
  lo = _mm_add_pd(lo, hi);
  double s = _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void relu_avx2(const double* x, double* y, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_max_pd(zero, _mm256_loadu_pd(x + i)));
  }
  for (; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void relu_mask_avx2(const double* act, double* grad, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d mask = _mm256_cmp_pd(_mm256_loadu_pd(act + i), zero, _CMP_GT_OQ);
    _mm256_storeu_pd(grad + i, _mm256_and_pd(_mm256_loadu_pd(grad + i), mask));
  }
  for (; i < n; ++i) {
    if (act[i] <= 0.0) grad[i] = 0.0;
  }
}

void fma_row(const double* brow, double aik, double* crow, std::size_t n) {
  const __m256d av = _mm256_set1_pd(aik);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    __m256d cv = _mm256_loadu_pd(crow + j);
    cv = _mm256_fmadd_pd(av, _mm256_loadu_pd(brow + j), cv);
    _mm256_storeu_pd(crow + j, cv);
  }
  for (; j < n; ++j) crow[j] += aik * brow[j];
}

void matmul_accum_avx2(const double* a, const double* b, double* c,
                       std::size_t m, std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t r = 0; r < k; ++r) {
      fma_row(b + r * n, a[i * k + r], c + i * n, n);
    }
  }
}

void matmul_at_b_accum_avx2(const double* a, const double* b, double* c,
                            std::size_t k, std::size_t m, std::size_t n) {
  for (std::size_t r = 0; r < k; ++r) {
    for (std::size_t i = 0; i < m; ++i) {
      fma_row(b + r * n, a[r * m + i], c + i * n, n);
    }
  }
}

void matmul_a_bt_accum_avx2(const double* a, const double* b, double* c,
                            std::size_t m, std::size_t n, std::size_t k) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* arow = a + i * n;
    for (std::size_t t = 0; t < k; ++t) {
      c[i * k + t] += dot_avx2(arow, b + t * n, n);
    }
  }
}

void gather_rows_f32_avx2(const float* src, std::size_t dim, const std::uint32_t* ids,
                          std::size_t count, double* dst) {
  for (std::size_t i = 0; i < count; ++i) {
    const float* row = src + static_cast<std::size_t>(ids[i]) * dim;
    double* out = dst + i * dim;
    std::size_t d = 0;
    for (; d + 4 <= dim; d += 4) {
      _mm256_storeu_pd(out + d, _mm256_cvtps_pd(_mm_loadu_ps(row + d)));
    }
    for (; d < dim; ++d) out[d] = static_cast<double>(row[d]);
  }
}

}  // namespace

const Ops& avx2_ops() {
  static const Ops table = {
      axpy_avx2,   scale_avx2, add_avx2,
      dot_avx2,    relu_avx2,  relu_mask_avx2,
      matmul_accum_avx2, matmul_at_b_accum_avx2, matmul_a_bt_accum_avx2,
      gather_rows_f32_avx2,
  };
  return table;
}

}  // namespace a3gnn::kernels

#else

namespace a3gnn::kernels {
const Ops& avx2_ops() { return scalar_ops(); }
}  // namespace a3gnn::kernels

#endif
