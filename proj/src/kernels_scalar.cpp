// Scalar reference kernels. These define the semantics; the AVX2 variants are
// equivalence-tested against them.

#include <cstring>

#include "a3gnn/kernels.hpp"

namespace a3gnn::kernels {

namespace {

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scale_scalar(double* x, double a, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

void add_scalar(const double* x, double* acc, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) acc[i] += x[i];
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void relu_scalar(const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void relu_mask_scalar(const double* act, double* grad, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (act[i] <= 0.0) grad[i] = 0.0;
  }
}

void matmul_accum_scalar(const double* a, const double* b, double* c,
                         std::size_t m, std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t r = 0; r < k; ++r) {
      const double aik = a[i * k + r];
      const double* brow = b + r * n;
      double* crow = c + i * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += aik * brow[j];
    }
  }
}

void matmul_at_b_accum_scalar(const double* a, const double* b, double* c,
                              std::size_t k, std::size_t m, std::size_t n) {
  for (std::size_t r = 0; r < k; ++r) {
    const double* brow = b + r * n;
    for (std::size_t i = 0; i < m; ++i) {
      const double ari = a[r * m + i];
      double* crow = c + i * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += ari * brow[j];
    }
  }
}

void matmul_a_bt_accum_scalar(const double* a, const double* b, double* c,
                              std::size_t m, std::size_t n, std::size_t k) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* arow = a + i * n;
    for (std::size_t t = 0; t < k; ++t) {
      c[i * k + t] += dot_scalar(arow, b + t * n, n);
    }
  }
}

void gather_rows_f32_scalar(const float* src, std::size_t dim, const std::uint32_t* ids,
                            std::size_t count, double* dst) {
  for (std::size_t i = 0; i < count; ++i) {
    const float* row = src + static_cast<std::size_t>(ids[i]) * dim;
    double* out = dst + i * dim;
    for (std::size_t d = 0; d < dim; ++d) out[d] = static_cast<double>(row[d]);
  }
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops table = {
      axpy_scalar,   scale_scalar, add_scalar,
      dot_scalar,    relu_scalar,  relu_mask_scalar,
      matmul_accum_scalar, matmul_at_b_accum_scalar, matmul_a_bt_accum_scalar,
      gather_rows_f32_scalar,
  };
  return table;
}

void gather_rows(const float* src, std::size_t dim, const std::uint32_t* ids,
                 std::size_t count, float* dst) {
  for (std::size_t i = 0; i < count; ++i) {
    std::memcpy(dst + i * dim, src + static_cast<std::size_t>(ids[i]) * dim,
                dim * sizeof(float));
  }
}

}  // namespace a3gnn::kernels
