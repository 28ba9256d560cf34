#pragma once

// Dense numeric kernels behind the trainer, the PPO networks and feature
// gather. Scalar reference implementations always exist; AVX2 variants are
// selected at runtime when the CPU supports them. A3GNN_NO_SIMD=1 forces the
// scalar path. Training math runs in double; the feature store is f32 and is
// widened on gather.

#include <cstddef>
#include <cstdint>

namespace a3gnn::kernels {

struct Ops {
  // y += a * x
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // x *= a
  void (*scale)(double* x, double a, std::size_t n);
  // acc += x
  void (*add)(const double* x, double* acc, std::size_t n);
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y = max(x, 0)
  void (*relu)(const double* x, double* y, std::size_t n);
  // grad *= (act > 0)
  void (*relu_mask)(const double* act, double* grad, std::size_t n);
  // C[m,n] += A[m,k] * B[k,n], row-major
  void (*matmul_accum)(const double* a, const double* b, double* c,
                       std::size_t m, std::size_t k, std::size_t n);
  // C[m,n] += A[k,m]^T * B[k,n]
  void (*matmul_at_b_accum)(const double* a, const double* b, double* c,
                            std::size_t k, std::size_t m, std::size_t n);
  // C[m,k] += A[m,n] * B[k,n]^T
  void (*matmul_a_bt_accum)(const double* a, const double* b, double* c,
                            std::size_t m, std::size_t n, std::size_t k);
  // dst[i,:] = widen(src[ids[i],:]) from the f32 feature store
  void (*gather_rows_f32)(const float* src, std::size_t dim, const std::uint32_t* ids,
                          std::size_t count, double* dst);
};

enum class Backend { scalar, avx2 };

bool avx2_supported();
Backend active_backend();
// Test hook; throws ParameterError if the backend is not supported here.
void set_backend(Backend b);

const Ops& ops();         // currently active table
const Ops& scalar_ops();  // reference table, always available

// Plain f32 row gather for the feature-retrieval path (keeps the batch in
// store precision for byte accounting).
void gather_rows(const float* src, std::size_t dim, const std::uint32_t* ids,
                 std::size_t count, float* dst);

// Convenience forwards through the active table.
inline void axpy(double a, const double* x, double* y, std::size_t n) { ops().axpy(a, x, y, n); }
inline void scale(double* x, double a, std::size_t n) { ops().scale(x, a, n); }
inline void add(const double* x, double* acc, std::size_t n) { ops().add(x, acc, n); }
inline double dot(const double* a, const double* b, std::size_t n) { return ops().dot(a, b, n); }
inline void relu(const double* x, double* y, std::size_t n) { ops().relu(x, y, n); }
inline void relu_mask(const double* act, double* grad, std::size_t n) { ops().relu_mask(act, grad, n); }
inline void matmul_accum(const double* a, const double* b, double* c,
                         std::size_t m, std::size_t k, std::size_t n) {
  ops().matmul_accum(a, b, c, m, k, n);
}
inline void matmul_at_b_accum(const double* a, const double* b, double* c,
                              std::size_t k, std::size_t m, std::size_t n) {
  ops().matmul_at_b_accum(a, b, c, k, m, n);
}
inline void matmul_a_bt_accum(const double* a, const double* b, double* c,
                              std::size_t m, std::size_t n, std::size_t k) {
  ops().matmul_a_bt_accum(a, b, c, m, n, k);
}
inline void gather_rows_f32(const float* src, std::size_t dim, const std::uint32_t* ids,
                            std::size_t count, double* dst) {
  ops().gather_rows_f32(src, dim, ids, count, dst);
}

}  // namespace a3gnn::kernels
