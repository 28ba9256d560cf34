// Runtime backend selection for the dense kernels.

#include <cstdlib>

#include "a3gnn/common.hpp"
#include "a3gnn/kernels.hpp"

namespace a3gnn::kernels {

const Ops& avx2_ops();  // defined in kernels_avx2.cpp

namespace {

bool detect_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2") != 0;
#else
  return false;
#endif
}

Backend initial_backend() {
  const char* env = std::getenv("A3GNN_NO_SIMD");
  if (env != nullptr && env[0] == '1') return Backend::scalar;
  return detect_avx2() ? Backend::avx2 : Backend::scalar;
}

Backend g_backend = initial_backend();

}  // namespace

bool avx2_supported() { return detect_avx2(); }

Backend active_backend() { return g_backend; }

void set_backend(Backend b) {
  if (b == Backend::avx2 && !avx2_supported()) {
    throw ParameterError("avx2 backend not supported on this cpu");
  }
  g_backend = b;
}

const Ops& ops() {
  return g_backend == Backend::avx2 ? avx2_ops() : scalar_ops();
}

}  // namespace a3gnn::kernels
