#pragma once

#include <cstddef>

// Small dense float kernels used by the tensor ops. All matrices are
// row-major. Loops run in a fixed order so results are bit-reproducible
// from run to run of the same binary.
namespace tofgr::detail {

/// C[M x N] = A[M x K] * B[K x N], or += when accumulate is set.
void gemm_nn(int m, int n, int k, const float* a, const float* b, float* c,
             bool accumulate = false);

/// C[M x N] += A[M x K] * B[N x K]^T  (dot products along K).
void gemm_nt_acc(int m, int n, int k, const float* a, const float* b, float* c);

/// C[M x N] = A[K x M]^T * B[K x N].
void gemm_tn(int m, int n, int k, const float* a, const float* b, float* c);

/// y[M] = A[M x N] * x[N] (+ y0 when accumulate).
void gemv(int m, int n, const float* a, const float* x, float* y,
          bool accumulate = false);

/// y[N] += A[M x N]^T * x[M].
void gemv_t_acc(int m, int n, const float* a, const float* x, float* y);

/// C[M x N] += x[M] * y[N]^T (rank-1 update).
void ger_acc(int m, int n, const float* x, const float* y, float* c);

void axpy(int n, float alpha, const float* x, float* y);

float dot(int n, const float* a, const float* b);

}  // namespace tofgr::detail
