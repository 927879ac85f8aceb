#include "tofgr/gemm.hpp"

#include <cstring>

namespace tofgr::detail {

float dot(int n, const float* a, const float* b) {
    // 32 partial sums (four blocks of eight) keep several independent vector
    // accumulators in flight to cover FMA latency. Order is fixed, results
    // are reproducible.
    float s[32] = {};
    int i = 0;
    for (; i + 32 <= n; i += 32) {
        for (int lane = 0; lane < 32; ++lane) s[lane] += a[i + lane] * b[i + lane];
    }
    for (; i + 8 <= n; i += 8) {
        for (int lane = 0; lane < 8; ++lane) s[lane] += a[i + lane] * b[i + lane];
    }
    float tail = 0.f;
    for (; i < n; ++i) tail += a[i] * b[i];
    for (int width = 16; width >= 1; width /= 2) {
        for (int lane = 0; lane < width; ++lane) s[lane] += s[lane + width];
    }
    return s[0] + tail;
}

void axpy(int n, float alpha, const float* x, float* y) {
    for (int i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void gemm_nn(int m, int n, int k, const float* a, const float* b, float* c,
             bool accumulate) {
    if (!accumulate) std::memset(c, 0, sizeof(float) * static_cast<std::size_t>(m) * n);
    // Register-blocked over 4 rows of C; the j loop vectorizes. B rows are
    // streamed once per row block instead of once per row.
    int i = 0;
    for (; i + 4 <= m; i += 4) {
        float* c0 = c + static_cast<std::size_t>(i) * n;
        float* c1 = c0 + n;
        float* c2 = c1 + n;
        float* c3 = c2 + n;
        const float* a0 = a + static_cast<std::size_t>(i) * k;
        for (int kk = 0; kk < k; ++kk) {
            const float* br = b + static_cast<std::size_t>(kk) * n;
            const float a0k = a0[kk];
            const float a1k = a0[k + kk];
            const float a2k = a0[2 * k + kk];
            const float a3k = a0[3 * k + kk];
            for (int j = 0; j < n; ++j) {
                const float bj = br[j];
                c0[j] += a0k * bj;
                c1[j] += a1k * bj;
                c2[j] += a2k * bj;
                c3[j] += a3k * bj;
            }
        }
    }
    for (; i < m; ++i) {
        float* cr = c + static_cast<std::size_t>(i) * n;
        const float* ar = a + static_cast<std::size_t>(i) * k;
        for (int kk = 0; kk < k; ++kk) {
            axpy(n, ar[kk], b + static_cast<std::size_t>(kk) * n, cr);
        }
    }
}

void gemm_nt_acc(int m, int n, int k, const float* a, const float* b, float* c) {
    for (int i = 0; i < m; ++i) {
        const float* ar = a + static_cast<std::size_t>(i) * k;
        float* cr = c + static_cast<std::size_t>(i) * n;
        for (int j = 0; j < n; ++j) {
            cr[j] += dot(k, ar, b + static_cast<std::size_t>(j) * k);
        }
    }
}

void gemm_tn(int m, int n, int k, const float* a, const float* b, float* c) {
    std::memset(c, 0, sizeof(float) * static_cast<std::size_t>(m) * n);
    for (int kk = 0; kk < k; ++kk) {
        const float* ar = a + static_cast<std::size_t>(kk) * m;
        const float* br = b + static_cast<std::size_t>(kk) * n;
        for (int i = 0; i < m; ++i) {
            axpy(n, ar[i], br, c + static_cast<std::size_t>(i) * n);
        }
    }
}

void gemv(int m, int n, const float* a, const float* x, float* y, bool accumulate) {
    for (int i = 0; i < m; ++i) {
        const float v = dot(n, a + static_cast<std::size_t>(i) * n, x);
        y[i] = accumulate ? y[i] + v : v;
    }
}

void gemv_t_acc(int m, int n, const float* a, const float* x, float* y) {
    for (int i = 0; i < m; ++i) {
        axpy(n, x[i], a + static_cast<std::size_t>(i) * n, y);
    }
}

void ger_acc(int m, int n, const float* x, const float* y, float* c) {
    for (int i = 0; i < m; ++i) {
        axpy(n, x[i], y, c + static_cast<std::size_t>(i) * n);
    }
}

}  // namespace tofgr::detail
