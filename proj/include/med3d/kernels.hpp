#pragma once

#include <cstddef>

// Dense compute kernels. The primary implementations in med3d::kern are
// OpenMP-parallel; med3d::kern::serial holds reference implementations with
// identical loop bodies. Every parallel loop assigns each output element to
// exactly one thread and accumulates in the same order as the serial code,
// so the two produce bit-identical results (asserted by tests, timed by
// tools/bench_kernels).

namespace med3d::kern {

// C[m x n] = A[m x k] * B[k x n]
void matmul(const double* a, const double* b, double* c, int m, int k, int n);
// C[m x n] = A[m x k] * B[n x k]^T
void matmul_nt(const double* a, const double* b, double* c, int m, int k, int n);
// C[m x n] = A[k x m]^T * B[k x n]
void matmul_tn(const double* a, const double* b, double* c, int m, int k, int n);

void softmax_rows(const double* x, double* y, int rows, int cols);

// y = gamma * (x - mean) / sqrt(var + eps) + beta, per row
void layernorm_rows(const double* x, const double* gamma, const double* beta,
                    double* y, int rows, int cols, double eps);

// x: [cin, d, h, w], w: [cout, cin, k, k, k], b: [cout] (may be null),
// y: [cout, od, oh, ow] with od = d + 2*pad - k + 1
void conv3d(const double* x, const double* w, const double* b, double* y,
            int cin, int d, int h, int wd, int cout, int k, int pad);
void conv3d_grad_input(const double* dy, const double* w, double* dx,
                       int cin, int d, int h, int wd, int cout, int k, int pad);
void conv3d_grad_weight(const double* x, const double* dy, double* dw, double* db,
                        int cin, int d, int h, int wd, int cout, int k, int pad);

// Transposed conv, kernel 2 stride 2 (doubles each spatial extent).
// x: [cin, d, h, w], w: [cin, cout, 2, 2, 2], b: [cout] (may be null),
// y: [cout, 2d, 2h, 2w]
void deconv3d2(const double* x, const double* w, const double* b, double* y,
               int cin, int d, int h, int wd, int cout);
void deconv3d2_grad_input(const double* dy, const double* w, double* dx,
                          int cin, int d, int h, int wd, int cout);
void deconv3d2_grad_weight(const double* x, const double* dy, double* dw, double* db,
                           int cin, int d, int h, int wd, int cout);

// vol: [s, s, s] -> patches: [t, p^3], t = (s/p)^3, non-overlapping blocks in
// row-major grid order.
void patchify(const double* vol, double* patches, int s, int p);
void patchify_scatter_add(const double* dpatches, double* dvol, int s, int p);

// Trilinear resample with align-corners index mapping.
void resample3d(const double* src, int d0, int h0, int w0,
                double* dst, int d1, int h1, int w1);
// Nearest-neighbor variant (label volumes).
void resample3d_nearest(const double* src, int d0, int h0, int w0,
                        double* dst, int d1, int h1, int w1);
void resize2d_bilinear(const double* src, int h0, int w0,
                       double* dst, int h1, int w1);

namespace serial {
void matmul(const double* a, const double* b, double* c, int m, int k, int n);
void matmul_nt(const double* a, const double* b, double* c, int m, int k, int n);
void matmul_tn(const double* a, const double* b, double* c, int m, int k, int n);
void softmax_rows(const double* x, double* y, int rows, int cols);
void layernorm_rows(const double* x, const double* gamma, const double* beta,
                    double* y, int rows, int cols, double eps);
void conv3d(const double* x, const double* w, const double* b, double* y,
            int cin, int d, int h, int wd, int cout, int k, int pad);
void deconv3d2(const double* x, const double* w, const double* b, double* y,
               int cin, int d, int h, int wd, int cout);
void patchify(const double* vol, double* patches, int s, int p);
void resample3d(const double* src, int d0, int h0, int w0,
                double* dst, int d1, int h1, int w1);
}  // namespace serial

}  // namespace med3d::kern
