#include "med3d/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace med3d::kern {

void matmul(const double* a, const double* b, double* c, int m, int k, int n) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < m; ++i) {
        double* ci = c + static_cast<size_t>(i) * n;
        std::fill(ci, ci + n, 0.0);
        const double* ai = a + static_cast<size_t>(i) * k;
        for (int kk = 0; kk < k; ++kk) {
            const double aik = ai[kk];
            const double* bk = b + static_cast<size_t>(kk) * n;
            for (int j = 0; j < n; ++j) ci[j] += aik * bk[j];
        }
    }
}

void matmul_nt(const double* a, const double* b, double* c, int m, int k, int n) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < m; ++i) {
        const double* ai = a + static_cast<size_t>(i) * k;
        double* ci = c + static_cast<size_t>(i) * n;
        for (int j = 0; j < n; ++j) {
            const double* bj = b + static_cast<size_t>(j) * k;
            double acc = 0.0;
            for (int kk = 0; kk < k; ++kk) acc += ai[kk] * bj[kk];
            ci[j] = acc;
        }
    }
}

void matmul_tn(const double* a, const double* b, double* c, int m, int k, int n) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < m; ++i) {
        double* ci = c + static_cast<size_t>(i) * n;
        std::fill(ci, ci + n, 0.0);
        for (int kk = 0; kk < k; ++kk) {
            const double aki = a[static_cast<size_t>(kk) * m + i];
            const double* bk = b + static_cast<size_t>(kk) * n;
            for (int j = 0; j < n; ++j) ci[j] += aki * bk[j];
        }
    }
}

void softmax_rows(const double* x, double* y, int rows, int cols) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < rows; ++i) {
        const double* xi = x + static_cast<size_t>(i) * cols;
        double* yi = y + static_cast<size_t>(i) * cols;
        double mx = xi[0];
        for (int j = 1; j < cols; ++j) mx = std::max(mx, xi[j]);
        double sum = 0.0;
        for (int j = 0; j < cols; ++j) {
            yi[j] = std::exp(xi[j] - mx);
            sum += yi[j];
        }
        const double inv = 1.0 / sum;
        for (int j = 0; j < cols; ++j) yi[j] *= inv;
    }
}

void layernorm_rows(const double* x, const double* gamma, const double* beta,
                    double* y, int rows, int cols, double eps) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < rows; ++i) {
        const double* xi = x + static_cast<size_t>(i) * cols;
        double* yi = y + static_cast<size_t>(i) * cols;
        double mean = 0.0;
        for (int j = 0; j < cols; ++j) mean += xi[j];
        mean /= cols;
        double var = 0.0;
        for (int j = 0; j < cols; ++j) {
            const double d = xi[j] - mean;
            var += d * d;
        }
        var /= cols;
        const double inv = 1.0 / std::sqrt(var + eps);
        for (int j = 0; j < cols; ++j) yi[j] = gamma[j] * (xi[j] - mean) * inv + beta[j];
    }
}

void conv3d(const double* x, const double* w, const double* b, double* y,
            int cin, int d, int h, int wd, int cout, int k, int pad) {
    const int od = d + 2 * pad - k + 1;
    const int oh = h + 2 * pad - k + 1;
    const int ow = wd + 2 * pad - k + 1;
#pragma omp parallel for collapse(2) schedule(static)
    for (int co = 0; co < cout; ++co) {
        for (int z = 0; z < od; ++z) {
            for (int yy = 0; yy < oh; ++yy) {
                for (int xx = 0; xx < ow; ++xx) {
                    double acc = b ? b[co] : 0.0;
                    for (int ci = 0; ci < cin; ++ci) {
                        const double* xc = x + (static_cast<size_t>(ci) * d) * h * wd;
                        const double* wc =
                            w + ((static_cast<size_t>(co) * cin + ci) * k) * k * k;
                        for (int a = 0; a < k; ++a) {
                            const int iz = z + a - pad;
                            if (iz < 0 || iz >= d) continue;
                            for (int bb = 0; bb < k; ++bb) {
                                const int iy = yy + bb - pad;
                                if (iy < 0 || iy >= h) continue;
                                for (int cc = 0; cc < k; ++cc) {
                                    const int ix = xx + cc - pad;
                                    if (ix < 0 || ix >= wd) continue;
                                    acc += xc[(static_cast<size_t>(iz) * h + iy) * wd + ix] *
                                           wc[(static_cast<size_t>(a) * k + bb) * k + cc];
                                }
                            }
                        }
                    }
                    y[((static_cast<size_t>(co) * od + z) * oh + yy) * ow + xx] = acc;
                }
            }
        }
    }
}

void conv3d_grad_input(const double* dy, const double* w, double* dx,
                       int cin, int d, int h, int wd, int cout, int k, int pad) {
    const int od = d + 2 * pad - k + 1;
    const int oh = h + 2 * pad - k + 1;
    const int ow = wd + 2 * pad - k + 1;
#pragma omp parallel for collapse(2) schedule(static)
    for (int ci = 0; ci < cin; ++ci) {
        for (int iz = 0; iz < d; ++iz) {
            for (int iy = 0; iy < h; ++iy) {
                for (int ix = 0; ix < wd; ++ix) {
                    double acc = 0.0;
                    for (int co = 0; co < cout; ++co) {
                        const double* dyc = dy + (static_cast<size_t>(co) * od) * oh * ow;
                        const double* wc =
                            w + ((static_cast<size_t>(co) * cin + ci) * k) * k * k;
                        for (int a = 0; a < k; ++a) {
                            const int z = iz - a + pad;
                            if (z < 0 || z >= od) continue;
                            for (int bb = 0; bb < k; ++bb) {
                                const int yy = iy - bb + pad;
                                if (yy < 0 || yy >= oh) continue;
                                for (int cc = 0; cc < k; ++cc) {
                                    const int xx = ix - cc + pad;
                                    if (xx < 0 || xx >= ow) continue;
                                    acc += dyc[(static_cast<size_t>(z) * oh + yy) * ow + xx] *
                                           wc[(static_cast<size_t>(a) * k + bb) * k + cc];
                                }
                            }
                        }
                    }
                    dx[((static_cast<size_t>(ci) * d + iz) * h + iy) * wd + ix] += acc;
                }
            }
        }
    }
}

void conv3d_grad_weight(const double* x, const double* dy, double* dw, double* db,
                        int cin, int d, int h, int wd, int cout, int k, int pad) {
    const int od = d + 2 * pad - k + 1;
    const int oh = h + 2 * pad - k + 1;
    const int ow = wd + 2 * pad - k + 1;
#pragma omp parallel for collapse(2) schedule(static)
    for (int co = 0; co < cout; ++co) {
        for (int ci = 0; ci < cin; ++ci) {
            const double* dyc = dy + (static_cast<size_t>(co) * od) * oh * ow;
            const double* xc = x + (static_cast<size_t>(ci) * d) * h * wd;
            double* wc = dw + ((static_cast<size_t>(co) * cin + ci) * k) * k * k;
            for (int a = 0; a < k; ++a) {
                for (int bb = 0; bb < k; ++bb) {
                    for (int cc = 0; cc < k; ++cc) {
                        double acc = 0.0;
                        for (int z = 0; z < od; ++z) {
                            const int iz = z + a - pad;
                            if (iz < 0 || iz >= d) continue;
                            for (int yy = 0; yy < oh; ++yy) {
                                const int iy = yy + bb - pad;
                                if (iy < 0 || iy >= h) continue;
                                for (int xx = 0; xx < ow; ++xx) {
                                    const int ix = xx + cc - pad;
                                    if (ix < 0 || ix >= wd) continue;
                                    acc += xc[(static_cast<size_t>(iz) * h + iy) * wd + ix] *
                                           dyc[(static_cast<size_t>(z) * oh + yy) * ow + xx];
                                }
                            }
                        }
                        wc[(static_cast<size_t>(a) * k + bb) * k + cc] += acc;
                    }
                }
            }
        }
    }
    if (db) {
        for (int co = 0; co < cout; ++co) {
            const double* dyc = dy + (static_cast<size_t>(co) * od) * oh * ow;
            double acc = 0.0;
            for (long i = 0; i < static_cast<long>(od) * oh * ow; ++i) acc += dyc[i];
            db[co] += acc;
        }
    }
}

void deconv3d2(const double* x, const double* w, const double* b, double* y,
               int cin, int d, int h, int wd, int cout) {
    const int od = 2 * d, oh = 2 * h, ow = 2 * wd;
#pragma omp parallel for collapse(2) schedule(static)
    for (int co = 0; co < cout; ++co) {
        for (int z = 0; z < od; ++z) {
            const int iz = z / 2, a = z % 2;
            for (int yy = 0; yy < oh; ++yy) {
                const int iy = yy / 2, bb = yy % 2;
                for (int xx = 0; xx < ow; ++xx) {
                    const int ix = xx / 2, cc = xx % 2;
                    double acc = b ? b[co] : 0.0;
                    for (int ci = 0; ci < cin; ++ci) {
                        acc += x[((static_cast<size_t>(ci) * d + iz) * h + iy) * wd + ix] *
                               w[((((static_cast<size_t>(ci) * cout + co) * 2 + a) * 2 + bb) * 2 + cc)];
                    }
                    y[((static_cast<size_t>(co) * od + z) * oh + yy) * ow + xx] = acc;
                }
            }
        }
    }
}

void deconv3d2_grad_input(const double* dy, const double* w, double* dx,
                          int cin, int d, int h, int wd, int cout) {
    const int od = 2 * d, oh = 2 * h, ow = 2 * wd;
#pragma omp parallel for collapse(2) schedule(static)
    for (int ci = 0; ci < cin; ++ci) {
        for (int iz = 0; iz < d; ++iz) {
            for (int iy = 0; iy < h; ++iy) {
                for (int ix = 0; ix < wd; ++ix) {
                    double acc = 0.0;
                    for (int co = 0; co < cout; ++co) {
                        for (int a = 0; a < 2; ++a) {
                            for (int bb = 0; bb < 2; ++bb) {
                                for (int cc = 0; cc < 2; ++cc) {
                                    acc += dy[((static_cast<size_t>(co) * od + 2 * iz + a) * oh +
                                               2 * iy + bb) * ow + 2 * ix + cc] *
                                           w[((((static_cast<size_t>(ci) * cout + co) * 2 + a) * 2 + bb) * 2 + cc)];
                                }
                            }
                        }
                    }
                    dx[((static_cast<size_t>(ci) * d + iz) * h + iy) * wd + ix] += acc;
                }
            }
        }
    }
}

void deconv3d2_grad_weight(const double* x, const double* dy, double* dw, double* db,
                           int cin, int d, int h, int wd, int cout) {
    const int od = 2 * d, oh = 2 * h, ow = 2 * wd;
#pragma omp parallel for collapse(2) schedule(static)
    for (int ci = 0; ci < cin; ++ci) {
        for (int co = 0; co < cout; ++co) {
            for (int a = 0; a < 2; ++a) {
                for (int bb = 0; bb < 2; ++bb) {
                    for (int cc = 0; cc < 2; ++cc) {
                        double acc = 0.0;
                        for (int iz = 0; iz < d; ++iz) {
                            for (int iy = 0; iy < h; ++iy) {
                                for (int ix = 0; ix < wd; ++ix) {
                                    acc += x[((static_cast<size_t>(ci) * d + iz) * h + iy) * wd + ix] *
                                           dy[((static_cast<size_t>(co) * od + 2 * iz + a) * oh +
                                               2 * iy + bb) * ow + 2 * ix + cc];
                                }
                            }
                        }
                        dw[((((static_cast<size_t>(ci) * cout + co) * 2 + a) * 2 + bb) * 2 + cc)] += acc;
                    }
                }
            }
        }
    }
    if (db) {
        for (int co = 0; co < cout; ++co) {
            const double* dyc = dy + (static_cast<size_t>(co) * od) * oh * ow;
            double acc = 0.0;
            for (long i = 0; i < static_cast<long>(od) * oh * ow; ++i) acc += dyc[i];
            db[co] += acc;
        }
    }
}

void patchify(const double* vol, double* patches, int s, int p) {
    const int g = s / p;
#pragma omp parallel for collapse(2) schedule(static)
    for (int px = 0; px < g; ++px) {
        for (int py = 0; py < g; ++py) {
            for (int pz = 0; pz < g; ++pz) {
                const int t = (px * g + py) * g + pz;
                double* out = patches + static_cast<size_t>(t) * p * p * p;
                for (int a = 0; a < p; ++a)
                    for (int bb = 0; bb < p; ++bb)
                        for (int cc = 0; cc < p; ++cc)
                            out[(a * p + bb) * p + cc] =
                                vol[((static_cast<size_t>(px * p + a) * s) + py * p + bb) * s +
                                    pz * p + cc];
            }
        }
    }
}

void patchify_scatter_add(const double* dpatches, double* dvol, int s, int p) {
    const int g = s / p;
#pragma omp parallel for collapse(2) schedule(static)
    for (int px = 0; px < g; ++px) {
        for (int py = 0; py < g; ++py) {
            for (int pz = 0; pz < g; ++pz) {
                const int t = (px * g + py) * g + pz;
                const double* in = dpatches + static_cast<size_t>(t) * p * p * p;
                for (int a = 0; a < p; ++a)
                    for (int bb = 0; bb < p; ++bb)
                        for (int cc = 0; cc < p; ++cc)
                            dvol[((static_cast<size_t>(px * p + a) * s) + py * p + bb) * s +
                                 pz * p + cc] += in[(a * p + bb) * p + cc];
            }
        }
    }
}

namespace {
inline void lin_coord(int i1, int n1, int n0, int& lo, int& hi, double& frac) {
    if (n1 == 1 || n0 == 1) {
        lo = hi = 0;
        frac = 0.0;
        return;
    }
    const double c = static_cast<double>(i1) * (n0 - 1) / (n1 - 1);
    lo = static_cast<int>(std::floor(c));
    hi = std::min(lo + 1, n0 - 1);
    frac = c - lo;
}
inline int near_coord(int i1, int n1, int n0) {
    if (n1 == 1 || n0 == 1) return 0;
    const double c = static_cast<double>(i1) * (n0 - 1) / (n1 - 1);
    const int r = static_cast<int>(std::lround(c));
    return std::min(std::max(r, 0), n0 - 1);
}
}  // namespace

void resample3d(const double* src, int d0, int h0, int w0,
                double* dst, int d1, int h1, int w1) {
#pragma omp parallel for schedule(static)
    for (int z = 0; z < d1; ++z) {
        int z0, z1i;
        double fz;
        lin_coord(z, d1, d0, z0, z1i, fz);
        for (int y = 0; y < h1; ++y) {
            int y0, y1i;
            double fy;
            lin_coord(y, h1, h0, y0, y1i, fy);
            for (int x = 0; x < w1; ++x) {
                int x0, x1i;
                double fx;
                lin_coord(x, w1, w0, x0, x1i, fx);
                auto v = [&](int a, int b, int c) {
                    return src[(static_cast<size_t>(a) * h0 + b) * w0 + c];
                };
                const double c00 = v(z0, y0, x0) * (1 - fx) + v(z0, y0, x1i) * fx;
                const double c01 = v(z0, y1i, x0) * (1 - fx) + v(z0, y1i, x1i) * fx;
                const double c10 = v(z1i, y0, x0) * (1 - fx) + v(z1i, y0, x1i) * fx;
                const double c11 = v(z1i, y1i, x0) * (1 - fx) + v(z1i, y1i, x1i) * fx;
                const double c0 = c00 * (1 - fy) + c01 * fy;
                const double c1 = c10 * (1 - fy) + c11 * fy;
                dst[(static_cast<size_t>(z) * h1 + y) * w1 + x] = c0 * (1 - fz) + c1 * fz;
            }
        }
    }
}

void resample3d_nearest(const double* src, int d0, int h0, int w0,
                        double* dst, int d1, int h1, int w1) {
#pragma omp parallel for schedule(static)
    for (int z = 0; z < d1; ++z) {
        const int sz = near_coord(z, d1, d0);
        for (int y = 0; y < h1; ++y) {
            const int sy = near_coord(y, h1, h0);
            for (int x = 0; x < w1; ++x) {
                const int sx = near_coord(x, w1, w0);
                dst[(static_cast<size_t>(z) * h1 + y) * w1 + x] =
                    src[(static_cast<size_t>(sz) * h0 + sy) * w0 + sx];
            }
        }
    }
}

void resize2d_bilinear(const double* src, int h0, int w0,
                       double* dst, int h1, int w1) {
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h1; ++y) {
        int y0, y1i;
        double fy;
        lin_coord(y, h1, h0, y0, y1i, fy);
        for (int x = 0; x < w1; ++x) {
            int x0, x1i;
            double fx;
            lin_coord(x, w1, w0, x0, x1i, fx);
            auto v = [&](int a, int b) { return src[static_cast<size_t>(a) * w0 + b]; };
            const double c0 = v(y0, x0) * (1 - fx) + v(y0, x1i) * fx;
            const double c1 = v(y1i, x0) * (1 - fx) + v(y1i, x1i) * fx;
            dst[static_cast<size_t>(y) * w1 + x] = c0 * (1 - fy) + c1 * fy;
        }
    }
}

namespace serial {

void matmul(const double* a, const double* b, double* c, int m, int k, int n) {
    for (int i = 0; i < m; ++i) {
        double* ci = c + static_cast<size_t>(i) * n;
        std::fill(ci, ci + n, 0.0);
        const double* ai = a + static_cast<size_t>(i) * k;
        for (int kk = 0; kk < k; ++kk) {
            const double aik = ai[kk];
            const double* bk = b + static_cast<size_t>(kk) * n;
            for (int j = 0; j < n; ++j) ci[j] += aik * bk[j];
        }
    }
}

void matmul_nt(const double* a, const double* b, double* c, int m, int k, int n) {
    for (int i = 0; i < m; ++i) {
        const double* ai = a + static_cast<size_t>(i) * k;
        double* ci = c + static_cast<size_t>(i) * n;
        for (int j = 0; j < n; ++j) {
            const double* bj = b + static_cast<size_t>(j) * k;
            double acc = 0.0;
            for (int kk = 0; kk < k; ++kk) acc += ai[kk] * bj[kk];
            ci[j] = acc;
        }
    }
}

void matmul_tn(const double* a, const double* b, double* c, int m, int k, int n) {
    for (int i = 0; i < m; ++i) {
        double* ci = c + static_cast<size_t>(i) * n;
        std::fill(ci, ci + n, 0.0);
        for (int kk = 0; kk < k; ++kk) {
            const double aki = a[static_cast<size_t>(kk) * m + i];
            const double* bk = b + static_cast<size_t>(kk) * n;
            for (int j = 0; j < n; ++j) ci[j] += aki * bk[j];
        }
    }
}

void softmax_rows(const double* x, double* y, int rows, int cols) {
    for (int i = 0; i < rows; ++i) {
        const double* xi = x + static_cast<size_t>(i) * cols;
        double* yi = y + static_cast<size_t>(i) * cols;
        double mx = xi[0];
        for (int j = 1; j < cols; ++j) mx = std::max(mx, xi[j]);
        double sum = 0.0;
        for (int j = 0; j < cols; ++j) {
            yi[j] = std::exp(xi[j] - mx);
            sum += yi[j];
        }
        const double inv = 1.0 / sum;
        for (int j = 0; j < cols; ++j) yi[j] *= inv;
    }
}

void layernorm_rows(const double* x, const double* gamma, const double* beta,
                    double* y, int rows, int cols, double eps) {
    for (int i = 0; i < rows; ++i) {
        const double* xi = x + static_cast<size_t>(i) * cols;
        double* yi = y + static_cast<size_t>(i) * cols;
        double mean = 0.0;
        for (int j = 0; j < cols; ++j) mean += xi[j];
        mean /= cols;
        double var = 0.0;
        for (int j = 0; j < cols; ++j) {
            const double d = xi[j] - mean;
            var += d * d;
        }
        var /= cols;
        const double inv = 1.0 / std::sqrt(var + eps);
        for (int j = 0; j < cols; ++j) yi[j] = gamma[j] * (xi[j] - mean) * inv + beta[j];
    }
}

void conv3d(const double* x, const double* w, const double* b, double* y,
            int cin, int d, int h, int wd, int cout, int k, int pad) {
    const int od = d + 2 * pad - k + 1;
    const int oh = h + 2 * pad - k + 1;
    const int ow = wd + 2 * pad - k + 1;
    for (int co = 0; co < cout; ++co) {
        for (int z = 0; z < od; ++z) {
            for (int yy = 0; yy < oh; ++yy) {
                for (int xx = 0; xx < ow; ++xx) {
                    double acc = b ? b[co] : 0.0;
                    for (int ci = 0; ci < cin; ++ci) {
                        const double* xc = x + (static_cast<size_t>(ci) * d) * h * wd;
                        const double* wc =
                            w + ((static_cast<size_t>(co) * cin + ci) * k) * k * k;
                        for (int a = 0; a < k; ++a) {
                            const int iz = z + a - pad;
                            if (iz < 0 || iz >= d) continue;
                            for (int bb = 0; bb < k; ++bb) {
                                const int iy = yy + bb - pad;
                                if (iy < 0 || iy >= h) continue;
                                for (int cc = 0; cc < k; ++cc) {
                                    const int ix = xx + cc - pad;
                                    if (ix < 0 || ix >= wd) continue;
                                    acc += xc[(static_cast<size_t>(iz) * h + iy) * wd + ix] *
                                           wc[(static_cast<size_t>(a) * k + bb) * k + cc];
                                }
                            }
                        }
                    }
                    y[((static_cast<size_t>(co) * od + z) * oh + yy) * ow + xx] = acc;
                }
            }
        }
    }
}

void deconv3d2(const double* x, const double* w, const double* b, double* y,
               int cin, int d, int h, int wd, int cout) {
    const int od = 2 * d, oh = 2 * h, ow = 2 * wd;
    for (int co = 0; co < cout; ++co) {
        for (int z = 0; z < od; ++z) {
            const int iz = z / 2, a = z % 2;
            for (int yy = 0; yy < oh; ++yy) {
                const int iy = yy / 2, bb = yy % 2;
                for (int xx = 0; xx < ow; ++xx) {
                    const int ix = xx / 2, cc = xx % 2;
                    double acc = b ? b[co] : 0.0;
                    for (int ci = 0; ci < cin; ++ci) {
                        acc += x[((static_cast<size_t>(ci) * d + iz) * h + iy) * wd + ix] *
                               w[((((static_cast<size_t>(ci) * cout + co) * 2 + a) * 2 + bb) * 2 + cc)];
                    }
                    y[((static_cast<size_t>(co) * od + z) * oh + yy) * ow + xx] = acc;
                }
            }
        }
    }
}

void patchify(const double* vol, double* patches, int s, int p) {
    const int g = s / p;
    for (int px = 0; px < g; ++px) {
        for (int py = 0; py < g; ++py) {
            for (int pz = 0; pz < g; ++pz) {
                const int t = (px * g + py) * g + pz;
                double* out = patches + static_cast<size_t>(t) * p * p * p;
                for (int a = 0; a < p; ++a)
                    for (int bb = 0; bb < p; ++bb)
                        for (int cc = 0; cc < p; ++cc)
                            out[(a * p + bb) * p + cc] =
                                vol[((static_cast<size_t>(px * p + a) * s) + py * p + bb) * s +
                                    pz * p + cc];
            }
        }
    }
}

void resample3d(const double* src, int d0, int h0, int w0,
                double* dst, int d1, int h1, int w1) {
    for (int z = 0; z < d1; ++z) {
        int z0, z1i;
        double fz;
        lin_coord(z, d1, d0, z0, z1i, fz);
        for (int y = 0; y < h1; ++y) {
            int y0, y1i;
            double fy;
            lin_coord(y, h1, h0, y0, y1i, fy);
            for (int x = 0; x < w1; ++x) {
                int x0, x1i;
                double fx;
                lin_coord(x, w1, w0, x0, x1i, fx);
                auto v = [&](int a, int b, int c) {
                    return src[(static_cast<size_t>(a) * h0 + b) * w0 + c];
                };
                const double c00 = v(z0, y0, x0) * (1 - fx) + v(z0, y0, x1i) * fx;
                const double c01 = v(z0, y1i, x0) * (1 - fx) + v(z0, y1i, x1i) * fx;
                const double c10 = v(z1i, y0, x0) * (1 - fx) + v(z1i, y0, x1i) * fx;
                const double c11 = v(z1i, y1i, x0) * (1 - fx) + v(z1i, y1i, x1i) * fx;
                const double c0 = c00 * (1 - fy) + c01 * fy;
                const double c1 = c10 * (1 - fy) + c11 * fy;
                dst[(static_cast<size_t>(z) * h1 + y) * w1 + x] = c0 * (1 - fz) + c1 * fz;
            }
        }
    }
}

}  // namespace serial

}  // namespace med3d::kern
