#include "med3d/graph.hpp"

#include <cmath>
#include <stdexcept>

#include "med3d/kernels.hpp"

namespace med3d {

namespace {
void axpy(const Tensor& src, Tensor& dst) {
    for (long i = 0; i < src.numel(); ++i) dst.data[i] += src.data[i];
}
void check2d(const Var* x, const char* who) {
    if (x->val.ndim() != 2)
        throw std::invalid_argument(std::string(who) + ": expected 2-D operand, got " +
                                    shape_str(x->val.shape));
}
}  // namespace

Var* Graph::make(Tensor val, bool needs_grad) {
    nodes_.emplace_back();
    Var* v = &nodes_.back();
    v->val = std::move(val);
    v->needs_grad = needs_grad;
    if (needs_grad) v->grad = Tensor(v->val.shape);
    return v;
}

Var* Graph::constant(Tensor v) { return make(std::move(v), false); }

Var* Graph::input(Tensor v) { return make(std::move(v), true); }

Var* Graph::param(Parameter& p) {
    Var* n = make(p.value, true);
    n->back = [n, &p]() { axpy(n->grad, p.grad); };
    return n;
}

Var* Graph::matmul(Var* a, Var* b) {
    check2d(a, "matmul");
    check2d(b, "matmul");
    const int m = a->val.dim(0), k = a->val.dim(1), n = b->val.dim(1);
    if (b->val.dim(0) != k)
        throw std::invalid_argument("matmul: inner dims differ: " + shape_str(a->val.shape) +
                                    " vs " + shape_str(b->val.shape));
    Tensor out({m, n});
    kern::matmul(a->val.data.data(), b->val.data.data(), out.data.data(), m, k, n);
    Var* y = make(std::move(out), a->needs_grad || b->needs_grad);
    if (y->needs_grad)
        y->back = [y, a, b, m, k, n]() {
            if (a->needs_grad) {
                Tensor da({m, k});
                kern::matmul_nt(y->grad.data.data(), b->val.data.data(), da.data.data(), m, n, k);
                axpy(da, a->grad);
            }
            if (b->needs_grad) {
                Tensor db({k, n});
                kern::matmul_tn(a->val.data.data(), y->grad.data.data(), db.data.data(), k, m, n);
                axpy(db, b->grad);
            }
        };
    return y;
}

Var* Graph::matmul_nt(Var* a, Var* b) {
    check2d(a, "matmul_nt");
    check2d(b, "matmul_nt");
    const int m = a->val.dim(0), k = a->val.dim(1), n = b->val.dim(0);
    if (b->val.dim(1) != k)
        throw std::invalid_argument("matmul_nt: inner dims differ: " + shape_str(a->val.shape) +
                                    " vs " + shape_str(b->val.shape));
    Tensor out({m, n});
    kern::matmul_nt(a->val.data.data(), b->val.data.data(), out.data.data(), m, k, n);
    Var* y = make(std::move(out), a->needs_grad || b->needs_grad);
    if (y->needs_grad)
        y->back = [y, a, b, m, k, n]() {
            if (a->needs_grad) {
                Tensor da({m, k});
                kern::matmul(y->grad.data.data(), b->val.data.data(), da.data.data(), m, n, k);
                axpy(da, a->grad);
            }
            if (b->needs_grad) {
                Tensor db({n, k});
                kern::matmul_tn(y->grad.data.data(), a->val.data.data(), db.data.data(), n, m, k);
                axpy(db, b->grad);
            }
        };
    return y;
}

Var* Graph::transpose(Var* x) {
    check2d(x, "transpose");
    const int m = x->val.dim(0), n = x->val.dim(1);
    Tensor out({n, m});
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) out.at(j, i) = x->val.at(i, j);
    Var* y = make(std::move(out), x->needs_grad);
    if (y->needs_grad)
        y->back = [y, x, m, n]() {
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < n; ++j) x->grad.at(i, j) += y->grad.at(j, i);
        };
    return y;
}

Var* Graph::add(Var* a, Var* b) {
    if (!a->val.same_shape(b->val))
        throw std::invalid_argument("add: shape mismatch " + shape_str(a->val.shape) + " vs " +
                                    shape_str(b->val.shape));
    Tensor out(a->val.shape);
    for (long i = 0; i < out.numel(); ++i) out.data[i] = a->val.data[i] + b->val.data[i];
    Var* y = make(std::move(out), a->needs_grad || b->needs_grad);
    if (y->needs_grad)
        y->back = [y, a, b]() {
            if (a->needs_grad) axpy(y->grad, a->grad);
            if (b->needs_grad) axpy(y->grad, b->grad);
        };
    return y;
}

Var* Graph::sub(Var* a, Var* b) { return add(a, neg(b)); }

Var* Graph::add_rowvec(Var* x, Var* v) {
    check2d(x, "add_rowvec");
    const int m = x->val.dim(0), n = x->val.dim(1);
    if (v->val.numel() != n)
        throw std::invalid_argument("add_rowvec: vector dim " + std::to_string(v->val.numel()) +
                                    " vs row width " + std::to_string(n));
    Tensor out({m, n});
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) out.at(i, j) = x->val.at(i, j) + v->val.data[j];
    Var* y = make(std::move(out), x->needs_grad || v->needs_grad);
    if (y->needs_grad)
        y->back = [y, x, v, m, n]() {
            if (x->needs_grad) axpy(y->grad, x->grad);
            if (v->needs_grad)
                for (int i = 0; i < m; ++i)
                    for (int j = 0; j < n; ++j) v->grad.data[j] += y->grad.at(i, j);
        };
    return y;
}

Var* Graph::add_const(Var* x, double c) {
    Tensor out(x->val.shape);
    for (long i = 0; i < out.numel(); ++i) out.data[i] = x->val.data[i] + c;
    Var* y = make(std::move(out), x->needs_grad);
    if (y->needs_grad) y->back = [y, x]() { axpy(y->grad, x->grad); };
    return y;
}

Var* Graph::scale(Var* x, double c) {
    Tensor out(x->val.shape);
    for (long i = 0; i < out.numel(); ++i) out.data[i] = x->val.data[i] * c;
    Var* y = make(std::move(out), x->needs_grad);
    if (y->needs_grad)
        y->back = [y, x, c]() {
            for (long i = 0; i < y->grad.numel(); ++i) x->grad.data[i] += c * y->grad.data[i];
        };
    return y;
}

Var* Graph::scale_by(Var* x, Var* s) {
    if (s->val.numel() != 1) throw std::invalid_argument("scale_by: s must be scalar");
    const double sv = s->val.data[0];
    Tensor out(x->val.shape);
    for (long i = 0; i < out.numel(); ++i) out.data[i] = x->val.data[i] * sv;
    Var* y = make(std::move(out), x->needs_grad || s->needs_grad);
    if (y->needs_grad)
        y->back = [y, x, s, sv]() {
            if (x->needs_grad)
                for (long i = 0; i < y->grad.numel(); ++i)
                    x->grad.data[i] += sv * y->grad.data[i];
            if (s->needs_grad) {
                double acc = 0.0;
                for (long i = 0; i < y->grad.numel(); ++i)
                    acc += x->val.data[i] * y->grad.data[i];
                s->grad.data[0] += acc;
            }
        };
    return y;
}

Var* Graph::hadamard(Var* a, Var* b) {
    if (!a->val.same_shape(b->val))
        throw std::invalid_argument("hadamard: shape mismatch " + shape_str(a->val.shape) +
                                    " vs " + shape_str(b->val.shape));
    Tensor out(a->val.shape);
    for (long i = 0; i < out.numel(); ++i) out.data[i] = a->val.data[i] * b->val.data[i];
    Var* y = make(std::move(out), a->needs_grad || b->needs_grad);
    if (y->needs_grad)
        y->back = [y, a, b]() {
            if (a->needs_grad)
                for (long i = 0; i < y->grad.numel(); ++i)
                    a->grad.data[i] += b->val.data[i] * y->grad.data[i];
            if (b->needs_grad)
                for (long i = 0; i < y->grad.numel(); ++i)
                    b->grad.data[i] += a->val.data[i] * y->grad.data[i];
        };
    return y;
}

Var* Graph::vdiv(Var* a, Var* b) {
    if (!a->val.same_shape(b->val))
        throw std::invalid_argument("vdiv: shape mismatch");
    Tensor out(a->val.shape);
    for (long i = 0; i < out.numel(); ++i) out.data[i] = a->val.data[i] / b->val.data[i];
    Var* y = make(std::move(out), a->needs_grad || b->needs_grad);
    if (y->needs_grad)
        y->back = [y, a, b]() {
            for (long i = 0; i < y->grad.numel(); ++i) {
                const double binv = 1.0 / b->val.data[i];
                if (a->needs_grad) a->grad.data[i] += y->grad.data[i] * binv;
                if (b->needs_grad)
                    b->grad.data[i] -= y->grad.data[i] * a->val.data[i] * binv * binv;
            }
        };
    return y;
}

Var* Graph::exp_op(Var* x) {
    Tensor out(x->val.shape);
    for (long i = 0; i < out.numel(); ++i) out.data[i] = std::exp(x->val.data[i]);
    Var* y = make(std::move(out), x->needs_grad);
    if (y->needs_grad)
        y->back = [y, x]() {
            for (long i = 0; i < y->grad.numel(); ++i)
                x->grad.data[i] += y->val.data[i] * y->grad.data[i];
        };
    return y;
}

Var* Graph::neg(Var* x) { return scale(x, -1.0); }

Var* Graph::gelu(Var* x) {
    Tensor out(x->val.shape);
    for (long i = 0; i < out.numel(); ++i) {
        const double v = x->val.data[i];
        out.data[i] = 0.5 * v * (1.0 + std::erf(v * M_SQRT1_2));
    }
    Var* y = make(std::move(out), x->needs_grad);
    if (y->needs_grad)
        y->back = [y, x]() {
            for (long i = 0; i < y->grad.numel(); ++i) {
                const double v = x->val.data[i];
                const double cdf = 0.5 * (1.0 + std::erf(v * M_SQRT1_2));
                const double pdf = std::exp(-0.5 * v * v) / std::sqrt(2.0 * M_PI);
                x->grad.data[i] += (cdf + v * pdf) * y->grad.data[i];
            }
        };
    return y;
}

Var* Graph::relu(Var* x) {
    Tensor out(x->val.shape);
    for (long i = 0; i < out.numel(); ++i) out.data[i] = x->val.data[i] > 0 ? x->val.data[i] : 0.0;
    Var* y = make(std::move(out), x->needs_grad);
    if (y->needs_grad)
        y->back = [y, x]() {
            for (long i = 0; i < y->grad.numel(); ++i)
                if (x->val.data[i] > 0) x->grad.data[i] += y->grad.data[i];
        };
    return y;
}

Var* Graph::softmax_rows(Var* x) {
    check2d(x, "softmax_rows");
    const int m = x->val.dim(0), n = x->val.dim(1);
    Tensor out({m, n});
    kern::softmax_rows(x->val.data.data(), out.data.data(), m, n);
    Var* y = make(std::move(out), x->needs_grad);
    if (y->needs_grad)
        y->back = [y, x, m, n]() {
            for (int i = 0; i < m; ++i) {
                double dot = 0.0;
                for (int j = 0; j < n; ++j) dot += y->grad.at(i, j) * y->val.at(i, j);
                for (int j = 0; j < n; ++j)
                    x->grad.at(i, j) += y->val.at(i, j) * (y->grad.at(i, j) - dot);
            }
        };
    return y;
}

Var* Graph::layernorm_rows(Var* x, Var* gamma, Var* beta, double eps) {
    check2d(x, "layernorm_rows");
    const int m = x->val.dim(0), n = x->val.dim(1);
    if (gamma->val.numel() != n || beta->val.numel() != n)
        throw std::invalid_argument("layernorm_rows: scale/offset dim mismatch, row width " +
                                    std::to_string(n));
    Tensor out({m, n});
    Tensor xhat({m, n});
    Tensor inv({m});
    for (int i = 0; i < m; ++i) {
        double mean = 0.0;
        for (int j = 0; j < n; ++j) mean += x->val.at(i, j);
        mean /= n;
        double var = 0.0;
        for (int j = 0; j < n; ++j) {
            const double d = x->val.at(i, j) - mean;
            var += d * d;
        }
        var /= n;
        inv.at(i) = 1.0 / std::sqrt(var + eps);
        for (int j = 0; j < n; ++j) {
            xhat.at(i, j) = (x->val.at(i, j) - mean) * inv.at(i);
            out.at(i, j) = gamma->val.data[j] * xhat.at(i, j) + beta->val.data[j];
        }
    }
    Var* y = make(std::move(out), x->needs_grad || gamma->needs_grad || beta->needs_grad);
    if (y->needs_grad)
        y->back = [y, x, gamma, beta, xhat = std::move(xhat), inv = std::move(inv), m, n]() {
            for (int i = 0; i < m; ++i) {
                double mean_dxh = 0.0, mean_dxh_xh = 0.0;
                for (int j = 0; j < n; ++j) {
                    const double dxh = y->grad.at(i, j) * gamma->val.data[j];
                    mean_dxh += dxh;
                    mean_dxh_xh += dxh * xhat.at(i, j);
                }
                mean_dxh /= n;
                mean_dxh_xh /= n;
                if (x->needs_grad)
                    for (int j = 0; j < n; ++j) {
                        const double dxh = y->grad.at(i, j) * gamma->val.data[j];
                        x->grad.at(i, j) +=
                            inv.at(i) * (dxh - mean_dxh - xhat.at(i, j) * mean_dxh_xh);
                    }
                if (gamma->needs_grad)
                    for (int j = 0; j < n; ++j)
                        gamma->grad.data[j] += y->grad.at(i, j) * xhat.at(i, j);
                if (beta->needs_grad)
                    for (int j = 0; j < n; ++j) beta->grad.data[j] += y->grad.at(i, j);
            }
        };
    return y;
}

Var* Graph::mean_rows(Var* x) {
    check2d(x, "mean_rows");
    const int m = x->val.dim(0), n = x->val.dim(1);
    Tensor out({n});
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) out.data[j] += x->val.at(i, j);
    for (int j = 0; j < n; ++j) out.data[j] /= m;
    Var* y = make(std::move(out), x->needs_grad);
    if (y->needs_grad)
        y->back = [y, x, m, n]() {
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < n; ++j) x->grad.at(i, j) += y->grad.data[j] / m;
        };
    return y;
}

Var* Graph::colsum(Var* x) {
    check2d(x, "colsum");
    const int m = x->val.dim(0), n = x->val.dim(1);
    Tensor out({n});
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) out.data[j] += x->val.at(i, j);
    Var* y = make(std::move(out), x->needs_grad);
    if (y->needs_grad)
        y->back = [y, x, m, n]() {
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < n; ++j) x->grad.at(i, j) += y->grad.data[j];
        };
    return y;
}

Var* Graph::vsum(Var* x) {
    double acc = 0.0;
    for (long i = 0; i < x->val.numel(); ++i) acc += x->val.data[i];
    Var* y = make(Tensor::scalar(acc), x->needs_grad);
    if (y->needs_grad)
        y->back = [y, x]() {
            const double g = y->grad.data[0];
            for (long i = 0; i < x->grad.numel(); ++i) x->grad.data[i] += g;
        };
    return y;
}

Var* Graph::l2norm_rows(Var* x) {
    check2d(x, "l2norm_rows");
    const int m = x->val.dim(0), n = x->val.dim(1);
    Tensor out({m, n});
    Tensor rnorm({m});
    for (int i = 0; i < m; ++i) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += x->val.at(i, j) * x->val.at(i, j);
        const double r = std::sqrt(s);
        if (r < 1e-12)
            throw std::runtime_error("l2norm_rows: row " + std::to_string(i) +
                                     " has near-zero norm");
        rnorm.at(i) = r;
        for (int j = 0; j < n; ++j) out.at(i, j) = x->val.at(i, j) / r;
    }
    Var* y = make(std::move(out), x->needs_grad);
    if (y->needs_grad)
        y->back = [y, x, rnorm = std::move(rnorm), m, n]() {
            for (int i = 0; i < m; ++i) {
                double dot = 0.0;
                for (int j = 0; j < n; ++j) dot += y->grad.at(i, j) * y->val.at(i, j);
                for (int j = 0; j < n; ++j)
                    x->grad.at(i, j) +=
                        (y->grad.at(i, j) - y->val.at(i, j) * dot) / rnorm.at(i);
            }
        };
    return y;
}

Var* Graph::ce_rows(Var* logits, std::vector<int> targets) {
    check2d(logits, "ce_rows");
    const int m = logits->val.dim(0), n = logits->val.dim(1);
    if (static_cast<int>(targets.size()) != m)
        throw std::invalid_argument("ce_rows: " + std::to_string(targets.size()) +
                                    " targets for " + std::to_string(m) + " rows");
    for (int i = 0; i < m; ++i)
        if (targets[i] < 0 || targets[i] >= n)
            throw std::invalid_argument("ce_rows: target " + std::to_string(targets[i]) +
                                        " out of range [0," + std::to_string(n) + ")");
    Tensor probs({m, n});
    kern::softmax_rows(logits->val.data.data(), probs.data.data(), m, n);
    double loss = 0.0;
    for (int i = 0; i < m; ++i) {
        const double* xi = &logits->val.at(i, 0);
        double mx = xi[0];
        for (int j = 1; j < n; ++j) mx = std::max(mx, xi[j]);
        double lse = 0.0;
        for (int j = 0; j < n; ++j) lse += std::exp(xi[j] - mx);
        loss += mx + std::log(lse) - xi[targets[i]];
    }
    loss /= m;
    Var* y = make(Tensor::scalar(loss), logits->needs_grad);
    if (y->needs_grad)
        y->back = [y, logits, probs = std::move(probs), targets = std::move(targets), m, n]() {
            const double g = y->grad.data[0] / m;
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < n; ++j)
                    logits->grad.at(i, j) +=
                        g * (probs.at(i, j) - (targets[i] == j ? 1.0 : 0.0));
        };
    return y;
}

Var* Graph::reshape(Var* x, std::vector<int> shape) {
    if (Tensor::numel_of(shape) != x->val.numel())
        throw std::invalid_argument("reshape: numel mismatch " + shape_str(x->val.shape) +
                                    " -> " + shape_str(shape));
    Tensor out(std::move(shape), x->val.data);
    Var* y = make(std::move(out), x->needs_grad);
    if (y->needs_grad)
        y->back = [y, x]() { axpy(y->grad, x->grad); };
    return y;
}

Var* Graph::col_slice(Var* x, int c0, int c1) {
    check2d(x, "col_slice");
    const int m = x->val.dim(0), n = x->val.dim(1);
    if (c0 < 0 || c1 > n || c0 >= c1)
        throw std::invalid_argument("col_slice: bad range [" + std::to_string(c0) + "," +
                                    std::to_string(c1) + ") of width " + std::to_string(n));
    const int w = c1 - c0;
    Tensor out({m, w});
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < w; ++j) out.at(i, j) = x->val.at(i, c0 + j);
    Var* y = make(std::move(out), x->needs_grad);
    if (y->needs_grad)
        y->back = [y, x, c0, m, w]() {
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < w; ++j) x->grad.at(i, c0 + j) += y->grad.at(i, j);
        };
    return y;
}

Var* Graph::concat_cols(const std::vector<Var*>& xs) {
    if (xs.empty()) throw std::invalid_argument("concat_cols: empty list");
    const int m = xs[0]->val.dim(0);
    int total = 0;
    bool ng = false;
    for (Var* x : xs) {
        check2d(x, "concat_cols");
        if (x->val.dim(0) != m) throw std::invalid_argument("concat_cols: row count mismatch");
        total += x->val.dim(1);
        ng = ng || x->needs_grad;
    }
    Tensor out({m, total});
    int off = 0;
    for (Var* x : xs) {
        const int w = x->val.dim(1);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < w; ++j) out.at(i, off + j) = x->val.at(i, j);
        off += w;
    }
    Var* y = make(std::move(out), ng);
    if (ng)
        y->back = [y, xs, m]() {
            int off = 0;
            for (Var* x : xs) {
                const int w = x->val.dim(1);
                if (x->needs_grad)
                    for (int i = 0; i < m; ++i)
                        for (int j = 0; j < w; ++j) x->grad.at(i, j) += y->grad.at(i, off + j);
                off += w;
            }
        };
    return y;
}

Var* Graph::concat_rows(const std::vector<Var*>& xs) {
    if (xs.empty()) throw std::invalid_argument("concat_rows: empty list");
    const int n = static_cast<int>(xs[0]->val.numel());
    bool ng = false;
    for (Var* x : xs) {
        if (x->val.numel() != n)
            throw std::invalid_argument("concat_rows: row width mismatch");
        ng = ng || x->needs_grad;
    }
    const int m = static_cast<int>(xs.size());
    Tensor out({m, n});
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) out.at(i, j) = xs[i]->val.data[j];
    Var* y = make(std::move(out), ng);
    if (ng)
        y->back = [y, xs, m, n]() {
            for (int i = 0; i < m; ++i)
                if (xs[i]->needs_grad)
                    for (int j = 0; j < n; ++j) xs[i]->grad.data[j] += y->grad.at(i, j);
        };
    return y;
}

Var* Graph::pspe_gather(Var* table, int plane, int index) {
    if (table->val.ndim() != 3)
        throw std::invalid_argument("pspe_gather: table must be 3-D [C,I,J], got " +
                                    shape_str(table->val.shape));
    const int C = table->val.dim(0), I = table->val.dim(1), J = table->val.dim(2);
    if (plane < 0 || plane >= I)
        throw std::invalid_argument("pspe_gather: plane " + std::to_string(plane) +
                                    " out of range [0," + std::to_string(I) + ")");
    if (index < 0 || index >= J)
        throw std::invalid_argument("pspe_gather: index " + std::to_string(index) +
                                    " out of range [0," + std::to_string(J) + ")");
    Tensor out({C});
    for (int c = 0; c < C; ++c) out.data[c] = table->val.at(c, plane, index);
    Var* y = make(std::move(out), table->needs_grad);
    if (y->needs_grad)
        y->back = [y, table, plane, index, C]() {
            for (int c = 0; c < C; ++c) table->grad.at(c, plane, index) += y->grad.data[c];
        };
    return y;
}

Var* Graph::patchify(Var* vol, int patch) {
    if (vol->val.ndim() != 3 || vol->val.dim(0) != vol->val.dim(1) ||
        vol->val.dim(1) != vol->val.dim(2))
        throw std::invalid_argument("patchify: expected cubic volume, got " +
                                    shape_str(vol->val.shape));
    const int s = vol->val.dim(0);
    if (patch <= 0 || s % patch != 0)
        throw std::invalid_argument("patchify: side " + std::to_string(s) +
                                    " not divisible by patch " + std::to_string(patch));
    const int g = s / patch, t = g * g * g;
    Tensor out({t, patch * patch * patch});
    kern::patchify(vol->val.data.data(), out.data.data(), s, patch);
    Var* y = make(std::move(out), vol->needs_grad);
    if (y->needs_grad)
        y->back = [y, vol, s, patch]() {
            kern::patchify_scatter_add(y->grad.data.data(), vol->grad.data.data(), s, patch);
        };
    return y;
}

Var* Graph::conv3d(Var* x, Var* w, Var* b, int pad) {
    if (x->val.ndim() != 4 || w->val.ndim() != 5)
        throw std::invalid_argument("conv3d: expected x [C,D,H,W], w [Co,Ci,k,k,k]");
    const int cin = x->val.dim(0), d = x->val.dim(1), h = x->val.dim(2), wd = x->val.dim(3);
    const int cout = w->val.dim(0), k = w->val.dim(2);
    if (w->val.dim(1) != cin)
        throw std::invalid_argument("conv3d: weight cin " + std::to_string(w->val.dim(1)) +
                                    " vs input channels " + std::to_string(cin));
    const int od = d + 2 * pad - k + 1, oh = h + 2 * pad - k + 1, ow = wd + 2 * pad - k + 1;
    if (od <= 0 || oh <= 0 || ow <= 0)
        throw std::invalid_argument("conv3d: kernel larger than padded input");
    Tensor out({cout, od, oh, ow});
    kern::conv3d(x->val.data.data(), w->val.data.data(),
                 b ? b->val.data.data() : nullptr, out.data.data(), cin, d, h, wd, cout, k, pad);
    const bool ng = x->needs_grad || w->needs_grad || (b && b->needs_grad);
    Var* y = make(std::move(out), ng);
    if (ng)
        y->back = [y, x, w, b, cin, d, h, wd, cout, k, pad]() {
            if (x->needs_grad)
                kern::conv3d_grad_input(y->grad.data.data(), w->val.data.data(),
                                        x->grad.data.data(), cin, d, h, wd, cout, k, pad);
            if (w->needs_grad || (b && b->needs_grad))
                kern::conv3d_grad_weight(x->val.data.data(), y->grad.data.data(),
                                         w->needs_grad ? w->grad.data.data() : nullptr,
                                         (b && b->needs_grad) ? b->grad.data.data() : nullptr,
                                         cin, d, h, wd, cout, k, pad);
        };
    return y;
}

Var* Graph::deconv3d2(Var* x, Var* w, Var* b) {
    if (x->val.ndim() != 4 || w->val.ndim() != 5)
        throw std::invalid_argument("deconv3d2: expected x [C,D,H,W], w [Ci,Co,2,2,2]");
    const int cin = x->val.dim(0), d = x->val.dim(1), h = x->val.dim(2), wd = x->val.dim(3);
    const int cout = w->val.dim(1);
    if (w->val.dim(0) != cin)
        throw std::invalid_argument("deconv3d2: weight cin " + std::to_string(w->val.dim(0)) +
                                    " vs input channels " + std::to_string(cin));
    Tensor out({cout, 2 * d, 2 * h, 2 * wd});
    kern::deconv3d2(x->val.data.data(), w->val.data.data(),
                    b ? b->val.data.data() : nullptr, out.data.data(), cin, d, h, wd, cout);
    const bool ng = x->needs_grad || w->needs_grad || (b && b->needs_grad);
    Var* y = make(std::move(out), ng);
    if (ng)
        y->back = [y, x, w, b, cin, d, h, wd, cout]() {
            if (x->needs_grad)
                kern::deconv3d2_grad_input(y->grad.data.data(), w->val.data.data(),
                                           x->grad.data.data(), cin, d, h, wd, cout);
            if (w->needs_grad || (b && b->needs_grad))
                kern::deconv3d2_grad_weight(x->val.data.data(), y->grad.data.data(),
                                            w->needs_grad ? w->grad.data.data() : nullptr,
                                            (b && b->needs_grad) ? b->grad.data.data() : nullptr,
                                            cin, d, h, wd, cout);
        };
    return y;
}

void Graph::backward(Var* root) {
    if (root->val.numel() != 1)
        throw std::invalid_argument("backward: root must be scalar, got " +
                                    shape_str(root->val.shape));
    if (!root->needs_grad) return;
    root->grad.data[0] = 1.0;
    for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it)
        if (it->needs_grad && it->back) it->back();
}

}  // namespace med3d
