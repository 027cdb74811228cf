#include "med3d/nn.hpp"

#include <cmath>
#include <stdexcept>

namespace med3d {

Tensor random_normal(std::vector<int> shape, Rng& rng, double stdev) {
    Tensor t(std::move(shape));
    for (long i = 0; i < t.numel(); ++i) t.data[i] = rng.normal(0.0, stdev);
    return t;
}

Linear::Linear(const std::string& name, int in, int out, Rng& rng, double stdev, bool bias)
    : w(name + ".w", random_normal({in, out}, rng, stdev), true),
      b(name + ".b", Tensor({out}), false),
      has_bias(bias) {}

Var* Linear::forward(Graph& g, Var* x) {
    Var* y = g.matmul(x, g.param(w));
    if (has_bias) y = g.add_rowvec(y, g.param(b));
    return y;
}

void Linear::collect(std::vector<Parameter*>& out) {
    out.push_back(&w);
    if (has_bias) out.push_back(&b);
}

LayerNorm::LayerNorm(const std::string& name, int dim)
    : gamma(name + ".gamma", Tensor({dim}), false), beta(name + ".beta", Tensor({dim}), false) {
    gamma.value.fill(1.0);
}

Var* LayerNorm::forward(Graph& g, Var* x) {
    return g.layernorm_rows(x, g.param(gamma), g.param(beta));
}

void LayerNorm::collect(std::vector<Parameter*>& out) {
    out.push_back(&gamma);
    out.push_back(&beta);
}

MultiHeadAttention::MultiHeadAttention(const std::string& name, int dim_, int heads_, Rng& rng)
    : ln_q(name + ".ln_q", dim_),
      ln_kv(name + ".ln_kv", dim_),
      wq(name + ".wq", dim_, dim_, rng),
      wk(name + ".wk", dim_, dim_, rng),
      wv(name + ".wv", dim_, dim_, rng),
      wo(name + ".wo", dim_, dim_, rng),
      dim(dim_),
      heads(heads_) {
    if (dim_ % heads_ != 0)
        throw std::invalid_argument("MultiHeadAttention: dim " + std::to_string(dim_) +
                                    " not divisible by heads " + std::to_string(heads_));
}

Var* MultiHeadAttention::forward(Graph& g, Var* x_q, Var* x_kv, AttnProbe* probe) {
    for (double v : x_q->val.data)
        if (!std::isfinite(v)) throw std::invalid_argument("attention: non-finite query input");
    for (double v : x_kv->val.data)
        if (!std::isfinite(v)) throw std::invalid_argument("attention: non-finite key/value input");
    Var* q_in = ln_q.forward(g, x_q);
    Var* kv_in = x_kv == x_q ? ln_kv.forward(g, x_q) : ln_kv.forward(g, x_kv);
    Var* q = wq.forward(g, q_in);
    Var* k = wk.forward(g, kv_in);
    Var* v = wv.forward(g, kv_in);
    const int dh = dim / heads;
    const double scl = 1.0 / std::sqrt(static_cast<double>(dh));
    std::vector<Var*> outs;
    outs.reserve(heads);
    for (int h = 0; h < heads; ++h) {
        Var* qh = g.col_slice(q, h * dh, (h + 1) * dh);
        Var* kh = g.col_slice(k, h * dh, (h + 1) * dh);
        Var* vh = g.col_slice(v, h * dh, (h + 1) * dh);
        Var* scores = g.scale(g.matmul_nt(qh, kh), scl);
        Var* probs = g.softmax_rows(scores);
        if (probe) probe->probs.push_back(probs->val);
        outs.push_back(g.matmul(probs, vh));
    }
    Var* merged = heads == 1 ? outs[0] : g.concat_cols(outs);
    return g.add(x_q, wo.forward(g, merged));
}

void MultiHeadAttention::collect(std::vector<Parameter*>& out) {
    ln_q.collect(out);
    ln_kv.collect(out);
    wq.collect(out);
    wk.collect(out);
    wv.collect(out);
    wo.collect(out);
}

Mlp::Mlp(const std::string& name, int dim, int hidden, int out, Rng& rng)
    : fc1(name + ".fc1", dim, hidden, rng), fc2(name + ".fc2", hidden, out, rng) {}

Var* Mlp::forward(Graph& g, Var* x) { return fc2.forward(g, g.gelu(fc1.forward(g, x))); }

void Mlp::collect(std::vector<Parameter*>& out) {
    fc1.collect(out);
    fc2.collect(out);
}

Conv3dLayer::Conv3dLayer(const std::string& name, int cin, int cout, int k, int pad_, Rng& rng)
    : w(name + ".w", Tensor({cout, cin, k, k, k}), true),
      b(name + ".b", Tensor({cout}), false),
      pad(pad_) {
    const double stdev = std::sqrt(2.0 / (static_cast<double>(cin) * k * k * k));
    for (long i = 0; i < w.value.numel(); ++i) w.value.data[i] = rng.normal(0.0, stdev);
}

Var* Conv3dLayer::forward(Graph& g, Var* x) {
    return g.conv3d(x, g.param(w), g.param(b), pad);
}

void Conv3dLayer::collect(std::vector<Parameter*>& out) {
    out.push_back(&w);
    out.push_back(&b);
}

Deconv3d2Layer::Deconv3d2Layer(const std::string& name, int cin, int cout, Rng& rng)
    : w(name + ".w", Tensor({cin, cout, 2, 2, 2}), true), b(name + ".b", Tensor({cout}), false) {
    const double stdev = std::sqrt(2.0 / (static_cast<double>(cin) * 8));
    for (long i = 0; i < w.value.numel(); ++i) w.value.data[i] = rng.normal(0.0, stdev);
}

Var* Deconv3d2Layer::forward(Graph& g, Var* x) {
    return g.deconv3d2(x, g.param(w), g.param(b));
}

void Deconv3d2Layer::collect(std::vector<Parameter*>& out) {
    out.push_back(&w);
    out.push_back(&b);
}

void AdamW::step(const std::vector<Parameter*>& params) {
    ++t;
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t));
    for (Parameter* p : params) {
        for (long i = 0; i < p->value.numel(); ++i) {
            const double gr = p->grad.data[i];
            p->adam_m.data[i] = beta1 * p->adam_m.data[i] + (1.0 - beta1) * gr;
            p->adam_v.data[i] = beta2 * p->adam_v.data[i] + (1.0 - beta2) * gr * gr;
            const double mhat = p->adam_m.data[i] / bc1;
            const double vhat = p->adam_v.data[i] / bc2;
            double upd = mhat / (std::sqrt(vhat) + eps);
            if (p->decay) upd += weight_decay * p->value.data[i];
            p->value.data[i] -= lr * upd;
        }
    }
}

void AdamW::zero_grad(const std::vector<Parameter*>& params) {
    for (Parameter* p : params) p->zero_grad();
}

}  // namespace med3d
