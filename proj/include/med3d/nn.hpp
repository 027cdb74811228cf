#pragma once

#include <string>
#include <vector>

#include "med3d/graph.hpp"
#include "med3d/rng.hpp"

namespace med3d {

// Snapshot of softmax attention matrices captured during a forward pass,
// one [N x M] tensor per head.
struct AttnProbe {
    std::vector<Tensor> probs;
};

struct Linear {
    Parameter w;  // [in, out]
    Parameter b;  // [out]
    bool has_bias = true;

    Linear() = default;
    Linear(const std::string& name, int in, int out, Rng& rng, double stdev = 0.02,
           bool bias = true);
    Var* forward(Graph& g, Var* x);  // x [m,in] -> [m,out]
    void collect(std::vector<Parameter*>& out);
};

struct LayerNorm {
    Parameter gamma, beta;

    LayerNorm() = default;
    LayerNorm(const std::string& name, int dim);
    Var* forward(Graph& g, Var* x);
    void collect(std::vector<Parameter*>& out);
};

// Pre-LN multi-head scaled dot-product attention with residual connection:
//   out = x_q + Wo * MHA(LNq(x_q), LNkv(x_kv))
// Self-attention passes the same Var for x_q and x_kv.
struct MultiHeadAttention {
    LayerNorm ln_q, ln_kv;
    Linear wq, wk, wv, wo;
    int dim = 0, heads = 0;

    MultiHeadAttention() = default;
    MultiHeadAttention(const std::string& name, int dim, int heads, Rng& rng);
    Var* forward(Graph& g, Var* x_q, Var* x_kv, AttnProbe* probe = nullptr);
    void collect(std::vector<Parameter*>& out);
};

// Two-layer MLP head: y = W2 * gelu(W1 x + b1) + b2, applied per row.
struct Mlp {
    Linear fc1, fc2;

    Mlp() = default;
    Mlp(const std::string& name, int dim, int hidden, int out, Rng& rng);
    Var* forward(Graph& g, Var* x);
    void collect(std::vector<Parameter*>& out);
};

struct Conv3dLayer {
    Parameter w;  // [cout, cin, k, k, k]
    Parameter b;  // [cout]
    int pad = 0;

    Conv3dLayer() = default;
    Conv3dLayer(const std::string& name, int cin, int cout, int k, int pad, Rng& rng);
    Var* forward(Graph& g, Var* x);
    void collect(std::vector<Parameter*>& out);
};

struct Deconv3d2Layer {
    Parameter w;  // [cin, cout, 2, 2, 2]
    Parameter b;  // [cout]

    Deconv3d2Layer() = default;
    Deconv3d2Layer(const std::string& name, int cin, int cout, Rng& rng);
    Var* forward(Graph& g, Var* x);
    void collect(std::vector<Parameter*>& out);
};

struct AdamW {
    double lr = 1e-4;
    double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    double weight_decay = 0.01;
    long t = 0;

    void step(const std::vector<Parameter*>& params);
    static void zero_grad(const std::vector<Parameter*>& params);
};

Tensor random_normal(std::vector<int> shape, Rng& rng, double stdev);

}  // namespace med3d
