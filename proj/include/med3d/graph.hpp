#pragma once

#include <deque>
#include <functional>
#include <string>
#include <vector>

#include "med3d/tensor.hpp"

namespace med3d {

// A trainable tensor with AdamW state. Owned by modules, referenced by graphs.
struct Parameter {
    std::string name;
    Tensor value, grad, adam_m, adam_v;
    bool decay = true;  // weight-decay eligible (matrices yes; biases/norms/tables no)

    Parameter() = default;
    Parameter(std::string n, Tensor v, bool dec = true)
        : name(std::move(n)), value(std::move(v)), decay(dec) {
        grad = Tensor(value.shape);
        adam_m = Tensor(value.shape);
        adam_v = Tensor(value.shape);
    }
    void zero_grad() { grad.zero(); }
};

struct Var {
    Tensor val;
    Tensor grad;               // allocated iff needs_grad
    bool needs_grad = false;
    std::function<void()> back;  // scatters this->grad into parents / Parameter::grad
};

// Define-by-run reverse-mode tape. One Graph per training step; nodes live in
// a deque so pointers stay stable. Creation order is a topological order, so
// backward() is a reverse sweep.
class Graph {
public:
    // Leaves
    Var* constant(Tensor v);
    Var* input(Tensor v);        // differentiable leaf; grad readable after backward
    Var* param(Parameter& p);

    // Linear algebra
    Var* matmul(Var* a, Var* b);      // [m,k]x[k,n]
    Var* matmul_nt(Var* a, Var* b);   // [m,k]x[n,k]^T
    Var* transpose(Var* x);

    // Elementwise / broadcast
    Var* add(Var* a, Var* b);
    Var* sub(Var* a, Var* b);
    Var* add_rowvec(Var* x, Var* v);  // x [m,n] + v [n]
    Var* add_const(Var* x, double c);
    Var* scale(Var* x, double c);
    Var* scale_by(Var* x, Var* s);    // s scalar Var
    Var* hadamard(Var* a, Var* b);
    Var* vdiv(Var* a, Var* b);
    Var* exp_op(Var* x);
    Var* neg(Var* x);
    Var* gelu(Var* x);
    Var* relu(Var* x);

    // Rows / reductions
    Var* softmax_rows(Var* x);
    Var* layernorm_rows(Var* x, Var* gamma, Var* beta, double eps = 1e-5);
    Var* mean_rows(Var* x);           // [m,n] -> [n]
    Var* colsum(Var* x);              // [m,n] -> [n]
    Var* vsum(Var* x);                // -> scalar
    Var* l2norm_rows(Var* x);
    Var* ce_rows(Var* logits, std::vector<int> targets);  // mean cross-entropy, scalar

    // Structure
    Var* reshape(Var* x, std::vector<int> shape);
    Var* col_slice(Var* x, int c0, int c1);
    Var* concat_cols(const std::vector<Var*>& xs);
    Var* concat_rows(const std::vector<Var*>& xs);  // each [n] or [1,n]
    Var* pspe_gather(Var* table, int plane, int index);  // [C,I,J] -> [C]

    // Volumetric
    Var* patchify(Var* vol, int patch);                         // [s,s,s] -> [t,p^3]
    Var* conv3d(Var* x, Var* w, Var* b, int pad);               // see kernels.hpp
    Var* deconv3d2(Var* x, Var* w, Var* b);

    void backward(Var* root);

    size_t size() const { return nodes_.size(); }

private:
    Var* make(Tensor val, bool needs_grad);
    std::deque<Var> nodes_;
};

}  // namespace med3d
