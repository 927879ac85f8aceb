#include "tofgr/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>
#include <unordered_set>

#include "tofgr/gemm.hpp"

namespace tofgr {

namespace {

thread_local bool g_grad_recording = true;

bool should_record(std::initializer_list<const TensorPtr*> inputs) {
    if (!g_grad_recording) return false;
    for (const TensorPtr* t : inputs) {
        if (*t && (*t)->requires_grad) return true;
    }
    return false;
}

void accumulate(Tensor& t, const float* g, std::int64_t n) {
    if (!t.requires_grad) return;
    t.ensure_grad();
    detail::axpy(static_cast<int>(n), 1.0f, g, t.grad.data());
}

float sigmoid(float x) { return 1.0f / (1.0f + std::exp(-x)); }

}  // namespace

std::int64_t shape_numel(const Shape& s) {
    std::int64_t n = 1;
    for (int d : s) n *= d;
    return n;
}

std::string shape_str(const Shape& s) {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) os << 'x';
        os << s[i];
    }
    os << ']';
    return os.str();
}

TensorPtr Tensor::create(Shape shape, bool requires_grad) {
    for (int d : shape) {
        if (d <= 0) throw ShapeError("tensor dimensions must be positive, got " + shape_str(shape));
    }
    auto t = std::make_shared<Tensor>();
    t->shape = std::move(shape);
    t->values.resize(static_cast<std::size_t>(shape_numel(t->shape)), 0.0f);
    t->requires_grad = requires_grad;
    if (requires_grad) t->ensure_grad();
    return t;
}

TensorPtr Tensor::zeros(Shape shape, bool requires_grad) {
    return create(std::move(shape), requires_grad);
}

TensorPtr Tensor::from_values(Shape shape, std::vector<float> values, bool requires_grad) {
    auto t = create(std::move(shape), requires_grad);
    if (static_cast<std::int64_t>(values.size()) != t->size()) {
        throw ShapeError("value count " + std::to_string(values.size()) +
                         " does not match shape " + shape_str(t->shape));
    }
    t->values = std::move(values);
    return t;
}

TensorPtr Tensor::scalar(float v) { return from_values({1}, {v}); }

bool Tensor::all_zero() const {
    for (float v : values) {
        if (v != 0.0f) return false;
    }
    return true;
}

void Tensor::ensure_grad() {
    if (grad.size() != values.size()) grad.assign(values.size(), 0.0f);
}

void Tensor::zero_grad() {
    if (!grad.empty()) std::fill(grad.begin(), grad.end(), 0.0f);
}

NoGradGuard::NoGradGuard() : prev_(g_grad_recording) { g_grad_recording = false; }
NoGradGuard::~NoGradGuard() { g_grad_recording = prev_; }

bool grad_recording_enabled() { return g_grad_recording; }

// ---------------------------------------------------------------------------
// conv2d
// ---------------------------------------------------------------------------

namespace {

void im2col(const float* in, int c, int h, int w, int kh, int kw, float* col) {
    const int oh = h - kh + 1;
    const int ow = w - kw + 1;
    const std::size_t spatial = static_cast<std::size_t>(oh) * ow;
    std::size_t row = 0;
    for (int ch = 0; ch < c; ++ch) {
        for (int ky = 0; ky < kh; ++ky) {
            for (int kx = 0; kx < kw; ++kx, ++row) {
                float* dst = col + row * spatial;
                for (int y = 0; y < oh; ++y) {
                    const float* src = in + (static_cast<std::size_t>(ch) * h + y + ky) * w + kx;
                    std::memcpy(dst + static_cast<std::size_t>(y) * ow, src,
                                sizeof(float) * static_cast<std::size_t>(ow));
                }
            }
        }
    }
}

void col2im_acc(const float* col, int c, int h, int w, int kh, int kw, float* in_grad) {
    const int oh = h - kh + 1;
    const int ow = w - kw + 1;
    const std::size_t spatial = static_cast<std::size_t>(oh) * ow;
    std::size_t row = 0;
    for (int ch = 0; ch < c; ++ch) {
        for (int ky = 0; ky < kh; ++ky) {
            for (int kx = 0; kx < kw; ++kx, ++row) {
                const float* src = col + row * spatial;
                for (int y = 0; y < oh; ++y) {
                    float* dst = in_grad + (static_cast<std::size_t>(ch) * h + y + ky) * w + kx;
                    detail::axpy(ow, 1.0f, src + static_cast<std::size_t>(y) * ow, dst);
                }
            }
        }
    }
}

}  // namespace

TensorPtr conv2d(const TensorPtr& input, const TensorPtr& kernels, const TensorPtr& bias) {
    if (input->ndim() != 3 || kernels->ndim() != 4 || bias->ndim() != 1) {
        throw ShapeError("conv2d expects input CxHxW, kernels FxCxKhxKw, bias F; got " +
                         shape_str(input->shape) + ", " + shape_str(kernels->shape) + ", " +
                         shape_str(bias->shape));
    }
    const int c = input->dim(0), h = input->dim(1), w = input->dim(2);
    const int f = kernels->dim(0), kc = kernels->dim(1), kh = kernels->dim(2), kw = kernels->dim(3);
    if (kc != c) {
        throw ShapeError("conv2d channel mismatch: input has " + std::to_string(c) +
                         ", kernels expect " + std::to_string(kc));
    }
    if (bias->dim(0) != f) throw ShapeError("conv2d bias length must equal filter count");
    if (kh % 2 == 0 || kw % 2 == 0) throw ShapeError("conv2d kernel sides must be odd");
    if (h < kh || w < kw) {
        throw ShapeError("conv2d input " + shape_str(input->shape) +
                         " smaller than kernel " + shape_str(kernels->shape));
    }

    const int oh = h - kh + 1;
    const int ow = w - kw + 1;
    const int spatial = oh * ow;
    const int krows = c * kh * kw;
    auto out = Tensor::create({f, oh, ow});

    // A zero image (padding frame) convolves to a bias-valued feature map;
    // skipping the GEMM gives bit-identical results because 0*w terms
    // contribute exact zeros.
    const bool zero_input = input->all_zero();
    if (zero_input) {
        for (int fi = 0; fi < f; ++fi) {
            std::fill_n(out->values.data() + static_cast<std::size_t>(fi) * spatial, spatial,
                        bias->values[static_cast<std::size_t>(fi)]);
        }
    } else {
        std::vector<float> col(static_cast<std::size_t>(krows) * spatial);
        im2col(input->values.data(), c, h, w, kh, kw, col.data());
        detail::gemm_nn(f, spatial, krows, kernels->values.data(), col.data(),
                        out->values.data());
        for (int fi = 0; fi < f; ++fi) {
            const float b = bias->values[static_cast<std::size_t>(fi)];
            float* row = out->values.data() + static_cast<std::size_t>(fi) * spatial;
            for (int j = 0; j < spatial; ++j) row[j] += b;
        }
    }

    if (should_record({&input, &kernels, &bias})) {
        out->requires_grad = true;
        out->parents = {input, kernels, bias};
        out->backward_fn = [input, kernels, bias, c, h, w, kh, kw, f, spatial, krows,
                            zero_input](Tensor& self) {
            const float* dout = self.grad.data();
            if (bias->requires_grad) {
                bias->ensure_grad();
                for (int fi = 0; fi < f; ++fi) {
                    float s = 0.f;
                    const float* row = dout + static_cast<std::size_t>(fi) * spatial;
                    for (int j = 0; j < spatial; ++j) s += row[j];
                    bias->grad[static_cast<std::size_t>(fi)] += s;
                }
            }
            if (kernels->requires_grad && !zero_input) {
                kernels->ensure_grad();
                std::vector<float> col(static_cast<std::size_t>(krows) * spatial);
                im2col(input->values.data(), c, h, w, kh, kw, col.data());
                detail::gemm_nt_acc(f, krows, spatial, dout, col.data(), kernels->grad.data());
            }
            if (input->requires_grad) {
                input->ensure_grad();
                std::vector<float> dcol(static_cast<std::size_t>(krows) * spatial);
                detail::gemm_tn(krows, spatial, f, kernels->values.data(), dout, dcol.data());
                col2im_acc(dcol.data(), c, h, w, kh, kw, input->grad.data());
            }
        };
    }
    return out;
}

// ---------------------------------------------------------------------------
// maxpool2d
// ---------------------------------------------------------------------------

TensorPtr maxpool2d(const TensorPtr& input) {
    if (input->ndim() != 3) throw ShapeError("maxpool2d expects CxHxW input");
    const int c = input->dim(0), h = input->dim(1), w = input->dim(2);
    if (h < 2 || w < 2) throw ShapeError("maxpool2d needs spatial size >= 2x2");
    const int oh = h / 2;
    const int ow = w / 2;
    auto out = Tensor::create({c, oh, ow});
    auto argmax = std::make_shared<std::vector<std::int32_t>>(out->values.size());

    const float* in = input->values.data();
    for (int ch = 0; ch < c; ++ch) {
        for (int y = 0; y < oh; ++y) {
            for (int x = 0; x < ow; ++x) {
                std::int32_t best_idx = -1;
                float best = 0.f;
                for (int dy = 0; dy < 2; ++dy) {
                    for (int dx = 0; dx < 2; ++dx) {
                        const std::int32_t idx = static_cast<std::int32_t>(
                            (static_cast<std::size_t>(ch) * h + 2 * y + dy) * w + 2 * x + dx);
                        const float v = in[idx];
                        if (best_idx < 0 || v > best) {  // ties keep the first, row-major
                            best = v;
                            best_idx = idx;
                        }
                    }
                }
                const std::size_t o = (static_cast<std::size_t>(ch) * oh + y) * ow + x;
                out->values[o] = best;
                (*argmax)[o] = best_idx;
            }
        }
    }

    if (should_record({&input})) {
        out->requires_grad = true;
        out->parents = {input};
        out->backward_fn = [input, argmax](Tensor& self) {
            if (!input->requires_grad) return;
            input->ensure_grad();
            for (std::size_t o = 0; o < self.grad.size(); ++o) {
                input->grad[static_cast<std::size_t>((*argmax)[o])] += self.grad[o];
            }
        };
    }
    return out;
}

// ---------------------------------------------------------------------------
// relu, dropout
// ---------------------------------------------------------------------------

TensorPtr relu(const TensorPtr& x) {
    auto out = Tensor::create(x->shape);
    for (std::size_t i = 0; i < x->values.size(); ++i) {
        out->values[i] = x->values[i] > 0.0f ? x->values[i] : 0.0f;
    }
    if (should_record({&x})) {
        out->requires_grad = true;
        out->parents = {x};
        out->backward_fn = [x](Tensor& self) {
            if (!x->requires_grad) return;
            x->ensure_grad();
            for (std::size_t i = 0; i < self.grad.size(); ++i) {
                if (x->values[i] > 0.0f) x->grad[i] += self.grad[i];
            }
        };
    }
    return out;
}

TensorPtr dropout(const TensorPtr& x, float rate, bool training, RngStream& rng) {
    if (rate < 0.0f || rate >= 1.0f) {
        throw ShapeError("dropout rate must lie in [0,1), got " + std::to_string(rate));
    }
    if (!training || rate == 0.0f) return x;

    const float scale = 1.0f / (1.0f - rate);
    auto keep = std::make_shared<std::vector<float>>(x->values.size());
    auto out = Tensor::create(x->shape);
    for (std::size_t i = 0; i < x->values.size(); ++i) {
        const float m = rng.uniform() < rate ? 0.0f : scale;
        (*keep)[i] = m;
        out->values[i] = x->values[i] * m;
    }
    if (should_record({&x})) {
        out->requires_grad = true;
        out->parents = {x};
        out->backward_fn = [x, keep](Tensor& self) {
            if (!x->requires_grad) return;
            x->ensure_grad();
            for (std::size_t i = 0; i < self.grad.size(); ++i) {
                x->grad[i] += self.grad[i] * (*keep)[i];
            }
        };
    }
    return out;
}

// ---------------------------------------------------------------------------
// lstm_step
// ---------------------------------------------------------------------------

namespace {

void check_gate(const LstmGate& g, int u, int d, const char* name) {
    if (g.w->ndim() != 2 || g.w->dim(0) != u || g.w->dim(1) != d) {
        throw ShapeError(std::string("lstm ") + name + " input weight must be " +
                         std::to_string(u) + "x" + std::to_string(d) + ", got " +
                         shape_str(g.w->shape));
    }
    if (g.r->ndim() != 2 || g.r->dim(0) != u || g.r->dim(1) != u) {
        throw ShapeError(std::string("lstm ") + name + " recurrent weight must be " +
                         std::to_string(u) + "x" + std::to_string(u));
    }
    if (g.b->ndim() != 1 || g.b->dim(0) != u) {
        throw ShapeError(std::string("lstm ") + name + " bias must have length " +
                         std::to_string(u));
    }
}

TensorPtr narrow_view(const TensorPtr& src, int offset, int len) {
    auto out = Tensor::create({len});
    std::memcpy(out->values.data(), src->values.data() + offset,
                sizeof(float) * static_cast<std::size_t>(len));
    if (src->requires_grad && grad_recording_enabled()) {
        out->requires_grad = true;
        out->parents = {src};
        out->backward_fn = [src, offset, len](Tensor& self) {
            src->ensure_grad();
            detail::axpy(len, 1.0f, self.grad.data(), src->grad.data() + offset);
        };
    }
    return out;
}

}  // namespace

std::pair<TensorPtr, TensorPtr> lstm_step(const TensorPtr& x, const TensorPtr& h_prev,
                                          const TensorPtr& c_prev, const LstmParams& p) {
    if (x->ndim() != 1 || h_prev->ndim() != 1 || c_prev->ndim() != 1) {
        throw ShapeError("lstm_step expects 1-D x, h_prev, c_prev");
    }
    const int d = x->dim(0);
    const int u = h_prev->dim(0);
    if (c_prev->dim(0) != u) throw ShapeError("lstm_step h_prev/c_prev length mismatch");
    check_gate(p.input_gate, u, d, "input");
    check_gate(p.forget_gate, u, d, "forget");
    check_gate(p.output_gate, u, d, "output");
    check_gate(p.candidate, u, d, "candidate");

    // Pre-activations a_* = W*x + R*h_prev + b.
    auto pre = [&](const LstmGate& g, float* dst) {
        detail::gemv(u, d, g.w->values.data(), x->values.data(), dst);
        detail::gemv(u, u, g.r->values.data(), h_prev->values.data(), dst, true);
        detail::axpy(u, 1.0f, g.b->values.data(), dst);
    };
    auto act = std::make_shared<std::vector<float>>(static_cast<std::size_t>(5) * u);
    float* gi = act->data();
    float* gf = gi + u;
    float* go = gf + u;
    float* gg = go + u;
    float* tc = gg + u;  // tanh(c)
    pre(p.input_gate, gi);
    pre(p.forget_gate, gf);
    pre(p.output_gate, go);
    pre(p.candidate, gg);

    // hc node carries [h ; c] so one backward closure sees both gradients.
    auto hc = Tensor::create({2 * u});
    float* hv = hc->values.data();
    float* cv = hv + u;
    for (int i = 0; i < u; ++i) {
        gi[i] = sigmoid(gi[i]);
        gf[i] = sigmoid(gf[i]);
        go[i] = sigmoid(go[i]);
        gg[i] = std::tanh(gg[i]);
        cv[i] = gf[i] * c_prev->values[static_cast<std::size_t>(i)] + gi[i] * gg[i];
        tc[i] = std::tanh(cv[i]);
        hv[i] = go[i] * tc[i];
    }

    if (should_record({&x, &h_prev, &c_prev, &p.input_gate.w, &p.input_gate.r, &p.input_gate.b,
                       &p.forget_gate.w, &p.forget_gate.r, &p.forget_gate.b, &p.output_gate.w,
                       &p.output_gate.r, &p.output_gate.b, &p.candidate.w, &p.candidate.r,
                       &p.candidate.b})) {
        hc->requires_grad = true;
        hc->parents = {x, h_prev, c_prev,
                       p.input_gate.w,  p.input_gate.r,  p.input_gate.b,
                       p.forget_gate.w, p.forget_gate.r, p.forget_gate.b,
                       p.output_gate.w, p.output_gate.r, p.output_gate.b,
                       p.candidate.w,   p.candidate.r,   p.candidate.b};
        auto params = p;
        hc->backward_fn = [x, h_prev, c_prev, params, act, u, d](Tensor& self) {
            const float* dh = self.grad.data();
            const float* dc_in = dh + u;
            const float* gi = act->data();
            const float* gf = gi + u;
            const float* go = gf + u;
            const float* gg = go + u;
            const float* tc = gg + u;

            std::vector<float> da(static_cast<std::size_t>(4) * u);
            float* dai = da.data();
            float* daf = dai + u;
            float* dao = daf + u;
            float* dag = dao + u;
            std::vector<float> dc_prev_buf(static_cast<std::size_t>(u));
            for (int i = 0; i < u; ++i) {
                const float dct = dc_in[i] + dh[i] * go[i] * (1.0f - tc[i] * tc[i]);
                dai[i] = dct * gg[i] * gi[i] * (1.0f - gi[i]);
                daf[i] = dct * c_prev->values[static_cast<std::size_t>(i)] * gf[i] * (1.0f - gf[i]);
                dao[i] = dh[i] * tc[i] * go[i] * (1.0f - go[i]);
                dag[i] = dct * gi[i] * (1.0f - gg[i] * gg[i]);
                dc_prev_buf[static_cast<std::size_t>(i)] = dct * gf[i];
            }
            accumulate(*c_prev, dc_prev_buf.data(), u);

            const LstmGate* gates[4] = {&params.input_gate, &params.forget_gate,
                                        &params.output_gate, &params.candidate};
            const float* das[4] = {dai, daf, dao, dag};
            for (int gidx = 0; gidx < 4; ++gidx) {
                const LstmGate& g = *gates[gidx];
                const float* dag_v = das[gidx];
                if (g.w->requires_grad) {
                    g.w->ensure_grad();
                    detail::ger_acc(u, d, dag_v, x->values.data(), g.w->grad.data());
                }
                if (g.r->requires_grad) {
                    g.r->ensure_grad();
                    detail::ger_acc(u, u, dag_v, h_prev->values.data(), g.r->grad.data());
                }
                if (g.b->requires_grad) {
                    g.b->ensure_grad();
                    detail::axpy(u, 1.0f, dag_v, g.b->grad.data());
                }
                if (x->requires_grad) {
                    x->ensure_grad();
                    detail::gemv_t_acc(u, d, g.w->values.data(), dag_v, x->grad.data());
                }
                if (h_prev->requires_grad) {
                    h_prev->ensure_grad();
                    detail::gemv_t_acc(u, u, g.r->values.data(), dag_v, h_prev->grad.data());
                }
            }
        };
    }

    TensorPtr h = narrow_view(hc, 0, u);
    TensorPtr c = narrow_view(hc, u, u);
    return {h, c};
}

// ---------------------------------------------------------------------------
// linear, reshape, softmax
// ---------------------------------------------------------------------------

TensorPtr linear(const TensorPtr& x, const TensorPtr& weight, const TensorPtr& bias) {
    if (x->ndim() != 1 || weight->ndim() != 2 || bias->ndim() != 1) {
        throw ShapeError("linear expects x[D], weight[OxD], bias[O]");
    }
    const int d = x->dim(0);
    const int o = weight->dim(0);
    if (weight->dim(1) != d) {
        throw ShapeError("linear weight " + shape_str(weight->shape) +
                         " incompatible with input length " + std::to_string(d));
    }
    if (bias->dim(0) != o) throw ShapeError("linear bias length must equal output size");

    auto out = Tensor::create({o});
    detail::gemv(o, d, weight->values.data(), x->values.data(), out->values.data());
    detail::axpy(o, 1.0f, bias->values.data(), out->values.data());

    if (should_record({&x, &weight, &bias})) {
        out->requires_grad = true;
        out->parents = {x, weight, bias};
        out->backward_fn = [x, weight, bias, o, d](Tensor& self) {
            if (weight->requires_grad) {
                weight->ensure_grad();
                detail::ger_acc(o, d, self.grad.data(), x->values.data(), weight->grad.data());
            }
            if (bias->requires_grad) {
                bias->ensure_grad();
                detail::axpy(o, 1.0f, self.grad.data(), bias->grad.data());
            }
            if (x->requires_grad) {
                x->ensure_grad();
                detail::gemv_t_acc(o, d, weight->values.data(), self.grad.data(), x->grad.data());
            }
        };
    }
    return out;
}

TensorPtr reshape(const TensorPtr& x, Shape new_shape) {
    if (shape_numel(new_shape) != x->size()) {
        throw ShapeError("reshape from " + shape_str(x->shape) + " to " + shape_str(new_shape) +
                         " changes element count");
    }
    auto out = Tensor::create(std::move(new_shape));
    out->values = x->values;
    if (should_record({&x})) {
        out->requires_grad = true;
        out->parents = {x};
        out->backward_fn = [x](Tensor& self) {
            accumulate(*x, self.grad.data(), self.size());
        };
    }
    return out;
}

std::vector<float> softmax(const std::vector<float>& logits) {
    std::vector<float> p(logits.size());
    float mx = logits[0];
    for (float v : logits) mx = std::max(mx, v);
    float sum = 0.f;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        p[i] = std::exp(logits[i] - mx);
        sum += p[i];
    }
    for (float& v : p) v /= sum;
    return p;
}

TensorPtr softmax_xent(const TensorPtr& logits, int label, float sample_weight) {
    if (logits->ndim() != 1) throw ShapeError("softmax_xent expects a 1-D logit vector");
    const int k = logits->dim(0);
    if (label < 0 || label >= k) {
        throw DataError("class label " + std::to_string(label) + " out of range [0," +
                        std::to_string(k) + ")");
    }
    if (sample_weight < 0.0f) throw DataError("sample weight must be >= 0");

    auto probs = std::make_shared<std::vector<float>>(softmax(logits->values));
    float mx = logits->values[0];
    for (float v : logits->values) mx = std::max(mx, v);
    float sum = 0.f;
    for (float v : logits->values) sum += std::exp(v - mx);
    const float log_p_label = logits->values[static_cast<std::size_t>(label)] - mx - std::log(sum);
    auto out = Tensor::scalar(-sample_weight * log_p_label);

    if (should_record({&logits})) {
        out->requires_grad = true;
        out->parents = {logits};
        out->backward_fn = [logits, probs, label, sample_weight, k](Tensor& self) {
            if (!logits->requires_grad) return;
            logits->ensure_grad();
            const float g = self.grad[0] * sample_weight;
            for (int i = 0; i < k; ++i) {
                const float y = i == label ? 1.0f : 0.0f;
                logits->grad[static_cast<std::size_t>(i)] += g * ((*probs)[static_cast<std::size_t>(i)] - y);
            }
        };
    }
    return out;
}

// ---------------------------------------------------------------------------
// backward
// ---------------------------------------------------------------------------

void backward(const TensorPtr& loss_root) {
    if (!loss_root) throw DataError("backward called on null tensor");
    if (loss_root->size() != 1) {
        throw ShapeError("backward requires a scalar root, got " + shape_str(loss_root->shape));
    }

    // Iterative post-order DFS; nodes are visited once even when shared.
    std::vector<Tensor*> order;
    std::unordered_set<Tensor*> visited;
    std::vector<std::pair<Tensor*, std::size_t>> stack;
    stack.emplace_back(loss_root.get(), 0);
    visited.insert(loss_root.get());
    while (!stack.empty()) {
        auto& [node, next] = stack.back();
        if (next < node->parents.size()) {
            Tensor* parent = node->parents[next].get();
            ++next;
            if (parent->requires_grad && visited.insert(parent).second) {
                stack.emplace_back(parent, 0);
            }
        } else {
            order.push_back(node);
            stack.pop_back();
        }
    }

    // Intermediate gradients belong to this sweep alone; leaves accumulate.
    for (Tensor* node : order) {
        if (!node->is_leaf()) {
            node->ensure_grad();
            node->zero_grad();
        }
    }
    loss_root->ensure_grad();
    loss_root->grad[0] += 1.0f;

    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        Tensor* node = *it;
        if (node->backward_fn) node->backward_fn(*node);
    }
}

// ---------------------------------------------------------------------------
// ParamSet / optimizer
// ---------------------------------------------------------------------------

void ParamSet::add(const std::string& name, TensorPtr t) {
    if (!t) throw DataError("null parameter tensor for '" + name + "'");
    if (items_.count(name)) throw DataError("duplicate parameter name '" + name + "'");
    t->requires_grad = true;
    t->ensure_grad();
    items_.emplace(name, std::move(t));
}

const TensorPtr& ParamSet::at(const std::string& name) const {
    auto it = items_.find(name);
    if (it == items_.end()) throw DataError("unknown parameter '" + name + "'");
    return it->second;
}

ParamSet ParamSet::clone() const {
    ParamSet out;
    for (const auto& [name, t] : items_) {
        out.add(name, Tensor::from_values(t->shape, t->values));
    }
    return out;
}

void ParamSet::zero_grads() {
    for (const auto& [name, t] : items_) {
        (void)name;
        t->zero_grad();
    }
}

std::vector<std::string> ParamSet::names() const {
    std::vector<std::string> out;
    out.reserve(items_.size());
    for (const auto& [name, t] : items_) {
        (void)t;
        out.push_back(name);
    }
    return out;
}

LstmParams ParamSet::lstm_params(const std::string& prefix) const {
    auto gate = [&](const char* tag) {
        return LstmGate{at(prefix + "w_" + tag), at(prefix + "r_" + tag), at(prefix + "b_" + tag)};
    };
    return LstmParams{gate("i"), gate("f"), gate("o"), gate("g")};
}

OptimizerState OptimizerState::create(const ParamSet& params, float learning_rate,
                                      float momentum) {
    if (learning_rate <= 0.0f) throw DataError("learning rate must be positive");
    if (momentum < 0.0f || momentum >= 1.0f) throw DataError("momentum must lie in [0,1)");
    OptimizerState st;
    st.learning_rate = learning_rate;
    st.momentum = momentum;
    for (const auto& [name, t] : params) {
        st.velocity.emplace(name, std::vector<float>(t->values.size(), 0.0f));
    }
    return st;
}

void sgd_step(ParamSet& params, OptimizerState& state) {
    if (state.velocity.size() != params.size()) {
        throw DataError("optimizer state does not match parameter set");
    }
    for (const auto& [name, p] : params) {
        auto vit = state.velocity.find(name);
        if (vit == state.velocity.end()) {
            throw DataError("optimizer state missing velocity for '" + name + "'");
        }
        if (p->grad.size() != p->values.size()) {
            throw DataError("parameter '" + name + "' has no populated gradient");
        }
        std::vector<float>& v = vit->second;
        const float lr = state.learning_rate;
        const float mu = state.momentum;
        for (std::size_t i = 0; i < v.size(); ++i) {
            v[i] = mu * v[i] + p->grad[i];
            p->values[i] -= lr * v[i];
        }
        p->zero_grad();
    }
}

}  // namespace tofgr
