#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "tofgr/errors.hpp"
#include "tofgr/rng.hpp"

namespace tofgr {

using Shape = std::vector<int>;

class Tensor;
using TensorPtr = std::shared_ptr<Tensor>;

/// Dense n-dimensional float32 tensor. Doubles as a node in the reverse-mode
/// graph: ops append parents and a backward closure while grad recording is
/// enabled and at least one input requires gradients.
class Tensor {
public:
    Shape shape;
    std::vector<float> values;  // row-major, length == product(shape)
    std::vector<float> grad;    // empty, or same length as values
    bool requires_grad = false;

    std::vector<TensorPtr> parents;
    std::function<void(Tensor&)> backward_fn;  // reads this->grad, accumulates into parents

    static TensorPtr create(Shape shape, bool requires_grad = false);
    static TensorPtr zeros(Shape shape, bool requires_grad = false);
    static TensorPtr from_values(Shape shape, std::vector<float> values,
                                 bool requires_grad = false);
    static TensorPtr scalar(float v);

    std::int64_t size() const { return static_cast<std::int64_t>(values.size()); }
    int dim(int i) const { return shape[static_cast<std::size_t>(i)]; }
    int ndim() const { return static_cast<int>(shape.size()); }

    bool is_leaf() const { return parents.empty(); }
    bool all_zero() const;

    /// Allocates (zeroed) the gradient slot if absent.
    void ensure_grad();
    void zero_grad();
};

std::int64_t shape_numel(const Shape& s);
std::string shape_str(const Shape& s);

/// Scoped switch that disables graph recording (inference, oracles).
class NoGradGuard {
public:
    NoGradGuard();
    ~NoGradGuard();
    NoGradGuard(const NoGradGuard&) = delete;
    NoGradGuard& operator=(const NoGradGuard&) = delete;

private:
    bool prev_;
};

bool grad_recording_enabled();

// ---------------------------------------------------------------------------
// Differentiable ops
// ---------------------------------------------------------------------------

/// Valid convolution, stride 1. input CxHxW, kernels FxCxKhxKw (odd Kh/Kw),
/// bias F -> output FxH'xW' with H' = H-Kh+1, W' = W-Kw+1.
TensorPtr conv2d(const TensorPtr& input, const TensorPtr& kernels, const TensorPtr& bias);

/// 2x2/stride-2 max pooling with floor semantics; odd trailing rows/columns
/// are dropped. Gradient routes to the first maximum in row-major order.
TensorPtr maxpool2d(const TensorPtr& input);

TensorPtr relu(const TensorPtr& x);

/// Inverted dropout: training mode zeroes each element with probability
/// `rate` and scales survivors by 1/(1-rate); inference mode is the identity
/// (the input node is returned unchanged).
TensorPtr dropout(const TensorPtr& x, float rate, bool training, RngStream& rng);

/// One LSTM gate: weight UxD on the input, recurrent UxU, bias U.
struct LstmGate {
    TensorPtr w;
    TensorPtr r;
    TensorPtr b;
};

struct LstmParams {
    LstmGate input_gate;
    LstmGate forget_gate;
    LstmGate output_gate;
    LstmGate candidate;
};

/// Standard sigmoid/tanh LSTM cell: c = f*c_prev + i*g, h = o*tanh(c).
std::pair<TensorPtr, TensorPtr> lstm_step(const TensorPtr& x, const TensorPtr& h_prev,
                                          const TensorPtr& c_prev, const LstmParams& p);

/// out = weight * x + bias for 1-D x.
TensorPtr linear(const TensorPtr& x, const TensorPtr& weight, const TensorPtr& bias);

/// Same data viewed under a new shape (element count must match).
TensorPtr reshape(const TensorPtr& x, Shape new_shape);

/// Weighted softmax cross-entropy against one class index, stabilized by
/// max-subtraction. Returns a scalar node.
TensorPtr softmax_xent(const TensorPtr& logits, int label, float sample_weight);

/// Plain softmax of a float vector (no graph).
std::vector<float> softmax(const std::vector<float>& logits);

/// Reverse-mode sweep from a scalar root. Intermediate gradients are private
/// to the call; leaf gradients accumulate across calls until cleared.
void backward(const TensorPtr& loss_root);

// ---------------------------------------------------------------------------
// Parameters and optimizer
// ---------------------------------------------------------------------------

/// Named parameter tensors with deterministic (sorted) iteration order.
class ParamSet {
public:
    using Map = std::map<std::string, TensorPtr>;
    using const_iterator = Map::const_iterator;

    void add(const std::string& name, TensorPtr t);
    const TensorPtr& at(const std::string& name) const;
    bool has(const std::string& name) const { return items_.count(name) != 0; }
    std::size_t size() const { return items_.size(); }

    const_iterator begin() const { return items_.begin(); }
    const_iterator end() const { return items_.end(); }

    /// Deep copy (fresh tensors, gradients not carried over).
    ParamSet clone() const;
    void zero_grads();

    std::vector<std::string> names() const;

    /// Gate bundle lookup by prefix, e.g. "lstm." expects lstm.w_i, lstm.r_i,
    /// lstm.b_i and so on for f, o, g.
    LstmParams lstm_params(const std::string& prefix) const;

private:
    Map items_;
};

/// Momentum-SGD state. Velocity entries correspond one-to-one with the
/// parameter set the state was created from.
struct OptimizerState {
    float learning_rate = 1e-3f;
    float momentum = 0.9f;
    std::map<std::string, std::vector<float>> velocity;

    static OptimizerState create(const ParamSet& params, float learning_rate,
                                 float momentum);
};

/// v = momentum*v + grad; p -= lr*v; gradients cleared afterwards.
void sgd_step(ParamSet& params, OptimizerState& state);

}  // namespace tofgr
