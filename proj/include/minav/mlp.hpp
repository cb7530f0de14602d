#pragma once

// Fully connected network with ReLU hidden layers, explicit reverse-mode
// gradients, Adam, and Polyak averaging. Instantiated for float (training)
// and double (finite-difference checks).

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "minav/rng.hpp"

namespace minav {

enum class OutputHead : std::uint32_t { identity = 0, tanh = 1 };

template <typename T>
class Mlp;

/// Activations saved by forward() for backward(). Tied to the parameter
/// generation of the network that produced it.
template <typename T>
struct ForwardCache {
    std::size_t rows = 0;
    std::vector<std::vector<T>> activations;  // [0] = input, [l + 1] = output of layer l
    const void* owner = nullptr;
    std::uint64_t generation = 0;
    std::vector<T> delta, delta_next;  // scratch for backward

    std::span<const T> output() const { return activations.back(); }
};

template <typename T>
class Mlp {
public:
    Mlp() = default;
    /// `dims` = {input, hidden..., output}; at least one layer.
    Mlp(std::vector<std::size_t> dims, OutputHead head);

    /// Weights and biases uniform in +-1/sqrt(fan_in).
    void init_uniform(Rng& rng);

    const std::vector<std::size_t>& dims() const { return dims_; }
    OutputHead head() const { return head_; }
    std::size_t input_dim() const { return dims_.front(); }
    std::size_t output_dim() const { return dims_.back(); }
    std::size_t layer_count() const { return dims_.size() - 1; }
    std::size_t param_count() const { return params_.size(); }

    std::span<const T> params() const { return params_; }
    /// Mutable access invalidates outstanding caches.
    std::span<T> mutable_params() {
        ++generation_;
        return params_;
    }
    std::span<const T> weight(std::size_t layer) const;
    std::span<const T> bias(std::size_t layer) const;
    std::span<T> mutable_weight(std::size_t layer);
    std::span<T> mutable_bias(std::size_t layer);
    std::uint64_t generation() const { return generation_; }

    /// Row-major input (rows x input_dim). Throws dimension-mismatch.
    void forward(std::span<const T> input, std::size_t rows, ForwardCache<T>& cache) const;
    std::vector<T> predict(std::span<const T> input, std::size_t rows) const;

    /// Reverse pass for d(loss)/d(output). Writes parameter gradients into
    /// `grads` (overwritten; skipped when empty) and the input gradient into
    /// `d_input` (skipped when empty). Throws invalid-input on a stale cache.
    void backward(ForwardCache<T>& cache, std::span<const T> d_output, std::span<T> grads,
                  std::span<T> d_input) const;

    template <typename U>
    Mlp<U> cast() const;

    bool same_shape(const Mlp& other) const { return dims_ == other.dims_ && head_ == other.head_; }
    bool all_finite() const;

    bool operator==(const Mlp& other) const {
        return dims_ == other.dims_ && head_ == other.head_ && params_ == other.params_;
    }

private:
    std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }
    std::size_t bias_offset(std::size_t layer) const {
        return offsets_[layer] + dims_[layer] * dims_[layer + 1];
    }

    std::vector<std::size_t> dims_;
    OutputHead head_ = OutputHead::identity;
    std::vector<std::size_t> offsets_;
    std::vector<T> params_;
    std::uint64_t generation_ = 1;
};

template <typename T>
struct AdamState {
    std::vector<T> m, v;
    std::uint64_t step = 0;
    double lr = 3e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    AdamState() = default;
    AdamState(std::size_t n, double lr_) : m(n, T(0)), v(n, T(0)), lr(lr_) {}
};

/// Bias-corrected Adam update of `net` in place. Throws dimension-mismatch.
template <typename T>
void adam_step(Mlp<T>& net, std::span<const T> grads, AdamState<T>& state);

/// target <- tau * online + (1 - tau) * target. Throws on shape mismatch or
/// tau outside [0, 1].
template <typename T>
void polyak_update(Mlp<T>& target, const Mlp<T>& online, double tau);

}  // namespace minav
