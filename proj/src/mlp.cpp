#include "minav/mlp.hpp"

#include <cmath>
#include <random>

#include "minav/error.hpp"
#include "minav/kernels.hpp"

namespace minav {

template <typename T>
Mlp<T>::Mlp(std::vector<std::size_t> dims, OutputHead head) : dims_(std::move(dims)), head_(head) {
    if (dims_.size() < 2) throw Error(ErrorCode::invalid_config, "network needs at least one layer");
    std::size_t total = 0;
    for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
        if (dims_[l] == 0 || dims_[l + 1] == 0) {
            throw Error(ErrorCode::invalid_config, "layer widths must be positive");
        }
        offsets_.push_back(total);
        total += dims_[l] * dims_[l + 1] + dims_[l + 1];
    }
    params_.assign(total, T(0));
}

template <typename T>
void Mlp<T>::init_uniform(Rng& rng) {
    for (std::size_t l = 0; l < layer_count(); ++l) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(dims_[l]));
        std::uniform_real_distribution<double> dist(-bound, bound);
        for (auto& w : mutable_weight(l)) w = static_cast<T>(dist(rng));
        for (auto& b : mutable_bias(l)) b = static_cast<T>(dist(rng));
    }
    ++generation_;
}

template <typename T>
std::span<const T> Mlp<T>::weight(std::size_t layer) const {
    return {params_.data() + weight_offset(layer), dims_[layer] * dims_[layer + 1]};
}

template <typename T>
std::span<const T> Mlp<T>::bias(std::size_t layer) const {
    return {params_.data() + bias_offset(layer), dims_[layer + 1]};
}

template <typename T>
std::span<T> Mlp<T>::mutable_weight(std::size_t layer) {
    ++generation_;
    return {params_.data() + weight_offset(layer), dims_[layer] * dims_[layer + 1]};
}

template <typename T>
std::span<T> Mlp<T>::mutable_bias(std::size_t layer) {
    ++generation_;
    return {params_.data() + bias_offset(layer), dims_[layer + 1]};
}

template <typename T>
void Mlp<T>::forward(std::span<const T> input, std::size_t rows, ForwardCache<T>& cache) const {
    if (input.size() != rows * input_dim()) {
        throw Error(ErrorCode::dimension_mismatch, "network input has wrong size");
    }
    const auto& k = kernels::active<T>();
    cache.rows = rows;
    cache.owner = this;
    cache.generation = generation_;
    cache.activations.resize(dims_.size());
    cache.activations[0].assign(input.begin(), input.end());
    for (std::size_t l = 0; l < layer_count(); ++l) {
        const std::size_t in = dims_[l], out = dims_[l + 1];
        auto& y = cache.activations[l + 1];
        y.resize(rows * out);
        k.linear_forward(cache.activations[l].data(), params_.data() + weight_offset(l),
                         params_.data() + bias_offset(l), y.data(), rows, in, out);
        if (l + 1 < layer_count()) {
            for (auto& v : y) v = v > T(0) ? v : T(0);
        } else if (head_ == OutputHead::tanh) {
            for (auto& v : y) v = std::tanh(v);
        }
    }
}

template <typename T>
std::vector<T> Mlp<T>::predict(std::span<const T> input, std::size_t rows) const {
    ForwardCache<T> cache;
    forward(input, rows, cache);
    return std::move(cache.activations.back());
}

template <typename T>
void Mlp<T>::backward(ForwardCache<T>& cache, std::span<const T> d_output, std::span<T> grads,
                      std::span<T> d_input) const {
    if (cache.owner != this || cache.generation != generation_ ||
        cache.activations.size() != dims_.size()) {
        throw Error(ErrorCode::invalid_input, "stale forward cache");
    }
    const std::size_t rows = cache.rows;
    if (d_output.size() != rows * output_dim()) {
        throw Error(ErrorCode::dimension_mismatch, "output gradient has wrong size");
    }
    if (!grads.empty() && grads.size() != params_.size()) {
        throw Error(ErrorCode::dimension_mismatch, "gradient buffer has wrong size");
    }
    if (!d_input.empty() && d_input.size() != rows * input_dim()) {
        throw Error(ErrorCode::dimension_mismatch, "input gradient buffer has wrong size");
    }
    const auto& k = kernels::active<T>();
    if (!grads.empty()) std::fill(grads.begin(), grads.end(), T(0));

    auto& delta = cache.delta;
    auto& next = cache.delta_next;
    delta.assign(d_output.begin(), d_output.end());
    const auto& out_act = cache.activations.back();
    if (head_ == OutputHead::tanh) {
        for (std::size_t i = 0; i < delta.size(); ++i) delta[i] *= T(1) - out_act[i] * out_act[i];
    }
    for (std::size_t l = layer_count(); l-- > 0;) {
        const std::size_t in = dims_[l], out = dims_[l + 1];
        const auto& x = cache.activations[l];
        if (!grads.empty()) {
            k.linear_backward_weight(delta.data(), x.data(), grads.data() + weight_offset(l),
                                     grads.data() + bias_offset(l), rows, in, out);
        }
        if (l == 0 && d_input.empty()) break;
        next.resize(rows * in);
        k.linear_backward_input(delta.data(), params_.data() + weight_offset(l), next.data(), rows,
                                in, out);
        if (l > 0) {
            for (std::size_t i = 0; i < next.size(); ++i) {
                if (!(x[i] > T(0))) next[i] = T(0);
            }
        } else {
            std::copy(next.begin(), next.end(), d_input.begin());
        }
        std::swap(delta, next);
    }
}

template <typename T>
template <typename U>
Mlp<U> Mlp<T>::cast() const {
    Mlp<U> out(dims_, head_);
    auto dst = out.mutable_params();
    for (std::size_t i = 0; i < params_.size(); ++i) dst[i] = static_cast<U>(params_[i]);
    return out;
}

template <typename T>
bool Mlp<T>::all_finite() const {
    for (T v : params_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

template <typename T>
void adam_step(Mlp<T>& net, std::span<const T> grads, AdamState<T>& state) {
    if (grads.size() != net.param_count() || state.m.size() != net.param_count() ||
        state.v.size() != net.param_count()) {
        throw Error(ErrorCode::dimension_mismatch, "adam buffers do not match parameters");
    }
    ++state.step;
    const double t = static_cast<double>(state.step);
    kernels::AdamCoeffs c{state.lr, state.beta1, state.beta2, state.eps,
                          1.0 / (1.0 - std::pow(state.beta1, t)),
                          1.0 / (1.0 - std::pow(state.beta2, t))};
    auto p = net.mutable_params();
    kernels::active<T>().adam(p.data(), grads.data(), state.m.data(), state.v.data(), p.size(), c);
}

template <typename T>
void polyak_update(Mlp<T>& target, const Mlp<T>& online, double tau) {
    if (!target.same_shape(online)) throw Error(ErrorCode::dimension_mismatch, "polyak shape mismatch");
    if (!(tau >= 0.0 && tau <= 1.0)) throw Error(ErrorCode::invalid_config, "tau must be in [0, 1]");
    auto dst = target.mutable_params();
    const auto src = online.params();
    if (tau == 1.0) {
        std::copy(src.begin(), src.end(), dst.begin());
        return;
    }
    if (tau == 0.0) return;
    kernels::active<T>().lerp(static_cast<T>(tau), src.data(), dst.data(), dst.size());
}

template class Mlp<float>;
template class Mlp<double>;
template Mlp<double> Mlp<float>::cast<double>() const;
template Mlp<float> Mlp<double>::cast<float>() const;
template Mlp<float> Mlp<float>::cast<float>() const;
template Mlp<double> Mlp<double>::cast<double>() const;
template void adam_step(Mlp<float>&, std::span<const float>, AdamState<float>&);
template void adam_step(Mlp<double>&, std::span<const double>, AdamState<double>&);
template void polyak_update(Mlp<float>&, const Mlp<float>&, double);
template void polyak_update(Mlp<double>&, const Mlp<double>&, double);

}  // namespace minav
