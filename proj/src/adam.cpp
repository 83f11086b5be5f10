#include "flip/adam.hpp"

#include <cmath>

namespace flip {

void adam_step(AdamState& state, std::span<double> params,
               std::span<const double> grads, double alpha) {
    if (params.size() != grads.size() || params.size() != state.m.size()) {
        throw ContractError("adam_step: shape mismatch");
    }
    state.step += 1;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < params.size(); ++i) {
        state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * grads[i];
        state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * grads[i] * grads[i];
        const double mhat = state.m[i] / bc1;
        const double vhat = state.v[i] / bc2;
        params[i] -= alpha * mhat / (std::sqrt(vhat) + state.epsilon);
    }
}

} // namespace flip
