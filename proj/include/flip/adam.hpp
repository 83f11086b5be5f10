#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "flip/errors.hpp"

namespace flip {

// Standard Adam with bias correction; moments start at zero.
struct AdamState {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::uint64_t step = 0;
    std::vector<double> m;
    std::vector<double> v;

    explicit AdamState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}
};

void adam_step(AdamState& state, std::span<double> params,
               std::span<const double> grads, double alpha);

} // namespace flip
