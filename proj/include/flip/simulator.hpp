#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "flip/circuit.hpp"
#include "flip/observable.hpp"
#include "flip/problem.hpp"
#include "flip/statevector.hpp"

namespace flip {

// Additive i.i.d. Gaussian perturbation of gradient vectors. sigma == 0
// reproduces the noiseless gradient bit-exactly (the RNG is never touched).
struct GradientNoise {
    double sigma = 0.0;
    std::uint64_t rng_seed = 0;
};

// Pure single-gate application; used by the bindings and tests. The training
// and benchmark paths go through run()/gradients below.
Statevector apply_gate(const Statevector& state, const Gate& gate,
                       std::span<const double> params);

// In-place kernel used by run(); exposed for the adjoint sweep and tests.
void apply_gate_inplace(Statevector& state, const Gate& gate,
                        std::span<const double> params, bool inverse = false);

Statevector run(const Circuit& circuit, std::span<const double> params,
                std::uint64_t initial_basis = 0);

double expectation(const Statevector& state, const Observable& obs);

// out = O |in>; `out` is overwritten and must have the same size as `in`.
void apply_observable(const Statevector& in, const Observable& obs, Statevector& out);

// out += coeff * P |in>
void accumulate_pauli(const Statevector& in, const PauliString& p,
                      std::complex<double> coeff, Statevector& out);

double cost(const ProblemInstance& problem, std::span<const double> params,
            bool normalized = true);

// Exact gradient via one forward pass plus one adjoint sweep; contributions
// of gates sharing a slot accumulate.
std::vector<double> gradient_reverse(const ProblemInstance& problem,
                                     std::span<const double> params,
                                     bool normalized = true);

// Parameter-shift gradient. Kept fully independent of the fast kernels: the
// circuit is decomposed into primitive Pauli rotations exp(-i a P / 2) and
// evaluated through the generic rotation formula, so it can serve as an
// oracle for gradient_reverse.
std::vector<double> gradient_shift(const ProblemInstance& problem,
                                   std::span<const double> params,
                                   bool normalized = true);

std::vector<double> noisy_gradient(const ProblemInstance& problem,
                                   std::span<const double> params,
                                   const GradientNoise& noise,
                                   bool normalized = true);

} // namespace flip
