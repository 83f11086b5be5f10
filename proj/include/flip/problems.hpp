#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "flip/linalg.hpp"
#include "flip/problem.hpp"
#include "flip/rng.hpp"

namespace flip {

// Uniform sampling ranges for one problem family. Integer ranges are
// inclusive at both ends; edge_prob and U are continuous.
struct IntRange {
    std::uint32_t lo = 1;
    std::uint32_t hi = 1;
};

struct RealRange {
    double lo = 0.0;
    double hi = 0.0;
};

struct DistributionConfig {
    Family family = Family::StatePrep;
    IntRange n{1, 8};               // qubits (state prep) or graph nodes (QAOA)
    IntRange d{1, 8};               // layers / QAOA layers / LDCA sublayers
    IntRange L{1, 6};               // FHM sites
    RealRange edge_prob{0.3, 0.9};  // QAOA
    RealRange U{0.0, 10.0};         // FHM

    void validate() const;
};

ProblemInstance build_state_prep(const StatePrepSpec& spec);

// Each of the n(n-1)/2 candidate edges is included independently with
// probability edge_prob; empty draws are resampled unless allow_empty.
Graph sample_erdos_renyi(std::uint32_t n_nodes, double edge_prob, Rng& rng,
                         bool allow_empty = false);

ProblemInstance build_maxcut(const MaxCutSpec& spec);

// Qubit ordering is interleaved: site j spin-up -> qubit 2j, spin-down ->
// qubit 2j+1. Constant terms produced by the transformation stay in the
// observable and count toward its l1 norm.
Observable jordan_wigner(const FhmSpec& spec);

// Brickwork number-preserving ansatz over n = 2L qubits: one initial RZ per
// qubit, then d sublayers of even/odd nearest-neighbour pairs, each pair
// applying [RXXpYY, RZZ, RXYmYX]. K = n + 3d(n-1).
Circuit ldca_circuit(std::uint32_t L, std::uint32_t d);

// Anti-ferromagnetic product state: sites 0, 2, ... doubly occupied until
// L electrons are placed; an odd remainder is a single spin-up.
std::uint64_t fhm_initial_state(std::uint32_t L);

ProblemInstance build_fhm(const FhmSpec& spec);

ProblemInstance sample_problem(const DistributionConfig& cfg, Rng& rng);

// Minimum eigenvalue, optionally restricted to a Hamming-weight sector.
// Diagonal observables are solved by bitstring enumeration (n <= 20); the
// rest go through the dense spectrum path.
double exact_min(const Observable& obs, std::uint32_t n_qubits,
                 std::optional<std::uint32_t> sector = {});

} // namespace flip
