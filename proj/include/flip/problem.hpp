#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "flip/circuit.hpp"
#include "flip/observable.hpp"

namespace flip {

enum class Family : std::uint8_t { StatePrep, MaxCut, Fhm };

std::string family_name(Family family);
Family family_from_name(const std::string& name);

// Prepare the basis state with only qubit (p-1) flipped, using d layers of
// RY rotations followed by a CZ ring.
struct StatePrepSpec {
    std::uint32_t n = 1; // qubits, [1, 20]
    std::uint32_t d = 1; // layers
    std::uint32_t p = 1; // target position, 1-based in [1, n]
};

struct Graph {
    std::uint32_t n_nodes = 0;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
};

struct MaxCutSpec {
    Graph graph;
    std::uint32_t d = 1;    // QAOA layers, K = 2d
    double edge_prob = 0.5; // Erdos-Renyi parameter the graph was drawn with
};

// 1D Fermi-Hubbard chain at half filling; energies in units of t = 1 and
// chemical potential pinned to U/2.
struct FhmSpec {
    std::uint32_t L = 1; // sites; n = 2L qubits
    double U = 0.0;      // on-site interaction
    std::uint32_t d = 1; // LDCA sublayers, K = 3d(n-1) + n
    double t() const { return 1.0; }
    double mu() const { return U / 2.0; }
};

using ProblemSpec = std::variant<StatePrepSpec, MaxCutSpec, FhmSpec>;

struct ProblemInstance {
    Family family = Family::StatePrep;
    Circuit circuit;
    Observable observable;
    std::uint64_t initial_state = 0;
    ProblemSpec spec;
    // Exact minimum of the l1-normalized cost over the states reachable from
    // initial_state, when cheap enough to compute.
    std::optional<double> c_min;

    std::uint32_t n_params() const { return circuit.n_params; }
    std::uint32_t n_qubits() const { return circuit.n_qubits; }
};

} // namespace flip
