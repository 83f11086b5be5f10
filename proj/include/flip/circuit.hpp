#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "flip/errors.hpp"

namespace flip {

// RXXpYY is the matched pair exp(-i t XX/2) exp(-i t YY/2); RXYmYX is
// exp(-i t XY/2) exp(+i t YX/2). Both commute with total Z, so they act
// block-diagonally on Hamming-weight sectors. QaoaProblemZZ applies
// exp(-i g Z_i Z_j) once per stored edge, all edges reading one slot;
// QaoaMixerX applies exp(-i b X_i) per stored qubit, one shared slot.
enum class GateKind : std::uint8_t {
    RY,
    RZ,
    CZ,
    RZZ,
    RXXpYY,
    RXYmYX,
    QaoaProblemZZ,
    QaoaMixerX,
};

struct Gate {
    GateKind kind;
    // Acted-on qubits. For QaoaProblemZZ this is the flattened edge list
    // (i0, j0, i1, j1, ...); for QaoaMixerX the full list of mixed qubits.
    std::vector<std::uint32_t> qubits;
    std::optional<std::uint32_t> param_slot;
    std::optional<double> fixed_angle;
};

// Per-slot structural metadata emitted by the circuit builders and consumed
// verbatim by the encoders, so the two can never drift apart.
struct SlotInfo {
    std::uint32_t first_qubit = 0;
    std::uint32_t layer = 0;     // 0-based
    std::uint32_t gate_type = 0; // family specific (LDCA 1..8, QAOA 0=problem 1=mixer)
};

struct Circuit {
    std::uint32_t n_qubits = 0;
    std::uint32_t n_layers = 0;
    std::vector<Gate> gates;
    std::uint32_t n_params = 0;
    std::vector<SlotInfo> slots; // size n_params when built by a family builder

    // Checks the structural invariants: qubit indices in range and distinct
    // per gate, slot indices forming a contiguous [0, n_params) cover, and
    // the slot/fixed-angle exclusivity rules per gate kind.
    void validate() const;
};

} // namespace flip
