#include "flip/circuit.hpp"

#include <string>

namespace flip {

namespace {

bool kind_takes_param(GateKind kind) {
    return kind != GateKind::CZ;
}

std::size_t expected_qubit_count(GateKind kind, std::size_t actual) {
    switch (kind) {
    case GateKind::RY:
    case GateKind::RZ:
        return 1;
    case GateKind::CZ:
    case GateKind::RZZ:
    case GateKind::RXXpYY:
    case GateKind::RXYmYX:
        return 2;
    case GateKind::QaoaProblemZZ:
        // flattened edge list, pairs
        return (actual >= 2 && actual % 2 == 0) ? actual : 2;
    case GateKind::QaoaMixerX:
        return actual >= 1 ? actual : 1;
    }
    return 0;
}

} // namespace

void Circuit::validate() const {
    std::vector<bool> slot_seen(n_params, false);
    for (const auto& gate : gates) {
        if (gate.qubits.size() != expected_qubit_count(gate.kind, gate.qubits.size())) {
            throw ContractError("gate has wrong number of qubits");
        }
        for (std::size_t i = 0; i < gate.qubits.size(); ++i) {
            if (gate.qubits[i] >= n_qubits) {
                throw IndexError("gate qubit " + std::to_string(gate.qubits[i]) +
                                 " out of range for " + std::to_string(n_qubits) +
                                 " qubits");
            }
        }
        // Pairwise distinctness only matters within one two-qubit gate or one
        // edge of the QAOA problem unitary.
        if (gate.kind == GateKind::QaoaProblemZZ) {
            for (std::size_t e = 0; e + 1 < gate.qubits.size(); e += 2) {
                if (gate.qubits[e] == gate.qubits[e + 1]) {
                    throw ContractError("QAOA edge with identical endpoints");
                }
            }
        } else if (gate.qubits.size() == 2 && gate.qubits[0] == gate.qubits[1]) {
            throw ContractError("two-qubit gate with identical qubits");
        }
        if (gate.param_slot && gate.fixed_angle) {
            throw ContractError("gate carries both a slot and a fixed angle");
        }
        if (!kind_takes_param(gate.kind) && (gate.param_slot || gate.fixed_angle)) {
            throw ContractError("CZ carries no parameter");
        }
        if (kind_takes_param(gate.kind) && !gate.param_slot && !gate.fixed_angle) {
            throw ContractError("parametrized gate kind needs a slot or fixed angle");
        }
        if (gate.param_slot) {
            if (*gate.param_slot >= n_params) {
                throw IndexError("param slot out of range");
            }
            slot_seen[*gate.param_slot] = true;
        }
    }
    for (std::uint32_t k = 0; k < n_params; ++k) {
        if (!slot_seen[k]) {
            throw ContractError("param slot " + std::to_string(k) +
                                " not used by any gate");
        }
    }
    if (!slots.empty() && slots.size() != n_params) {
        throw ContractError("slot metadata size mismatch");
    }
}

} // namespace flip
