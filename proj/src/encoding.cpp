#include "flip/encoding.hpp"

#include <string>

#include "flip/problems.hpp"

namespace flip {

namespace {

void check_slot(std::uint32_t slot, std::uint32_t n_params) {
    if (slot >= n_params) {
        throw IndexError("slot " + std::to_string(slot) + " out of range (K = " +
                         std::to_string(n_params) + ")");
    }
}

EncodingVector encode_state_prep_info(const StatePrepSpec& spec, const SlotInfo& info,
                                      double divisor) {
    return {(info.first_qubit + 1) / divisor, (info.layer + 1) / divisor,
            spec.d / divisor, spec.n / divisor, spec.p / divisor};
}

EncodingVector encode_qaoa_info(const MaxCutSpec& spec, const SlotInfo& info,
                                double divisor) {
    return {(info.layer + 1) / divisor, spec.d / divisor,
            static_cast<double>(info.gate_type)};
}

EncodingVector encode_ldca_info(const FhmSpec& spec, const SlotInfo& info,
                                double divisor) {
    EncodingVector v(encoding_width(Family::Fhm), 0.0);
    v[0] = (info.first_qubit + 1) / divisor;
    v[1] = (info.layer + 1) / divisor;
    v[1 + info.gate_type] = 1.0; // one-hot block occupies entries 2..9
    v[10] = spec.d / divisor;
    v[11] = (2.0 * spec.L) / divisor;
    v[12] = spec.U / divisor;
    return v;
}

} // namespace

EncodingVector encode_state_prep(const StatePrepSpec& spec, std::uint32_t slot,
                                 double divisor) {
    check_slot(slot, spec.n * spec.d);
    const SlotInfo info{slot % spec.n, slot / spec.n, 0};
    return encode_state_prep_info(spec, info, divisor);
}

EncodingVector encode_qaoa(const MaxCutSpec& spec, std::uint32_t slot,
                           double divisor) {
    check_slot(slot, 2 * spec.d);
    const SlotInfo info{0, slot / 2, slot % 2};
    return encode_qaoa_info(spec, info, divisor);
}

EncodingVector encode_ldca(const FhmSpec& spec, std::uint32_t slot,
                           double divisor) {
    // Single source of truth: reuse the builder's slot table.
    const Circuit circuit = ldca_circuit(spec.L, spec.d);
    check_slot(slot, circuit.n_params);
    return encode_ldca_info(spec, circuit.slots[slot], divisor);
}

EncodingMatrix encode_problem(const ProblemInstance& problem, double divisor) {
    const std::size_t width = encoding_width(problem.family);
    const Circuit& circuit = problem.circuit;
    if (circuit.slots.size() != circuit.n_params) {
        throw ContractError("circuit carries no slot metadata");
    }
    EncodingMatrix m;
    m.rows = circuit.n_params;
    m.cols = width;
    m.data.resize(m.rows * m.cols);
    for (std::uint32_t k = 0; k < circuit.n_params; ++k) {
        EncodingVector v;
        switch (problem.family) {
        case Family::StatePrep:
            v = encode_state_prep_info(std::get<StatePrepSpec>(problem.spec),
                                       circuit.slots[k], divisor);
            break;
        case Family::MaxCut:
            v = encode_qaoa_info(std::get<MaxCutSpec>(problem.spec),
                                 circuit.slots[k], divisor);
            break;
        case Family::Fhm:
            v = encode_ldca_info(std::get<FhmSpec>(problem.spec), circuit.slots[k],
                                 divisor);
            break;
        }
        std::copy(v.begin(), v.end(), m.row(k));
    }
    return m;
}

} // namespace flip
