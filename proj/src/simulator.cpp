#include "flip/simulator.hpp"

#include <bit>
#include <cmath>

#include "flip/rng.hpp"

namespace flip {

namespace {

using cplx = std::complex<double>;
constexpr cplx kImag{0.0, 1.0};
constexpr double kPi = 3.14159265358979323846;

double resolve_angle(const Gate& gate, std::span<const double> params) {
    if (gate.param_slot) {
        if (*gate.param_slot >= params.size()) {
            throw IndexError("param slot out of range");
        }
        return params[*gate.param_slot];
    }
    if (gate.fixed_angle) {
        return *gate.fixed_angle;
    }
    return 0.0;
}

void check_qubit(const Statevector& sv, std::uint32_t q) {
    if (q >= sv.num_qubits()) {
        throw IndexError("qubit " + std::to_string(q) + " out of range");
    }
}

// (a0, a1) -> (m00 a0 + m01 a1, m10 a0 + m11 a1) on qubit q.
void apply_single_qubit(Statevector& sv, std::uint32_t q, cplx m00, cplx m01,
                        cplx m10, cplx m11) {
    auto amp = sv.amplitudes();
    const std::uint64_t stride = std::uint64_t{1} << q;
    const std::uint64_t dim = sv.size();
    for (std::uint64_t base = 0; base < dim; base += stride * 2) {
        for (std::uint64_t off = 0; off < stride; ++off) {
            const std::uint64_t i0 = base + off;
            const std::uint64_t i1 = i0 + stride;
            const cplx a0 = amp[i0];
            const cplx a1 = amp[i1];
            amp[i0] = m00 * a0 + m01 * a1;
            amp[i1] = m10 * a0 + m11 * a1;
        }
    }
}

void apply_ry(Statevector& sv, std::uint32_t q, double theta) {
    const double c = std::cos(theta / 2);
    const double s = std::sin(theta / 2);
    apply_single_qubit(sv, q, c, -s, s, c);
}

void apply_rz(Statevector& sv, std::uint32_t q, double theta) {
    const cplx p0 = std::exp(-kImag * (theta / 2));
    const cplx p1 = std::exp(kImag * (theta / 2));
    apply_single_qubit(sv, q, p0, 0.0, 0.0, p1);
}

// RX is not a public gate kind; the QAOA mixer expands to exp(-i b X) = RX(2b).
void apply_rx(Statevector& sv, std::uint32_t q, double theta) {
    const double c = std::cos(theta / 2);
    const cplx is = -kImag * std::sin(theta / 2);
    apply_single_qubit(sv, q, c, is, is, c);
}

void apply_cz(Statevector& sv, std::uint32_t qa, std::uint32_t qb) {
    auto amp = sv.amplitudes();
    const std::uint64_t mask = (std::uint64_t{1} << qa) | (std::uint64_t{1} << qb);
    for (std::uint64_t i = 0; i < sv.size(); ++i) {
        if ((i & mask) == mask) {
            amp[i] = -amp[i];
        }
    }
}

void apply_rzz(Statevector& sv, std::uint32_t qa, std::uint32_t qb, double theta) {
    auto amp = sv.amplitudes();
    const std::uint64_t ba = std::uint64_t{1} << qa;
    const std::uint64_t bb = std::uint64_t{1} << qb;
    const cplx even = std::exp(-kImag * (theta / 2)); // Z Z eigenvalue +1
    const cplx odd = std::exp(kImag * (theta / 2));
    for (std::uint64_t i = 0; i < sv.size(); ++i) {
        const bool same = static_cast<bool>(i & ba) == static_cast<bool>(i & bb);
        amp[i] *= same ? even : odd;
    }
}

// exp(-i t XX/2) exp(-i t YY/2): identity on {|00>,|11>}, exp(-i t sx) on the
// single-excitation pair, i.e. a number-preserving hop with an -i amplitude.
void apply_rxx_plus_yy(Statevector& sv, std::uint32_t qa, std::uint32_t qb,
                       double theta) {
    auto amp = sv.amplitudes();
    const std::uint64_t ba = std::uint64_t{1} << qa;
    const std::uint64_t bb = std::uint64_t{1} << qb;
    const double c = std::cos(theta);
    const cplx is = -kImag * std::sin(theta);
    for (std::uint64_t i = 0; i < sv.size(); ++i) {
        if ((i & ba) && !(i & bb)) {
            const std::uint64_t j = (i ^ ba) | bb;
            const cplx u = amp[i];
            const cplx v = amp[j];
            amp[i] = c * u + is * v;
            amp[j] = is * u + c * v;
        }
    }
}

// exp(-i t XY/2) exp(+i t YX/2): identity on {|00>,|11>}, a real Givens
// rotation on the single-excitation pair.
void apply_rxy_minus_yx(Statevector& sv, std::uint32_t qa, std::uint32_t qb,
                        double theta) {
    auto amp = sv.amplitudes();
    const std::uint64_t ba = std::uint64_t{1} << qa;
    const std::uint64_t bb = std::uint64_t{1} << qb;
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    for (std::uint64_t i = 0; i < sv.size(); ++i) {
        if ((i & ba) && !(i & bb)) {
            const std::uint64_t j = (i ^ ba) | bb;
            const cplx u = amp[i]; // qa excited
            const cplx v = amp[j]; // qb excited
            amp[i] = c * u - s * v;
            amp[j] = s * u + c * v;
        }
    }
}

void apply_qaoa_problem(Statevector& sv, const Gate& gate, double gamma,
                        bool inverse) {
    auto amp = sv.amplitudes();
    const double g = inverse ? -gamma : gamma;
    for (std::uint64_t i = 0; i < sv.size(); ++i) {
        int zsum = 0;
        for (std::size_t e = 0; e + 1 < gate.qubits.size(); e += 2) {
            const bool sa = i & (std::uint64_t{1} << gate.qubits[e]);
            const bool sb = i & (std::uint64_t{1} << gate.qubits[e + 1]);
            zsum += (sa == sb) ? 1 : -1;
        }
        amp[i] *= std::exp(-kImag * (g * zsum));
    }
}

} // namespace

void apply_gate_inplace(Statevector& state, const Gate& gate,
                        std::span<const double> params, bool inverse) {
    for (const auto q : gate.qubits) {
        check_qubit(state, q);
    }
    double theta = resolve_angle(gate, params);
    if (inverse) {
        theta = -theta;
    }
    switch (gate.kind) {
    case GateKind::RY:
        apply_ry(state, gate.qubits[0], theta);
        return;
    case GateKind::RZ:
        apply_rz(state, gate.qubits[0], theta);
        return;
    case GateKind::CZ:
        apply_cz(state, gate.qubits[0], gate.qubits[1]);
        return;
    case GateKind::RZZ:
        apply_rzz(state, gate.qubits[0], gate.qubits[1], theta);
        return;
    case GateKind::RXXpYY:
        apply_rxx_plus_yy(state, gate.qubits[0], gate.qubits[1], theta);
        return;
    case GateKind::RXYmYX:
        apply_rxy_minus_yx(state, gate.qubits[0], gate.qubits[1], theta);
        return;
    case GateKind::QaoaProblemZZ:
        apply_qaoa_problem(state, gate, resolve_angle(gate, params),
                           inverse);
        return;
    case GateKind::QaoaMixerX:
        for (const auto q : gate.qubits) {
            apply_rx(state, q, 2 * theta);
        }
        return;
    }
    throw ContractError("unknown gate kind");
}

Statevector apply_gate(const Statevector& state, const Gate& gate,
                       std::span<const double> params) {
    Statevector out = state;
    apply_gate_inplace(out, gate, params);
    return out;
}

Statevector run(const Circuit& circuit, std::span<const double> params,
                std::uint64_t initial_basis) {
    if (params.size() != circuit.n_params) {
        throw ContractError("expected " + std::to_string(circuit.n_params) +
                            " params, got " + std::to_string(params.size()));
    }
    Statevector state(circuit.n_qubits, initial_basis);
    for (const auto& gate : circuit.gates) {
        apply_gate_inplace(state, gate, params);
    }
    return state;
}

void accumulate_pauli(const Statevector& in, const PauliString& p,
                      std::complex<double> coeff, Statevector& out) {
    const auto src = in.amplitudes();
    auto dst = out.amplitudes();
    const cplx c = coeff * pauli_y_phase(p);
    for (std::uint64_t b = 0; b < in.size(); ++b) {
        const double sign = (std::popcount(b & p.z_mask) & 1) ? -1.0 : 1.0;
        dst[b ^ p.x_mask] += c * sign * src[b];
    }
}

void apply_observable(const Statevector& in, const Observable& obs, Statevector& out) {
    if (obs.max_qubit() >= in.num_qubits()) {
        throw IndexError("observable acts on qubit beyond the state");
    }
    if (obs.is_diagonal()) {
        const auto& diag = obs.diagonal();
        const std::uint64_t mask = obs.diag_mask();
        const auto src = in.amplitudes();
        auto dst = out.amplitudes();
        for (std::uint64_t b = 0; b < in.size(); ++b) {
            dst[b] = diag[b & mask] * src[b];
        }
        return;
    }
    out.set_zero();
    for (const auto& term : obs.terms()) {
        accumulate_pauli(in, term.op, term.coeff, out);
    }
}

double expectation(const Statevector& state, const Observable& obs) {
    if (obs.max_qubit() >= state.num_qubits()) {
        throw IndexError("observable acts on qubit beyond the state");
    }
    const auto amp = state.amplitudes();
    if (obs.is_diagonal()) {
        const auto& diag = obs.diagonal();
        const std::uint64_t mask = obs.diag_mask();
        double total = 0.0;
        for (std::uint64_t b = 0; b < state.size(); ++b) {
            total += diag[b & mask] * std::norm(amp[b]);
        }
        return total;
    }
    cplx total{0.0, 0.0};
    for (const auto& term : obs.terms()) {
        const cplx phase = pauli_y_phase(term.op) * term.coeff;
        cplx acc{0.0, 0.0};
        for (std::uint64_t b = 0; b < state.size(); ++b) {
            const double sign = (std::popcount(b & term.op.z_mask) & 1) ? -1.0 : 1.0;
            acc += std::conj(amp[b ^ term.op.x_mask]) * sign * amp[b];
        }
        total += phase * acc;
    }
    return total.real();
}

double cost(const ProblemInstance& problem, std::span<const double> params,
            bool normalized) {
    const Statevector state = run(problem.circuit, params, problem.initial_state);
    const double raw = expectation(state, problem.observable);
    return normalized ? raw / problem.observable.l1_norm() : raw;
}

namespace {

// Generator G of a gate U(t) = exp(-i t G); dU/dt = -i G U. Appends G|in>
// into `out` (which the caller zeroed).
void accumulate_generator(const Statevector& in, const Gate& gate, Statevector& out) {
    const auto q = gate.qubits;
    switch (gate.kind) {
    case GateKind::RY:
        accumulate_pauli(in, PauliString::single(PauliAxis::Y, q[0]), 0.5, out);
        return;
    case GateKind::RZ:
        accumulate_pauli(in, PauliString::single(PauliAxis::Z, q[0]), 0.5, out);
        return;
    case GateKind::RZZ: {
        PauliString zz;
        zz.z_mask = (std::uint64_t{1} << q[0]) | (std::uint64_t{1} << q[1]);
        accumulate_pauli(in, zz, 0.5, out);
        return;
    }
    case GateKind::RXXpYY: {
        PauliString xx;
        xx.x_mask = (std::uint64_t{1} << q[0]) | (std::uint64_t{1} << q[1]);
        PauliString yy{xx.x_mask, xx.x_mask};
        accumulate_pauli(in, xx, 0.5, out);
        accumulate_pauli(in, yy, 0.5, out);
        return;
    }
    case GateKind::RXYmYX: {
        const std::uint64_t ba = std::uint64_t{1} << q[0];
        const std::uint64_t bb = std::uint64_t{1} << q[1];
        const PauliString xy{ba | bb, bb}; // X on qa, Y on qb
        const PauliString yx{ba | bb, ba}; // Y on qa, X on qb
        accumulate_pauli(in, xy, 0.5, out);
        accumulate_pauli(in, yx, -0.5, out);
        return;
    }
    case GateKind::QaoaProblemZZ:
        for (std::size_t e = 0; e + 1 < q.size(); e += 2) {
            PauliString zz;
            zz.z_mask = (std::uint64_t{1} << q[e]) | (std::uint64_t{1} << q[e + 1]);
            accumulate_pauli(in, zz, 1.0, out);
        }
        return;
    case GateKind::QaoaMixerX:
        for (const auto qubit : q) {
            accumulate_pauli(in, PauliString::single(PauliAxis::X, qubit), 1.0, out);
        }
        return;
    case GateKind::CZ:
        throw ContractError("CZ has no generator");
    }
}

} // namespace

std::vector<double> gradient_reverse(const ProblemInstance& problem,
                                     std::span<const double> params,
                                     bool normalized) {
    const Circuit& circuit = problem.circuit;
    std::vector<double> grad(circuit.n_params, 0.0);

    Statevector phi = run(circuit, params, problem.initial_state);
    Statevector lambda(circuit.n_qubits);
    apply_observable(phi, problem.observable, lambda);
    Statevector scratch(circuit.n_qubits);

    // Adjoint sweep: on entry for gate g, phi = U_g..U_1|psi0> and
    // lambda = U_{g+1}^..U_m^ O |psi_m>. The slot-k contribution is
    // 2 Im <lambda| G_g |phi>.
    for (auto it = circuit.gates.rbegin(); it != circuit.gates.rend(); ++it) {
        const Gate& gate = *it;
        if (gate.param_slot) {
            scratch.set_zero();
            accumulate_generator(phi, gate, scratch);
            grad[*gate.param_slot] += 2.0 * inner_product(lambda, scratch).imag();
        }
        apply_gate_inplace(phi, gate, params, /*inverse=*/true);
        apply_gate_inplace(lambda, gate, params, /*inverse=*/true);
    }

    if (normalized) {
        const double l1 = problem.observable.l1_norm();
        for (auto& g : grad) {
            g /= l1;
        }
    }
    return grad;
}

namespace {

// Primitive Pauli rotation exp(-i a P / 2) with a = scale * theta[slot] +
// offset. Every gate kind, fixed gates included, lowers to these, so the
// shift-rule path shares no kernel code with the main simulator.
struct ShiftPrim {
    PauliString pauli;
    std::int64_t slot = -1;
    double scale = 1.0;
    double offset = 0.0;
};

std::vector<ShiftPrim> decompose_for_shift(const Circuit& circuit) {
    std::vector<ShiftPrim> prims;
    auto slot_of = [](const Gate& g) -> std::int64_t {
        return g.param_slot ? static_cast<std::int64_t>(*g.param_slot) : -1;
    };
    for (const auto& gate : circuit.gates) {
        const auto& q = gate.qubits;
        const double fixed = gate.fixed_angle.value_or(0.0);
        switch (gate.kind) {
        case GateKind::RY:
            prims.push_back({PauliString::single(PauliAxis::Y, q[0]), slot_of(gate),
                             1.0, fixed});
            break;
        case GateKind::RZ:
            prims.push_back({PauliString::single(PauliAxis::Z, q[0]), slot_of(gate),
                             1.0, fixed});
            break;
        case GateKind::CZ: {
            // CZ = e^{i pi/4} RZ_a(-pi/2) RZ_b(-pi/2) RZZ(pi/2); the global
            // phase cancels in expectation values.
            prims.push_back({PauliString::single(PauliAxis::Z, q[0]), -1, 1.0,
                             -kPi / 2});
            prims.push_back({PauliString::single(PauliAxis::Z, q[1]), -1, 1.0,
                             -kPi / 2});
            PauliString zz;
            zz.z_mask = (std::uint64_t{1} << q[0]) | (std::uint64_t{1} << q[1]);
            prims.push_back({zz, -1, 1.0, kPi / 2});
            break;
        }
        case GateKind::RZZ: {
            PauliString zz;
            zz.z_mask = (std::uint64_t{1} << q[0]) | (std::uint64_t{1} << q[1]);
            prims.push_back({zz, slot_of(gate), 1.0, fixed});
            break;
        }
        case GateKind::RXXpYY: {
            PauliString xx;
            xx.x_mask = (std::uint64_t{1} << q[0]) | (std::uint64_t{1} << q[1]);
            const PauliString yy{xx.x_mask, xx.x_mask};
            prims.push_back({xx, slot_of(gate), 1.0, fixed});
            prims.push_back({yy, slot_of(gate), 1.0, fixed});
            break;
        }
        case GateKind::RXYmYX: {
            const std::uint64_t ba = std::uint64_t{1} << q[0];
            const std::uint64_t bb = std::uint64_t{1} << q[1];
            prims.push_back({PauliString{ba | bb, bb}, slot_of(gate), 1.0, fixed});
            prims.push_back({PauliString{ba | bb, ba}, slot_of(gate), -1.0, -fixed});
            break;
        }
        case GateKind::QaoaProblemZZ:
            // exp(-i g ZZ) per edge = primitive with angle 2g.
            for (std::size_t e = 0; e + 1 < q.size(); e += 2) {
                PauliString zz;
                zz.z_mask = (std::uint64_t{1} << q[e]) | (std::uint64_t{1} << q[e + 1]);
                prims.push_back({zz, slot_of(gate), 2.0, 2 * fixed});
            }
            break;
        case GateKind::QaoaMixerX:
            for (const auto qubit : q) {
                prims.push_back({PauliString::single(PauliAxis::X, qubit),
                                 slot_of(gate), 2.0, 2 * fixed});
            }
            break;
        }
    }
    return prims;
}

double shifted_cost(const std::vector<ShiftPrim>& prims, std::uint32_t n_qubits,
                    std::uint64_t initial, const Observable& obs,
                    std::span<const double> params, std::size_t target,
                    double delta) {
    Statevector state(n_qubits, initial);
    Statevector rotated(n_qubits);
    for (std::size_t i = 0; i < prims.size(); ++i) {
        const auto& p = prims[i];
        double angle = p.offset;
        if (p.slot >= 0) {
            angle += p.scale * params[static_cast<std::size_t>(p.slot)];
        }
        if (i == target) {
            angle += delta;
        }
        // exp(-i a P/2) |s> = cos(a/2)|s> - i sin(a/2) P|s>
        rotated.set_zero();
        accumulate_pauli(state, p.pauli, 1.0, rotated);
        const double c = std::cos(angle / 2);
        const double s = std::sin(angle / 2);
        auto amp = state.amplitudes();
        const auto rot = rotated.amplitudes();
        for (std::uint64_t b = 0; b < state.size(); ++b) {
            amp[b] = c * amp[b] - kImag * s * rot[b];
        }
    }
    return expectation(state, obs);
}

} // namespace

std::vector<double> gradient_shift(const ProblemInstance& problem,
                                   std::span<const double> params,
                                   bool normalized) {
    const Circuit& circuit = problem.circuit;
    if (params.size() != circuit.n_params) {
        throw ContractError("param length mismatch");
    }
    const auto prims = decompose_for_shift(circuit);
    std::vector<double> grad(circuit.n_params, 0.0);
    for (std::size_t i = 0; i < prims.size(); ++i) {
        if (prims[i].slot < 0) {
            continue;
        }
        const double plus = shifted_cost(prims, circuit.n_qubits,
                                         problem.initial_state, problem.observable,
                                         params, i, kPi / 2);
        const double minus = shifted_cost(prims, circuit.n_qubits,
                                          problem.initial_state, problem.observable,
                                          params, i, -kPi / 2);
        grad[static_cast<std::size_t>(prims[i].slot)] +=
            prims[i].scale * 0.5 * (plus - minus);
    }
    if (normalized) {
        const double l1 = problem.observable.l1_norm();
        for (auto& g : grad) {
            g /= l1;
        }
    }
    return grad;
}

std::vector<double> noisy_gradient(const ProblemInstance& problem,
                                   std::span<const double> params,
                                   const GradientNoise& noise,
                                   bool normalized) {
    if (noise.sigma < 0.0) {
        throw ContractError("noise sigma must be >= 0");
    }
    std::vector<double> grad = gradient_reverse(problem, params, normalized);
    if (noise.sigma == 0.0) {
        return grad;
    }
    Rng rng(noise.rng_seed);
    for (auto& g : grad) {
        g += rng.normal(0.0, noise.sigma);
    }
    return grad;
}

} // namespace flip
