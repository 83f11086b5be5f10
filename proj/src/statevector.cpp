#include "flip/statevector.hpp"

#include <cmath>

namespace flip {

Statevector::Statevector(std::uint32_t n_qubits, std::uint64_t basis_state)
    : n_(n_qubits), amp_(std::uint64_t{1} << n_qubits) {
    if (n_qubits == 0 || n_qubits > 24) {
        throw CapacityError("statevector supports 1..24 qubits, got " +
                            std::to_string(n_qubits));
    }
    set_basis(basis_state);
}

double Statevector::norm() const {
    double s = 0.0;
    for (const auto& a : amp_) {
        s += std::norm(a);
    }
    return std::sqrt(s);
}

void Statevector::set_zero() {
    std::fill(amp_.begin(), amp_.end(), std::complex<double>{0.0, 0.0});
}

void Statevector::set_basis(std::uint64_t basis_state) {
    if (basis_state >= size()) {
        throw IndexError("basis state out of range");
    }
    set_zero();
    amp_[basis_state] = {1.0, 0.0};
}

std::complex<double> inner_product(const Statevector& bra, const Statevector& ket) {
    if (bra.size() != ket.size()) {
        throw ContractError("inner_product: dimension mismatch");
    }
    std::complex<double> s{0.0, 0.0};
    const auto a = bra.amplitudes();
    const auto b = ket.amplitudes();
    for (std::uint64_t i = 0; i < a.size(); ++i) {
        s += std::conj(a[i]) * b[i];
    }
    return s;
}

} // namespace flip
