#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "flip/errors.hpp"

namespace flip {

// Dense 2^n statevector, little-endian: qubit 0 is the least significant bit
// of the amplitude index. Immutable through the public simulator API; the
// in-place kernels in the simulator mutate private working copies only.
class Statevector {
public:
    explicit Statevector(std::uint32_t n_qubits, std::uint64_t basis_state = 0);

    std::uint32_t num_qubits() const { return n_; }
    std::uint64_t size() const { return std::uint64_t{1} << n_; }

    std::span<const std::complex<double>> amplitudes() const { return amp_; }
    std::span<std::complex<double>> amplitudes() { return amp_; }

    std::complex<double> operator[](std::uint64_t i) const { return amp_[i]; }

    double norm() const;

    void set_zero();
    void set_basis(std::uint64_t basis_state);

private:
    std::uint32_t n_;
    std::vector<std::complex<double>> amp_;
};

std::complex<double> inner_product(const Statevector& bra, const Statevector& ket);

} // namespace flip
