#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "flip/observable.hpp"

namespace flip {

// Eigenvalues of a dense real symmetric matrix (row-major, n x n), ascending.
// Householder tridiagonalization followed by implicit-shift QL.
std::vector<double> symmetric_eigenvalues(std::vector<double> a, std::size_t n);

// Computational-basis bitmasks spanning the Hamming-weight sector, ascending.
std::vector<std::uint64_t> sector_basis(std::uint32_t n_qubits,
                                        std::optional<std::uint32_t> hamming_weight);

// Dense matrix of an observable restricted to a basis list. Complex Hermitian
// matrices are handled through the real [Re, -Im; Im, Re] embedding by the
// spectrum helpers below.
struct SectorMatrix {
    std::size_t dim = 0;
    bool is_real = true;
    std::vector<double> real;
    std::vector<double> imag; // empty when is_real
};

SectorMatrix observable_matrix(const Observable& obs,
                               const std::vector<std::uint64_t>& basis);

// Full spectrum of an observable on a sector, ascending. Dense path; the
// caller is responsible for keeping dimensions reasonable.
std::vector<double> observable_spectrum(const Observable& obs, std::uint32_t n_qubits,
                                        std::optional<std::uint32_t> sector = {});

} // namespace flip
