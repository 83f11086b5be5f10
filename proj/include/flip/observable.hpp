#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <vector>

#include "flip/errors.hpp"

namespace flip {

enum class PauliAxis : std::uint8_t { X, Y, Z };

// Pauli string in symplectic form: qubit q carries X iff x_mask bit q is set
// and z_mask bit clear, Z iff z_mask only, Y iff both. Action on a basis
// state |b> is  i^{n_Y} (-1)^{popcount(b & z_mask)} |b ^ x_mask>.
struct PauliString {
    std::uint64_t x_mask = 0;
    std::uint64_t z_mask = 0;

    bool operator==(const PauliString&) const = default;
    bool operator<(const PauliString& o) const {
        return x_mask != o.x_mask ? x_mask < o.x_mask : z_mask < o.z_mask;
    }

    bool is_identity() const { return x_mask == 0 && z_mask == 0; }
    bool is_diagonal() const { return x_mask == 0; }
    int num_y() const { return __builtin_popcountll(x_mask & z_mask); }
    std::uint32_t max_qubit() const;

    static PauliString single(PauliAxis axis, std::uint32_t qubit);
    // Convenience for the map-of-qubits surface form.
    static PauliString from_axes(const std::map<std::uint32_t, PauliAxis>& axes);
    std::map<std::uint32_t, PauliAxis> axes() const;
};

struct PauliTerm {
    double coeff = 0.0;
    PauliString op;
};

// Weighted sum of Pauli strings with its l1 norm cached at construction.
// Terms with equal strings are merged; an observable that collapses to
// nothing (or to exactly zero weight) is rejected.
//
// Fully diagonal observables (Z/I strings only, e.g. max-cut operators and
// basis-state projectors) additionally cache their diagonal over the touched
// qubits, computed by a Walsh-Hadamard butterfly in O(n 2^n) instead of
// summing 2^n terms per evaluation. Entries for wider registers repeat with
// period 2^(max_qubit+1), so lookups tile through diag_mask().
class Observable {
public:
    explicit Observable(std::vector<PauliTerm> terms);

    const std::vector<PauliTerm>& terms() const { return terms_; }
    double l1_norm() const { return l1_norm_; }
    std::uint32_t max_qubit() const { return max_qubit_; }
    bool is_diagonal() const { return diagonal_; }

    const std::vector<double>& diagonal() const { return diag_; }
    std::uint64_t diag_mask() const { return diag_.size() - 1; }

private:
    std::vector<PauliTerm> terms_;
    double l1_norm_ = 0.0;
    std::uint32_t max_qubit_ = 0;
    bool diagonal_ = true;
    std::vector<double> diag_;
};

// Phase factor i^{n_Y} of a Pauli string.
inline std::complex<double> pauli_y_phase(const PauliString& p) {
    static const std::complex<double> table[4] = {
        {1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}};
    return table[p.num_y() & 3];
}

} // namespace flip
