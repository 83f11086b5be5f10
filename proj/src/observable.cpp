#include "flip/observable.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace flip {

std::uint32_t PauliString::max_qubit() const {
    const std::uint64_t m = x_mask | z_mask;
    if (m == 0) {
        return 0;
    }
    return 63u - static_cast<std::uint32_t>(__builtin_clzll(m));
}

PauliString PauliString::single(PauliAxis axis, std::uint32_t qubit) {
    if (qubit >= 64) {
        throw IndexError("pauli qubit out of range");
    }
    const std::uint64_t bit = std::uint64_t{1} << qubit;
    switch (axis) {
    case PauliAxis::X: return {bit, 0};
    case PauliAxis::Y: return {bit, bit};
    case PauliAxis::Z: return {0, bit};
    }
    throw ContractError("unknown pauli axis");
}

PauliString PauliString::from_axes(const std::map<std::uint32_t, PauliAxis>& axes) {
    PauliString p;
    for (const auto& [qubit, axis] : axes) {
        const PauliString s = single(axis, qubit);
        p.x_mask |= s.x_mask;
        p.z_mask |= s.z_mask;
    }
    return p;
}

std::map<std::uint32_t, PauliAxis> PauliString::axes() const {
    std::map<std::uint32_t, PauliAxis> out;
    for (std::uint32_t q = 0; q < 64; ++q) {
        const std::uint64_t bit = std::uint64_t{1} << q;
        const bool x = x_mask & bit;
        const bool z = z_mask & bit;
        if (x && z) {
            out[q] = PauliAxis::Y;
        } else if (x) {
            out[q] = PauliAxis::X;
        } else if (z) {
            out[q] = PauliAxis::Z;
        }
    }
    return out;
}

Observable::Observable(std::vector<PauliTerm> terms) {
    std::map<PauliString, double> merged;
    for (const auto& t : terms) {
        merged[t.op] += t.coeff;
    }
    terms_.reserve(merged.size());
    for (const auto& [op, coeff] : merged) {
        if (std::abs(coeff) < 1e-14) {
            continue;
        }
        terms_.push_back({coeff, op});
        l1_norm_ += std::abs(coeff);
        max_qubit_ = std::max(max_qubit_, op.max_qubit());
        diagonal_ = diagonal_ && op.is_diagonal();
    }
    if (terms_.empty() || l1_norm_ <= 0.0) {
        throw ContractError("observable must have at least one nonzero term");
    }
    if (diagonal_) {
        // scatter coefficients by z-mask, then diag[b] =
        // sum_m c_m (-1)^{popcount(b & m)} via the Walsh-Hadamard butterfly
        const std::uint64_t dim = std::uint64_t{1} << (max_qubit_ + 1);
        diag_.assign(dim, 0.0);
        for (const auto& t : terms_) {
            diag_[t.op.z_mask] += t.coeff;
        }
        for (std::uint64_t half = 1; half < dim; half <<= 1) {
            for (std::uint64_t base = 0; base < dim; base += half << 1) {
                for (std::uint64_t off = 0; off < half; ++off) {
                    const double lo = diag_[base + off];
                    const double hi = diag_[base + off + half];
                    diag_[base + off] = lo + hi;
                    diag_[base + off + half] = lo - hi;
                }
            }
        }
    }
}

} // namespace flip
