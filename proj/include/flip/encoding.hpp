#pragma once

#include <cstdint>
#include <vector>

#include "flip/problem.hpp"

namespace flip {

// Fixed per-family widths of the parameter encodings.
constexpr std::size_t encoding_width(Family family) {
    switch (family) {
    case Family::StatePrep: return 5;
    case Family::MaxCut: return 3;
    case Family::Fhm: return 13;
    }
    return 0;
}

constexpr double kDefaultDivisor = 10.0;

using EncodingVector = std::vector<double>;

// K rows of the family width; row k describes parameter slot k.
struct EncodingMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    double* row(std::size_t r) { return data.data() + r * cols; }
    const double* row(std::size_t r) const { return data.data() + r * cols; }
};

// Entries in slot order: 1-based qubit and layer indices, d, n, p, each
// divided by the divisor. Slot k sits on qubit k mod n of layer k div n.
EncodingVector encode_state_prep(const StatePrepSpec& spec, std::uint32_t slot,
                                 double divisor = kDefaultDivisor);

// [1-based layer / divisor, d / divisor, mixer flag]; slot 2l is the problem
// angle of layer l+1, slot 2l+1 the mixer angle. The flag stays undivided.
EncodingVector encode_qaoa(const MaxCutSpec& spec, std::uint32_t slot,
                           double divisor = kDefaultDivisor);

// [1-based first qubit / divisor, 1-based layer / divisor, one-hot(8) gate
// type, d / divisor, n / divisor, U / divisor]. The one-hot block stays
// undivided. Gate types follow the LDCA table: RZ on |0>, RZ on |1>, then
// XX/YY, ZZ, XY/YX each split into even and odd brickwork.
EncodingVector encode_ldca(const FhmSpec& spec, std::uint32_t slot,
                           double divisor = kDefaultDivisor);

EncodingMatrix encode_problem(const ProblemInstance& problem,
                              double divisor = kDefaultDivisor);

} // namespace flip
