#include "flip/linalg.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <unordered_map>

namespace flip {

namespace {

// Householder reduction of a symmetric matrix to tridiagonal form,
// eigenvalue-only variant (no eigenvector accumulation).
void tridiagonalize(std::vector<double>& a, std::size_t n, std::vector<double>& d,
                    std::vector<double>& e) {
    auto at = [&](std::size_t r, std::size_t c) -> double& { return a[r * n + c]; };
    for (std::size_t i = n - 1; i >= 1; --i) {
        const std::size_t l = i - 1;
        double h = 0.0;
        double scale = 0.0;
        if (l > 0) {
            for (std::size_t k = 0; k <= l; ++k) {
                scale += std::abs(at(i, k));
            }
            if (scale == 0.0) {
                e[i] = at(i, l);
            } else {
                for (std::size_t k = 0; k <= l; ++k) {
                    at(i, k) /= scale;
                    h += at(i, k) * at(i, k);
                }
                double f = at(i, l);
                double g = f >= 0.0 ? -std::sqrt(h) : std::sqrt(h);
                e[i] = scale * g;
                h -= f * g;
                at(i, l) = f - g;
                f = 0.0;
                for (std::size_t j = 0; j <= l; ++j) {
                    g = 0.0;
                    for (std::size_t k = 0; k <= j; ++k) {
                        g += at(j, k) * at(i, k);
                    }
                    for (std::size_t k = j + 1; k <= l; ++k) {
                        g += at(k, j) * at(i, k);
                    }
                    e[j] = g / h;
                    f += e[j] * at(i, j);
                }
                const double hh = f / (h + h);
                for (std::size_t j = 0; j <= l; ++j) {
                    f = at(i, j);
                    e[j] = g = e[j] - hh * f;
                    for (std::size_t k = 0; k <= j; ++k) {
                        at(j, k) -= f * e[k] + g * at(i, k);
                    }
                }
            }
        } else {
            e[i] = at(i, l);
        }
        d[i] = h;
    }
    e[0] = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        d[i] = at(i, i);
    }
}

// Implicit-shift QL on a tridiagonal matrix; d holds the eigenvalues on exit.
void tql_eigenvalues(std::vector<double>& d, std::vector<double>& e, std::size_t n) {
    for (std::size_t i = 1; i < n; ++i) {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
        std::size_t iter = 0;
        std::size_t m;
        do {
            for (m = l; m + 1 < n; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= 1e-15 * dd) {
                    break;
                }
            }
            if (m != l) {
                if (iter++ == 60) {
                    throw Error("eigenvalue iteration failed to converge");
                }
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + (g >= 0.0 ? std::abs(r) : -std::abs(r)));
                double s = 1.0;
                double c = 1.0;
                double p = 0.0;
                bool underflow = false;
                for (std::size_t i = m; i-- > l;) {
                    double f = s * e[i];
                    const double b = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        underflow = true;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                }
                if (underflow) {
                    continue;
                }
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
}

} // namespace

std::vector<double> symmetric_eigenvalues(std::vector<double> a, std::size_t n) {
    if (n == 0 || a.size() != n * n) {
        throw ContractError("symmetric_eigenvalues: bad dimensions");
    }
    std::vector<double> d(n, 0.0);
    if (n == 1) {
        return {a[0]};
    }
    std::vector<double> e(n, 0.0);
    tridiagonalize(a, n, d, e);
    tql_eigenvalues(d, e, n);
    std::sort(d.begin(), d.end());
    return d;
}

std::vector<std::uint64_t> sector_basis(std::uint32_t n_qubits,
                                        std::optional<std::uint32_t> hamming_weight) {
    std::vector<std::uint64_t> basis;
    const std::uint64_t dim = std::uint64_t{1} << n_qubits;
    for (std::uint64_t b = 0; b < dim; ++b) {
        if (!hamming_weight ||
            static_cast<std::uint32_t>(std::popcount(b)) == *hamming_weight) {
            basis.push_back(b);
        }
    }
    return basis;
}

SectorMatrix observable_matrix(const Observable& obs,
                               const std::vector<std::uint64_t>& basis) {
    SectorMatrix m;
    m.dim = basis.size();
    m.real.assign(m.dim * m.dim, 0.0);
    std::unordered_map<std::uint64_t, std::size_t> index;
    index.reserve(basis.size());
    for (std::size_t i = 0; i < basis.size(); ++i) {
        index.emplace(basis[i], i);
    }
    for (const auto& term : obs.terms()) {
        if (term.op.num_y() % 2 == 1 && m.is_real) {
            m.is_real = false;
            m.imag.assign(m.dim * m.dim, 0.0);
        }
    }
    for (const auto& term : obs.terms()) {
        const std::complex<double> phase = pauli_y_phase(term.op) * term.coeff;
        for (std::size_t col = 0; col < basis.size(); ++col) {
            const std::uint64_t b = basis[col];
            const auto it = index.find(b ^ term.op.x_mask);
            if (it == index.end()) {
                continue; // leaves the sector; irrelevant for sector spectra
            }
            const double sign = (std::popcount(b & term.op.z_mask) & 1) ? -1.0 : 1.0;
            const std::complex<double> v = phase * sign;
            m.real[it->second * m.dim + col] += v.real();
            if (!m.is_real) {
                m.imag[it->second * m.dim + col] += v.imag();
            }
        }
    }
    return m;
}

std::vector<double> observable_spectrum(const Observable& obs, std::uint32_t n_qubits,
                                        std::optional<std::uint32_t> sector) {
    if (obs.max_qubit() >= n_qubits) {
        throw IndexError("observable acts beyond n_qubits");
    }
    const auto basis = sector_basis(n_qubits, sector);
    if (basis.size() > 4096) {
        throw CapacityError("dense spectrum limited to dimension 4096");
    }
    const SectorMatrix m = observable_matrix(obs, basis);
    if (m.is_real) {
        return symmetric_eigenvalues(m.real, m.dim);
    }
    // Hermitian H -> symmetric [Re, -Im; Im, Re]; every eigenvalue doubles.
    const std::size_t n2 = 2 * m.dim;
    std::vector<double> embed(n2 * n2, 0.0);
    for (std::size_t r = 0; r < m.dim; ++r) {
        for (std::size_t c = 0; c < m.dim; ++c) {
            const double re = m.real[r * m.dim + c];
            const double im = m.imag[r * m.dim + c];
            embed[r * n2 + c] = re;
            embed[(r + m.dim) * n2 + (c + m.dim)] = re;
            embed[r * n2 + (c + m.dim)] = -im;
            embed[(r + m.dim) * n2 + c] = im;
        }
    }
    auto evals = symmetric_eigenvalues(std::move(embed), n2);
    std::vector<double> out;
    out.reserve(m.dim);
    for (std::size_t i = 0; i < evals.size(); i += 2) {
        out.push_back(evals[i]);
    }
    return out;
}

} // namespace flip
