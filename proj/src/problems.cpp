#include "flip/problems.hpp"

#include <bit>
#include <cmath>
#include <string>

namespace flip {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr std::uint32_t kMaxQubits = 20;

void check_capacity(std::uint32_t n_qubits) {
    if (n_qubits == 0 || n_qubits > kMaxQubits) {
        throw CapacityError("problem needs " + std::to_string(n_qubits) +
                            " qubits, supported range is 1.." +
                            std::to_string(kMaxQubits));
    }
}

} // namespace

std::string family_name(Family family) {
    switch (family) {
    case Family::StatePrep: return "state_prep";
    case Family::MaxCut: return "maxcut";
    case Family::Fhm: return "fhm";
    }
    throw ContractError("unknown family");
}

Family family_from_name(const std::string& name) {
    if (name == "state_prep") return Family::StatePrep;
    if (name == "maxcut") return Family::MaxCut;
    if (name == "fhm") return Family::Fhm;
    throw ConfigError("unknown family '" + name + "'");
}

void DistributionConfig::validate() const {
    auto check_int = [](const IntRange& r, const char* what) {
        if (r.lo == 0 || r.lo > r.hi) {
            throw ConfigError(std::string("invalid range for ") + what);
        }
    };
    auto check_real = [](const RealRange& r, const char* what) {
        if (!(r.lo <= r.hi)) {
            throw ConfigError(std::string("invalid range for ") + what);
        }
    };
    check_int(d, "d");
    switch (family) {
    case Family::StatePrep:
        check_int(n, "n");
        if (n.hi > kMaxQubits) throw ConfigError("n exceeds simulator capacity");
        break;
    case Family::MaxCut:
        check_int(n, "n");
        if (n.hi > kMaxQubits) throw ConfigError("n exceeds simulator capacity");
        if (n.lo < 2) throw ConfigError("max-cut needs at least 2 nodes");
        check_real(edge_prob, "edge_prob");
        if (edge_prob.lo < 0.0 || edge_prob.hi > 1.0) {
            throw ConfigError("edge_prob must lie in [0, 1]");
        }
        break;
    case Family::Fhm:
        check_int(L, "L");
        if (2 * L.hi > kMaxQubits) throw ConfigError("L exceeds simulator capacity");
        check_real(U, "U");
        break;
    }
}

ProblemInstance build_state_prep(const StatePrepSpec& spec) {
    check_capacity(spec.n);
    if (spec.d == 0) {
        throw ContractError("state prep needs d >= 1");
    }
    if (spec.p < 1 || spec.p > spec.n) {
        throw ContractError("target position p must lie in [1, n]");
    }

    Circuit circuit;
    circuit.n_qubits = spec.n;
    circuit.n_layers = spec.d;
    circuit.n_params = spec.n * spec.d;
    circuit.slots.resize(circuit.n_params);
    for (std::uint32_t layer = 0; layer < spec.d; ++layer) {
        for (std::uint32_t q = 0; q < spec.n; ++q) {
            const std::uint32_t slot = layer * spec.n + q;
            circuit.gates.push_back({GateKind::RY, {q}, slot, std::nullopt});
            circuit.slots[slot] = {q, layer, 0};
        }
        if (spec.n == 2) {
            circuit.gates.push_back({GateKind::CZ, {0, 1}, std::nullopt, std::nullopt});
        } else if (spec.n > 2) {
            for (std::uint32_t q = 0; q + 1 < spec.n; ++q) {
                circuit.gates.push_back(
                    {GateKind::CZ, {q, q + 1}, std::nullopt, std::nullopt});
            }
            circuit.gates.push_back(
                {GateKind::CZ, {spec.n - 1, 0}, std::nullopt, std::nullopt});
        }
    }
    circuit.validate();

    // -|t><t| = -(1/2^n) prod_q (I + (-1)^{t_q} Z_q), expanded over all
    // Z-string subsets.
    const std::uint64_t target = std::uint64_t{1} << (spec.p - 1);
    const std::uint64_t dim = std::uint64_t{1} << spec.n;
    const double unit = 1.0 / static_cast<double>(dim);
    std::vector<PauliTerm> terms;
    terms.reserve(dim);
    for (std::uint64_t mask = 0; mask < dim; ++mask) {
        const double sign = (std::popcount(mask & target) & 1) ? 1.0 : -1.0;
        terms.push_back({sign * unit, PauliString{0, mask}});
    }

    ProblemInstance problem{Family::StatePrep, std::move(circuit),
                            Observable(std::move(terms)), 0, spec, -1.0};
    return problem;
}

Graph sample_erdos_renyi(std::uint32_t n_nodes, double edge_prob, Rng& rng,
                         bool allow_empty) {
    if (edge_prob < 0.0 || edge_prob > 1.0) {
        throw ContractError("edge probability must lie in [0, 1]");
    }
    if (n_nodes < 2) {
        throw ContractError("graph needs at least 2 nodes");
    }
    Graph graph;
    graph.n_nodes = n_nodes;
    for (int attempt = 0; attempt < 100000; ++attempt) {
        graph.edges.clear();
        for (std::uint32_t i = 0; i < n_nodes; ++i) {
            for (std::uint32_t j = i + 1; j < n_nodes; ++j) {
                if (rng.uniform() < edge_prob) {
                    graph.edges.emplace_back(i, j);
                }
            }
        }
        if (!graph.edges.empty() || allow_empty) {
            return graph;
        }
        if (edge_prob == 0.0) {
            break;
        }
    }
    throw ContractError("could not sample a nonempty graph");
}

ProblemInstance build_maxcut(const MaxCutSpec& spec) {
    const Graph& graph = spec.graph;
    check_capacity(graph.n_nodes);
    if (graph.edges.empty()) {
        throw ContractError("max-cut needs a nonempty edge list");
    }
    if (spec.d == 0) {
        throw ContractError("QAOA needs d >= 1");
    }
    std::vector<PauliTerm> terms;
    terms.reserve(graph.edges.size());
    for (const auto& [i, j] : graph.edges) {
        if (i == j || i >= graph.n_nodes || j >= graph.n_nodes) {
            throw ContractError("invalid edge in graph");
        }
        PauliString zz;
        zz.z_mask = (std::uint64_t{1} << i) | (std::uint64_t{1} << j);
        terms.push_back({1.0, zz});
    }
    Observable obs(std::move(terms));

    Circuit circuit;
    circuit.n_qubits = graph.n_nodes;
    circuit.n_layers = spec.d;
    circuit.n_params = 2 * spec.d;
    circuit.slots.resize(circuit.n_params);
    // |+>^n via a fixed RY(pi/2) layer keeps the gate set minimal.
    for (std::uint32_t q = 0; q < graph.n_nodes; ++q) {
        circuit.gates.push_back({GateKind::RY, {q}, std::nullopt, kPi / 2});
    }
    std::vector<std::uint32_t> edge_qubits;
    for (const auto& [i, j] : graph.edges) {
        edge_qubits.push_back(i);
        edge_qubits.push_back(j);
    }
    std::vector<std::uint32_t> all_qubits(graph.n_nodes);
    for (std::uint32_t q = 0; q < graph.n_nodes; ++q) {
        all_qubits[q] = q;
    }
    for (std::uint32_t l = 0; l < spec.d; ++l) {
        circuit.gates.push_back(
            {GateKind::QaoaProblemZZ, edge_qubits, 2 * l, std::nullopt});
        circuit.gates.push_back(
            {GateKind::QaoaMixerX, all_qubits, 2 * l + 1, std::nullopt});
        circuit.slots[2 * l] = {0, l, 0};
        circuit.slots[2 * l + 1] = {0, l, 1};
    }
    circuit.validate();

    const double raw_min = exact_min(obs, graph.n_nodes);
    const double l1 = obs.l1_norm();
    ProblemInstance problem{Family::MaxCut, std::move(circuit), std::move(obs),
                            0, spec, raw_min / l1};
    return problem;
}

Observable jordan_wigner(const FhmSpec& spec) {
    if (spec.L < 1) {
        throw ContractError("FHM needs L >= 1");
    }
    const double t = spec.t();
    const double U = spec.U;
    const double mu = spec.mu();
    std::vector<PauliTerm> terms;

    // Hopping: -t (a+_{j+1,s} a_{j,s} + h.c.) -> -(t/2)(X Z X + Y Z Y) on
    // qubits (p, p+1, p+2) with p = 2j + s.
    for (std::uint32_t sigma = 0; sigma < 2; ++sigma) {
        for (std::uint32_t j = 0; j + 1 < spec.L; ++j) {
            const std::uint32_t p = 2 * j + sigma;
            const std::uint64_t bp = std::uint64_t{1} << p;
            const std::uint64_t bm = std::uint64_t{1} << (p + 1);
            const std::uint64_t bq = std::uint64_t{1} << (p + 2);
            terms.push_back({-t / 2, PauliString{bp | bq, bm}});
            terms.push_back({-t / 2, PauliString{bp | bq, bp | bm | bq}});
        }
    }
    // On-site interaction: U n_up n_dn = (U/4)(I - Z_a - Z_b + Z_a Z_b).
    for (std::uint32_t j = 0; j < spec.L; ++j) {
        const std::uint64_t ba = std::uint64_t{1} << (2 * j);
        const std::uint64_t bb = std::uint64_t{1} << (2 * j + 1);
        terms.push_back({U / 4, PauliString{0, 0}});
        terms.push_back({-U / 4, PauliString{0, ba}});
        terms.push_back({-U / 4, PauliString{0, bb}});
        terms.push_back({U / 4, PauliString{0, ba | bb}});
    }
    // Chemical potential: -mu n = -(mu/2)(I - Z) per spin orbital.
    for (std::uint32_t q = 0; q < 2 * spec.L; ++q) {
        terms.push_back({-mu / 2, PauliString{0, 0}});
        terms.push_back({mu / 2, PauliString{0, std::uint64_t{1} << q}});
    }
    return Observable(std::move(terms));
}

std::uint64_t fhm_initial_state(std::uint32_t L) {
    std::uint64_t state = 0;
    std::uint32_t placed = 0;
    std::uint32_t site = 0;
    while (placed < L) {
        if (L - placed >= 2) {
            state |= std::uint64_t{3} << (2 * site);
            placed += 2;
        } else {
            state |= std::uint64_t{1} << (2 * site);
            placed += 1;
        }
        site += 2;
    }
    return state;
}

Circuit ldca_circuit(std::uint32_t L, std::uint32_t d) {
    if (L < 1 || d < 1) {
        throw ContractError("LDCA needs L >= 1 and d >= 1");
    }
    const std::uint32_t n = 2 * L;
    check_capacity(n);
    const std::uint64_t initial = fhm_initial_state(L);

    Circuit circuit;
    circuit.n_qubits = n;
    circuit.n_layers = d;
    circuit.n_params = n + 3 * d * (n - 1);
    circuit.slots.resize(circuit.n_params);

    std::uint32_t slot = 0;
    for (std::uint32_t q = 0; q < n; ++q) {
        const bool occupied = initial & (std::uint64_t{1} << q);
        circuit.gates.push_back({GateKind::RZ, {q}, slot, std::nullopt});
        circuit.slots[slot] = {q, 0, occupied ? 2u : 1u};
        ++slot;
    }
    for (std::uint32_t sub = 0; sub < d; ++sub) {
        for (std::uint32_t parity = 0; parity < 2; ++parity) {
            for (std::uint32_t q = parity; q + 1 < n; q += 2) {
                // gate-type ids: XX/YY, ZZ, XY/YX, each split into even
                // (parity 0) and odd brickwork variants
                const GateKind kinds[3] = {GateKind::RXXpYY, GateKind::RZZ,
                                           GateKind::RXYmYX};
                const std::uint32_t types[3] = {3 + parity, 5 + parity, 7 + parity};
                for (int k = 0; k < 3; ++k) {
                    circuit.gates.push_back({kinds[k], {q, q + 1}, slot, std::nullopt});
                    circuit.slots[slot] = {q, sub, types[k]};
                    ++slot;
                }
            }
        }
    }
    if (slot != circuit.n_params) {
        throw Error("LDCA slot count mismatch");
    }
    circuit.validate();
    return circuit;
}

ProblemInstance build_fhm(const FhmSpec& spec) {
    if (spec.L > 10) {
        throw CapacityError("FHM supports L <= 10 (n = 2L <= 20 qubits)");
    }
    Observable obs = jordan_wigner(spec);
    Circuit circuit = ldca_circuit(spec.L, spec.d);
    const std::uint64_t initial = fhm_initial_state(spec.L);

    std::optional<double> c_min;
    if (spec.L <= 5) {
        const double raw =
            exact_min(obs, 2 * spec.L, static_cast<std::uint32_t>(spec.L));
        c_min = raw / obs.l1_norm();
    }
    ProblemInstance problem{Family::Fhm, std::move(circuit), std::move(obs),
                            initial, spec, c_min};
    return problem;
}

ProblemInstance sample_problem(const DistributionConfig& cfg, Rng& rng) {
    cfg.validate();
    switch (cfg.family) {
    case Family::StatePrep: {
        StatePrepSpec spec;
        spec.n = static_cast<std::uint32_t>(rng.uniform_int(cfg.n.lo, cfg.n.hi));
        spec.d = static_cast<std::uint32_t>(rng.uniform_int(cfg.d.lo, cfg.d.hi));
        spec.p = static_cast<std::uint32_t>(rng.uniform_int(1, spec.n));
        return build_state_prep(spec);
    }
    case Family::MaxCut: {
        MaxCutSpec spec;
        const auto n = static_cast<std::uint32_t>(rng.uniform_int(cfg.n.lo, cfg.n.hi));
        spec.d = static_cast<std::uint32_t>(rng.uniform_int(cfg.d.lo, cfg.d.hi));
        spec.edge_prob = rng.uniform(cfg.edge_prob.lo, cfg.edge_prob.hi);
        spec.graph = sample_erdos_renyi(n, spec.edge_prob, rng);
        return build_maxcut(spec);
    }
    case Family::Fhm: {
        FhmSpec spec;
        spec.L = static_cast<std::uint32_t>(rng.uniform_int(cfg.L.lo, cfg.L.hi));
        spec.d = static_cast<std::uint32_t>(rng.uniform_int(cfg.d.lo, cfg.d.hi));
        spec.U = rng.uniform(cfg.U.lo, cfg.U.hi);
        return build_fhm(spec);
    }
    }
    throw ContractError("unknown family");
}

double exact_min(const Observable& obs, std::uint32_t n_qubits,
                 std::optional<std::uint32_t> sector) {
    if (obs.max_qubit() >= n_qubits) {
        throw IndexError("observable acts beyond n_qubits");
    }
    if (n_qubits > kMaxQubits) {
        throw CapacityError("exact_min supports up to 20 qubits");
    }
    if (obs.is_diagonal()) {
        const auto& diag = obs.diagonal();
        const std::uint64_t mask = obs.diag_mask();
        double best = 0.0;
        bool first = true;
        const std::uint64_t dim = std::uint64_t{1} << n_qubits;
        for (std::uint64_t b = 0; b < dim; ++b) {
            if (sector &&
                static_cast<std::uint32_t>(std::popcount(b)) != *sector) {
                continue;
            }
            const double v = diag[b & mask];
            if (first || v < best) {
                best = v;
                first = false;
            }
        }
        if (first) {
            throw ContractError("empty sector");
        }
        return best;
    }
    const auto spectrum = observable_spectrum(obs, n_qubits, sector);
    return spectrum.front();
}

} // namespace flip
