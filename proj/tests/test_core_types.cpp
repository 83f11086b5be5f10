#include <doctest.h>

#include "flip/bench.hpp"
#include "flip/circuit.hpp"
#include "flip/observable.hpp"
#include "flip/rng.hpp"
#include "flip/statevector.hpp"

using namespace flip;

TEST_CASE("statevector construction") {
    CHECK_THROWS_AS(Statevector(0), CapacityError);
    CHECK_THROWS_AS(Statevector(25), CapacityError);
    CHECK_THROWS_AS(Statevector(2, 4), IndexError);
    const Statevector s(3, 5);
    CHECK(s[5].real() == doctest::Approx(1.0));
    CHECK(s.norm() == doctest::Approx(1.0));
}

TEST_CASE("pauli string axes round trip") {
    const std::map<std::uint32_t, PauliAxis> axes{
        {0, PauliAxis::X}, {2, PauliAxis::Y}, {5, PauliAxis::Z}};
    const auto p = PauliString::from_axes(axes);
    CHECK(p.axes() == axes);
    CHECK(p.num_y() == 1);
    CHECK(p.max_qubit() == 5);
    CHECK(!p.is_diagonal());
    CHECK(PauliString{}.is_identity());
    CHECK(PauliString{}.max_qubit() == 0);
}

TEST_CASE("observable merges duplicate strings") {
    const Observable obs({{0.5, PauliString{0, 1}},
                          {0.25, PauliString{0, 1}},
                          {-1.0, PauliString{0, 2}}});
    CHECK(obs.terms().size() == 2);
    CHECK(obs.l1_norm() == doctest::Approx(1.75));
    CHECK(obs.is_diagonal());
}

TEST_CASE("cached diagonal equals the direct term sum") {
    Rng rng(314);
    for (int trial = 0; trial < 50; ++trial) {
        const auto n = static_cast<std::uint32_t>(rng.uniform_int(1, 6));
        std::vector<PauliTerm> terms;
        const int n_terms = static_cast<int>(rng.uniform_int(1, 8));
        for (int t = 0; t < n_terms; ++t) {
            PauliString p;
            p.z_mask = static_cast<std::uint64_t>(
                rng.uniform_int(0, (std::int64_t{1} << n) - 1));
            terms.push_back({rng.uniform(-2.0, 2.0), p});
        }
        Observable obs = [&]() -> Observable {
            try {
                return Observable(terms);
            } catch (const ContractError&) {
                return Observable({{1.0, PauliString{0, 1}}});
            }
        }();
        REQUIRE(obs.is_diagonal());
        const auto& diag = obs.diagonal();
        const std::uint64_t mask = obs.diag_mask();
        for (std::uint64_t b = 0; b < (std::uint64_t{1} << n); ++b) {
            double direct = 0.0;
            for (const auto& term : obs.terms()) {
                direct += (__builtin_popcountll(b & term.op.z_mask) & 1)
                              ? -term.coeff
                              : term.coeff;
            }
            REQUIRE(diag[b & mask] == doctest::Approx(direct).epsilon(1e-12));
        }
    }
}

TEST_CASE("circuit validation") {
    Circuit c;
    c.n_qubits = 2;
    c.n_layers = 1;
    c.n_params = 1;

    SUBCASE("unused slot") {
        c.gates.push_back({GateKind::RY, {0}, std::nullopt, 0.1});
        CHECK_THROWS_AS(c.validate(), ContractError);
    }
    SUBCASE("slot and fixed angle are exclusive") {
        Gate g{GateKind::RY, {0}, 0u, std::nullopt};
        g.fixed_angle = 0.3;
        c.gates.push_back(g);
        CHECK_THROWS_AS(c.validate(), ContractError);
    }
    SUBCASE("CZ carries no parameter") {
        c.gates.push_back({GateKind::RY, {0}, 0u, std::nullopt});
        c.gates.push_back({GateKind::CZ, {0, 1}, 0u, std::nullopt});
        CHECK_THROWS_AS(c.validate(), ContractError);
    }
    SUBCASE("duplicate qubits in a pair gate") {
        c.gates.push_back({GateKind::RZZ, {1, 1}, 0u, std::nullopt});
        CHECK_THROWS_AS(c.validate(), ContractError);
    }
    SUBCASE("qubit range") {
        c.gates.push_back({GateKind::RY, {2}, 0u, std::nullopt});
        CHECK_THROWS_AS(c.validate(), IndexError);
    }
    SUBCASE("a valid circuit passes") {
        c.gates.push_back({GateKind::RY, {0}, 0u, std::nullopt});
        c.gates.push_back({GateKind::CZ, {0, 1}, std::nullopt, std::nullopt});
        CHECK_NOTHROW(c.validate());
    }
}

TEST_CASE("variance diagnostic covers the other families") {
    SUBCASE("maxcut sizes sample a fresh graph per repeat") {
        const auto report = variance_diagnostic(Family::MaxCut, {{4, 2}}, 12,
                                                InitKind::Random, nullptr, 3);
        CHECK(report.rows[0].variance > 0.0);
    }
    SUBCASE("fhm sizes must be even") {
        CHECK_THROWS_AS(variance_diagnostic(Family::Fhm, {{5, 1}}, 8,
                                            InitKind::Random, nullptr, 3),
                        ContractError);
        const auto report = variance_diagnostic(Family::Fhm, {{4, 1}}, 8,
                                                InitKind::Random, nullptr, 3);
        CHECK(report.rows[0].variance >= 0.0);
    }
    SUBCASE("flip init on fhm decodes sampled problems") {
        const DecoderNet net = init_decoder(Family::Fhm, 5);
        const auto report = variance_diagnostic(Family::Fhm, {{4, 2}}, 8,
                                                InitKind::Flip, &net, 3);
        CHECK(report.rows[0].repeats == 8);
    }
}
