#include <doctest.h>

#include <cmath>

#include "flip/linalg.hpp"
#include "flip/rng.hpp"

using namespace flip;

TEST_CASE("rng streams are deterministic and independent") {
    Rng a(42);
    Rng b(42);
    for (int i = 0; i < 100; ++i) {
        CHECK(a.next() == b.next());
    }
    Rng c = Rng(42).derive(1);
    Rng d = Rng(42).derive(2);
    CHECK(c.next() != d.next());
}

TEST_CASE("rng uniform_int covers the inclusive range uniformly") {
    Rng rng(7);
    int counts[6] = {0};
    for (int i = 0; i < 60000; ++i) {
        const auto v = rng.uniform_int(1, 6);
        REQUIRE(v >= 1);
        REQUIRE(v <= 6);
        counts[v - 1]++;
    }
    for (const int c : counts) {
        CHECK(c > 9500);
        CHECK(c < 10500);
    }
}

TEST_CASE("rng normal moments") {
    Rng rng(3);
    double sum = 0.0;
    double sq = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double x = rng.normal(0.0, 2.0);
        sum += x;
        sq += x * x;
    }
    CHECK(std::abs(sum / n) < 0.02);
    CHECK(std::abs(sq / n - 4.0) < 0.06);
}

TEST_CASE("symmetric eigenvalues of known matrices") {
    SUBCASE("diagonal") {
        const auto ev = symmetric_eigenvalues({3, 0, 0, 0, -1, 0, 0, 0, 2}, 3);
        CHECK(ev[0] == doctest::Approx(-1.0));
        CHECK(ev[1] == doctest::Approx(2.0));
        CHECK(ev[2] == doctest::Approx(3.0));
    }
    SUBCASE("2x2 pauli x has eigenvalues +-1") {
        const auto ev = symmetric_eigenvalues({0, 1, 1, 0}, 2);
        CHECK(ev[0] == doctest::Approx(-1.0));
        CHECK(ev[1] == doctest::Approx(1.0));
    }
    SUBCASE("tridiagonal chain matches the analytic band") {
        // hopping chain of length 5: eigenvalues 2 cos(k pi / 6)
        const std::size_t n = 5;
        std::vector<double> a(n * n, 0.0);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            a[i * n + i + 1] = 1.0;
            a[(i + 1) * n + i] = 1.0;
        }
        auto ev = symmetric_eigenvalues(std::move(a), n);
        for (std::size_t k = 1; k <= n; ++k) {
            const double expected =
                2.0 * std::cos(static_cast<double>(n + 1 - k) * M_PI / 6.0);
            CHECK(ev[k - 1] == doctest::Approx(expected).epsilon(1e-10));
        }
    }
    SUBCASE("random similarity transform preserves the spectrum") {
        // rotate a known diagonal by a product of Givens rotations
        const std::size_t n = 6;
        std::vector<double> diag{-3.0, -1.5, 0.0, 0.25, 2.0, 5.0};
        std::vector<double> a(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            a[i * n + i] = diag[i];
        }
        Rng rng(11);
        for (int rot = 0; rot < 40; ++rot) {
            const auto p = static_cast<std::size_t>(rng.uniform_int(0, 5));
            auto q = static_cast<std::size_t>(rng.uniform_int(0, 5));
            if (p == q) {
                q = (q + 1) % n;
            }
            const double c = std::cos(rng.uniform(0, 3.14));
            const double s = std::sin(std::acos(c));
            // a <- G^T a G with the Givens rotation in the (p, q) plane
            for (std::size_t j = 0; j < n; ++j) {
                const double ap = a[p * n + j];
                const double aq = a[q * n + j];
                a[p * n + j] = c * ap + s * aq;
                a[q * n + j] = -s * ap + c * aq;
            }
            for (std::size_t i = 0; i < n; ++i) {
                const double ap = a[i * n + p];
                const double aq = a[i * n + q];
                a[i * n + p] = c * ap + s * aq;
                a[i * n + q] = -s * ap + c * aq;
            }
        }
        auto ev = symmetric_eigenvalues(std::move(a), n);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(ev[i] == doctest::Approx(diag[i]).epsilon(1e-9));
        }
    }
}

TEST_CASE("sector basis enumerates hamming-weight classes") {
    const auto all = sector_basis(4, {});
    CHECK(all.size() == 16);
    const auto two = sector_basis(4, 2);
    CHECK(two.size() == 6);
    for (const auto b : two) {
        CHECK(__builtin_popcountll(b) == 2);
    }
}
