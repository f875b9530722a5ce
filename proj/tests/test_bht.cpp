#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <random>
#include <vector>

#include "macsc/bht.hpp"

using namespace macsc;

namespace {

// Exact optimum by vertex enumeration: a deterministic accepted set plus at
// most one fractionally accepted symbol.
double beta_oracle(double delta, const std::vector<double>& p, const std::vector<double>& q) {
    const std::size_t m = p.size();
    double best = 2.0;
    for (std::size_t mask = 0; mask < (std::size_t{1} << m); ++mask) {
        double ps = 0.0, qs = 0.0;
        for (std::size_t x = 0; x < m; ++x)
            if (mask & (std::size_t{1} << x)) {
                ps += p[x];
                qs += q[x];
            }
        if (ps >= delta - 1e-15) best = std::min(best, qs);
        for (std::size_t b = 0; b < m; ++b) {
            if (mask & (std::size_t{1} << b)) continue;
            if (p[b] <= 0.0) continue;
            const double r = (delta - ps) / p[b];
            if (r > 0.0 && r <= 1.0 + 1e-15)
                best = std::min(best, qs + std::min(r, 1.0) * q[b]);
        }
    }
    return best;
}

std::vector<double> random_dist(std::mt19937& gen, std::size_t m, bool allow_zero) {
    std::uniform_real_distribution<double> u(allow_zero ? 0.0 : 0.05, 1.0);
    std::vector<double> d(m);
    double total = 0.0;
    for (auto& v : d) {
        v = u(gen);
        total += v;
    }
    for (auto& v : d) v /= total;
    // re-normalize exactly enough for the 1e-12 constructor gate
    double s = 0.0;
    for (double v : d) s += v;
    d[0] += 1.0 - s;
    return d;
}

}  // namespace

TEST_CASE("identical hypotheses give beta = delta") {
    const FiniteDistribution p{{0.5, 0.5}};
    const auto r = beta(0.3, p, p);
    CHECK(r.beta == doctest::Approx(0.3).epsilon(1e-13));
    double type1 = 0.0;
    for (std::size_t x = 0; x < 2; ++x) type1 += r.test.accept_prob[x] * p[x];
    CHECK(type1 == doctest::Approx(0.3).epsilon(1e-13));
}

TEST_CASE("full support acceptance at delta = 1") {
    const auto r = beta(1.0, FiniteDistribution{{1.0, 0.0}}, FiniteDistribution{{0.5, 0.5}});
    CHECK(r.beta == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(r.test.accept_prob[0] == doctest::Approx(1.0));
    CHECK(r.test.accept_prob[1] == 0.0);
}

TEST_CASE("two-symbol worked instance") {
    const auto r = beta(0.7, FiniteDistribution{{0.7, 0.3}}, FiniteDistribution{{0.4, 0.6}});
    CHECK(r.beta == doctest::Approx(0.4).epsilon(1e-13));
    CHECK(r.test.accept_prob[0] == doctest::Approx(1.0));
    CHECK(r.test.accept_prob[1] == doctest::Approx(0.0));
}

TEST_CASE("edge deltas") {
    const FiniteDistribution p{{0.2, 0.5, 0.3, 0.0}};
    const FiniteDistribution q{{0.1, 0.1, 0.0, 0.8}};
    CHECK(beta(0.0, p, q).beta == 0.0);
    // at delta = 1 the optimum accepts exactly p's support
    CHECK(beta(1.0, p, q).beta == doctest::Approx(0.2).epsilon(1e-12));
    CHECK_THROWS_AS(beta(-0.1, p, q), std::invalid_argument);
    CHECK_THROWS_AS(beta(1.1, p, q), std::invalid_argument);
    CHECK_THROWS_AS(beta(0.5, p, FiniteDistribution{{0.5, 0.5}}), std::invalid_argument);
}

TEST_CASE("beta is non-decreasing in delta") {
    std::mt19937 gen(7);
    for (int inst = 0; inst < 50; ++inst) {
        const FiniteDistribution p{random_dist(gen, 5, true)};
        const FiniteDistribution q{random_dist(gen, 5, true)};
        double prev = -1.0;
        for (double d = 0.0; d <= 1.0; d += 0.05) {
            const double b = beta(d, p, q).beta;
            CHECK(b >= prev - 1e-12);
            prev = b;
        }
    }
}

TEST_CASE("sort-and-randomize equals the vertex-enumeration optimum") {
    std::mt19937 gen(11);
    // structured grid: all (i/8, delta) two-symbol pairs plus random bigger alphabets
    for (int i = 0; i <= 8; ++i)
        for (int j = 1; j < 8; ++j)
            for (int k = 0; k <= 8; ++k) {
                const double pi = i / 8.0, qj = j / 8.0, d = k / 8.0;
                const std::vector<double> p{pi, 1.0 - pi};
                const std::vector<double> q{qj, 1.0 - qj};
                const double lib = beta(d, FiniteDistribution{p}, FiniteDistribution{q}).beta;
                CHECK(std::abs(lib - beta_oracle(d, p, q)) <= 1e-10);
            }
    std::uniform_int_distribution<std::size_t> sz(2, 6);
    std::uniform_real_distribution<double> dd(0.0, 1.0);
    for (int inst = 0; inst < 400; ++inst) {
        const std::size_t m = sz(gen);
        const auto p = random_dist(gen, m, true);
        const auto q = random_dist(gen, m, true);
        const double d = dd(gen);
        const double lib = beta(d, FiniteDistribution{p}, FiniteDistribution{q}).beta;
        CHECK(std::abs(lib - beta_oracle(d, p, q)) <= 1e-10);
    }
}

TEST_CASE("tie order does not change the optimum") {
    // symbols 0 and 2 share likelihood ratio 1.5; reversing labels must agree
    const std::vector<double> p{0.3, 0.4, 0.3};
    const std::vector<double> q{0.2, 0.6, 0.2};
    std::vector<double> pr(p.rbegin(), p.rend());
    std::vector<double> qr(q.rbegin(), q.rend());
    for (double d : {0.1, 0.35, 0.5, 0.8, 0.95}) {
        const double fwd = beta(d, FiniteDistribution{p}, FiniteDistribution{q}).beta;
        const double rev = beta(d, FiniteDistribution{pr}, FiniteDistribution{qr}).beta;
        CHECK(fwd == doctest::Approx(rev).epsilon(1e-13));
    }
}

TEST_CASE("data processing inequality holds on random instances") {
    std::mt19937 gen(21);
    std::uniform_int_distribution<std::size_t> sz(2, 8);
    std::uniform_real_distribution<double> dd(0.0, 1.0);
    for (int inst = 0; inst < 1000; ++inst) {
        const std::size_t m = sz(gen);
        const std::size_t img = 1 + gen() % m;
        std::vector<std::size_t> g(m);
        for (auto& v : g) v = gen() % img;
        const FiniteDistribution p{random_dist(gen, m, true)};
        const FiniteDistribution q{random_dist(gen, m, true)};
        const auto rep = verify_dpi(p, q, [&](std::size_t x) { return g[x]; }, img, dd(gen));
        CHECK(rep.holds);
        CHECK(rep.beta_original <= rep.beta_pushforward + 1e-12);
    }
}

TEST_CASE("identity and constant mappings") {
    const FiniteDistribution p{{0.7, 0.3}};
    const FiniteDistribution q{{0.4, 0.6}};
    const auto id = verify_dpi(p, q, [](std::size_t x) { return x; }, 2, 0.6);
    CHECK(id.holds);
    CHECK(id.beta_original == doctest::Approx(id.beta_pushforward).epsilon(1e-13));
    const auto constant = verify_dpi(p, q, [](std::size_t) { return std::size_t{0}; }, 1, 0.5);
    CHECK(constant.holds);
    CHECK(constant.beta_pushforward == doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("threshold lower bound never exceeds beta") {
    // worked values first
    CHECK(beta_lower_bound(0.5, FiniteDistribution{{0.5, 0.5}}, FiniteDistribution{{0.5, 0.5}}, 2.0)
          == doctest::Approx(0.25).epsilon(1e-13));
    CHECK(beta_lower_bound(0.7, FiniteDistribution{{0.7, 0.3}}, FiniteDistribution{{0.4, 0.6}}, 2.0)
          == doctest::Approx(0.35).epsilon(1e-13));
    CHECK(beta_lower_bound(0.0, FiniteDistribution{{0.7, 0.3}}, FiniteDistribution{{0.4, 0.6}}, 3.0)
          <= 0.0);
    CHECK_THROWS_AS(beta_lower_bound(0.5, FiniteDistribution{{1.0}}, FiniteDistribution{{1.0}}, 0.0),
                    std::invalid_argument);
    std::mt19937 gen(31);
    std::uniform_real_distribution<double> dd(0.0, 1.0);
    std::uniform_real_distribution<double> xi(0.01, 20.0);
    for (int inst = 0; inst < 1000; ++inst) {
        const FiniteDistribution p{random_dist(gen, 5, true)};
        const FiniteDistribution q{random_dist(gen, 5, true)};
        const double d = dd(gen);
        CHECK(beta_lower_bound(d, p, q, xi(gen)) <= beta(d, p, q).beta + 1e-12);
    }
}

TEST_CASE("decoding-error lower-bound report") {
    SUBCASE("perfect decoder attains equality") {
        const std::size_t m = 4;
        std::vector<double> joint(m * m, 0.0);
        for (std::size_t u = 0; u < m; ++u) joint[u * m + u] = 1.0 / m;
        const auto rep = verify_decoding_bound(FiniteDistribution{joint},
                                               FiniteDistribution{std::vector<double>(m, 1.0 / m)});
        CHECK(rep.alpha == doctest::Approx(0.0));
        CHECK(rep.all_hold);
        for (const auto& e : rep.entries)
            CHECK(e.beta_value == doctest::Approx(e.q_mass).epsilon(1e-12));
    }
    SUBCASE("noisy two-symbol decoder") {
        const std::vector<double> joint{0.45, 0.05, 0.05, 0.45};
        const auto rep = verify_decoding_bound(FiniteDistribution{joint},
                                               FiniteDistribution{{0.5, 0.5}});
        CHECK(rep.alpha == doctest::Approx(0.1).epsilon(1e-12));
        CHECK(rep.all_hold);
        for (const auto& e : rep.entries) CHECK(e.beta_value <= 0.5 + 1e-12);
    }
    SUBCASE("certain failure is rejected") {
        const std::vector<double> joint{0.0, 0.5, 0.05, 0.45};
        CHECK_THROWS_AS(verify_decoding_bound(FiniteDistribution{joint},
                                              FiniteDistribution{{0.5, 0.5}}),
                        std::domain_error);
    }
}

TEST_CASE("distribution validation") {
    CHECK_THROWS_AS(FiniteDistribution{std::vector<double>{}}, std::invalid_argument);
    CHECK_THROWS_AS((FiniteDistribution{{0.5, 0.4}}), std::invalid_argument);
    CHECK_THROWS_AS((FiniteDistribution{{1.2, -0.2}}), std::invalid_argument);
}
