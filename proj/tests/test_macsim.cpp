#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <cstdio>
#include <numeric>

#include "macsc/macsim.hpp"
#include "macsc/rng.hpp"

using namespace macsc;

TEST_CASE("counter stream basics") {
    CounterRng a(1, 2, 3), b(1, 2, 3), c(1, 2, 4);
    CHECK(a.next_u64() == b.next_u64());
    CHECK(a.next_u64() != c.next_u64());
    CounterRng d(9, 0, 0);
    for (int i = 0; i < 1000; ++i) {
        const double u = d.next_double();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        const std::uint64_t v = d.next_below(7);
        CHECK(v < 7);
    }
}

TEST_CASE("gaussian sampler first two moments") {
    CounterRng rng(314, 55, 0);
    const std::size_t n = 1000000;
    double s1 = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double z = rng.next_gauss();
        s1 += z;
        s2 += z * z;
    }
    const double mean = s1 / n;
    const double var = s2 / n - mean * mean;
    CHECK(std::abs(mean) <= 4.0 / std::sqrt(static_cast<double>(n)));
    CHECK(std::abs(var - 1.0) <= 4.0 * std::sqrt(2.0 / static_cast<double>(n)));
}

TEST_CASE("wilson interval worked value") {
    double lo = 0.0, hi = 0.0;
    wilson_interval(50, 100, lo, hi);
    CHECK(lo == doctest::Approx(0.40383153036599564).epsilon(1e-12));
    CHECK(hi == doctest::Approx(0.59616846963400436).epsilon(1e-12));
    wilson_interval(0, 100, lo, hi);
    CHECK(lo == 0.0);
    CHECK(hi < 0.05);
}

TEST_CASE("codebooks respect the energy constraint") {
    const GaussianMacConfig cfg(16, PowerVector{{1.0, 2.5}}, {8, 4});
    for (auto kind : {CodebookKind::sphere, CodebookKind::iid_gauss_scaled}) {
        const auto books = generate_codebooks(cfg, kind, 77);
        REQUIRE(books.size() == 2);
        for (std::size_t i = 0; i < 2; ++i) {
            REQUIRE(books[i].size() == cfg.message_sizes[i]);
            for (const auto& word : books[i]) {
                double norm = 0.0;
                for (double v : word) norm += v * v;
                CHECK(norm <= 16.0 * cfg.powers[i] + 1e-12);
                if (kind == CodebookKind::sphere)
                    CHECK(norm == doctest::Approx(16.0 * cfg.powers[i]).epsilon(1e-12));
            }
        }
    }
    // determinism
    const auto again = generate_codebooks(cfg, CodebookKind::sphere, 77);
    CHECK(again == generate_codebooks(cfg, CodebookKind::sphere, 77));
    CHECK(again != generate_codebooks(cfg, CodebookKind::sphere, 78));
}

TEST_CASE("single-tuple code never errs") {
    const GaussianMacConfig cfg(4, PowerVector{{1.0, 1.0}}, {1, 1});
    const auto books = generate_codebooks(cfg, CodebookKind::sphere, 5);
    const auto r = simulate_mac_error(cfg, books, 500, 5);
    CHECK(r.errors == 0);
    CHECK(r.error_prob == 0.0);
    const auto profile = measure_error_profile(cfg, books, 50, 5);
    CHECK(profile.errors == std::vector<double>{0.0});
}

TEST_CASE("results are reproducible and thread-count independent") {
    const GaussianMacConfig cfg(12, PowerVector{{1.0, 1.0}}, {8, 8});
    const auto books = generate_codebooks(cfg, CodebookKind::sphere, 42);
    const auto r1 = simulate_mac_error(cfg, books, 4000, 42, 1);
    const auto r2 = simulate_mac_error(cfg, books, 4000, 42, 1);
    const auto r4 = simulate_mac_error(cfg, books, 4000, 42, 4);
    CHECK(r1.errors == r2.errors);
    CHECK(r1.errors == r4.errors);
    CHECK(r1.error_prob > 0.0);  // rates well above capacity at n = 12
    const auto p1 = measure_error_profile(cfg, books, 30, 42, 1);
    const auto p4 = measure_error_profile(cfg, books, 30, 42, 4);
    CHECK(p1.errors == p4.errors);
}

TEST_CASE("swapping symmetric sources leaves the error rate unchanged") {
    const GaussianMacConfig cfg(10, PowerVector{{1.0, 1.0}}, {6, 6});
    auto books = generate_codebooks(cfg, CodebookKind::sphere, 9);
    const auto r = simulate_mac_error(cfg, books, 6000, 9);
    std::swap(books[0], books[1]);
    const auto swapped = simulate_mac_error(cfg, books, 6000, 9);
    // the trial streams differ after the swap, so compare statistically
    const double slack = (r.ci_hi - r.ci_lo) + (swapped.ci_hi - swapped.ci_lo);
    CHECK(std::abs(r.error_prob - swapped.error_prob) <= slack);
}

TEST_CASE("widely separated antipodal codewords decode cleanly") {
    const std::size_t n = 8;
    const double power = 100.0;
    const double amp = std::sqrt(static_cast<double>(n) * power / n);  // per-coordinate
    Codebook book1{std::vector<double>(n, amp), std::vector<double>(n, -amp)};
    // orthogonal sign pattern so all four signal sums stay far apart
    std::vector<double> half(n, amp);
    for (std::size_t i = n / 2; i < n; ++i) half[i] = -amp;
    std::vector<double> flipped(half);
    for (auto& v : flipped) v = -v;
    Codebook book2{half, flipped};
    const GaussianMacConfig cfg(n, PowerVector{{power, power}}, {2, 2});
    const auto r = simulate_mac_error(cfg, {book1, book2}, 4000, 3);
    CHECK(r.error_prob < 0.01);
}

TEST_CASE("duplicated codewords force tie randomization") {
    const std::size_t n = 6;
    Codebook dup{std::vector<double>(n, 1.0), std::vector<double>(n, 1.0)};
    Codebook single{std::vector<double>(n, -1.0)};
    const GaussianMacConfig cfg(n, PowerVector{{1.0, 1.0}}, {2, 1});
    const auto r = simulate_mac_error(cfg, {dup, single}, 20000, 11);
    // the duplicated pair ties exactly; uniform tie-breaking errs half the time
    CHECK(r.error_prob == doctest::Approx(0.5).epsilon(0.05));
    const auto profile = measure_error_profile(cfg, {dup, single}, 2000, 11);
    for (double e : profile.errors) CHECK(e == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("per-tuple errors of a symmetric code are level") {
    const GaussianMacConfig cfg(10, PowerVector{{1.0, 1.0}}, {4, 4});
    const auto books = generate_codebooks(cfg, CodebookKind::sphere, 21);
    const auto profile = measure_error_profile(cfg, books, 800, 21);
    const double avg = profile.average_error();
    double lo = 0.0, hi = 0.0;
    wilson_interval(static_cast<std::uint64_t>(avg * 800), 800, lo, hi);
    const double width = hi - lo;
    for (double e : profile.errors) CHECK(std::abs(e - avg) <= 5.0 * width);
}

TEST_CASE("tuple cap and size validation") {
    CHECK_THROWS_AS(GaussianMacConfig(4, PowerVector{{1.0, 1.0}}, {1 << 11, 1 << 11}),
                    std::domain_error);
    CHECK_THROWS_AS(GaussianMacConfig(4, PowerVector{{1.0, 1.0}}, {0, 4}),
                    std::invalid_argument);
    CHECK_THROWS_AS(GaussianMacConfig(4, PowerVector{{1.0, 1.0}}, {4}),
                    std::invalid_argument);
}

TEST_CASE("phase transition trend at desk scale") {
    const PowerVector p{{1.0, 1.0}};
    const auto rows = phase_transition_scan(p, {0.0, 0.5, 1.25}, {8, 14, 20}, 1200, 2026, 4);
    REQUIRE(rows.size() == 9);
    // zero-rate rows are exact zeros
    for (int i = 0; i < 3; ++i) {
        CHECK(rows[i].message_sizes == std::vector<std::uint64_t>{1, 1});
        CHECK(rows[i].result.error_prob == 0.0);
    }
    // above-capacity errors dominate below-capacity errors at every n
    for (int i = 0; i < 3; ++i)
        CHECK(rows[6 + i].result.error_prob > rows[3 + i].result.error_prob + 0.2);
    // trends within confidence slack
    CHECK(rows[5].result.error_prob <= rows[3].result.error_prob +
                                           (rows[3].result.ci_hi - rows[3].result.ci_lo));
    CHECK(rows[8].result.error_prob >= rows[6].result.error_prob -
                                           (rows[6].result.ci_hi - rows[6].result.ci_lo));
    // cap gate: n large enough to overflow the exhaustive-ML budget must throw
    CHECK_THROWS_AS(phase_transition_scan(p, {1.25}, {50}, 10, 1, 1), std::domain_error);
}

TEST_CASE("codebook container round-trips bit-exactly") {
    const GaussianMacConfig cfg(7, PowerVector{{1.0, 2.0}}, {3, 5});
    const auto books = generate_codebooks(cfg, CodebookKind::iid_gauss_scaled, 1234);
    const std::string path = "test_books.macb1";
    save_codebooks(path, 7, books);
    std::size_t n = 0;
    const auto loaded = load_codebooks(path, n);
    std::remove(path.c_str());
    CHECK(n == 7);
    CHECK(loaded == books);
    CHECK_THROWS(load_codebooks("no_such_file.macb1", n));
}

TEST_CASE("interference-channel paired simulation") {
    const IcConfig ic(8, 1.0, 1.0, 1.5, 1.3, 4, 4);
    const GaussianMacConfig cfg(8, PowerVector{{1.0, 1.0}}, {4, 4});
    const auto books = generate_codebooks(cfg, CodebookKind::sphere, 88);
    const auto r = simulate_ic(ic, books[0], books[1], 4000, 88, 40000, 4);
    const double slack = 3.0 * (r.plain1.ci_hi - r.plain1.ci_lo + r.plain2.ci_hi - r.plain2.ci_lo);
    const double budget = r.plain1.error_prob + r.plain2.error_prob + slack;
    CHECK(r.multicast1.error_prob <= budget);
    CHECK(r.multicast2.error_prob <= budget);
    CHECK_FALSE(r.ks_reject);
    CHECK(r.anchor1 < 4);
    CHECK(r.anchor2 < 4);
    // determinism across thread counts
    const auto r1 = simulate_ic(ic, books[0], books[1], 1000, 88, 0, 1);
    const auto r4 = simulate_ic(ic, books[0], books[1], 1000, 88, 0, 4);
    CHECK(r1.multicast1.errors == r4.multicast1.errors);
    CHECK(r1.plain2.errors == r4.plain2.errors);
}

TEST_CASE("unit cross gains remove the auxiliary noise") {
    const IcConfig ic(6, 1.0, 1.0, 1.0, 1.0, 2, 2);
    const GaussianMacConfig cfg(6, PowerVector{{1.0, 1.0}}, {2, 2});
    const auto books = generate_codebooks(cfg, CodebookKind::sphere, 31);
    const auto r = simulate_ic(ic, books[0], books[1], 2000, 31, 20000, 2);
    CHECK(r.multicast1.error_prob <=
          r.plain1.error_prob + r.plain2.error_prob +
              3.0 * (r.plain1.ci_hi - r.plain1.ci_lo + r.plain2.ci_hi - r.plain2.ci_lo));
    CHECK_FALSE(r.ks_reject);
}

TEST_CASE("interference configuration gates") {
    CHECK_THROWS_AS(IcConfig(4, 1.0, 1.0, 1.0, 1.0, 0, 2), std::invalid_argument);
    CHECK_THROWS_AS(IcConfig(4, 0.0, 1.0, 1.0, 1.0, 2, 2), std::invalid_argument);
    const IcConfig weak(4, 1.0, 1.0, 0.5, 1.0, 2, 2);
    const GaussianMacConfig cfg(4, PowerVector{{1.0, 1.0}}, {2, 2});
    const auto books = generate_codebooks(cfg, CodebookKind::sphere, 1);
    CHECK_THROWS_AS(simulate_ic(weak, books[0], books[1], 10, 1, 0, 1), std::domain_error);
}
