#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <random>
#include <set>

#include "macsc/expurgation.hpp"

using namespace macsc;

TEST_CASE("profile validation and flattening") {
    CHECK_THROWS_AS(CodeErrorProfile({}, {}), std::invalid_argument);
    CHECK_THROWS_AS(CodeErrorProfile({2, 2}, {0.1, 0.2, 0.3}), std::invalid_argument);
    CHECK_THROWS_AS(CodeErrorProfile({2}, {0.1, 1.2}), std::invalid_argument);
    CHECK_THROWS_AS(CodeErrorProfile({0}, {}), std::invalid_argument);
    const CodeErrorProfile p({2, 3}, {0.0, 0.1, 0.2, 0.3, 0.4, 0.5});
    CHECK(p.tuple_count() == 6);
    CHECK(p.average_error() == doctest::Approx(0.25));
    CHECK(p.tuple_of(4) == std::vector<std::uint64_t>{1, 1});  // last source fastest
    CHECK(p.flat_of({1, 1}) == 4);
    for (std::uint64_t f = 0; f < 6; ++f) CHECK(p.flat_of(p.tuple_of(f)) == f);
}

TEST_CASE("worked two-by-two instance") {
    const CodeErrorProfile profile({2, 2}, {0.1, 0.2, 0.9, 0.95});
    const auto r = expurgate(profile, 0.6, {1, 2});
    CHECK(r.keep_count == 1);  // floor((0.4/1.6)*4)
    CHECK(r.support == std::vector<std::uint64_t>{0});
    CHECK(r.max_error == doctest::Approx(0.1));
    CHECK(r.max_error <= (1.0 + 0.6) / 2.0);
    CHECK(r.fixed_tail.empty());
    CHECK(r.head_count == 1);
}

TEST_CASE("zero-error code keeps everything") {
    const CodeErrorProfile profile({2, 2}, {0.0, 0.0, 0.0, 0.0});
    const auto r = expurgate(profile, 0.0, {1, 2});
    CHECK(r.keep_count == 4);
    CHECK(r.support == std::vector<std::uint64_t>{0, 1, 2, 3});
    CHECK(r.max_error == 0.0);
}

TEST_CASE("declared average below the real one is rejected") {
    const CodeErrorProfile profile({2, 2}, {0.7, 0.7, 0.7, 0.7});
    CHECK_THROWS_AS(expurgate(profile, 0.5, {1, 2}), std::domain_error);
    CHECK_THROWS_AS(expurgate(profile, 1.0, {1, 2}), std::invalid_argument);
    CHECK_THROWS_AS(expurgate(profile, -0.1, {1, 2}), std::invalid_argument);
    CHECK_THROWS_AS(expurgate(profile, 0.8, {}), std::invalid_argument);
    CHECK_THROWS_AS(expurgate(profile, 0.8, {3}), std::invalid_argument);
}

TEST_CASE("proper subset fixes the complement coordinates") {
    // sources 1,3 in the head, source 2 in the tail
    const CodeErrorProfile profile({2, 3, 2},
                                   {0.0, 0.1, 0.2, 0.3, 0.05, 0.15, 0.25, 0.35, 0.4, 0.45, 0.5, 0.55});
    const auto r = expurgate(profile, 0.3, {1, 3});
    CHECK(r.head_sources == std::vector<int>{1, 3});
    CHECK(r.tail_sources == std::vector<int>{2});
    REQUIRE(r.fixed_tail.size() == 1);
    std::set<std::vector<std::uint64_t>> heads;
    for (std::uint64_t flat : r.support) {
        const auto tuple = profile.tuple_of(flat);
        CHECK(tuple[1] == r.fixed_tail[0]);
        heads.insert({tuple[0], tuple[2]});
    }
    CHECK(heads.size() == r.support.size());  // |A| = |A_T|
    CHECK(r.head_count == r.support.size());
}

TEST_CASE("random profiles satisfy every guarantee") {
    std::mt19937 gen(4242);
    std::uniform_int_distribution<int> msize(1, 5);
    std::uniform_real_distribution<double> uerr(0.0, 1.0);
    std::uniform_real_distribution<double> ueps(0.0, 0.8);
    int accepted = 0;
    for (int inst = 0; inst < 1000; ++inst) {
        const std::size_t nsrc = 1 + gen() % 3;
        std::vector<std::uint64_t> sizes(nsrc);
        for (auto& m : sizes) m = static_cast<std::uint64_t>(msize(gen));
        std::uint64_t total = 1;
        for (auto m : sizes) total *= m;
        std::vector<double> errors(total);
        for (auto& e : errors) e = uerr(gen);
        CodeErrorProfile profile(sizes, errors);
        const double avg = profile.average_error();
        double eps = std::min(0.95, avg + ueps(gen) * (1.0 - avg));
        if (avg > eps) eps = avg;
        // head subset: random non-empty
        std::vector<int> t;
        for (std::size_t i = 1; i <= nsrc; ++i)
            if (gen() % 2) t.push_back(static_cast<int>(i));
        if (t.empty()) t.push_back(1);
        double prod_t = 1.0;
        for (int m : t) prod_t *= static_cast<double>(sizes[static_cast<std::size_t>(m) - 1]);
        const double shrink = (1.0 - eps) / (1.0 + eps);
        if (std::floor(shrink * prod_t) < 0.5 * shrink * prod_t ||
            std::floor(shrink * static_cast<double>(total)) < 1.0) {
            CHECK_THROWS(expurgate(profile, eps, t));
            continue;
        }
        ++accepted;
        const auto r = expurgate(profile, eps, t);
        // maximal error bound
        CHECK(r.max_error <= (1.0 + eps) / 2.0 + 1e-12);
        // size bound: |A_T| >= ((1-eps)/(2(1+eps))) prod_T M
        CHECK(static_cast<double>(r.head_count) >= shrink / 2.0 * prod_t - 1e-9);
        // uniform-measure bound: 1/|A_T| <= (2(1+eps)/(1-eps))/prod_T M
        CHECK(1.0 / static_cast<double>(r.head_count) <=
              2.0 * (1.0 + eps) / ((1.0 - eps) * prod_t) + 1e-12);
        // all survivors share the tail and project injectively
        std::set<std::vector<std::uint64_t>> heads, tails;
        for (std::uint64_t flat : r.support) {
            const auto tuple = profile.tuple_of(flat);
            std::vector<std::uint64_t> head, tail;
            for (std::size_t i = 0; i < nsrc; ++i) {
                const bool in_head =
                    std::find(t.begin(), t.end(), static_cast<int>(i) + 1) != t.end();
                (in_head ? head : tail).push_back(tuple[i]);
            }
            heads.insert(head);
            tails.insert(tail);
        }
        CHECK(tails.size() <= 1);
        CHECK(heads.size() == r.support.size());
        // pigeonhole over tails: |A| * (#tails) >= |D|
        double prod_tc = static_cast<double>(total) / prod_t;
        CHECK(static_cast<double>(r.head_count) * prod_tc >=
              static_cast<double>(r.keep_count) - 1e-9);
        // determinism
        const auto r2 = expurgate(profile, eps, t);
        CHECK(r2.support == r.support);
        CHECK(r2.fixed_tail == r.fixed_tail);
    }
    CHECK(accepted > 200);  // the floor precondition rejects many tiny instances
}

TEST_CASE("markov step: the kept set never exceeds the half-plus error level") {
    std::mt19937 gen(99);
    std::uniform_real_distribution<double> uerr(0.0, 1.0);
    for (int inst = 0; inst < 300; ++inst) {
        std::vector<double> errors(64);
        for (auto& e : errors) e = uerr(gen);
        double avg = 0.0;
        for (double e : errors) avg += e;
        avg /= 64.0;
        const double eps = std::min(0.95, avg * 1.05 + 0.01);
        std::vector<double> sorted = errors;
        std::sort(sorted.begin(), sorted.end());
        const auto keep = static_cast<std::size_t>(
            std::floor((1.0 - eps) / (1.0 + eps) * 64.0));
        if (keep == 0) continue;
        CHECK(sorted[keep - 1] <= (1.0 + eps) / 2.0 + 1e-12);
    }
}

TEST_CASE("ties resolve to the lexicographically smallest tuples and tail") {
    // all-equal errors: D must be the first `keep` flat indices
    const CodeErrorProfile profile({2, 2}, {0.2, 0.2, 0.2, 0.2});
    const auto r = expurgate(profile, 0.25, {1});
    // keep = floor(0.6 * 4) = 2 -> flats {0, 1}; tails w2 = 0 and 1 tie with
    // one element each -> smallest tail 0 -> support {0}
    CHECK(r.keep_count == 2);
    CHECK(r.fixed_tail == std::vector<std::uint64_t>{0});
    CHECK(r.support == std::vector<std::uint64_t>{0});
}
