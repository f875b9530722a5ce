#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace macsc {

// Per-source transmit powers in linear SNR units, indexed 1..N.
struct PowerVector {
    std::vector<double> powers;

    explicit PowerVector(std::vector<double> p);
    std::size_t size() const { return powers.size(); }
    double operator[](std::size_t i) const { return powers[i]; }
};

// Per-source rates in bits per channel use.
struct RateTuple {
    std::vector<double> rates;

    explicit RateTuple(std::vector<double> r);
    std::size_t size() const { return rates.size(); }
};

// Non-empty subset of {1..N} as a bitmask; bit (i-1) set means source i is in T.
using SubsetMask = std::uint32_t;

std::vector<int> subset_members(SubsetMask mask);
SubsetMask subset_from_members(const std::vector<int>& members, std::size_t n_sources);

struct RegionConstraint {
    SubsetMask subset;
    double bound_bits;
};

// One constraint per non-empty T, lexicographic by bitmask.
// Bound for T is (1/2) log2(1 + sum_{i in T} P_i).
std::vector<RegionConstraint> cover_wyner_constraints(const PowerVector& p);

double cover_wyner_bound(const PowerVector& p, SubsetMask subset);

struct MembershipResult {
    bool inside;
    std::optional<SubsetMask> violated_subset;  // smallest violating bitmask
};

MembershipResult contains(const PowerVector& p, const RateTuple& r,
                          double tolerance_bits = 1e-12);

// Two-user interference channel parameters.  Strong interference requires
// g12^2 >= 1 and g21^2 >= 1.
struct IcParams {
    double p1;
    double p2;
    double g12;
    double g21;

    double i1() const { return g12 * g12 * p2; }
    double i2() const { return g21 * g21 * p1; }
    bool strong_interference() const { return g12 * g12 >= 1.0 && g21 * g21 >= 1.0; }
};

struct HkRegion {
    double r1_max;
    double r2_max;
    double sum_max;

    bool contains(double r1, double r2, double tolerance_bits = 1e-12) const;
};

// Han-Kobayashi region under strong interference; throws if the
// strong-interference condition fails.
HkRegion hk_strong_interference_region(const IcParams& ic);

}  // namespace macsc
