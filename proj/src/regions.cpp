#include "macsc/regions.hpp"

#include <cmath>
#include <stdexcept>

namespace macsc {

namespace {
constexpr std::size_t kMaxSources = 20;  // bounds the 2^N - 1 enumeration
}

PowerVector::PowerVector(std::vector<double> p) : powers(std::move(p)) {
    if (powers.empty()) throw std::invalid_argument("PowerVector: at least one source required");
    if (powers.size() > kMaxSources)
        throw std::invalid_argument("PowerVector: N > 20 not supported");
    for (double v : powers)
        if (!(v > 0.0)) throw std::invalid_argument("PowerVector: powers must be strictly positive");
}

RateTuple::RateTuple(std::vector<double> r) : rates(std::move(r)) {
    for (double v : rates)
        if (!(v >= 0.0)) throw std::invalid_argument("RateTuple: rates must be non-negative");
}

std::vector<int> subset_members(SubsetMask mask) {
    std::vector<int> out;
    for (int i = 0; mask != 0; ++i, mask >>= 1)
        if (mask & 1u) out.push_back(i + 1);
    return out;
}

SubsetMask subset_from_members(const std::vector<int>& members, std::size_t n_sources) {
    SubsetMask mask = 0;
    for (int m : members) {
        if (m < 1 || static_cast<std::size_t>(m) > n_sources)
            throw std::invalid_argument("subset member out of range");
        mask |= SubsetMask{1} << (m - 1);
    }
    return mask;
}

double cover_wyner_bound(const PowerVector& p, SubsetMask subset) {
    if (subset == 0 || subset >= (SubsetMask{1} << p.size()))
        throw std::invalid_argument("subset must be a non-empty subset of {1..N}");
    double total = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
        if (subset & (SubsetMask{1} << i)) total += p[i];
    return 0.5 * std::log2(1.0 + total);
}

std::vector<RegionConstraint> cover_wyner_constraints(const PowerVector& p) {
    const SubsetMask full = (SubsetMask{1} << p.size()) - 1;
    std::vector<RegionConstraint> out;
    out.reserve(full);
    for (SubsetMask mask = 1; mask <= full; ++mask)
        out.push_back({mask, cover_wyner_bound(p, mask)});
    return out;
}

MembershipResult contains(const PowerVector& p, const RateTuple& r, double tolerance_bits) {
    if (p.size() != r.size())
        throw std::invalid_argument("contains: dimension mismatch between powers and rates");
    const SubsetMask full = (SubsetMask{1} << p.size()) - 1;
    for (SubsetMask mask = 1; mask <= full; ++mask) {
        double rate_sum = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i)
            if (mask & (SubsetMask{1} << i)) rate_sum += r.rates[i];
        if (rate_sum > cover_wyner_bound(p, mask) + tolerance_bits)
            return {false, mask};
    }
    return {true, std::nullopt};
}

bool HkRegion::contains(double r1, double r2, double tolerance_bits) const {
    return r1 <= r1_max + tolerance_bits && r2 <= r2_max + tolerance_bits &&
           r1 + r2 <= sum_max + tolerance_bits;
}

HkRegion hk_strong_interference_region(const IcParams& ic) {
    if (!(ic.p1 > 0.0) || !(ic.p2 > 0.0))
        throw std::invalid_argument("IcParams: powers must be strictly positive");
    if (!ic.strong_interference())
        throw std::domain_error("IcParams: strong interference requires g12^2 >= 1 and g21^2 >= 1");
    HkRegion region;
    region.r1_max = 0.5 * std::log2(1.0 + ic.p1);
    region.r2_max = 0.5 * std::log2(1.0 + ic.p2);
    region.sum_max = std::min(0.5 * std::log2(1.0 + (ic.p1 + ic.i1())),
                              0.5 * std::log2(1.0 + (ic.p2 + ic.i2())));
    return region;
}

}  // namespace macsc
