#include "macsc/expurgation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

namespace macsc {

CodeErrorProfile::CodeErrorProfile(std::vector<std::uint64_t> sizes, std::vector<double> errs)
    : message_sizes(std::move(sizes)), errors(std::move(errs)) {
    if (message_sizes.empty())
        throw std::invalid_argument("CodeErrorProfile: at least one source required");
    std::uint64_t count = 1;
    for (std::uint64_t m : message_sizes) {
        if (m < 1) throw std::invalid_argument("CodeErrorProfile: message sizes must be >= 1");
        if (m != 0 && count > std::numeric_limits<std::uint64_t>::max() / m)
            throw std::invalid_argument("CodeErrorProfile: tuple space overflows");
        count *= m;
    }
    if (errors.size() != count)
        throw std::invalid_argument("CodeErrorProfile: error list size must equal prod M_i");
    for (double e : errors)
        if (!(e >= 0.0 && e <= 1.0))
            throw std::invalid_argument("CodeErrorProfile: errors must lie in [0,1]");
}

std::uint64_t CodeErrorProfile::tuple_count() const {
    return static_cast<std::uint64_t>(errors.size());
}

double CodeErrorProfile::average_error() const {
    double total = 0.0;
    for (double e : errors) total += e;
    return total / static_cast<double>(errors.size());
}

std::vector<std::uint64_t> CodeErrorProfile::tuple_of(std::uint64_t flat) const {
    std::vector<std::uint64_t> tuple(message_sizes.size());
    for (std::size_t i = message_sizes.size(); i-- > 0;) {
        tuple[i] = flat % message_sizes[i];
        flat /= message_sizes[i];
    }
    return tuple;
}

std::uint64_t CodeErrorProfile::flat_of(const std::vector<std::uint64_t>& tuple) const {
    if (tuple.size() != message_sizes.size())
        throw std::invalid_argument("flat_of: tuple arity mismatch");
    std::uint64_t flat = 0;
    for (std::size_t i = 0; i < tuple.size(); ++i) {
        if (tuple[i] >= message_sizes[i]) throw std::invalid_argument("flat_of: index out of range");
        flat = flat * message_sizes[i] + tuple[i];
    }
    return flat;
}

ExpurgationResult expurgate(const CodeErrorProfile& profile, double epsilon,
                            const std::vector<int>& t_members) {
    if (!(epsilon >= 0.0 && epsilon < 1.0))
        throw std::invalid_argument("expurgate: epsilon must lie in [0,1)");
    const std::size_t n_sources = profile.message_sizes.size();
    std::vector<bool> in_t(n_sources, false);
    for (int m : t_members) {
        if (m < 1 || static_cast<std::size_t>(m) > n_sources)
            throw std::invalid_argument("expurgate: subset member out of range");
        in_t[m - 1] = true;
    }
    if (t_members.empty()) throw std::invalid_argument("expurgate: subset must be non-empty");

    if (profile.average_error() > epsilon + 1e-12)
        throw std::domain_error("expurgate: average error exceeds declared epsilon");

    const double shrink = (1.0 - epsilon) / (1.0 + epsilon);
    const std::uint64_t total = profile.tuple_count();
    const auto keep = static_cast<std::uint64_t>(
        std::floor(shrink * static_cast<double>(total)));
    double head_total = 1.0;
    for (std::size_t i = 0; i < n_sources; ++i)
        if (in_t[i]) head_total *= static_cast<double>(profile.message_sizes[i]);
    const double head_keep = std::floor(shrink * head_total);
    if (head_keep < 0.5 * shrink * head_total - 1e-9)
        throw std::domain_error(
            "expurgate: floor(((1-eps)/(1+eps)) * prod_T M) falls below half its argument");
    if (keep == 0) throw std::domain_error("expurgate: kept set is empty");

    // D = the `keep` smallest-error tuples, ties by lexicographic (= flat) order.
    std::vector<std::uint64_t> idx(total);
    std::iota(idx.begin(), idx.end(), std::uint64_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::uint64_t a, std::uint64_t b) {
        return profile.errors[a] < profile.errors[b];
    });
    idx.resize(keep);

    // Group D by tail value; pick the most populous tail, smallest tail on ties.
    std::map<std::vector<std::uint64_t>, std::vector<std::uint64_t>> by_tail;
    for (std::uint64_t flat : idx) {
        const auto tuple = profile.tuple_of(flat);
        std::vector<std::uint64_t> tail;
        for (std::size_t i = 0; i < n_sources; ++i)
            if (!in_t[i]) tail.push_back(tuple[i]);
        by_tail[tail].push_back(flat);
    }
    auto best = by_tail.begin();
    for (auto it = by_tail.begin(); it != by_tail.end(); ++it)
        if (it->second.size() > best->second.size()) best = it;

    ExpurgationResult result;
    result.support = best->second;
    std::sort(result.support.begin(), result.support.end());
    result.fixed_tail = best->first;
    for (std::size_t i = 0; i < n_sources; ++i)
        (in_t[i] ? result.head_sources : result.tail_sources).push_back(static_cast<int>(i) + 1);
    result.max_error = 0.0;
    for (std::uint64_t flat : result.support)
        result.max_error = std::max(result.max_error, profile.errors[flat]);
    result.head_count = result.support.size();
    result.keep_count = keep;
    return result;
}

}  // namespace macsc
