#pragma once

#include <cstdint>
#include <vector>

namespace macsc {

// Per-message-tuple decoding error probabilities for an N-source code.
// Tuples are flattened row-major with the last source's index fastest, so the
// flat order coincides with lexicographic tuple order.
struct CodeErrorProfile {
    std::vector<std::uint64_t> message_sizes;  // M_i >= 1
    std::vector<double> errors;                // size = prod M_i, entries in [0,1]

    CodeErrorProfile(std::vector<std::uint64_t> sizes, std::vector<double> errs);
    std::uint64_t tuple_count() const;
    double average_error() const;
    std::vector<std::uint64_t> tuple_of(std::uint64_t flat) const;
    std::uint64_t flat_of(const std::vector<std::uint64_t>& tuple) const;
};

struct ExpurgationResult {
    std::vector<std::uint64_t> support;         // flat tuple indices in A, sorted
    std::vector<std::uint64_t> fixed_tail;      // w_{T^c}* values, in increasing source order
    std::vector<int> head_sources;              // members of T (1-based)
    std::vector<int> tail_sources;              // members of T^c (1-based)
    double max_error;                           // max error over A
    std::uint64_t head_count;                   // |A_T| = |A|
    std::uint64_t keep_count;                   // |D| = floor(((1-eps)/(1+eps)) * prod M_i)
};

// Keeps the floor(((1-eps)/(1+eps)) * prod M_i) smallest-error tuples (ties in
// lexicographic tuple order), then restricts to the tail value w_{T^c} holding
// the most kept tuples (ties to the smallest tail).  The surviving set has
// max error <= (1+eps)/2 and size >= ((1-eps)/(2(1+eps))) * prod_{i in T} M_i.
ExpurgationResult expurgate(const CodeErrorProfile& profile, double epsilon,
                            const std::vector<int>& t_members);

}  // namespace macsc
