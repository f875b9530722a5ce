#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace macsc {

// Probability mass function over an indexed finite alphabet.
struct FiniteDistribution {
    std::vector<double> mass;

    explicit FiniteDistribution(std::vector<double> m);
    std::size_t size() const { return mass.size(); }
    double operator[](std::size_t i) const { return mass[i]; }
};

// Randomized binary test: accept_prob[x] is the probability of declaring "p".
struct BinaryTest {
    std::vector<double> accept_prob;
};

struct BetaResult {
    double beta;
    BinaryTest test;
};

// Minimum type-II error beta_delta(p||q): min sum r(x)q(x) over randomized
// tests with sum r(x)p(x) >= delta.  Symbols are accepted in decreasing
// likelihood-ratio order (q=0 first, ties by symbol id), randomizing exactly
// one boundary symbol so the type-I constraint is met with equality.
BetaResult beta(double delta, const FiniteDistribution& p, const FiniteDistribution& q);

struct DpiReport {
    bool holds;            // beta(p||q) <= beta(p_g||q_g)
    double beta_original;
    double beta_pushforward;
};

// Checks the data processing inequality under a total symbol map g.
DpiReport verify_dpi(const FiniteDistribution& p, const FiniteDistribution& q,
                     const std::function<std::size_t(std::size_t)>& mapping,
                     std::size_t image_size, double delta);

// (1/xi) * (delta - Pr_p[p(x)/q(x) >= xi]); a valid lower bound on beta, may
// be negative.
double beta_lower_bound(double delta, const FiniteDistribution& p,
                        const FiniteDistribution& q, double xi);

struct DecodingBoundEntry {
    std::size_t symbol;
    double beta_value;
    double q_mass;
    bool holds;  // beta_{1-alpha}(p_{V|U=u} || q_V) <= q_V(u)
};

struct DecodingBoundReport {
    double alpha;  // max_u Pr{V != u | U = u}
    std::vector<DecodingBoundEntry> entries;
    bool all_hold;
};

// Checks beta_{1-alpha}(p_{V|U=u} || q_V) <= q_V(u) for every u with positive
// marginal.  `joint` is row-major over W x W (row = u); throws if some row
// decodes incorrectly with certainty (alpha = 1).
DecodingBoundReport verify_decoding_bound(const FiniteDistribution& joint,
                                          const FiniteDistribution& qv);

}  // namespace macsc
