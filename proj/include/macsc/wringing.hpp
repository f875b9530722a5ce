#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "macsc/quantizer.hpp"
#include "macsc/regions.hpp"

namespace macsc {

using Sequence = std::vector<std::uint32_t>;               // length-n word over {0..|X|-1}
using SparseDist = std::map<Sequence, double>;             // positive-mass atoms only

// A pair of distributions over X^n with p <= (1+c)u pointwise, plus the
// conditioning-search parameters.  Sparse: only atoms are stored.
struct ProductApproxInstance {
    std::size_t n;
    std::size_t alphabet;
    SparseDist p;
    SparseDist u;
    double c;       // domination constant, > 0
    double delta;   // in (0, c)
    double lambda;  // in (0, 1)

    ProductApproxInstance(std::size_t n_, std::size_t alphabet_, SparseDist p_, SparseDist u_,
                          double c_, double delta_, double lambda_);
};

struct WringingStep {
    std::size_t coordinate;   // 0-based
    std::uint32_t value;
    double p_cond;            // Pr_p{x_k = value | previous event}
    double u_cond;            // Pr_u{x_k = value | previous event}
};

struct WringingResult {
    std::vector<WringingStep> steps;           // t_1..t_l in selection order
    double event_prob;                         // Pr_p of the full conditioning event
    SparseDist p_conditioned;                  // p(. | event)
    SparseDist u_conditioned;                  // u(. | event)
    std::size_t step_count() const { return steps.size(); }
};

// Iterative conditioning: while some unconditioned coordinate k and symbol x
// have p(x_k = x | event) > max{(1+delta) u(x_k = x | event), lambda}, fix the
// smallest such (k, x) and recondition.  Guarantees: l <= c/delta, event
// probability >= lambda^l, and the per-letter inequality everywhere else.
WringingResult wring(const ProductApproxInstance& inst);

struct WringingCheck {
    bool step_count_ok;    // l <= c/delta
    bool event_prob_ok;    // Pr_p{event} >= lambda^l
    bool pointwise_ok;     // per-letter inequality at every unconditioned (k, x)
    bool all_ok() const { return step_count_ok && event_prob_ok && pointwise_ok; }
};

// Exhaustive re-verification of a result against the instance, independent of
// the search routine.
WringingCheck verify_wringing(const ProductApproxInstance& inst, const WringingResult& result);

// ---- Quantized-codebook pipeline ----

using Codebook = std::vector<std::vector<double>>;  // M_i codewords x n reals

struct QuantizedWringingCertificate {
    // subcode size: |A| >= lambda^(c/delta) * ((1-eps)/(2(1+eps))) * prod_T M_i
    double size_lhs, size_rhs;
    bool size_ok;
    // per-letter domination of conditioned p by the product of per-source
    // conditioned reference marginals (max'ed with lambda)
    bool domination_ok;
    // power moment: sum_{i in T} sum_k E_u[Xhat^2] <= sum_T n P_i
    double power_lhs, power_rhs;
    bool power_ok;
    // quantized alphabet size: |Xhat_T| <= n^(3|T|/2) * prod_T (2 sqrt(P_i) + 3)
    double alphabet_lhs, alphabet_rhs;
    bool alphabet_ok;
    bool all_ok() const { return size_ok && domination_ok && power_ok && alphabet_ok; }
};

struct QuantizedWringingResult {
    std::vector<std::vector<std::uint64_t>> subcode_support;  // surviving message tuples
    // reference marginals: ref_marginals[i][k] maps grid index -> mass for the
    // i-th subset source at letter k, under the conditioned product reference
    std::vector<std::vector<std::map<std::int64_t, double>>> ref_marginals;
    std::vector<QuantizerSpec> quantizers;     // one per subset source
    WringingResult wringing;
    QuantizedWringingCertificate certificate;
    double c, delta, lambda;
};

// Quantizes the subset sources' codewords, builds the code-induced joint and
// the uniform-codebook product reference, runs the conditioning search on the
// per-letter symbols, and returns the surviving subcode with a fully checked
// certificate.  `support` holds message tuples (0-based per-source indices);
// its uniform distribution must not exceed (2(1+eps)/(1-eps)) / prod_T M_i per
// subset projection.
QuantizedWringingResult quantized_code_wringing(const std::vector<Codebook>& codebooks,
                                                const PowerVector& powers,
                                                const std::vector<std::vector<std::uint64_t>>& support,
                                                const std::vector<int>& t_members,
                                                double epsilon);

}  // namespace macsc
