#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "macsc/regions.hpp"

namespace macsc {

// Inputs for the finite-blocklength sum-rate bound.  `gamma` is the target
// asymptotic average error in [0,1); the bound internally works with
// gamma_bar = (1+gamma)/2.
struct BoundInputs {
    double n;            // blocklength (real-valued to allow asymptotic scans)
    double gamma;        // in [0,1)
    PowerVector powers;
    std::vector<int> t_members;  // non-empty subset of {1..N}, 1-based

    BoundInputs(double n_, double gamma_, PowerVector powers_, std::vector<int> t_);
    double gamma_bar() const { return 0.5 * (1.0 + gamma); }
    double subset_power() const;  // |P_T| = sum_{i in T} P_i
    std::size_t subset_size() const { return t_members.size(); }
};

// kappa1 = 4|T| sum_T sqrt(P_i);  kappa2 = 4|T|^2 |P_T| prod_T (2 sqrt(P_i)+3)
std::pair<double, double> kappa_constants(const PowerVector& p, const std::vector<int>& t_members);

// Per-letter mean and variance (bits) of the log-likelihood ratio between the
// true channel output and the inflated-variance reference, at input symbols x
// with reference means `means`; b = sum_T (x_i - means_i).
std::pair<double, double> llr_moments(const std::vector<double>& x,
                                      const std::vector<double>& means, const PowerVector& p,
                                      const std::vector<int>& t_members);

// log2 of the Chebyshev threshold: sum_k mean_k + sqrt((2/(1-gamma_bar)) sum_k var_k)
double log_xi(const std::vector<std::vector<double>>& xs,
              const std::vector<std::vector<double>>& means, double gamma_bar,
              const PowerVector& p, const std::vector<int>& t_members);

// All additive terms of the sum-rate bound, in bits.
struct BoundReport {
    double kappa1, kappa2;
    double capacity_term;      // (n/2) log2(1+|P_T|)
    double quadratic_term;     // quantization/moment correction
    double chebyshev_term;     // sqrt(variance) deviation term
    double feasibility_term;   // log2(2/(1-gamma_bar))
    double wringing_term;      // (4|T|(1+3 gamma_bar)/(1-gamma_bar)) sqrt(n log2 n)
    double expurgation_term;   // log2(2(1+gamma_bar)/(1-gamma_bar))
    double sum_log_m_upper;    // total bound on sum_T log2 M_i
    double per_symbol_rate_upper;
    double second_order_gap;   // (sum_log_m_upper - capacity_term)/sqrt(n log2 n)
};

BoundReport sum_rate_upper_bound(const BoundInputs& in);

double second_order_gap(const BoundInputs& in);

// n -> infinity limit of second_order_gap:
// |P_T| log2(e)/(2(1+|P_T|)) + 4|T|(1+3 gamma_bar)/(1-gamma_bar)
double second_order_gap_limit(const BoundInputs& in);

}  // namespace macsc
