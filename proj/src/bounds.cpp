#include "macsc/bounds.hpp"

#include <cmath>
#include <stdexcept>

namespace macsc {

namespace {
const double kLog2E = 1.4426950408889634;  // log2(e)

std::vector<std::size_t> subset_indices(const PowerVector& p, const std::vector<int>& t_members) {
    if (t_members.empty()) throw std::invalid_argument("subset must be non-empty");
    std::vector<std::size_t> out;
    for (int m : t_members) {
        if (m < 1 || static_cast<std::size_t>(m) > p.size())
            throw std::invalid_argument("subset member out of range");
        out.push_back(static_cast<std::size_t>(m) - 1);
    }
    return out;
}
}  // namespace

BoundInputs::BoundInputs(double n_, double gamma_, PowerVector powers_, std::vector<int> t_)
    : n(n_), gamma(gamma_), powers(std::move(powers_)), t_members(std::move(t_)) {
    if (!(n >= 1.0)) throw std::invalid_argument("BoundInputs: n must be >= 1");
    if (!(gamma >= 0.0 && gamma < 1.0))
        throw std::invalid_argument("BoundInputs: gamma must lie in [0,1)");
    subset_indices(powers, t_members);  // validates
}

double BoundInputs::subset_power() const {
    double total = 0.0;
    for (std::size_t i : subset_indices(powers, t_members)) total += powers[i];
    return total;
}

std::pair<double, double> kappa_constants(const PowerVector& p, const std::vector<int>& t_members) {
    const auto idx = subset_indices(p, t_members);
    const double tsize = static_cast<double>(idx.size());
    double sum_sqrt = 0.0, sum_p = 0.0, prod = 1.0;
    for (std::size_t i : idx) {
        sum_sqrt += std::sqrt(p[i]);
        sum_p += p[i];
        prod *= 2.0 * std::sqrt(p[i]) + 3.0;
    }
    const double kappa1 = 4.0 * tsize * sum_sqrt;
    const double kappa2 = 4.0 * tsize * tsize * sum_p * prod;
    return {kappa1, kappa2};
}

std::pair<double, double> llr_moments(const std::vector<double>& x,
                                      const std::vector<double>& means, const PowerVector& p,
                                      const std::vector<int>& t_members) {
    const auto idx = subset_indices(p, t_members);
    if (x.size() != idx.size() || means.size() != idx.size())
        throw std::invalid_argument("llr_moments: x/means must have one entry per subset source");
    double pt = 0.0;
    for (std::size_t i : idx) pt += p[i];
    double b = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) b += x[j] - means[j];
    const double mean = 0.5 * std::log2(1.0 + pt) +
                        kLog2E / (2.0 * (1.0 + pt)) * (-pt + b * b);
    const double variance = (pt * pt + 2.0 * b * b) * kLog2E * kLog2E /
                            (2.0 * (1.0 + pt) * (1.0 + pt));
    return {mean, variance};
}

double log_xi(const std::vector<std::vector<double>>& xs,
              const std::vector<std::vector<double>>& means, double gamma_bar,
              const PowerVector& p, const std::vector<int>& t_members) {
    if (!(gamma_bar < 1.0)) throw std::invalid_argument("log_xi: gamma_bar must be < 1");
    if (xs.size() != means.size()) throw std::invalid_argument("log_xi: xs/means length mismatch");
    double sum_mean = 0.0, sum_var = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const auto [m, v] = llr_moments(xs[k], means[k], p, t_members);
        sum_mean += m;
        sum_var += v;
    }
    return sum_mean + std::sqrt(2.0 / (1.0 - gamma_bar) * sum_var);
}

BoundReport sum_rate_upper_bound(const BoundInputs& in) {
    if (!(in.n >= 2.0)) throw std::invalid_argument("sum_rate_upper_bound: n must be >= 2");
    const double n = in.n;
    const double pt = in.subset_power();
    const double tsize = static_cast<double>(in.subset_size());
    const double gb = in.gamma_bar();
    const double sqrt_nlogn = std::sqrt(n * std::log2(n));
    const double sqrt_n = std::sqrt(n);

    BoundReport r;
    const auto [k1, k2] = kappa_constants(in.powers, in.t_members);
    r.kappa1 = k1;
    r.kappa2 = k2;
    r.capacity_term = 0.5 * n * std::log2(1.0 + pt);
    r.quadratic_term = (sqrt_nlogn * pt + sqrt_n * k1 + k2 + tsize * tsize / n) *
                       kLog2E / (2.0 * (1.0 + pt));
    r.chebyshev_term = std::sqrt(n * pt * (pt + 2.0) + 2.0 * sqrt_nlogn * pt +
                                 2.0 * sqrt_n * k1 + 2.0 * k2 + 2.0 * tsize * tsize / n) *
                       kLog2E / ((1.0 + pt) * std::sqrt(1.0 - gb));
    r.feasibility_term = std::log2(2.0 / (1.0 - gb));
    r.wringing_term = 4.0 * tsize * (1.0 + 3.0 * gb) / (1.0 - gb) * sqrt_nlogn;
    r.expurgation_term = std::log2(2.0 * (1.0 + gb) / (1.0 - gb));
    r.sum_log_m_upper = r.capacity_term + r.quadratic_term + r.chebyshev_term +
                        r.feasibility_term + r.wringing_term + r.expurgation_term;
    r.per_symbol_rate_upper = r.sum_log_m_upper / n;
    r.second_order_gap = (r.sum_log_m_upper - r.capacity_term) / sqrt_nlogn;
    return r;
}

double second_order_gap(const BoundInputs& in) {
    return sum_rate_upper_bound(in).second_order_gap;
}

double second_order_gap_limit(const BoundInputs& in) {
    const double pt = in.subset_power();
    const double gb = in.gamma_bar();
    const double tsize = static_cast<double>(in.subset_size());
    return pt * kLog2E / (2.0 * (1.0 + pt)) + 4.0 * tsize * (1.0 + 3.0 * gb) / (1.0 - gb);
}

}  // namespace macsc
