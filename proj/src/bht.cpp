#include "macsc/bht.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace macsc {

FiniteDistribution::FiniteDistribution(std::vector<double> m) : mass(std::move(m)) {
    if (mass.empty()) throw std::invalid_argument("FiniteDistribution: empty alphabet");
    double total = 0.0;
    for (double v : mass) {
        if (!(v >= 0.0)) throw std::invalid_argument("FiniteDistribution: negative mass");
        total += v;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw std::invalid_argument("FiniteDistribution: masses must sum to 1 within 1e-12");
}

BetaResult beta(double delta, const FiniteDistribution& p, const FiniteDistribution& q) {
    if (p.size() != q.size()) throw std::invalid_argument("beta: alphabets differ");
    if (!(delta >= 0.0) || !(delta <= 1.0))
        throw std::invalid_argument("beta: delta must lie in [0,1]");

    const std::size_t m = p.size();
    // Symbols ranked by p/q descending; q=0,p>0 counts as +inf, p=q=0 skipped.
    std::vector<std::size_t> order;
    order.reserve(m);
    for (std::size_t x = 0; x < m; ++x)
        if (p[x] > 0.0 || q[x] > 0.0) order.push_back(x);
    auto ratio = [&](std::size_t x) {
        return q[x] > 0.0 ? p[x] / q[x] : std::numeric_limits<double>::infinity();
    };
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return ratio(a) > ratio(b); });

    BinaryTest test{std::vector<double>(m, 0.0)};
    double acc_p = 0.0;
    double acc_q = 0.0;
    for (std::size_t x : order) {
        if (acc_p >= delta) break;
        if (p[x] == 0.0) continue;  // accepting would only add type-II error
        if (acc_p + p[x] <= delta) {
            test.accept_prob[x] = 1.0;
            acc_p += p[x];
            acc_q += q[x];
        } else {
            const double r = (delta - acc_p) / p[x];
            test.accept_prob[x] = r;
            acc_p = delta;
            acc_q += r * q[x];
        }
    }
    if (acc_p + 1e-12 < delta)
        throw std::invalid_argument("beta: p has total mass < delta");  // unreachable for valid p
    return {acc_q, std::move(test)};
}

DpiReport verify_dpi(const FiniteDistribution& p, const FiniteDistribution& q,
                     const std::function<std::size_t(std::size_t)>& mapping,
                     std::size_t image_size, double delta) {
    std::vector<double> pg(image_size, 0.0);
    std::vector<double> qg(image_size, 0.0);
    for (std::size_t x = 0; x < p.size(); ++x) {
        const std::size_t y = mapping(x);
        if (y >= image_size) throw std::invalid_argument("verify_dpi: mapping out of range");
        pg[y] += p[x];
        qg[y] += q[x];
    }
    const double b0 = beta(delta, p, q).beta;
    const double b1 = beta(delta, FiniteDistribution{std::move(pg)},
                           FiniteDistribution{std::move(qg)}).beta;
    return {b0 <= b1 + 1e-12, b0, b1};
}

double beta_lower_bound(double delta, const FiniteDistribution& p,
                        const FiniteDistribution& q, double xi) {
    if (!(xi > 0.0)) throw std::invalid_argument("beta_lower_bound: xi must be positive");
    double tail = 0.0;  // Pr_p[p/q >= xi]
    for (std::size_t x = 0; x < p.size(); ++x) {
        if (p[x] == 0.0) continue;
        if (q[x] == 0.0 || p[x] / q[x] >= xi) tail += p[x];
    }
    return (delta - tail) / xi;
}

DecodingBoundReport verify_decoding_bound(const FiniteDistribution& joint,
                                          const FiniteDistribution& qv) {
    const std::size_t m = qv.size();
    if (joint.size() != m * m)
        throw std::invalid_argument("verify_decoding_bound: joint must be m x m row-major");

    // alpha = max over rows with positive marginal of Pr{V != u | U = u}
    double alpha = 0.0;
    std::vector<double> marginal(m, 0.0);
    for (std::size_t u = 0; u < m; ++u) {
        double row = 0.0;
        for (std::size_t v = 0; v < m; ++v) row += joint[u * m + v];
        marginal[u] = row;
        if (row <= 0.0) continue;
        const double cond_err = (row - joint[u * m + u]) / row;
        alpha = std::max(alpha, cond_err);
    }
    if (alpha >= 1.0)
        throw std::domain_error("verify_decoding_bound: some row decodes incorrectly with certainty");

    DecodingBoundReport report;
    report.alpha = alpha;
    report.all_hold = true;
    for (std::size_t u = 0; u < m; ++u) {
        if (marginal[u] <= 0.0) continue;
        std::vector<double> row(m);
        for (std::size_t v = 0; v < m; ++v) row[v] = joint[u * m + v] / marginal[u];
        const double b = beta(1.0 - alpha, FiniteDistribution{std::move(row)}, qv).beta;
        const bool ok = b <= qv[u] + 1e-12;
        report.entries.push_back({u, b, qv[u], ok});
        report.all_hold = report.all_hold && ok;
    }
    return report;
}

}  // namespace macsc
