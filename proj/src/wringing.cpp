#include "macsc/wringing.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace macsc {

namespace {

void validate_dist(const SparseDist& d, std::size_t n, std::size_t alphabet, const char* name) {
    double total = 0.0;
    for (const auto& [seq, mass] : d) {
        if (seq.size() != n) throw std::invalid_argument(std::string(name) + ": sequence length != n");
        for (std::uint32_t s : seq)
            if (s >= alphabet) throw std::invalid_argument(std::string(name) + ": symbol out of range");
        if (!(mass > 0.0)) throw std::invalid_argument(std::string(name) + ": atoms must have positive mass");
        total += mass;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw std::invalid_argument(std::string(name) + ": masses must sum to 1");
}

// marginal of coordinate k (input need not be normalized; output shares its scale)
std::map<std::uint32_t, double> marginal(const SparseDist& d, std::size_t k) {
    std::map<std::uint32_t, double> out;
    for (const auto& [seq, mass] : d) out[seq[k]] += mass;
    return out;
}

double total_mass(const SparseDist& d) {
    double t = 0.0;
    for (const auto& [seq, mass] : d) t += mass;
    return t;
}

SparseDist restrict_and_normalize(const SparseDist& d, std::size_t k, std::uint32_t value,
                                  double* event_mass = nullptr) {
    SparseDist out;
    double kept = 0.0;
    for (const auto& [seq, mass] : d)
        if (seq[k] == value) {
            out[seq] = mass;
            kept += mass;
        }
    if (event_mass) *event_mass = kept;
    if (kept > 0.0)
        for (auto& [seq, mass] : out) mass /= kept;
    return out;
}

}  // namespace

ProductApproxInstance::ProductApproxInstance(std::size_t n_, std::size_t alphabet_, SparseDist p_,
                                             SparseDist u_, double c_, double delta_, double lambda_)
    : n(n_), alphabet(alphabet_), p(std::move(p_)), u(std::move(u_)),
      c(c_), delta(delta_), lambda(lambda_) {
    if (n == 0) throw std::invalid_argument("ProductApproxInstance: n must be >= 1");
    if (alphabet == 0) throw std::invalid_argument("ProductApproxInstance: empty alphabet");
    if (!(c > 0.0)) throw std::invalid_argument("ProductApproxInstance: c must be positive");
    if (!(delta > 0.0 && delta < c))
        throw std::invalid_argument("ProductApproxInstance: delta must lie in (0, c)");
    if (!(lambda > 0.0 && lambda < 1.0))
        throw std::invalid_argument("ProductApproxInstance: lambda must lie in (0, 1)");
    validate_dist(p, n, alphabet, "p");
    validate_dist(u, n, alphabet, "u");
    for (const auto& [seq, mass] : p) {
        auto it = u.find(seq);
        const double um = it == u.end() ? 0.0 : it->second;
        if (mass > (1.0 + c) * um * (1.0 + 1e-9))
            throw std::invalid_argument("ProductApproxInstance: p <= (1+c)u violated");
    }
}

WringingResult wring(const ProductApproxInstance& inst) {
    WringingResult result;
    result.event_prob = 1.0;
    result.p_conditioned = inst.p;
    result.u_conditioned = inst.u;
    std::set<std::size_t> conditioned;
    const auto max_steps = static_cast<std::size_t>(std::ceil(inst.c / inst.delta));

    for (;;) {
        bool found = false;
        std::size_t viol_k = 0;
        std::uint32_t viol_x = 0;
        double viol_p = 0.0, viol_u = 0.0;
        for (std::size_t k = 0; k < inst.n && !found; ++k) {
            if (conditioned.count(k)) continue;
            const auto pm = marginal(result.p_conditioned, k);
            const auto um = marginal(result.u_conditioned, k);
            for (std::uint32_t x = 0; x < inst.alphabet; ++x) {
                auto pit = pm.find(x);
                if (pit == pm.end()) continue;
                auto uit = um.find(x);
                const double uv = uit == um.end() ? 0.0 : uit->second;
                const double threshold = std::max((1.0 + inst.delta) * uv, inst.lambda);
                if (pit->second > threshold * (1.0 + 1e-12)) {
                    found = true;
                    viol_k = k;
                    viol_x = x;
                    viol_p = pit->second;
                    viol_u = uv;
                    break;
                }
            }
        }
        if (!found) break;
        if (result.steps.size() >= max_steps)
            throw std::logic_error("wring: conditioning exceeded ceil(c/delta) steps");
        if (viol_u <= 0.0)
            throw std::domain_error("wring: conditioning event has zero reference mass");
        result.p_conditioned = restrict_and_normalize(result.p_conditioned, viol_k, viol_x);
        result.u_conditioned = restrict_and_normalize(result.u_conditioned, viol_k, viol_x);
        result.steps.push_back({viol_k, viol_x, viol_p, viol_u});
        result.event_prob *= viol_p;
        conditioned.insert(viol_k);
    }

    const auto check = verify_wringing(inst, result);
    if (!check.all_ok()) throw std::logic_error("wring: result failed self-verification");
    return result;
}

WringingCheck verify_wringing(const ProductApproxInstance& inst, const WringingResult& result) {
    WringingCheck check{};
    const auto l = static_cast<double>(result.step_count());
    check.step_count_ok = l <= inst.c / inst.delta + 1e-12;

    // rebuild the event from scratch (unnormalized restrictions of the originals)
    SparseDist p_event = inst.p;
    SparseDist u_event = inst.u;
    std::set<std::size_t> conditioned;
    for (const auto& step : result.steps) {
        SparseDist pn, un;
        for (const auto& [seq, mass] : p_event)
            if (seq[step.coordinate] == step.value) pn[seq] = mass;
        for (const auto& [seq, mass] : u_event)
            if (seq[step.coordinate] == step.value) un[seq] = mass;
        p_event = std::move(pn);
        u_event = std::move(un);
        conditioned.insert(step.coordinate);
    }
    const double p_mass = total_mass(p_event);
    const double u_mass = total_mass(u_event);
    check.event_prob_ok = p_mass >= std::pow(inst.lambda, l) * (1.0 - 1e-9);

    check.pointwise_ok = true;
    if (p_mass > 0.0 && u_mass > 0.0) {
        for (std::size_t k = 0; k < inst.n; ++k) {
            if (conditioned.count(k)) continue;
            const auto pm = marginal(p_event, k);
            const auto um = marginal(u_event, k);
            for (const auto& [x, pv_raw] : pm) {
                const double pv = pv_raw / p_mass;
                auto uit = um.find(x);
                const double uv = (uit == um.end() ? 0.0 : uit->second) / u_mass;
                const double threshold = std::max((1.0 + inst.delta) * uv, inst.lambda);
                if (pv > threshold + 1e-9) check.pointwise_ok = false;
            }
        }
    } else if (p_mass <= 0.0) {
        check.event_prob_ok = false;
    }
    return check;
}

QuantizedWringingResult quantized_code_wringing(const std::vector<Codebook>& codebooks,
                                                const PowerVector& powers,
                                                const std::vector<std::vector<std::uint64_t>>& support,
                                                const std::vector<int>& t_members,
                                                double epsilon) {
    const std::size_t n_sources = codebooks.size();
    if (powers.size() != n_sources)
        throw std::invalid_argument("quantized_code_wringing: powers/codebooks arity mismatch");
    if (!(epsilon >= 0.0 && epsilon < 1.0))
        throw std::invalid_argument("quantized_code_wringing: epsilon must lie in [0,1)");
    if (support.empty()) throw std::invalid_argument("quantized_code_wringing: empty support");

    std::vector<int> t_sorted = t_members;
    std::sort(t_sorted.begin(), t_sorted.end());
    if (t_sorted.empty() || std::unique(t_sorted.begin(), t_sorted.end()) != t_sorted.end() ||
        t_sorted.front() < 1 || static_cast<std::size_t>(t_sorted.back()) > n_sources)
        throw std::invalid_argument("quantized_code_wringing: invalid subset");
    const std::size_t tsize = t_sorted.size();

    std::size_t n = 0;
    for (std::size_t i = 0; i < n_sources; ++i) {
        if (codebooks[i].empty())
            throw std::invalid_argument("quantized_code_wringing: empty codebook");
        for (const auto& word : codebooks[i]) {
            if (n == 0) n = word.size();
            if (word.size() != n)
                throw std::invalid_argument("quantized_code_wringing: codeword length mismatch");
            double energy = 0.0;
            for (double v : word) energy += v * v;
            if (energy > static_cast<double>(n) * powers[i] * (1.0 + 1e-12))
                throw std::domain_error("quantized_code_wringing: peak power violated");
        }
    }
    if (n < 2) throw std::invalid_argument("quantized_code_wringing: n must be >= 2");

    // quantize the subset sources' codewords to grid indices
    std::vector<QuantizerSpec> specs;
    std::vector<std::vector<std::vector<std::int64_t>>> qc(tsize);  // [pos][w][k]
    double prod_mt = 1.0;
    for (std::size_t pos = 0; pos < tsize; ++pos) {
        const std::size_t src = static_cast<std::size_t>(t_sorted[pos]) - 1;
        specs.push_back(code_quantizer_spec(static_cast<std::int64_t>(n), powers[src]));
        for (const auto& word : codebooks[src])
            qc[pos].push_back(quantize_vec_index(specs[pos], word));
        prod_mt *= static_cast<double>(codebooks[src].size());
    }

    // per-letter symbols: tuples of per-source grid indices, interned to ids
    std::map<std::vector<std::int64_t>, std::uint32_t> symbol_ids;
    std::vector<std::vector<std::int64_t>> symbols;
    auto intern = [&](const std::vector<std::int64_t>& tuple) {
        auto [it, inserted] = symbol_ids.emplace(tuple, static_cast<std::uint32_t>(symbols.size()));
        if (inserted) symbols.push_back(tuple);
        return it->second;
    };
    auto sequence_of = [&](const std::vector<std::uint64_t>& w_t) {
        Sequence seq(n);
        std::vector<std::int64_t> tuple(tsize);
        for (std::size_t k = 0; k < n; ++k) {
            for (std::size_t pos = 0; pos < tsize; ++pos) tuple[pos] = qc[pos][w_t[pos]][k];
            seq[k] = intern(tuple);
        }
        return seq;
    };

    // p: pushforward of uniform-on-support through the quantized subset codewords
    SparseDist p;
    std::map<std::vector<std::uint64_t>, std::uint64_t> head_counts;
    std::vector<std::vector<std::uint64_t>> support_heads;
    for (const auto& tuple : support) {
        if (tuple.size() != n_sources)
            throw std::invalid_argument("quantized_code_wringing: support tuple arity mismatch");
        std::vector<std::uint64_t> head(tsize);
        for (std::size_t pos = 0; pos < tsize; ++pos) {
            const std::size_t src = static_cast<std::size_t>(t_sorted[pos]) - 1;
            if (tuple[src] >= codebooks[src].size())
                throw std::invalid_argument("quantized_code_wringing: support index out of range");
            head[pos] = tuple[src];
        }
        support_heads.push_back(head);
        ++head_counts[head];
        p[sequence_of(head)] += 1.0 / static_cast<double>(support.size());
    }
    const double mass_cap = 2.0 * (1.0 + epsilon) / ((1.0 - epsilon) * prod_mt);
    for (const auto& [head, count] : head_counts)
        if (static_cast<double>(count) / static_cast<double>(support.size()) >
            mass_cap * (1.0 + 1e-12))
            throw std::domain_error(
                "quantized_code_wringing: support projection mass exceeds 2(1+eps)/((1-eps) prod M)");

    // u: product over subset sources of the uniform-over-codebook pushforward
    SparseDist u;
    std::vector<std::uint64_t> combo(tsize, 0);
    for (;;) {
        u[sequence_of(combo)] += 1.0 / prod_mt;
        std::size_t pos = tsize;
        while (pos-- > 0) {
            const std::size_t src = static_cast<std::size_t>(t_sorted[pos]) - 1;
            if (++combo[pos] < codebooks[src].size()) break;
            combo[pos] = 0;
            if (pos == 0) goto combos_done;
        }
    }
combos_done:;

    const double c = (1.0 + 3.0 * epsilon) / (1.0 - epsilon);
    const double delta = std::sqrt(std::log2(static_cast<double>(n)) / static_cast<double>(n));
    const double lambda = std::pow(static_cast<double>(n), -4.0 * static_cast<double>(tsize));

    QuantizedWringingResult out;
    out.quantizers = specs;
    out.c = c;
    out.delta = delta;
    out.lambda = lambda;
    ProductApproxInstance inst(n, symbols.size(), std::move(p), std::move(u), c, delta, lambda);
    out.wringing = wring(inst);

    // surviving subcode: support tuples whose head sequence satisfies every step
    for (std::size_t s = 0; s < support.size(); ++s) {
        const Sequence seq = sequence_of(support_heads[s]);
        bool keep = true;
        for (const auto& step : out.wringing.steps)
            if (seq[step.coordinate] != step.value) { keep = false; break; }
        if (keep) out.subcode_support.push_back(support[s]);
    }
    if (out.subcode_support.empty())
        throw std::logic_error("quantized_code_wringing: surviving subcode is empty");

    // reference marginals per subset source and letter, from the conditioned u
    out.ref_marginals.assign(tsize, std::vector<std::map<std::int64_t, double>>(n));
    for (const auto& [seq, mass] : out.wringing.u_conditioned)
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t pos = 0; pos < tsize; ++pos)
                out.ref_marginals[pos][k][symbols[seq[k]][pos]] += mass;

    auto& cert = out.certificate;

    // subcode size bound
    cert.size_lhs = static_cast<double>(out.subcode_support.size());
    cert.size_rhs = std::pow(lambda, c / delta) *
                    ((1.0 - epsilon) / (2.0 * (1.0 + epsilon))) * prod_mt;
    cert.size_ok = cert.size_lhs >= cert.size_rhs * (1.0 - 1e-9);

    // per-letter domination of the conditioned p by the product of per-source
    // conditioned reference marginals, max'ed with lambda
    cert.domination_ok = true;
    std::set<std::size_t> conditioned;
    for (const auto& step : out.wringing.steps) conditioned.insert(step.coordinate);
    for (std::size_t k = 0; k < n; ++k) {
        if (conditioned.count(k)) continue;
        std::map<std::uint32_t, double> pm;
        for (const auto& [seq, mass] : out.wringing.p_conditioned) pm[seq[k]] += mass;
        for (const auto& [sym, pv] : pm) {
            double uprod = 1.0;
            for (std::size_t pos = 0; pos < tsize; ++pos) {
                auto it = out.ref_marginals[pos][k].find(symbols[sym][pos]);
                uprod *= it == out.ref_marginals[pos][k].end() ? 0.0 : it->second;
            }
            if (pv > std::max((1.0 + delta) * uprod, lambda) + 1e-9) cert.domination_ok = false;
        }
    }

    // power moment under the conditioned reference
    cert.power_lhs = 0.0;
    cert.power_rhs = 0.0;
    for (std::size_t pos = 0; pos < tsize; ++pos) {
        const std::size_t src = static_cast<std::size_t>(t_sorted[pos]) - 1;
        cert.power_rhs += static_cast<double>(n) * powers[src];
        for (std::size_t k = 0; k < n; ++k)
            for (const auto& [idx, mass] : out.ref_marginals[pos][k]) {
                const double v = specs[pos].value_of(idx);
                cert.power_lhs += mass * v * v;
            }
    }
    cert.power_ok = cert.power_lhs <= cert.power_rhs * (1.0 + 1e-9) + 1e-9;

    // quantized alphabet cardinality
    cert.alphabet_lhs = 1.0;
    cert.alphabet_rhs = std::pow(static_cast<double>(n), 1.5 * static_cast<double>(tsize));
    for (std::size_t pos = 0; pos < tsize; ++pos) {
        const std::size_t src = static_cast<std::size_t>(t_sorted[pos]) - 1;
        cert.alphabet_lhs *= static_cast<double>(specs[pos].grid_size());
        cert.alphabet_rhs *= 2.0 * std::sqrt(powers[src]) + 3.0;
    }
    cert.alphabet_ok = cert.alphabet_lhs <= cert.alphabet_rhs * (1.0 + 1e-12);

    return out;
}

}  // namespace macsc
