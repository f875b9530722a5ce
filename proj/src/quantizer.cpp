#include "macsc/quantizer.hpp"

#include <cmath>
#include <stdexcept>

namespace macsc {

QuantizerSpec::QuantizerSpec(std::int64_t l, double d) : levels(l), precision(d) {
    if (levels < 1) throw std::invalid_argument("QuantizerSpec: levels must be >= 1");
    if (!(precision > 0.0)) throw std::invalid_argument("QuantizerSpec: precision must be > 0");
}

QuantizerSpec code_quantizer_spec(std::int64_t n, double power) {
    if (n < 1) throw std::invalid_argument("code_quantizer_spec: n must be >= 1");
    if (!(power > 0.0)) throw std::invalid_argument("code_quantizer_spec: power must be > 0");
    const double raw = static_cast<double>(n) * std::sqrt(static_cast<double>(n) * power);
    // ceil with a 1e-9 guard so exact integers (e.g. 4*sqrt(4) = 8) stay put
    const auto levels = static_cast<std::int64_t>(std::ceil(raw - 1e-9));
    return {levels, 1.0 / static_cast<double>(n)};
}

std::int64_t quantize_index(const QuantizerSpec& spec, double x) {
    const double limit = spec.domain_max();
    if (std::abs(x) > limit * (1.0 + 1e-15)) {
        throw std::domain_error("quantize: input outside [-L*delta, L*delta]");
    }
    const double mag = std::min(std::abs(x), limit);
    const double q = mag / spec.precision;
    auto idx = static_cast<std::int64_t>(std::floor(q));
    // re-quantizing a grid point can land 1 ulp under the integer; snap back
    if (static_cast<double>(idx + 1) - q <= 8.0 * 2.220446049250313e-16 * std::max(1.0, q))
        ++idx;
    if (idx > spec.levels) idx = spec.levels;
    return x < 0.0 ? -idx : idx;
}

std::vector<std::int64_t> quantize_vec_index(const QuantizerSpec& spec,
                                             const std::vector<double>& x) {
    std::vector<std::int64_t> out;
    out.reserve(x.size());
    for (double v : x) out.push_back(quantize_index(spec, v));
    return out;
}

std::vector<double> quantize_vec(const QuantizerSpec& spec, const std::vector<double>& x) {
    std::vector<double> out;
    out.reserve(x.size());
    for (double v : x) out.push_back(quantize(spec, v));
    return out;
}

}  // namespace macsc
