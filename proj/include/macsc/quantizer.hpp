#pragma once

#include <cstdint>
#include <vector>

namespace macsc {

// Symmetric scalar quantizer on the grid {-L*delta, ..., -delta, 0, delta, ..., L*delta}.
// Grid points are carried as integer indices so membership and idempotence are exact.
struct QuantizerSpec {
    std::int64_t levels;  // L >= 1
    double precision;     // delta > 0

    QuantizerSpec(std::int64_t l, double d);

    std::int64_t grid_size() const { return 2 * levels + 1; }
    double domain_max() const { return static_cast<double>(levels) * precision; }
    double value_of(std::int64_t index) const { return static_cast<double>(index) * precision; }
};

// Quantizer used on length-n codewords under power P: L = ceil(n*sqrt(n*P)), delta = 1/n.
QuantizerSpec code_quantizer_spec(std::int64_t n, double power);

// Rounds toward zero onto the grid; |x| may exceed the domain by at most a
// relative 1e-15 slack (absorbed), anything larger throws.
std::int64_t quantize_index(const QuantizerSpec& spec, double x);

inline double quantize(const QuantizerSpec& spec, double x) {
    return spec.value_of(quantize_index(spec, x));
}

std::vector<std::int64_t> quantize_vec_index(const QuantizerSpec& spec,
                                             const std::vector<double>& x);
std::vector<double> quantize_vec(const QuantizerSpec& spec, const std::vector<double>& x);

}  // namespace macsc
