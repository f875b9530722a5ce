#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "macsc/expurgation.hpp"
#include "macsc/regions.hpp"
#include "macsc/wringing.hpp"  // Codebook

namespace macsc {

struct GaussianMacConfig {
    std::size_t n;
    PowerVector powers;
    std::vector<std::uint64_t> message_sizes;
    std::uint64_t tuple_cap = std::uint64_t{1} << 20;  // exhaustive-ML budget

    GaussianMacConfig(std::size_t n_, PowerVector powers_, std::vector<std::uint64_t> sizes);
    std::uint64_t tuple_count() const;
};

enum class CodebookKind { sphere, iid_gauss_scaled };

struct SimResult {
    std::uint64_t trials = 0;
    std::uint64_t errors = 0;
    double error_prob = 0.0;
    double ci_lo = 0.0;  // Wilson 95%
    double ci_hi = 0.0;
    std::uint64_t seed = 0;
};

// Wilson score interval at 95%
void wilson_interval(std::uint64_t errors, std::uint64_t trials, double& lo, double& hi);

// One codebook per source; every codeword satisfies ||x||^2 <= n P_i exactly
// (rescaled onto the sphere when the raw draw exceeds it).
std::vector<Codebook> generate_codebooks(const GaussianMacConfig& cfg, CodebookKind kind,
                                         std::uint64_t seed);

// Uniform message tuples, Y = sum_i x_i(w_i) + Z, exhaustive nearest-sum ML
// decoding with uniform tie-breaking.  Per-trial substreams make the result a
// pure function of (cfg, books, trials, seed), independent of `threads`.
SimResult simulate_mac_error(const GaussianMacConfig& cfg, const std::vector<Codebook>& books,
                             std::uint64_t trials, std::uint64_t seed, unsigned threads = 1);

// Per-message-tuple conditional error, bridging into expurgate().
CodeErrorProfile measure_error_profile(const GaussianMacConfig& cfg,
                                       const std::vector<Codebook>& books,
                                       std::uint64_t trials_per_tuple, std::uint64_t seed,
                                       unsigned threads = 1);

struct ScanRow {
    double multiplier;
    std::uint64_t n;
    std::vector<std::uint64_t> message_sizes;
    SimResult result;
};

// Equal-rate points R_i = multiplier * (sum capacity)/N with M_i = ceil(2^{nR_i}),
// fresh random codebooks per cell.
std::vector<ScanRow> phase_transition_scan(const PowerVector& powers,
                                           const std::vector<double>& multipliers,
                                           const std::vector<std::uint64_t>& n_list,
                                           std::uint64_t trials, std::uint64_t seed,
                                           unsigned threads = 1);

// Flat binary codebook container: magic "MACB1", then little-endian u64 n, N,
// M_1..M_N, then row-major f64 codewords per source.
void save_codebooks(const std::string& path, std::size_t n, const std::vector<Codebook>& books);
std::vector<Codebook> load_codebooks(const std::string& path, std::size_t& n_out);

struct IcConfig {
    std::size_t n;
    double p1, p2;
    double g12, g21;  // cross gains; strong interference needs g^2 >= 1
    std::uint64_t m1, m2;
    double noise_corr = 0.0;  // correlation of (Z1, Z2)
    std::uint64_t tuple_cap = std::uint64_t{1} << 20;

    IcConfig(std::size_t n_, double p1_, double p2_, double g12_, double g21_,
             std::uint64_t m1_, std::uint64_t m2_);
};

struct IcSimResult {
    SimResult plain1, plain2;          // Pr{what_i != W_i} at each destination
    SimResult multicast1, multicast2;  // Pr{(what_1, what_2) != (W_1, W_2)} per destination
    std::uint64_t anchor1 = 0, anchor2 = 0;  // chosen w1*, w2*
    double ks_stat = 0.0;      // two-sample KS on one constructed coordinate
    double ks_critical = 0.0;  // 1% critical value
    bool ks_reject = false;
};

// Paired simulation of the plain IC code and the constructed multicast code.
// Destination 1's second decoder feeds destination 2's ML decoder with
// g21 f1(w1*) + (Y1 - f1(what_1))/g12 + sqrt(1 - 1/g12^2) Ztilde; symmetric at
// destination 2.  Anchors minimize the other destination's measured
// conditional error (ties to the smallest index).
IcSimResult simulate_ic(const IcConfig& ic, const Codebook& book1, const Codebook& book2,
                        std::uint64_t trials, std::uint64_t seed, std::uint64_t ks_samples = 100000,
                        unsigned threads = 1);

}  // namespace macsc
