#include "macsc/macsim.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>

#include "macsc/rng.hpp"

namespace macsc {

namespace {

constexpr double kZ95 = 1.959963984540054;

// stream ids partitioning the seed space by purpose
enum : std::uint64_t {
    kStreamCodebook = 1,
    kStreamMacTrials = 2,
    kStreamProfile = 3,
    kStreamScanCells = 4,
    kStreamIcPlain = 5,
    kStreamIcMulticast = 6,
    kStreamIcKsA = 7,
    kStreamIcKsB = 8,
};

std::uint64_t checked_tuple_count(const std::vector<std::uint64_t>& sizes, std::uint64_t cap,
                                  const char* who) {
    std::uint64_t count = 1;
    for (std::uint64_t m : sizes) {
        if (m < 1) throw std::invalid_argument(std::string(who) + ": message sizes must be >= 1");
        if (count > cap / m) throw std::domain_error(std::string(who) + ": tuple cap exceeded");
        count *= m;
    }
    return count;
}

// Splits [0, trials) into contiguous chunks; each trial owns substream = index,
// so results do not depend on the chunking.
template <class PerTrial>
void parallel_trials(std::uint64_t trials, unsigned threads, PerTrial&& body) {
    if (threads <= 1 || trials < 2) {
        for (std::uint64_t t = 0; t < trials; ++t) body(t, 0);
        return;
    }
    const unsigned workers = static_cast<unsigned>(
        std::min<std::uint64_t>(threads, trials));
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            const std::uint64_t lo = trials * w / workers;
            const std::uint64_t hi = trials * (w + 1) / workers;
            for (std::uint64_t t = lo; t < hi; ++t) body(t, w);
        });
    }
    for (auto& th : pool) th.join();
}

// Exhaustive nearest-sum decoder.  For two sources the score splits as
// a(w1) + b(w2) + G(w1,w2) with G = ||x1||^2-free cross term precomputed once.
class MlDecoder {
  public:
    explicit MlDecoder(const std::vector<Codebook>& books) : books_(&books) {
        n_ = (*books_)[0][0].size();
        if (books_->size() == 2) {
            const Codebook& b1 = (*books_)[0];
            const Codebook& b2 = (*books_)[1];
            gram_.resize(b1.size() * b2.size());
            for (std::size_t i = 0; i < b1.size(); ++i)
                for (std::size_t j = 0; j < b2.size(); ++j) {
                    double dot = 0.0;
                    for (std::size_t k = 0; k < n_; ++k) dot += b1[i][k] * b2[j][k];
                    gram_[i * b2.size() + j] = 2.0 * dot;
                }
        }
    }

    // flat tuple index (row-major, last source fastest); ties uniform via rng
    std::uint64_t decode(const std::vector<double>& y, CounterRng& rng) const {
        if (books_->size() == 2) return decode2(y, rng);
        return decode_general(y, rng);
    }

  private:
    std::uint64_t decode2(const std::vector<double>& y, CounterRng& rng) const {
        const Codebook& b1 = (*books_)[0];
        const Codebook& b2 = (*books_)[1];
        auto partial = [&](const Codebook& b) {
            std::vector<double> out(b.size());
            for (std::size_t i = 0; i < b.size(); ++i) {
                double norm = 0.0, dot = 0.0;
                for (std::size_t k = 0; k < n_; ++k) {
                    norm += b[i][k] * b[i][k];
                    dot += y[k] * b[i][k];
                }
                out[i] = norm - 2.0 * dot;
            }
            return out;
        };
        const std::vector<double> a = partial(b1);
        const std::vector<double> b = partial(b2);
        double best = std::numeric_limits<double>::infinity();
        std::uint64_t pick = 0, ties = 0;
        for (std::size_t i = 0; i < b1.size(); ++i) {
            const double* g = gram_.data() + i * b2.size();
            for (std::size_t j = 0; j < b2.size(); ++j) {
                const double score = a[i] + b[j] + g[j];
                if (score < best) {
                    best = score;
                    pick = i * b2.size() + j;
                    ties = 1;
                } else if (score == best) {
                    ++ties;
                    if (rng.next_below(ties) == 0) pick = i * b2.size() + j;
                }
            }
        }
        return pick;
    }

    std::uint64_t decode_general(const std::vector<double>& y, CounterRng& rng) const {
        std::vector<double> residual = y;
        double best = std::numeric_limits<double>::infinity();
        std::uint64_t pick = 0, ties = 0;
        recurse(0, 0, residual, best, pick, ties, rng);
        return pick;
    }

    void recurse(std::size_t source, std::uint64_t flat, std::vector<double>& residual,
                 double& best, std::uint64_t& pick, std::uint64_t& ties, CounterRng& rng) const {
        if (source == books_->size()) {
            double score = 0.0;
            for (double v : residual) score += v * v;
            if (score < best) {
                best = score;
                pick = flat;
                ties = 1;
            } else if (score == best) {
                ++ties;
                if (rng.next_below(ties) == 0) pick = flat;
            }
            return;
        }
        const Codebook& b = (*books_)[source];
        for (std::size_t w = 0; w < b.size(); ++w) {
            for (std::size_t k = 0; k < n_; ++k) residual[k] -= b[w][k];
            recurse(source + 1, flat * b.size() + w, residual, best, pick, ties, rng);
            for (std::size_t k = 0; k < n_; ++k) residual[k] += b[w][k];
        }
    }

    const std::vector<Codebook>* books_;
    std::size_t n_;
    std::vector<double> gram_;
};

std::vector<double> draw_scaled_codeword(CounterRng& rng, std::size_t n, double power,
                                         CodebookKind kind) {
    std::vector<double> word(n);
    double norm2 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        word[k] = rng.next_gauss();
        norm2 += word[k] * word[k];
    }
    const double radius2 = static_cast<double>(n) * power;
    if (kind == CodebookKind::sphere) {
        const double scale = norm2 > 0.0 ? std::sqrt(radius2 / norm2) : 0.0;
        for (double& v : word) v *= scale;
    } else {
        const double sigma = std::sqrt(power);
        for (double& v : word) v *= sigma;
        norm2 *= power;
        if (norm2 > radius2) {
            const double scale = std::sqrt(radius2 / norm2);
            for (double& v : word) v *= scale;
        }
    }
    // one exact re-projection pass so the peak constraint holds to the bit
    double check = 0.0;
    for (double v : word) check += v * v;
    if (check > radius2) {
        const double scale = std::sqrt(radius2 / check);
        for (double& v : word) v *= scale;
    }
    return word;
}

}  // namespace

GaussianMacConfig::GaussianMacConfig(std::size_t n_, PowerVector powers_,
                                     std::vector<std::uint64_t> sizes)
    : n(n_), powers(std::move(powers_)), message_sizes(std::move(sizes)) {
    if (n < 1) throw std::invalid_argument("GaussianMacConfig: n must be >= 1");
    if (message_sizes.size() != powers.size())
        throw std::invalid_argument("GaussianMacConfig: one message size per source required");
    checked_tuple_count(message_sizes, tuple_cap, "GaussianMacConfig");
}

std::uint64_t GaussianMacConfig::tuple_count() const {
    return checked_tuple_count(message_sizes, tuple_cap, "GaussianMacConfig");
}

void wilson_interval(std::uint64_t errors, std::uint64_t trials, double& lo, double& hi) {
    if (trials == 0) {
        lo = 0.0;
        hi = 1.0;
        return;
    }
    const double nt = static_cast<double>(trials);
    const double phat = static_cast<double>(errors) / nt;
    const double z2 = kZ95 * kZ95;
    const double denom = 1.0 + z2 / nt;
    const double center = (phat + z2 / (2.0 * nt)) / denom;
    const double half =
        kZ95 * std::sqrt(phat * (1.0 - phat) / nt + z2 / (4.0 * nt * nt)) / denom;
    // at the boundary counts the interval endpoint is exactly 0 or 1; the
    // cancellation above leaves a rounding residue, so pin it
    lo = errors == 0 ? 0.0 : std::max(0.0, center - half);
    hi = errors == trials ? 1.0 : std::min(1.0, center + half);
}

std::vector<Codebook> generate_codebooks(const GaussianMacConfig& cfg, CodebookKind kind,
                                         std::uint64_t seed) {
    std::vector<Codebook> books(cfg.powers.size());
    for (std::size_t i = 0; i < books.size(); ++i) {
        CounterRng rng(seed, kStreamCodebook, i);
        books[i].reserve(cfg.message_sizes[i]);
        for (std::uint64_t w = 0; w < cfg.message_sizes[i]; ++w)
            books[i].push_back(draw_scaled_codeword(rng, cfg.n, cfg.powers[i], kind));
    }
    return books;
}

SimResult simulate_mac_error(const GaussianMacConfig& cfg, const std::vector<Codebook>& books,
                             std::uint64_t trials, std::uint64_t seed, unsigned threads) {
    if (books.size() != cfg.powers.size())
        throw std::invalid_argument("simulate_mac_error: one codebook per source required");
    for (std::size_t i = 0; i < books.size(); ++i)
        if (books[i].size() != cfg.message_sizes[i])
            throw std::invalid_argument("simulate_mac_error: codebook size mismatch");
    cfg.tuple_count();  // enforces the cap
    const MlDecoder decoder(books);
    const unsigned workers = std::max(1u, threads);
    std::vector<std::uint64_t> errs(workers, 0);

    parallel_trials(trials, workers, [&](std::uint64_t t, unsigned w) {
        CounterRng rng(seed, kStreamMacTrials, t);
        std::uint64_t flat = 0;
        std::vector<double> y(cfg.n, 0.0);
        for (std::size_t i = 0; i < books.size(); ++i) {
            const std::uint64_t wi = rng.next_below(cfg.message_sizes[i]);
            flat = flat * cfg.message_sizes[i] + wi;
            for (std::size_t k = 0; k < cfg.n; ++k) y[k] += books[i][wi][k];
        }
        for (std::size_t k = 0; k < cfg.n; ++k) y[k] += rng.next_gauss();
        if (decoder.decode(y, rng) != flat) ++errs[w];
    });

    SimResult result;
    result.trials = trials;
    for (std::uint64_t e : errs) result.errors += e;
    result.error_prob = trials ? static_cast<double>(result.errors) / static_cast<double>(trials) : 0.0;
    wilson_interval(result.errors, trials, result.ci_lo, result.ci_hi);
    result.seed = seed;
    return result;
}

CodeErrorProfile measure_error_profile(const GaussianMacConfig& cfg,
                                       const std::vector<Codebook>& books,
                                       std::uint64_t trials_per_tuple, std::uint64_t seed,
                                       unsigned threads) {
    const std::uint64_t tuples = cfg.tuple_count();
    if (trials_per_tuple < 1)
        throw std::invalid_argument("measure_error_profile: trials_per_tuple must be >= 1");
    if (tuples > (std::uint64_t{1} << 40) / trials_per_tuple)
        throw std::domain_error("measure_error_profile: trial budget exceeded");
    const MlDecoder decoder(books);
    std::vector<double> errors(tuples, 0.0);

    parallel_trials(tuples, std::max(1u, threads), [&](std::uint64_t flat, unsigned) {
        std::vector<std::uint64_t> tuple(books.size());
        std::uint64_t rem = flat;
        for (std::size_t i = books.size(); i-- > 0;) {
            tuple[i] = rem % cfg.message_sizes[i];
            rem /= cfg.message_sizes[i];
        }
        std::uint64_t errs = 0;
        for (std::uint64_t t = 0; t < trials_per_tuple; ++t) {
            CounterRng rng(seed, kStreamProfile, flat * trials_per_tuple + t);
            std::vector<double> y(cfg.n, 0.0);
            for (std::size_t i = 0; i < books.size(); ++i)
                for (std::size_t k = 0; k < cfg.n; ++k) y[k] += books[i][tuple[i]][k];
            for (std::size_t k = 0; k < cfg.n; ++k) y[k] += rng.next_gauss();
            if (decoder.decode(y, rng) != flat) ++errs;
        }
        errors[flat] = static_cast<double>(errs) / static_cast<double>(trials_per_tuple);
    });

    return {cfg.message_sizes, std::move(errors)};
}

std::vector<ScanRow> phase_transition_scan(const PowerVector& powers,
                                           const std::vector<double>& multipliers,
                                           const std::vector<std::uint64_t>& n_list,
                                           std::uint64_t trials, std::uint64_t seed,
                                           unsigned threads) {
    double total_power = 0.0;
    for (std::size_t i = 0; i < powers.size(); ++i) total_power += powers[i];
    const double sum_capacity = 0.5 * std::log2(1.0 + total_power);
    const double nsrc = static_cast<double>(powers.size());

    std::vector<ScanRow> rows;
    std::uint64_t cell = 0;
    for (double mult : multipliers) {
        if (!(mult >= 0.0)) throw std::invalid_argument("phase_transition_scan: negative multiplier");
        for (std::uint64_t n : n_list) {
            const double rate = mult * sum_capacity / nsrc;
            const double m_real = std::ceil(std::exp2(static_cast<double>(n) * rate));
            if (!(m_real <= static_cast<double>(std::uint64_t{1} << 20)))
                throw std::domain_error("phase_transition_scan: tuple cap exceeded");
            const auto m = static_cast<std::uint64_t>(m_real);
            GaussianMacConfig cfg(n, powers, std::vector<std::uint64_t>(powers.size(), m));
            cfg.tuple_count();  // cap check on the product
            const std::uint64_t cell_seed = CounterRng(seed, kStreamScanCells, cell++).next_u64();
            const auto books = generate_codebooks(cfg, CodebookKind::sphere, cell_seed);
            ScanRow row;
            row.multiplier = mult;
            row.n = n;
            row.message_sizes = cfg.message_sizes;
            row.result = simulate_mac_error(cfg, books, trials, cell_seed, threads);
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

namespace {
void write_u64(std::ofstream& os, std::uint64_t v) {
    unsigned char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(buf), 8);
}
std::uint64_t read_u64(std::ifstream& is) {
    unsigned char buf[8];
    is.read(reinterpret_cast<char*>(buf), 8);
    if (!is) throw std::runtime_error("codebook file truncated");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return v;
}
void write_f64(std::ofstream& os, double d) {
    std::uint64_t v;
    std::memcpy(&v, &d, 8);
    unsigned char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(buf), 8);
}
double read_f64(std::ifstream& is) {
    const std::uint64_t v = read_u64(is);
    double d;
    std::memcpy(&d, &v, 8);
    return d;
}
}  // namespace

void save_codebooks(const std::string& path, std::size_t n, const std::vector<Codebook>& books) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    os.write("MACB1", 5);
    write_u64(os, n);
    write_u64(os, books.size());
    for (const auto& b : books) write_u64(os, b.size());
    for (const auto& b : books)
        for (const auto& word : b) {
            if (word.size() != n) throw std::invalid_argument("save_codebooks: length mismatch");
            for (double v : word) write_f64(os, v);
        }
    if (!os) throw std::runtime_error("write failed for " + path);
}

std::vector<Codebook> load_codebooks(const std::string& path, std::size_t& n_out) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path);
    char magic[5];
    is.read(magic, 5);
    if (!is || std::string(magic, 5) != "MACB1")
        throw std::runtime_error(path + ": not a MACB1 codebook file");
    n_out = read_u64(is);
    const std::uint64_t nsrc = read_u64(is);
    if (nsrc == 0 || nsrc > 64) throw std::runtime_error(path + ": implausible source count");
    std::vector<std::uint64_t> sizes(nsrc);
    for (auto& m : sizes) m = read_u64(is);
    std::vector<Codebook> books(nsrc);
    for (std::uint64_t i = 0; i < nsrc; ++i) {
        books[i].assign(sizes[i], std::vector<double>(n_out));
        for (auto& word : books[i])
            for (double& v : word) v = read_f64(is);
    }
    return books;
}

IcConfig::IcConfig(std::size_t n_, double p1_, double p2_, double g12_, double g21_,
                   std::uint64_t m1_, std::uint64_t m2_)
    : n(n_), p1(p1_), p2(p2_), g12(g12_), g21(g21_), m1(m1_), m2(m2_) {
    if (n < 1) throw std::invalid_argument("IcConfig: n must be >= 1");
    if (!(p1 > 0.0) || !(p2 > 0.0)) throw std::invalid_argument("IcConfig: powers must be positive");
    if (m1 < 1 || m2 < 1) throw std::invalid_argument("IcConfig: message sizes must be >= 1");
    checked_tuple_count({m1, m2}, tuple_cap, "IcConfig");
}

IcSimResult simulate_ic(const IcConfig& ic, const Codebook& book1, const Codebook& book2,
                        std::uint64_t trials, std::uint64_t seed, std::uint64_t ks_samples,
                        unsigned threads) {
    if (std::abs(ic.g12) < 1.0 || std::abs(ic.g21) < 1.0)
        throw std::domain_error("simulate_ic: multicast construction needs |g12|, |g21| >= 1");
    if (book1.size() != ic.m1 || book2.size() != ic.m2)
        throw std::invalid_argument("simulate_ic: codebook size mismatch");
    if (std::abs(ic.noise_corr) > 1.0)
        throw std::invalid_argument("simulate_ic: |noise correlation| must be <= 1");
    const std::size_t n = ic.n;
    const double corr_tail = std::sqrt(1.0 - ic.noise_corr * ic.noise_corr);

    auto scaled = [&](const Codebook& b, double g) {
        Codebook out = b;
        for (auto& word : out)
            for (double& v : word) v *= g;
        return out;
    };
    // destination 1 sees f1 + g12 f2; destination 2 sees g21 f1 + f2
    const std::vector<Codebook> dest1_books{book1, scaled(book2, ic.g12)};
    const std::vector<Codebook> dest2_books{scaled(book1, ic.g21), book2};
    const MlDecoder dec1(dest1_books);
    const MlDecoder dec2(dest2_books);
    const unsigned workers = std::max(1u, threads);

    auto draw_pair_noise = [&](CounterRng& rng, std::vector<double>& z1, std::vector<double>& z2) {
        for (std::size_t k = 0; k < n; ++k) {
            z1[k] = rng.next_gauss();
            z2[k] = ic.noise_corr * z1[k] + corr_tail * rng.next_gauss();
        }
    };

    IcSimResult out;

    // ---- plain code at both destinations, with per-anchor conditional errors ----
    struct PlainAcc {
        std::uint64_t err1 = 0, err2 = 0;
        std::vector<std::uint64_t> err2_by_w1, n_by_w1;  // dest-2 error given W1
        std::vector<std::uint64_t> err1_by_w2, n_by_w2;  // dest-1 error given W2
    };
    std::vector<PlainAcc> acc(workers);
    for (auto& a : acc) {
        a.err2_by_w1.assign(ic.m1, 0);
        a.n_by_w1.assign(ic.m1, 0);
        a.err1_by_w2.assign(ic.m2, 0);
        a.n_by_w2.assign(ic.m2, 0);
    }
    parallel_trials(trials, workers, [&](std::uint64_t t, unsigned w) {
        CounterRng rng(seed, kStreamIcPlain, t);
        const std::uint64_t w1 = rng.next_below(ic.m1);
        const std::uint64_t w2 = rng.next_below(ic.m2);
        std::vector<double> z1(n), z2(n), y1(n), y2(n);
        draw_pair_noise(rng, z1, z2);
        for (std::size_t k = 0; k < n; ++k) {
            y1[k] = book1[w1][k] + ic.g12 * book2[w2][k] + z1[k];
            y2[k] = ic.g21 * book1[w1][k] + book2[w2][k] + z2[k];
        }
        const std::uint64_t pair1 = dec1.decode(y1, rng);
        const std::uint64_t pair2 = dec2.decode(y2, rng);
        const bool e1 = pair1 / ic.m2 != w1;  // destination 1 wants W1
        const bool e2 = pair2 % ic.m2 != w2;  // destination 2 wants W2
        auto& a = acc[w];
        a.err1 += e1;
        a.err2 += e2;
        a.err2_by_w1[w1] += e2;
        ++a.n_by_w1[w1];
        a.err1_by_w2[w2] += e1;
        ++a.n_by_w2[w2];
    });
    std::vector<std::uint64_t> err2_by_w1(ic.m1, 0), n_by_w1(ic.m1, 0);
    std::vector<std::uint64_t> err1_by_w2(ic.m2, 0), n_by_w2(ic.m2, 0);
    std::uint64_t err1 = 0, err2 = 0;
    for (const auto& a : acc) {
        err1 += a.err1;
        err2 += a.err2;
        for (std::uint64_t i = 0; i < ic.m1; ++i) {
            err2_by_w1[i] += a.err2_by_w1[i];
            n_by_w1[i] += a.n_by_w1[i];
        }
        for (std::uint64_t j = 0; j < ic.m2; ++j) {
            err1_by_w2[j] += a.err1_by_w2[j];
            n_by_w2[j] += a.n_by_w2[j];
        }
    }
    auto fill = [&](SimResult& r, std::uint64_t errs) {
        r.trials = trials;
        r.errors = errs;
        r.error_prob = trials ? static_cast<double>(errs) / static_cast<double>(trials) : 0.0;
        wilson_interval(errs, trials, r.ci_lo, r.ci_hi);
        r.seed = seed;
    };
    fill(out.plain1, err1);
    fill(out.plain2, err2);

    // anchors minimize the other destination's measured conditional error
    auto argmin_rate = [](const std::vector<std::uint64_t>& errs,
                          const std::vector<std::uint64_t>& counts) {
        std::uint64_t best = 0;
        double best_rate = std::numeric_limits<double>::infinity();
        for (std::uint64_t i = 0; i < errs.size(); ++i) {
            const double rate = counts[i]
                ? static_cast<double>(errs[i]) / static_cast<double>(counts[i]) : 0.0;
            if (rate < best_rate) {
                best_rate = rate;
                best = i;
            }
        }
        return best;
    };
    out.anchor1 = argmin_rate(err2_by_w1, n_by_w1);
    out.anchor2 = argmin_rate(err1_by_w2, n_by_w2);

    // ---- constructed multicast code ----
    const double aux1 = std::sqrt(1.0 - 1.0 / (ic.g12 * ic.g12));
    const double aux2 = std::sqrt(1.0 - 1.0 / (ic.g21 * ic.g21));
    std::vector<std::uint64_t> merr1(workers, 0), merr2(workers, 0);
    parallel_trials(trials, workers, [&](std::uint64_t t, unsigned w) {
        CounterRng rng(seed, kStreamIcMulticast, t);
        const std::uint64_t w1 = rng.next_below(ic.m1);
        const std::uint64_t w2 = rng.next_below(ic.m2);
        std::vector<double> z1(n), z2(n), y1(n), y2(n);
        draw_pair_noise(rng, z1, z2);
        for (std::size_t k = 0; k < n; ++k) {
            y1[k] = book1[w1][k] + ic.g12 * book2[w2][k] + z1[k];
            y2[k] = ic.g21 * book1[w1][k] + book2[w2][k] + z2[k];
        }
        // destination 1: own estimate, then feed destination 2's decoder
        const std::uint64_t what1 = dec1.decode(y1, rng) / ic.m2;
        std::vector<double> v(n);
        for (std::size_t k = 0; k < n; ++k)
            v[k] = ic.g21 * book1[out.anchor1][k] + (y1[k] - book1[what1][k]) / ic.g12 +
                   aux1 * rng.next_gauss();
        const std::uint64_t what2_at1 = dec2.decode(v, rng) % ic.m2;
        if (what1 != w1 || what2_at1 != w2) ++merr1[w];
        // destination 2, symmetric
        const std::uint64_t what2 = dec2.decode(y2, rng) % ic.m2;
        for (std::size_t k = 0; k < n; ++k)
            v[k] = ic.g12 * book2[out.anchor2][k] + (y2[k] - book2[what2][k]) / ic.g21 +
                   aux2 * rng.next_gauss();
        const std::uint64_t what1_at2 = dec1.decode(v, rng) / ic.m2;
        if (what2 != w2 || what1_at2 != w1) ++merr2[w];
    });
    std::uint64_t m1e = 0, m2e = 0;
    for (unsigned w = 0; w < workers; ++w) {
        m1e += merr1[w];
        m2e += merr2[w];
    }
    fill(out.multicast1, m1e);
    fill(out.multicast2, m2e);

    // ---- law check on one constructed coordinate ----
    if (ks_samples > 0) {
        std::vector<double> sample_a(ks_samples), sample_b(ks_samples);
        parallel_trials(ks_samples, workers, [&](std::uint64_t s, unsigned) {
            {
                CounterRng rng(seed, kStreamIcKsA, s);
                const std::uint64_t w2 = rng.next_below(ic.m2);
                const double z1 = rng.next_gauss();
                const double zt = rng.next_gauss();
                sample_a[s] = ic.g21 * book1[out.anchor1][0] + book2[w2][0] +
                              z1 / ic.g12 + aux1 * zt;
            }
            {
                CounterRng rng(seed, kStreamIcKsB, s);
                const std::uint64_t w2 = rng.next_below(ic.m2);
                // marginal of Z2 is standard normal regardless of correlation
                sample_b[s] = ic.g21 * book1[out.anchor1][0] + book2[w2][0] + rng.next_gauss();
            }
        });
        std::sort(sample_a.begin(), sample_a.end());
        std::sort(sample_b.begin(), sample_b.end());
        double stat = 0.0;
        std::size_t ia = 0, ib = 0;
        const double na = static_cast<double>(ks_samples);
        while (ia < ks_samples && ib < ks_samples) {
            if (sample_a[ia] <= sample_b[ib]) ++ia; else ++ib;
            stat = std::max(stat, std::abs(static_cast<double>(ia) / na -
                                           static_cast<double>(ib) / na));
        }
        out.ks_stat = stat;
        out.ks_critical = 1.628 * std::sqrt(2.0 / na);  // two equal samples, 1% level
        out.ks_reject = stat > out.ks_critical;
    }

    return out;
}

}  // namespace macsc
