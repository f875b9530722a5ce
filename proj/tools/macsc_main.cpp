// Command-line front end: every subcommand is a thin serialization layer over
// the library; no arithmetic happens here.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "macsc/bht.hpp"
#include "macsc/bounds.hpp"
#include "macsc/expurgation.hpp"
#include "macsc/macsim.hpp"
#include "macsc/quantizer.hpp"
#include "macsc/regions.hpp"
#include "macsc/wringing.hpp"

namespace {

using nlohmann::json;

constexpr const char* kVersion = "macsc 1.0.0";

json jnum(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

std::string fmt_double(double v) {
    if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct Manifest {
    std::string subcommand;
    json parameters = json::object();
    std::optional<std::uint64_t> seed;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    json finish() const {
        const double secs = std::chrono::duration<double>(
            std::chrono::steady_clock::now() - start).count();
        json m{{"subcommand", subcommand},
               {"parameters", parameters},
               {"version", kVersion},
               {"wall_time_s", secs}};
        m["seed"] = seed ? json(*seed) : json(nullptr);
        return m;
    }
};

void write_text(const std::string& out_path, const std::string& text) {
    if (out_path.empty() || out_path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream os(out_path);
    if (!os) throw std::runtime_error("cannot open " + out_path + " for writing");
    os << text;
}

void emit_json(const std::string& out_path, json doc, const Manifest& m) {
    doc["manifest"] = m.finish();
    write_text(out_path, doc.dump(2) + "\n");
}

json read_input_json(const std::string& in_path) {
    if (in_path.empty() || in_path == "-") return json::parse(std::cin);
    std::ifstream is(in_path);
    if (!is) throw std::runtime_error("cannot open " + in_path);
    return json::parse(is);
}

std::vector<int> to_int_list(const std::vector<int>& v) { return v; }

json sim_result_json(const macsc::SimResult& r) {
    return json{{"trials", r.trials},        {"errors", r.errors},
                {"error_prob", jnum(r.error_prob)}, {"ci_lo", jnum(r.ci_lo)},
                {"ci_hi", jnum(r.ci_hi)},    {"seed", r.seed}};
}

std::vector<std::uint64_t> sizes_from_rates(std::size_t n, const std::vector<double>& rates) {
    std::vector<std::uint64_t> sizes;
    for (double r : rates) {
        if (!(r >= 0.0)) throw std::invalid_argument("rates must be non-negative");
        const double m = std::ceil(std::exp2(static_cast<double>(n) * r));
        if (!(m <= 9.007199254740992e15)) throw std::domain_error("rate yields oversized codebook");
        sizes.push_back(static_cast<std::uint64_t>(m));
    }
    return sizes;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gaussian multiple-access converse toolkit"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    unsigned threads = 1;
    app.add_option("--threads", threads, "simulator worker threads")->capture_default_str();

    // ---- region ----
    auto* region = app.add_subcommand("region", "capacity-region constraints as CSV");
    std::vector<double> region_powers;
    std::string region_out;
    region->add_option("--powers", region_powers, "per-source powers")->required()->delimiter(',');
    region->add_option("--out", region_out, "output path (default stdout)");

    // ---- bound ----
    auto* bound = app.add_subcommand("bound", "finite-blocklength sum-rate bound as JSON");
    double bound_n = 0, bound_eps = 0;
    std::vector<double> bound_powers;
    std::vector<int> bound_subset;
    std::string bound_out;
    bound->add_option("--n", bound_n, "blocklength")->required();
    bound->add_option("--epsilon", bound_eps, "target average error in [0,1)")->required();
    bound->add_option("--powers", bound_powers)->required()->delimiter(',');
    bound->add_option("--subset", bound_subset, "1-based source subset")->required()->delimiter(',');
    bound->add_option("--out", bound_out);

    // ---- bound-scan ----
    auto* bscan = app.add_subcommand("bound-scan", "sweep n on a log grid, CSV output");
    double bs_from = 100, bs_to = 1e8, bs_eps = 0;
    unsigned bs_points = 25;
    std::vector<double> bs_powers;
    std::vector<int> bs_subset;
    std::string bs_out;
    bscan->add_option("--n-from", bs_from)->capture_default_str();
    bscan->add_option("--n-to", bs_to)->capture_default_str();
    bscan->add_option("--points", bs_points)->capture_default_str();
    bscan->add_option("--epsilon", bs_eps)->capture_default_str();
    bscan->add_option("--powers", bs_powers)->required()->delimiter(',');
    bscan->add_option("--subset", bs_subset)->required()->delimiter(',');
    bscan->add_option("--out", bs_out);

    // ---- bht ----
    auto* bht = app.add_subcommand("bht", "minimum type-II error of the optimal binary test");
    std::string bht_in = "-", bht_out;
    bht->add_option("--in", bht_in, "JSON {p:[..], q:[..], delta:x} ('-' = stdin)");
    bht->add_option("--out", bht_out);

    // ---- wring ----
    auto* wring_cmd = app.add_subcommand("wring", "conditioning search on a sparse instance");
    std::string wring_in = "-", wring_out;
    wring_cmd->add_option("--in", wring_in,
                          "JSON {n, alphabet, p:[[seq,mass]..], u:[[seq,mass]..], c, delta, lambda}");
    wring_cmd->add_option("--out", wring_out);

    // ---- expurgate ----
    auto* expurg = app.add_subcommand("expurgate", "average-to-maximal error code pruning");
    std::string exp_in = "-", exp_out;
    std::vector<int> exp_subset;
    expurg->add_option("--in", exp_in, "JSON {M:[..], epsilon:x, errors:[..] row-major}");
    expurg->add_option("--subset", exp_subset, "1-based subset (default: all sources)")
        ->delimiter(',');
    expurg->add_option("--out", exp_out);

    // ---- simulate ----
    auto* sim = app.add_subcommand("simulate", "Monte-Carlo MAC error probability");
    std::size_t sim_n = 0;
    std::vector<double> sim_powers, sim_rates;
    std::vector<std::uint64_t> sim_sizes;
    std::uint64_t sim_trials = 10000, sim_seed = 1;
    std::string sim_kind = "sphere", sim_fmt = "json", sim_out, sim_export, sim_import;
    sim->add_option("--n", sim_n, "blocklength")->required();
    sim->add_option("--powers", sim_powers)->required()->delimiter(',');
    auto* opt_rates = sim->add_option("--rates", sim_rates, "bits/use per source")->delimiter(',');
    auto* opt_sizes = sim->add_option("--sizes", sim_sizes, "codebook sizes")->delimiter(',');
    opt_rates->excludes(opt_sizes);
    sim->add_option("--trials", sim_trials)->capture_default_str();
    sim->add_option("--seed", sim_seed)->capture_default_str();
    sim->add_option("--codebook", sim_kind, "sphere|iid")->capture_default_str();
    sim->add_option("--format", sim_fmt, "json|csv")->capture_default_str();
    sim->add_option("--out", sim_out);
    sim->add_option("--export-book", sim_export, "write generated codebooks (MACB1)");
    sim->add_option("--import-book", sim_import, "use codebooks from a MACB1 file");

    // ---- ic-simulate ----
    auto* icsim = app.add_subcommand("ic-simulate",
                                     "paired plain/multicast interference-channel simulation");
    std::size_t ic_n = 0;
    std::vector<double> ic_powers, ic_gains, ic_rates;
    std::vector<std::uint64_t> ic_sizes;
    std::uint64_t ic_trials = 10000, ic_seed = 1, ic_ks = 100000;
    double ic_corr = 0.0;
    std::string ic_out;
    icsim->add_option("--n", ic_n)->required();
    icsim->add_option("--powers", ic_powers, "P1,P2")->required()->delimiter(',');
    icsim->add_option("--gains", ic_gains, "g12,g21")->required()->delimiter(',');
    auto* ic_opt_rates = icsim->add_option("--rates", ic_rates)->delimiter(',');
    auto* ic_opt_sizes = icsim->add_option("--sizes", ic_sizes)->delimiter(',');
    ic_opt_rates->excludes(ic_opt_sizes);
    icsim->add_option("--trials", ic_trials)->capture_default_str();
    icsim->add_option("--seed", ic_seed)->capture_default_str();
    icsim->add_option("--ks-samples", ic_ks)->capture_default_str();
    icsim->add_option("--noise-corr", ic_corr)->capture_default_str();
    icsim->add_option("--out", ic_out);

    // ---- scan ----
    auto* scan = app.add_subcommand("scan", "error-probability phase-transition CSV");
    std::vector<double> scan_powers, scan_mults;
    std::vector<std::uint64_t> scan_ns;
    std::uint64_t scan_trials = 2000, scan_seed = 1;
    std::string scan_out;
    scan->add_option("--powers", scan_powers)->required()->delimiter(',');
    scan->add_option("--multipliers", scan_mults)->required()->delimiter(',');
    scan->add_option("--n-list", scan_ns)->required()->delimiter(',');
    scan->add_option("--trials", scan_trials)->capture_default_str();
    scan->add_option("--seed", scan_seed)->capture_default_str();
    scan->add_option("--out", scan_out);

    // let --threads appear after the subcommand name as well
    for (auto* sub : app.get_subcommands([](const CLI::App*) { return true; }))
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (region->parsed()) {
            Manifest m{"region"};
            m.parameters["powers"] = region_powers;
            const auto constraints = macsc::cover_wyner_constraints(macsc::PowerVector{region_powers});
            std::ostringstream os;
            os << "# manifest: " << m.finish().dump() << "\n";
            os << "subset_bitmask,bound_bits\n";
            for (const auto& con : constraints)
                os << con.subset << "," << fmt_double(con.bound_bits) << "\n";
            write_text(region_out, os.str());
        } else if (bound->parsed()) {
            Manifest m{"bound"};
            m.parameters = {{"n", bound_n}, {"epsilon", bound_eps},
                            {"powers", bound_powers}, {"subset", bound_subset}};
            macsc::BoundInputs in(bound_n, bound_eps, macsc::PowerVector{bound_powers},
                                  to_int_list(bound_subset));
            const auto r = macsc::sum_rate_upper_bound(in);
            json doc{{"kappa1", jnum(r.kappa1)},
                     {"kappa2", jnum(r.kappa2)},
                     {"capacity_term", jnum(r.capacity_term)},
                     {"quadratic_term", jnum(r.quadratic_term)},
                     {"chebyshev_term", jnum(r.chebyshev_term)},
                     {"feasibility_term", jnum(r.feasibility_term)},
                     {"wringing_term", jnum(r.wringing_term)},
                     {"expurgation_term", jnum(r.expurgation_term)},
                     {"sum_log_m_upper", jnum(r.sum_log_m_upper)},
                     {"per_symbol_rate_upper", jnum(r.per_symbol_rate_upper)},
                     {"second_order_gap", jnum(r.second_order_gap)},
                     {"second_order_gap_limit", jnum(macsc::second_order_gap_limit(in))}};
            emit_json(bound_out, std::move(doc), m);
        } else if (bscan->parsed()) {
            Manifest m{"bound-scan"};
            m.parameters = {{"n_from", bs_from}, {"n_to", bs_to}, {"points", bs_points},
                            {"epsilon", bs_eps}, {"powers", bs_powers}, {"subset", bs_subset}};
            if (bs_points < 2 || !(bs_from >= 2.0) || !(bs_to > bs_from))
                throw std::invalid_argument("bound-scan: need n_to > n_from >= 2 and points >= 2");
            std::ostringstream os;
            os << "# manifest: " << m.finish().dump() << "\n";
            os << "n,per_symbol_bound,second_order_gap\n";
            for (unsigned i = 0; i < bs_points; ++i) {
                const double frac = static_cast<double>(i) / (bs_points - 1);
                const double n = bs_from * std::pow(bs_to / bs_from, frac);
                macsc::BoundInputs in(n, bs_eps, macsc::PowerVector{bs_powers},
                                      to_int_list(bs_subset));
                const auto r = macsc::sum_rate_upper_bound(in);
                os << fmt_double(n) << "," << fmt_double(r.per_symbol_rate_upper) << ","
                   << fmt_double(r.second_order_gap) << "\n";
            }
            write_text(bs_out, os.str());
        } else if (bht->parsed()) {
            Manifest m{"bht"};
            const json in = read_input_json(bht_in);
            m.parameters = {{"in", bht_in}, {"delta", in.at("delta")}};
            const auto result = macsc::beta(
                in.at("delta").get<double>(),
                macsc::FiniteDistribution{in.at("p").get<std::vector<double>>()},
                macsc::FiniteDistribution{in.at("q").get<std::vector<double>>()});
            json doc{{"beta", jnum(result.beta)}, {"test", result.test.accept_prob}};
            emit_json(bht_out, std::move(doc), m);
        } else if (wring_cmd->parsed()) {
            Manifest m{"wring"};
            const json in = read_input_json(wring_in);
            m.parameters = {{"in", wring_in}, {"n", in.at("n")}, {"alphabet", in.at("alphabet")},
                            {"c", in.at("c")}, {"delta", in.at("delta")},
                            {"lambda", in.at("lambda")}};
            auto parse_dist = [&](const char* key) {
                macsc::SparseDist d;
                for (const auto& atom : in.at(key)) {
                    macsc::Sequence seq = atom.at(0).get<macsc::Sequence>();
                    d[seq] += atom.at(1).get<double>();
                }
                return d;
            };
            macsc::ProductApproxInstance inst(
                in.at("n").get<std::size_t>(), in.at("alphabet").get<std::size_t>(),
                parse_dist("p"), parse_dist("u"), in.at("c").get<double>(),
                in.at("delta").get<double>(), in.at("lambda").get<double>());
            const auto result = macsc::wring(inst);
            const auto check = macsc::verify_wringing(inst, result);
            json steps = json::array();
            for (const auto& s : result.steps)
                steps.push_back({{"coordinate", s.coordinate}, {"value", s.value},
                                 {"p_cond", jnum(s.p_cond)}, {"u_cond", jnum(s.u_cond)}});
            json cond = json::array();
            for (const auto& [seq, mass] : result.p_conditioned)
                cond.push_back({seq, jnum(mass)});
            json doc{{"steps", steps},
                     {"step_count", result.step_count()},
                     {"event_prob", jnum(result.event_prob)},
                     {"p_conditioned", cond},
                     {"certificate", {{"step_count_ok", check.step_count_ok},
                                      {"event_prob_ok", check.event_prob_ok},
                                      {"pointwise_ok", check.pointwise_ok}}}};
            emit_json(wring_out, std::move(doc), m);
        } else if (expurg->parsed()) {
            Manifest m{"expurgate"};
            const json in = read_input_json(exp_in);
            auto sizes = in.at("M").get<std::vector<std::uint64_t>>();
            std::vector<int> subset = exp_subset;
            if (subset.empty())
                for (std::size_t i = 1; i <= sizes.size(); ++i) subset.push_back(static_cast<int>(i));
            m.parameters = {{"in", exp_in}, {"M", sizes}, {"epsilon", in.at("epsilon")},
                            {"subset", subset}};
            macsc::CodeErrorProfile profile(sizes, in.at("errors").get<std::vector<double>>());
            const auto result = macsc::expurgate(profile, in.at("epsilon").get<double>(), subset);
            json doc{{"support", result.support},
                     {"fixed_tail", result.fixed_tail},
                     {"head_sources", result.head_sources},
                     {"tail_sources", result.tail_sources},
                     {"max_error", jnum(result.max_error)},
                     {"head_count", result.head_count},
                     {"keep_count", result.keep_count}};
            emit_json(exp_out, std::move(doc), m);
        } else if (sim->parsed()) {
            Manifest m{"simulate"};
            m.seed = sim_seed;
            std::vector<macsc::Codebook> books;
            std::vector<std::uint64_t> sizes;
            if (!sim_import.empty()) {
                std::size_t file_n = 0;
                books = macsc::load_codebooks(sim_import, file_n);
                if (file_n != sim_n) throw std::invalid_argument("--import-book n mismatch");
                for (const auto& b : books) sizes.push_back(b.size());
            } else if (!sim_sizes.empty()) {
                sizes = sim_sizes;
            } else if (!sim_rates.empty()) {
                sizes = sizes_from_rates(sim_n, sim_rates);
            } else {
                throw CLI::ValidationError("simulate", "one of --rates/--sizes/--import-book required");
            }
            m.parameters = {{"n", sim_n}, {"powers", sim_powers}, {"sizes", sizes},
                            {"trials", sim_trials}, {"codebook", sim_kind},
                            {"threads", threads}};
            macsc::GaussianMacConfig cfg(sim_n, macsc::PowerVector{sim_powers}, sizes);
            if (books.empty()) {
                const auto kind = sim_kind == "sphere" ? macsc::CodebookKind::sphere
                                : sim_kind == "iid"    ? macsc::CodebookKind::iid_gauss_scaled
                                : throw CLI::ValidationError("simulate", "--codebook must be sphere|iid");
                books = macsc::generate_codebooks(cfg, kind, sim_seed);
            }
            if (!sim_export.empty()) macsc::save_codebooks(sim_export, sim_n, books);
            const auto r = macsc::simulate_mac_error(cfg, books, sim_trials, sim_seed, threads);
            if (sim_fmt == "csv") {
                std::ostringstream os;
                os << "# manifest: " << m.finish().dump() << "\n";
                os << "trials,errors,error_prob,ci_lo,ci_hi,seed\n"
                   << r.trials << "," << r.errors << "," << fmt_double(r.error_prob) << ","
                   << fmt_double(r.ci_lo) << "," << fmt_double(r.ci_hi) << "," << r.seed << "\n";
                write_text(sim_out, os.str());
            } else {
                emit_json(sim_out, sim_result_json(r), m);
            }
        } else if (icsim->parsed()) {
            Manifest m{"ic-simulate"};
            m.seed = ic_seed;
            if (ic_powers.size() != 2 || ic_gains.size() != 2)
                throw CLI::ValidationError("ic-simulate", "--powers and --gains take two values");
            std::vector<std::uint64_t> sizes = ic_sizes;
            if (sizes.empty() && !ic_rates.empty()) sizes = sizes_from_rates(ic_n, ic_rates);
            if (sizes.size() != 2)
                throw CLI::ValidationError("ic-simulate", "--sizes or --rates (two values) required");
            m.parameters = {{"n", ic_n}, {"powers", ic_powers}, {"gains", ic_gains},
                            {"sizes", sizes}, {"trials", ic_trials}, {"ks_samples", ic_ks},
                            {"noise_corr", ic_corr}, {"threads", threads}};
            macsc::IcConfig ic(ic_n, ic_powers[0], ic_powers[1], ic_gains[0], ic_gains[1],
                               sizes[0], sizes[1]);
            ic.noise_corr = ic_corr;
            macsc::GaussianMacConfig cfg(ic_n, macsc::PowerVector{ic_powers}, sizes);
            const auto books = macsc::generate_codebooks(cfg, macsc::CodebookKind::sphere, ic_seed);
            const auto r = macsc::simulate_ic(ic, books[0], books[1], ic_trials, ic_seed,
                                              ic_ks, threads);
            json doc{{"plain1", sim_result_json(r.plain1)},
                     {"plain2", sim_result_json(r.plain2)},
                     {"multicast1", sim_result_json(r.multicast1)},
                     {"multicast2", sim_result_json(r.multicast2)},
                     {"anchor1", r.anchor1},
                     {"anchor2", r.anchor2},
                     {"ks_stat", jnum(r.ks_stat)},
                     {"ks_critical", jnum(r.ks_critical)},
                     {"ks_reject", r.ks_reject}};
            emit_json(ic_out, std::move(doc), m);
        } else if (scan->parsed()) {
            Manifest m{"scan"};
            m.seed = scan_seed;
            m.parameters = {{"powers", scan_powers}, {"multipliers", scan_mults},
                            {"n_list", scan_ns}, {"trials", scan_trials}, {"threads", threads}};
            const auto rows = macsc::phase_transition_scan(
                macsc::PowerVector{scan_powers}, scan_mults, scan_ns, scan_trials, scan_seed,
                threads);
            std::ostringstream os;
            os << "# manifest: " << m.finish().dump() << "\n";
            os << "multiplier,n,Mi,error,ci_lo,ci_hi\n";
            for (const auto& row : rows) {
                std::string mi;
                for (std::size_t i = 0; i < row.message_sizes.size(); ++i)
                    mi += (i ? ";" : "") + std::to_string(row.message_sizes[i]);
                os << fmt_double(row.multiplier) << "," << row.n << "," << mi << ","
                   << fmt_double(row.result.error_prob) << "," << fmt_double(row.result.ci_lo)
                   << "," << fmt_double(row.result.ci_hi) << "\n";
            }
            write_text(scan_out, os.str());
        }
    } catch (const CLI::Error& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const json::exception& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
