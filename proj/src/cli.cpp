#include "sqma/cli.hpp"

#include "sqma/approx.hpp"
#include "sqma/errors.hpp"
#include "sqma/exactsim.hpp"
#include "sqma/perfcomp.hpp"
#include "sqma/protocols.hpp"
#include "sqma/states.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <optional>
#include <random>
#include <sstream>

namespace sqma::cli {

namespace {

struct Settings {
    std::uint64_t seed = 1;
    std::size_t cap_dim = approx::kDefaultBruteForceCap;
    std::size_t cap_width = exactsim::kDefaultWidthCap;
    bool cap_width_given = false;
    std::string format = "text";
};

std::string fmt(double x) {
    std::ostringstream os;
    os << std::setprecision(12) << x;
    return os.str();
}

std::string fmt(const states::SubsetState& s) {
    std::string out;
    for (auto i : s.indices()) {
        if (!out.empty()) out += ',';
        out += std::to_string(i);
    }
    return out;
}

class Report {
public:
    void add(std::string key, std::string value) { rows_.emplace_back(std::move(key), std::move(value)); }
    void add(std::string key, const char* value) { add(std::move(key), std::string(value)); }
    void add(std::string key, double value) { add(std::move(key), fmt(value)); }
    void add(std::string key, std::size_t value) { add(std::move(key), std::to_string(value)); }
    void add(std::string key, bool value) { add(std::move(key), value ? "true" : "false"); }
    void add(std::string key, const Rational& value) { add(std::move(key), to_string(value)); }
    void add(std::string key, const RationalProb& value) { add(std::move(key), value.str()); }
    void add(std::string key, const states::SubsetState& value) { add(std::move(key), fmt(value)); }

    void print(std::ostream& out, const std::string& format) const {
        if (format == "kv") {
            for (const auto& [k, v] : rows_) out << k << '=' << v << '\n';
            return;
        }
        std::size_t width = 0;
        for (const auto& row : rows_) width = std::max(width, row.first.size());
        for (const auto& [k, v] : rows_) out << std::left << std::setw(static_cast<int>(width)) << k << " : " << v << '\n';
    }

private:
    std::vector<std::pair<std::string, std::string>> rows_;
};

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    return in;
}

exactsim::Circuit load_circuit(const std::string& path) {
    auto in = open_input(path);
    return exactsim::parse_circuit(in);
}

states::SubsetState load_subset(const std::string& path) {
    auto in = open_input(path);
    return states::read_subset(in);
}

protocols::VerifierSpec load_verifier(const std::string& path) {
    auto c = load_circuit(path);
    if (!c.output()) throw ParseError("verifier file '" + path + "' has no output line");
    return protocols::VerifierSpec::from_circuit(std::move(c));
}

// Exactly one of: a state file, --psi-n, --random-qubits.
struct VectorSource {
    std::string path;
    std::size_t psi_n = 0;
    std::size_t random_qubits = 0;

    void attach(CLI::App* cmd) {
        auto* file = cmd->add_option("state", path, "amplitude file ('dim d' then 're im' lines)");
        auto* psi = cmd->add_option("--psi-n", psi_n, "use psi_n on n qubits")->check(CLI::Range(1, 24));
        auto* rnd = cmd->add_option("--random-qubits", random_qubits, "use a seeded random state on n qubits")
                        ->check(CLI::Range(1, 24));
        file->excludes(psi)->excludes(rnd);
        psi->excludes(rnd);
    }

    states::Amplitudes load(const Settings& settings) const {
        if (psi_n) {
            auto s = states::psi_n(psi_n);
            return {s.amplitudes().begin(), s.amplitudes().end()};
        }
        if (random_qubits) {
            std::mt19937_64 rng(settings.seed);
            auto s = states::random_state(random_qubits, rng);
            return {s.amplitudes().begin(), s.amplitudes().end()};
        }
        if (path.empty()) throw ParseError("give a state file, --psi-n or --random-qubits");
        auto in = open_input(path);
        return states::read_amplitudes(in);
    }
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Subset-state witnesses: approximation, exact simulation and verifier transforms", "sqma"};
    app.require_subcommand(1);
    app.fallthrough();
    Settings settings;
    app.add_option("--seed", settings.seed, "seed for generated states")->capture_default_str();
    app.add_option("--cap-dim", settings.cap_dim, "largest dimension for exhaustive subset search")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    auto* cap_width_opt = app.add_option("--cap-width", settings.cap_width, "largest circuit width to simulate")
                              ->check(CLI::PositiveNumber)
                              ->capture_default_str();
    app.add_option("--format", settings.format, "report format")
        ->check(CLI::IsMember({"text", "kv"}))
        ->capture_default_str();

    // approx
    auto* approx_cmd = app.add_subcommand("approx", "subset-state approximation of a vector");
    VectorSource approx_src;
    approx_src.attach(approx_cmd);
    bool with_brute = false, with_pow2 = false;
    approx_cmd->add_flag("--brute", with_brute, "also report the exhaustive optimum");
    approx_cmd->add_flag("--pow2", with_pow2, "also report the power-of-two rounding");

    // psi-n
    auto* psi_cmd = app.add_subcommand("psi-n", "best prefix subset of psi_n");
    std::size_t psi_n = 0;
    psi_cmd->add_option("n", psi_n, "number of qubits")->required()->check(CLI::Range(std::size_t{1}, approx::kMaxPrefixScanQubits));

    // brute
    auto* brute_cmd = app.add_subcommand("brute", "exhaustive best subset of a vector");
    VectorSource brute_src;
    brute_src.attach(brute_cmd);

    // sim
    auto* sim_cmd = app.add_subcommand("sim", "exact acceptance of a subset witness");
    std::string sim_circuit, sim_witness;
    bool sim_accept_all = false;
    sim_cmd->add_option("circuit", sim_circuit, "circuit file")->required();
    sim_cmd->add_option("witness", sim_witness, "subset file")->required();
    sim_cmd->add_flag("--accept-all", sim_accept_all, "accept every outcome instead of the output qubit");

    // bscss
    auto* bscss_cmd = app.add_subcommand("bscss", "decide a basis-state-check instance");
    std::string bscss_path;
    protocols::BscssOptions bscss_options;
    bscss_cmd->add_option("instance", bscss_path, "instance file")->required();
    bscss_cmd->add_option("--max-enum", bscss_options.max_enumerated_witness_qubits,
                          "largest witness register decided exhaustively")
        ->check(CLI::Range(0, 4))
        ->capture_default_str();
    bscss_cmd->add_flag("--heuristic", bscss_options.heuristic, "use the eigenvector heuristic above the cap");

    // icbs
    auto* icbs_cmd = app.add_subcommand("icbs", "identity check on basis states");
    std::string icbs_path, icbs_mu, icbs_delta;
    icbs_cmd->add_option("circuit", icbs_path, "circuit file")->required();
    icbs_cmd->add_option("--mu", icbs_mu, "non-identity threshold")->required();
    icbs_cmd->add_option("--delta", icbs_delta, "almost-identity threshold")->required();

    // pc-wrap
    auto* wrap_cmd = app.add_subcommand("pc-wrap", "wrap a verifier with coins for a claimed optimum");
    std::string wrap_verifier, wrap_claim, wrap_out;
    wrap_cmd->add_option("--verifier", wrap_verifier, "verifier circuit file")->required();
    wrap_cmd->add_option("--claim", wrap_claim, "claimed optimum p/q")->required();
    wrap_cmd->add_option("--out", wrap_out, "write the wrapped circuit here");

    // pc-rewind
    auto* rewind_cmd = app.add_subcommand("pc-rewind", "rewind a wrapped verifier to perfect completeness");
    std::string rewind_path, rewind_witness;
    std::size_t rewind_repeat = 1;
    bool rewind_unchecked = false;
    rewind_cmd->add_option("wrapped", rewind_path, "wrapped verifier file")->required();
    rewind_cmd->add_option("--witness", rewind_witness, "also evaluate this subset witness");
    rewind_cmd->add_option("--repeat", rewind_repeat, "sequential one-sided repetitions")
        ->check(CLI::Range(1, 16))
        ->capture_default_str();
    rewind_cmd->add_flag("--unchecked", rewind_unchecked, "skip the exact 1/2 precondition");

    // amplify
    auto* amp_cmd = app.add_subcommand("amplify", "parallel threshold amplification of a verifier");
    std::string amp_verifier, amp_threshold = "1/2", amp_witness, amp_out;
    std::size_t amp_t = 3;
    amp_cmd->add_option("--verifier", amp_verifier, "verifier circuit file")->required();
    amp_cmd->add_option("--t", amp_t, "number of copies")->check(CLI::Range(1, 16))->capture_default_str();
    amp_cmd->add_option("--threshold", amp_threshold, "accept when at least ceil(threshold t) copies accept")
        ->capture_default_str();
    amp_cmd->add_option("--witness", amp_witness, "subset witness for one copy");
    amp_cmd->add_option("--out", amp_out, "write the amplified circuit here");

    std::vector<std::string> argv_store{"sqma"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_store) argv.push_back(a.data());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kParseError;
    }
    settings.cap_width_given = cap_width_opt->count() > 0;

    Report report;
    int code = kSuccess;
    try {
        if (approx_cmd->parsed()) {
            const auto v = approx_src.load(settings);
            const auto result = approx::geometric_subset(v);
            report.add("dimension", v.size());
            report.add("subset_size", result.subset.size());
            report.add("subset", result.subset);
            report.add("score", result.score);
            report.add("guarantee", result.guarantee);
            report.add("part", result.trace.part == approx::BranchTrace::Part::Real ? "real" : "imaginary");
            report.add("negated", result.trace.negated);
            report.add("band", result.trace.band);
            report.add("gamma", result.trace.gamma);
            if (with_brute) {
                const auto best = approx::brute_force_best_subset(v, settings.cap_dim);
                report.add("brute_subset", best.subset);
                report.add("brute_score", best.score);
            }
            if (with_pow2) {
                const auto rounded = approx::round_to_pow2(result, v);
                report.add("pow2_subset_size", rounded.subset.size());
                report.add("pow2_subset", rounded.subset);
                report.add("pow2_score", rounded.score);
                report.add("pow2_guarantee", rounded.guarantee);
            }
            code = result.score >= result.guarantee ? kSuccess : kNoClass;
        } else if (psi_cmd->parsed()) {
            const auto r = approx::psi_n_best_prefix(psi_n);
            report.add("n", psi_n);
            report.add("prefix", r.m);
            report.add("score", r.score);
            report.add("bound", r.bound);
            code = r.score <= r.bound ? kSuccess : kNoClass;
        } else if (brute_cmd->parsed()) {
            const auto v = brute_src.load(settings);
            const auto best = approx::brute_force_best_subset(v, settings.cap_dim);
            report.add("dimension", v.size());
            report.add("subset", best.subset);
            report.add("score", best.score);
        } else if (sim_cmd->parsed()) {
            const auto c = load_circuit(sim_circuit);
            const auto w = load_subset(sim_witness);
            exactsim::AcceptPredicate accept = exactsim::accept_all();
            if (!sim_accept_all) {
                if (!c.output()) throw ParseError("circuit has no output line; pass --accept-all");
                accept = exactsim::AcceptOutputQubit{*c.output()};
            }
            const auto exact = exactsim::acceptance_probability_exact(c, w, accept, settings.cap_width);
            const double approx_value =
                exactsim::acceptance_probability_float(c, states::densify(w), accept, settings.cap_width);
            const bool agree = std::abs(exact.to_double() - approx_value) <= 1e-9;
            report.add("width", c.width());
            report.add("gates", c.gates().size());
            report.add("acceptance_exact", exact);
            report.add("acceptance_float", approx_value);
            report.add("agree", agree);
            code = agree ? kSuccess : kNoClass;
        } else if (bscss_cmd->parsed()) {
            auto in = open_input(bscss_path);
            const auto inst = protocols::parse_bscss(in);
            bscss_options.max_width = settings.cap_width;
            const auto d = protocols::decide_bscss(inst, bscss_options);
            report.add("verdict", protocols::to_string(d.verdict));
            report.add("best_acceptance", d.best_acceptance);
            if (d.witness) report.add("witness", *d.witness);
            report.add("exhaustive", d.exhaustive);
            if (d.top_eigenvalue) report.add("top_eigenvalue", *d.top_eigenvalue);
            report.add("alpha", inst.alpha);
            code = d.verdict == protocols::BscssVerdict::Yes  ? kSuccess
                   : d.verdict == protocols::BscssVerdict::No ? kNoClass
                                                              : kNotPromise;
        } else if (icbs_cmd->parsed()) {
            const auto c = load_circuit(icbs_path);
            const Rational mu = parse_rational(icbs_mu), delta = parse_rational(icbs_delta);
            const auto d = protocols::decide_icbs(
                c, mu, delta, settings.cap_width_given ? settings.cap_width : protocols::kDefaultIcbsWidthCap);
            const auto min_it = std::min_element(d.diagonal.begin(), d.diagonal.end());
            report.add("verdict", protocols::to_string(d.verdict));
            if (d.witness) report.add("witness", *d.witness);
            report.add("min_return_probability", *min_it);
            code = d.verdict == protocols::IcbsVerdict::NonIdentity      ? kSuccess
                   : d.verdict == protocols::IcbsVerdict::AlmostIdentity ? kNoClass
                                                                         : kNotPromise;
        } else if (wrap_cmd->parsed()) {
            const auto base = load_verifier(wrap_verifier);
            const auto claim = RationalProb::parse(wrap_claim);
            const auto wrapped = perfcomp::build_coin_wrapper(base, claim);
            report.add("claim", claim);
            if (!wrapped) {
                report.add("verdict", "REJECT");
                report.add("reason", "claim below 2/3");
                code = kNoClass;
            } else {
                report.add("verdict", "WRAPPED");
                report.add("r", static_cast<std::size_t>(wrapped->r()));
                report.add("coins", wrapped->coin_qubits());
                report.add("branch_accept", wrapped->branches().accept.get_str());
                report.add("branch_reject", wrapped->branches().reject.get_str());
                report.add("branch_run", wrapped->branches().run.get_str());
                report.add("width", wrapped->verifier().circuit.width());
                report.add("yes_bound", wrapped->acceptance_from_base(claim.value()));
                report.add("no_bound", wrapped->no_instance_bound());
                if (base.witness_qubits() <= perfcomp::kMaxExactWitnessQubits &&
                    wrapped->verifier().circuit.width() <= settings.cap_width) {
                    const auto best = perfcomp::exact_max_acceptance(wrapped->verifier(),
                                                                     perfcomp::kMaxExactWitnessQubits,
                                                                     settings.cap_width);
                    report.add("completeness_exact", best.value);
                    report.add("optimal_witness", best.witness);
                }
                if (!wrap_out.empty()) {
                    std::ofstream file(wrap_out);
                    if (!file) throw ParseError("cannot write '" + wrap_out + "'");
                    file << "# claim " << claim.str() << '\n'
                         << "# coins " << wrapped->first_coin() << ".." << wrapped->first_coin() + wrapped->r()
                         << '\n';
                    exactsim::write_circuit(file, wrapped->verifier().circuit);
                }
            }
        } else if (rewind_cmd->parsed()) {
            const auto wrapped = load_verifier(rewind_path);
            const auto prog = perfcomp::amplify_one_sided(perfcomp::rewind_verifier(wrapped, !rewind_unchecked),
                                                          rewind_repeat);
            report.add("repeat", rewind_repeat);
            code = kSuccess;
            if (wrapped.witness_qubits() <= perfcomp::kMaxExactWitnessQubits) {
                const auto best = perfcomp::exact_max_acceptance(wrapped, perfcomp::kMaxExactWitnessQubits,
                                                                 settings.cap_width);
                const auto completeness = perfcomp::program_acceptance(prog, best.witness, settings.cap_width);
                report.add("wrapped_optimum", best.value);
                report.add("optimal_witness", best.witness);
                report.add("completeness_exact", completeness);
                if (completeness != RationalProb::one()) code = kNoClass;
            }
            if (!rewind_witness.empty()) {
                const auto w = load_subset(rewind_witness);
                report.add("witness", w);
                report.add("witness_acceptance_exact", perfcomp::program_acceptance(prog, w, settings.cap_width));
            }
        } else if (amp_cmd->parsed()) {
            const auto base = load_verifier(amp_verifier);
            const Rational threshold = parse_rational(amp_threshold);
            const auto amplified = protocols::amplify(base, amp_t, threshold, settings.cap_width);
            report.add("t", amp_t);
            report.add("threshold", threshold);
            report.add("required_accepts", protocols::threshold_count(amp_t, threshold));
            report.add("width", amplified.circuit.width());
            report.add("gates", amplified.circuit.gates().size());
            if (!amp_witness.empty()) {
                const auto w = load_subset(amp_witness);
                const auto single = protocols::verifier_acceptance(base, w, settings.cap_width);
                const auto simulated =
                    protocols::verifier_acceptance(amplified, protocols::tensor_power(w, amp_t), settings.cap_width);
                const auto formula = protocols::amplified_acceptance(single.value(), amp_t, threshold);
                report.add("single_exact", single);
                report.add("amplified_exact", simulated);
                report.add("binomial_exact", formula);
                report.add("agree", simulated.value() == formula);
                if (simulated.value() != formula) code = kNoClass;
            }
            if (!amp_out.empty()) {
                std::ofstream file(amp_out);
                if (!file) throw ParseError("cannot write '" + amp_out + "'");
                exactsim::write_circuit(file, amplified.circuit);
            }
        }
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << '\n';
        return kParseError;
    } catch (const CapExceeded& e) {
        err << "cap exceeded: " << e.what() << '\n';
        return kCapExceeded;
    } catch (const PreconditionViolation& e) {
        err << "precondition violated: " << e.what() << '\n';
        return kNotPromise;
    } catch (const std::logic_error& e) {
        err << "invalid input: " << e.what() << '\n';
        return kParseError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kParseError;
    }
    report.print(out, settings.format);
    return code;
}

}  // namespace sqma::cli
