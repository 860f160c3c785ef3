#include "sqma/perfcomp.hpp"

#include "sqma/errors.hpp"
#include "sqma/exactsim.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace sqma::perfcomp {

namespace {

constexpr std::uint64_t kMaxCoinQubits = 16;

}  // namespace

bool MaxAcceptance::consistent(double tol) const { return std::abs(top_eigenvalue - value.to_double()) <= tol; }

MaxAcceptance exact_max_acceptance(const VerifierSpec& v, std::size_t max_witness_qubits, std::size_t max_width) {
    const std::size_t m = v.witness_qubits();
    if (m > max_witness_qubits) {
        throw CapExceeded("exact optimum needs m <= " + std::to_string(max_witness_qubits) + ", got " +
                          std::to_string(m));
    }
    const exactsim::BasisResponse response(v.circuit, v.accept, max_width);
    auto best = exactsim::maximize_over_subsets(
        response, std::nullopt, std::max(exactsim::kDefaultSubsetEnumerationDimension, std::size_t{1} << m));
    const auto top = protocols::top_eigenpair(protocols::verifier_operator(v.circuit, v.accept, max_width));
    return {std::move(best.value), std::move(best.subset), top.value};
}

Rational WrappedVerifier::acceptance_from_base(const Rational& base) const {
    Rational value = (Rational(branches_.accept) + Rational(branches_.run) * base) / Rational(pow2(r_ + 1));
    value.canonicalize();
    return value;
}

std::optional<WrappedVerifier> build_coin_wrapper(const VerifierSpec& v, const RationalProb& claimed) {
    if (claimed.value() < Rational(2, 3)) return std::nullopt;
    const std::size_t base_out = v.output_qubit();
    const BigInt& p = claimed.numerator();
    const BigInt& q = claimed.denominator();

    std::uint64_t r = 0;
    while (pow2(r) < q) ++r;
    if (r + 1 > kMaxCoinQubits) {
        throw CapExceeded("claim denominator needs " + std::to_string(r + 1) + " coins, cap is " +
                          std::to_string(kMaxCoinQubits));
    }
    BranchSizes sizes{pow2(r) - p, pow2(r) - q + p, q};

    const std::size_t m = v.witness_qubits(), a = v.ancilla_qubits();
    const std::size_t coins = r + 1;
    const std::size_t work_count = coins >= 3 ? coins - 2 : 0;
    const bool needs_one = coins == 1;
    const std::size_t extra = coins + work_count + 1 + (needs_one ? 1 : 0) + 1;
    if (m + a + extra > 62) throw CapExceeded("wrapped circuit exceeds 62 qubits");

    const std::size_t first_coin = m + a;
    std::vector<std::size_t> coin(coins), work(work_count);
    for (std::size_t i = 0; i < coins; ++i) coin[i] = first_coin + i;
    for (std::size_t i = 0; i < work_count; ++i) work[i] = first_coin + coins + i;
    const std::size_t run_flag = first_coin + coins + work_count;
    const std::optional<std::size_t> one =
        needs_one ? std::optional<std::size_t>(run_flag + 1) : std::nullopt;
    const std::size_t out = run_flag + 1 + (needs_one ? 1 : 0);

    Circuit c(m, a + extra, v.circuit.gates());
    if (one) c.append(exactsim::Gate::x(*one));
    for (auto q_coin : coin) c.append(exactsim::Gate::h(q_coin));

    auto mark = [&](std::uint64_t value, std::size_t target) {
        std::array<bool, kMaxCoinQubits> bits{};
        for (std::size_t i = 0; i < coins; ++i) bits[i] = (value >> (coins - 1 - i)) & 1U;
        exactsim::append_controlled_x(c, coin, std::span<const bool>(bits.data(), coins), target, work, one);
    };
    const std::uint64_t total = std::uint64_t{1} << coins;
    const std::uint64_t accept_count = sizes.accept.get_ui();
    const std::uint64_t run_start = total - q.get_ui();
    for (std::uint64_t value = 0; value < accept_count; ++value) mark(value, out);
    for (std::uint64_t value = run_start; value < total; ++value) mark(value, run_flag);
    c.append(exactsim::Gate::ccx(run_flag, base_out, out));
    c.set_output(out);

    VerifierSpec wrapped{std::move(c), exactsim::AcceptOutputQubit{out}, protocols::Mode::oSQMA, 0};
    return WrappedVerifier(v, claimed, r, first_coin, std::move(sizes), std::move(wrapped));
}

bool in_projector(const Projector& p, std::size_t index, std::size_t width, std::size_t witness_qubits) {
    if (const auto* acc = std::get_if<AcceptOutput>(&p)) {
        return (index >> exactsim::bit_of(acc->qubit, width)) & 1U;
    }
    const std::size_t ancilla_mask = (std::size_t{1} << (width - witness_qubits)) - 1;
    return (index & ancilla_mask) == 0;
}

void project(std::vector<BigInt>& k, const Projector& p, std::size_t width, std::size_t witness_qubits) {
    for (std::size_t j = 0; j < k.size(); ++j)
        if (!in_projector(p, j, width, witness_qubits)) k[j] = 0;
}

void reflect(std::vector<BigInt>& k, const Projector& p, std::size_t width, std::size_t witness_qubits) {
    for (std::size_t j = 0; j < k.size(); ++j)
        if (!in_projector(p, j, width, witness_qubits)) k[j] = -k[j];
}

MeasurementProgram::MeasurementProgram(std::size_t witness_qubits, std::size_t ancilla_qubits, std::vector<Step> steps,
                                       std::size_t root)
    : witness_qubits_(witness_qubits), ancilla_qubits_(ancilla_qubits), steps_(std::move(steps)), root_(root) {
    const std::size_t n = steps_.size();
    if (root_ >= n) throw std::invalid_argument("program root out of range");
    auto check_index = [&](std::size_t i) {
        if (i >= n) throw std::invalid_argument("program step index " + std::to_string(i) + " out of range");
    };
    auto check_projector = [&](const Projector& p) {
        if (const auto* acc = std::get_if<AcceptOutput>(&p); acc && acc->qubit >= width()) {
            throw std::invalid_argument("projector qubit outside the register");
        }
    };
    std::vector<std::vector<std::size_t>> succ(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::visit(
            [&](const auto& s) {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, step::Unitary>) {
                    if (s.circuit.witness_qubits() != witness_qubits_ || s.circuit.ancilla_qubits() != ancilla_qubits_) {
                        throw std::invalid_argument("program circuit does not match the register shape");
                    }
                    succ[i] = {s.next};
                } else if constexpr (std::is_same_v<T, step::Reflection>) {
                    check_projector(s.projector);
                    succ[i] = {s.next};
                } else if constexpr (std::is_same_v<T, step::Measurement>) {
                    check_projector(s.projector);
                    succ[i] = {s.on_hit, s.on_miss};
                } else if constexpr (std::is_same_v<T, step::FreshRun>) {
                    succ[i] = {s.next};
                }
            },
            steps_[i]);
        for (auto j : succ[i]) check_index(j);
    }
    // iterative three-color DFS from every node
    std::vector<int> color(n, 0);
    for (std::size_t start = 0; start < n; ++start) {
        if (color[start]) continue;
        std::vector<std::pair<std::size_t, std::size_t>> stack{{start, 0}};
        color[start] = 1;
        while (!stack.empty()) {
            auto& [node, next_child] = stack.back();
            if (next_child < succ[node].size()) {
                const std::size_t child = succ[node][next_child++];
                if (color[child] == 1) throw std::invalid_argument("program contains a cycle");
                if (color[child] == 0) {
                    color[child] = 1;
                    stack.emplace_back(child, 0);
                }
            } else {
                color[node] = 2;
                stack.pop_back();
            }
        }
    }
}

MeasurementProgram rewind_program(const VerifierSpec& wrapped) {
    const Circuit& w = wrapped.circuit;
    const AcceptOutput acc{wrapped.output_qubit()};
    std::vector<Step> steps{
        step::Unitary{w, 1},                       // 0
        step::Measurement{acc, 2, 3},              // 1
        step::Outcome{true},                       // 2
        step::Unitary{w.adjoint(), 4},             // 3
        step::Reflection{InitialSubspace{}, 5},    // 4
        step::Unitary{w, 6},                       // 5
        step::Measurement{acc, 2, 7},              // 6
        step::Outcome{false},                      // 7
    };
    return MeasurementProgram(w.witness_qubits(), w.ancilla_qubits(), std::move(steps));
}

MeasurementProgram rewind(const WrappedVerifier& w, bool check) {
    if (check) {
        const auto best = exact_max_acceptance(w.base());
        const Rational wrapped = w.acceptance_from_base(best.value.value());
        if (wrapped != Rational(1, 2)) {
            throw PreconditionViolation("wrapped optimum is " + to_string(wrapped) + " (base optimum " +
                                        best.value.str() + "), rewinding needs exactly 1/2");
        }
    }
    return rewind_program(w.verifier());
}

MeasurementProgram rewind_verifier(const VerifierSpec& wrapped, bool check) {
    if (check) {
        const auto best = exact_max_acceptance(wrapped);
        if (best.value.value() != Rational(1, 2)) {
            throw PreconditionViolation("wrapped optimum is " + best.value.str() + ", rewinding needs exactly 1/2");
        }
    }
    return rewind_program(wrapped);
}

namespace {

class ProgramSimulator {
public:
    ProgramSimulator(const MeasurementProgram& prog, const SubsetState& witness) : prog_(prog) {
        const std::size_t w = prog.width();
        initial_.assign(std::size_t{1} << w, BigInt(0));
        for (auto i : witness.indices()) initial_[i << prog.ancilla_qubits()] = 1;
        s_ = witness.size();
    }

    Rational run() { return eval(prog_.root(), initial_, 0); }

private:
    // Coefficients k with amplitude k / sqrt(s 2^r); the norm shrinks under projections.
    Rational mass(const std::vector<BigInt>& k, std::uint64_t r) const {
        BigInt sum = 0;
        for (const auto& x : k) sum += x * x;
        Rational out(sum, BigInt(static_cast<unsigned long>(s_)) * pow2(r));
        out.canonicalize();
        return out;
    }

    static bool all_zero(const std::vector<BigInt>& k) {
        return std::all_of(k.begin(), k.end(), [](const BigInt& x) { return sgn(x) == 0; });
    }

    static void canonicalize(std::vector<BigInt>& k, std::uint64_t& r) {
        while (r >= 2 && std::all_of(k.begin(), k.end(), [](const BigInt& x) { return mpz_even_p(x.get_mpz_t()); })) {
            for (auto& x : k) mpz_tdiv_q_2exp(x.get_mpz_t(), x.get_mpz_t(), 1);
            r -= 2;
        }
    }

    Rational eval(std::size_t node, std::vector<BigInt> k, std::uint64_t r) {
        const std::size_t width = prog_.width(), m = prog_.witness_qubits();
        while (true) {
            if (all_zero(k)) return 0;
            const Step& s = prog_.steps()[node];
            if (const auto* u = std::get_if<step::Unitary>(&s)) {
                for (const auto& g : u->circuit.gates()) {
                    if (exactsim::apply_gate_in_place(k, width, g)) {
                        ++r;
                        canonicalize(k, r);
                    }
                }
                node = u->next;
            } else if (const auto* refl = std::get_if<step::Reflection>(&s)) {
                reflect(k, refl->projector, width, m);
                node = refl->next;
            } else if (const auto* meas = std::get_if<step::Measurement>(&s)) {
                std::vector<BigInt> hit = k;
                project(hit, meas->projector, width, m);
                for (std::size_t j = 0; j < k.size(); ++j) k[j] -= hit[j];
                Rational total = eval(meas->on_hit, std::move(hit), r);
                total += eval(meas->on_miss, std::move(k), r);
                return total;
            } else if (const auto* fresh = std::get_if<step::FreshRun>(&s)) {
                Rational total = mass(k, r) * eval(fresh->next, initial_, 0);
                total.canonicalize();
                return total;
            } else {
                return std::get<step::Outcome>(s).accept ? mass(k, r) : Rational(0);
            }
        }
    }

    const MeasurementProgram& prog_;
    std::vector<BigInt> initial_;
    std::size_t s_ = 1;
};

}  // namespace

RationalProb program_acceptance(const MeasurementProgram& prog, const SubsetState& witness, std::size_t max_width) {
    if (prog.width() > max_width) {
        throw CapExceeded("program width " + std::to_string(prog.width()) + " exceeds cap " + std::to_string(max_width));
    }
    if (witness.dimension() != (std::size_t{1} << prog.witness_qubits())) {
        throw DimensionMismatch("witness dimension does not match the program's witness register");
    }
    ProgramSimulator sim(prog, witness);
    return RationalProb(sim.run());
}

MeasurementProgram amplify_one_sided(const MeasurementProgram& prog, std::size_t t) {
    if (t == 0) throw std::invalid_argument("one-sided amplification needs t >= 1");
    if (t == 1) return prog;
    const std::size_t n = prog.steps().size();
    std::vector<Step> steps;
    steps.reserve(n * t);
    for (std::size_t b = 0; b < t; ++b) {
        const std::size_t off = b * n;
        const bool last = b + 1 == t;
        for (const auto& s : prog.steps()) {
            steps.push_back(std::visit(
                [&](const auto& st) -> Step {
                    using T = std::decay_t<decltype(st)>;
                    if constexpr (std::is_same_v<T, step::Unitary>) {
                        return step::Unitary{st.circuit, st.next + off};
                    } else if constexpr (std::is_same_v<T, step::Reflection>) {
                        return step::Reflection{st.projector, st.next + off};
                    } else if constexpr (std::is_same_v<T, step::Measurement>) {
                        return step::Measurement{st.projector, st.on_hit + off, st.on_miss + off};
                    } else if constexpr (std::is_same_v<T, step::FreshRun>) {
                        return step::FreshRun{st.next + off};
                    } else {
                        if (st.accept && !last) return step::FreshRun{off + n + prog.root()};
                        return st;
                    }
                },
                s));
        }
    }
    return MeasurementProgram(prog.witness_qubits(), prog.ancilla_qubits(), std::move(steps), prog.root());
}

}  // namespace sqma::perfcomp
