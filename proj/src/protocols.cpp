#include "sqma/protocols.hpp"

#include "sqma/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace sqma::protocols {

namespace {

Eigen::Map<const Eigen::VectorXcd> as_vector(const DenseState& s) {
    return {s.amplitudes().data(), static_cast<Eigen::Index>(s.dimension())};
}

double expectation(const Matrix& c, const Eigen::Ref<const Eigen::VectorXcd>& v) {
    return (v.adjoint() * c * v)(0, 0).real();
}

}  // namespace

MeasurementOperator::MeasurementOperator(Matrix c) : c_(std::move(c)) {
    if (c_.rows() != c_.cols() || c_.rows() == 0) throw DimensionMismatch("measurement operator must be square");
    if ((c_ - c_.adjoint()).cwiseAbs().maxCoeff() > kOperatorTolerance) {
        throw std::invalid_argument("measurement operator is not Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(c_, Eigen::EigenvaluesOnly);
    const auto& ev = solver.eigenvalues();
    if (ev.minCoeff() < -kOperatorTolerance || ev.maxCoeff() > 1.0 + kOperatorTolerance) {
        throw std::invalid_argument("measurement operator eigenvalues leave [0, 1]");
    }
}

double acceptance_operator_prob(const MeasurementOperator& c, const DenseState& state) {
    if (state.dimension() != c.dimension()) throw DimensionMismatch("operator and state dimensions differ");
    const double p = expectation(c.matrix(), as_vector(state));
    if (p < -kOperatorTolerance || p > 1.0 + kOperatorTolerance) {
        throw std::domain_error("acceptance probability " + std::to_string(p) + " outside [0, 1]");
    }
    return std::clamp(p, 0.0, 1.0);
}

TopEigenpair top_eigenpair(const MeasurementOperator& c) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(c.matrix());
    const Eigen::Index last = static_cast<Eigen::Index>(c.dimension()) - 1;
    Eigen::VectorXcd v = solver.eigenvectors().col(last);
    Eigen::Index pivot = 0;
    v.cwiseAbs().maxCoeff(&pivot);
    v *= std::conj(v[pivot]) / std::abs(v[pivot]);
    v.normalize();
    return {solver.eigenvalues()[last], DenseState(states::Amplitudes(v.data(), v.data() + v.size()))};
}

MeasurementOperator verifier_operator(const Circuit& c, const AcceptPredicate& accept, std::size_t max_width) {
    if (c.width() > max_width) throw CapExceeded("circuit width exceeds cap");
    exactsim::validate(accept, c.width());
    const std::size_t w = c.width();
    std::vector<std::size_t> accepting;
    for (std::size_t j = 0; j < (std::size_t{1} << w); ++j)
        if (exactsim::accepts(accept, j, w)) accepting.push_back(j);

    const auto dim = static_cast<Eigen::Index>(std::size_t{1} << c.witness_qubits());
    Matrix k(static_cast<Eigen::Index>(accepting.size()), dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        const auto out = exactsim::float_simulate(
            c, DenseState::basis(w, static_cast<std::size_t>(i) << c.ancilla_qubits()), max_width);
        for (std::size_t t = 0; t < accepting.size(); ++t) k(static_cast<Eigen::Index>(t), i) = out[accepting[t]];
    }
    Matrix op = k.adjoint() * k;
    op = 0.5 * (op + op.adjoint()).eval();
    return MeasurementOperator(std::move(op));
}

SqmaBoundReport sqma_bound_witness(const MeasurementOperator& c, std::size_t max_dimension) {
    const std::size_t d = c.dimension();
    if (d > max_dimension) throw CapExceeded("operator dimension exceeds cap");
    const std::size_t p = states::log2_exact(d);

    auto top = top_eigenpair(c);
    auto approximation = approx::geometric_subset(top.vector.amplitudes());
    const DenseState s = states::densify(approximation.subset);

    const double lambda = top.value;
    const double ov = std::abs(states::overlap(top.vector, s));
    const double subset_acc = acceptance_operator_prob(c, s);
    const double half_tr = 0.5 * states::trace_distance_pure(top.vector, s);
    const double omega = 1.0 / (128.0 * (static_cast<double>(p) + 3.0));

    SqmaBoundReport r{p,
                      lambda,
                      std::move(approximation),
                      ov,
                      subset_acc,
                      half_tr,
                      lambda - half_tr,
                      lambda - (1.0 - ov * ov / 2.0),
                      ov * ov / 2.0 - (1.0 - lambda),
                      omega - (1.0 - lambda),
                      omega,
                      false};
    r.chain_holds = r.subset_acceptance >= r.trace_bound - kChainSlack &&
                    r.trace_bound >= r.relaxed_bound - kChainSlack &&
                    r.overlap_bound >= r.explicit_floor - kChainSlack;
    return r;
}

ProductBoundReport product_witness_bound(const MeasurementOperator& c, const DenseState& psi, const DenseState& phi) {
    if (psi.dimension() * phi.dimension() != c.dimension()) {
        throw DimensionMismatch("operator dimension is not the product of the witness dimensions");
    }
    auto first = approx::geometric_subset(psi.amplitudes());
    auto second = approx::geometric_subset(phi.amplitudes());
    SubsetState product = states::tensor(first.subset, second.subset);

    const double ov = std::abs(states::overlap(psi, states::densify(first.subset))) *
                      std::abs(states::overlap(phi, states::densify(second.subset)));
    const double guaranteed = approx::guarantee_for(1.0, psi.dimension()) * approx::guarantee_for(1.0, phi.dimension());
    const double witness_acc = acceptance_operator_prob(c, states::tensor(psi, phi));
    const double subset_acc = acceptance_operator_prob(c, states::densify(product));
    const double lower = witness_acc - (1.0 - ov * ov / 2.0);

    return ProductBoundReport{std::move(first),
                              std::move(second),
                              std::move(product),
                              ov,
                              guaranteed,
                              witness_acc,
                              subset_acc,
                              lower,
                              ov * ov / 2.0 - (1.0 - witness_acc),
                              subset_acc >= lower - kChainSlack};
}

VerifierSpec VerifierSpec::from_circuit(Circuit c, Mode mode) {
    if (!c.output()) throw std::invalid_argument("verifier circuit has no designated output qubit");
    const std::size_t out = *c.output();
    return VerifierSpec{std::move(c), exactsim::AcceptOutputQubit{out}, mode, 0};
}

std::size_t VerifierSpec::output_qubit() const {
    const auto* o = std::get_if<exactsim::AcceptOutputQubit>(&accept);
    if (!o) throw std::invalid_argument("verifier does not accept on a single output qubit");
    return o->qubit;
}

void VerifierSpec::validate() const {
    exactsim::validate(accept, circuit.width());
    if (mode == Mode::QMA2 && first_register_qubits > witness_qubits()) {
        throw std::invalid_argument("QMA2 split exceeds the witness register");
    }
}

RationalProb verifier_acceptance(const VerifierSpec& v, const SubsetState& witness, std::size_t max_width) {
    return exactsim::acceptance_probability_exact(v.circuit, witness, v.accept, max_width);
}

std::size_t threshold_count(std::size_t t, const Rational& threshold) {
    if (threshold <= 0 || threshold > 1) throw std::invalid_argument("threshold must lie in (0, 1]");
    Rational x = threshold * Rational(static_cast<unsigned long>(t));
    BigInt ceil_value;
    mpz_cdiv_q(ceil_value.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    return static_cast<std::size_t>(ceil_value.get_ui());
}

VerifierSpec amplify(const VerifierSpec& v, std::size_t t, const Rational& threshold, std::size_t max_width) {
    if (t == 0) throw std::invalid_argument("amplify needs t >= 1");
    const std::size_t need = threshold_count(t, threshold);
    const std::size_t out = v.output_qubit();
    if (t == 1) return v;

    const std::size_t m = v.witness_qubits(), a = v.ancilla_qubits();
    const std::size_t work_count = t >= 3 ? t - 2 : 0;
    const std::size_t width = t * (m + a) + work_count + 1;
    if (width > max_width) {
        throw CapExceeded("amplified width " + std::to_string(width) + " exceeds cap " + std::to_string(max_width));
    }

    Circuit c(t * m, t * a + work_count + 1);
    auto map = [&](std::size_t b, std::size_t q) { return q < m ? b * m + q : t * m + b * a + (q - m); };
    std::vector<std::size_t> outputs;
    for (std::size_t b = 0; b < t; ++b) {
        for (const auto& g : v.circuit.gates()) {
            exactsim::Gate mapped = g;
            mapped.target = map(b, g.target);
            if (g.kind == exactsim::GateKind::CCX) mapped.controls = {map(b, g.controls[0]), map(b, g.controls[1])};
            c.append(mapped);
        }
        outputs.push_back(map(b, out));
    }
    std::vector<std::size_t> work;
    for (std::size_t i = 0; i < work_count; ++i) work.push_back(t * (m + a) + i);
    const std::size_t final_out = width - 1;

    // Accepting patterns are mutually exclusive, so XOR-ing them in is an OR.
    for (std::uint64_t pattern = 0; pattern < (std::uint64_t{1} << t); ++pattern) {
        if (static_cast<std::size_t>(std::popcount(pattern)) < need) continue;
        std::array<bool, 64> bits{};
        for (std::size_t b = 0; b < t; ++b) bits[b] = (pattern >> b) & 1U;
        exactsim::append_controlled_x(c, outputs, std::span<const bool>(bits.data(), t), final_out, work);
    }
    c.set_output(final_out);
    VerifierSpec amplified{std::move(c), exactsim::AcceptOutputQubit{final_out}, v.mode, v.first_register_qubits * t};
    return amplified;
}

Rational amplified_acceptance(const Rational& per_copy, std::size_t t, const Rational& threshold) {
    if (per_copy < 0 || per_copy > 1) throw std::invalid_argument("per-copy probability outside [0, 1]");
    const std::size_t need = threshold_count(t, threshold);
    Rational total = 0;
    const Rational miss = 1 - per_copy;
    for (std::size_t j = need; j <= t; ++j) {
        BigInt binom;
        mpz_bin_uiui(binom.get_mpz_t(), t, j);
        Rational term(binom);
        for (std::size_t i = 0; i < j; ++i) term *= per_copy;
        for (std::size_t i = j; i < t; ++i) term *= miss;
        total += term;
    }
    total.canonicalize();
    return total;
}

SubsetState tensor_power(const SubsetState& s, std::size_t t) {
    if (t == 0) throw std::invalid_argument("tensor power needs t >= 1");
    SubsetState out = s;
    for (std::size_t i = 1; i < t; ++i) out = states::tensor(out, s);
    return out;
}

SubsetizedVerifier subsetize_soundness(const VerifierSpec& v) {
    const std::size_t out = v.output_qubit();
    const std::size_t m = v.witness_qubits(), a = v.ancilla_qubits();
    const std::size_t flag = m;
    auto map = [&](std::size_t q) { return q < m ? q : q + 1; };

    // ancillas after the shifted originals: three coins, (c1 or c2), the coin verdict, the new output
    const std::size_t base = m + 1 + a;
    const std::size_t c0 = base, c1 = base + 1, c2 = base + 2, either = base + 3, verdict = base + 4,
                      final_out = base + 5;
    Circuit c(m + 1, a + 6);
    for (const auto& g : v.circuit.gates()) {
        exactsim::Gate mapped = g;
        mapped.target = map(g.target);
        if (g.kind == exactsim::GateKind::CCX) mapped.controls = {map(g.controls[0]), map(g.controls[1])};
        c.append(mapped);
    }
    using exactsim::Gate;
    for (auto q : {c0, c1, c2}) c.append(Gate::h(q));
    // verdict = c0 and (c1 or c2): 3 of 8 coin outcomes
    c.append(std::vector<Gate>{Gate::x(c1), Gate::x(c2), Gate::ccx(c1, c2, either), Gate::x(either), Gate::x(c1),
                               Gate::x(c2), Gate::ccx(c0, either, verdict)});
    // final = (not flag and original) xor (flag and verdict)
    c.append(std::vector<Gate>{Gate::x(flag), Gate::ccx(flag, map(out), final_out), Gate::x(flag),
                               Gate::ccx(flag, verdict, final_out)});
    c.set_output(final_out);
    return {VerifierSpec{std::move(c), exactsim::AcceptOutputQubit{final_out}, v.mode, v.first_register_qubits}, flag,
            RationalProb(BigInt(3), BigInt(8))};
}

void BscssInstance::validate() const {
    if (y.empty()) throw std::invalid_argument("BSCSS target string y is empty");
    if (y.size() != positions.size()) throw std::invalid_argument("y and positions differ in length");
    exactsim::validate(predicate(), circuit.width());
    if (alpha.value() <= 0 || alpha.value() >= Rational(1, 2)) {
        throw std::invalid_argument("alpha must lie in (0, 1/2)");
    }
}

BscssInstance parse_bscss(std::istream& in) {
    const auto lines = exactsim::content_lines(in);
    static const std::string keywords[] = {"y", "positions", "alpha"};
    std::vector<std::string> extra;
    Circuit c = exactsim::parse_circuit_lines(lines, keywords, &extra);

    std::optional<std::vector<bool>> y;
    std::optional<std::vector<std::size_t>> positions;
    std::optional<RationalProb> alpha;
    for (const auto& line : extra) {
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "y") {
            if (y) throw ParseError("duplicate y line");
            std::string bits, more;
            if (!(ls >> bits) || (ls >> more)) throw ParseError("malformed '" + line + "'");
            std::vector<bool> v;
            for (char ch : bits) {
                if (ch != '0' && ch != '1') throw ParseError("y must be a bit string in '" + line + "'");
                v.push_back(ch == '1');
            }
            y = std::move(v);
        } else if (key == "positions") {
            if (positions) throw ParseError("duplicate positions line");
            std::vector<std::size_t> v;
            std::string tok;
            while (ls >> tok) {
                if (tok.find_first_not_of("0123456789") != std::string::npos) throw ParseError("bad position '" + tok + "'");
                v.push_back(std::stoul(tok));
            }
            positions = std::move(v);
        } else {
            if (alpha) throw ParseError("duplicate alpha line");
            std::string tok, more;
            if (!(ls >> tok) || (ls >> more)) throw ParseError("malformed '" + line + "'");
            alpha = RationalProb::parse(tok);
        }
    }
    if (!y || !positions || !alpha) throw ParseError("BSCSS instance needs y, positions and alpha lines");
    BscssInstance inst{std::move(c), std::move(*y), std::move(*positions), *alpha};
    try {
        inst.validate();
    } catch (const std::logic_error& e) {
        throw ParseError(e.what());
    }
    return inst;
}

void write_bscss(std::ostream& out, const BscssInstance& inst) {
    exactsim::write_circuit(out, inst.circuit);
    out << "y ";
    for (bool b : inst.y) out << (b ? '1' : '0');
    out << "\npositions";
    for (auto p : inst.positions) out << ' ' << p;
    out << "\nalpha " << inst.alpha.str() << '\n';
}

const char* to_string(BscssVerdict v) {
    switch (v) {
        case BscssVerdict::Yes: return "YES";
        case BscssVerdict::No: return "NO";
        case BscssVerdict::NotPromise: return "NOT_PROMISE";
    }
    return "?";
}

BscssDecision decide_bscss(const BscssInstance& inst, const BscssOptions& options) {
    inst.validate();
    const Rational& alpha = inst.alpha.value();
    const Rational yes_line = 1 - alpha;
    const std::size_t m = inst.circuit.witness_qubits();

    if (m <= options.max_enumerated_witness_qubits) {
        const exactsim::BasisResponse response(inst.circuit, inst.predicate(), options.max_width);
        auto best = exactsim::maximize_over_subsets(response, yes_line,
                                                    std::max<std::size_t>(exactsim::kDefaultSubsetEnumerationDimension,
                                                                          std::size_t{1} << m));
        BscssVerdict verdict = BscssVerdict::NotPromise;
        if (best.stopped_early) {
            verdict = BscssVerdict::Yes;
        } else if (best.value.value() <= alpha) {
            verdict = BscssVerdict::No;
        }
        return {verdict, best.value, std::move(best.subset), true, std::nullopt};
    }
    if (!options.heuristic || m > options.max_heuristic_witness_qubits) {
        throw CapExceeded("BSCSS with " + std::to_string(m) + " witness qubits exceeds the enumeration cap");
    }

    const auto op = verifier_operator(inst.circuit, inst.predicate(), options.max_width);
    const auto top = top_eigenpair(op);
    auto candidate = approx::geometric_subset(top.vector.amplitudes()).subset;
    const auto value =
        exactsim::acceptance_probability_exact(inst.circuit, candidate, inst.predicate(), options.max_width);
    BscssVerdict verdict = BscssVerdict::NotPromise;
    if (value.value() >= yes_line) {
        verdict = BscssVerdict::Yes;
    } else if (top.value + kOperatorTolerance <= alpha.get_d()) {
        verdict = BscssVerdict::No;
    }
    return {verdict, value, std::move(candidate), false, top.value};
}

BscssInstance reduction_from_verifier(const VerifierSpec& v, const RationalProb& alpha) {
    BscssInstance inst{v.circuit, {true}, {v.output_qubit()}, alpha};
    inst.validate();
    return inst;
}

Rational containment_alpha_limit(std::size_t m) {
    return Rational(1, 257 * (static_cast<unsigned long>(m) + 3));
}

Rational containment_soundness_bound(const Rational& alpha, std::size_t m) {
    Rational r = 1 + alpha - Rational(1, 128 * (static_cast<unsigned long>(m) + 3));
    r.canonicalize();
    return r;
}

Rational containment_gap(const Rational& alpha, std::size_t m) {
    Rational r = (1 - alpha) - containment_soundness_bound(alpha, m);
    r.canonicalize();
    return r;
}

const char* to_string(IcbsVerdict v) {
    switch (v) {
        case IcbsVerdict::NonIdentity: return "NONIDENTITY";
        case IcbsVerdict::AlmostIdentity: return "ALMOST_IDENTITY";
        case IcbsVerdict::NotPromise: return "NOT_PROMISE";
    }
    return "?";
}

IcbsDecision decide_icbs(const Circuit& c, const Rational& mu, const Rational& delta, std::size_t max_width) {
    if (delta < 0 || mu > 1 || mu <= delta) throw std::invalid_argument("ICBS needs 0 <= delta < mu <= 1");
    if (c.width() > max_width) {
        throw CapExceeded("ICBS circuit width " + std::to_string(c.width()) + " exceeds cap " + std::to_string(max_width));
    }
    const std::size_t w = c.width();
    const Rational low = 1 - mu, high = 1 - delta;
    IcbsDecision d{IcbsVerdict::AlmostIdentity, {}, std::nullopt};
    bool all_high = true;
    for (std::size_t z = 0; z < (std::size_t{1} << w); ++z) {
        auto s = exactsim::ExactState::basis(w, z);
        s.apply(c);
        s.canonicalize();
        const BigInt& k = s.coefficients()[z];
        RationalProb value(k * k, s.denominator());
        if (!d.witness && value.value() <= low) d.witness = z;
        if (value.value() < high) all_high = false;
        d.diagonal.push_back(std::move(value));
    }
    d.verdict = d.witness ? IcbsVerdict::NonIdentity
                          : (all_high ? IcbsVerdict::AlmostIdentity : IcbsVerdict::NotPromise);
    return d;
}

}  // namespace sqma::protocols
