#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "sqma/errors.hpp"
#include "sqma/protocols.hpp"

#include <sstream>

using namespace sqma;
using namespace sqma::protocols;
using exactsim::Gate;

namespace {

SubsetState random_subset(std::size_t d, std::mt19937_64& rng) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < d; ++i)
        if (rng() & 1U) idx.push_back(i);
    if (idx.empty()) idx.push_back(rng() % d);
    return SubsetState(d, idx);
}

VerifierSpec random_verifier(std::size_t m, std::size_t a, std::size_t gates, std::mt19937_64& rng) {
    auto c = exactsim::random_circuit(m, a, gates, rng);
    c.set_output(rng() % c.width());
    return VerifierSpec::from_circuit(std::move(c));
}

double sandwich(const Matrix& c, const DenseState& s) {
    Eigen::VectorXcd v(static_cast<Eigen::Index>(s.dimension()));
    for (std::size_t i = 0; i < s.dimension(); ++i) v[static_cast<Eigen::Index>(i)] = s[i];
    return (v.adjoint() * c * v)(0, 0).real();
}

}  // namespace

TEST_CASE("measurement operators must satisfy 0 <= C <= I") {
    CHECK_THROWS(MeasurementOperator(Matrix(2, 3)));
    Matrix nonherm = Matrix::Zero(2, 2);
    nonherm(0, 1) = 0.5;
    CHECK_THROWS(MeasurementOperator(nonherm));
    CHECK_THROWS(MeasurementOperator(Matrix::Identity(2, 2) * 1.01));
    CHECK_THROWS(MeasurementOperator(-0.01 * Matrix::Identity(2, 2)));
    CHECK_NOTHROW(MeasurementOperator(Matrix::Identity(4, 4)));

    const MeasurementOperator almost_one(Matrix::Identity(2, 2) * (1.0 + 5e-10));
    CHECK(acceptance_operator_prob(almost_one, DenseState::basis(1, 0)) == 1.0);
    CHECK_THROWS_AS(acceptance_operator_prob(almost_one, DenseState::basis(2, 0)), DimensionMismatch);
}

TEST_CASE("top eigenpair") {
    Matrix d = Matrix::Zero(3 + 1, 3 + 1);
    d(0, 0) = 0.2;
    d(1, 1) = 0.9;
    d(2, 2) = 0.5;
    const auto top = top_eigenpair(MeasurementOperator(d));
    CHECK(top.value == doctest::Approx(0.9));
    CHECK(top.vector[1].real() == doctest::Approx(1.0));
    CHECK(std::abs(top.vector[1].imag()) <= 1e-12);

    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix c = oracle::random_contraction(16, 0.8, rng);
        const auto p = top_eigenpair(MeasurementOperator(c));
        CHECK(p.value == doctest::Approx(0.8));
        CHECK(sandwich(c, p.vector) == doctest::Approx(0.8));
    }
}

TEST_CASE("verifier operator matches the exact basis response") {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 30; ++trial) {
        const auto v = random_verifier(1 + rng() % 3, rng() % 3, 15, rng);
        const auto op = verifier_operator(v.circuit, v.accept);
        const exactsim::BasisResponse resp(v.circuit, v.accept);
        for (std::size_t i = 0; i < op.dimension(); ++i)
            for (std::size_t j = 0; j < op.dimension(); ++j)
                CHECK(std::abs(op.matrix()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) -
                               resp.operator_entry(i, j).get_d()) <= 1e-12);
        const auto s = random_subset(op.dimension(), rng);
        CHECK(acceptance_operator_prob(op, states::densify(s)) ==
              doctest::Approx(verifier_acceptance(v, s).to_double()));
    }
    const auto v = random_verifier(2, 2, 5, rng);
    CHECK_THROWS_AS(verifier_operator(v.circuit, v.accept, 3), CapExceeded);
}

TEST_CASE("subset witnesses keep the acceptance chain for one prover") {
    std::mt19937_64 rng(10);
    for (std::size_t p = 1; p <= 6; ++p) {
        for (int trial = 0; trial < 15; ++trial) {
            const double top = 1.0 - std::ldexp(1.0, -static_cast<int>(rng() % 12));
            const Matrix c = oracle::random_contraction(std::size_t{1} << p, top, rng);
            const auto r = sqma_bound_witness(MeasurementOperator(c));
            CHECK(r.witness_qubits == p);
            CHECK(r.top_eigenvalue == doctest::Approx(top));
            CHECK(r.chain_holds);
            CHECK(r.subset_acceptance == doctest::Approx(sandwich(c, states::densify(r.approximation.subset))));
            CHECK(r.overlap >= 1.0 / (8.0 * std::sqrt(static_cast<double>(p) + 3.0)));
            CHECK(r.omega_constant == doctest::Approx(1.0 / (128.0 * (static_cast<double>(p) + 3.0))));
            CHECK(r.subset_acceptance >= r.omega_constant - (1.0 - top) - 1e-12);
            CHECK(r.subset_acceptance >= r.trace_bound - 1e-9);
        }
    }
    CHECK_THROWS_AS(sqma_bound_witness(MeasurementOperator(Matrix::Identity(8, 8)), 4), CapExceeded);
    CHECK_THROWS_AS(sqma_bound_witness(MeasurementOperator(Matrix::Identity(3, 3))), DimensionMismatch);
}

TEST_CASE("subset witnesses keep the acceptance chain for two provers") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t p1 = 1 + rng() % 3, p2 = 1 + rng() % 3;
        const Matrix c = oracle::random_contraction(std::size_t{1} << (p1 + p2), 1.0 - 1e-3, rng);
        const auto psi = states::random_state(p1, rng);
        const auto phi = states::random_state(p2, rng);
        const auto r = product_witness_bound(MeasurementOperator(c), psi, phi);
        CHECK(r.bound_holds);
        CHECK(r.product_overlap >= r.guaranteed_overlap);
        CHECK(r.guaranteed_overlap ==
              doctest::Approx(1.0 / (64.0 * std::sqrt((p1 + 3.0) * (p2 + 3.0)))));
        CHECK(r.subset_acceptance == doctest::Approx(sandwich(c, states::densify(r.product_subset))));
        CHECK(r.witness_acceptance == doctest::Approx(sandwich(c, states::tensor(psi, phi))));
    }
    CHECK_THROWS_AS(product_witness_bound(MeasurementOperator(Matrix::Identity(8, 8)), DenseState::basis(1, 0),
                                          DenseState::basis(1, 0)),
                    DimensionMismatch);
}

TEST_CASE("verifier specs") {
    CHECK_THROWS(VerifierSpec::from_circuit(exactsim::Circuit(1, 1)));
    auto v = VerifierSpec::from_circuit(exactsim::Circuit(2, 1, {}, 2));
    CHECK(v.output_qubit() == 2);
    CHECK(v.witness_qubits() == 2);
    CHECK(v.ancilla_qubits() == 1);
    v.mode = Mode::QMA2;
    v.first_register_qubits = 3;
    CHECK_THROWS(v.validate());
    v.first_register_qubits = 1;
    CHECK_NOTHROW(v.validate());
    VerifierSpec bits{exactsim::Circuit(1, 1), exactsim::AcceptBitString{{0}, {true}}};
    CHECK_THROWS(bits.output_qubit());
}

TEST_CASE("threshold counts") {
    CHECK(threshold_count(3, Rational(1, 2)) == 2);
    CHECK(threshold_count(4, Rational(1, 2)) == 2);
    CHECK(threshold_count(5, Rational(2, 3)) == 4);
    CHECK(threshold_count(3, Rational(1)) == 3);
    CHECK(threshold_count(7, Rational(1, 7)) == 1);
    CHECK_THROWS(threshold_count(3, Rational(0)));
    CHECK_THROWS(threshold_count(3, Rational(3, 2)));
}

TEST_CASE("parallel amplification follows the binomial tail exactly") {
    std::mt19937_64 rng(12);
    const Rational thresholds[] = {Rational(1, 2), Rational(2, 3), Rational(1), Rational(1, 3)};
    for (int trial = 0; trial < 24; ++trial) {
        const auto v = random_verifier(1, rng() % 2, 6, rng);
        const std::size_t t = 1 + trial % 3;
        const Rational& threshold = thresholds[rng() % 4];
        // ceil(threshold * t) by integer arithmetic
        const std::size_t need = static_cast<std::size_t>(
            BigInt((threshold.get_num() * static_cast<unsigned long>(t) + threshold.get_den() - 1) / threshold.get_den()).get_ui());
        const auto amplified = amplify(v, t, threshold);
        const auto w = random_subset(2, rng);
        const auto single = verifier_acceptance(v, w);
        const auto got = verifier_acceptance(amplified, tensor_power(w, t));
        CHECK(got.value() == oracle::at_least_k_of_t(single.value(), t, need));
        CHECK(amplified_acceptance(single.value(), t, threshold) == oracle::at_least_k_of_t(single.value(), t, need));
        CHECK(amplified.witness_qubits() == t * v.witness_qubits());
    }
    const auto v = random_verifier(1, 1, 4, rng);
    CHECK(amplify(v, 1, Rational(1, 2)).circuit == v.circuit);
    CHECK_THROWS_AS(amplify(v, 8, Rational(1, 2)), CapExceeded);
    CHECK_THROWS(amplify(v, 0, Rational(1, 2)));
}

TEST_CASE("tensor powers of subsets") {
    const SubsetState s(2, {1});
    CHECK(tensor_power(s, 3) == SubsetState(8, {7}));
    CHECK(tensor_power(SubsetState(2, {0, 1}), 2) == SubsetState::full(4));
    CHECK_THROWS(tensor_power(s, 0));
}

TEST_CASE("subsetized soundness") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t m = 1 + rng() % 2;
        const auto v = random_verifier(m, rng() % 3, 12, rng);
        const auto sub = subsetize_soundness(v);
        CHECK(sub.flag_qubit == m);
        CHECK(sub.coin_branch.str() == "3/8");
        const std::size_t d = std::size_t{1} << m, d2 = 2 * d;
        CHECK(verifier_acceptance(sub.verifier, SubsetState::singleton(d2, d2 - 1)).str() == "3/8");

        // the flag is only ever a control, so acceptance splits over its value
        for (int k = 0; k < 6; ++k) {
            const auto s = random_subset(d2, rng);
            std::vector<std::size_t> zero, one;
            for (auto i : s.indices()) (i & 1U ? one : zero).push_back(i >> 1);
            Rational expected = 0;
            if (!zero.empty()) expected += Rational(static_cast<unsigned long>(zero.size())) *
                                           verifier_acceptance(v, SubsetState(d, zero)).value();
            if (!one.empty()) expected += Rational(static_cast<unsigned long>(one.size()), 1) * Rational(3, 8);
            expected /= Rational(static_cast<unsigned long>(s.size()));
            CHECK(verifier_acceptance(sub.verifier, s).value() == expected);
        }
    }
}

TEST_CASE("BSCSS instance files") {
    const std::string text = "qubits 1 ancilla 1\noutput 1\nH 0\nCCX 0 0 1\n";
    CHECK_THROWS_AS([&] {
        std::istringstream in(text + "y 1\npositions 1\nalpha 1/8\n");
        return parse_bscss(in);
    }(), ParseError);

    std::istringstream good("qubits 1 ancilla 1\nH 0\ny 10\npositions 0 1\nalpha 1/16\n");
    const auto inst = parse_bscss(good);
    CHECK(inst.y == std::vector<bool>{true, false});
    CHECK(inst.positions == std::vector<std::size_t>{0, 1});
    CHECK(inst.alpha.str() == "1/16");
    std::stringstream round;
    write_bscss(round, inst);
    const auto back = parse_bscss(round);
    CHECK(back.circuit == inst.circuit);
    CHECK(back.y == inst.y);
    CHECK(back.positions == inst.positions);
    CHECK(back.alpha == inst.alpha);

    for (const char* bad : {"qubits 1 ancilla 0\ny 1\npositions 0\n", "qubits 1 ancilla 0\ny 1\npositions 0\nalpha 1/2\n",
                            "qubits 1 ancilla 0\ny 12\npositions 0\nalpha 1/8\n",
                            "qubits 1 ancilla 0\ny 11\npositions 0\nalpha 1/8\n",
                            "qubits 1 ancilla 0\ny 1\ny 1\npositions 0\nalpha 1/8\n",
                            "qubits 1 ancilla 0\ny 1\npositions 4\nalpha 1/8\n",
                            "qubits 1 ancilla 0\ny 1\npositions 0\nalpha 0\n"}) {
        std::istringstream in(bad);
        CHECK_THROWS_AS(parse_bscss(in), ParseError);
    }
}

TEST_CASE("BSCSS decisions on small circuits") {
    const RationalProb alpha(Rational(1, 16));
    SUBCASE("identity circuit") {
        const BscssInstance inst{exactsim::Circuit(1, 0), {true}, {0}, alpha};
        const auto d = decide_bscss(inst);
        CHECK(d.verdict == BscssVerdict::Yes);
        CHECK(d.best_acceptance == RationalProb::one());
        CHECK(*d.witness == SubsetState(2, {1}));
        CHECK(d.exhaustive);
    }
    SUBCASE("X on an ancilla the string needs at zero") {
        exactsim::Circuit c(1, 1);
        c.append(Gate::x(1));
        const auto d = decide_bscss({c, {false}, {1}, alpha});
        CHECK(d.verdict == BscssVerdict::No);
        CHECK(d.best_acceptance == RationalProb::zero());
    }
    SUBCASE("one Hadamard sits between the promises") {
        exactsim::Circuit c(1, 0);
        c.append(Gate::h(0));
        const auto d = decide_bscss({c, {true}, {0}, alpha});
        CHECK(d.verdict == BscssVerdict::NotPromise);
        CHECK(d.best_acceptance.str() == "1/2");
    }
}

TEST_CASE("BSCSS planted instances are decided as generated") {
    std::mt19937_64 rng(14);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t m = 1 + trial % 4;
        const Rational alpha(1, 257 * (m + 3) * (1 + rng() % 4));
        const auto planted = fixtures::planted_bscss(m, trial % 2 == 0, alpha, rng);
        const auto d = decide_bscss(planted.instance);
        CHECK(d.verdict == (planted.yes ? BscssVerdict::Yes : BscssVerdict::No));
        if (planted.yes) {
            CHECK(exactsim::acceptance_probability_exact(planted.instance.circuit,
                                                         SubsetState(std::size_t{1} << m, planted.planted),
                                                         planted.instance.predicate()) == RationalProb::one());
        } else {
            CHECK(d.best_acceptance.value() <= alpha);
        }
    }
}

TEST_CASE("BSCSS above the enumeration cap") {
    std::mt19937_64 rng(15);
    const Rational alpha(1, 257 * 8);
    for (bool yes : {true, false}) {
        const auto planted = fixtures::planted_bscss(5, yes, alpha, rng);
        CHECK_THROWS_AS(decide_bscss(planted.instance), CapExceeded);
        BscssOptions opts;
        opts.heuristic = true;
        const auto d = decide_bscss(planted.instance, opts);
        CHECK_FALSE(d.exhaustive);
        REQUIRE(d.top_eigenvalue);
        CHECK(d.verdict == (yes ? BscssVerdict::Yes : BscssVerdict::No));
    }
}

TEST_CASE("reduction from a verifier keeps acceptance") {
    std::mt19937_64 rng(16);
    for (int trial = 0; trial < 10; ++trial) {
        const auto v = random_verifier(2, 2, 10, rng);
        const auto inst = reduction_from_verifier(v, RationalProb(Rational(1, 257 * 5)));
        CHECK(inst.y == std::vector<bool>{true});
        CHECK(inst.positions == std::vector<std::size_t>{v.output_qubit()});
        const auto s = random_subset(4, rng);
        CHECK(exactsim::acceptance_probability_exact(inst.circuit, s, inst.predicate()) == verifier_acceptance(v, s));
    }
}

TEST_CASE("containment gap") {
    for (std::size_t m = 1; m <= 12; ++m) {
        const Rational limit(1, 257 * (m + 3));
        CHECK(containment_alpha_limit(m) == limit);
        for (const Rational& alpha : {limit, Rational(limit / 2), Rational(limit / 1000)}) {
            const Rational gap = containment_gap(alpha, m);
            CHECK(gap == -2 * alpha + Rational(1, 128 * (m + 3)));
            CHECK(gap > 0);
            CHECK(gap == (1 - alpha) - containment_soundness_bound(alpha, m));
        }
        CHECK(containment_gap(Rational(1, 256 * (m + 3)), m) == 0);
    }
}

TEST_CASE("identity check on basis states") {
    SUBCASE("identity") {
        const auto d = decide_icbs(exactsim::Circuit(0, 3), Rational(1, 2), Rational(1, 4));
        CHECK(d.verdict == IcbsVerdict::AlmostIdentity);
        CHECK(d.diagonal.size() == 8);
        for (const auto& v : d.diagonal) CHECK(v == RationalProb::one());
    }
    SUBCASE("X flips every string") {
        exactsim::Circuit c(0, 2);
        c.append(Gate::x(1));
        const auto d = decide_icbs(c, Rational(1), Rational(0));
        CHECK(d.verdict == IcbsVerdict::NonIdentity);
        CHECK(*d.witness == 0);
    }
    SUBCASE("Hadamard returns with probability one half") {
        exactsim::Circuit c(0, 2);
        c.append(Gate::h(0));
        const auto d = decide_icbs(c, Rational(1, 2), Rational(1, 4));
        CHECK(d.verdict == IcbsVerdict::NonIdentity);
        for (const auto& v : d.diagonal) CHECK(v.str() == "1/2");
        CHECK(decide_icbs(c, Rational(3, 4), Rational(0)).verdict == IcbsVerdict::NotPromise);
    }
    SUBCASE("controlled flip only on one string") {
        exactsim::Circuit c(0, 3);
        c.append(Gate::ccx(0, 1, 2));
        const auto d = decide_icbs(c, Rational(1, 2), Rational(0));
        CHECK(d.verdict == IcbsVerdict::NonIdentity);
        CHECK(*d.witness == 0b110);
    }
    CHECK_THROWS(decide_icbs(exactsim::Circuit(0, 1), Rational(1, 4), Rational(1, 2)));
    CHECK_THROWS(decide_icbs(exactsim::Circuit(0, 1), Rational(2), Rational(0)));
    CHECK_THROWS_AS(decide_icbs(exactsim::Circuit(0, 13), Rational(1, 2), Rational(0)), CapExceeded);
}
