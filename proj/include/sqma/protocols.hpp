// Verifier semantics: two-outcome measurement operators, the subset-witness
// bound chain for one and two provers, parallel amplification, soundness
// subsetization, and the BSCSS / ICBS deciders.
#pragma once

#include "sqma/approx.hpp"
#include "sqma/circuit.hpp"
#include "sqma/exactsim.hpp"
#include "sqma/rational.hpp"
#include "sqma/states.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

namespace sqma::protocols {

using Matrix = Eigen::MatrixXcd;
using exactsim::AcceptPredicate;
using exactsim::Circuit;
using states::DenseState;
using states::SubsetState;

inline constexpr double kOperatorTolerance = 1e-9;
inline constexpr double kChainSlack = 1e-8;

/// Hermitian C with 0 <= C <= I (eigenvalues within kOperatorTolerance of [0, 1]).
class MeasurementOperator {
public:
    explicit MeasurementOperator(Matrix c);

    std::size_t dimension() const { return static_cast<std::size_t>(c_.rows()); }
    const Matrix& matrix() const { return c_; }

private:
    Matrix c_;
};

/// <psi|C|psi>, clamped into [0, 1]. Values further than kOperatorTolerance
/// outside that range raise std::domain_error.
double acceptance_operator_prob(const MeasurementOperator& c, const DenseState& state);

struct TopEigenpair {
    double value;
    DenseState vector;  // phase fixed so the largest entry is real and positive
};

TopEigenpair top_eigenpair(const MeasurementOperator& c);

/// The acceptance operator of a circuit on the witness register:
/// <i|C|i'> = sum_{j accepted} <j|Z|i,0><j|Z|i',0>^*.
MeasurementOperator verifier_operator(const Circuit& c, const AcceptPredicate& accept,
                                      std::size_t max_width = exactsim::kDefaultWidthCap);

/// Every quantity in the chain
///   <S|C|S> >= lambda - tr/2 >= lambda - (1 - |<psi|S>|^2/2)
///           =  |<psi|S>|^2/2 - (1 - lambda) >= 1/(128(p+3)) - (1 - lambda)
/// for the top eigenvector psi of C and S = geometric_subset(psi).
struct SqmaBoundReport {
    std::size_t witness_qubits;
    double top_eigenvalue;
    approx::ApproximationResult approximation;
    double overlap;              // |<psi|S>|
    double subset_acceptance;    // <S|C|S>
    double half_trace_distance;  // || |psi><psi| - |S><S| ||_tr / 2
    double trace_bound;          // lambda - half_trace_distance
    double relaxed_bound;        // lambda - (1 - overlap^2 / 2)
    double overlap_bound;        // overlap^2 / 2 - (1 - lambda)
    double explicit_floor;       // 1/(128(p+3)) - (1 - lambda)
    double omega_constant;       // 1/(128(p+3))
    bool chain_holds;            // every step holds within kChainSlack
};

SqmaBoundReport sqma_bound_witness(const MeasurementOperator& c,
                                   std::size_t max_dimension = states::kDefaultEigenDimensionCap);

struct ProductBoundReport {
    approx::ApproximationResult first;
    approx::ApproximationResult second;
    SubsetState product_subset;   // S x T
    double product_overlap;       // |<psi|S>| |<phi|T>|
    double guaranteed_overlap;    // product of the two approximation guarantees
    double witness_acceptance;    // <psi phi|C|psi phi>
    double subset_acceptance;     // <S T|C|S T>
    double lower_bound;           // witness_acceptance - (1 - product_overlap^2 / 2)
    double retained_gap;          // product_overlap^2 / 2 - (1 - witness_acceptance)
    bool bound_holds;
};

/// Approximates each prover's state separately and evaluates C on |S>|T>.
ProductBoundReport product_witness_bound(const MeasurementOperator& c, const DenseState& psi, const DenseState& phi);

enum class Mode { QMA, SQMA, oSQMA, QMA2 };

struct VerifierSpec {
    Circuit circuit;
    AcceptPredicate accept;
    Mode mode = Mode::QMA;
    /// QMA2 only: the witness register splits into [0, first_register_qubits)
    /// and the remaining witness qubits.
    std::size_t first_register_qubits = 0;

    /// Uses the circuit's designated output qubit (register O).
    static VerifierSpec from_circuit(Circuit c, Mode mode = Mode::QMA);

    std::size_t witness_qubits() const { return circuit.witness_qubits(); }
    std::size_t ancilla_qubits() const { return circuit.ancilla_qubits(); }
    /// Throws std::invalid_argument unless acceptance is a single output qubit.
    std::size_t output_qubit() const;
    void validate() const;
};

RationalProb verifier_acceptance(const VerifierSpec& v, const SubsetState& witness,
                                 std::size_t max_width = exactsim::kDefaultWidthCap);

/// ceil(threshold * t).
std::size_t threshold_count(std::size_t t, const Rational& threshold);

/// t parallel copies on fresh witness/ancilla blocks; a fresh output qubit is
/// set iff at least ceil(threshold * t) copies output 1. Copy b's witness
/// occupies witness qubits [b m, (b+1) m), so the t-fold tensor power of a
/// subset witness is again a subset witness (see tensor_power).
VerifierSpec amplify(const VerifierSpec& v, std::size_t t, const Rational& threshold,
                     std::size_t max_width = exactsim::kDefaultWidthCap);

/// P[Bin(t, p) >= ceil(threshold t)] as an exact rational.
Rational amplified_acceptance(const Rational& per_copy, std::size_t t, const Rational& threshold);

SubsetState tensor_power(const SubsetState& s, std::size_t t);

struct SubsetizedVerifier {
    VerifierSpec verifier;
    std::size_t flag_qubit;       // extra witness qubit, last in the witness register
    RationalProb coin_branch;     // acceptance probability when the flag reads 1
};

/// Adds a flag witness qubit: on 0 the original protocol decides, on 1 the
/// verifier accepts on 3 of the 8 outcomes of three fresh coins. The witness
/// with every bit set is classical and attains the coin branch exactly.
SubsetizedVerifier subsetize_soundness(const VerifierSpec& v);

struct BscssInstance {
    Circuit circuit;
    std::vector<bool> y;
    std::vector<std::size_t> positions;
    RationalProb alpha;

    AcceptPredicate predicate() const { return exactsim::AcceptBitString{positions, y}; }
    /// y and positions agree in length, m' <= m + a, positions valid, 0 < alpha < 1/2.
    void validate() const;
};

/// Circuit text followed by `y <bits>`, `positions <q...>`, `alpha <p>/<q>`.
BscssInstance parse_bscss(std::istream& in);
void write_bscss(std::ostream& out, const BscssInstance& inst);

enum class BscssVerdict { Yes, No, NotPromise };
const char* to_string(BscssVerdict v);

struct BscssOptions {
    std::size_t max_enumerated_witness_qubits = 4;
    bool heuristic = false;
    std::size_t max_heuristic_witness_qubits = 10;
    std::size_t max_width = exactsim::kDefaultWidthCap;
};

struct BscssDecision {
    BscssVerdict verdict;
    RationalProb best_acceptance;  // best subset seen (the first crossing 1 - alpha on YES)
    std::optional<SubsetState> witness;
    bool exhaustive;
    std::optional<double> top_eigenvalue;  // heuristic path only
};

/// Exhaustive for m <= max_enumerated_witness_qubits: subsets are visited by
/// cardinality then lexicographically and enumeration stops at the first one
/// reaching 1 - alpha. Larger m needs `heuristic`, which certifies YES with the
/// band-construction subset of the top eigenvector and NO when the top
/// eigenvalue is below alpha; anything else is NOT_PROMISE.
BscssDecision decide_bscss(const BscssInstance& inst, const BscssOptions& options = {});

/// Z_x = V, y = "1" on the verifier's output qubit, m' = 1.
BscssInstance reduction_from_verifier(const VerifierSpec& v, const RationalProb& alpha);

/// 1/(257(m+3)), the largest alpha the containment argument covers.
Rational containment_alpha_limit(std::size_t m);
/// 1 + alpha - 1/(128(m+3)): acceptance ceiling of any state on a no-instance.
Rational containment_soundness_bound(const Rational& alpha, std::size_t m);
/// (1 - alpha) - (1 + alpha - 1/(128(m+3))) = -2 alpha + 1/(128(m+3)).
Rational containment_gap(const Rational& alpha, std::size_t m);

enum class IcbsVerdict { NonIdentity, AlmostIdentity, NotPromise };
const char* to_string(IcbsVerdict v);

struct IcbsDecision {
    IcbsVerdict verdict;
    std::vector<RationalProb> diagonal;  // |<z|Z|z>|^2 for every basis string z
    std::optional<std::size_t> witness;  // first z with value <= 1 - mu
};

inline constexpr std::size_t kDefaultIcbsWidthCap = 12;

/// Exact |<z|Z|z>|^2 over all z. Requires 0 <= delta < mu <= 1.
IcbsDecision decide_icbs(const Circuit& c, const Rational& mu, const Rational& delta,
                         std::size_t max_width = kDefaultIcbsWidthCap);

}  // namespace sqma::protocols
