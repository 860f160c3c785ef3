// Perfect completeness for optimal-subset verifiers: exact optimum search,
// the coin wrapper that pins yes-instance acceptance to 1/2, a small
// measurement-program language with a rewinding transform, and sequential
// one-sided amplification.
#pragma once

#include "sqma/circuit.hpp"
#include "sqma/protocols.hpp"
#include "sqma/rational.hpp"
#include "sqma/states.hpp"

#include <cstddef>
#include <optional>
#include <variant>
#include <vector>

namespace sqma::perfcomp {

using exactsim::Circuit;
using protocols::VerifierSpec;
using states::SubsetState;

inline constexpr std::size_t kMaxExactWitnessQubits = 4;
inline constexpr double kConsistencyTolerance = 1e-9;

struct MaxAcceptance {
    RationalProb value;     // best subset acceptance
    SubsetState witness;    // first optimal subset (by size, then lexicographically)
    double top_eigenvalue;  // best acceptance over all states, in floating point

    /// The subset optimum is also the optimum over all states.
    bool consistent(double tol = kConsistencyTolerance) const;
};

/// Throws CapExceeded when the verifier has more than max_witness_qubits witness qubits.
MaxAcceptance exact_max_acceptance(const VerifierSpec& v, std::size_t max_witness_qubits = kMaxExactWitnessQubits,
                                   std::size_t max_width = exactsim::kDefaultWidthCap);

struct BranchSizes {
    BigInt accept;  // 2^r - p
    BigInt reject;  // 2^r - q + p
    BigInt run;     // q
};

class WrappedVerifier {
public:
    const VerifierSpec& base() const { return base_; }
    const RationalProb& claimed() const { return claimed_; }
    std::uint64_t r() const { return r_; }
    std::size_t coin_qubits() const { return r_ + 1; }
    std::size_t first_coin() const { return first_coin_; }
    const BranchSizes& branches() const { return branches_; }
    const VerifierSpec& verifier() const { return wrapped_; }

    /// (2^r - p)/2^(r+1) + q/2^(r+1) * base.
    Rational acceptance_from_base(const Rational& base) const;
    /// The wrapped acceptance when the base accepts with 1/3.
    Rational no_instance_bound() const { return acceptance_from_base(Rational(1, 3)); }

private:
    friend std::optional<WrappedVerifier> build_coin_wrapper(const VerifierSpec&, const RationalProb&);
    WrappedVerifier(VerifierSpec base, RationalProb claimed, std::uint64_t r, std::size_t first_coin,
                    BranchSizes branches, VerifierSpec wrapped)
        : base_(std::move(base)), claimed_(std::move(claimed)), r_(r), first_coin_(first_coin),
          branches_(std::move(branches)), wrapped_(std::move(wrapped)) {}

    VerifierSpec base_;
    RationalProb claimed_;
    std::uint64_t r_;
    std::size_t first_coin_;
    BranchSizes branches_;
    VerifierSpec wrapped_;
};

/// Flips r+1 coins (the first coin is the most significant bit of the outcome).
/// Outcomes below 2^r - p accept, the next 2^r - q + p reject and the last q
/// run the base verifier. Returns nullopt, i.e. rejects outright, when the
/// claim is below 2/3. The base must accept on a single output qubit.
std::optional<WrappedVerifier> build_coin_wrapper(const VerifierSpec& v, const RationalProb& claimed);

struct AcceptOutput {
    std::size_t qubit;
};
/// Every qubit outside the witness register reads 0.
struct InitialSubspace {};
using Projector = std::variant<AcceptOutput, InitialSubspace>;

bool in_projector(const Projector& p, std::size_t index, std::size_t width, std::size_t witness_qubits);
/// Zeroes the coefficients outside the projector's range.
void project(std::vector<BigInt>& k, const Projector& p, std::size_t width, std::size_t witness_qubits);
/// 2 Pi - I: negates the coefficients outside the projector's range.
void reflect(std::vector<BigInt>& k, const Projector& p, std::size_t width, std::size_t witness_qubits);

namespace step {
struct Unitary {
    Circuit circuit;
    std::size_t next;
};
struct Reflection {
    Projector projector;
    std::size_t next;
};
struct Measurement {
    Projector projector;
    std::size_t on_hit;
    std::size_t on_miss;
};
/// Ends the current run successfully and starts an independent one from a
/// fresh witness copy and fresh ancillas.
struct FreshRun {
    std::size_t next;
};
struct Outcome {
    bool accept;
};
}  // namespace step

using Step = std::variant<step::Unitary, step::Reflection, step::Measurement, step::FreshRun, step::Outcome>;

/// A finite acyclic control-flow graph over one register of `width` qubits.
class MeasurementProgram {
public:
    /// Throws std::invalid_argument on dangling indices, cycles, mismatched
    /// circuit shapes or projectors outside the register.
    MeasurementProgram(std::size_t witness_qubits, std::size_t ancilla_qubits, std::vector<Step> steps,
                       std::size_t root = 0);

    std::size_t width() const { return witness_qubits_ + ancilla_qubits_; }
    std::size_t witness_qubits() const { return witness_qubits_; }
    std::size_t ancilla_qubits() const { return ancilla_qubits_; }
    const std::vector<Step>& steps() const { return steps_; }
    std::size_t root() const { return root_; }

private:
    std::size_t witness_qubits_;
    std::size_t ancilla_qubits_;
    std::vector<Step> steps_;
    std::size_t root_;
};

/// Run W; accept on Pi_acc. Otherwise apply W^dagger, 2 Pi_init - I and W,
/// then measure Pi_acc once more. The witness register is never measured.
MeasurementProgram rewind_program(const VerifierSpec& wrapped);

/// Checks that the optimum of the wrapped verifier is exactly 1/2, computed
/// from the base optimum and the wrapper formula, and throws
/// PreconditionViolation (carrying the optimum) otherwise.
MeasurementProgram rewind(const WrappedVerifier& w, bool check = true);
/// Same for an already-wrapped verifier read back from disk; the check
/// enumerates the wrapped verifier directly.
MeasurementProgram rewind_verifier(const VerifierSpec& wrapped, bool check = true);

/// Exact acceptance probability of the program on |S>|0...0>.
RationalProb program_acceptance(const MeasurementProgram& prog, const SubsetState& witness,
                                std::size_t max_width = exactsim::kDefaultWidthCap);

/// t sequential runs, each on a fresh witness copy; accepts iff every run accepts.
MeasurementProgram amplify_one_sided(const MeasurementProgram& prog, std::size_t t);

}  // namespace sqma::perfcomp
