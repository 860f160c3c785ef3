// Exact simulation of {H, X, CCX} circuits.
//
// A state is stored as integers k_j with the global scale 1/(sqrt(s) sqrt(2^r)),
// where s = |S| for the initial subset witness and r counts the Hadamards
// applied so far. X and CCX permute the k_j; H maps a pair (k0, k1) to
// (k0 + k1, k0 - k1) and increments r. Probabilities are therefore exact
// rationals with denominator s * 2^r.
#pragma once

#include "sqma/circuit.hpp"
#include "sqma/rational.hpp"
#include "sqma/states.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace sqma::exactsim {

/// Accept when the designated output qubit reads 1.
struct AcceptOutputQubit {
    std::size_t qubit = 0;
};

/// Accept when the listed qubits read the bit string y; the rest are
/// marginalized. An empty list accepts everything.
struct AcceptBitString {
    std::vector<std::size_t> positions;
    std::vector<bool> bits;
};

using AcceptPredicate = std::variant<AcceptOutputQubit, AcceptBitString>;

inline AcceptPredicate accept_all() { return AcceptBitString{}; }

void validate(const AcceptPredicate& accept, std::size_t width);
bool accepts(const AcceptPredicate& accept, std::size_t index, std::size_t width);

/// Applies one gate to a raw coefficient vector of the given width. Returns
/// true for H (the caller owns the Hadamard exponent).
bool apply_gate_in_place(std::vector<BigInt>& k, std::size_t width, const Gate& g);

class ExactState {
public:
    /// k_j = 1 exactly on |i>|0^a> for i in S; r = 0; s = |S|.
    static ExactState from_subset(const states::SubsetState& witness, std::size_t ancilla);
    static ExactState basis(std::size_t width, std::size_t index);

    std::size_t width() const { return width_; }
    std::span<const BigInt> coefficients() const { return k_; }
    std::uint64_t hadamard_exponent() const { return r_; }
    std::uint64_t subset_size() const { return s_; }

    void apply(const Gate& g);
    void apply(const Circuit& c);

    /// sum_j k_j^2 == s * 2^r, compared as big integers.
    bool norm_invariant_holds() const;

    /// While every k_j is even and r >= 2: halve every k_j and subtract 2 from r.
    void canonicalize();
    ExactState canonical() const;

    /// s * 2^r.
    BigInt denominator() const;
    /// sum_{j accepted} k_j^2.
    BigInt accepted_mass(const AcceptPredicate& accept) const;
    RationalProb probability(const AcceptPredicate& accept) const;

    states::Complex amplitude(std::size_t j) const;

    /// Same represented vector (k and r may differ by the canonical factors).
    friend bool same_represented_state(const ExactState& a, const ExactState& b);
    friend bool operator==(const ExactState&, const ExactState&) = default;

private:
    ExactState(std::size_t width, std::vector<BigInt> k, std::uint64_t r, std::uint64_t s)
        : width_(width), k_(std::move(k)), r_(r), s_(s) {}

    std::size_t width_;
    std::vector<BigInt> k_;
    std::uint64_t r_;
    std::uint64_t s_;
};

ExactState init_from_subset(const states::SubsetState& witness, std::size_t ancilla);
ExactState apply_gate(ExactState state, const Gate& g);

/// Runs the circuit on |S>|0^a> and returns sum_{j in A} k_j^2 / (s 2^r) in
/// lowest terms. Throws CapExceeded above max_width, DimensionMismatch when the
/// witness dimension is not 2^m.
RationalProb acceptance_probability_exact(const Circuit& c, const states::SubsetState& witness,
                                          const AcceptPredicate& accept,
                                          std::size_t max_width = kDefaultWidthCap);

/// Dense floating-point simulation, used as an independent cross-check.
states::DenseState float_simulate(const Circuit& c, const states::DenseState& input,
                                  std::size_t max_width = kDefaultWidthCap);
double acceptance_probability_float(const Circuit& c, const states::DenseState& witness,
                                    const AcceptPredicate& accept, std::size_t max_width = kDefaultWidthCap);

/// The outputs of every witness basis input |i>|0^a>, restricted to the
/// accepting basis states: column(i)[t] = k_i^{j_t}. All columns share the
/// Hadamard exponent r, so |S> accepts with
/// sum_t (sum_{i in S} k_i^{j_t})^2 / (|S| 2^r).
class BasisResponse {
public:
    BasisResponse(const Circuit& c, const AcceptPredicate& accept, std::size_t max_width = kDefaultWidthCap);

    std::size_t witness_dimension() const { return columns_.size(); }
    std::uint64_t hadamard_exponent() const { return r_; }
    std::size_t accepting_count() const { return accepting_count_; }
    std::span<const BigInt> column(std::size_t i) const { return columns_[i]; }

    RationalProb acceptance(const states::SubsetState& witness) const;
    /// <i|C|i'> of the acceptance operator restricted to the witness register.
    Rational operator_entry(std::size_t i, std::size_t i2) const;

private:
    std::vector<std::vector<BigInt>> columns_;
    std::uint64_t r_ = 0;
    std::size_t accepting_count_ = 0;
};

inline constexpr std::size_t kDefaultSubsetEnumerationDimension = 16;

struct SubsetOptimum {
    RationalProb value;
    states::SubsetState subset;
    bool stopped_early = false;
};

/// Enumerates nonempty witness subsets by cardinality, then lexicographically,
/// and returns the first one attaining the maximum acceptance. With stop_at,
/// returns the first subset whose acceptance is >= stop_at instead.
SubsetOptimum maximize_over_subsets(const BasisResponse& response, const std::optional<Rational>& stop_at = {},
                                    std::size_t max_witness_dimension = kDefaultSubsetEnumerationDimension);

}  // namespace sqma::exactsim
