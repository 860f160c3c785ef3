// Dense pure states, subset states and the trace-norm identities for pairs of
// pure states.
#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <random>
#include <span>
#include <vector>

namespace sqma::states {

using Complex = std::complex<double>;
using Amplitudes = std::vector<Complex>;

inline constexpr double kNormTolerance = 1e-9;
inline constexpr std::size_t kDefaultEigenDimensionCap = 4096;

bool is_power_of_two(std::size_t d);
/// log2 of a power of two.
std::size_t log2_exact(std::size_t d);
double norm2(std::span<const Complex> v);

/// Normalized state over n qubits; the amplitude vector has length 2^n.
class DenseState {
public:
    /// Takes ownership of an already normalized amplitude vector. Throws
    /// std::invalid_argument when the length is not a power of two or the
    /// 2-norm differs from 1 by more than kNormTolerance.
    explicit DenseState(Amplitudes amplitudes);

    /// Rescales an arbitrary nonzero vector of power-of-two length.
    static DenseState normalized(Amplitudes amplitudes);
    static DenseState basis(std::size_t num_qubits, std::size_t index);

    std::size_t num_qubits() const { return num_qubits_; }
    std::size_t dimension() const { return amplitudes_.size(); }
    std::span<const Complex> amplitudes() const { return amplitudes_; }
    const Complex& operator[](std::size_t i) const { return amplitudes_[i]; }

private:
    std::size_t num_qubits_ = 0;
    Amplitudes amplitudes_;
};

/// Nonempty index set S of [0, d) standing for the uniform superposition |S>.
class SubsetState {
public:
    /// Indices are sorted; duplicates, out-of-range indices and an empty set
    /// are rejected with std::invalid_argument.
    SubsetState(std::size_t dimension, std::vector<std::size_t> indices);

    static SubsetState full(std::size_t dimension);
    static SubsetState singleton(std::size_t dimension, std::size_t index);

    std::size_t dimension() const { return dimension_; }
    std::size_t size() const { return indices_.size(); }
    const std::vector<std::size_t>& indices() const { return indices_; }
    bool contains(std::size_t i) const;

    friend bool operator==(const SubsetState&, const SubsetState&) = default;

private:
    std::size_t dimension_;
    std::vector<std::size_t> indices_;
};

/// Amplitude vector of |S> for any dimension.
Amplitudes subset_amplitudes(const SubsetState& s);
/// |S> as a dense state; the dimension must be a power of two.
DenseState densify(const SubsetState& s);

/// <v|w>, conjugate-linear in the first argument.
Complex overlap(std::span<const Complex> v, std::span<const Complex> w);
Complex overlap(const DenseState& v, const DenseState& w);

/// || |v><v| - |w><w| ||_tr = 2 sqrt(1 - |<v|w>|^2).
double trace_distance_pure(const DenseState& v, const DenseState& w);

/// max over 0 <= C <= I of |<C, |v><v| - |w><w|>|, computed as the sum of the
/// positive eigenvalues of the difference of projectors. Throws CapExceeded
/// above max_dimension and std::logic_error if the result disagrees with half
/// the closed-form trace distance by more than 1e-8.
double max_povm_advantage(const DenseState& v, const DenseState& w,
                          std::size_t max_dimension = kDefaultEigenDimensionCap);

/// The n-qubit state with amplitude 1/sqrt(n 2^floor(log2 i)) on |i>, i >= 1,
/// and 0 on |0>.
DenseState psi_n(std::size_t n);

/// Complex standard normal entries, then normalized.
DenseState random_state(std::size_t num_qubits, std::mt19937_64& rng);
Amplitudes random_vector(std::size_t dimension, std::mt19937_64& rng);

DenseState tensor(const DenseState& a, const DenseState& b);
/// Product index set {i * b.dimension() + j}; densify(tensor(S, T)) equals
/// tensor(densify(S), densify(T)).
SubsetState tensor(const SubsetState& a, const SubsetState& b);

// Text formats. States: "dim <d>" then one "re im" line per amplitude.
// Subsets: "dim <d>" then one index per line. '#' starts a comment.
Amplitudes read_amplitudes(std::istream& in);
DenseState read_state(std::istream& in);
void write_state(std::ostream& out, std::span<const Complex> amplitudes);
SubsetState read_subset(std::istream& in);
void write_subset(std::ostream& out, const SubsetState& s);

}  // namespace sqma::states
