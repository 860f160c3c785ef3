// Subset-state approximation of arbitrary vectors: the band-partition
// construction with its certified overlap, power-of-two rounding, an
// exhaustive optimal-subset search, and the prefix scan over psi_n.
#pragma once

#include "sqma/states.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace sqma::approx {

using states::Complex;
using states::SubsetState;

inline constexpr std::size_t kDefaultBruteForceCap = 20;
inline constexpr std::size_t kMaxPrefixScanQubits = 24;

/// Which part of the input the construction worked on.
struct BranchTrace {
    enum class Part { Real, Imaginary };
    Part part = Part::Real;
    bool negated = false;     // the negative part was kept (and sign-flipped)
    std::size_t band = 1;     // chosen band k', 1-based
    std::size_t gamma = 1;    // number of non-tail bands
};

struct ApproximationResult {
    SubsetState subset;
    double score;      // |sum_{j in S} v_j| / sqrt(|S|)
    double guarantee;  // certified lower bound on score
    BranchTrace trace;
};

/// T_1..T_gamma and the tail T_{gamma+1} of a nonnegative vector x:
/// T_k = { j : |x|/2^k < x_j <= |x|/2^(k-1) }, tail = { j : 0 < x_j <= |x|/2^gamma }.
struct BandPartition {
    std::size_t gamma = 1;
    double norm = 0.0;
    std::vector<std::vector<std::size_t>> bands;  // gamma + 1 entries, the last is the tail

    const std::vector<std::size_t>& tail() const { return bands.back(); }
};

/// ceil((log2 d + 1) / 2), computed in integers as the least g with 4^g >= 2d.
std::size_t band_count(std::size_t d);

/// |v|_2 / (8 sqrt(log2 d + 3)).
double guarantee_for(double norm, std::size_t d);

BandPartition partition_bands(std::span<const double> x);

double subset_score(std::span<const Complex> v, const SubsetState& s);

/// Runs the band construction on a nonzero v and returns the best non-tail band.
/// The result always satisfies score >= guarantee; std::invalid_argument on a
/// zero or empty input.
ApproximationResult geometric_subset(std::span<const Complex> v);

/// Shrinks the subset to 2^floor(log2 |S|) members, keeping those whose
/// projection onto the phase of sum_{j in S} v_j is largest. The rounded score
/// is at least old_score / sqrt(2); the reported guarantee is halved.
ApproximationResult round_to_pow2(const ApproximationResult& result, std::span<const Complex> v);

struct BruteForceResult {
    SubsetState subset;
    double score;
};

/// argmax over all nonempty S of |sum_{j in S} v_j| / sqrt(|S|). Ties go to the
/// smaller subset, then to the lexicographically smaller sorted index list.
/// The mask range is split into `chunks` independent pieces (0 picks one per
/// hardware thread); the answer does not depend on the split.
BruteForceResult brute_force_best_subset(std::span<const Complex> v,
                                         std::size_t max_dimension = kDefaultBruteForceCap,
                                         std::size_t chunks = 0);

struct PrefixResult {
    std::size_t m;   // best prefix is {1, ..., m}
    double score;
    double bound;    // (2 + sqrt 2) / sqrt(n)
};

/// Scans the prefixes [m] of psi_n (amplitudes are non-increasing for i >= 1).
PrefixResult psi_n_best_prefix(std::size_t n);

}  // namespace sqma::approx
