// Independent reference computations for the tests. Nothing here calls the
// library routine it is used to check.
#pragma once

#include "sqma/circuit.hpp"
#include "sqma/rational.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

using CL = std::complex<long double>;
using sqma::exactsim::Circuit;
using sqma::exactsim::GateKind;

// Dense simulation in long double, walking qubits as explicit bit vectors
// (qubit 0 is the leftmost bit of the index).
inline std::vector<CL> simulate(const Circuit& c, std::vector<CL> psi) {
    const std::size_t w = c.width();
    const std::size_t dim = std::size_t{1} << w;
    auto bits_of = [w](std::size_t index) {
        std::vector<int> b(w);
        for (std::size_t q = 0; q < w; ++q) b[q] = static_cast<int>((index >> (w - 1 - q)) & 1U);
        return b;
    };
    auto index_of = [w](const std::vector<int>& b) {
        std::size_t index = 0;
        for (std::size_t q = 0; q < w; ++q) index = index * 2 + static_cast<std::size_t>(b[q]);
        return index;
    };
    const long double h = 1.0L / std::sqrt(2.0L);
    for (const auto& g : c.gates()) {
        std::vector<CL> next(dim, CL(0));
        for (std::size_t i = 0; i < dim; ++i) {
            if (psi[i] == CL(0)) continue;
            auto b = bits_of(i);
            switch (g.kind) {
                case GateKind::X:
                    b[g.target] ^= 1;
                    next[index_of(b)] += psi[i];
                    break;
                case GateKind::CCX:
                    if (b[g.controls[0]] && b[g.controls[1]]) b[g.target] ^= 1;
                    next[index_of(b)] += psi[i];
                    break;
                case GateKind::H: {
                    const int old = b[g.target];
                    b[g.target] = 0;
                    next[index_of(b)] += h * psi[i];
                    b[g.target] = 1;
                    next[index_of(b)] += (old ? -h : h) * psi[i];
                    break;
                }
            }
        }
        psi = std::move(next);
    }
    return psi;
}

inline bool bit(std::size_t index, std::size_t qubit, std::size_t width) {
    return (index >> (width - 1 - qubit)) & 1U;
}

// Acceptance of |S>|0^a>; `accept` sees the final basis index.
inline long double subset_acceptance(const Circuit& c, const std::vector<std::size_t>& subset,
                                     const std::function<bool(std::size_t)>& accept) {
    std::vector<CL> psi(std::size_t{1} << c.width(), CL(0));
    const long double amp = 1.0L / std::sqrt(static_cast<long double>(subset.size()));
    for (auto i : subset) psi[i << c.ancilla_qubits()] = amp;
    const auto out = simulate(c, std::move(psi));
    long double p = 0;
    for (std::size_t j = 0; j < out.size(); ++j)
        if (accept(j)) p += std::norm(out[j]);
    return p;
}

inline std::vector<std::size_t> mask_to_indices(std::uint64_t mask) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; mask; ++i, mask >>= 1)
        if (mask & 1U) idx.push_back(i);
    return idx;
}

// max over nonempty S of the acceptance, by listing every mask.
inline long double best_subset_acceptance(const Circuit& c, const std::function<bool(std::size_t)>& accept) {
    const std::size_t d = std::size_t{1} << c.witness_qubits();
    long double best = -1;
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << d); ++mask)
        best = std::max(best, subset_acceptance(c, mask_to_indices(mask), accept));
    return best;
}

// max over nonempty S of |sum_S v| / sqrt|S|.
inline double best_subset_score(const std::vector<std::complex<double>>& v) {
    double best = 0;
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << v.size()); ++mask) {
        std::complex<long double> sum = 0;
        std::size_t count = 0;
        for (auto i : mask_to_indices(mask)) {
            sum += std::complex<long double>(v[i].real(), v[i].imag());
            ++count;
        }
        best = std::max(best, static_cast<double>(std::abs(sum) / std::sqrt(static_cast<long double>(count))));
    }
    return best;
}

// || |v><v| - |w><w| ||_tr from the eigenvalues of a general complex matrix.
inline double trace_norm(const std::vector<std::complex<double>>& v, const std::vector<std::complex<double>>& w) {
    const auto n = static_cast<Eigen::Index>(v.size());
    Eigen::MatrixXcd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            m(i, j) = v[i] * std::conj(v[j]) - w[i] * std::conj(w[j]);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(m, false);
    return solver.eigenvalues().cwiseAbs().sum();
}

// P[at least k of t independent trials succeed], summing over all 2^t outcomes.
inline sqma::Rational at_least_k_of_t(const sqma::Rational& p, std::size_t t, std::size_t k) {
    sqma::Rational total = 0;
    for (std::uint64_t outcome = 0; outcome < (std::uint64_t{1} << t); ++outcome) {
        if (static_cast<std::size_t>(__builtin_popcountll(outcome)) < k) continue;
        sqma::Rational term = 1;
        for (std::size_t b = 0; b < t; ++b) term *= ((outcome >> b) & 1U) ? p : sqma::Rational(1 - p);
        total += term;
    }
    total.canonicalize();
    return total;
}

// Haar-ish unitary from the QR factorization of a complex Gaussian matrix.
inline Eigen::MatrixXcd random_unitary(std::size_t d, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Eigen::MatrixXcd a(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = {g(rng), g(rng)};
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
    return qr.householderQ() * Eigen::MatrixXcd::Identity(a.rows(), a.cols());
}

// U diag(lambda) U^dagger with the largest eigenvalue pinned to `top`.
inline Eigen::MatrixXcd random_contraction(std::size_t d, double top, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Eigen::VectorXd lambda(static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < lambda.size(); ++i) lambda[i] = u(rng) * top;
    lambda[0] = top;
    const auto q = random_unitary(d, rng);
    Eigen::MatrixXcd c = q * lambda.cast<std::complex<double>>().asDiagonal() * q.adjoint();
    return 0.5 * (c + c.adjoint());
}

}  // namespace oracle
