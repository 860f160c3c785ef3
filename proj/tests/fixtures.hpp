// Hand-built verifiers and planted instances whose answers are known by
// construction.
#pragma once

#include "sqma/circuit.hpp"
#include "sqma/protocols.hpp"
#include "sqma/rational.hpp"

#include <algorithm>
#include <array>
#include <random>

namespace fixtures {

using sqma::Rational;
using sqma::exactsim::Circuit;
using sqma::exactsim::Gate;

// Accepts iff the witness reads `target` and the value of k fresh coins is
// below j, so the acceptance operator is (j / 2^k) |target><target|. With
// hadamard_witness the witness is first rotated by H on every qubit, which
// turns the operator into (j / 2^k) |h><h| with |h> = H^m |target>.
inline Circuit coin_verifier(std::size_t m, std::size_t target, std::size_t k, std::size_t j,
                             bool hadamard_witness = false) {
    const std::size_t work_count = std::max<std::size_t>({m >= 2 ? m - 2 : 0, k >= 1 ? k - 1 : 0});
    const bool needs_one = m == 1;
    const std::size_t ancilla = k + 1 + work_count + (needs_one ? 1 : 0) + 1;
    Circuit c(m, ancilla);
    const std::size_t first_coin = m, flag = m + k, first_work = flag + 1;
    const std::size_t one = first_work + work_count, out = c.width() - 1;
    std::vector<std::size_t> work(work_count);
    for (std::size_t i = 0; i < work_count; ++i) work[i] = first_work + i;
    std::optional<std::size_t> helper = needs_one ? std::optional<std::size_t>(one) : std::nullopt;
    if (helper) c.append(Gate::x(one));

    if (hadamard_witness)
        for (std::size_t q = 0; q < m; ++q) c.append(Gate::h(q));
    std::vector<std::size_t> wq(m);
    std::array<bool, 32> bits{};
    for (std::size_t q = 0; q < m; ++q) {
        wq[q] = q;
        bits[q] = (target >> (m - 1 - q)) & 1U;
    }
    sqma::exactsim::append_controlled_x(c, wq, std::span<const bool>(bits.data(), m), flag, work, helper);

    for (std::size_t i = 0; i < k; ++i) c.append(Gate::h(first_coin + i));
    std::vector<std::size_t> controls;
    for (std::size_t i = 0; i < k; ++i) controls.push_back(first_coin + i);
    controls.push_back(flag);
    for (std::size_t value = 0; value < j; ++value) {
        std::array<bool, 32> v{};
        for (std::size_t i = 0; i < k; ++i) v[i] = (value >> (k - 1 - i)) & 1U;
        v[k] = true;
        sqma::exactsim::append_controlled_x(c, controls, std::span<const bool>(v.data(), k + 1), out, work, helper);
    }
    c.set_output(out);
    return c;
}

inline sqma::protocols::VerifierSpec spec_of(Circuit c) {
    return sqma::protocols::VerifierSpec::from_circuit(std::move(c));
}

// A 2-witness-qubit verifier found by random search whose best subset state
// accepts with probability exactly 2/3 while the best state overall reaches 3/4.
inline Circuit two_thirds_verifier() {
    return sqma::exactsim::parse_circuit(
        "qubits 2 ancilla 2\noutput 1\n"
        "H 0\nX 3\nCCX 3 1 0\nCCX 0 1 3\nH 1\nCCX 0 1 3\nCCX 1 3 2\nH 1\nCCX 1 2 0\n");
}

struct PlantedBscss {
    sqma::protocols::BscssInstance instance;
    bool yes;
    std::vector<std::size_t> planted;  // YES only: a subset accepted with probability 1
};

// YES: H on a random set Q of witness qubits sends the subset
// {i : i agrees with b outside Q} to the single string (0 on Q, b elsewhere),
// which a multi-controlled X detects. y asks for the output bit and for some
// witness bits whose final values are known. NO: the output qubit is never
// touched, so no state reaches y.
inline PlantedBscss planted_bscss(std::size_t m, bool yes, const Rational& alpha, std::mt19937_64& rng) {
    const std::size_t work_count = m >= 2 ? m - 2 : 0;
    const bool needs_one = m == 1;
    const std::size_t scratch = 2;
    Circuit c(m, work_count + (needs_one ? 1 : 0) + scratch + 1);
    const std::size_t out = c.width() - 1;
    std::vector<std::size_t> work(work_count);
    for (std::size_t i = 0; i < work_count; ++i) work[i] = m + i;
    const std::size_t one = m + work_count;
    const std::size_t first_scratch = one + (needs_one ? 1 : 0);
    std::optional<std::size_t> helper = needs_one ? std::optional<std::size_t>(one) : std::nullopt;

    std::uniform_int_distribution<int> coin(0, 1);
    std::vector<bool> in_q(m), b(m);
    for (std::size_t q = 0; q < m; ++q) {
        in_q[q] = coin(rng);
        b[q] = !in_q[q] && coin(rng);
    }
    PlantedBscss result{{c, {}, {}, sqma::RationalProb(alpha)}, yes, {}};
    if (yes) {
        if (helper) c.append(Gate::x(one));
        for (std::size_t q = 0; q < m; ++q)
            if (in_q[q]) c.append(Gate::h(q));
        std::vector<std::size_t> wq(m);
        std::array<bool, 32> bits{};
        for (std::size_t q = 0; q < m; ++q) {
            wq[q] = q;
            bits[q] = b[q];
        }
        sqma::exactsim::append_controlled_x(c, wq, std::span<const bool>(bits.data(), m), out, work, helper);
        for (std::size_t i = 0; i < (std::size_t{1} << m); ++i) {
            bool ok = true;
            for (std::size_t q = 0; q < m; ++q)
                if (!in_q[q] && (((i >> (m - 1 - q)) & 1U) != b[q])) ok = false;
            if (ok) result.planted.push_back(i);
        }
    } else {
        // random traffic on every qubit but the output
        std::uniform_int_distribution<std::size_t> q(0, out - 1);
        for (int g = 0; g < 12; ++g) {
            const int kind = out >= 3 ? static_cast<int>(rng() % 3) : static_cast<int>(rng() % 2);
            if (kind == 0) c.append(Gate::h(q(rng)));
            else if (kind == 1) c.append(Gate::x(q(rng)));
            else {
                std::size_t x = q(rng), y = q(rng), t = q(rng);
                while (y == x) y = q(rng);
                while (t == x || t == y) t = q(rng);
                c.append(Gate::ccx(x, y, t));
            }
        }
    }
    // scratch qubits get noise that y never looks at
    for (std::size_t i = 0; i < scratch; ++i) c.append(Gate::h(first_scratch + i));

    std::vector<bool> y{true};
    std::vector<std::size_t> positions{out};
    if (yes) {
        for (std::size_t q = 0; q < m; ++q) {
            if (coin(rng)) {
                positions.push_back(q);
                y.push_back(in_q[q] ? false : b[q]);
            }
        }
    }
    result.instance = {std::move(c), std::move(y), std::move(positions), sqma::RationalProb(alpha)};
    return result;
}

}  // namespace fixtures
