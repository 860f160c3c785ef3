#include "sqma/exactsim.hpp"

#include "sqma/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sqma::exactsim {

namespace {

struct PredicateValidator {
    std::size_t width;
    void operator()(const AcceptOutputQubit& p) const {
        if (p.qubit >= width) throw std::out_of_range("output qubit out of range");
    }
    void operator()(const AcceptBitString& p) const {
        if (p.positions.size() != p.bits.size()) throw std::invalid_argument("y and positions differ in length");
        if (p.positions.size() > width) throw std::invalid_argument("more measured positions than qubits");
        for (auto q : p.positions)
            if (q >= width) throw std::out_of_range("measured position out of range");
        auto sorted = p.positions;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            throw std::invalid_argument("measured positions must be distinct");
        }
    }
};

void check_width(const Circuit& c, std::size_t max_width) {
    if (c.width() > max_width) {
        throw CapExceeded("circuit width " + std::to_string(c.width()) + " exceeds cap " + std::to_string(max_width));
    }
}

void check_witness(const Circuit& c, std::size_t witness_dimension) {
    if (witness_dimension != (std::size_t{1} << c.witness_qubits())) {
        throw DimensionMismatch("witness dimension " + std::to_string(witness_dimension) + " does not match " +
                                std::to_string(c.witness_qubits()) + " witness qubits");
    }
}

}  // namespace

void validate(const AcceptPredicate& accept, std::size_t width) { std::visit(PredicateValidator{width}, accept); }

bool accepts(const AcceptPredicate& accept, std::size_t index, std::size_t width) {
    if (const auto* o = std::get_if<AcceptOutputQubit>(&accept)) return (index >> bit_of(o->qubit, width)) & 1U;
    const auto& s = std::get<AcceptBitString>(accept);
    for (std::size_t i = 0; i < s.positions.size(); ++i) {
        const bool bit = (index >> bit_of(s.positions[i], width)) & 1U;
        if (bit != s.bits[i]) return false;
    }
    return true;
}

bool apply_gate_in_place(std::vector<BigInt>& k, std::size_t width, const Gate& g) {
    const std::size_t dim = k.size();
    const std::size_t t = std::size_t{1} << bit_of(g.target, width);
    switch (g.kind) {
        case GateKind::X:
            for (std::size_t j = 0; j < dim; ++j)
                if (!(j & t)) mpz_swap(k[j].get_mpz_t(), k[j | t].get_mpz_t());
            return false;
        case GateKind::CCX: {
            const std::size_t c = (std::size_t{1} << bit_of(g.controls[0], width)) |
                                  (std::size_t{1} << bit_of(g.controls[1], width));
            for (std::size_t j = 0; j < dim; ++j)
                if (!(j & t) && (j & c) == c) mpz_swap(k[j].get_mpz_t(), k[j | t].get_mpz_t());
            return false;
        }
        case GateKind::H: {
            BigInt diff;
            for (std::size_t j = 0; j < dim; ++j) {
                if (j & t) continue;
                mpz_ptr a = k[j].get_mpz_t();
                mpz_ptr b = k[j | t].get_mpz_t();
                mpz_sub(diff.get_mpz_t(), a, b);
                mpz_add(a, a, b);
                mpz_swap(b, diff.get_mpz_t());
            }
            return true;
        }
    }
    return false;
}

ExactState ExactState::from_subset(const states::SubsetState& witness, std::size_t ancilla) {
    if (!states::is_power_of_two(witness.dimension())) throw DimensionMismatch("witness dimension is not 2^m");
    const std::size_t m = states::log2_exact(witness.dimension());
    const std::size_t width = m + ancilla;
    if (width > 62) throw CapExceeded("state width exceeds 62 qubits");
    std::vector<BigInt> k(std::size_t{1} << width);
    for (auto i : witness.indices()) k[i << ancilla] = 1;
    return ExactState(width, std::move(k), 0, witness.size());
}

ExactState ExactState::basis(std::size_t width, std::size_t index) {
    if (width > 62) throw CapExceeded("state width exceeds 62 qubits");
    std::vector<BigInt> k(std::size_t{1} << width);
    if (index >= k.size()) throw std::out_of_range("basis index out of range");
    k[index] = 1;
    return ExactState(width, std::move(k), 0, 1);
}

void ExactState::apply(const Gate& g) {
    if (g.target >= width_ || (g.kind == GateKind::CCX && (g.controls[0] >= width_ || g.controls[1] >= width_))) {
        throw std::out_of_range("gate index out of range for state width");
    }
    if (apply_gate_in_place(k_, width_, g)) ++r_;
}

void ExactState::apply(const Circuit& c) {
    if (c.width() != width_) throw DimensionMismatch("circuit and state widths differ");
    for (const auto& g : c.gates()) apply(g);
}

bool ExactState::norm_invariant_holds() const {
    BigInt sum = 0;
    for (const auto& x : k_) sum += x * x;
    return sum == denominator();
}

void ExactState::canonicalize() {
    while (r_ >= 2) {
        const bool all_even = std::all_of(k_.begin(), k_.end(), [](const BigInt& x) { return mpz_even_p(x.get_mpz_t()); });
        if (!all_even) break;
        for (auto& x : k_) mpz_fdiv_q_2exp(x.get_mpz_t(), x.get_mpz_t(), 1);
        r_ -= 2;
    }
}

ExactState ExactState::canonical() const {
    ExactState c = *this;
    c.canonicalize();
    return c;
}

BigInt ExactState::denominator() const { return BigInt(static_cast<unsigned long>(s_)) * pow2(r_); }

BigInt ExactState::accepted_mass(const AcceptPredicate& accept) const {
    validate(accept, width_);
    BigInt sum = 0;
    for (std::size_t j = 0; j < k_.size(); ++j)
        if (accepts(accept, j, width_)) sum += k_[j] * k_[j];
    return sum;
}

RationalProb ExactState::probability(const AcceptPredicate& accept) const {
    return RationalProb(accepted_mass(accept), denominator());
}

states::Complex ExactState::amplitude(std::size_t j) const {
    const double scale = std::ldexp(1.0, -static_cast<int>(r_ / 2)) * ((r_ % 2) ? std::sqrt(0.5) : 1.0);
    return k_.at(j).get_d() * scale / std::sqrt(static_cast<double>(s_));
}

bool same_represented_state(const ExactState& a, const ExactState& b) {
    if (a.width_ != b.width_ || a.s_ != b.s_) return false;
    return a.canonical() == b.canonical();
}

ExactState init_from_subset(const states::SubsetState& witness, std::size_t ancilla) {
    return ExactState::from_subset(witness, ancilla);
}

ExactState apply_gate(ExactState state, const Gate& g) {
    state.apply(g);
    return state;
}

RationalProb acceptance_probability_exact(const Circuit& c, const states::SubsetState& witness,
                                          const AcceptPredicate& accept, std::size_t max_width) {
    check_width(c, max_width);
    check_witness(c, witness.dimension());
    validate(accept, c.width());
    ExactState state = ExactState::from_subset(witness, c.ancilla_qubits());
    for (const auto& g : c.gates()) {
        state.apply(g);
        if (g.kind == GateKind::H) state.canonicalize();
    }
    return state.probability(accept);
}

states::DenseState float_simulate(const Circuit& c, const states::DenseState& input, std::size_t max_width) {
    check_width(c, max_width);
    if (input.dimension() != (std::size_t{1} << c.width())) throw DimensionMismatch("input dimension does not match circuit width");
    states::Amplitudes v(input.amplitudes().begin(), input.amplitudes().end());
    const double h = 1.0 / std::sqrt(2.0);
    const std::size_t w = c.width();
    for (const auto& g : c.gates()) {
        const std::size_t t = std::size_t{1} << bit_of(g.target, w);
        switch (g.kind) {
            case GateKind::X:
                for (std::size_t j = 0; j < v.size(); ++j)
                    if (!(j & t)) std::swap(v[j], v[j | t]);
                break;
            case GateKind::CCX: {
                const std::size_t cm = (std::size_t{1} << bit_of(g.controls[0], w)) |
                                       (std::size_t{1} << bit_of(g.controls[1], w));
                for (std::size_t j = 0; j < v.size(); ++j)
                    if (!(j & t) && (j & cm) == cm) std::swap(v[j], v[j | t]);
                break;
            }
            case GateKind::H:
                for (std::size_t j = 0; j < v.size(); ++j) {
                    if (j & t) continue;
                    const auto a = v[j], b = v[j | t];
                    v[j] = h * (a + b);
                    v[j | t] = h * (a - b);
                }
                break;
        }
    }
    return states::DenseState(std::move(v));
}

double acceptance_probability_float(const Circuit& c, const states::DenseState& witness,
                                    const AcceptPredicate& accept, std::size_t max_width) {
    check_width(c, max_width);
    check_witness(c, witness.dimension());
    validate(accept, c.width());
    states::Amplitudes padded(std::size_t{1} << c.width());
    for (std::size_t i = 0; i < witness.dimension(); ++i) padded[i << c.ancilla_qubits()] = witness[i];
    const auto out = float_simulate(c, states::DenseState(std::move(padded)), max_width);
    double p = 0.0;
    for (std::size_t j = 0; j < out.dimension(); ++j)
        if (accepts(accept, j, c.width())) p += std::norm(out[j]);
    return p;
}

BasisResponse::BasisResponse(const Circuit& c, const AcceptPredicate& accept, std::size_t max_width) {
    check_width(c, max_width);
    validate(accept, c.width());
    const std::size_t w = c.width();
    std::vector<std::size_t> accepting;
    for (std::size_t j = 0; j < (std::size_t{1} << w); ++j)
        if (accepts(accept, j, w)) accepting.push_back(j);
    accepting_count_ = accepting.size();
    r_ = c.hadamard_count();

    const std::size_t dim = std::size_t{1} << c.witness_qubits();
    columns_.reserve(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        ExactState s = ExactState::basis(w, i << c.ancilla_qubits());
        s.apply(c);
        std::vector<BigInt> col;
        col.reserve(accepting.size());
        for (auto j : accepting) col.push_back(s.coefficients()[j]);
        columns_.push_back(std::move(col));
    }
}

RationalProb BasisResponse::acceptance(const states::SubsetState& witness) const {
    if (witness.dimension() != witness_dimension()) throw DimensionMismatch("witness dimension mismatch");
    BigInt num = 0, sum;
    for (std::size_t t = 0; t < accepting_count_; ++t) {
        sum = 0;
        for (auto i : witness.indices()) sum += columns_[i][t];
        num += sum * sum;
    }
    return RationalProb(num, BigInt(static_cast<unsigned long>(witness.size())) * pow2(r_));
}

Rational BasisResponse::operator_entry(std::size_t i, std::size_t i2) const {
    BigInt num = 0;
    for (std::size_t t = 0; t < accepting_count_; ++t) num += columns_.at(i)[t] * columns_.at(i2)[t];
    Rational v(num, pow2(r_));
    v.canonicalize();
    return v;
}

namespace {

BigInt to_big(const BigInt& x) { return x; }

BigInt to_big(__int128 x) {
    const bool neg = x < 0;
    unsigned __int128 u = neg ? static_cast<unsigned __int128>(-(x + 1)) + 1 : static_cast<unsigned __int128>(x);
    BigInt hi(static_cast<unsigned long>(static_cast<std::uint64_t>(u >> 64)));
    BigInt lo(static_cast<unsigned long>(static_cast<std::uint64_t>(u)));
    BigInt r = (hi << 64) + lo;
    return neg ? BigInt(-r) : r;
}

template <class Int>
SubsetOptimum enumerate_subsets(const std::vector<std::vector<Int>>& cols, std::size_t accepting,
                                std::uint64_t r, const std::optional<Rational>& stop_at) {
    const std::size_t dim = cols.size();
    const BigInt scale = pow2(r);
    std::vector<Int> sums(accepting);
    Int best_num = 0;
    std::size_t best_card = 0;
    std::vector<std::size_t> best_idx;

    std::vector<std::size_t> idx;
    for (std::size_t card = 1; card <= dim; ++card) {
        idx.resize(card);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        while (true) {
            std::fill(sums.begin(), sums.end(), Int(0));
            for (auto i : idx)
                for (std::size_t t = 0; t < accepting; ++t) sums[t] += cols[i][t];
            Int num = 0;
            for (const auto& s : sums) num += s * s;

            if (best_card == 0 || num * Int(best_card) > best_num * Int(card)) {
                best_num = num;
                best_card = card;
                best_idx = idx;
            }
            if (stop_at) {
                Rational v(to_big(num), BigInt(static_cast<unsigned long>(card)) * scale);
                v.canonicalize();
                if (v >= *stop_at) {
                    return {RationalProb(v), states::SubsetState(dim, idx), true};
                }
            }
            // next combination in lexicographic order
            std::size_t pos = card;
            while (pos > 0 && idx[pos - 1] == dim - card + pos - 1) --pos;
            if (pos == 0) break;
            ++idx[pos - 1];
            for (std::size_t q = pos; q < card; ++q) idx[q] = idx[q - 1] + 1;
        }
    }
    return {RationalProb(to_big(best_num), BigInt(static_cast<unsigned long>(best_card)) * scale),
            states::SubsetState(dim, best_idx), false};
}

}  // namespace

SubsetOptimum maximize_over_subsets(const BasisResponse& response, const std::optional<Rational>& stop_at,
                                    std::size_t max_witness_dimension) {
    const std::size_t dim = response.witness_dimension();
    if (dim > max_witness_dimension) {
        throw CapExceeded("subset enumeration over witness dimension " + std::to_string(dim) + " exceeds cap " +
                          std::to_string(max_witness_dimension));
    }
    const std::size_t acc = response.accepting_count();
    const std::uint64_t r = response.hadamard_exponent();

    // |k| <= 2^(r/2); with r <= 56 and dim <= 16 every product below fits in 128 bits.
    bool fits = r <= 56 && dim <= 16;
    for (std::size_t i = 0; fits && i < dim; ++i)
        for (const auto& x : response.column(i))
            if (!x.fits_slong_p()) { fits = false; break; }

    if (fits) {
        std::vector<std::vector<__int128>> cols(dim);
        for (std::size_t i = 0; i < dim; ++i) {
            cols[i].reserve(acc);
            for (const auto& x : response.column(i)) cols[i].push_back(static_cast<__int128>(x.get_si()));
        }
        return enumerate_subsets(cols, acc, r, stop_at);
    }
    std::vector<std::vector<BigInt>> cols(dim);
    for (std::size_t i = 0; i < dim; ++i) cols[i].assign(response.column(i).begin(), response.column(i).end());
    return enumerate_subsets(cols, acc, r, stop_at);
}

}  // namespace sqma::exactsim
