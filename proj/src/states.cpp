#include "sqma/states.hpp"

#include "sqma/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <bit>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace sqma::states {

bool is_power_of_two(std::size_t d) { return std::has_single_bit(d); }

std::size_t log2_exact(std::size_t d) {
    if (!is_power_of_two(d)) throw DimensionMismatch("dimension " + std::to_string(d) + " is not a power of two");
    return static_cast<std::size_t>(std::countr_zero(d));
}

double norm2(std::span<const Complex> v) {
    double sum = 0.0;
    for (const auto& a : v) sum += std::norm(a);
    return std::sqrt(sum);
}

DenseState::DenseState(Amplitudes amplitudes) : amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.empty() || !is_power_of_two(amplitudes_.size())) {
        throw std::invalid_argument("state length must be a power of two");
    }
    num_qubits_ = log2_exact(amplitudes_.size());
    const double n = norm2(amplitudes_);
    if (std::abs(n - 1.0) > kNormTolerance) {
        throw std::invalid_argument("state is not normalized (norm " + std::to_string(n) + ")");
    }
}

DenseState DenseState::normalized(Amplitudes amplitudes) {
    const double n = norm2(amplitudes);
    if (n == 0.0) throw std::invalid_argument("cannot normalize the zero vector");
    for (auto& a : amplitudes) a /= n;
    return DenseState(std::move(amplitudes));
}

DenseState DenseState::basis(std::size_t num_qubits, std::size_t index) {
    const std::size_t d = std::size_t{1} << num_qubits;
    if (index >= d) throw std::out_of_range("basis index out of range");
    Amplitudes a(d);
    a[index] = 1.0;
    return DenseState(std::move(a));
}

SubsetState::SubsetState(std::size_t dimension, std::vector<std::size_t> indices)
    : dimension_(dimension), indices_(std::move(indices)) {
    if (dimension_ == 0) throw std::invalid_argument("subset dimension must be positive");
    if (indices_.empty()) throw std::invalid_argument("subset must be nonempty");
    std::sort(indices_.begin(), indices_.end());
    if (std::adjacent_find(indices_.begin(), indices_.end()) != indices_.end()) {
        throw std::invalid_argument("subset indices must be distinct");
    }
    if (indices_.back() >= dimension_) throw std::invalid_argument("subset index out of range");
}

SubsetState SubsetState::full(std::size_t dimension) {
    std::vector<std::size_t> all(dimension);
    for (std::size_t i = 0; i < dimension; ++i) all[i] = i;
    return SubsetState(dimension, std::move(all));
}

SubsetState SubsetState::singleton(std::size_t dimension, std::size_t index) {
    return SubsetState(dimension, {index});
}

bool SubsetState::contains(std::size_t i) const {
    return std::binary_search(indices_.begin(), indices_.end(), i);
}

Amplitudes subset_amplitudes(const SubsetState& s) {
    Amplitudes a(s.dimension());
    const double amp = 1.0 / std::sqrt(static_cast<double>(s.size()));
    for (auto i : s.indices()) a[i] = amp;
    return a;
}

DenseState densify(const SubsetState& s) {
    if (!is_power_of_two(s.dimension())) throw DimensionMismatch("subset dimension is not a power of two");
    return DenseState(subset_amplitudes(s));
}

Complex overlap(std::span<const Complex> v, std::span<const Complex> w) {
    if (v.size() != w.size()) throw DimensionMismatch("overlap of vectors with different dimensions");
    Complex sum = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) sum += std::conj(v[i]) * w[i];
    return sum;
}

Complex overlap(const DenseState& v, const DenseState& w) { return overlap(v.amplitudes(), w.amplitudes()); }

double trace_distance_pure(const DenseState& v, const DenseState& w) {
    if (v.dimension() != w.dimension()) throw DimensionMismatch("states have different dimensions");
    // 1 - |<v|w>|^2 = e (1 - e/4) with e = |w - phase v|^2 = 2 - 2|<v|w>|, which
    // keeps nearly equal states from cancelling down to sqrt(machine epsilon).
    const Complex c = overlap(v, w);
    const Complex phase = std::abs(c) > 0.0 ? c / std::abs(c) : Complex(1.0);
    double e = 0.0;
    for (std::size_t i = 0; i < v.dimension(); ++i) e += std::norm(w.amplitudes()[i] - phase * v.amplitudes()[i]);
    return 2.0 * std::sqrt(std::clamp(e * (1.0 - e / 4.0), 0.0, 1.0));
}

double max_povm_advantage(const DenseState& v, const DenseState& w, std::size_t max_dimension) {
    if (v.dimension() != w.dimension()) throw DimensionMismatch("states have different dimensions");
    const auto d = static_cast<Eigen::Index>(v.dimension());
    if (v.dimension() > max_dimension) {
        throw CapExceeded("dimension " + std::to_string(d) + " exceeds eigendecomposition cap " +
                          std::to_string(max_dimension));
    }
    Eigen::Map<const Eigen::VectorXcd> ev(v.amplitudes().data(), d);
    Eigen::Map<const Eigen::VectorXcd> ew(w.amplitudes().data(), d);
    const Eigen::MatrixXcd diff = ev * ev.adjoint() - ew * ew.adjoint();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(diff, Eigen::EigenvaluesOnly);
    double positive = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) positive += std::max(0.0, solver.eigenvalues()[i]);

    const double closed_form = 0.5 * trace_distance_pure(v, w);
    if (std::abs(positive - closed_form) > 1e-8) {
        std::ostringstream msg;
        msg << "eigenvalue route " << positive << " disagrees with closed form " << closed_form;
        throw std::logic_error(msg.str());
    }
    return positive;
}

DenseState psi_n(std::size_t n) {
    if (n == 0) throw std::invalid_argument("psi_n requires n >= 1");
    const std::size_t d = std::size_t{1} << n;
    Amplitudes a(d);
    for (std::size_t i = 1; i < d; ++i) {
        const auto level = static_cast<int>(std::bit_width(i)) - 1;  // floor(log2 i)
        a[i] = 1.0 / std::sqrt(static_cast<double>(n) * std::ldexp(1.0, level));
    }
    return DenseState(std::move(a));
}

Amplitudes random_vector(std::size_t dimension, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Amplitudes a(dimension);
    for (auto& x : a) {
        const double re = normal(rng);
        const double im = normal(rng);
        x = Complex(re, im);
    }
    return a;
}

DenseState random_state(std::size_t num_qubits, std::mt19937_64& rng) {
    return DenseState::normalized(random_vector(std::size_t{1} << num_qubits, rng));
}

DenseState tensor(const DenseState& a, const DenseState& b) {
    Amplitudes out(a.dimension() * b.dimension());
    for (std::size_t i = 0; i < a.dimension(); ++i)
        for (std::size_t j = 0; j < b.dimension(); ++j) out[i * b.dimension() + j] = a[i] * b[j];
    return DenseState(std::move(out));
}

SubsetState tensor(const SubsetState& a, const SubsetState& b) {
    std::vector<std::size_t> idx;
    idx.reserve(a.size() * b.size());
    for (auto i : a.indices())
        for (auto j : b.indices()) idx.push_back(i * b.dimension() + j);
    return SubsetState(a.dimension() * b.dimension(), std::move(idx));
}

namespace {

// Non-blank, comment-stripped lines of a text document.
std::vector<std::string> content_lines(std::istream& in) {
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        lines.push_back(line);
    }
    return lines;
}

std::size_t read_dim_header(const std::vector<std::string>& lines) {
    if (lines.empty()) throw ParseError("missing 'dim <d>' header");
    std::istringstream hs(lines.front());
    std::string key;
    long long d = 0;
    std::string extra;
    if (!(hs >> key >> d) || key != "dim" || d <= 0 || (hs >> extra)) {
        throw ParseError("malformed header '" + lines.front() + "', expected 'dim <d>'");
    }
    return static_cast<std::size_t>(d);
}

}  // namespace

Amplitudes read_amplitudes(std::istream& in) {
    const auto lines = content_lines(in);
    const std::size_t d = read_dim_header(lines);
    if (lines.size() - 1 != d) {
        throw ParseError("expected " + std::to_string(d) + " amplitude lines, got " + std::to_string(lines.size() - 1));
    }
    Amplitudes a(d);
    for (std::size_t i = 0; i < d; ++i) {
        std::istringstream ls(lines[i + 1]);
        double re = 0.0, im = 0.0;
        std::string extra;
        if (!(ls >> re >> im) || (ls >> extra)) throw ParseError("malformed amplitude line '" + lines[i + 1] + "'");
        a[i] = Complex(re, im);
    }
    return a;
}

DenseState read_state(std::istream& in) {
    auto a = read_amplitudes(in);
    if (!is_power_of_two(a.size())) throw ParseError("state dimension is not a power of two");
    try {
        return DenseState(std::move(a));
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what());
    }
}

void write_state(std::ostream& out, std::span<const Complex> amplitudes) {
    out << "dim " << amplitudes.size() << '\n';
    out << std::setprecision(17);
    for (const auto& a : amplitudes) out << a.real() << ' ' << a.imag() << '\n';
}

SubsetState read_subset(std::istream& in) {
    const auto lines = content_lines(in);
    const std::size_t d = read_dim_header(lines);
    std::vector<std::size_t> idx;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        std::istringstream ls(lines[i]);
        long long v = -1;
        std::string extra;
        if (!(ls >> v) || v < 0 || (ls >> extra)) throw ParseError("malformed subset index '" + lines[i] + "'");
        idx.push_back(static_cast<std::size_t>(v));
    }
    try {
        return SubsetState(d, std::move(idx));
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what());
    }
}

void write_subset(std::ostream& out, const SubsetState& s) {
    out << "dim " << s.dimension() << '\n';
    for (auto i : s.indices()) out << i << '\n';
}

}  // namespace sqma::states
