#include "sqma/circuit.hpp"

#include "sqma/errors.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

namespace sqma::exactsim {

Circuit::Circuit(std::size_t witness_qubits, std::size_t ancilla_qubits, std::vector<Gate> gates,
                 std::optional<std::size_t> output)
    : witness_qubits_(witness_qubits), ancilla_qubits_(ancilla_qubits) {
    if (width() > 62) throw std::invalid_argument("circuit width exceeds 62 qubits");
    for (const auto& g : gates) append(g);
    if (output) set_output(*output);
}

void Circuit::check(const Gate& g) const {
    const std::size_t w = width();
    if (g.target >= w) throw std::out_of_range("gate target " + std::to_string(g.target) + " out of range");
    if (g.kind == GateKind::CCX) {
        const auto [c1, c2] = g.controls;
        if (c1 >= w || c2 >= w) throw std::out_of_range("gate control out of range");
        if (c1 == c2 || c1 == g.target || c2 == g.target) {
            throw std::invalid_argument("CCX qubits must be distinct");
        }
    }
}

void Circuit::append(const Gate& g) {
    check(g);
    Gate stored = g;
    if (stored.kind != GateKind::CCX) stored.controls = {};
    gates_.push_back(stored);
}

void Circuit::append(std::span<const Gate> gs) {
    for (const auto& g : gs) append(g);
}

void Circuit::set_output(std::size_t q) {
    if (q >= width()) throw std::out_of_range("output qubit out of range");
    output_ = q;
}

Circuit Circuit::adjoint() const {
    Circuit c = *this;
    std::reverse(c.gates_.begin(), c.gates_.end());
    return c;
}

std::size_t Circuit::hadamard_count() const {
    return static_cast<std::size_t>(
        std::count_if(gates_.begin(), gates_.end(), [](const Gate& g) { return g.kind == GateKind::H; }));
}

void append_controlled_x(Circuit& c, std::span<const std::size_t> controls, std::span<const bool> values,
                         std::size_t target, std::span<const std::size_t> work, std::optional<std::size_t> one) {
    if (controls.size() != values.size()) throw std::invalid_argument("controls and values differ in length");
    const std::size_t n = controls.size();
    if (n == 0) {
        c.append(Gate::x(target));
        return;
    }
    if (n == 1 && !one) throw std::invalid_argument("single-control X needs a |1> helper qubit");
    if (n > 2 && work.size() < n - 2) throw std::invalid_argument("not enough work qubits for controlled X");

    auto flip_zeros = [&] {
        for (std::size_t i = 0; i < n; ++i)
            if (!values[i]) c.append(Gate::x(controls[i]));
    };
    flip_zeros();
    if (n == 1) {
        c.append(Gate::ccx(controls[0], *one, target));
    } else if (n == 2) {
        c.append(Gate::ccx(controls[0], controls[1], target));
    } else {
        // work[i] accumulates controls[0] AND ... AND controls[i + 1]
        std::vector<Gate> ladder;
        ladder.push_back(Gate::ccx(controls[0], controls[1], work[0]));
        for (std::size_t i = 2; i + 1 < n; ++i) ladder.push_back(Gate::ccx(work[i - 2], controls[i], work[i - 1]));
        c.append(ladder);
        c.append(Gate::ccx(work[n - 3], controls[n - 1], target));
        std::reverse(ladder.begin(), ladder.end());
        c.append(ladder);
    }
    flip_zeros();
}

Circuit random_circuit(std::size_t witness_qubits, std::size_t ancilla_qubits, std::size_t gate_count,
                       std::mt19937_64& rng) {
    Circuit c(witness_qubits, ancilla_qubits);
    const std::size_t w = c.width();
    if (w == 0) {
        if (gate_count > 0) throw std::invalid_argument("cannot place gates on a zero-width circuit");
        return c;
    }
    std::uniform_int_distribution<std::size_t> qubit(0, w - 1);
    std::uniform_int_distribution<int> kind(0, w >= 3 ? 2 : 1);
    for (std::size_t i = 0; i < gate_count; ++i) {
        switch (kind(rng)) {
            case 0: c.append(Gate::h(qubit(rng))); break;
            case 1: c.append(Gate::x(qubit(rng))); break;
            default: {
                std::size_t a = qubit(rng), b = qubit(rng), t = qubit(rng);
                while (b == a) b = qubit(rng);
                while (t == a || t == b) t = qubit(rng);
                c.append(Gate::ccx(a, b, t));
            }
        }
    }
    return c;
}

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

namespace {

std::size_t read_index(std::istringstream& ls, const std::string& line) {
    long long v = -1;
    if (!(ls >> v) || v < 0) throw ParseError("expected a nonnegative integer in '" + line + "'");
    return static_cast<std::size_t>(v);
}

void expect_end(std::istringstream& ls, const std::string& line) {
    std::string extra;
    if (ls >> extra) throw ParseError("trailing tokens in '" + line + "'");
}

}  // namespace

Circuit parse_circuit_lines(const std::vector<std::string>& lines, std::span<const std::string> extra_keywords,
                            std::vector<std::string>* extra_lines) {
    if (lines.empty()) throw ParseError("empty circuit description");
    std::size_t m = 0, a = 0;
    {
        std::istringstream hs(lines.front());
        std::string k1, k2;
        hs >> k1;
        if (k1 != "qubits") throw ParseError("first line must be 'qubits <m> ancilla <a>', got '" + lines.front() + "'");
        m = read_index(hs, lines.front());
        hs >> k2;
        if (k2 != "ancilla") throw ParseError("first line must be 'qubits <m> ancilla <a>', got '" + lines.front() + "'");
        a = read_index(hs, lines.front());
        expect_end(hs, lines.front());
    }
    if (m + a > 62) throw ParseError("circuit width exceeds 62 qubits");
    Circuit c(m, a);
    bool seen_output = false;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::string& line = lines[i];
        std::istringstream ls(line);
        std::string word;
        ls >> word;
        try {
            if (word == "H" || word == "X") {
                const std::size_t t = read_index(ls, line);
                expect_end(ls, line);
                c.append(word == "H" ? Gate::h(t) : Gate::x(t));
            } else if (word == "CCX") {
                const std::size_t c1 = read_index(ls, line);
                const std::size_t c2 = read_index(ls, line);
                const std::size_t t = read_index(ls, line);
                expect_end(ls, line);
                c.append(Gate::ccx(c1, c2, t));
            } else if (word == "output") {
                if (seen_output) throw ParseError("duplicate output line");
                const std::size_t q = read_index(ls, line);
                expect_end(ls, line);
                c.set_output(q);
                seen_output = true;
            } else if (extra_lines &&
                       std::find(extra_keywords.begin(), extra_keywords.end(), word) != extra_keywords.end()) {
                extra_lines->push_back(line);
            } else {
                throw ParseError("unknown instruction '" + line + "'");
            }
        } catch (const std::logic_error& e) {
            throw ParseError(std::string(e.what()) + " in '" + line + "'");
        }
    }
    return c;
}

Circuit parse_circuit(std::istream& in) { return parse_circuit_lines(content_lines(in), {}, nullptr); }

Circuit parse_circuit(const std::string& text) {
    std::istringstream in(text);
    return parse_circuit(in);
}

void write_circuit(std::ostream& out, const Circuit& c) {
    out << "qubits " << c.witness_qubits() << " ancilla " << c.ancilla_qubits() << '\n';
    if (c.output()) out << "output " << *c.output() << '\n';
    for (const auto& g : c.gates()) {
        switch (g.kind) {
            case GateKind::H: out << "H " << g.target << '\n'; break;
            case GateKind::X: out << "X " << g.target << '\n'; break;
            case GateKind::CCX:
                out << "CCX " << g.controls[0] << ' ' << g.controls[1] << ' ' << g.target << '\n';
                break;
        }
    }
}

std::string to_text(const Circuit& c) {
    std::ostringstream out;
    write_circuit(out, c);
    return out.str();
}

}  // namespace sqma::exactsim
