// Circuits over {H, X, CCX} with a witness register followed by ancillas.
//
// Layout: qubit 0 is the most significant bit of a basis index. Witness qubits
// occupy 0..m-1 and ancillas m..m+a-1, so |i>|0^a> has index i << a.
#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace sqma::exactsim {

inline constexpr std::size_t kDefaultWidthCap = 20;

enum class GateKind { H, X, CCX };

struct Gate {
    GateKind kind = GateKind::X;
    std::size_t target = 0;
    std::array<std::size_t, 2> controls{};  // used by CCX only

    static Gate h(std::size_t t) { return {GateKind::H, t, {}}; }
    static Gate x(std::size_t t) { return {GateKind::X, t, {}}; }
    static Gate ccx(std::size_t c1, std::size_t c2, std::size_t t) { return {GateKind::CCX, t, {c1, c2}}; }

    friend bool operator==(const Gate&, const Gate&) = default;
};

/// Bit position of qubit q inside a basis index of the given width.
inline std::size_t bit_of(std::size_t q, std::size_t width) { return width - 1 - q; }

class Circuit {
public:
    Circuit(std::size_t witness_qubits, std::size_t ancilla_qubits, std::vector<Gate> gates = {},
            std::optional<std::size_t> output = std::nullopt);

    std::size_t witness_qubits() const { return witness_qubits_; }
    std::size_t ancilla_qubits() const { return ancilla_qubits_; }
    std::size_t width() const { return witness_qubits_ + ancilla_qubits_; }
    const std::vector<Gate>& gates() const { return gates_; }
    const std::optional<std::size_t>& output() const { return output_; }

    /// Throws std::out_of_range / std::invalid_argument on bad qubit indices.
    void append(const Gate& g);
    void append(std::span<const Gate> gs);
    void set_output(std::size_t q);

    /// Every gate is self-inverse, so the adjoint is the reversed gate list.
    Circuit adjoint() const;
    std::size_t hadamard_count() const;

    friend bool operator==(const Circuit&, const Circuit&) = default;

private:
    void check(const Gate& g) const;

    std::size_t witness_qubits_;
    std::size_t ancilla_qubits_;
    std::vector<Gate> gates_;
    std::optional<std::size_t> output_;
};

/// Appends gates that flip `target` iff each control qubit equals its wanted
/// value. With more than two controls, `work` must provide controls.size() - 2
/// clean qubits (restored afterwards); with exactly one control `one` must be
/// a qubit currently holding |1>.
void append_controlled_x(Circuit& c, std::span<const std::size_t> controls, std::span<const bool> values,
                         std::size_t target, std::span<const std::size_t> work,
                         std::optional<std::size_t> one = std::nullopt);

/// Uniformly random gate kinds (CCX only when width >= 3) on random qubits.
Circuit random_circuit(std::size_t witness_qubits, std::size_t ancilla_qubits, std::size_t gate_count,
                       std::mt19937_64& rng);

// Text format:
//   qubits <m> ancilla <a>
//   output <q>                  (optional)
//   H <q> | X <q> | CCX <c1> <c2> <t>
// '#' starts a comment, blank lines are ignored.
Circuit parse_circuit(std::istream& in);
Circuit parse_circuit(const std::string& text);
void write_circuit(std::ostream& out, const Circuit& c);
std::string to_text(const Circuit& c);

/// Splits a document into comment-stripped, non-blank lines.
std::vector<std::string> content_lines(std::istream& in);
/// Parses circuit lines; lines whose first word is in `extra_keywords` are
/// returned to the caller untouched instead of being rejected.
Circuit parse_circuit_lines(const std::vector<std::string>& lines, std::span<const std::string> extra_keywords,
                            std::vector<std::string>* extra_lines);

}  // namespace sqma::exactsim
