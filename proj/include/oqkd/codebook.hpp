#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "oqkd/state_vector.hpp"

namespace oqkd {

// Channel family and its parameters. `p` is the identity probability for the
// one-Pauli channels and the damping probability for PD/AD; `pauli_probs` are
// (p_I, p_Z, p_X, p_ZX) for the full Pauli channel; `theta` empty means the
// rotation angle is drawn fresh each run.
enum class NoiseModeTag { None, CD, CR, PauliZ, PauliX, PauliZX, PauliFull, PD, AD };

enum class Protocol { I = 1, II = 2 };

struct NoiseMode {
  NoiseModeTag tag = NoiseModeTag::None;
  double phi = 0.0;
  std::optional<double> theta;
  double p = 1.0;
  std::array<double, 4> pauli_probs{1.0, 0.0, 0.0, 0.0};

  void validate() const;
};

std::string to_string(NoiseModeTag tag);

// One key symbol: an index into the coding basis. Two bits per symbol in the
// four-state codebooks (order |00>, |11>, |phi>, |phi'> encoding 00, 11, 01,
// 10), one bit in the two-state rotation-hardened codebook.
struct CodingSymbol {
  int index = 0;
  friend bool operator==(const CodingSymbol&, const CodingSymbol&) = default;
};

// ---- Named constants --------------------------------------------------------

namespace states {
const StateVector& zero();        // |0>
const StateVector& one();         // |1>
const StateVector& plus();        // (|0>+|1>)/sqrt2
const StateVector& minus();       // (|0>-|1>)/sqrt2
const StateVector& ket00();       // |00>
const StateVector& ket11();       // |11>
const StateVector& phi();         // (|01>-|10>)/sqrt2
const StateVector& phi_prime();   // (|01>+|10>)/sqrt2
const StateVector& phi_dprime();  // (|00>+|11>)/sqrt2
// Bell basis {(|00>+|11>), (|00>-|11>), (|01>+|10>), (|01>-|10>)}/sqrt2; kept
// for the demonstration that local transformations connect all four.
const std::array<StateVector, 4>& bell();
}  // namespace states

namespace gates {
Eigen::Matrix2cd id();
Eigen::Matrix2cd z();
Eigen::Matrix2cd x();
Eigen::Matrix2cd zx();  // Z*X = [[0,1],[-1,0]]
Eigen::Matrix2cd xz();  // X*Z, inverse of zx
Eigen::Matrix2cd h();
Eigen::Matrix2cd h_prime();          // (1/sqrt2)[[1,1],[i,-i]], column-normalized
Eigen::Matrix2cd cd(double phi);     // diag(1, e^{i phi})
Eigen::Matrix2cd cr(double theta);   // [[cos,sin],[sin,-cos]]
Eigen::Matrix4cd cnot();             // control = first (most significant) qubit
}  // namespace gates

namespace kraus {
KrausSet pd(double p);
KrausSet ad(double p);
KrausSet pauli(const std::array<double, 4>& probs);  // sqrt(p_i) {I,Z,X,ZX}
KrausSet one_pauli(const Eigen::Matrix2cd& op, double p_identity);
}  // namespace kraus

const OrthonormalBasis& basis_computational();  // {|0>,|1>}
const OrthonormalBasis& basis_pm();             // {|+>,|->}
const OrthonormalBasis& basis_s();              // {|00>,|11>,|phi>,|phi'>}
const OrthonormalBasis& basis_s_prime();        // {|phi>,|phi''>} (partial)

// ---- Codebook ---------------------------------------------------------------

// Canonical qubit roles inside one encoded state. The B-side roles travel in
// Protocol I's first transmission, the A-side in the second.
namespace roles {
inline const QubitLabel A = "A";
inline const QubitLabel B = "B";
inline const QubitLabel Ap = "A'";
inline const QubitLabel Bp = "B'";
inline const QubitLabel App = "A''";
inline const QubitLabel Bpp = "B''";
}  // namespace roles

struct Codebook {
  NoiseModeTag mode = NoiseModeTag::None;
  int bits_per_symbol = 2;

  // Measurement basis over the data roles; `coding_full` appends complement
  // outcomes (indices >= coding_valid decode to no symbol) when the coding
  // basis is partial.
  OrthonormalBasis coding_basis = basis_s();
  OrthonormalBasis coding_full = basis_s();
  int coding_valid = 4;

  std::vector<StateVector> symbols;  // encoded templates, one per symbol
  std::vector<QubitLabel> data_roles;
  std::vector<QubitLabel> a_side, b_side;  // stage split of a coding state

  std::optional<StateVector> decoy;  // encoded decoy template
  std::optional<OrthonormalBasis> decoy_basis;
  std::optional<OrthonormalBasis> decoy_full;
  int decoy_valid = 0;
  int decoy_expected = 0;  // outcome index the decoy must produce
  std::vector<QubitLabel> decoy_data_roles;
  std::vector<QubitLabel> decoy_a_side, decoy_b_side;
};

// The auxiliary-assisted encodings are first-protocol constructions; the
// single-stage protocol keeps bare (possibly frame-rotated) states, with the
// full-Pauli block auxiliary attached by the engine per block.
Codebook make_codebook(const NoiseMode& mode, Protocol protocol = Protocol::I);

// Fully encoded multi-qubit state for one symbol, labels = the mode's roles.
StateVector encode_symbol(const Codebook& cb, CodingSymbol sym);

// Inverse of encode_symbol's symbol map; throws std::out_of_range for
// indices outside the coding basis (including completion outcomes).
CodingSymbol decode_outcome(const Codebook& cb, int outcome_index);

// Key bits contributed by one symbol ("00", "11", "01", "10" / "0", "1").
std::string symbol_bits(const Codebook& cb, CodingSymbol sym);

int num_symbols(const Codebook& cb);

}  // namespace oqkd
