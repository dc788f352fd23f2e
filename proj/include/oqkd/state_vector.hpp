#pragma once

#include <complex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "oqkd/rng.hpp"

namespace oqkd {

using Complex = std::complex<double>;
using QubitLabel = std::string;

// 1e-12 bounds the norm after any single public operation; 1e-10 is the
// tolerance for algebraic identities (unitarity, basis completeness, ...).
inline constexpr double kNormTol = 1e-12;
inline constexpr double kAlgebraTol = 1e-10;

// Normalized amplitude vector over a small register of labeled qubits.
//
// Index convention (fixed, big endian): labels()[0] owns the MOST significant
// bit of an amplitude index. For labels [A, B] the amplitude order is
// |00>, |01>, |10>, |11> with the left bit belonging to A, so bit k of an
// index (counting from the least significant bit) addresses
// labels()[n - 1 - k]. All relabeling arithmetic in the test suite assumes
// exactly this convention.
//
// Values are immutable after construction; every operation returns a new
// state. Global phase is never normalized away.
class StateVector {
 public:
  StateVector(Eigen::VectorXcd amplitudes, std::vector<QubitLabel> labels);

  // Computational basis ket, e.g. ket("01", {"A","B"}) = |01>.
  static StateVector ket(std::string_view bits, std::vector<QubitLabel> labels);

  int num_qubits() const { return static_cast<int>(labels_.size()); }
  Eigen::Index dim() const { return amps_.size(); }
  const Eigen::VectorXcd& amplitudes() const { return amps_; }
  const std::vector<QubitLabel>& labels() const { return labels_; }
  Complex amplitude(Eigen::Index i) const { return amps_(i); }

  bool has_label(const QubitLabel& l) const;
  int label_position(const QubitLabel& l) const;  // throws on unknown label

 private:
  Eigen::VectorXcd amps_;
  std::vector<QubitLabel> labels_;
};

// k-qubit gate; construction checks U·U† = I within kAlgebraTol.
class Unitary {
 public:
  explicit Unitary(Eigen::MatrixXcd m);
  int arity() const { return arity_; }
  const Eigen::MatrixXcd& matrix() const { return m_; }

 private:
  Eigen::MatrixXcd m_;
  int arity_;
};

// Orthonormal set of m-qubit vectors. A full basis spans the whole 2^m
// space; a partial one may be measured only against states the residual
// projector annihilates. Basis vectors align with measurement targets
// positionally: basis qubit j acts on targets[j].
class OrthonormalBasis {
 public:
  OrthonormalBasis(std::vector<StateVector> vectors,
                   std::vector<std::string> names, bool partial = false);

  int size() const { return static_cast<int>(vectors_.size()); }
  int num_qubits() const { return vectors_.front().num_qubits(); }
  const StateVector& vector(int i) const { return vectors_.at(i); }
  const std::string& name(int i) const { return names_.at(i); }
  const std::vector<std::string>& names() const { return names_; }
  bool partial() const { return partial_; }

  // Full basis containing this one as a prefix; appended complement vectors
  // are named "<prefix>0", "<prefix>1", ... Returns *this when already full.
  OrthonormalBasis completed(const std::string& prefix = "invalid") const;

 private:
  std::vector<StateVector> vectors_;
  std::vector<std::string> names_;
  bool partial_;
};

// Trace-preserving set of single-qubit Kraus operators (sum E†E = I within
// kAlgebraTol, checked at construction).
class KrausSet {
 public:
  explicit KrausSet(std::vector<Eigen::Matrix2cd> ops);
  int size() const { return static_cast<int>(ops_.size()); }
  const Eigen::Matrix2cd& op(int i) const { return ops_.at(i); }

 private:
  std::vector<Eigen::Matrix2cd> ops_;
};

// ---- Operations (all return fresh values) ----------------------------------

// Kronecker product; u's labels stay most significant.
StateVector tensor(const StateVector& u, const StateVector& v);

// u on the target qubits, identity elsewhere.
StateVector apply_unitary(const StateVector& s, const Unitary& u,
                          const std::vector<QubitLabel>& targets);

// Reindex amplitudes so the label order becomes `order` (a permutation of the
// existing labels); physical content is unchanged.
StateVector permute_qubits(const StateVector& s,
                           const std::vector<QubitLabel>& order);

// Rename one qubit without touching amplitudes.
StateVector relabel(const StateVector& s, const QubitLabel& from,
                    const QubitLabel& to);

// <u|v>; label sets must agree, v is aligned to u's order first.
Complex overlap(const StateVector& u, const StateVector& v);

bool equal_up_to_global_phase(const StateVector& u, const StateVector& v,
                              double tol = kAlgebraTol);

// Exact Born probabilities of measuring `targets` in `basis`; entry i is the
// squared norm of the projection onto basis vector i (tensored with identity
// on the remaining qubits). This is the oracle every Monte Carlo estimate in
// the repo is validated against. Throws if a partial basis fails to resolve
// the state.
Eigen::VectorXd outcome_distribution(const StateVector& s,
                                     const OrthonormalBasis& basis,
                                     const std::vector<QubitLabel>& targets);

// Samples an outcome from outcome_distribution and collapses.
std::pair<int, StateVector> measure(const StateVector& s,
                                    const OrthonormalBasis& basis,
                                    const std::vector<QubitLabel>& targets,
                                    Rng& rng);

// Coherent copy in `basis`: component along |b_i> is mapped to |b_i>|i> with
// the index written on a fresh ancilla register (appended after the existing
// labels, i.e. least significant). The register has ceil(log2(#vectors))
// qubits, at least one.
StateVector purify_isometry(const StateVector& s, const OrthonormalBasis& basis,
                            const std::vector<QubitLabel>& targets,
                            const std::vector<QubitLabel>& ancilla_labels);

// Trajectory sampling of a Kraus channel. With `correlated` set, ONE index is
// drawn per group — with probability proportional to the squared norm of the
// candidate trajectory — and the same operator is applied to every qubit in
// the group (the "same effects" channel model; the bare per-group map need
// not be trace preserving, so candidate weights are renormalized). Otherwise
// indices are drawn independently per qubit. Returns one chosen index per
// group (or per qubit, flattened in group order).
std::pair<std::vector<int>, StateVector> apply_kraus(
    const StateVector& s, const KrausSet& kraus,
    const std::vector<std::vector<QubitLabel>>& groups, bool correlated,
    Rng& rng);

}  // namespace oqkd
