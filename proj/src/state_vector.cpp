#include "oqkd/state_vector.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace oqkd {

namespace {

void check_unique_labels(const std::vector<QubitLabel>& labels) {
  std::set<QubitLabel> seen;
  for (const auto& l : labels) {
    if (l.empty()) throw std::invalid_argument("empty qubit label");
    if (!seen.insert(l).second)
      throw std::invalid_argument("label collision: " + l);
  }
}

bool is_power_of_two(Eigen::Index x) { return x > 0 && (x & (x - 1)) == 0; }

int log2_exact(Eigen::Index x) {
  int k = 0;
  while ((Eigen::Index{1} << k) < x) ++k;
  return k;
}

// Bit shift of labels[pos] inside an amplitude index (big endian).
inline int shift_of(int num_qubits, int pos) { return num_qubits - 1 - pos; }

std::vector<int> target_positions(const StateVector& s,
                                  const std::vector<QubitLabel>& targets) {
  std::vector<int> pos;
  pos.reserve(targets.size());
  std::set<QubitLabel> seen;
  for (const auto& t : targets) {
    if (!seen.insert(t).second)
      throw std::invalid_argument("duplicate target label: " + t);
    pos.push_back(s.label_position(t));
  }
  return pos;
}

// Decomposition of |s> against (basis ⊗ identity-on-rest): for each basis
// vector b, coeffs[b][r] = <b, r|s> over the packed rest-space index r.
struct ProjectionDecomp {
  std::vector<Eigen::VectorXcd> coeffs;
  Eigen::VectorXd probs;
  double total = 0.0;
  std::vector<int> tshift;  // index shift per target qubit (MSB first)
  std::vector<int> rshift;  // index shift per rest qubit (MSB first)
};

ProjectionDecomp decompose(const StateVector& s, const OrthonormalBasis& basis,
                           const std::vector<QubitLabel>& targets) {
  const int n = s.num_qubits();
  const int k = static_cast<int>(targets.size());
  if (basis.num_qubits() != k)
    throw std::invalid_argument("basis arity does not match target count");
  const auto pos = target_positions(s, targets);

  ProjectionDecomp d;
  d.tshift.reserve(k);
  for (int p : pos) d.tshift.push_back(shift_of(n, p));
  std::vector<bool> is_target(n, false);
  for (int p : pos) is_target[p] = true;
  for (int p = 0; p < n; ++p)
    if (!is_target[p]) d.rshift.push_back(shift_of(n, p));

  const Eigen::Index rest_dim = Eigen::Index{1} << d.rshift.size();
  const int nb = basis.size();
  d.coeffs.assign(nb, Eigen::VectorXcd::Zero(rest_dim));
  for (Eigen::Index idx = 0; idx < s.dim(); ++idx) {
    const Complex a = s.amplitude(idx);
    if (a == Complex{0.0, 0.0}) continue;
    Eigen::Index t = 0;
    for (int j = 0; j < k; ++j) t = (t << 1) | ((idx >> d.tshift[j]) & 1);
    Eigen::Index r = 0;
    for (int sh : d.rshift) r = (r << 1) | ((idx >> sh) & 1);
    for (int b = 0; b < nb; ++b) {
      const Complex bt = basis.vector(b).amplitude(t);
      if (bt != Complex{0.0, 0.0}) d.coeffs[b](r) += std::conj(bt) * a;
    }
  }
  d.probs.resize(nb);
  for (int b = 0; b < nb; ++b) {
    d.probs(b) = d.coeffs[b].squaredNorm();
    d.total += d.probs(b);
  }
  return d;
}

// Rebuild the (normalized) post-measurement state for outcome b.
StateVector reconstruct(const StateVector& s, const OrthonormalBasis& basis,
                        const ProjectionDecomp& d, int b) {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(s.dim());
  const double norm = std::sqrt(d.probs(b));
  const auto& bv = basis.vector(b);
  const Eigen::Index tdim = bv.dim();
  const Eigen::Index rdim = d.coeffs[b].size();
  for (Eigen::Index t = 0; t < tdim; ++t) {
    const Complex bt = bv.amplitude(t);
    if (bt == Complex{0.0, 0.0}) continue;
    for (Eigen::Index r = 0; r < rdim; ++r) {
      const Complex c = d.coeffs[b](r);
      if (c == Complex{0.0, 0.0}) continue;
      Eigen::Index idx = 0;
      for (std::size_t j = 0; j < d.tshift.size(); ++j)
        idx |= ((t >> (d.tshift.size() - 1 - j)) & 1) << d.tshift[j];
      for (std::size_t j = 0; j < d.rshift.size(); ++j)
        idx |= ((r >> (d.rshift.size() - 1 - j)) & 1) << d.rshift[j];
      out(idx) = bt * c / norm;
    }
  }
  return StateVector(std::move(out), s.labels());
}

Eigen::VectorXcd apply_matrix_raw(const Eigen::VectorXcd& amps, int n,
                                  const Eigen::MatrixXcd& m,
                                  const std::vector<int>& pos) {
  const int k = static_cast<int>(pos.size());
  const Eigen::Index sub_dim = Eigen::Index{1} << k;
  std::vector<int> sh(k);
  Eigen::Index mask = 0;
  for (int j = 0; j < k; ++j) {
    sh[j] = shift_of(n, pos[j]);
    mask |= Eigen::Index{1} << sh[j];
  }
  // offset[i] scatters sub-index i (big endian over targets) into the full index
  std::vector<Eigen::Index> offset(sub_dim, 0);
  for (Eigen::Index i = 0; i < sub_dim; ++i)
    for (int j = 0; j < k; ++j)
      offset[i] |= ((i >> (k - 1 - j)) & 1) == 1 ? (Eigen::Index{1} << sh[j]) : 0;

  Eigen::VectorXcd out(amps.size());
  Eigen::VectorXcd sub(sub_dim);
  for (Eigen::Index base = 0; base < amps.size(); ++base) {
    if ((base & mask) != 0) continue;
    for (Eigen::Index i = 0; i < sub_dim; ++i) sub(i) = amps(base | offset[i]);
    Eigen::VectorXcd res = m * sub;
    for (Eigen::Index i = 0; i < sub_dim; ++i) out(base | offset[i]) = res(i);
  }
  return out;
}

}  // namespace

StateVector::StateVector(Eigen::VectorXcd amplitudes,
                         std::vector<QubitLabel> labels)
    : amps_(std::move(amplitudes)), labels_(std::move(labels)) {
  check_unique_labels(labels_);
  if (labels_.empty()) throw std::invalid_argument("state needs at least one qubit");
  if (!is_power_of_two(amps_.size()) ||
      amps_.size() != (Eigen::Index{1} << labels_.size()))
    throw std::invalid_argument("amplitude count does not match label count");
  const double n2 = amps_.squaredNorm();
  if (std::abs(n2 - 1.0) > 1e-6)
    throw std::invalid_argument("state vector is not normalized");
  // renormalize only on real drift so pure reindexing stays bit-exact
  if (std::abs(n2 - 1.0) > kNormTol) amps_ /= std::sqrt(n2);
}

StateVector StateVector::ket(std::string_view bits,
                             std::vector<QubitLabel> labels) {
  if (bits.size() != labels.size())
    throw std::invalid_argument("bit string length does not match labels");
  Eigen::Index idx = 0;
  for (char c : bits) {
    if (c != '0' && c != '1') throw std::invalid_argument("ket wants a 0/1 string");
    idx = (idx << 1) | (c == '1' ? 1 : 0);
  }
  Eigen::VectorXcd a = Eigen::VectorXcd::Zero(Eigen::Index{1} << bits.size());
  a(idx) = 1.0;
  return StateVector(std::move(a), std::move(labels));
}

bool StateVector::has_label(const QubitLabel& l) const {
  return std::find(labels_.begin(), labels_.end(), l) != labels_.end();
}

int StateVector::label_position(const QubitLabel& l) const {
  auto it = std::find(labels_.begin(), labels_.end(), l);
  if (it == labels_.end()) throw std::invalid_argument("unknown label: " + l);
  return static_cast<int>(it - labels_.begin());
}

Unitary::Unitary(Eigen::MatrixXcd m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || !is_power_of_two(m_.rows()))
    throw std::invalid_argument("unitary must be square with power-of-two size");
  arity_ = log2_exact(m_.rows());
  Eigen::MatrixXcd err = m_ * m_.adjoint() - Eigen::MatrixXcd::Identity(m_.rows(), m_.cols());
  if (err.cwiseAbs().maxCoeff() > kAlgebraTol)
    throw std::invalid_argument("matrix is not unitary");
}

OrthonormalBasis::OrthonormalBasis(std::vector<StateVector> vectors,
                                   std::vector<std::string> names,
                                   bool partial)
    : vectors_(std::move(vectors)), names_(std::move(names)), partial_(partial) {
  if (vectors_.empty()) throw std::invalid_argument("empty basis");
  if (names_.size() != vectors_.size())
    throw std::invalid_argument("basis needs one name per vector");
  const int m = vectors_.front().num_qubits();
  for (const auto& v : vectors_)
    if (v.num_qubits() != m)
      throw std::invalid_argument("basis vectors span different registers");
  for (std::size_t i = 0; i < vectors_.size(); ++i)
    for (std::size_t j = i + 1; j < vectors_.size(); ++j)
      if (std::abs(vectors_[i].amplitudes().dot(vectors_[j].amplitudes())) > 1e-12)
        throw std::invalid_argument("basis vectors are not orthogonal");
  const Eigen::Index full = Eigen::Index{1} << m;
  if (!partial_ && static_cast<Eigen::Index>(vectors_.size()) != full)
    throw std::invalid_argument("basis does not span the space (mark it partial)");
  if (static_cast<Eigen::Index>(vectors_.size()) > full)
    throw std::invalid_argument("too many basis vectors");
}

OrthonormalBasis OrthonormalBasis::completed(const std::string& prefix) const {
  const int m = num_qubits();
  const Eigen::Index full = Eigen::Index{1} << m;
  if (static_cast<Eigen::Index>(vectors_.size()) == full) return *this;

  Eigen::MatrixXcd b(full, vectors_.size());
  for (std::size_t i = 0; i < vectors_.size(); ++i)
    b.col(i) = vectors_[i].amplitudes();
  // Columns of U beyond the basis rank span the orthogonal complement.
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(b, Eigen::ComputeFullU);
  auto vectors = vectors_;
  auto names = names_;
  const auto& labels = vectors_.front().labels();
  int added = 0;
  for (Eigen::Index c = static_cast<Eigen::Index>(vectors_.size()); c < full; ++c) {
    vectors.emplace_back(svd.matrixU().col(c), labels);
    names.push_back(prefix + std::to_string(added++));
  }
  return OrthonormalBasis(std::move(vectors), std::move(names), false);
}

KrausSet::KrausSet(std::vector<Eigen::Matrix2cd> ops) : ops_(std::move(ops)) {
  if (ops_.empty()) throw std::invalid_argument("empty Kraus set");
  Eigen::Matrix2cd sum = Eigen::Matrix2cd::Zero();
  for (const auto& e : ops_) sum += e.adjoint() * e;
  if ((sum - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() > kAlgebraTol)
    throw std::invalid_argument("Kraus set is not trace preserving");
}

StateVector tensor(const StateVector& u, const StateVector& v) {
  for (const auto& l : v.labels())
    if (u.has_label(l)) throw std::invalid_argument("label collision: " + l);
  std::vector<QubitLabel> labels = u.labels();
  labels.insert(labels.end(), v.labels().begin(), v.labels().end());
  Eigen::VectorXcd out(u.dim() * v.dim());
  for (Eigen::Index i = 0; i < u.dim(); ++i)
    out.segment(i * v.dim(), v.dim()) = u.amplitude(i) * v.amplitudes();
  return StateVector(std::move(out), std::move(labels));
}

StateVector apply_unitary(const StateVector& s, const Unitary& u,
                          const std::vector<QubitLabel>& targets) {
  if (static_cast<int>(targets.size()) != u.arity())
    throw std::invalid_argument("target count does not match unitary arity");
  const auto pos = target_positions(s, targets);
  return StateVector(apply_matrix_raw(s.amplitudes(), s.num_qubits(), u.matrix(), pos),
                     s.labels());
}

StateVector permute_qubits(const StateVector& s,
                           const std::vector<QubitLabel>& order) {
  const int n = s.num_qubits();
  if (static_cast<int>(order.size()) != n)
    throw std::invalid_argument("permutation must mention every label once");
  const auto pos = target_positions(s, order);  // also rejects duplicates
  // order[j] moves from its old shift to shift n-1-j.
  std::vector<int> from(n), to(n);
  for (int j = 0; j < n; ++j) {
    from[j] = shift_of(n, pos[j]);
    to[j] = shift_of(n, j);
  }
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(s.dim());
  for (Eigen::Index idx = 0; idx < s.dim(); ++idx) {
    Eigen::Index nidx = 0;
    for (int j = 0; j < n; ++j) nidx |= ((idx >> from[j]) & 1) << to[j];
    out(nidx) = s.amplitude(idx);
  }
  return StateVector(std::move(out), order);
}

StateVector relabel(const StateVector& s, const QubitLabel& from,
                    const QubitLabel& to) {
  if (from != to && s.has_label(to))
    throw std::invalid_argument("label collision: " + to);
  auto labels = s.labels();
  labels[s.label_position(from)] = to;
  return StateVector(s.amplitudes(), std::move(labels));
}

Complex overlap(const StateVector& u, const StateVector& v) {
  const StateVector* rhs = &v;
  StateVector aligned = v;
  if (u.labels() != v.labels()) {
    aligned = permute_qubits(v, u.labels());  // throws if label sets differ
    rhs = &aligned;
  }
  return u.amplitudes().dot(rhs->amplitudes());
}

bool equal_up_to_global_phase(const StateVector& u, const StateVector& v,
                              double tol) {
  return std::abs(std::abs(overlap(u, v)) - 1.0) <= tol;
}

Eigen::VectorXd outcome_distribution(const StateVector& s,
                                     const OrthonormalBasis& basis,
                                     const std::vector<QubitLabel>& targets) {
  auto d = decompose(s, basis, targets);
  if (std::abs(d.total - 1.0) > 1e-9)
    throw std::invalid_argument(
        "partial basis does not resolve the state (residual weight " +
        std::to_string(1.0 - d.total) + ")");
  return d.probs;
}

std::pair<int, StateVector> measure(const StateVector& s,
                                    const OrthonormalBasis& basis,
                                    const std::vector<QubitLabel>& targets,
                                    Rng& rng) {
  auto d = decompose(s, basis, targets);
  if (std::abs(d.total - 1.0) > 1e-9)
    throw std::invalid_argument("partial basis does not resolve the state");
  const double u = rng.uniform() * d.total;
  double acc = 0.0;
  int chosen = -1;
  for (int b = 0; b < basis.size(); ++b) {
    if (d.probs(b) <= 0.0) continue;
    acc += d.probs(b);
    if (u < acc) {
      chosen = b;
      break;
    }
  }
  if (chosen < 0) {  // fp edge: pick the heaviest bin
    d.probs.maxCoeff(&chosen);
  }
  return {chosen, reconstruct(s, basis, d, chosen)};
}

StateVector purify_isometry(const StateVector& s, const OrthonormalBasis& basis,
                            const std::vector<QubitLabel>& targets,
                            const std::vector<QubitLabel>& ancilla_labels) {
  int anc = 1;
  while ((1 << anc) < basis.size()) ++anc;
  if (static_cast<int>(ancilla_labels.size()) != anc)
    throw std::invalid_argument("ancilla register must have " +
                                std::to_string(anc) + " qubit(s)");
  for (const auto& l : ancilla_labels)
    if (s.has_label(l)) throw std::invalid_argument("label collision: " + l);

  auto d = decompose(s, basis, targets);
  if (std::abs(d.total - 1.0) > 1e-9)
    throw std::invalid_argument("basis does not resolve the state; purification would lose norm");

  std::vector<QubitLabel> labels = s.labels();
  labels.insert(labels.end(), ancilla_labels.begin(), ancilla_labels.end());
  const Eigen::Index anc_dim = Eigen::Index{1} << anc;
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(s.dim() * anc_dim);
  for (int b = 0; b < basis.size(); ++b) {
    if (d.probs(b) <= 0.0) continue;
    const auto& bv = basis.vector(b);
    for (Eigen::Index t = 0; t < bv.dim(); ++t) {
      const Complex bt = bv.amplitude(t);
      if (bt == Complex{0.0, 0.0}) continue;
      for (Eigen::Index r = 0; r < d.coeffs[b].size(); ++r) {
        const Complex c = d.coeffs[b](r);
        if (c == Complex{0.0, 0.0}) continue;
        Eigen::Index idx = 0;
        for (std::size_t j = 0; j < d.tshift.size(); ++j)
          idx |= ((t >> (d.tshift.size() - 1 - j)) & 1) << d.tshift[j];
        for (std::size_t j = 0; j < d.rshift.size(); ++j)
          idx |= ((r >> (d.rshift.size() - 1 - j)) & 1) << d.rshift[j];
        out(idx * anc_dim + b) = bt * c;
      }
    }
  }
  return StateVector(std::move(out), std::move(labels));
}

std::pair<std::vector<int>, StateVector> apply_kraus(
    const StateVector& s, const KrausSet& kraus,
    const std::vector<std::vector<QubitLabel>>& groups, bool correlated,
    Rng& rng) {
  std::vector<int> chosen;
  Eigen::VectorXcd amps = s.amplitudes();
  const int n = s.num_qubits();
  for (const auto& group : groups) {
    if (group.empty()) throw std::invalid_argument("empty Kraus group");
    std::vector<int> pos;
    pos.reserve(group.size());
    for (const auto& l : group) pos.push_back(s.label_position(l));
    if (correlated) {
      std::vector<Eigen::VectorXcd> candidates(kraus.size());
      std::vector<double> weights(kraus.size());
      for (int i = 0; i < kraus.size(); ++i) {
        Eigen::VectorXcd c = amps;
        for (int p : pos) c = apply_matrix_raw(c, n, kraus.op(i), {p});
        weights[i] = c.squaredNorm();
        candidates[i] = std::move(c);
      }
      const int i = static_cast<int>(rng.weighted(weights));
      amps = candidates[i] / std::sqrt(weights[i]);
      chosen.push_back(i);
    } else {
      for (int p : pos) {
        std::vector<Eigen::VectorXcd> candidates(kraus.size());
        std::vector<double> weights(kraus.size());
        for (int i = 0; i < kraus.size(); ++i) {
          candidates[i] = apply_matrix_raw(amps, n, kraus.op(i), {p});
          weights[i] = candidates[i].squaredNorm();
        }
        const int i = static_cast<int>(rng.weighted(weights));
        amps = candidates[i] / std::sqrt(weights[i]);
        chosen.push_back(i);
      }
    }
  }
  return {std::move(chosen), StateVector(std::move(amps), s.labels())};
}

}  // namespace oqkd
