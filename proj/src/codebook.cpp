#include "oqkd/codebook.hpp"

#include <cmath>
#include <stdexcept>

namespace oqkd {

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

StateVector two_qubit(Complex a00, Complex a01, Complex a10, Complex a11,
                      std::vector<QubitLabel> labels = {"q0", "q1"}) {
  Eigen::VectorXcd v(4);
  v << a00, a01, a10, a11;
  return StateVector(std::move(v), std::move(labels));
}

StateVector one_qubit(Complex a0, Complex a1, QubitLabel label = "q0") {
  Eigen::VectorXcd v(2);
  v << a0, a1;
  return StateVector(std::move(v), {std::move(label)});
}

StateVector with_labels(const StateVector& s, std::vector<QubitLabel> labels) {
  return StateVector(s.amplitudes(), std::move(labels));
}

// CNOT-builds the dual-rail pair encoding: each data qubit gets a |1>
// partner, then data controls a flip on it (|0> -> |01>, |1> -> |10>).
StateVector dual_rail(const StateVector& data,
                      const std::vector<QubitLabel>& partners) {
  StateVector s = data;
  const Unitary cx(Eigen::MatrixXcd(gates::cnot()));
  const auto data_labels = data.labels();
  for (std::size_t i = 0; i < data_labels.size(); ++i) {
    s = tensor(s, StateVector::ket("1", {partners[i]}));
    s = apply_unitary(s, cx, {data_labels[i], partners[i]});
  }
  // interleave: A A' B B' ...
  std::vector<QubitLabel> order;
  for (std::size_t i = 0; i < data_labels.size(); ++i) {
    order.push_back(data_labels[i]);
    order.push_back(partners[i]);
  }
  return permute_qubits(s, order);
}

StateVector frame_all(const StateVector& s, const Eigen::Matrix2cd& g) {
  const Unitary u{Eigen::MatrixXcd(g)};
  StateVector out = s;
  for (const auto& l : s.labels()) out = apply_unitary(out, u, {l});
  return out;
}

}  // namespace

void NoiseMode::validate() const {
  auto in01 = [](double x) { return x >= 0.0 && x <= 1.0; };
  switch (tag) {
    case NoiseModeTag::PauliZ:
    case NoiseModeTag::PauliX:
    case NoiseModeTag::PauliZX:
    case NoiseModeTag::PD:
    case NoiseModeTag::AD:
      if (!in01(p)) throw std::invalid_argument("noise probability out of range");
      break;
    case NoiseModeTag::PauliFull: {
      double sum = 0.0;
      for (double x : pauli_probs) {
        if (!in01(x)) throw std::invalid_argument("Pauli probability out of range");
        sum += x;
      }
      if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("Pauli probabilities must sum to 1");
      break;
    }
    default:
      break;
  }
}

std::string to_string(NoiseModeTag tag) {
  switch (tag) {
    case NoiseModeTag::None: return "none";
    case NoiseModeTag::CD: return "cd";
    case NoiseModeTag::CR: return "cr";
    case NoiseModeTag::PauliZ: return "pauli-z";
    case NoiseModeTag::PauliX: return "pauli-x";
    case NoiseModeTag::PauliZX: return "pauli-zx";
    case NoiseModeTag::PauliFull: return "pauli-full";
    case NoiseModeTag::PD: return "pd";
    case NoiseModeTag::AD: return "ad";
  }
  return "?";
}

namespace states {

const StateVector& zero() {
  static const StateVector s = one_qubit(1.0, 0.0);
  return s;
}
const StateVector& one() {
  static const StateVector s = one_qubit(0.0, 1.0);
  return s;
}
const StateVector& plus() {
  static const StateVector s = one_qubit(kInvSqrt2, kInvSqrt2);
  return s;
}
const StateVector& minus() {
  static const StateVector s = one_qubit(kInvSqrt2, -kInvSqrt2);
  return s;
}
const StateVector& ket00() {
  static const StateVector s = two_qubit(1, 0, 0, 0);
  return s;
}
const StateVector& ket11() {
  static const StateVector s = two_qubit(0, 0, 0, 1);
  return s;
}
const StateVector& phi() {
  static const StateVector s = two_qubit(0, kInvSqrt2, -kInvSqrt2, 0);
  return s;
}
const StateVector& phi_prime() {
  static const StateVector s = two_qubit(0, kInvSqrt2, kInvSqrt2, 0);
  return s;
}
const StateVector& phi_dprime() {
  static const StateVector s = two_qubit(kInvSqrt2, 0, 0, kInvSqrt2);
  return s;
}
const std::array<StateVector, 4>& bell() {
  static const std::array<StateVector, 4> b = {
      two_qubit(kInvSqrt2, 0, 0, kInvSqrt2),
      two_qubit(kInvSqrt2, 0, 0, -kInvSqrt2),
      two_qubit(0, kInvSqrt2, kInvSqrt2, 0),
      two_qubit(0, kInvSqrt2, -kInvSqrt2, 0),
  };
  return b;
}

}  // namespace states

namespace gates {

Eigen::Matrix2cd id() { return Eigen::Matrix2cd::Identity(); }
Eigen::Matrix2cd z() {
  Eigen::Matrix2cd m;
  m << 1, 0, 0, -1;
  return m;
}
Eigen::Matrix2cd x() {
  Eigen::Matrix2cd m;
  m << 0, 1, 1, 0;
  return m;
}
Eigen::Matrix2cd zx() {
  Eigen::Matrix2cd m;
  m << 0, 1, -1, 0;
  return m;
}
Eigen::Matrix2cd xz() {
  Eigen::Matrix2cd m;
  m << 0, -1, 1, 0;
  return m;
}
Eigen::Matrix2cd h() {
  Eigen::Matrix2cd m;
  m << 1, 1, 1, -1;
  return m * kInvSqrt2;
}
Eigen::Matrix2cd h_prime() {
  Eigen::Matrix2cd m;
  m << Complex(1, 0), Complex(1, 0), Complex(0, 1), Complex(0, -1);
  return m * kInvSqrt2;
}
Eigen::Matrix2cd cd(double phi) {
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
  m(0, 0) = 1.0;
  m(1, 1) = std::exp(Complex(0, phi));
  return m;
}
Eigen::Matrix2cd cr(double theta) {
  Eigen::Matrix2cd m;
  m << std::cos(theta), std::sin(theta), std::sin(theta), -std::cos(theta);
  return m;
}
Eigen::Matrix4cd cnot() {
  Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
  m(0, 0) = 1;
  m(1, 1) = 1;
  m(2, 3) = 1;
  m(3, 2) = 1;
  return m;
}

}  // namespace gates

namespace kraus {

KrausSet pd(double p) {
  if (p < 0 || p > 1) throw std::invalid_argument("pd: p out of range");
  Eigen::Matrix2cd e0 = std::sqrt(1 - p) * Eigen::Matrix2cd::Identity();
  Eigen::Matrix2cd e1 = Eigen::Matrix2cd::Zero(), e2 = Eigen::Matrix2cd::Zero();
  e1(0, 0) = std::sqrt(p);
  e2(1, 1) = std::sqrt(p);
  return KrausSet({e0, e1, e2});
}

KrausSet ad(double p) {
  if (p < 0 || p > 1) throw std::invalid_argument("ad: p out of range");
  Eigen::Matrix2cd e0 = Eigen::Matrix2cd::Zero(), e1 = Eigen::Matrix2cd::Zero();
  e0(0, 0) = 1.0;
  e0(1, 1) = std::sqrt(1 - p);
  e1(0, 1) = std::sqrt(p);
  return KrausSet({e0, e1});
}

KrausSet pauli(const std::array<double, 4>& probs) {
  const std::array<Eigen::Matrix2cd, 4> ops = {gates::id(), gates::z(),
                                               gates::x(), gates::zx()};
  std::vector<Eigen::Matrix2cd> set;
  for (int i = 0; i < 4; ++i) set.push_back(std::sqrt(probs[i]) * ops[i]);
  return KrausSet(std::move(set));
}

KrausSet one_pauli(const Eigen::Matrix2cd& op, double p_identity) {
  return KrausSet({std::sqrt(p_identity) * gates::id(),
                   std::sqrt(1.0 - p_identity) * op});
}

}  // namespace kraus

const OrthonormalBasis& basis_computational() {
  static const OrthonormalBasis b({states::zero(), states::one()}, {"0", "1"});
  return b;
}

const OrthonormalBasis& basis_pm() {
  static const OrthonormalBasis b({states::plus(), states::minus()}, {"+", "-"});
  return b;
}

const OrthonormalBasis& basis_s() {
  static const OrthonormalBasis b(
      {states::ket00(), states::ket11(), states::phi(), states::phi_prime()},
      {"00", "11", "phi", "phi'"});
  return b;
}

const OrthonormalBasis& basis_s_prime() {
  static const OrthonormalBasis b({states::phi(), states::phi_dprime()},
                                  {"phi", "phi''"}, /*partial=*/true);
  return b;
}

Codebook make_codebook(const NoiseMode& mode, Protocol protocol) {
  mode.validate();
  using roles::A;
  using roles::Ap;
  using roles::App;
  using roles::B;
  using roles::Bp;
  using roles::Bpp;

  Codebook cb;
  cb.mode = mode.tag;
  cb.coding_basis = basis_s();
  cb.coding_full = basis_s();
  cb.coding_valid = 4;
  cb.bits_per_symbol = 2;
  cb.data_roles = {A, B};
  cb.a_side = {A};
  cb.b_side = {B};
  cb.decoy_data_roles = {B};
  cb.decoy_a_side = {};
  cb.decoy_b_side = {B};
  cb.decoy_basis = basis_pm();
  cb.decoy_full = basis_pm();
  cb.decoy_valid = 2;
  cb.decoy_expected = 0;

  const std::array<StateVector, 4> base = {
      with_labels(states::ket00(), {A, B}), with_labels(states::ket11(), {A, B}),
      with_labels(states::phi(), {A, B}),
      with_labels(states::phi_prime(), {A, B})};

  switch (mode.tag) {
    case NoiseModeTag::None:
      cb.symbols.assign(base.begin(), base.end());
      cb.decoy = with_labels(states::plus(), {B});
      break;

    case NoiseModeTag::CD:
      cb.symbols.assign(base.begin(), base.end());
      // decoys become |phi>, checked via S
      cb.decoy = with_labels(states::phi(), {A, B});
      cb.decoy_data_roles = {A, B};
      cb.decoy_a_side = {A};
      cb.decoy_b_side = {B};
      cb.decoy_basis = basis_s();
      cb.decoy_full = basis_s();
      cb.decoy_valid = 4;
      cb.decoy_expected = 2;
      break;

    case NoiseModeTag::CR:
      cb.bits_per_symbol = 1;
      cb.coding_basis = basis_s_prime();
      cb.coding_full = basis_s_prime().completed();
      cb.coding_valid = 2;
      cb.symbols = {with_labels(states::phi(), {A, B}),
                    with_labels(states::phi_dprime(), {A, B})};
      cb.decoy = with_labels(states::phi(), {A, B});
      cb.decoy_data_roles = {A, B};
      cb.decoy_a_side = {A};
      cb.decoy_b_side = {B};
      cb.decoy_basis = basis_s_prime();
      cb.decoy_full = basis_s_prime().completed();
      cb.decoy_valid = 2;
      cb.decoy_expected = 0;
      break;

    case NoiseModeTag::PauliZ:
    case NoiseModeTag::PauliX:
    case NoiseModeTag::PauliZX: {
      if (protocol == Protocol::II) {
        // blocks travel whole; only the preparation frame changes
        cb.symbols.assign(base.begin(), base.end());
        cb.decoy = with_labels(states::plus(), {B});
      } else {
        for (const auto& s : base) {
          StateVector enc = tensor(tensor(s, with_labels(states::plus(), {Ap})),
                                   with_labels(states::plus(), {Bp}));
          cb.symbols.push_back(std::move(enc));
        }
        cb.decoy = tensor(with_labels(states::plus(), {B}),
                          with_labels(states::plus(), {Bp}));
        cb.a_side = {A, Ap};
        cb.b_side = {B, Bp};
        cb.decoy_b_side = {B, Bp};
      }
      if (mode.tag == NoiseModeTag::PauliX) {
        for (auto& s : cb.symbols) s = frame_all(s, gates::h());
        cb.decoy = frame_all(*cb.decoy, gates::h());
      } else if (mode.tag == NoiseModeTag::PauliZX) {
        for (auto& s : cb.symbols) s = frame_all(s, gates::h_prime());
        cb.decoy = frame_all(*cb.decoy, gates::h_prime());
      }
      break;
    }

    case NoiseModeTag::PauliFull: {
      if (protocol == Protocol::II) {
        // one |0> auxiliary per block, attached at block assembly
        cb.symbols.assign(base.begin(), base.end());
        cb.decoy = with_labels(states::plus(), {B});
        break;
      }
      for (const auto& s : base) {
        StateVector enc = tensor(tensor(s, with_labels(states::plus(), {Ap})),
                                 with_labels(states::plus(), {Bp}));
        enc = tensor(tensor(enc, StateVector::ket("0", {App})),
                     StateVector::ket("0", {Bpp}));
        cb.symbols.push_back(std::move(enc));
      }
      cb.decoy = tensor(tensor(with_labels(states::plus(), {B}),
                               with_labels(states::plus(), {Bp})),
                        StateVector::ket("0", {Bpp}));
      cb.a_side = {A, Ap, App};
      cb.b_side = {B, Bp, Bpp};
      cb.decoy_b_side = {B, Bp, Bpp};
      break;
    }

    case NoiseModeTag::PD:
    case NoiseModeTag::AD: {
      for (const auto& s : base) cb.symbols.push_back(dual_rail(s, {Ap, Bp}));
      cb.decoy = dual_rail(with_labels(states::plus(), {B}), {Bp});
      cb.a_side = {A, Ap};
      cb.b_side = {B, Bp};
      cb.decoy_b_side = {B, Bp};
      break;
    }
  }
  return cb;
}

StateVector encode_symbol(const Codebook& cb, CodingSymbol sym) {
  if (sym.index < 0 || sym.index >= num_symbols(cb))
    throw std::out_of_range("symbol out of range for mode");
  return cb.symbols[sym.index];
}

CodingSymbol decode_outcome(const Codebook& cb, int outcome_index) {
  if (outcome_index < 0 || outcome_index >= cb.coding_valid)
    throw std::out_of_range("outcome does not index the coding basis");
  return CodingSymbol{outcome_index};
}

std::string symbol_bits(const Codebook& cb, CodingSymbol sym) {
  static const std::array<std::string, 4> two_bit = {"00", "11", "01", "10"};
  if (sym.index < 0 || sym.index >= num_symbols(cb))
    throw std::out_of_range("symbol out of range for mode");
  if (cb.bits_per_symbol == 1) return sym.index == 0 ? "0" : "1";
  return two_bit[sym.index];
}

int num_symbols(const Codebook& cb) {
  return static_cast<int>(cb.symbols.size());
}

}  // namespace oqkd
