#include "oqkd/noise.hpp"

#include <cmath>
#include <stdexcept>

namespace oqkd {

namespace {

constexpr double kTwoPi = 6.283185307179586476925287;

StateVector apply_to_each(const StateVector& s, const Eigen::Matrix2cd& g,
                          const std::vector<std::vector<QubitLabel>>& groups) {
  const Unitary u{Eigen::MatrixXcd(g)};
  StateVector out = s;
  for (const auto& group : groups)
    for (const auto& l : group) out = apply_unitary(out, u, {l});
  return out;
}

}  // namespace

RunChannel begin_cycle(const ChannelModel& ch, Rng& rng) {
  ch.mode.validate();
  RunChannel rc;
  rc.tag = ch.mode.tag;
  rc.correlated = ch.correlated;
  switch (ch.mode.tag) {
    case NoiseModeTag::None:
      break;
    case NoiseModeTag::CD:
      rc.phi = ch.mode.phi;
      break;
    case NoiseModeTag::CR:
      rc.theta = ch.mode.theta ? *ch.mode.theta : rng.uniform(0.0, kTwoPi);
      break;
    case NoiseModeTag::PauliZ:
      rc.kraus = kraus::one_pauli(gates::z(), ch.mode.p);
      break;
    case NoiseModeTag::PauliX:
      rc.kraus = kraus::one_pauli(gates::x(), ch.mode.p);
      break;
    case NoiseModeTag::PauliZX:
      rc.kraus = kraus::one_pauli(gates::zx(), ch.mode.p);
      break;
    case NoiseModeTag::PauliFull:
      rc.kraus = kraus::pauli(ch.mode.pauli_probs);
      break;
    case NoiseModeTag::PD:
      rc.kraus = kraus::pd(ch.mode.p);
      break;
    case NoiseModeTag::AD:
      rc.kraus = kraus::ad(ch.mode.p);
      break;
  }
  return rc;
}

StateVector apply_channel(const RunChannel& ch, const StateVector& s,
                          const std::vector<std::vector<QubitLabel>>& groups,
                          Rng& rng) {
  for (const auto& g : groups)
    if (g.empty()) throw std::invalid_argument("empty transmission group");
  switch (ch.tag) {
    case NoiseModeTag::None:
      return s;
    case NoiseModeTag::CD:
      return apply_to_each(s, gates::cd(ch.phi), groups);
    case NoiseModeTag::CR:
      return apply_to_each(s, gates::cr(ch.theta), groups);
    default:
      return apply_kraus(s, *ch.kraus, groups, ch.correlated, rng).second;
  }
}

std::vector<std::vector<QubitLabel>> same_effect_groups(
    NoiseModeTag tag, const std::vector<QubitLabel>& transit_labels) {
  std::vector<std::vector<QubitLabel>> groups;
  if (transit_labels.empty()) return groups;
  if (tag == NoiseModeTag::PD || tag == NoiseModeTag::AD) {
    // dual-rail pairs travel (and decohere) as units
    if (transit_labels.size() % 2 != 0)
      throw std::invalid_argument("dual-rail transmission needs label pairs");
    for (std::size_t i = 0; i < transit_labels.size(); i += 2)
      groups.push_back({transit_labels[i], transit_labels[i + 1]});
    return groups;
  }
  groups.push_back(transit_labels);
  return groups;
}

CorrectionOutcome bob_correct(const CorrectionRule& rule, const StateVector& s,
                              const std::vector<CorrectionUnit>& units,
                              Rng& rng) {
  StateVector st = s;
  std::vector<std::size_t> discarded;
  if (rule.frame_undo) {
    const Unitary u{Eigen::MatrixXcd(*rule.frame_undo)};
    for (const auto& unit : units) {
      for (const auto& l : unit.data) st = apply_unitary(st, u, {l});
      if (unit.aux_pm) st = apply_unitary(st, u, {*unit.aux_pm});
      if (unit.aux_comp) st = apply_unitary(st, u, {*unit.aux_comp});
    }
  }

  const Unitary cx{Eigen::MatrixXcd(gates::cnot())};
  const Unitary uz{Eigen::MatrixXcd(gates::z())};
  const Unitary ux{Eigen::MatrixXcd(gates::x())};
  const Unitary uxz{Eigen::MatrixXcd(gates::xz())};

  for (std::size_t ui = 0; ui < units.size(); ++ui) {
    const auto& unit = units[ui];
    if (unit.rail) {
      if (unit.data.size() != 1)
        throw std::invalid_argument("dual-rail unit wants exactly one data qubit");
      if (!st.has_label(*unit.rail))
        throw std::invalid_argument("missing auxiliary label: " + *unit.rail);
      st = apply_unitary(st, cx, {unit.data[0], *unit.rail});
      auto [out, post] = measure(st, basis_computational(), {*unit.rail}, rng);
      st = std::move(post);
      if (out == 0) discarded.push_back(ui);  // pattern destroyed
      continue;
    }
    int z_flag = 0, x_flag = 0;
    if (unit.aux_pm) {
      if (!st.has_label(*unit.aux_pm))
        throw std::invalid_argument("missing auxiliary label: " + *unit.aux_pm);
      auto [out, post] = measure(st, basis_pm(), {*unit.aux_pm}, rng);
      z_flag = out;
      st = std::move(post);
    }
    if (unit.aux_comp) {
      if (!st.has_label(*unit.aux_comp))
        throw std::invalid_argument("missing auxiliary label: " + *unit.aux_comp);
      auto [out, post] = measure(st, basis_computational(), {*unit.aux_comp}, rng);
      x_flag = out;
      st = std::move(post);
    }
    const Unitary* corr = nullptr;
    if (z_flag && x_flag)
      corr = &uxz;
    else if (z_flag)
      corr = &uz;
    else if (x_flag)
      corr = &ux;
    if (corr)
      for (const auto& d : unit.data) st = apply_unitary(st, *corr, {d});
  }
  return {std::move(st), std::move(discarded)};
}

std::vector<CorrectionUnit> correction_units(const Codebook& cb, bool decoy,
                                             const std::string& prefix) {
  using roles::A;
  using roles::Ap;
  using roles::App;
  using roles::B;
  using roles::Bp;
  using roles::Bpp;
  const auto p = [&](const QubitLabel& l) { return prefix + l; };
  const auto& a_side = decoy ? cb.decoy_a_side : cb.a_side;

  std::vector<CorrectionUnit> units;
  switch (cb.mode) {
    case NoiseModeTag::None:
    case NoiseModeTag::CD:
    case NoiseModeTag::CR:
      break;
    case NoiseModeTag::PauliZ:
    case NoiseModeTag::PauliX:
    case NoiseModeTag::PauliZX:
      if (cb.b_side.size() == 1) {  // bare framed codebook (single-stage protocol)
        CorrectionUnit u;
        if (!decoy && !a_side.empty()) u.data.push_back(p(A));
        u.data.push_back(p(B));
        units.push_back(std::move(u));
      } else {
        if (!decoy) units.push_back({{p(A)}, p(Ap), std::nullopt, std::nullopt});
        units.push_back({{p(B)}, p(Bp), std::nullopt, std::nullopt});
      }
      break;
    case NoiseModeTag::PauliFull:
      if (cb.b_side.size() == 1) break;  // block auxiliary handled by the engine
      if (!decoy) units.push_back({{p(A)}, p(Ap), p(App), std::nullopt});
      units.push_back({{p(B)}, p(Bp), p(Bpp), std::nullopt});
      break;
    case NoiseModeTag::PD:
    case NoiseModeTag::AD:
      if (!decoy) units.push_back({{p(A)}, std::nullopt, std::nullopt, p(Ap)});
      units.push_back({{p(B)}, std::nullopt, std::nullopt, p(Bp)});
      break;
  }
  return units;
}

AdaptedProtocol adapt_protocol(const NoiseMode& mode) {
  mode.validate();
  AdaptedProtocol ap{make_codebook(mode, Protocol::I),
                     make_codebook(mode, Protocol::II),
                     CorrectionRule{mode.tag, std::nullopt},
                     {9, 4},
                     {2, 1}};
  switch (mode.tag) {
    case NoiseModeTag::None:
      break;
    case NoiseModeTag::CD:
      // two-qubit decoys: 5N qubits per 2N-bit key
      ap.qubits_per_key_bit_p1 = {5, 2};
      break;
    case NoiseModeTag::CR:
      // one key bit per state
      ap.qubits_per_key_bit_p1 = {5, 1};
      ap.qubits_per_key_bit_p2 = {4, 1};
      break;
    case NoiseModeTag::PauliZ:
      ap.qubits_per_key_bit_p1 = {9, 2};
      ap.qubits_per_key_bit_p2 = {2, 1};
      break;
    case NoiseModeTag::PauliX:
      ap.rule.frame_undo = gates::h();
      ap.qubits_per_key_bit_p1 = {9, 2};
      ap.qubits_per_key_bit_p2 = {2, 1};
      break;
    case NoiseModeTag::PauliZX:
      ap.rule.frame_undo = gates::h_prime().adjoint();
      ap.qubits_per_key_bit_p1 = {9, 2};
      ap.qubits_per_key_bit_p2 = {2, 1};
      break;
    case NoiseModeTag::PauliFull:
      ap.qubits_per_key_bit_p1 = {27, 4};
      ap.qubits_per_key_bit_p2 = {5, 2};  // one auxiliary per block
      break;
    case NoiseModeTag::PD:
    case NoiseModeTag::AD:
      ap.qubits_per_key_bit_p1 = {9, 2};
      ap.qubits_per_key_bit_p2 = {4, 1};
      break;
  }
  return ap;
}

}  // namespace oqkd
