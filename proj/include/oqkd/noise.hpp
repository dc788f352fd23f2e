#pragma once

#include <optional>
#include <vector>

#include "oqkd/analysis.hpp"
#include "oqkd/codebook.hpp"

namespace oqkd {

// A channel plus the grouping convention: qubits transmitted together suffer
// the same draw (correlated) or independent per-qubit draws (exploratory).
struct ChannelModel {
  NoiseMode mode;
  bool correlated = true;
};

// Channel with its per-cycle parameters pinned. The dephasing phase and the
// rotation angle are sampled (or taken from the config) once per protocol
// cycle and shared by every transmission of that cycle.
struct RunChannel {
  NoiseModeTag tag = NoiseModeTag::None;
  bool correlated = true;
  double phi = 0.0;
  double theta = 0.0;
  std::optional<KrausSet> kraus;
};

RunChannel begin_cycle(const ChannelModel& ch, Rng& rng);

// Applies the channel to one in-transit state. `groups` partitions the
// transiting labels into same-effect units.
StateVector apply_channel(const RunChannel& ch, const StateVector& s,
                          const std::vector<std::vector<QubitLabel>>& groups,
                          Rng& rng);

// Same-effect grouping of one transmission: everything sent together is one
// group, except dual-rail encodings where each (data, partner) pair is its
// own unit even inside a block.
std::vector<std::vector<QubitLabel>> same_effect_groups(
    NoiseModeTag tag, const std::vector<QubitLabel>& transit_labels);

// One receiver-side correction unit: a set of data qubits with the probes
// that diagnose what the channel did to them.
//  - aux_pm:   |+>-prepared probe measured in {+,-}; "-" flags a Z
//  - aux_comp: |0>-prepared probe measured in {0,1}; "1" flags an X
//  - both:     (-,0) -> Z, (+,1) -> X, (-,1) -> XZ
//  - aux_comp alone: "1" -> X on every data qubit (block auxiliary)
//  - rail:     dual-rail partner; CNOT-decode then measure, "0" -> discard
struct CorrectionUnit {
  std::vector<QubitLabel> data;
  std::optional<QubitLabel> aux_pm;
  std::optional<QubitLabel> aux_comp;
  std::optional<QubitLabel> rail;
};

struct CorrectionRule {
  NoiseModeTag mode = NoiseModeTag::None;
  // Undo of the preparation frame, applied to every received qubit before
  // any probe is read (H for the X channel, H'† for ZX).
  std::optional<Eigen::Matrix2cd> frame_undo;
};

// Measures the probes and applies the mapped corrections. The state comes
// back post-measurement; `discarded_units` indexes the units whose dual-rail
// pattern was destroyed (their data qubits must not be decoded).
struct CorrectionOutcome {
  StateVector state;
  std::vector<std::size_t> discarded_units;
};
CorrectionOutcome bob_correct(const CorrectionRule& rule, const StateVector& s,
                              const std::vector<CorrectionUnit>& units,
                              Rng& rng);

// Correction units for one encoded state (optionally label-prefixed, for
// block members). Frame-only units come back for the bare framed codebooks.
std::vector<CorrectionUnit> correction_units(const Codebook& cb, bool decoy,
                                             const std::string& prefix = "");

// The mode's codebooks (per protocol), receiver correction rule, and the
// qubits-consumed-per-key-bit deltas.
struct AdaptedProtocol {
  Codebook p1;
  Codebook p2;
  CorrectionRule rule;
  Rational qubits_per_key_bit_p1;
  Rational qubits_per_key_bit_p2;

  const Codebook& codebook(Protocol p) const { return p == Protocol::I ? p1 : p2; }
};

AdaptedProtocol adapt_protocol(const NoiseMode& mode);

}  // namespace oqkd
