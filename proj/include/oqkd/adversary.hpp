#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "oqkd/codebook.hpp"

namespace oqkd {

// What Eve believes about Alice's symbols, keyed by coding position.
// Populated only once the relevant hooks have run.
struct EveKnowledge {
  std::map<std::size_t, CodingSymbol> guesses;
  std::set<std::size_t> confident;
};

// One occupied transmission slot. Protocol I: one unit per string position,
// in position order. Protocol II: units in physical slot order, grouped per
// block. Wire labels are handles into the pool entry; strategies must treat
// them as opaque (they carry no information Eve is entitled to).
struct TransitUnit {
  std::size_t site = 0;           // pool index (position for I, block for II)
  std::vector<QubitLabel> wires;  // particle labels occupying the slot
  int slot = 0;                   // slot within the block (Protocol II)
};

struct TransitView {
  Protocol protocol = Protocol::I;
  int stage = 1;  // Protocol I: 1 or 2; Protocol II: 1
  std::vector<StateVector>* pool = nullptr;
  std::vector<TransitUnit> units;
  // Protocol I stage 2 travels together with the decoy-position string.
  const std::vector<int>* published_r = nullptr;
};

// Interception policy with persistent memory. One instance drives one run.
// Hooks must deliver exactly the particles they intercepted (count and
// labels); Eve's own registers stay under "eve:"/"E" names and never reach
// the receiver's measurement targets.
class AttackStrategy {
 public:
  virtual ~AttackStrategy() = default;
  virtual std::string name() const = 0;
  // Throws std::invalid_argument when the strategy cannot run against the
  // protocol (blockwise attacks need the single-stage protocol, the
  // two-stage attack needs two stages).
  virtual void check_protocol(Protocol) const {}
  virtual void intercept(TransitView& view, Rng& rng) = 0;
  // Protocol II: invoked after the order string becomes public.
  virtual void conclude(const std::vector<int>& /*s*/,
                        std::vector<StateVector>& /*pool*/, Rng& /*rng*/) {}
  const EveKnowledge& knowledge() const { return knowledge_; }

 protected:
  EveKnowledge knowledge_;
};

// Validates protocol compatibility, runs the strategy's hook.
void hook_stage(AttackStrategy& strategy, TransitView& view, Rng& rng);

class NoAttack final : public AttackStrategy {
 public:
  std::string name() const override { return "none"; }
  void intercept(TransitView&, Rng&) override {}
};

// Coherent single-qubit probes. PerState attaches one probe per coding state
// (Protocol I: every first-stage particle; Protocol II: the two slots of a
// block the rearrangement never moves); AllQubits probes every transiting
// qubit at every stage.
enum class ProbeScope { PerState, AllQubits };

class PurifySingleQubit final : public AttackStrategy {
 public:
  PurifySingleQubit(OrthonormalBasis basis, ProbeScope scope = ProbeScope::PerState);
  std::string name() const override;
  void intercept(TransitView& view, Rng& rng) override;

 private:
  OrthonormalBasis basis_;
  ProbeScope scope_;
};

// Blockwise purification in the coding basis under a fair guess of the block
// order. Only meaningful against the single-stage protocol.
class PurifyBlockS final : public AttackStrategy {
 public:
  explicit PurifyBlockS(std::optional<bool> force_guess_swap = std::nullopt)
      : force_guess_swap_(force_guess_swap) {}
  std::string name() const override { return "purify-block"; }
  void check_protocol(Protocol p) const override;
  void intercept(TransitView& view, Rng& rng) override;

 private:
  std::optional<bool> force_guess_swap_;
};

// Eve keeps the intercepted particles and forwards her own, adapting her
// second particle once she has learned the symbol (Protocol I) or holding the
// block until the order string is public (Protocol II).
class SubstituteAttack final : public AttackStrategy {
 public:
  enum class Resource { Product, Entangled };
  explicit SubstituteAttack(Resource r, bool matched_correction = false)
      : resource_(r), matched_(matched_correction) {}
  std::string name() const override;
  void intercept(TransitView& view, Rng& rng) override;
  void conclude(const std::vector<int>& s, std::vector<StateVector>& pool,
                Rng& rng) override;

 private:
  Resource resource_;
  bool matched_;
  struct Memory {
    std::vector<QubitLabel> kept;  // Eve's copies of Alice's particles
    QubitLabel pending;            // her not-yet-delivered second particle
  };
  std::map<std::size_t, Memory> memory_;
};

class MeasureResend final : public AttackStrategy {
 public:
  enum class Granularity { SingleQubit, BlockS };
  MeasureResend(Granularity g, OrthonormalBasis basis,
                std::optional<bool> force_guess_swap = std::nullopt);
  static MeasureResend single_qubit(OrthonormalBasis basis);
  static MeasureResend block_s(std::optional<bool> force_guess_swap = std::nullopt);
  std::string name() const override;
  void check_protocol(Protocol p) const override;
  void intercept(TransitView& view, Rng& rng) override;
  void conclude(const std::vector<int>& s, std::vector<StateVector>& pool,
                Rng& rng) override;

 private:
  Granularity granularity_;
  OrthonormalBasis basis_;
  std::optional<bool> force_guess_swap_;
  std::map<std::size_t, std::pair<bool, std::array<int, 2>>> block_notes_;
};

// Protocol I only: computational purification (twice, with a bit-flip on the
// second probe) at stage one, then a coding-basis measurement of each kept
// (A, E) pair at stage two with the outcome-mapped correction applied to the
// forwarded partner before delivery.
class TwoStageAttack final : public AttackStrategy {
 public:
  std::string name() const override { return "two-stage"; }
  void check_protocol(Protocol p) const override;
  void intercept(TransitView& view, Rng& rng) override;

 private:
  std::map<std::size_t, QubitLabel> first_wire_;
};

// Builds a strategy from a CLI descriptor such as "none", "purify-block",
// "purify-single:computational[:all-qubits]", "substitute:product[:matched]",
// "measure-resend:single[:hadamard]", "measure-resend:block", "two-stage".
std::unique_ptr<AttackStrategy> make_attack(const std::string& descriptor);

}  // namespace oqkd
