#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "oqkd/adversary.hpp"
#include "oqkd/analysis.hpp"
#include "oqkd/noise.hpp"

namespace oqkd {

// A hook damaged the particle stream (count or label mismatch). This is a
// protocol fault, not an error rate.
struct ProtocolFault : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ProtocolConfig {
  Protocol protocol = Protocol::I;
  int n = 2;  // key positions; 2N coding states are prepared
  NoiseMode noise;
  double checking_fraction = 0.5;
  // decoys as a fraction of the 2N coding states (first protocol only)
  double decoy_ratio = 0.25;
  double error_threshold = 0.0;
  bool correlated_grouping = true;
  std::uint64_t seed = 1;

  void validate() const;
};

struct Transcript {
  std::vector<CodingSymbol> prepared_symbols;  // 2N, in coding-position order
  std::vector<int> r_string;  // decoy positions (empty when no decoys)
  std::vector<int> s_string;  // block rearrangement bits (second protocol)
  std::vector<std::vector<QubitLabel>> stage1_units;
  std::vector<std::vector<QubitLabel>> stage2_units;
  std::vector<std::size_t> checking_set;  // coding positions, ascending
  std::vector<int> published_outcomes;    // outcome index per checking position
  std::vector<int> decoy_outcomes;        // per decoy, in transmission order
  std::vector<std::size_t> discarded_positions;
  std::string alice_key;
  std::string bob_key;
  std::int64_t classical_bit_count = 0;
  std::int64_t qubit_count = 0;
};

struct RunReport {
  double decoy_error_rate = 0.0;
  int decoy_errors = 0;
  int decoy_checked = 0;
  double checking_error_rate = 0.0;
  int checking_errors = 0;
  int checking_checked = 0;
  int discarded = 0;
  bool aborted = false;
  std::string key_bits;  // receiver-side sifted key; empty when aborted
  ResourceLedger ledger;
  Rational efficiency;  // key bits over (qubits + non-administrative bits)
};

std::pair<RunReport, Transcript> run_protocol_one(const ProtocolConfig& cfg,
                                                  AttackStrategy& adv, Rng& rng);
std::pair<RunReport, Transcript> run_protocol_two(const ProtocolConfig& cfg,
                                                  AttackStrategy& adv, Rng& rng);
std::pair<RunReport, Transcript> run_protocol(const ProtocolConfig& cfg,
                                              AttackStrategy& adv, Rng& rng);

// error rate = mismatches / |checking_set|; a missing decode always counts
// as a mismatch.
std::pair<double, std::vector<std::size_t>> checking_procedure(
    const std::vector<CodingSymbol>& prepared,
    const std::vector<std::optional<CodingSymbol>>& decoded,
    const std::vector<std::size_t>& checking_set);

// Concatenated symbol bits at positions outside `excluded`, in transmission
// order. A missing symbol contributes 'x' placeholders (never matches).
std::string sift_key(const Codebook& cb,
                     const std::vector<std::optional<CodingSymbol>>& symbols,
                     const std::vector<std::size_t>& excluded);

}  // namespace oqkd
