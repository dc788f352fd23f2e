#include "oqkd/engine.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace oqkd {

namespace {

void validate_delivery(const std::vector<StateVector>& pool,
                       const std::vector<TransitUnit>& units) {
  for (const auto& u : units) {
    if (u.site >= pool.size()) throw ProtocolFault("hook addressed a missing site");
    for (const auto& w : u.wires)
      if (!pool[u.site].has_label(w))
        throw ProtocolFault("attack hook lost particle " + w);
  }
}

std::vector<QubitLabel> prefixed(const std::vector<QubitLabel>& labels,
                                 const std::string& prefix) {
  std::vector<QubitLabel> out;
  out.reserve(labels.size());
  for (const auto& l : labels) out.push_back(prefix + l);
  return out;
}

StateVector relabel_prefixed(const StateVector& s, const std::string& prefix) {
  return StateVector(s.amplitudes(), prefixed(s.labels(), prefix));
}

std::vector<std::optional<CodingSymbol>> as_optional(
    const std::vector<CodingSymbol>& symbols) {
  std::vector<std::optional<CodingSymbol>> out(symbols.begin(), symbols.end());
  return out;
}

std::vector<std::size_t> choose_checking(std::vector<std::size_t> available,
                                         double fraction, Rng& rng) {
  const auto count = static_cast<std::size_t>(
      std::llround(fraction * static_cast<double>(available.size())));
  rng.shuffle(available);
  available.resize(std::min(count, available.size()));
  std::sort(available.begin(), available.end());
  return available;
}

struct CheckedRates {
  double checking_rate = 0.0;
  int checking_errors = 0;
  double decoy_rate = 0.0;
};

RunReport assemble_report(const ProtocolConfig& cfg, const Codebook& cb,
                          Transcript& tr,
                          const std::vector<std::optional<CodingSymbol>>& decoded,
                          const std::set<std::size_t>& discarded,
                          int decoy_errors, int decoy_checked,
                          std::int64_t admin, Rng& rng) {
  const int coding_count = 2 * cfg.n;
  std::vector<std::size_t> available;
  for (int pos = 0; pos < coding_count; ++pos)
    if (!discarded.count(pos)) available.push_back(pos);

  tr.checking_set = choose_checking(available, cfg.checking_fraction, rng);
  tr.classical_bit_count += coding_count;  // checking-position bitmap
  tr.classical_bit_count +=
      static_cast<std::int64_t>(cb.bits_per_symbol) * tr.checking_set.size();
  tr.classical_bit_count += admin;

  RunReport rep;
  rep.discarded = static_cast<int>(discarded.size());
  rep.decoy_errors = decoy_errors;
  rep.decoy_checked = decoy_checked;
  rep.decoy_error_rate =
      decoy_checked > 0 ? static_cast<double>(decoy_errors) / decoy_checked : 0.0;

  if (!tr.checking_set.empty()) {
    auto [rate, mismatches] =
        checking_procedure(tr.prepared_symbols, decoded, tr.checking_set);
    rep.checking_error_rate = rate;
    rep.checking_errors = static_cast<int>(mismatches.size());
    rep.checking_checked = static_cast<int>(tr.checking_set.size());
    rep.aborted = rate > cfg.error_threshold;
  } else {
    rep.aborted = true;  // nothing survived to check
  }
  if (decoy_checked > 0 && rep.decoy_error_rate > cfg.error_threshold)
    rep.aborted = true;

  std::vector<std::size_t> excluded = tr.checking_set;
  excluded.insert(excluded.end(), discarded.begin(), discarded.end());
  std::sort(excluded.begin(), excluded.end());
  if (!rep.aborted) {
    tr.alice_key = sift_key(cb, as_optional(tr.prepared_symbols), excluded);
    tr.bob_key = sift_key(cb, decoded, excluded);
  }
  rep.key_bits = tr.bob_key;

  rep.ledger.qubits = tr.qubit_count;
  rep.ledger.classical_bits = tr.classical_bit_count;
  rep.ledger.admin_bits = admin;
  rep.ledger.key_bits = static_cast<std::int64_t>(cb.bits_per_symbol) *
                        (available.size() - tr.checking_set.size());
  const std::int64_t denom = tr.qubit_count + tr.classical_bit_count - admin;
  rep.efficiency = denom > 0 ? Rational(rep.ledger.key_bits, denom) : Rational(0, 1);
  return rep;
}

}  // namespace

void ProtocolConfig::validate() const {
  if (n < 2) throw std::invalid_argument("n must be at least 2");
  if (!(checking_fraction > 0.0 && checking_fraction < 1.0))
    throw std::invalid_argument("checking_fraction must lie in (0,1)");
  if (decoy_ratio < 0.0 || decoy_ratio > 1.0)
    throw std::invalid_argument("decoy_ratio must lie in [0,1]");
  if (error_threshold < 0.0 || error_threshold > 1.0)
    throw std::invalid_argument("error_threshold must lie in [0,1]");
  noise.validate();
}

std::pair<double, std::vector<std::size_t>> checking_procedure(
    const std::vector<CodingSymbol>& prepared,
    const std::vector<std::optional<CodingSymbol>>& decoded,
    const std::vector<std::size_t>& checking_set) {
  if (checking_set.empty()) throw std::invalid_argument("empty checking set");
  std::vector<std::size_t> mismatches;
  for (std::size_t pos : checking_set) {
    if (pos >= prepared.size())
      throw std::invalid_argument("checking position out of range");
    if (!decoded[pos].has_value() || !(*decoded[pos] == prepared[pos]))
      mismatches.push_back(pos);
  }
  return {static_cast<double>(mismatches.size()) / checking_set.size(),
          std::move(mismatches)};
}

std::string sift_key(const Codebook& cb,
                     const std::vector<std::optional<CodingSymbol>>& symbols,
                     const std::vector<std::size_t>& excluded) {
  std::set<std::size_t> skip(excluded.begin(), excluded.end());
  std::string bits;
  for (std::size_t pos = 0; pos < symbols.size(); ++pos) {
    if (skip.count(pos)) continue;
    if (symbols[pos].has_value())
      bits += symbol_bits(cb, *symbols[pos]);
    else
      bits.append(cb.bits_per_symbol, 'x');
  }
  return bits;
}

std::pair<RunReport, Transcript> run_protocol_one(const ProtocolConfig& cfg,
                                                  AttackStrategy& adv, Rng& rng) {
  cfg.validate();
  if (cfg.protocol != Protocol::I)
    throw std::invalid_argument("config does not select the two-stage protocol");

  const AdaptedProtocol ap = adapt_protocol(cfg.noise);
  const Codebook& cb = ap.p1;
  const int coding_count = 2 * cfg.n;
  const int decoy_count =
      static_cast<int>(std::llround(cfg.decoy_ratio * coding_count));
  const int site_count = coding_count + decoy_count;

  Transcript tr;
  tr.prepared_symbols.resize(coding_count);
  for (auto& s : tr.prepared_symbols)
    s = CodingSymbol{static_cast<int>(rng.index(num_symbols(cb)))};

  std::vector<int> r(site_count, 0);
  for (int i = 0; i < decoy_count; ++i) r[i] = 1;
  rng.shuffle(r);
  if (decoy_count > 0) tr.r_string = r;

  std::vector<std::size_t> site_position(site_count, SIZE_MAX);
  std::vector<StateVector> pool;
  pool.reserve(site_count);
  std::size_t next_pos = 0;
  for (int site = 0; site < site_count; ++site) {
    if (r[site]) {
      pool.push_back(*cb.decoy);
    } else {
      site_position[site] = next_pos;
      pool.push_back(encode_symbol(cb, tr.prepared_symbols[next_pos]));
      ++next_pos;
    }
    tr.qubit_count += pool.back().num_qubits();
  }

  const ChannelModel channel{cfg.noise, cfg.correlated_grouping};
  const RunChannel rc = begin_cycle(channel, rng);

  // Step 4: first transmission (B partite of everything, decoys included).
  TransitView v1;
  v1.protocol = Protocol::I;
  v1.stage = 1;
  v1.pool = &pool;
  for (int site = 0; site < site_count; ++site) {
    const auto& wires = r[site] ? cb.decoy_b_side : cb.b_side;
    v1.units.push_back({static_cast<std::size_t>(site), wires, 0});
    tr.stage1_units.push_back(wires);
  }
  hook_stage(adv, v1, rng);
  validate_delivery(pool, v1.units);
  for (const auto& u : v1.units)
    pool[u.site] = apply_channel(rc, pool[u.site],
                                 same_effect_groups(cfg.noise.tag, u.wires), rng);

  std::int64_t admin = 1;  // Step 5: receipt

  // Step 6: second transmission (A partite) together with r.
  if (decoy_count > 0) tr.classical_bit_count += site_count;
  TransitView v2;
  v2.protocol = Protocol::I;
  v2.stage = 2;
  v2.pool = &pool;
  v2.published_r = &r;
  for (int site = 0; site < site_count; ++site) {
    const auto& wires = r[site] ? cb.decoy_a_side : cb.a_side;
    if (wires.empty()) continue;
    v2.units.push_back({static_cast<std::size_t>(site), wires, 0});
    tr.stage2_units.push_back(wires);
  }
  hook_stage(adv, v2, rng);
  validate_delivery(pool, v2.units);
  for (const auto& u : v2.units)
    pool[u.site] = apply_channel(rc, pool[u.site],
                                 same_effect_groups(cfg.noise.tag, u.wires), rng);

  // Step 7: corrections, then measurement.
  std::vector<std::optional<CodingSymbol>> decoded(coding_count);
  std::vector<int> raw_outcome(coding_count, -1);
  std::set<std::size_t> discarded;
  int decoy_errors = 0, decoy_checked = 0;
  for (int site = 0; site < site_count; ++site) {
    const bool is_decoy = r[site] == 1;
    const auto units = correction_units(cb, is_decoy);
    auto corr = bob_correct(ap.rule, pool[site], units, rng);
    if (!corr.discarded_units.empty()) {
      if (is_decoy) {
        tr.decoy_outcomes.push_back(-1);
      } else {
        discarded.insert(site_position[site]);
        tr.discarded_positions.push_back(site_position[site]);
      }
      continue;
    }
    if (is_decoy) {
      auto [out, post] = measure(corr.state, *cb.decoy_full, cb.decoy_data_roles, rng);
      tr.decoy_outcomes.push_back(out);
      ++decoy_checked;
      if (out != cb.decoy_expected) ++decoy_errors;
    } else {
      auto [out, post] = measure(corr.state, cb.coding_full, cb.data_roles, rng);
      raw_outcome[site_position[site]] = out;
      if (out < cb.coding_valid)
        decoded[site_position[site]] = decode_outcome(cb, out);
    }
  }

  admin += 1;                       // Alice's checking verdict
  if (decoy_count > 0) admin += 1;  // Bob's decoy verdict

  RunReport rep = assemble_report(cfg, cb, tr, decoded, discarded, decoy_errors,
                                  decoy_checked, admin, rng);
  for (std::size_t pos : tr.checking_set)
    tr.published_outcomes.push_back(raw_outcome[pos]);
  return {std::move(rep), std::move(tr)};
}

std::pair<RunReport, Transcript> run_protocol_two(const ProtocolConfig& cfg,
                                                  AttackStrategy& adv, Rng& rng) {
  cfg.validate();
  if (cfg.protocol != Protocol::II)
    throw std::invalid_argument("config does not select the single-stage protocol");

  const AdaptedProtocol ap = adapt_protocol(cfg.noise);
  const Codebook& cb = ap.p2;
  const int blocks = cfg.n;
  const int coding_count = 2 * cfg.n;
  const bool block_aux = cfg.noise.tag == NoiseModeTag::PauliFull;

  Transcript tr;
  tr.prepared_symbols.resize(coding_count);
  for (auto& s : tr.prepared_symbols)
    s = CodingSymbol{static_cast<int>(rng.index(num_symbols(cb)))};
  tr.s_string.resize(blocks);
  for (auto& bit : tr.s_string) bit = rng.bernoulli(0.5) ? 1 : 0;

  // Step 3: block assembly; when s_i = 1 the first state's B partita and the
  // second state's A partita swap transmission slots.
  std::vector<StateVector> pool;
  pool.reserve(blocks);
  TransitView v1;
  v1.protocol = Protocol::II;
  v1.stage = 1;
  v1.pool = &pool;
  for (int b = 0; b < blocks; ++b) {
    StateVector st =
        tensor(relabel_prefixed(encode_symbol(cb, tr.prepared_symbols[2 * b]), "1."),
               relabel_prefixed(encode_symbol(cb, tr.prepared_symbols[2 * b + 1]), "2."));
    if (block_aux) st = tensor(st, StateVector::ket("0", {"aux"}));

    const auto a1 = prefixed(cb.a_side, "1."), b1 = prefixed(cb.b_side, "1.");
    const auto a2 = prefixed(cb.a_side, "2."), b2 = prefixed(cb.b_side, "2.");
    std::vector<std::vector<QubitLabel>> slots =
        tr.s_string[b] ? std::vector{a1, a2, b1, b2} : std::vector{a1, b1, a2, b2};
    if (block_aux) slots.push_back({"aux"});

    std::vector<QubitLabel> flat;
    for (const auto& s : slots) flat.insert(flat.end(), s.begin(), s.end());
    st = permute_qubits(st, flat);
    tr.qubit_count += st.num_qubits();
    pool.push_back(std::move(st));

    for (std::size_t j = 0; j < slots.size(); ++j) {
      v1.units.push_back({static_cast<std::size_t>(b), slots[j], static_cast<int>(j)});
      tr.stage1_units.push_back(slots[j]);
    }
  }

  const ChannelModel channel{cfg.noise, cfg.correlated_grouping};
  const RunChannel rc = begin_cycle(channel, rng);

  // Step 4: single transmission, whole blocks.
  hook_stage(adv, v1, rng);
  validate_delivery(pool, v1.units);
  for (int b = 0; b < blocks; ++b) {
    std::vector<QubitLabel> transit;
    for (const auto& u : v1.units)
      if (u.site == static_cast<std::size_t>(b))
        transit.insert(transit.end(), u.wires.begin(), u.wires.end());
    pool[b] = apply_channel(rc, pool[b],
                            same_effect_groups(cfg.noise.tag, transit), rng);
  }

  std::int64_t admin = 1;               // Step 5: receipt
  tr.classical_bit_count += blocks;     // Step 6: the order string
  adv.conclude(tr.s_string, pool, rng);

  // Step 7: reorder (implicit in labels), correct, measure.
  std::vector<std::optional<CodingSymbol>> decoded(coding_count);
  std::vector<int> raw_outcome(coding_count, -1);
  std::set<std::size_t> discarded;
  for (int b = 0; b < blocks; ++b) {
    auto units = correction_units(cb, false, "1.");
    const std::size_t first_state_units = units.size();
    const auto units2 = correction_units(cb, false, "2.");
    units.insert(units.end(), units2.begin(), units2.end());
    if (block_aux)
      units.push_back(CorrectionUnit{
          {"1." + roles::A, "1." + roles::B, "2." + roles::A, "2." + roles::B},
          std::nullopt,
          "aux",
          std::nullopt});
    auto corr = bob_correct(ap.rule, pool[b], units, rng);
    for (std::size_t ui : corr.discarded_units) {
      const std::size_t pos = ui < first_state_units ? 2 * b : 2 * b + 1;
      if (discarded.insert(pos).second) tr.discarded_positions.push_back(pos);
    }
    StateVector st = std::move(corr.state);
    for (int k = 0; k < 2; ++k) {
      const std::size_t pos = 2 * b + k;
      if (discarded.count(pos)) continue;
      const std::string prefix = k == 0 ? "1." : "2.";
      auto [out, post] = measure(st, cb.coding_full, prefixed(cb.data_roles, prefix), rng);
      st = std::move(post);
      raw_outcome[pos] = out;
      if (out < cb.coding_valid) decoded[pos] = decode_outcome(cb, out);
    }
  }

  admin += 1;  // Step 8/9: Alice's verdict

  RunReport rep = assemble_report(cfg, cb, tr, decoded, discarded,
                                  /*decoy_errors=*/0, /*decoy_checked=*/0,
                                  admin, rng);
  for (std::size_t pos : tr.checking_set)
    tr.published_outcomes.push_back(raw_outcome[pos]);
  return {std::move(rep), std::move(tr)};
}

std::pair<RunReport, Transcript> run_protocol(const ProtocolConfig& cfg,
                                              AttackStrategy& adv, Rng& rng) {
  return cfg.protocol == Protocol::I ? run_protocol_one(cfg, adv, rng)
                                     : run_protocol_two(cfg, adv, rng);
}

}  // namespace oqkd
