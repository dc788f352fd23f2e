#include "oqkd/adversary.hpp"

#include <algorithm>
#include <stdexcept>

namespace oqkd {

namespace {

QubitLabel probe_label(const QubitLabel& wire) { return "E." + wire; }
QubitLabel eve_label(const QubitLabel& wire) { return "eve:" + wire; }

// Units arrive in slot order, consecutive per block.
std::vector<std::vector<const TransitUnit*>> by_site(const TransitView& view) {
  std::vector<std::vector<const TransitUnit*>> out;
  for (const auto& u : view.units) {
    if (out.empty() || out.back().front()->site != u.site) out.emplace_back();
    out.back().push_back(&u);
  }
  return out;
}

void require_bare_wires(const std::vector<const TransitUnit*>& block,
                        std::size_t n, const char* who) {
  if (block.size() != n)
    throw std::invalid_argument(std::string(who) + ": unexpected block shape");
  for (const auto* u : block)
    if (u->wires.size() != 1)
      throw std::invalid_argument(std::string(who) +
                                  " supports unencoded codebooks only");
}

// Coding position of a Protocol I site once the decoy string is public.
std::size_t coding_position(const TransitView& view, std::size_t site) {
  if (view.published_r == nullptr) return site;
  std::size_t pos = 0;
  for (std::size_t i = 0; i < site; ++i)
    if ((*view.published_r)[i] == 0) ++pos;
  return pos;
}

bool is_decoy_site(const TransitView& view, std::size_t site) {
  return view.published_r != nullptr && (*view.published_r)[site] == 1;
}

}  // namespace

void hook_stage(AttackStrategy& strategy, TransitView& view, Rng& rng) {
  strategy.check_protocol(view.protocol);
  strategy.intercept(view, rng);
}

// ---- PurifySingleQubit ------------------------------------------------------

PurifySingleQubit::PurifySingleQubit(OrthonormalBasis basis, ProbeScope scope)
    : basis_(std::move(basis)), scope_(scope) {
  if (basis_.num_qubits() != 1)
    throw std::invalid_argument("single-qubit purification wants a 1-qubit basis");
}

std::string PurifySingleQubit::name() const {
  std::string n = "purify-single:" + basis_.name(0) + basis_.name(1);
  if (scope_ == ProbeScope::AllQubits) n += ":all-qubits";
  return n;
}

void PurifySingleQubit::intercept(TransitView& view, Rng&) {
  auto& pool = *view.pool;
  auto probe = [&](std::size_t site, const QubitLabel& wire) {
    pool[site] = purify_isometry(pool[site], basis_, {wire}, {probe_label(wire)});
  };
  if (scope_ == ProbeScope::AllQubits) {
    for (const auto& u : view.units)
      for (const auto& w : u.wires) probe(u.site, w);
    return;
  }
  if (view.protocol == Protocol::I) {
    if (view.stage != 1) return;  // one probe per state: first transmission only
    for (const auto& u : view.units) probe(u.site, u.wires.front());
    return;
  }
  // Protocol II: the first and last slots of a block never move under the
  // rearrangement, so probing them touches each state exactly once.
  for (const auto& block : by_site(view)) {
    probe(block.front()->site, block.front()->wires.front());
    probe(block.back()->site, block.back()->wires.front());
  }
}

// ---- PurifyBlockS -----------------------------------------------------------

void PurifyBlockS::check_protocol(Protocol p) const {
  if (p != Protocol::II)
    throw std::invalid_argument(
        "blockwise purification needs the single-stage protocol");
}

void PurifyBlockS::intercept(TransitView& view, Rng& rng) {
  auto& pool = *view.pool;
  for (const auto& block : by_site(view)) {
    require_bare_wires(block, 4, "purify-block");
    const std::size_t site = block.front()->site;
    const bool guess_swap =
        force_guess_swap_ ? *force_guess_swap_ : rng.bernoulli(0.5);
    const auto w = [&](int j) { return block[j]->wires[0]; };
    const auto pair1 = guess_swap ? std::pair{w(0), w(2)} : std::pair{w(0), w(1)};
    const auto pair2 = guess_swap ? std::pair{w(1), w(3)} : std::pair{w(2), w(3)};
    StateVector st = purify_isometry(pool[site], basis_s(),
                                     {pair1.first, pair1.second}, {"E1", "E2"});
    st = purify_isometry(st, basis_s(), {pair2.first, pair2.second}, {"E3", "E4"});
    pool[site] = std::move(st);
  }
}

// ---- SubstituteAttack -------------------------------------------------------

std::string SubstituteAttack::name() const {
  std::string n = resource_ == Resource::Product ? "substitute:product"
                                                 : "substitute:entangled";
  if (matched_) n += ":matched";
  return n;
}

void SubstituteAttack::intercept(TransitView& view, Rng& rng) {
  auto& pool = *view.pool;
  const Unitary ux{Eigen::MatrixXcd(gates::x())};
  const Unitary uz{Eigen::MatrixXcd(gates::z())};

  if (view.protocol == Protocol::I && view.stage == 1) {
    for (const auto& u : view.units) {
      if (u.wires.size() != 1)
        throw std::invalid_argument("substitute supports unencoded codebooks only");
      const QubitLabel w = u.wires[0];
      const QubitLabel e1 = "eve:r1", e2 = "eve:r2";
      StateVector res = resource_ == Resource::Product
                            ? StateVector::ket("00", {e1, e2})
                            : StateVector(states::phi().amplitudes(), {e1, e2});
      StateVector st = tensor(pool[u.site], res);
      st = relabel(st, w, eve_label(w));
      st = relabel(st, e1, w);
      pool[u.site] = std::move(st);
      memory_[u.site] = Memory{{eve_label(w)}, e2};
    }
    return;
  }

  if (view.protocol == Protocol::I) {  // stage 2
    for (const auto& u : view.units) {
      const QubitLabel w = u.wires[0];
      auto it = memory_.find(u.site);
      if (it == memory_.end()) continue;
      const Memory& mem = it->second;
      auto [out, post] = measure(pool[u.site], basis_s(), {w, mem.kept[0]}, rng);
      if (!is_decoy_site(view, u.site)) {
        const std::size_t pos = coding_position(view, u.site);
        knowledge_.guesses[pos] = CodingSymbol{out};
        knowledge_.confident.insert(pos);
      }
      if (matched_) {
        if (resource_ == Resource::Product) {
          if (out != 0) post = apply_unitary(post, ux, {mem.pending});
        } else {
          // delivered pair reads as the singlet; steer it per the outcome
          if (out == 0 || out == 1) post = apply_unitary(post, ux, {mem.pending});
          if (out == 3) post = apply_unitary(post, uz, {mem.pending});
        }
      }
      post = relabel(post, w, eve_label(w));
      post = relabel(post, mem.pending, w);
      pool[u.site] = std::move(post);
    }
    return;
  }

  // Protocol II: blockwise swap before anything is public.
  for (const auto& block : by_site(view)) {
    require_bare_wires(block, 4, "substitute");
    const std::size_t site = block.front()->site;
    const std::array<QubitLabel, 4> e = {"eve:r1", "eve:r2", "eve:r3", "eve:r4"};
    StateVector res =
        resource_ == Resource::Product
            ? StateVector::ket("0000", {e[0], e[1], e[2], e[3]})
            : tensor(StateVector(states::phi().amplitudes(), {e[0], e[1]}),
                     StateVector(states::phi().amplitudes(), {e[2], e[3]}));
    StateVector st = tensor(pool[site], res);
    Memory mem;
    for (int j = 0; j < 4; ++j) {
      const QubitLabel w = block[j]->wires[0];
      st = relabel(st, w, eve_label(w));
      st = relabel(st, e[j], w);
      mem.kept.push_back(eve_label(w));
    }
    pool[site] = std::move(st);
    memory_[site] = std::move(mem);
  }
}

void SubstituteAttack::conclude(const std::vector<int>& s,
                                std::vector<StateVector>& pool, Rng& rng) {
  for (auto& [site, mem] : memory_) {
    if (mem.kept.size() != 4) continue;
    const bool swapped = s.at(site) == 1;
    const auto pair1 = swapped ? std::pair{mem.kept[0], mem.kept[2]}
                               : std::pair{mem.kept[0], mem.kept[1]};
    const auto pair2 = swapped ? std::pair{mem.kept[1], mem.kept[3]}
                               : std::pair{mem.kept[2], mem.kept[3]};
    auto [o1, post1] = measure(pool[site], basis_s(), {pair1.first, pair1.second}, rng);
    auto [o2, post2] = measure(post1, basis_s(), {pair2.first, pair2.second}, rng);
    pool[site] = std::move(post2);
    knowledge_.guesses[2 * site] = CodingSymbol{o1};
    knowledge_.guesses[2 * site + 1] = CodingSymbol{o2};
    knowledge_.confident.insert(2 * site);
    knowledge_.confident.insert(2 * site + 1);
  }
}

// ---- MeasureResend ----------------------------------------------------------

MeasureResend::MeasureResend(Granularity g, OrthonormalBasis basis,
                             std::optional<bool> force_guess_swap)
    : granularity_(g), basis_(std::move(basis)), force_guess_swap_(force_guess_swap) {}

MeasureResend MeasureResend::single_qubit(OrthonormalBasis basis) {
  if (basis.num_qubits() != 1)
    throw std::invalid_argument("single-qubit resend wants a 1-qubit basis");
  return MeasureResend(Granularity::SingleQubit, std::move(basis));
}

MeasureResend MeasureResend::block_s(std::optional<bool> force_guess_swap) {
  return MeasureResend(Granularity::BlockS, basis_s(), force_guess_swap);
}

std::string MeasureResend::name() const {
  if (granularity_ == Granularity::BlockS) return "measure-resend:block";
  return "measure-resend:single:" + basis_.name(0) + basis_.name(1);
}

void MeasureResend::check_protocol(Protocol p) const {
  if (granularity_ == Granularity::BlockS && p != Protocol::II)
    throw std::invalid_argument(
        "blockwise measure-resend needs the single-stage protocol");
}

void MeasureResend::intercept(TransitView& view, Rng& rng) {
  auto& pool = *view.pool;
  if (granularity_ == Granularity::SingleQubit) {
    for (const auto& u : view.units)
      for (const auto& w : u.wires)
        pool[u.site] = measure(pool[u.site], basis_, {w}, rng).second;
    return;
  }
  for (const auto& block : by_site(view)) {
    require_bare_wires(block, 4, "measure-resend:block");
    const std::size_t site = block.front()->site;
    const bool guess_swap =
        force_guess_swap_ ? *force_guess_swap_ : rng.bernoulli(0.5);
    const auto w = [&](int j) { return block[j]->wires[0]; };
    const auto pair1 = guess_swap ? std::pair{w(0), w(2)} : std::pair{w(0), w(1)};
    const auto pair2 = guess_swap ? std::pair{w(1), w(3)} : std::pair{w(2), w(3)};
    auto [o1, post1] = measure(pool[site], basis_s(), {pair1.first, pair1.second}, rng);
    auto [o2, post2] = measure(post1, basis_s(), {pair2.first, pair2.second}, rng);
    pool[site] = std::move(post2);
    block_notes_[site] = {guess_swap, {o1, o2}};
  }
}

void MeasureResend::conclude(const std::vector<int>& s,
                             std::vector<StateVector>&, Rng&) {
  for (const auto& [site, note] : block_notes_) {
    if (note.first != (s.at(site) == 1)) continue;  // wrong order guess
    knowledge_.guesses[2 * site] = CodingSymbol{note.second[0]};
    knowledge_.guesses[2 * site + 1] = CodingSymbol{note.second[1]};
    knowledge_.confident.insert(2 * site);
    knowledge_.confident.insert(2 * site + 1);
  }
}

// ---- TwoStageAttack ---------------------------------------------------------

void TwoStageAttack::check_protocol(Protocol p) const {
  if (p != Protocol::I)
    throw std::invalid_argument("the two-stage attack needs two transmissions");
}

void TwoStageAttack::intercept(TransitView& view, Rng& rng) {
  auto& pool = *view.pool;
  const Unitary ux{Eigen::MatrixXcd(gates::x())};
  const Unitary uz{Eigen::MatrixXcd(gates::z())};

  if (view.stage == 1) {
    for (const auto& u : view.units) {
      if (u.wires.size() != 1)
        throw std::invalid_argument("two-stage supports unencoded codebooks only");
      const QubitLabel w = u.wires[0];
      StateVector st = purify_isometry(pool[u.site], basis_computational(), {w}, {"E"});
      st = purify_isometry(st, basis_computational(), {w}, {"E'"});
      st = apply_unitary(st, ux, {"E'"});
      st = relabel(st, w, eve_label(w));  // Eve keeps the original particle,
      st = relabel(st, "E'", w);          // the flipped copy flies on
      pool[u.site] = std::move(st);
      first_wire_[u.site] = w;
    }
    return;
  }

  for (const auto& u : view.units) {
    auto it = first_wire_.find(u.site);
    if (it == first_wire_.end()) continue;
    const QubitLabel w = u.wires[0];          // arriving second-stage particle
    const QubitLabel delivered = it->second;  // the copy Bob already holds
    auto [out, post] = measure(pool[u.site], basis_s(), {w, "E"}, rng);
    if (out == 0 || out == 1) {
      post = apply_unitary(post, ux, {delivered});
      if (!is_decoy_site(view, u.site)) {
        const std::size_t pos = coding_position(view, u.site);
        knowledge_.guesses[pos] = CodingSymbol{out};
        knowledge_.confident.insert(pos);
      }
    } else if (out == 2) {
      post = apply_unitary(post, uz, {delivered});
    }
    // keep the measured particle, forward the retained one in its place
    post = relabel(post, w, eve_label(w));
    post = relabel(post, eve_label(delivered), w);
    pool[u.site] = std::move(post);
  }
}

// ---- descriptor parsing -----------------------------------------------------

std::unique_ptr<AttackStrategy> make_attack(const std::string& descriptor) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto colon = descriptor.find(':', start);
    parts.push_back(descriptor.substr(start, colon - start));
    if (colon == std::string::npos) break;
    start = colon + 1;
  }
  const auto basis_of = [](const std::string& s) -> const OrthonormalBasis& {
    if (s == "computational") return basis_computational();
    if (s == "hadamard") return basis_pm();
    throw std::invalid_argument("unknown probe basis: " + s);
  };

  const std::string& kind = parts[0];
  if (kind == "none") return std::make_unique<NoAttack>();
  if (kind == "purify-single") {
    if (parts.size() < 2) throw std::invalid_argument("purify-single needs a basis");
    ProbeScope scope = ProbeScope::PerState;
    if (parts.size() >= 3) {
      if (parts[2] == "all-qubits")
        scope = ProbeScope::AllQubits;
      else if (parts[2] != "per-state")
        throw std::invalid_argument("unknown probe scope: " + parts[2]);
    }
    return std::make_unique<PurifySingleQubit>(basis_of(parts[1]), scope);
  }
  if (kind == "purify-block") return std::make_unique<PurifyBlockS>();
  if (kind == "substitute") {
    if (parts.size() < 2) throw std::invalid_argument("substitute needs a variant");
    SubstituteAttack::Resource r;
    if (parts[1] == "product")
      r = SubstituteAttack::Resource::Product;
    else if (parts[1] == "entangled")
      r = SubstituteAttack::Resource::Entangled;
    else
      throw std::invalid_argument("unknown substitute variant: " + parts[1]);
    bool matched = parts.size() >= 3 && parts[2] == "matched";
    if (parts.size() >= 3 && !matched && parts[2] != "identity")
      throw std::invalid_argument("unknown substitute correction: " + parts[2]);
    return std::make_unique<SubstituteAttack>(r, matched);
  }
  if (kind == "measure-resend") {
    if (parts.size() < 2) throw std::invalid_argument("measure-resend needs a granularity");
    if (parts[1] == "block")
      return std::make_unique<MeasureResend>(MeasureResend::block_s());
    if (parts[1] == "single") {
      const auto& b = parts.size() >= 3 ? basis_of(parts[2]) : basis_computational();
      return std::make_unique<MeasureResend>(MeasureResend::single_qubit(b));
    }
    throw std::invalid_argument("unknown measure-resend granularity: " + parts[1]);
  }
  if (kind == "two-stage") return std::make_unique<TwoStageAttack>();
  throw std::invalid_argument("unknown attack: " + descriptor);
}

}  // namespace oqkd
