#include <doctest.h>

#include <cmath>

#include "oqkd/noise.hpp"
#include "test_util.hpp"

using namespace oqkd;

namespace {

RunChannel cycle(NoiseMode m, Rng& rng, bool correlated = true) {
  return begin_cycle(ChannelModel{m, correlated}, rng);
}

NoiseMode mode_of(NoiseModeTag tag, double p = 0.5) {
  NoiseMode m;
  m.tag = tag;
  m.p = p;
  return m;
}

NoiseMode pauli_full(std::array<double, 4> probs) {
  NoiseMode m{NoiseModeTag::PauliFull};
  m.pauli_probs = probs;
  return m;
}

}  // namespace

TEST_CASE("apply_channel matches the channel definitions") {
  Rng rng(17);

  NoiseMode cd;
  cd.tag = NoiseModeTag::CD;
  cd.phi = M_PI;
  auto ch = cycle(cd, rng);
  auto out = apply_channel(ch, states::ket11(), {{"q0", "q1"}}, rng);
  CHECK(out.amplitudes().isApprox(states::ket11().amplitudes(), 1e-12));
  CHECK(equal_up_to_global_phase(out, states::ket11()));

  NoiseMode cr;
  cr.tag = NoiseModeTag::CR;
  cr.theta = 0.9;
  ch = cycle(cr, rng);
  auto rot = apply_channel(ch, states::phi(), {{"q0", "q1"}}, rng);
  // the singlet picks up det(CR) = -1
  CHECK(rot.amplitudes().isApprox(-states::phi().amplitudes(), 1e-12));

  auto z_always = mode_of(NoiseModeTag::PauliZ, 0.0);  // identity prob 0
  ch = cycle(z_always, rng);
  auto flipped = apply_channel(ch, states::plus(), {{"q0"}}, rng);
  CHECK(flipped.amplitudes().isApprox(states::minus().amplitudes()));

  // an unset rotation angle is drawn once per cycle and reused
  NoiseMode cr_free;
  cr_free.tag = NoiseModeTag::CR;
  auto c1 = cycle(cr_free, rng);
  auto c2 = cycle(cr_free, rng);
  CHECK(c1.theta != c2.theta);

  CHECK_THROWS_AS(apply_channel(ch, states::plus(), {{}}, rng),
                  std::invalid_argument);
}

TEST_CASE("same-effect grouping") {
  auto g = same_effect_groups(NoiseModeTag::PauliFull, {"B", "B'", "B''"});
  REQUIRE(g.size() == 1);
  CHECK(g[0].size() == 3);

  auto rails = same_effect_groups(NoiseModeTag::AD, {"A", "A'", "B", "B'"});
  REQUIRE(rails.size() == 2);
  CHECK(rails[0] == std::vector<QubitLabel>{"A", "A'"});
  CHECK(rails[1] == std::vector<QubitLabel>{"B", "B'"});

  CHECK_THROWS_AS(same_effect_groups(NoiseModeTag::PD, {"A", "A'", "B"}),
                  std::invalid_argument);
}

TEST_CASE("adapt_protocol returns codebooks and published qubit rates") {
  NoiseMode cd;
  cd.tag = NoiseModeTag::CD;
  auto ap = adapt_protocol(cd);
  CHECK(ap.p1.decoy->labels().size() == 2);  // decoys become the two-qubit singlet
  CHECK(ap.p1.decoy_basis->size() == 4);     // checked in the coding basis
  CHECK(ap.p1.decoy_expected == 2);
  CHECK(ap.qubits_per_key_bit_p1 == Rational{5, 2});

  NoiseMode cr;
  cr.tag = NoiseModeTag::CR;
  auto cra = adapt_protocol(cr);
  CHECK(cra.p1.bits_per_symbol == 1);
  CHECK(cra.qubits_per_key_bit_p1 == Rational{5, 1});
  CHECK(cra.qubits_per_key_bit_p2 == Rational{4, 1});

  auto plain = adapt_protocol(NoiseMode{});
  CHECK(plain.qubits_per_key_bit_p1 == Rational{9, 4});
  CHECK(plain.qubits_per_key_bit_p2 == Rational{2, 1});

  NoiseMode bad{NoiseModeTag::PD};
  bad.p = 1.5;
  CHECK_THROWS_AS(adapt_protocol(bad), std::invalid_argument);
}

TEST_CASE("single-probe correction restores dephased data exactly") {
  Rng rng(5);
  // Z hits both members of each transmission group; the probe reads "-",
  // the mapped Z on the data qubit undoes it.
  auto pz = adapt_protocol(mode_of(NoiseModeTag::PauliZ));
  for (int sym = 0; sym < 4; ++sym) {
    StateVector enc = encode_symbol(pz.p1, CodingSymbol{sym});
    auto ch = cycle(mode_of(NoiseModeTag::PauliZ, 0.0), rng);  // Z always
    StateVector noisy = apply_channel(ch, enc, {{"B", "B'"}}, rng);
    noisy = apply_channel(ch, noisy, {{"A", "A'"}}, rng);
    auto corr = bob_correct(pz.rule, noisy, correction_units(pz.p1, false), rng);
    REQUIRE(corr.discarded_units.empty());
    auto d = outcome_distribution(corr.state, pz.p1.coding_full, {"A", "B"});
    CHECK(d(sym) == doctest::Approx(1.0).epsilon(1e-10));
  }

  // full Pauli channel forced to X: probes read (+,1), correction X restores
  auto pf = adapt_protocol(pauli_full({0.0, 0.0, 1.0, 0.0}));
  for (int sym = 0; sym < 4; ++sym) {
    StateVector enc = encode_symbol(pf.p1, CodingSymbol{sym});
    auto ch = cycle(pauli_full({0.0, 0.0, 1.0, 0.0}), rng);
    StateVector noisy = apply_channel(ch, enc, {{"B", "B'", "B''"}}, rng);
    noisy = apply_channel(ch, noisy, {{"A", "A'", "A''"}}, rng);
    auto corr = bob_correct(pf.rule, noisy, correction_units(pf.p1, false), rng);
    REQUIRE(corr.discarded_units.empty());
    auto d = outcome_distribution(corr.state, pf.p1.coding_full, {"A", "B"});
    CHECK(d(sym) == doctest::Approx(1.0).epsilon(1e-10));
  }

  // forced ZX exercises the (-,1) row of the correction map
  auto zx = adapt_protocol(pauli_full({0.0, 0.0, 0.0, 1.0}));
  StateVector enc = encode_symbol(zx.p1, CodingSymbol{3});
  auto ch = cycle(pauli_full({0.0, 0.0, 0.0, 1.0}), rng);
  StateVector noisy = apply_channel(ch, enc, {{"B", "B'", "B''"}}, rng);
  noisy = apply_channel(ch, noisy, {{"A", "A'", "A''"}}, rng);
  auto corr = bob_correct(zx.rule, noisy, correction_units(zx.p1, false), rng);
  auto d = outcome_distribution(corr.state, zx.p1.coding_full, {"A", "B"});
  CHECK(d(3) == doctest::Approx(1.0).epsilon(1e-10));

  CHECK_THROWS_AS(bob_correct(pz.rule, states::phi(),
                              correction_units(pz.p1, false), rng),
                  std::invalid_argument);  // missing auxiliary labels
}

TEST_CASE("frame conjugation handles the X and ZX channels") {
  Rng rng(6);
  for (auto tag : {NoiseModeTag::PauliX, NoiseModeTag::PauliZX}) {
    auto ap = adapt_protocol(mode_of(tag));
    for (int sym = 0; sym < 4; ++sym) {
      for (double keep : {0.0, 1.0}) {  // force the error / force identity
        StateVector enc = encode_symbol(ap.p1, CodingSymbol{sym});
        auto ch = cycle(mode_of(tag, keep), rng);
        StateVector noisy = apply_channel(ch, enc, {{"B", "B'"}}, rng);
        noisy = apply_channel(ch, noisy, {{"A", "A'"}}, rng);
        auto corr = bob_correct(ap.rule, noisy, correction_units(ap.p1, false), rng);
        auto d = outcome_distribution(corr.state, ap.p1.coding_full, {"A", "B"});
        CHECK(d(sym) == doctest::Approx(1.0).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("dual-rail decode survives correlated damping and never discards") {
  Rng rng(7);
  for (auto tag : {NoiseModeTag::AD, NoiseModeTag::PD}) {
    for (double p : {0.1, 0.3, 0.5, 0.7, 0.9}) {
      auto ap = adapt_protocol(mode_of(tag, p));
      for (int sym = 0; sym < 4; ++sym) {
        StateVector enc = encode_symbol(ap.p1, CodingSymbol{sym});
        auto ch = cycle(mode_of(tag, p), rng);
        StateVector noisy =
            apply_channel(ch, enc, same_effect_groups(tag, {"B", "B'"}), rng);
        noisy = apply_channel(ch, noisy, same_effect_groups(tag, {"A", "A'"}), rng);
        auto corr = bob_correct(ap.rule, noisy, correction_units(ap.p1, false), rng);
        CHECK(corr.discarded_units.empty());
        auto d = outcome_distribution(corr.state, ap.p1.coding_full, {"A", "B"});
        CHECK(d(sym) == doctest::Approx(1.0).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("independent grouping does discard damped rails") {
  Rng rng(8);
  auto ap = adapt_protocol(mode_of(NoiseModeTag::AD, 0.95));
  int discards = 0;
  for (int t = 0; t < 200; ++t) {
    StateVector enc =
        encode_symbol(ap.p1, CodingSymbol{static_cast<int>(rng.index(4))});
    RunChannel ch =
        begin_cycle(ChannelModel{mode_of(NoiseModeTag::AD, 0.95), false}, rng);
    StateVector noisy = apply_channel(ch, enc, {{"B", "B'"}}, rng);
    noisy = apply_channel(ch, noisy, {{"A", "A'"}}, rng);
    auto corr = bob_correct(ap.rule, noisy, correction_units(ap.p1, false), rng);
    discards += corr.discarded_units.empty() ? 0 : 1;
  }
  CHECK(discards > 0);
}

TEST_CASE("corrections are involutive") {
  const std::array<Eigen::Matrix2cd, 3> ops = {gates::z(), gates::x(), gates::xz()};
  Rng rng(9);
  for (const auto& op : ops) {
    const Unitary u{Eigen::MatrixXcd(op)};
    auto s = testutil::random_state(2, rng);
    auto twice = apply_unitary(apply_unitary(s, u, {"q0"}), u, {"q0"});
    CHECK(equal_up_to_global_phase(twice, s));
  }
}

TEST_CASE("block auxiliary flags X on the whole block") {
  // one |0> probe per block; reading |1> means every data qubit took an X
  Rng rng(10);
  NoiseMode pf = pauli_full({0.0, 0.0, 1.0, 0.0});
  auto ap = adapt_protocol(pf);
  const auto& cb = ap.p2;
  StateVector block =
      tensor(StateVector(encode_symbol(cb, CodingSymbol{2}).amplitudes(),
                         {"1.A", "1.B"}),
             StateVector(encode_symbol(cb, CodingSymbol{0}).amplitudes(),
                         {"2.A", "2.B"}));
  block = tensor(block, StateVector::ket("0", {"aux"}));
  auto ch = cycle(pf, rng);
  block = apply_channel(ch, block, {{"1.A", "1.B", "2.A", "2.B", "aux"}}, rng);
  std::vector<CorrectionUnit> units{
      {{"1.A", "1.B", "2.A", "2.B"}, std::nullopt, "aux", std::nullopt}};
  auto corr = bob_correct(ap.rule, block, units, rng);
  auto d1 = outcome_distribution(corr.state, cb.coding_full, {"1.A", "1.B"});
  auto d2 = outcome_distribution(corr.state, cb.coding_full, {"2.A", "2.B"});
  CHECK(d1(2) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(d2(0) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("correlated Z on a whole block is a global phase") {
  const Codebook cb = make_codebook(NoiseMode{}, Protocol::II);
  const Unitary uz{Eigen::MatrixXcd(gates::z())};
  for (int x = 0; x < 4; ++x) {
    for (int y = 0; y < 4; ++y) {
      StateVector block =
          tensor(StateVector(encode_symbol(cb, CodingSymbol{x}).amplitudes(),
                             {"1.A", "1.B"}),
                 StateVector(encode_symbol(cb, CodingSymbol{y}).amplitudes(),
                             {"2.A", "2.B"}));
      StateVector z = block;
      for (const auto& l : block.labels()) z = apply_unitary(z, uz, {l});
      CHECK(equal_up_to_global_phase(z, block));
    }
  }
}

TEST_CASE("unmodified states drift under rotation away from multiples of pi") {
  // sanity check that the substituted codebook is doing real work
  const Codebook plain = make_codebook(NoiseMode{});
  for (double theta : {0.3, 0.8, 1.4, 2.2, 2.9}) {
    const Unitary u{Eigen::MatrixXcd(gates::cr(theta))};
    double worst = 0.0;
    for (int sym = 0; sym < 4; ++sym) {
      auto moved =
          apply_unitary(apply_unitary(plain.symbols[sym], u, {"A"}), u, {"B"});
      auto d = outcome_distribution(moved, plain.coding_full, {"A", "B"});
      worst = std::max(worst, 1.0 - d(sym));
    }
    CHECK(worst > 1e-3);
  }
}
