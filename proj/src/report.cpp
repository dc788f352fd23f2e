#include "oqkd/report.hpp"

#include <cinttypes>
#include <cstdio>
#include <random>
#include <sstream>

#include "oqkd/analysis.hpp"

namespace oqkd {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto at = s.find(sep, start);
    parts.push_back(s.substr(start, at - start));
    if (at == std::string::npos) break;
    start = at + 1;
  }
  return parts;
}

double parse_double(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(what);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string("bad value for ") + what + ": " + s);
  }
}

Json rational_json(const Rational& r) {
  return Json{{"num", r.num}, {"den", r.den}, {"value", r.value()}};
}

Json rate_json(const RateSummary& s) {
  return Json{{"mean", s.mean},
              {"std_error", s.std_error},
              {"ci95_half", s.ci95_half},
              {"count", s.count}};
}

}  // namespace

NoiseMode parse_noise(const std::string& descriptor) {
  const auto parts = split(descriptor, ':');
  NoiseMode m;
  const std::string& kind = parts[0];
  if (kind == "none") {
    if (parts.size() > 1) throw std::invalid_argument("noise none takes no parameter");
    return m;
  }
  if (kind == "cd") {
    m.tag = NoiseModeTag::CD;
    m.phi = parts.size() > 1 ? parse_double(parts[1], "cd phase") : 0.7;
    return m;
  }
  if (kind == "cr") {
    m.tag = NoiseModeTag::CR;
    if (parts.size() > 1 && parts[1] != "random")
      m.theta = parse_double(parts[1], "cr angle");
    return m;
  }
  auto one = [&](NoiseModeTag tag) {
    m.tag = tag;
    m.p = parts.size() > 1 ? parse_double(parts[1], "identity probability") : 0.5;
    return m;
  };
  if (kind == "pauli-z") return one(NoiseModeTag::PauliZ);
  if (kind == "pauli-x") return one(NoiseModeTag::PauliX);
  if (kind == "pauli-zx") return one(NoiseModeTag::PauliZX);
  if (kind == "pauli-full") {
    m.tag = NoiseModeTag::PauliFull;
    if (parts.size() < 2)
      throw std::invalid_argument("pauli-full wants pI,pZ,pX,pZX");
    const auto ps = split(parts[1], ',');
    if (ps.size() != 4) throw std::invalid_argument("pauli-full wants four probabilities");
    for (int i = 0; i < 4; ++i) m.pauli_probs[i] = parse_double(ps[i], "Pauli probability");
    return m;
  }
  if (kind == "pd") {
    m.tag = NoiseModeTag::PD;
    m.p = parts.size() > 1 ? parse_double(parts[1], "damping probability") : 0.3;
    return m;
  }
  if (kind == "ad") {
    m.tag = NoiseModeTag::AD;
    m.p = parts.size() > 1 ? parse_double(parts[1], "damping probability") : 0.3;
    return m;
  }
  throw std::invalid_argument("unknown noise mode: " + descriptor);
}

void ExperimentSpec::validate() const {
  if (protocol != 1 && protocol != 2)
    throw std::invalid_argument("protocol must be 1 or 2");
  if (trials < 1) throw std::invalid_argument("trials must be at least 1");
  if (format != "json" && format != "csv" && format != "text")
    throw std::invalid_argument("format must be json, csv or text");
  if (grouping != "correlated" && grouping != "independent")
    throw std::invalid_argument("grouping must be correlated or independent");
  to_config();        // validates n, fractions, threshold, noise
  make_attack(attack);  // validates the attack descriptor
}

ProtocolConfig ExperimentSpec::to_config() const {
  ProtocolConfig cfg;
  cfg.protocol = protocol == 1 ? Protocol::I : Protocol::II;
  cfg.n = n;
  cfg.noise = parse_noise(noise);
  cfg.checking_fraction = checking_fraction;
  cfg.decoy_ratio = decoy_ratio;
  cfg.error_threshold = error_threshold;
  cfg.correlated_grouping = grouping == "correlated";
  cfg.seed = seed;
  cfg.validate();
  return cfg;
}

Json ExperimentSpec::to_json() const {
  return Json{{"protocol", protocol},
              {"n", n},
              {"trials", trials},
              {"seed", seed},
              {"attack", attack},
              {"noise", noise},
              {"grouping", grouping},
              {"checking_fraction", checking_fraction},
              {"decoy_ratio", decoy_ratio},
              {"error_threshold", error_threshold}};
}

ExperimentSpec ExperimentSpec::from_json(const Json& j) {
  ExperimentSpec s;
  s.protocol = j.at("protocol").get<int>();
  s.n = j.at("n").get<int>();
  s.trials = j.at("trials").get<int>();
  s.seed = j.at("seed").get<std::uint64_t>();
  s.seed_set = true;
  s.attack = j.at("attack").get<std::string>();
  s.noise = j.at("noise").get<std::string>();
  s.grouping = j.at("grouping").get<std::string>();
  s.checking_fraction = j.at("checking_fraction").get<double>();
  s.decoy_ratio = j.at("decoy_ratio").get<double>();
  s.error_threshold = j.at("error_threshold").get<double>();
  return s;
}

Json run_experiment(ExperimentSpec& spec) {
  if (!spec.seed_set) {
    std::random_device rd;
    spec.seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    spec.seed_set = true;
  }
  spec.validate();
  const ProtocolConfig cfg = spec.to_config();

  Json doc;
  doc["spec"] = spec.to_json();
  Json trials = Json::array();
  std::vector<RunReport> reports;
  reports.reserve(spec.trials);
  for (int t = 0; t < spec.trials; ++t) {
    Rng rng = Rng::for_trial(spec.seed, static_cast<std::uint64_t>(t));
    auto strategy = make_attack(spec.attack);
    auto [rep, tr] = run_protocol(cfg, *strategy, rng);
    trials.push_back(Json{{"trial", t},
                          {"checking_error_rate", rep.checking_error_rate},
                          {"checking_errors", rep.checking_errors},
                          {"checking_checked", rep.checking_checked},
                          {"decoy_error_rate", rep.decoy_error_rate},
                          {"decoy_errors", rep.decoy_errors},
                          {"decoy_checked", rep.decoy_checked},
                          {"discarded", rep.discarded},
                          {"aborted", rep.aborted},
                          {"key_length", rep.key_bits.size()}});
    reports.push_back(std::move(rep));
  }
  doc["trials"] = std::move(trials);

  const AggregateSummary agg = aggregate(reports);
  doc["aggregate"] = Json{{"checking", rate_json(agg.checking)},
                          {"decoy", rate_json(agg.decoy)},
                          {"aborts", agg.aborts},
                          {"checking_errors", agg.checking_errors},
                          {"checking_checked", agg.checking_checked},
                          {"decoy_errors", agg.decoy_errors},
                          {"decoy_checked", agg.decoy_checked},
                          {"discarded", agg.discarded},
                          {"runs", agg.runs}};
  const auto& l = reports.front().ledger;
  doc["ledger"] = Json{{"qubits", l.qubits},
                       {"classical_bits", l.classical_bits},
                       {"admin_bits", l.admin_bits},
                       {"key_bits", l.key_bits}};
  doc["efficiency"] = rational_json(reports.front().efficiency);
  return doc;
}

Json attack_table_doc() {
  const AttackTable t = attack_constant_table();
  Json rows = Json::array();
  for (const auto& r : t.rows)
    rows.push_back(Json{{"case", r.name},
                        {"oracle_first_state", r.oracle_first},
                        {"oracle_second_state", r.oracle_second},
                        {"reference", rational_json(r.reference)},
                        {"match", r.match}});
  rows.push_back(Json{{"case", "wrong-guess average"},
                      {"oracle_first_state", t.oracle_average},
                      {"reference", rational_json(t.reference_average)},
                      {"reference_itemized_sum", rational_json(t.reference_itemized)},
                      {"match", t.average_matches}});
  rows.push_back(Json{{"case", "whole rate"},
                      {"oracle_first_state", t.oracle_whole},
                      {"reference", rational_json(t.reference_whole)},
                      {"match", std::abs(t.oracle_whole - t.reference_whole.value()) <= 1e-9}});
  return Json{{"rows", rows}, {"note", t.note}};
}

Json efficiency_table_doc() {
  Json rows = Json::array();
  for (const auto& r : reference_table())
    rows.push_back(Json{{"name", r.name},
                        {"qubits_per_key_bit", rational_json(r.qubits_per_key_bit)},
                        {"classical_per_key_bit", rational_json(r.classical_per_key_bit)},
                        {"efficiency", rational_json(r.efficiency)}});
  // noise-hardened variants; qubit columns are the published counts
  rows.push_back(Json{{"name", "protocol-1 (cd)"},
                      {"qubits_per_key_bit", rational_json({5, 2})},
                      {"classical_per_key_bit", rational_json({13, 4})},
                      {"efficiency", rational_json({4, 23})}});
  rows.push_back(Json{{"name", "protocol-2 (cd)"},
                      {"qubits_per_key_bit", rational_json({2, 1})},
                      {"classical_per_key_bit", rational_json({5, 2})},
                      {"efficiency", rational_json({2, 9})}});
  rows.push_back(Json{{"name", "protocol-1 (cr)"},
                      {"qubits_per_key_bit", rational_json({5, 1})},
                      {"classical_per_key_bit", rational_json({11, 2})},
                      {"efficiency", rational_json({2, 21})}});
  rows.push_back(Json{{"name", "protocol-2 (cr)"},
                      {"qubits_per_key_bit", rational_json({4, 1})},
                      {"classical_per_key_bit", rational_json({4, 1})},
                      {"efficiency", rational_json({1, 8})}});
  return Json{{"rows", rows}};
}

std::string report_csv(const Json& report) {
  std::ostringstream out;
  out << "trial,checking_error_rate,checking_errors,checking_checked,"
         "decoy_error_rate,decoy_errors,decoy_checked,discarded,aborted,key_length\n";
  for (const auto& t : report.at("trials")) {
    out << t.at("trial").get<int>() << ',' << t.at("checking_error_rate").get<double>()
        << ',' << t.at("checking_errors").get<int>() << ','
        << t.at("checking_checked").get<int>() << ','
        << t.at("decoy_error_rate").get<double>() << ','
        << t.at("decoy_errors").get<int>() << ',' << t.at("decoy_checked").get<int>()
        << ',' << t.at("discarded").get<int>() << ','
        << (t.at("aborted").get<bool>() ? 1 : 0) << ','
        << t.at("key_length").get<std::size_t>() << '\n';
  }
  return out.str();
}

std::string report_text(const Json& report) {
  std::ostringstream out;
  const auto& spec = report.at("spec");
  out << "protocol " << spec.at("protocol").get<int>() << "  n=" << spec.at("n").get<int>()
      << "  trials=" << spec.at("trials").get<int>() << "  seed=" << spec.at("seed").get<std::uint64_t>()
      << "\nattack=" << spec.at("attack").get<std::string>()
      << "  noise=" << spec.at("noise").get<std::string>()
      << "  grouping=" << spec.at("grouping").get<std::string>() << "\n";
  const auto& agg = report.at("aggregate");
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "checking error: %.6f +/- %.6f   decoy error: %.6f +/- %.6f\n",
                agg.at("checking").at("mean").get<double>(),
                agg.at("checking").at("ci95_half").get<double>(),
                agg.at("decoy").at("mean").get<double>(),
                agg.at("decoy").at("ci95_half").get<double>());
  out << buf;
  out << "aborts: " << agg.at("aborts").get<int>() << "/" << agg.at("runs").get<int>()
      << "   discarded states: " << agg.at("discarded").get<std::int64_t>() << "\n";
  const auto& led = report.at("ledger");
  out << "ledger: " << led.at("qubits").get<std::int64_t>() << " qubits, "
      << led.at("classical_bits").get<std::int64_t>() << " classical bits ("
      << led.at("admin_bits").get<std::int64_t>() << " administrative), "
      << led.at("key_bits").get<std::int64_t>() << " key bits\n";
  const auto& eff = report.at("efficiency");
  out << "efficiency: " << eff.at("num").get<std::int64_t>() << "/"
      << eff.at("den").get<std::int64_t>() << " = " << eff.at("value").get<double>()
      << "\n";
  return out.str();
}

std::string attack_table_text() {
  const Json doc = attack_table_doc();
  std::ostringstream out;
  char buf[200];
  std::snprintf(buf, sizeof buf, "%-22s %14s %14s %12s %6s\n", "case",
                "oracle(1st)", "oracle(2nd)", "reference", "match");
  out << buf;
  for (const auto& r : doc.at("rows")) {
    const std::string name = r.at("case").get<std::string>();
    const double first = r.at("oracle_first_state").get<double>();
    const double second =
        r.contains("oracle_second_state") ? r.at("oracle_second_state").get<double>() : -1.0;
    const auto& ref = r.at("reference");
    std::snprintf(buf, sizeof buf, "%-22s %14.9f %14s %7" PRId64 "/%-4" PRId64 " %6s\n",
                  name.c_str(), first,
                  second >= 0.0 ? std::to_string(second).c_str() : "-",
                  ref.at("num").get<std::int64_t>(), ref.at("den").get<std::int64_t>(),
                  r.at("match").get<bool>() ? "yes" : "NO");
    out << buf;
  }
  out << "note: " << doc.at("note").get<std::string>() << "\n";
  return out.str();
}

std::string efficiency_table_text() {
  const Json doc = efficiency_table_doc();
  std::ostringstream out;
  char buf[200];
  std::snprintf(buf, sizeof buf, "%-18s %12s %12s %14s\n", "protocol",
                "qubits/bit", "cbits/bit", "efficiency");
  out << buf;
  for (const auto& r : doc.at("rows")) {
    auto cell = [](const Json& v) {
      std::ostringstream c;
      c << v.at("num").get<std::int64_t>() << "/" << v.at("den").get<std::int64_t>();
      return c.str();
    };
    std::snprintf(buf, sizeof buf, "%-18s %12s %12s %8s = %.6f\n",
                  r.at("name").get<std::string>().c_str(),
                  cell(r.at("qubits_per_key_bit")).c_str(),
                  cell(r.at("classical_per_key_bit")).c_str(),
                  cell(r.at("efficiency")).c_str(),
                  r.at("efficiency").at("value").get<double>());
    out << buf;
  }
  return out.str();
}

}  // namespace oqkd
