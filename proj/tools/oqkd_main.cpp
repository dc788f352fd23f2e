#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "oqkd/report.hpp"

namespace {

int write_out(const std::string& path, const std::string& payload) {
  if (path.empty()) {
    std::cout << payload;
    return 0;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    std::cerr << "cannot open output path: " << path << "\n";
    return 2;
  }
  f << payload;
  return f.good() ? 0 : 2;
}

std::string render(const oqkd::Json& doc, const std::string& format,
                   const std::string& text_rendering) {
  if (format == "json") return doc.dump(2) + "\n";
  return text_rendering;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simulator for two orthogonal-state key distribution protocols"};
  app.require_subcommand(1);

  oqkd::ExperimentSpec spec;
  std::uint64_t seed_opt = 0;

  auto* run = app.add_subcommand("run", "execute seeded protocol trials");
  run->add_option("--protocol,-P", spec.protocol, "protocol (1 or 2)");
  run->add_option("--n,-n", spec.n, "key positions per run (2N states prepared)");
  run->add_option("--trials,-t", spec.trials, "independent trials");
  auto* seed_flag = run->add_option("--seed,-s", seed_opt, "master seed");
  run->add_option("--attack,-a", spec.attack, "attack descriptor");
  run->add_option("--noise", spec.noise, "noise descriptor");
  run->add_option("--grouping", spec.grouping, "correlated|independent");
  run->add_option("--checking-fraction", spec.checking_fraction,
                  "fraction of coding states checked");
  run->add_option("--decoy-ratio", spec.decoy_ratio,
                  "decoys per coding state (protocol 1)");
  run->add_option("--error-threshold", spec.error_threshold,
                  "acceptable error rate");
  run->add_option("--out,-o", spec.out_path, "output path (default stdout)");
  run->add_option("--format,-f", spec.format, "json|csv|text");

  std::string table_out, table_format = "text";
  auto* at = app.add_subcommand("attack-table",
                                "oracle vs reference block-attack constants");
  at->add_option("--out,-o", table_out, "output path");
  at->add_option("--format,-f", table_format, "json|text");

  auto* et = app.add_subcommand("efficiency-table",
                                "per-key-bit resource comparison rows");
  et->add_option("--out,-o", table_out, "output path");
  et->add_option("--format,-f", table_format, "json|text");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      if (seed_flag->count() > 0) {
        spec.seed = seed_opt;
        spec.seed_set = true;
      }
      const oqkd::Json doc = oqkd::run_experiment(spec);
      if (spec.format == "json") return write_out(spec.out_path, doc.dump(2) + "\n");
      if (spec.format == "csv") return write_out(spec.out_path, oqkd::report_csv(doc));
      return write_out(spec.out_path, oqkd::report_text(doc));
    }
    if (at->parsed()) {
      if (table_format != "json" && table_format != "text")
        throw std::invalid_argument("format must be json or text");
      return write_out(table_out, render(oqkd::attack_table_doc(), table_format,
                                         oqkd::attack_table_text()));
    }
    if (et->parsed()) {
      if (table_format != "json" && table_format != "text")
        throw std::invalid_argument("format must be json or text");
      return write_out(table_out, render(oqkd::efficiency_table_doc(), table_format,
                                         oqkd::efficiency_table_text()));
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "fault: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
