#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pwcert/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Certified planewave reduced Hartree-Fock energies"};
  app.require_subcommand(1);

  std::string config_path;
  auto* reference = app.add_subcommand("reference", "compute or reuse the reference solution");
  reference->add_option("config", config_path, "run configuration (JSON)")->required();

  auto* bounds = app.add_subcommand("bounds", "bounded SCF run, writes the trace and summary");
  bounds->add_option("config", config_path, "run configuration (JSON)")->required();

  std::vector<double> ecuts;
  auto* sweep = app.add_subcommand("sweep", "bounded runs over several cutoffs");
  sweep->add_option("config", config_path, "run configuration (JSON)")->required();
  sweep->add_option("--ecut", ecuts, "computational cutoffs (Ha)")->expected(1, -1);

  std::string potential_out;
  auto* gen = app.add_subcommand("gen-potential", "print the external potential's coefficients");
  gen->add_option("config", config_path, "run configuration (JSON)")->required();
  gen->add_option("-o,--output", potential_out, "CSV file (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : pwcert::exit_config_error;
  }

  pwcert::RunConfig config;
  try {
    config = pwcert::load_config(config_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return pwcert::exit_code_for(e);
  }

  if (reference->parsed()) return pwcert::cmd_reference(config, std::cerr);
  if (bounds->parsed()) return pwcert::cmd_bounds(config, std::cerr);
  if (sweep->parsed()) return pwcert::cmd_sweep(config, ecuts, std::cerr);
  if (potential_out.empty()) return pwcert::cmd_gen_potential(config, {}, std::cout);
  return pwcert::cmd_gen_potential(config, potential_out, std::cerr);
}
