#include "pwcert/commands.hpp"

#include <fstream>

#include <fmt/format.h>

#include "pwcert/error.hpp"

namespace pwcert {

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(fmt::format("cannot write '{}'", path.string()));
  out << text;
  if (!out) throw Error(fmt::format("error writing '{}'", path.string()));
}

template <class F>
int guarded(std::ostream& log, F body) {
  try {
    return body();
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
}

}  // namespace

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return exit_config_error;
  if (dynamic_cast<const NonConvergence*>(&e)) return exit_non_convergence;
  if (dynamic_cast<const MissingReference*>(&e)) return exit_missing_reference;
  return exit_failure;
}

ScfHistory run_bounds(const RunConfig& config, const Problem& problem) {
  return run_scf(problem.model, problem.disc, config.scf,
                 bound_hook(problem.model, problem.disc, config.certify_options()));
}

SweepRow sweep_row(double ecut, const ScfHistory& history, double reference_energy) {
  SweepRow row;
  row.ecut = ecut;
  row.iterations = static_cast<int>(history.records.size());
  row.converged = history.converged;
  if (!history.records.empty()) {
    const auto& last = history.records.back();
    row.energy = last.energy;
    row.true_error = last.energy - reference_energy;
    row.bounds = last.bounds;
  }
  return row;
}

int cmd_reference(const RunConfig& config, std::ostream& log) {
  return guarded(log, [&] {
    const Problem problem = build_problem(config);
    bool hit = false;
    const ReferenceSolution ref = ensure_reference(config, problem, &hit);
    log << fmt::format("{} {}\n", hit ? "cached" : "computed", reference_path(ref.digest).string());
    log << fmt::format("E_ref = {:.17g} ({} iterations, residual {:.3g})\n", ref.energy,
                       ref.iterations, ref.final_residual);
    return static_cast<int>(exit_ok);
  });
}

int cmd_bounds(const RunConfig& config, std::ostream& log) {
  return guarded(log, [&] {
    const Problem problem = build_problem(config);
    const ReferenceSolution ref = load_reference(config);
    const ScfHistory history = run_bounds(config, problem);
    const std::filesystem::path dir = config.output.directory;
    write_text(dir / config.output.trace,
               trace_csv(history, config.estimators, ref.energy, utc_timestamp()));
    const SummaryInfo info{ref.digest, config.ecut, config.ecut_ref, ref.energy, config.estimators};
    write_text(dir / config.output.summary, summary_json(history, info));
    for (const auto& w : history.warnings) log << "warning: " << w << "\n";
    log << fmt::format("{} iterations, wrote {} and {}\n", history.records.size(),
                       (dir / config.output.trace).string(), (dir / config.output.summary).string());
    if (!history.converged) {
      log << fmt::format("error: SCF did not converge (residual {:.3g})\n", history.final_residual);
      return static_cast<int>(exit_non_convergence);
    }
    return static_cast<int>(exit_ok);
  });
}

int cmd_sweep(const RunConfig& config, const std::vector<double>& ecuts, std::ostream& log) {
  return guarded(log, [&] {
    std::vector<double> list = ecuts.empty() ? std::vector<double>{config.ecut} : ecuts;
    for (double e : list) {
      RunConfig c = config;
      c.ecut = e;
      c.validate();
    }
    const Problem base = build_problem(config);
    const ReferenceSolution ref = load_reference(config);
    std::vector<SweepRow> rows;
    bool all_converged = true;
    for (double e : list) {
      RunConfig c = config;
      c.ecut = e;
      const ScfHistory history = run_bounds(c, with_cutoff(base, e));
      rows.push_back(sweep_row(e, history, ref.energy));
      all_converged = all_converged && history.converged;
      log << fmt::format("ecut {:g}: {} iterations{}\n", e, history.records.size(),
                         history.converged ? "" : " (not converged)");
    }
    const auto path = std::filesystem::path(config.output.directory) / config.output.sweep;
    write_text(path, sweep_csv(rows, config.estimators, utc_timestamp()));
    log << "wrote " << path.string() << "\n";
    return static_cast<int>(all_converged ? exit_ok : exit_non_convergence);
  });
}

int cmd_gen_potential(const RunConfig& config, const std::filesystem::path& out, std::ostream& log) {
  return guarded(log, [&] {
    const Problem problem = build_problem(config);
    const PeriodicField& v = problem.model.external.field;
    const auto& basis = *v.basis();
    std::string csv = "n1,n2,n3,g_norm,re,im\n";
    for (std::size_t i = 0; i < basis.size(); ++i) {
      const Miller& n = basis.miller()[i];
      const auto c = v.coefficients()[static_cast<Eigen::Index>(i)];
      csv += fmt::format("{},{},{},{:.17g},{:.17g},{:.17g}\n", n[0], n[1], n[2],
                         basis.lattice().cartesian(n).norm(), c.real(), c.imag());
    }
    if (out.empty()) {
      log << csv;
    } else {
      write_text(out, csv);
      log << fmt::format("wrote {} coefficients to {}\n", basis.size(), out.string());
    }
    return static_cast<int>(exit_ok);
  });
}

}  // namespace pwcert
