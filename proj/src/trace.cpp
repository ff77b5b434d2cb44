#include "pwcert/trace.hpp"

#include <chrono>
#include <ctime>

#include <fmt/format.h>

#include "json.hpp"

namespace pwcert {

namespace {

std::string num(double x) { return fmt::format("{:.17g}", x); }

std::string num(const std::optional<double>& x) { return x ? num(*x) : std::string(); }

std::string join(const std::vector<std::string>& cells) {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    line += cells[i];
  }
  return line + "\n";
}

const VariantBound* bound_of(const std::optional<BoundReport>& report, Variant v) {
  if (!report) return nullptr;
  const VariantBound* b = report->find(v);
  return b && b->available ? b : nullptr;
}

nlohmann::json opt_json(const std::optional<double>& x) {
  return x ? nlohmann::json(*x) : nlohmann::json(nullptr);
}

}  // namespace

std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::vector<std::string> trace_columns(const std::vector<Variant>& variants) {
  std::vector<std::string> cols{"m", "energy", "true_error", "err_scf"};
  for (const char* prefix : {"err_disc_", "shift_", "opnorm_", "guaranteed_"}) {
    for (Variant v : variants) cols.push_back(prefix + to_string(v));
  }
  return cols;
}

std::string trace_csv(const ScfHistory& history, const std::vector<Variant>& variants,
                      double reference_energy, const std::string& timestamp) {
  std::string out = fmt::format("# pwcert trace schema {} generated {}\n", kTraceSchemaVersion, timestamp);
  out += join(trace_columns(variants));
  for (const auto& rec : history.records) {
    std::vector<std::string> cells{std::to_string(rec.m), num(rec.energy),
                                   num(rec.energy - reference_energy),
                                   rec.bounds ? num(rec.bounds->err_scf) : std::string()};
    for (Variant v : variants) {
      const auto* b = bound_of(rec.bounds, v);
      cells.push_back(b ? num(b->err_disc) : std::string());
    }
    for (Variant v : variants) {
      const auto* b = bound_of(rec.bounds, v);
      cells.push_back(b ? num(b->shift) : std::string());
    }
    for (Variant v : variants) {
      const auto* b = bound_of(rec.bounds, v);
      cells.push_back(b ? num(b->opnorm) : std::string());
    }
    for (Variant v : variants) {
      const auto* b = bound_of(rec.bounds, v);
      cells.push_back(b ? (b->guaranteed ? "1" : "0") : std::string());
    }
    out += join(cells);
  }
  return out;
}

std::optional<int> crossover_iteration(const ScfHistory& history, Variant variant) {
  for (const auto& rec : history.records) {
    const auto* b = bound_of(rec.bounds, variant);
    if (b && b->err_disc > rec.bounds->err_scf) return rec.m;
  }
  return std::nullopt;
}

std::optional<double> bound_ratio(const ScfRecord& record, Variant variant, double reference_energy) {
  const auto* b = bound_of(record.bounds, variant);
  const double err = record.energy - reference_energy;
  if (!b || !(err > 0.0)) return std::nullopt;
  return (b->err_disc + b->err_scf) / err;
}

std::string summary_json(const ScfHistory& history, const SummaryInfo& info) {
  using nlohmann::json;
  json j;
  j["format"] = "pwcert-summary";
  j["version"] = kTraceSchemaVersion;
  j["digest"] = info.digest;
  j["ecut"] = info.ecut;
  j["ecut_ref"] = info.ecut_ref;
  j["reference_energy"] = info.reference_energy;
  j["converged"] = history.converged;
  j["iterations"] = history.records.size();
  j["final_residual"] = history.final_residual;
  j["warnings"] = history.warnings;

  json variants = json::object();
  if (!history.records.empty()) {
    const ScfRecord& last = history.records.back();
    j["final"] = {{"m", last.m},
                  {"energy", last.energy},
                  {"true_error", last.energy - info.reference_energy},
                  {"err_scf", last.bounds ? json(last.bounds->err_scf) : json(nullptr)}};
    for (Variant v : info.variants) {
      json entry;
      const VariantBound* b = last.bounds ? last.bounds->find(v) : nullptr;
      entry["available"] = b && b->available;
      if (b && !b->note.empty()) entry["note"] = b->note;
      if (b && b->available) {
        entry["err_disc"] = b->err_disc;
        entry["bound"] = b->err_disc + b->err_scf;
        entry["shift"] = b->shift;
        entry["opnorm"] = opt_json(b->opnorm);
        entry["guaranteed"] = b->guaranteed;
      }
      entry["ratio"] = opt_json(bound_ratio(last, v, info.reference_energy));
      json history_ratios = json::array();
      for (const auto& rec : history.records) {
        history_ratios.push_back(opt_json(bound_ratio(rec, v, info.reference_energy)));
      }
      entry["ratio_history"] = history_ratios;
      variants[to_string(v)] = entry;
    }
  }
  j["variants"] = variants;

  std::optional<Variant> judge;
  for (Variant v : info.variants) {
    if (v == Variant::eta0) judge = v;
  }
  if (!judge && !info.variants.empty()) judge = info.variants.front();
  if (judge) {
    j["crossover_variant"] = to_string(*judge);
    const auto m = crossover_iteration(history, *judge);
    j["crossover_iteration"] = m ? json(*m) : json(nullptr);
  }
  return j.dump(2) + "\n";
}

std::string sweep_csv(const std::vector<SweepRow>& rows, const std::vector<Variant>& variants,
                      const std::string& timestamp) {
  std::string out = fmt::format("# pwcert sweep schema {} generated {}\n", kTraceSchemaVersion, timestamp);
  std::vector<std::string> cols{"ecut", "iterations", "converged", "energy", "true_error", "err_scf"};
  for (Variant v : variants) cols.push_back("err_disc_" + to_string(v));
  for (Variant v : variants) cols.push_back("guaranteed_" + to_string(v));
  out += join(cols);
  for (const auto& row : rows) {
    std::vector<std::string> cells{num(row.ecut), std::to_string(row.iterations),
                                   row.converged ? "1" : "0", num(row.energy), num(row.true_error),
                                   row.bounds ? num(row.bounds->err_scf) : std::string()};
    for (Variant v : variants) {
      const auto* b = bound_of(row.bounds, v);
      cells.push_back(b ? num(b->err_disc) : std::string());
    }
    for (Variant v : variants) {
      const auto* b = bound_of(row.bounds, v);
      cells.push_back(b ? (b->guaranteed ? "1" : "0") : std::string());
    }
    out += join(cells);
  }
  return out;
}

}  // namespace pwcert
