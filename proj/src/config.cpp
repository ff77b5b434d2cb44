#include "pwcert/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "json.hpp"
#include "pwcert/error.hpp"

namespace pwcert {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  const std::set<std::string> known(keys.begin(), keys.end());
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw ConfigError(fmt::format("unknown key '{}' in {}", key, where));
  }
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("{}.{}: {}", where, key, e.what()));
  }
}

// Conversions from names raise InvalidArgument; surface them as config errors.
template <class F>
auto named(const json& j, const char* key, const std::string& where, F convert)
    -> decltype(convert(std::string{})) {
  std::string name;
  read(j, key, name, where);
  try {
    return convert(name);
  } catch (const Error& e) {
    throw ConfigError(fmt::format("{}.{}: {}", where, key, e.what()));
  }
}

json potential_json(const PotentialDescriptor& p) {
  return {{"kind", to_string(p.kind)},   {"value", p.value},
          {"amplitude", p.amplitude},    {"mode", p.mode},
          {"seed", p.seed},              {"decay", p.decay},
          {"mode_cutoff", p.mode_cutoff}};
}

json model_json(const RunConfig& c) {
  json vectors = json::array();
  for (int i = 0; i < c.dimension; ++i) {
    json row = json::array();
    for (int j = 0; j < c.dimension; ++j) row.push_back(c.cell[i][j]);
    vectors.push_back(row);
  }
  return {{"lattice", {{"dimension", c.dimension}, {"vectors", vectors}}},
          {"n_el", c.n_el},
          {"potential", potential_json(c.potential)},
          {"functional", {{"kind", to_string(c.functional.kind)}, {"c_alpha", c.functional.c_alpha}}}};
}

json kgrid_json(const RunConfig& c) {
  return json(std::vector<int>(c.kgrid.begin(), c.kgrid.begin() + c.dimension));
}

json scf_json(const ScfConfig& s) {
  return {{"density_tol", s.density_tol}, {"max_iter", s.max_iter},
          {"mixing", to_string(s.mixing)}, {"beta", s.beta},
          {"anderson_depth", s.anderson_depth}, {"guess", to_string(s.guess)},
          {"guess_seed", s.guess_seed},   {"gap_tol", s.gap_tol}};
}

json to_json(const RunConfig& c) {
  json variants = json::array();
  for (Variant v : c.estimators) variants.push_back(to_string(v));
  return {{"model", model_json(c)},
          {"discretization", {{"ecut", c.ecut}, {"ecut_ref", c.ecut_ref}, {"kgrid", kgrid_json(c)}}},
          {"scf", scf_json(c.scf)},
          {"estimators",
           {{"variants", variants},
            {"q_target", c.q_target},
            {"opnorm_use_next_eigenvalue", c.opnorm_use_next_eigenvalue}}},
          {"output",
           {{"directory", c.output.directory},
            {"trace", c.output.trace},
            {"summary", c.output.summary},
            {"sweep", c.output.sweep}}}};
}

void parse_model(const json& m, RunConfig& c) {
  reject_unknown(m, "model", {"lattice", "n_el", "potential", "functional"});
  if (!m.contains("lattice")) throw ConfigError("model.lattice is required");
  const json& lat = m.at("lattice");
  reject_unknown(lat, "model.lattice", {"dimension", "vectors"});
  read(lat, "dimension", c.dimension, "model.lattice");
  if (c.dimension < 1 || c.dimension > 3) throw ConfigError("model.lattice.dimension must be 1, 2 or 3");
  std::vector<std::vector<double>> vectors;
  read(lat, "vectors", vectors, "model.lattice");
  if (vectors.size() != static_cast<std::size_t>(c.dimension)) {
    throw ConfigError("model.lattice.vectors needs one row per dimension");
  }
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) c.cell[i][j] = i == j ? 1.0 : 0.0;
  }
  for (int i = 0; i < c.dimension; ++i) {
    if (vectors[i].size() != static_cast<std::size_t>(c.dimension)) {
      throw ConfigError("model.lattice.vectors rows need `dimension` entries");
    }
    for (int j = 0; j < c.dimension; ++j) c.cell[i][j] = vectors[i][j];
  }

  read(m, "n_el", c.n_el, "model");

  if (m.contains("potential")) {
    const json& p = m.at("potential");
    reject_unknown(p, "model.potential",
                   {"kind", "value", "amplitude", "mode", "seed", "decay", "mode_cutoff"});
    auto& d = c.potential;
    d = PotentialDescriptor{};
    if (p.contains("kind")) d.kind = named(p, "kind", "model.potential", potential_kind_from_string);
    read(p, "value", d.value, "model.potential");
    read(p, "amplitude", d.amplitude, "model.potential");
    read(p, "mode", d.mode, "model.potential");
    read(p, "seed", d.seed, "model.potential");
    read(p, "decay", d.decay, "model.potential");
    read(p, "mode_cutoff", d.mode_cutoff, "model.potential");
  }

  if (m.contains("functional")) {
    const json& f = m.at("functional");
    reject_unknown(f, "model.functional", {"kind", "c_alpha"});
    const auto kind = named(f, "kind", "model.functional", functional_kind_from_string);
    c.functional = kind == Functional::Kind::rhf_xalpha ? Functional::xalpha()
                   : kind == Functional::Kind::linear   ? Functional::linear()
                                                        : Functional::rhf();
    read(f, "c_alpha", c.functional.c_alpha, "model.functional");
  }
}

void parse_scf(const json& s, ScfConfig& cfg) {
  reject_unknown(s, "scf",
                 {"density_tol", "max_iter", "mixing", "beta", "anderson_depth", "guess",
                  "guess_seed", "gap_tol"});
  read(s, "density_tol", cfg.density_tol, "scf");
  read(s, "max_iter", cfg.max_iter, "scf");
  if (s.contains("mixing")) cfg.mixing = named(s, "mixing", "scf", mixing_from_string);
  read(s, "beta", cfg.beta, "scf");
  read(s, "anderson_depth", cfg.anderson_depth, "scf");
  if (s.contains("guess")) cfg.guess = named(s, "guess", "scf", guess_from_string);
  read(s, "guess_seed", cfg.guess_seed, "scf");
  read(s, "gap_tol", cfg.gap_tol, "scf");
}

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 computation failed");
  }
  std::string out;
  for (unsigned int i = 0; i < len; ++i) out += fmt::format("{:02x}", md[i]);
  return out;
}

}  // namespace

void RunConfig::validate() const {
  if (dimension < 1 || dimension > 3) throw ConfigError("dimension must be 1, 2 or 3");
  if (n_el < 1) throw ConfigError("n_el must be positive");
  if (!(ecut > 0.0)) throw ConfigError("ecut must be positive");
  if (!(ecut < ecut_ref)) throw ConfigError("ecut must be below ecut_ref");
  for (int j = 0; j < 3; ++j) {
    if (kgrid[j] < 1) throw ConfigError("k-grid sizes must be positive");
    if (j >= dimension && kgrid[j] != 1) throw ConfigError("k-grid is finer than the lattice dimension");
  }
  if (potential.kind == PotentialDescriptor::Kind::random1d && dimension != 1) {
    throw ConfigError("random1d potential needs a one-dimensional lattice");
  }
  if (functional.kind == Functional::Kind::rhf_xalpha && !(functional.c_alpha >= 0.0)) {
    throw ConfigError("c_alpha must be nonnegative");
  }
  if (estimators.empty()) throw ConfigError("select at least one estimator");
  if (!(q_target > 0.0 && q_target < 1.0)) throw ConfigError("q_target must lie in (0, 1)");
  try {
    scf.validate();
    (void)lattice();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

Lattice RunConfig::lattice() const {
  Eigen::Matrix3d v;
  // Rows of `cell` are the cell vectors; the lattice stores them as columns.
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) v(j, i) = cell[i][j];
  }
  return Lattice(dimension, v);
}

KGrid RunConfig::kpoint_grid() const { return KGrid::uniform(lattice(), kgrid); }

CertifyOptions RunConfig::certify_options() const {
  CertifyOptions o;
  o.variants = estimators;
  o.gap_tol = scf.gap_tol;
  o.q_target = q_target;
  o.opnorm_use_next_eigenvalue = opnorm_use_next_eigenvalue;
  return o;
}

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("config is not valid JSON: {}", e.what()));
  }
  reject_unknown(j, "config", {"model", "discretization", "scf", "estimators", "output"});

  RunConfig c;
  if (!j.contains("model")) throw ConfigError("model section is required");
  parse_model(j.at("model"), c);

  if (j.contains("discretization")) {
    const json& d = j.at("discretization");
    reject_unknown(d, "discretization", {"ecut", "ecut_ref", "kgrid"});
    read(d, "ecut", c.ecut, "discretization");
    read(d, "ecut_ref", c.ecut_ref, "discretization");
    if (d.contains("kgrid")) {
      std::vector<int> sizes;
      read(d, "kgrid", sizes, "discretization");
      if (sizes.empty() || sizes.size() > 3) throw ConfigError("discretization.kgrid needs 1 to 3 sizes");
      c.kgrid = {1, 1, 1};
      for (std::size_t i = 0; i < sizes.size(); ++i) c.kgrid[i] = sizes[i];
    }
  }

  if (j.contains("scf")) parse_scf(j.at("scf"), c.scf);

  if (j.contains("estimators")) {
    const json& e = j.at("estimators");
    reject_unknown(e, "estimators", {"variants", "q_target", "opnorm_use_next_eigenvalue"});
    if (e.contains("variants")) {
      std::vector<std::string> names;
      read(e, "variants", names, "estimators");
      c.estimators.clear();
      for (const auto& n : names) {
        try {
          c.estimators.push_back(variant_from_string(n));
        } catch (const Error& err) {
          throw ConfigError(fmt::format("estimators.variants: {}", err.what()));
        }
      }
    }
    read(e, "q_target", c.q_target, "estimators");
    read(e, "opnorm_use_next_eigenvalue", c.opnorm_use_next_eigenvalue, "estimators");
  }

  if (j.contains("output")) {
    const json& o = j.at("output");
    reject_unknown(o, "output", {"directory", "trace", "summary", "sweep"});
    read(o, "directory", c.output.directory, "output");
    read(o, "trace", c.output.trace, "output");
    read(o, "summary", c.output.summary, "output");
    read(o, "sweep", c.output.sweep, "output");
  }

  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read config '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string dump_config(const RunConfig& config) { return to_json(config).dump(2) + "\n"; }

std::string reference_digest(const RunConfig& config) {
  const json canonical = {{"model", model_json(config)},
                          {"ecut_ref", config.ecut_ref},
                          {"kgrid", kgrid_json(config)},
                          {"scf", scf_json(config.scf)}};
  return sha256_hex(canonical.dump());
}

Problem build_problem(const RunConfig& config) {
  config.validate();
  const Lattice lattice = config.lattice();
  const KGrid kgrid = config.kpoint_grid();
  BzDiscretization ref = BzDiscretization::build(lattice, config.ecut_ref, config.ecut_ref, kgrid);
  BzDiscretization disc = ref.with_coarse_cutoff(config.ecut);
  ModelSpec model{lattice, config.n_el, make_potential(config.potential, ref.density_basis()),
                  config.functional};
  return {std::move(ref), std::move(disc), std::move(model)};
}

Problem with_cutoff(const Problem& problem, double ecut) {
  return {problem.ref, problem.ref.with_coarse_cutoff(ecut), problem.model};
}

}  // namespace pwcert
