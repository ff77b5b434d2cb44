#include "pwcert/reference.hpp"

#include <bit>
#include <cstdint>
#include <cstdlib>
#include <fstream>

#include <fmt/format.h>

#include "json.hpp"
#include "pwcert/error.hpp"
#include "pwcert/linear_solver.hpp"

namespace pwcert {

using nlohmann::json;

namespace {

constexpr char kMagic[8] = {'P', 'W', 'C', 'R', 'E', 'F', '0', '1'};
constexpr int kVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.put(static_cast<char>((v >> (8 * b)) & 0xffu));
}

void put_f64(std::ostream& out, double x) {
  const auto bits = std::bit_cast<std::uint64_t>(x);
  for (int b = 0; b < 8; ++b) out.put(static_cast<char>((bits >> (8 * b)) & 0xffu));
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char buf[4];
  if (!in.read(reinterpret_cast<char*>(buf), 4)) throw Error("truncated reference artifact");
  std::uint32_t v = 0;
  for (int b = 3; b >= 0; --b) v = (v << 8) | buf[b];
  return v;
}

double get_f64(std::istream& in) {
  unsigned char buf[8];
  if (!in.read(reinterpret_cast<char*>(buf), 8)) throw Error("truncated reference artifact");
  std::uint64_t v = 0;
  for (int b = 7; b >= 0; --b) v = (v << 8) | buf[b];
  return std::bit_cast<double>(v);
}

std::size_t shape_size(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (auto s : shape) n *= s;
  return n;
}

}  // namespace

void write_reference(const ReferenceSolution& ref, const std::filesystem::path& path) {
  const auto nk = static_cast<std::size_t>(ref.eigenvalues.rows());
  const auto nb = static_cast<std::size_t>(ref.eigenvalues.cols());
  const std::size_t n = ref.density_miller.size();
  if (static_cast<std::size_t>(ref.density.size()) != n) {
    throw InvalidArgument("density coefficients and Miller indices differ in length");
  }
  const json header = {
      {"format", "pwcert-reference"},
      {"version", kVersion},
      {"digest", ref.digest},
      {"energy", ref.energy},
      {"iterations", ref.iterations},
      {"final_residual", ref.final_residual},
      {"density_tol", ref.density_tol},
      {"n_el", ref.n_el},
      {"arrays",
       {{{"name", "energy"}, {"shape", {1}}},
        {{"name", "eigenvalues"}, {"shape", {nk, nb}}},
        {{"name", "density_miller"}, {"shape", {n, 3}}},
        {{"name", "density"}, {"shape", {n, 2}}}}}};
  const std::string text = header.dump();

  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(fmt::format("cannot write '{}'", tmp.string()));
    out.write(kMagic, sizeof kMagic);
    put_u32(out, static_cast<std::uint32_t>(text.size()));
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    put_f64(out, ref.energy);
    for (std::size_t k = 0; k < nk; ++k) {
      for (std::size_t b = 0; b < nb; ++b) {
        put_f64(out, ref.eigenvalues(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(b)));
      }
    }
    for (const auto& m : ref.density_miller) {
      for (int j = 0; j < 3; ++j) put_f64(out, m[j]);
    }
    for (Eigen::Index i = 0; i < ref.density.size(); ++i) {
      put_f64(out, ref.density[i].real());
      put_f64(out, ref.density[i].imag());
    }
    if (!out) throw Error(fmt::format("error writing '{}'", tmp.string()));
  }
  std::filesystem::rename(tmp, path);
}

ReferenceSolution read_reference(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw MissingReference(fmt::format("no reference artifact at '{}'", path.string()));
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(fmt::format("cannot read '{}'", path.string()));
  char magic[8];
  if (!in.read(magic, 8) || !std::equal(magic, magic + 8, kMagic)) {
    throw Error(fmt::format("'{}' is not a reference artifact", path.string()));
  }
  const std::uint32_t len = get_u32(in);
  std::string text(len, '\0');
  if (!in.read(text.data(), len)) throw Error("truncated reference artifact");
  json header;
  try {
    header = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(fmt::format("bad reference header: {}", e.what()));
  }
  if (header.value("version", 0) != kVersion) {
    throw Error(fmt::format("unsupported reference artifact version in '{}'", path.string()));
  }

  ReferenceSolution ref;
  ref.digest = header.at("digest").get<std::string>();
  ref.iterations = header.at("iterations").get<int>();
  ref.final_residual = header.at("final_residual").get<double>();
  ref.density_tol = header.at("density_tol").get<double>();
  ref.n_el = header.at("n_el").get<int>();

  for (const auto& a : header.at("arrays")) {
    const auto name = a.at("name").get<std::string>();
    const auto shape = a.at("shape").get<std::vector<std::size_t>>();
    const std::size_t count = shape_size(shape);
    if (name == "energy") {
      if (count != 1) throw Error("energy array must hold one value");
      ref.energy = get_f64(in);
    } else if (name == "eigenvalues") {
      if (shape.size() != 2) throw Error("eigenvalues must be two-dimensional");
      ref.eigenvalues.resize(static_cast<Eigen::Index>(shape[0]), static_cast<Eigen::Index>(shape[1]));
      for (Eigen::Index k = 0; k < ref.eigenvalues.rows(); ++k) {
        for (Eigen::Index b = 0; b < ref.eigenvalues.cols(); ++b) ref.eigenvalues(k, b) = get_f64(in);
      }
    } else if (name == "density_miller") {
      if (shape.size() != 2 || shape[1] != 3) throw Error("density_miller must have shape [n, 3]");
      ref.density_miller.resize(shape[0]);
      for (auto& m : ref.density_miller) {
        for (int j = 0; j < 3; ++j) m[j] = static_cast<int>(get_f64(in));
      }
    } else if (name == "density") {
      if (shape.size() != 2 || shape[1] != 2) throw Error("density must have shape [n, 2]");
      ref.density.resize(static_cast<Eigen::Index>(shape[0]));
      for (Eigen::Index i = 0; i < ref.density.size(); ++i) {
        const double re = get_f64(in);
        const double im = get_f64(in);
        ref.density[i] = {re, im};
      }
    } else {
      for (std::size_t i = 0; i < count; ++i) (void)get_f64(in);
    }
  }
  if (ref.density.size() != static_cast<Eigen::Index>(ref.density_miller.size())) {
    throw Error("reference density and Miller indices differ in length");
  }
  return ref;
}

std::filesystem::path cache_directory() {
  if (const char* dir = std::getenv("PWCERT_CACHE_DIR"); dir && *dir) return dir;
  return "cache";
}

std::filesystem::path reference_path(const std::string& digest) {
  return cache_directory() / ("ref-" + digest + ".pwcref");
}

ReferenceSolution compute_reference(const RunConfig& config, const Problem& problem) {
  ScfConfig scf = config.scf;
  scf.density_tol = config.scf.density_tol / 10.0;
  const ScfHistory history = run_scf(problem.model, problem.ref, scf);
  if (!history.converged) {
    throw NonConvergence(fmt::format("reference SCF did not reach {:g} in {} iterations (residual {:g})",
                                     scf.density_tol, scf.max_iter, history.final_residual));
  }
  const ScfRecord& last = history.records.back();

  ReferenceSolution ref;
  ref.digest = reference_digest(config);
  ref.energy = last.energy;
  ref.iterations = static_cast<int>(history.records.size());
  ref.final_residual = history.final_residual;
  ref.density_tol = scf.density_tol;
  ref.n_el = problem.model.n_el;

  const MeanFieldHamiltonian h(problem.model, last.rho);
  const auto& fibers = problem.ref.fibers();
  ref.eigenvalues.resize(static_cast<Eigen::Index>(fibers.size()), ref.n_el + 1);
  for (std::size_t k = 0; k < fibers.size(); ++k) {
    DiagonalizeOptions opts;
    opts.gap_tol = 0.0;
    const SpectralSlice s = diagonalize_projected(h, fibers[k].ref, fibers[k].ref, ref.n_el, 0.0, opts);
    ref.eigenvalues.row(static_cast<Eigen::Index>(k)) = s.eigenvalues.head(ref.n_el + 1).transpose();
  }
  ref.density_miller = last.rho.basis()->miller();
  ref.density = last.rho.coefficients();
  return ref;
}

ReferenceSolution load_reference(const RunConfig& config) {
  const std::string digest = reference_digest(config);
  ReferenceSolution ref = read_reference(reference_path(digest));
  if (ref.digest != digest) {
    throw MissingReference(fmt::format("cached reference does not match digest {}", digest));
  }
  return ref;
}

ReferenceSolution ensure_reference(const RunConfig& config, const Problem& problem, bool* cache_hit) {
  const std::string digest = reference_digest(config);
  const auto path = reference_path(digest);
  if (std::filesystem::exists(path)) {
    ReferenceSolution ref = read_reference(path);
    if (ref.digest == digest) {
      if (cache_hit) *cache_hit = true;
      return ref;
    }
  }
  if (cache_hit) *cache_hit = false;
  ReferenceSolution ref = compute_reference(config, problem);
  write_reference(ref, path);
  return ref;
}

}  // namespace pwcert
