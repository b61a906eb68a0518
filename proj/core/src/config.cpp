#include "fermibose/config.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <set>
#include <sstream>

#include "fermibose/errors.hpp"

namespace fermibose {

namespace {

using Path = std::string;

[[noreturn]] void fail(const Path& field, const std::string& what) {
  throw ConfigError(field + ": " + what);
}

void allow_keys(const YAML::Node& node, const Path& where, std::set<std::string> keys) {
  if (!node.IsMap()) fail(where.empty() ? "<root>" : where, "expected a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!keys.contains(key)) fail(where.empty() ? key : where + "." + key, "unknown key");
  }
}

template <class T>
T get(const YAML::Node& node, const Path& field) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    fail(field, "cannot read value '" + YAML::Dump(node) + "'");
  }
}

template <class T>
T required(const YAML::Node& parent, const std::string& key, const Path& where) {
  const Path field = where.empty() ? key : where + "." + key;
  if (!parent[key]) fail(field, "required");
  return get<T>(parent[key], field);
}

template <class T>
void optional_into(const YAML::Node& parent, const std::string& key, const Path& where, T& out) {
  if (parent[key]) out = get<T>(parent[key], where.empty() ? key : where + "." + key);
}

MultiIndex read_index(const YAML::Node& node, const Path& field, int dimension) {
  auto n = get<std::vector<int>>(node, field);
  if (static_cast<int>(n.size()) != dimension) {
    fail(field, "expected " + std::to_string(dimension) + " components, got " +
                    std::to_string(n.size()));
  }
  return n;
}

std::vector<double> read_doubles_file(const std::filesystem::path& path, const Path& field) {
  std::ifstream in(path);
  if (!in) fail(field, "cannot open " + path.string());
  std::vector<double> out;
  double x;
  while (in >> x) out.push_back(x);
  if (!in.eof()) fail(field, "non-numeric content in " + path.string());
  return out;
}

}  // namespace

const char* to_string(MatvecMode mode) noexcept {
  switch (mode) {
    case MatvecMode::automatic: return "auto";
    case MatvecMode::direct: return "direct";
    case MatvecMode::fft: return "fft";
  }
  return "?";
}

GridSpec RunConfig::grid() const {
  return box_length ? GridSpec::from_box_length(dimension, half_width, *box_length)
                    : GridSpec::from_spacing(dimension, half_width, spacing.value_or(0.0));
}

void validate(const RunConfig& cfg) {
  if (cfg.dimension < 1 || cfg.dimension > 3) fail("grid.dimension", "must be 1, 2 or 3");
  if (cfg.half_width < 0) fail("grid.half_width", "must be >= 0");
  if (cfg.box_length.has_value() == cfg.spacing.has_value()) {
    fail("grid", "give exactly one of box_length_m or dk_per_m");
  }
  if (cfg.box_length && !(*cfg.box_length > 0.0)) fail("grid.box_length_m", "must be > 0");
  if (cfg.spacing && !(*cfg.spacing > 0.0)) fail("grid.dk_per_m", "must be > 0");
  try {
    cfg.physics.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("physics: ") + e.what());
  }
  if (cfg.times.empty()) fail("times_t0", "at least one time required");
  for (std::size_t i = 0; i < cfg.times.size(); ++i) {
    if (!(cfg.times[i] >= 0.0)) fail("times_t0[" + std::to_string(i) + "]", "must be >= 0");
    if (i > 0 && !(cfg.times[i] > cfg.times[i - 1])) {
      fail("times_t0[" + std::to_string(i) + "]", "times must be strictly increasing");
    }
  }
  if (!(cfg.rel_threshold >= 0.0 && cfg.rel_threshold < 1.0)) {
    fail("truncation.rel_threshold", "must lie in [0, 1)");
  }
  const int K = cfg.half_width;
  auto check_index = [&](const MultiIndex& n, const Path& field) {
    for (std::size_t j = 0; j < n.size(); ++j) {
      if (n[j] < -K || n[j] > K) {
        fail(field, "component " + std::to_string(j + 1) + " = " + std::to_string(n[j]) +
                        " outside [-" + std::to_string(K) + ", " + std::to_string(K) + "]");
      }
    }
  };
  for (std::size_t i = 0; i < cfg.observables.pairs.size(); ++i) {
    check_index(cfg.observables.pairs[i].first, "observables.pairs[" + std::to_string(i) + "]");
    check_index(cfg.observables.pairs[i].second, "observables.pairs[" + std::to_string(i) + "]");
  }
  for (std::size_t i = 0; i < cfg.observables.slices.size(); ++i) {
    const auto& s = cfg.observables.slices[i];
    const Path f = "observables.cl_slices[" + std::to_string(i) + "]";
    if (s.axis < 0 || s.axis >= cfg.dimension) fail(f + ".axis", "must be in 1..D");
    check_index(s.reference, f + ".k_ref");
  }
  cfg.krylov.validate(2 * cfg.grid().size());
  if (cfg.shard && cfg.shard->start >= cfg.shard->end) {
    fail("shard", "row_start must be < row_end");
  }
  if (!(cfg.symmetry_tolerance >= 0.0)) fail("symmetry_tolerance", "must be >= 0");
}

RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config is not valid YAML: ") + e.what());
  }
  allow_keys(root, "",
             {"name", "grid", "physics", "condensate", "truncation", "times_t0", "observables",
              "krylov", "matvec", "shard", "threads", "output_dir", "compare",
              "symmetry_tolerance"});
  RunConfig cfg;
  optional_into(root, "name", "", cfg.name);

  const auto grid = root["grid"];
  if (!grid) fail("grid", "required");
  allow_keys(grid, "grid", {"dimension", "half_width", "box_length_m", "dk_per_m"});
  cfg.dimension = required<int>(grid, "dimension", "grid");
  cfg.half_width = required<int>(grid, "half_width", "grid");
  if (grid["box_length_m"]) cfg.box_length = get<double>(grid["box_length_m"], "grid.box_length_m");
  if (grid["dk_per_m"]) cfg.spacing = get<double>(grid["dk_per_m"], "grid.dk_per_m");

  const auto phys = root["physics"];
  if (!phys) fail("physics", "required");
  allow_keys(phys, "physics",
             {"statistics", "atom_mass_kg", "Omega_per_s", "chi_m_halfD_per_s", "t0_s", "hbar_J_s"});
  const auto stats = required<std::string>(phys, "statistics", "physics");
  if (stats == "fermion" || stats == "fermions") {
    cfg.physics.q = -1;
  } else if (stats == "boson" || stats == "bosons") {
    cfg.physics.q = 1;
  } else {
    fail("physics.statistics", "expected 'fermion' or 'boson', got '" + stats + "'");
  }
  cfg.physics.atom_mass = required<double>(phys, "atom_mass_kg", "physics");
  cfg.physics.detuning = required<double>(phys, "Omega_per_s", "physics");
  cfg.physics.coupling = required<double>(phys, "chi_m_halfD_per_s", "physics");
  optional_into(phys, "t0_s", "physics", cfg.physics.t0);
  optional_into(phys, "hbar_J_s", "physics", cfg.physics.hbar);

  const auto cond = root["condensate"];
  if (!cond) fail("condensate", "required");
  allow_keys(cond, "condensate", {"kind", "rho0_per_m_D", "tf_radii_m", "phase_file", "samples_file"});
  const auto kind = required<std::string>(cond, "kind", "condensate");
  if (kind == "uniform") {
    cfg.condensate.kind = CondensateKind::uniform;
  } else if (kind == "thomas_fermi") {
    cfg.condensate.kind = CondensateKind::thomas_fermi;
  } else if (kind == "grid_samples") {
    cfg.condensate.kind = CondensateKind::grid_samples;
  } else {
    fail("condensate.kind", "expected uniform, thomas_fermi or grid_samples, got '" + kind + "'");
  }
  if (cfg.condensate.kind != CondensateKind::grid_samples) {
    cfg.condensate.peak_density = required<double>(cond, "rho0_per_m_D", "condensate");
  }
  if (cfg.condensate.kind == CondensateKind::thomas_fermi) {
    cfg.condensate.tf_radii = required<std::vector<double>>(cond, "tf_radii_m", "condensate");
  }
  optional_into(cond, "phase_file", "condensate", cfg.phase_file);
  optional_into(cond, "samples_file", "condensate", cfg.samples_file);
  if (cfg.condensate.kind == CondensateKind::grid_samples && cfg.samples_file.empty()) {
    fail("condensate.samples_file", "required for grid_samples");
  }

  if (const auto tr = root["truncation"]) {
    allow_keys(tr, "truncation", {"rel_threshold"});
    optional_into(tr, "rel_threshold", "truncation", cfg.rel_threshold);
  }
  if (!root["times_t0"]) fail("times_t0", "required");
  cfg.times = get<std::vector<double>>(root["times_t0"], "times_t0");

  if (const auto obs = root["observables"]) {
    allow_keys(obs, "observables", {"modes", "pairs", "cl_slices", "total_number"});
    optional_into(obs, "modes", "observables", cfg.observables.modes);
    optional_into(obs, "total_number", "observables", cfg.observables.total_number);
    if (const auto pairs = obs["pairs"]) {
      for (std::size_t i = 0; i < pairs.size(); ++i) {
        const Path f = "observables.pairs[" + std::to_string(i) + "]";
        if (!pairs[i].IsSequence() || pairs[i].size() != 2) fail(f, "expected [k, k']");
        cfg.observables.pairs.emplace_back(read_index(pairs[i][0], f, cfg.dimension),
                                           read_index(pairs[i][1], f, cfg.dimension));
      }
    }
    if (const auto slices = obs["cl_slices"]) {
      for (std::size_t i = 0; i < slices.size(); ++i) {
        const Path f = "observables.cl_slices[" + std::to_string(i) + "]";
        allow_keys(slices[i], f, {"axis", "k_ref", "label"});
        SliceSpec s;
        s.axis = required<int>(slices[i], "axis", f) - 1;
        if (!slices[i]["k_ref"]) fail(f + ".k_ref", "required");
        s.reference = read_index(slices[i]["k_ref"], f + ".k_ref", cfg.dimension);
        s.label = "axis" + std::to_string(s.axis + 1);
        optional_into(slices[i], "label", f, s.label);
        cfg.observables.slices.push_back(std::move(s));
      }
    }
  }

  if (const auto kr = root["krylov"]) {
    allow_keys(kr, "krylov", {"subspace_dim", "tol", "max_substeps", "max_rejections"});
    optional_into(kr, "subspace_dim", "krylov", cfg.krylov.subspace_dim);
    optional_into(kr, "tol", "krylov", cfg.krylov.tol);
    optional_into(kr, "max_substeps", "krylov", cfg.krylov.max_substeps);
    optional_into(kr, "max_rejections", "krylov", cfg.krylov.max_rejections);
  }
  if (root["matvec"]) {
    const auto mode = get<std::string>(root["matvec"], "matvec");
    if (mode == "auto") {
      cfg.matvec = MatvecMode::automatic;
    } else if (mode == "direct") {
      cfg.matvec = MatvecMode::direct;
    } else if (mode == "fft") {
      cfg.matvec = MatvecMode::fft;
    } else {
      fail("matvec", "expected auto, direct or fft, got '" + mode + "'");
    }
  }
  if (const auto sh = root["shard"]) {
    allow_keys(sh, "shard", {"row_start", "row_end"});
    ShardRange r;
    r.start = required<std::size_t>(sh, "row_start", "shard");
    r.end = required<std::size_t>(sh, "row_end", "shard");
    cfg.shard = r;
  }
  optional_into(root, "threads", "", cfg.threads);
  optional_into(root, "output_dir", "", cfg.output_dir);
  if (cfg.output_dir.empty()) cfg.output_dir = "runs/" + cfg.name;
  if (const auto cmp = root["compare"]) {
    allow_keys(cmp, "compare", {"uniform_rel_tol", "golden_rule_factor", "cl_abs_tol"});
    optional_into(cmp, "uniform_rel_tol", "compare", cfg.compare.uniform);
    optional_into(cmp, "golden_rule_factor", "compare", cfg.compare.golden_rule_factor);
    optional_into(cmp, "cl_abs_tol", "compare", cfg.compare.cl_asymptote);
  }
  optional_into(root, "symmetry_tolerance", "", cfg.symmetry_tolerance);

  validate(cfg);

  const auto resolve = [&](const std::string& p) { return (base_dir / p).lexically_normal(); };
  if (!cfg.phase_file.empty()) {
    cfg.condensate.phase = read_doubles_file(resolve(cfg.phase_file), "condensate.phase_file");
    if (cfg.condensate.phase.size() != cfg.grid().size()) {
      fail("condensate.phase_file", "expected " + std::to_string(cfg.grid().size()) +
                                        " values, got " +
                                        std::to_string(cfg.condensate.phase.size()));
    }
  }
  if (!cfg.samples_file.empty()) {
    std::ifstream in(resolve(cfg.samples_file));
    if (!in) fail("condensate.samples_file", "cannot open " + resolve(cfg.samples_file).string());
    try {
      cfg.condensate.samples = read_field_samples(in, cfg.grid());
    } catch (const std::exception& e) {
      fail("condensate.samples_file", e.what());
    }
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  RunConfig cfg = parse_config(ss.str(), path.parent_path().empty() ? "." : path.parent_path());
  cfg.source = path;
  return cfg;
}

}  // namespace fermibose
