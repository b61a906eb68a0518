#include "fermibose/pipeline.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

#include "fermibose/errors.hpp"
#include "fermibose/oracles.hpp"

namespace fermibose {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fmt(const std::optional<double>& x) { return x ? fmt(*x) : "undefined"; }

std::string time_tag(std::size_t ti) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "t%03zu", ti);
  return buf;
}

const char* to_string(CondensateKind k) {
  switch (k) {
    case CondensateKind::uniform: return "uniform";
    case CondensateKind::thomas_fermi: return "thomas_fermi";
    case CondensateKind::grid_samples: return "grid_samples";
  }
  return "?";
}

/// Parsed configuration as JSON, without the fields a single run may
/// override (shard range, thread count).
json config_echo(const RunConfig& c) {
  json j;
  j["name"] = c.name;
  j["grid"] = {{"dimension", c.dimension}, {"half_width", c.half_width}};
  if (c.box_length) j["grid"]["box_length_m"] = *c.box_length;
  if (c.spacing) j["grid"]["dk_per_m"] = *c.spacing;
  j["physics"] = {{"statistics", c.physics.q < 0 ? "fermion" : "boson"},
                  {"atom_mass_kg", c.physics.atom_mass},
                  {"Omega_per_s", c.physics.detuning},
                  {"chi_m_halfD_per_s", c.physics.coupling},
                  {"t0_s", c.physics.t0},
                  {"hbar_J_s", c.physics.hbar}};
  j["condensate"] = {{"kind", to_string(c.condensate.kind)},
                     {"rho0_per_m_D", c.condensate.peak_density},
                     {"tf_radii_m", c.condensate.tf_radii},
                     {"phase_file", c.phase_file},
                     {"samples_file", c.samples_file},
                     {"phase_hash", fnv1a(std::string_view(
                                        reinterpret_cast<const char*>(c.condensate.phase.data()),
                                        c.condensate.phase.size() * sizeof(double)))},
                     {"samples_hash", fnv1a(std::string_view(
                                          reinterpret_cast<const char*>(c.condensate.samples.data()),
                                          c.condensate.samples.size() * sizeof(Complex)))}};
  j["truncation"] = {{"rel_threshold", c.rel_threshold}};
  j["times_t0"] = c.times;
  json pairs = json::array();
  for (const auto& [a, b] : c.observables.pairs) pairs.push_back({a, b});
  json slices = json::array();
  for (const auto& s : c.observables.slices) {
    slices.push_back({{"axis", s.axis + 1}, {"k_ref", s.reference}, {"label", s.label}});
  }
  j["observables"] = {{"modes", c.observables.modes},
                      {"pairs", pairs},
                      {"cl_slices", slices},
                      {"total_number", c.observables.total_number}};
  j["krylov"] = {{"subspace_dim", c.krylov.subspace_dim},
                 {"tol", c.krylov.tol},
                 {"max_substeps", c.krylov.max_substeps},
                 {"max_rejections", c.krylov.max_rejections}};
  j["matvec"] = to_string(c.matvec);
  j["output_dir"] = c.output_dir;
  j["compare"] = {{"uniform_rel_tol", c.compare.uniform},
                  {"golden_rule_factor", c.compare.golden_rule_factor},
                  {"cl_abs_tol", c.compare.cl_asymptote}};
  j["symmetry_tolerance"] = c.symmetry_tolerance;
  return j;
}

json stats_json(const ExpvStats& s) {
  return {{"substeps", s.substeps},
          {"rejections", s.rejections},
          {"matvecs", s.matvecs},
          {"error_estimate", s.error_estimate}};
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw ConfigError("cannot open config " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  return out;
}

void momentum_header(std::ostream& out, int dimension, const std::string& prefix) {
  for (int j = 1; j <= dimension; ++j) out << ',' << prefix << j << "_per_m";
}

void momentum_cells(std::ostream& out, const GridSpec& grid, std::size_t m) {
  for (double k : grid.momentum_of(m)) out << ',' << fmt(k);
}

double kept_norm_sum(const FourierTensor& t) {
  std::vector<double> v;
  for (const auto& e : t.entries()) v.push_back(std::norm(e.value));
  return pairwise_sum(v);
}

std::string describe_work(const PreparedRun& run, std::size_t i) {
  const auto& r = run.work[i].row;
  return std::to_string(i) + " (" + (r.block == BlockRow::upper ? "upper" : "lower") +
         " row " + std::to_string(r.index + 1) + ")";
}

}  // namespace

PreparedRun prepare_run(RunConfig config, std::string config_text, const fs::path& config_base) {
  validate(config);
  PreparedRun run;
  run.grid = config.grid();
  const auto& grid = run.grid;

  const Field field = build_condensate(config.condensate, grid);
  const FourierTensor full = fourier_coefficients(field, grid, config.symmetry_tolerance);
  const FourierTensor kept = truncate_coefficients(full, config.rel_threshold);
  run.coefficients_total = full.nonzeros();
  run.coefficients_kept = kept.nonzeros();
  run.molecule_number = kept_norm_sum(full);
  run.op = std::make_shared<const SystemOperator>(
      SystemOperator::build(kept, config.physics, grid, config.matvec));
  run.krylov = config.krylov;
  run.krylov.norm_est = run.op->norm_estimate();

  const Symmetry sym = run.op->symmetry();
  run.axis_mirrors = axis_mirror_symmetric(*run.op, config.symmetry_tolerance);
  std::vector<RowRequest> wanted;
  if (config.observables.modes) {
    run.mode_pairs = back_to_back_pairs(grid);
    const auto r = rows_for_pairs(run.mode_pairs, sym);
    wanted.insert(wanted.end(), r.begin(), r.end());
  }
  for (const auto& [a, b] : config.observables.pairs) {
    run.pairs.emplace_back(grid.flatten(a), grid.flatten(b));
  }
  {
    const auto r = rows_for_pairs(run.pairs, sym);
    wanted.insert(wanted.end(), r.begin(), r.end());
  }
  for (const auto& s : config.observables.slices) {
    ResolvedSlice rs{s, grid.flatten(s.reference)};
    for (std::size_t m : slice_sites(grid, s.axis, rs.reference)) {
      wanted.push_back({BlockRow::upper, m});
    }
    run.slices.push_back(std::move(rs));
  }
  run.retained = minimal_row_set(wanted, sym, grid);

  std::map<RowRequest, bool> items;
  for (const auto& r : run.retained.computed) items[r] = true;
  if (config.observables.total_number) {
    run.sweep = sweep_plan(grid, sym, run.axis_mirrors);
    for (const auto& r : run.sweep.rows) items.emplace(r, false);
  }
  for (const auto& [row, keep] : items) run.work.push_back({row, keep});

  if (config.shard && config.shard->end > run.work.size()) {
    throw ConfigError("shard: row_end " + std::to_string(config.shard->end) +
                      " exceeds the " + std::to_string(run.work.size()) + " work rows");
  }

  run.config_hash = fnv1a(config_echo(config).dump());
  run.config = std::move(config);
  run.config_text = std::move(config_text);
  run.config_base = config_base;
  return run;
}

PreparedRun prepare_run(const fs::path& config_path) {
  const fs::path base = fs::absolute(config_path).parent_path();
  std::string text = read_text(config_path);
  RunConfig cfg = parse_config(text, base);
  cfg.source = config_path;
  return prepare_run(std::move(cfg), std::move(text), base);
}

std::vector<RowRecord> compute_records(const PreparedRun& run, ShardRange range, int threads,
                                       std::size_t chunk) {
  if (range.start > range.end || range.end > run.work.size()) {
    throw ConfigError("row range [" + std::to_string(range.start) + ", " +
                      std::to_string(range.end) + ") is outside the " +
                      std::to_string(run.work.size()) + " work rows");
  }
  chunk = std::max<std::size_t>(chunk, 1);
  const auto& times = run.config.times;
  std::vector<RowRecord> out;
  out.reserve(range.end - range.start);
  for (std::size_t begin = range.start; begin < range.end; begin += chunk) {
    const std::size_t end = std::min(range.end, begin + chunk);
    std::vector<RowRequest> rows;
    for (std::size_t i = begin; i < end; ++i) rows.push_back(run.work[i].row);
    std::vector<ExpvStats> per_row;
    auto block = rows_of_M(*run.op, rows, times, run.krylov, threads, nullptr, &per_row);
    for (std::size_t i = begin; i < end; ++i) {
      const std::size_t local = i - begin;
      RowRecord rec;
      rec.work_index = i;
      rec.row = run.work[i].row;
      rec.stats = per_row[local];
      for (std::size_t ti = 0; ti < times.size(); ++ti) {
        MRows& r = block[ti][local];
        rec.norm2.push_back(r.right.squaredNorm());
        if (run.work[i].keep) {
          rec.left.push_back(std::move(r.left));
          rec.right.push_back(std::move(r.right));
        }
      }
      out.push_back(std::move(rec));
    }
  }
  return out;
}

RunResult assemble(const PreparedRun& run, std::vector<RowRecord> records) {
  std::sort(records.begin(), records.end(),
            [](const RowRecord& a, const RowRecord& b) { return a.work_index < b.work_index; });
  std::vector<std::string> problems;
  std::size_t expect = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const std::size_t w = records[i].work_index;
    if (w >= run.work.size()) {
      problems.push_back("work row " + std::to_string(w) + " is beyond the work list");
      continue;
    }
    if (w < expect) {
      problems.push_back("work row " + describe_work(run, w) + " appears more than once");
      continue;
    }
    for (std::size_t m = expect; m < w; ++m) problems.push_back("missing work row " + describe_work(run, m));
    expect = w + 1;
    if (!(records[i].row == run.work[w].row)) {
      problems.push_back("work row " + std::to_string(w) + " holds a different lattice row");
    }
  }
  for (std::size_t m = expect; m < run.work.size(); ++m) {
    problems.push_back("missing work row " + describe_work(run, m));
  }
  if (!problems.empty()) {
    std::string msg = "row records do not cover the work list exactly once:";
    const std::size_t shown = std::min<std::size_t>(problems.size(), 20);
    for (std::size_t i = 0; i < shown; ++i) msg += "\n  " + problems[i];
    if (problems.size() > shown) msg += "\n  ... and " + std::to_string(problems.size() - shown) + " more";
    throw ConfigError(msg);
  }

  const auto& cfg = run.config;
  const auto& times = cfg.times;
  const Symmetry sym = run.op->symmetry();
  const int q = run.op->q();
  RunResult res;
  res.times = times;
  for (const auto& r : records) res.stats += r.stats;
  res.slices.resize(run.slices.size());

  for (std::size_t ti = 0; ti < times.size(); ++ti) {
    std::vector<MRows> kept;
    for (std::size_t i = 0; i < records.size(); ++i) {
      if (!run.work[i].keep) continue;
      MRows m;
      m.time = times[ti];
      m.row = records[i].row;
      m.symmetry = sym;
      m.left = records[i].left.at(ti);
      m.right = records[i].right.at(ti);
      kept.push_back(std::move(m));
    }
    const RowSet full = reconstruct_rows(run.retained, RowSet(times[ti], std::move(kept)));
    if (cfg.observables.modes) res.modes.push_back(moment_table(full, run.mode_pairs, q, sym));
    if (!run.pairs.empty()) res.pairs.push_back(moment_table(full, run.pairs, q, sym));
    for (std::size_t s = 0; s < run.slices.size(); ++s) {
      res.slices[s].push_back(
          slice_table(full, run.grid, run.slices[s].spec.axis, run.slices[s].reference, q));
    }
    if (cfg.observables.total_number) {
      std::vector<double> norms;
      norms.reserve(run.sweep.rows.size());
      std::size_t i = 0;
      for (const auto& r : run.sweep.rows) {
        while (!(records[i].row == r)) ++i;  // both lists are sorted
        norms.push_back(records[i].norm2[ti]);
      }
      res.atoms_per_spin.push_back(
          atom_number_from_norms(expand_sweep_norms(run.sweep, norms)));
    }
  }
  return res;
}

void write_outputs(const PreparedRun& run, const RunResult& res, const fs::path& dir) {
  fs::create_directories(dir);
  const auto& grid = run.grid;
  const int D = grid.dimension();
  const auto& times = res.times;

  for (std::size_t ti = 0; ti < res.modes.size(); ++ti) {
    auto out = open_out(dir / ("modes_" + time_tag(ti) + ".csv"));
    out << "t_over_t0,index";
    momentum_header(out, D, "k");
    out << ",n_k,m_re,m_im,g2_opposite\n";
    const auto& table = res.modes[ti];
    for (std::size_t i = 0; i < table.pairs.size(); ++i) {
      const auto& p = table.pairs[i];
      out << fmt(times[ti]) << ',' << p.k + 1;
      momentum_cells(out, grid, p.k);
      out << ',' << fmt(table.occupations[p.k].second) << ',' << fmt(p.anomalous.real()) << ','
          << fmt(p.anomalous.imag()) << ',' << fmt(p.g2_opposite) << '\n';
    }
  }
  for (std::size_t ti = 0; ti < res.pairs.size(); ++ti) {
    auto out = open_out(dir / ("pairs_" + time_tag(ti) + ".csv"));
    out << "t_over_t0";
    momentum_header(out, D, "k");
    momentum_header(out, D, "kp");
    out << ",n_re,n_im,m_re,m_im,g2_same,g2_opposite\n";
    for (const auto& p : res.pairs[ti].pairs) {
      out << fmt(times[ti]);
      momentum_cells(out, grid, p.k);
      momentum_cells(out, grid, p.k2);
      out << ',' << fmt(p.normal.real()) << ',' << fmt(p.normal.imag()) << ','
          << fmt(p.anomalous.real()) << ',' << fmt(p.anomalous.imag()) << ','
          << fmt(p.g2_same) << ',' << fmt(p.g2_opposite) << '\n';
    }
  }
  for (std::size_t s = 0; s < res.slices.size(); ++s) {
    const auto& label = run.slices[s].spec.label;
    for (std::size_t ti = 0; ti < res.slices[s].size(); ++ti) {
      auto out = open_out(dir / ("cl_" + label + "_" + time_tag(ti) + ".csv"));
      out << "t_over_t0,k_axis_per_m";
      momentum_header(out, D, "k");
      out << ",n_k,g2_same\n";
      for (const auto& pt : res.slices[s][ti].points) {
        out << fmt(times[ti]) << ',' << fmt(pt.momentum);
        momentum_cells(out, grid, pt.index);
        out << ',' << fmt(pt.occupation) << ',' << fmt(pt.g2) << '\n';
      }
    }
  }
  if (!res.atoms_per_spin.empty()) {
    auto out = open_out(dir / "atom_number.csv");
    out << "t_over_t0,t_s,atoms_per_spin,atoms_total,conversion_fraction\n";
    for (std::size_t ti = 0; ti < times.size(); ++ti) {
      const double n = res.atoms_per_spin[ti];
      out << fmt(times[ti]) << ',' << fmt(times[ti] * run.config.physics.t0) << ',' << fmt(n)
          << ',' << fmt(2.0 * n) << ',' << fmt(n / run.molecule_number) << '\n';
    }
  }

  const auto& op = *run.op;
  const auto delta = op.delta();
  double gamma_max = 0.0;
  for (const auto& e : op.coupling()) gamma_max = std::max(gamma_max, std::abs(e.value));
  const double k0 = resonance_momentum(run.config.physics);
  json derived = {
      {"points_per_axis", grid.points_per_axis()},
      {"modes", grid.size()},
      {"box_length_m", grid.box_length()},
      {"dk_per_m", grid.spacing()},
      {"box_length_source", run.config.box_length ? "box_length_m" : "2 pi / dk_per_m"},
      {"spatial_quadrature", "midpoint rule on B points per axis, x = n L / B"},
      {"delta_min", *std::min_element(delta.begin(), delta.end())},
      {"delta_max", *std::max_element(delta.begin(), delta.end())},
      {"gamma_max", gamma_max},
      {"resonance_momentum_per_m", k0},
      {"resonance_index", k0 / grid.spacing()},
      {"molecule_number", run.molecule_number},
      {"coefficients_total", run.coefficients_total},
      {"coefficients_kept", run.coefficients_kept},
      {"symmetry", to_string(op.symmetry())},
      {"axis_mirror_symmetric", run.axis_mirrors},
      {"sweep_rows_computed", run.sweep.rows.size()},
      {"matvec", to_string(op.mode())},
      {"norm_estimate", run.krylov.norm_est},
      {"work_rows", run.work.size()},
      {"table_rows_computed", run.retained.computed.size()},
  };
  if (grid.dimension() == 3) derived["golden_rule_rate_per_s"] = golden_rule_rate(run.config.physics);
  json manifest = {{"format", "fermibose-run/1"},
                   {"config", config_echo(run.config)},
                   {"derived", derived},
                   {"krylov", {{"subspace_dim", run.krylov.subspace_dim},
                               {"tol", run.krylov.tol},
                               {"step_control", "local error estimate, expokit style"},
                               {"totals", stats_json(res.stats)}}}};
  json files = json::array();
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".csv") files.push_back(entry.path().filename().string());
  }
  std::sort(files.begin(), files.end());
  manifest["tables"] = files;
  auto out = open_out(dir / "manifest.json");
  out << manifest.dump(2) << '\n';
}

fs::path resolve_output_dir(const RunConfig& config) {
  fs::path p = config.output_dir;
  if (p.is_absolute()) return p;
  if (const char* root = std::getenv(kOutputRootEnv); root && *root) return fs::path(root) / p;
  return fs::current_path() / p;
}

namespace {

void write_run_log(const fs::path& dir, const json& log) {
  auto out = open_out(dir / "run_log.json");
  out << log.dump(2) << '\n';
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

SimulateSummary simulate(const fs::path& config_path, const RunOverrides& overrides) {
  const auto start = std::chrono::steady_clock::now();
  const fs::path base = fs::absolute(config_path).parent_path();
  std::string text = read_text(config_path);
  RunConfig cfg = parse_config(text, base);
  cfg.source = config_path;
  if (overrides.threads) cfg.threads = *overrides.threads;
  if (overrides.row_start || overrides.row_end) {
    ShardRange r = cfg.shard.value_or(ShardRange{});
    if (overrides.row_start) r.start = *overrides.row_start;
    if (overrides.row_end) r.end = *overrides.row_end;
    if (!overrides.row_end && !cfg.shard) {
      throw ConfigError("--row-start needs --row-end (or a shard section in the config)");
    }
    cfg.shard = r;
  }
  const PreparedRun run = prepare_run(cfg, text, base);
  const fs::path dir = resolve_output_dir(run.config);
  fs::create_directories(dir);

  SimulateSummary summary;
  summary.output_dir = dir;
  summary.work_rows = run.work.size();
  const int threads = run.config.threads;

  if (run.config.shard) {
    const ShardRange range = *run.config.shard;
    auto records = compute_records(run, range, threads);
    ShardHeader h;
    h.config_text = run.config_text;
    h.config_base = run.config_base.string();
    h.config_hash = run.config_hash;
    h.grid_hash = grid_hash(run.grid);
    h.times = run.config.times;
    h.work_rows = run.work.size();
    h.row_start = range.start;
    h.row_end = range.end;
    h.block_size = run.grid.size();
    std::ofstream out(dir / shard_file_name(range.start, range.end), std::ios::binary);
    if (!out) throw std::runtime_error("cannot write shard in " + dir.string());
    write_shard(out, h, records);
    summary.sharded = true;
  } else {
    auto records = compute_records(run, {0, run.work.size()}, threads);
    write_outputs(run, assemble(run, std::move(records)), dir);
  }
  summary.wall_seconds = seconds_since(start);
  json log = {{"wall_seconds", summary.wall_seconds},
              {"threads", threads <= 0 ? default_thread_count() : threads},
              {"work_rows", run.work.size()}};
  if (run.config.shard) {
    log["row_start"] = run.config.shard->start;
    log["row_end"] = run.config.shard->end;
    auto out = open_out(dir / (shard_file_name(run.config.shard->start, run.config.shard->end) + ".log.json"));
    out << log.dump(2) << '\n';
  } else {
    write_run_log(dir, log);
  }
  return summary;
}

SimulateSummary merge(const fs::path& dir) {
  const auto start = std::chrono::steady_clock::now();
  std::vector<fs::path> files;
  if (!fs::is_directory(dir)) throw ConfigError(dir.string() + " is not a directory");
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (name.starts_with("shard_") && entry.path().extension() == ".bin") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw ConfigError("no shard files in " + dir.string());

  std::vector<ShardFile> shards;
  for (const auto& f : files) {
    std::ifstream in(f, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + f.string());
    try {
      shards.push_back(read_shard(in));
    } catch (const ConfigError& e) {
      throw ConfigError(f.filename().string() + ": " + e.what());
    }
  }
  const auto& first = shards.front().header;
  for (std::size_t i = 1; i < shards.size(); ++i) {
    const auto& h = shards[i].header;
    if (h.config_hash != first.config_hash || h.grid_hash != first.grid_hash ||
        h.times != first.times || h.work_rows != first.work_rows) {
      throw ConfigError(files[i].filename().string() + " was produced by a different configuration than " +
                        files[0].filename().string());
    }
  }
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  for (const auto& s : shards) ranges.emplace_back(s.header.row_start, s.header.row_end);
  std::sort(ranges.begin(), ranges.end());
  std::vector<std::string> problems;
  std::size_t covered = 0;
  for (const auto& [a, b] : ranges) {
    if (a > covered) {
      problems.push_back("rows " + std::to_string(covered) + ".." + std::to_string(a - 1) + " missing");
    } else if (a < covered) {
      problems.push_back("rows " + std::to_string(a) + ".." + std::to_string(std::min(b, covered) - 1) +
                         " covered more than once");
    }
    covered = std::max(covered, b);
  }
  if (covered < first.work_rows) {
    problems.push_back("rows " + std::to_string(covered) + ".." + std::to_string(first.work_rows - 1) +
                       " missing");
  }
  if (!problems.empty()) {
    std::string msg = "shards do not cover the " + std::to_string(first.work_rows) +
                      " work rows exactly once:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw ConfigError(msg);
  }

  RunConfig cfg = parse_config(first.config_text, first.config_base);
  cfg.shard.reset();
  const PreparedRun run = prepare_run(cfg, first.config_text, first.config_base);
  if (run.config_hash != first.config_hash) {
    throw ConfigError("configuration files referenced by the shards changed since they were written");
  }
  std::vector<RowRecord> all;
  for (auto& s : shards) {
    for (auto& r : s.records) all.push_back(std::move(r));
  }
  write_outputs(run, assemble(run, std::move(all)), dir);

  SimulateSummary summary;
  summary.output_dir = dir;
  summary.work_rows = run.work.size();
  summary.wall_seconds = seconds_since(start);
  write_run_log(dir, {{"merged_shards", shards.size()}, {"wall_seconds", summary.wall_seconds}});
  return summary;
}

OracleKind parse_oracle(const std::string& name) {
  if (name == "uniform") return OracleKind::uniform;
  if (name == "golden_rule" || name == "golden-rule") return OracleKind::golden_rule;
  if (name == "cl_asymptote" || name == "cl-asymptote") return OracleKind::cl_asymptote;
  throw ConfigError("unknown oracle '" + name + "' (expected uniform, golden_rule or cl_asymptote)");
}

const char* to_string(OracleKind kind) noexcept {
  switch (kind) {
    case OracleKind::uniform: return "uniform";
    case OracleKind::golden_rule: return "golden_rule";
    case OracleKind::cl_asymptote: return "cl_asymptote";
  }
  return "?";
}

bool OracleReport::pass() const {
  return !lines.empty() &&
         std::all_of(lines.begin(), lines.end(), [](const OracleLine& l) { return l.pass; });
}

namespace {

OracleReport compare_uniform(const PreparedRun& run, const RunResult& res) {
  OracleReport rep;
  rep.kind = OracleKind::uniform;
  const auto& op = *run.op;
  const std::size_t center = run.grid.size() / 2;
  double gamma0 = 0.0;
  for (const auto& e : op.coupling()) {
    if (e.index == center) gamma0 = e.value.real();
  }
  const double tol = run.config.compare.uniform;
  for (std::size_t ti = 0; ti < res.times.size(); ++ti) {
    const auto& table = res.modes[ti];
    double max_n = 0, max_m = 0, max_pair = 0, sum_n = 0, sum_m = 0, sum_pair = 0;
    for (const auto& p : table.pairs) {
      const auto ref = uniform_moments({gamma0, op.delta()[p.k], op.q()}, res.times[ti]);
      const double n = table.occupations[p.k].second;
      const double en = std::abs(n - ref.n) / std::max(std::abs(ref.n), kOccupationFloor);
      const double em = std::abs(p.anomalous - ref.m) / std::max(std::abs(ref.m), kOccupationFloor);
      const double ep = std::abs(pair_identity_residual(n, p.anomalous, op.q()));
      max_n = std::max(max_n, en);
      max_m = std::max(max_m, em);
      max_pair = std::max(max_pair, ep);
      sum_n += en * en;
      sum_m += em * em;
      sum_pair += ep * ep;
    }
    const double cnt = static_cast<double>(std::max<std::size_t>(table.pairs.size(), 1));
    rep.lines.push_back({res.times[ti], "n_k relative", max_n, std::sqrt(sum_n / cnt), tol, max_n <= tol});
    rep.lines.push_back({res.times[ti], "m_k relative", max_m, std::sqrt(sum_m / cnt), tol, max_m <= tol});
    rep.lines.push_back({res.times[ti], "|m|^2 - n(1+qn)", max_pair, std::sqrt(sum_pair / cnt), 1e-10,
                         max_pair <= 1e-10});
  }
  return rep;
}

OracleReport compare_golden(const PreparedRun& run, const RunResult& res) {
  OracleReport rep;
  rep.kind = OracleKind::golden_rule;
  const auto& phys = run.config.physics;
  const double lambda = golden_rule_rate(phys);
  const double expected = run.molecule_number * lambda;  // atoms per spin per second
  std::vector<double> ts, ns;
  for (std::size_t ti = 0; ti < res.times.size(); ++ti) {
    if (res.times[ti] >= 0.05 - 1e-12 && res.times[ti] <= 0.3 + 1e-12) {
      ts.push_back(res.times[ti] * phys.t0);
      ns.push_back(res.atoms_per_spin[ti]);
    }
  }
  if (ts.size() < 2) throw ConfigError("golden_rule needs at least two times in [0.05, 0.3] t0");
  const double tm = pairwise_sum(ts) / static_cast<double>(ts.size());
  const double nm = pairwise_sum(ns) / static_cast<double>(ns.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    sxy += (ts[i] - tm) * (ns[i] - nm);
    sxx += (ts[i] - tm) * (ts[i] - tm);
  }
  const double slope = sxy / sxx;
  const double ratio = slope / expected;
  const double f = run.config.compare.golden_rule_factor;
  rep.lines.push_back({-1.0, "slope / (N0 lambda)", ratio, ratio, f, ratio >= 1.0 / f && ratio <= f});
  double max_conv = 0.0;
  for (std::size_t ti = 0; ti < res.times.size(); ++ti) {
    if (res.times[ti] <= 1.0 + 1e-12) {
      max_conv = std::max(max_conv, res.atoms_per_spin[ti] / run.molecule_number);
    }
  }
  rep.lines.push_back({-1.0, "conversion N/N0 for t <= t0", max_conv, max_conv, 0.01, max_conv < 0.01});
  char buf[200];
  std::snprintf(buf, sizeof buf, "N0 = %.6g, lambda = %.6g 1/s, fitted slope = %.6g atoms/s per spin",
                run.molecule_number, lambda, slope);
  rep.notes.emplace_back(buf);
  return rep;
}

constexpr double kFirstZeroJ52 = 5.763459196894550;

OracleReport compare_cl(const PreparedRun& run, const RunResult& res) {
  OracleReport rep;
  rep.kind = OracleKind::cl_asymptote;
  const auto& radii = run.config.condensate.tf_radii;
  const int q = run.op->q();
  const double tol = run.config.compare.cl_asymptote;
  for (std::size_t s = 0; s < run.slices.size(); ++s) {
    const int axis = run.slices[s].spec.axis;
    const double radius = radii[static_cast<std::size_t>(axis)];
    const double kref = run.grid.momentum_of(run.slices[s].reference)[static_cast<std::size_t>(axis)];
    for (std::size_t ti = 0; ti < res.times.size(); ++ti) {
      double mx = 0.0, sum = 0.0;
      std::size_t cnt = 0;
      for (const auto& pt : res.slices[s][ti].points) {
        const double d = pt.momentum - kref;
        if (!pt.g2 || std::abs(d) * radius > kFirstZeroJ52) continue;
        const double e = std::abs(*pt.g2 - cl_asymptote(d, radius, q));
        mx = std::max(mx, e);
        sum += e * e;
        ++cnt;
      }
      rep.lines.push_back({res.times[ti], "g2 vs asymptote (" + run.slices[s].spec.label + ")", mx,
                           cnt ? std::sqrt(sum / static_cast<double>(cnt)) : 0.0, tol,
                           cnt > 0 && mx <= tol});
    }
  }
  rep.notes.emplace_back("asymptote is a short-time limit; agreement is qualitative");
  return rep;
}

}  // namespace

OracleReport compare_oracle(const PreparedRun& run, OracleKind kind, int threads) {
  const auto& cfg = run.config;
  switch (kind) {
    case OracleKind::uniform:
      if (cfg.condensate.kind != CondensateKind::uniform || run.op->symmetry() != Symmetry::uniform) {
        throw ConfigError("the uniform oracle needs a uniform condensate");
      }
      if (!cfg.observables.modes) throw ConfigError("the uniform oracle needs observables.modes");
      break;
    case OracleKind::golden_rule:
      if (cfg.dimension != 3) {
        throw ConfigError("the golden-rule rate is three-dimensional; this config has D = " +
                          std::to_string(cfg.dimension));
      }
      if (!cfg.observables.total_number) throw ConfigError("the golden-rule oracle needs observables.total_number");
      break;
    case OracleKind::cl_asymptote:
      if (cfg.condensate.kind != CondensateKind::thomas_fermi) {
        throw ConfigError("the collinear asymptote needs a Thomas-Fermi condensate");
      }
      if (run.slices.empty()) throw ConfigError("the collinear asymptote needs observables.cl_slices");
      break;
  }
  auto records = compute_records(run, {0, run.work.size()}, threads);
  const RunResult res = assemble(run, std::move(records));
  switch (kind) {
    case OracleKind::uniform: return compare_uniform(run, res);
    case OracleKind::golden_rule: return compare_golden(run, res);
    case OracleKind::cl_asymptote: return compare_cl(run, res);
  }
  return {};
}

OracleReport compare_oracle(const fs::path& config_path, OracleKind kind, const RunOverrides& overrides) {
  const fs::path base = fs::absolute(config_path).parent_path();
  std::string text = read_text(config_path);
  RunConfig cfg = parse_config(text, base);
  cfg.shard.reset();
  if (overrides.threads) cfg.threads = *overrides.threads;
  // Request exactly what the oracle reads.
  ObservableSpec obs;
  if (kind == OracleKind::uniform) obs.modes = true;
  if (kind == OracleKind::golden_rule) {
    if (cfg.dimension != 3) {
      throw ConfigError("the golden-rule rate is three-dimensional; this config has D = " +
                        std::to_string(cfg.dimension));
    }
    obs.total_number = true;
  }
  if (kind == OracleKind::cl_asymptote) obs.slices = cfg.observables.slices;
  cfg.observables = obs;
  const PreparedRun run = prepare_run(cfg, text, base);
  return compare_oracle(run, kind, run.config.threads);
}

void write_report(std::ostream& out, const OracleReport& report) {
  out << "oracle,t_over_t0,quantity,max_residual,rms_residual,tolerance,result\n";
  for (const auto& l : report.lines) {
    out << to_string(report.kind) << ',' << (l.time < 0 ? std::string("all") : fmt(l.time)) << ','
        << l.quantity << ',' << fmt(l.max_residual) << ',' << fmt(l.rms_residual) << ','
        << fmt(l.tolerance) << ',' << (l.pass ? "pass" : "fail") << '\n';
  }
  for (const auto& n : report.notes) out << "# " << n << '\n';
  out << "# overall: " << (report.pass() ? "pass" : "fail") << '\n';
}

}  // namespace fermibose
