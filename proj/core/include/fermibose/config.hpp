#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fermibose/condensate.hpp"
#include "fermibose/krylov.hpp"
#include "fermibose/lattice.hpp"
#include "fermibose/system_operator.hpp"

namespace fermibose {

/// Collinear slice request: line along `axis` (0-based) through `reference`.
struct SliceSpec {
  int axis = 0;
  MultiIndex reference;
  std::string label;
};

struct ObservableSpec {
  /// n_k, m_{k,-k} and the pair g2 for every lattice mode (small grids).
  bool modes = false;
  /// Explicit (k, k') pairs as lattice multi-indices.
  std::vector<std::pair<MultiIndex, MultiIndex>> pairs;
  std::vector<SliceSpec> slices;
  bool total_number = false;
};

/// Half-open range [start, end) into the run's ordered work list of rows.
struct ShardRange {
  std::size_t start = 0;
  std::size_t end = 0;
};

struct CompareTolerances {
  double uniform = 1e-8;             ///< max relative error of n_k and m_k
  double golden_rule_factor = 2.0;   ///< slope may differ by at most this factor
  double cl_asymptote = 0.25;        ///< max |g2 - asymptote| on the central dip
};

struct RunConfig {
  std::string name = "run";
  std::filesystem::path source;  ///< file the config was read from, if any

  int dimension = 1;
  int half_width = 0;
  std::optional<double> box_length;  ///< m
  std::optional<double> spacing;     ///< 1/m

  PhysicalParams physics;
  CondensateSpec condensate;
  std::string phase_file;    ///< as written in the config
  std::string samples_file;  ///< as written in the config

  double rel_threshold = 0.0;
  std::vector<double> times;  ///< t / t0, strictly increasing
  ObservableSpec observables;
  KrylovConfig krylov;
  MatvecMode matvec = MatvecMode::automatic;
  std::optional<ShardRange> shard;
  int threads = 0;  ///< <= 0: hardware concurrency
  std::string output_dir;
  CompareTolerances compare;
  double symmetry_tolerance = kDefaultSymmetryTolerance;

  GridSpec grid() const;
};

/// Parses YAML text. Relative file references resolve against `base_dir`.
/// Throws ConfigError naming the offending field.
RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = ".");
RunConfig load_config(const std::filesystem::path& path);

/// Range checks that need no I/O (also run by parse_config).
void validate(const RunConfig& cfg);

const char* to_string(MatvecMode mode) noexcept;

}  // namespace fermibose
