#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "fermibose/krylov.hpp"
#include "fermibose/lattice.hpp"
#include "fermibose/rows.hpp"

namespace fermibose {

/// Result of one computed row across all run times.
struct RowRecord {
  std::size_t work_index = 0;  ///< position in the run's work list
  RowRequest row;
  ExpvStats stats;
  std::vector<double> norm2;  ///< ||right part||^2 per time (the occupation for upper rows)
  /// Full row data per time; empty unless the row feeds a table.
  std::vector<Eigen::VectorXcd> left;
  std::vector<Eigen::VectorXcd> right;
};

struct ShardHeader {
  std::string config_text;     ///< YAML the run was configured with
  std::string config_base;     ///< directory relative file references resolve against
  std::uint64_t config_hash = 0;
  std::uint64_t grid_hash = 0;
  std::vector<double> times;
  std::size_t work_rows = 0;   ///< size of the full work list
  std::size_t row_start = 0;   ///< [row_start, row_end) of the work list held here
  std::size_t row_end = 0;
  std::size_t block_size = 0;  ///< n, the length of each stored row vector
};

struct ShardFile {
  ShardHeader header;
  std::vector<RowRecord> records;
};

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::uint64_t grid_hash(const GridSpec& grid);

/// One JSON header line followed by native-endian binary records.
void write_shard(std::ostream& out, const ShardHeader& header, const std::vector<RowRecord>& records);
/// Throws ConfigError on a malformed or truncated file.
ShardFile read_shard(std::istream& in);

/// "shard_<start>_<end>.bin" with zero-padded bounds so names sort by range.
std::string shard_file_name(std::size_t start, std::size_t end);

}  // namespace fermibose
