#include "fermibose/shard.hpp"

#include <nlohmann/json.hpp>

#include <bit>
#include <cstdio>
#include <istream>
#include <ostream>

#include "fermibose/errors.hpp"

namespace fermibose {

namespace {

constexpr const char* kFormat = "fermibose-shard/1";

template <class T>
void put(std::ostream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
T take(std::istream& in) {
  T value{};
  if (!in.read(reinterpret_cast<char*>(&value), sizeof(T))) {
    throw ConfigError("shard file is truncated");
  }
  return value;
}

void put_vector(std::ostream& out, const Eigen::VectorXcd& v) {
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(Complex)));
}

Eigen::VectorXcd take_vector(std::istream& in, std::size_t n) {
  Eigen::VectorXcd v(static_cast<Eigen::Index>(n));
  if (!in.read(reinterpret_cast<char*>(v.data()),
               static_cast<std::streamsize>(n * sizeof(Complex)))) {
    throw ConfigError("shard file is truncated");
  }
  return v;
}

}  // namespace

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t grid_hash(const GridSpec& grid) {
  std::uint64_t h = fnv1a("grid");
  auto mix = [&](const auto& x) {
    h = fnv1a(std::string_view(reinterpret_cast<const char*>(&x), sizeof(x)), h);
  };
  mix(grid.dimension());
  mix(grid.half_width());
  mix(grid.spacing());
  mix(grid.box_length());
  return h;
}

std::string shard_file_name(std::size_t start, std::size_t end) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "shard_%09zu_%09zu.bin", start, end);
  return buf;
}

void write_shard(std::ostream& out, const ShardHeader& header, const std::vector<RowRecord>& records) {
  nlohmann::json h;
  h["format"] = kFormat;
  h["endian"] = std::endian::native == std::endian::little ? "little" : "big";
  h["config_text"] = header.config_text;
  h["config_base"] = header.config_base;
  h["config_hash"] = header.config_hash;
  h["grid_hash"] = header.grid_hash;
  h["times"] = header.times;
  h["work_rows"] = header.work_rows;
  h["row_start"] = header.row_start;
  h["row_end"] = header.row_end;
  h["block_size"] = header.block_size;
  h["records"] = records.size();
  out << h.dump() << '\n';

  const std::size_t nt = header.times.size();
  for (const auto& r : records) {
    if (r.norm2.size() != nt) throw std::logic_error("record time count mismatch");
    put<std::uint64_t>(out, r.work_index);
    put<std::uint8_t>(out, static_cast<std::uint8_t>(r.row.block));
    put<std::uint64_t>(out, r.row.index);
    put<std::int64_t>(out, r.stats.substeps);
    put<std::int64_t>(out, r.stats.rejections);
    put<std::int64_t>(out, r.stats.matvecs);
    put<double>(out, r.stats.error_estimate);
    const bool keep = !r.left.empty();
    put<std::uint8_t>(out, keep ? 1 : 0);
    for (std::size_t ti = 0; ti < nt; ++ti) {
      put<double>(out, r.norm2[ti]);
      if (keep) {
        put_vector(out, r.left[ti]);
        put_vector(out, r.right[ti]);
      }
    }
  }
  if (!out) throw std::runtime_error("failed writing shard");
}

ShardFile read_shard(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty shard file");
  nlohmann::json h;
  try {
    h = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("shard header is not valid JSON: ") + e.what());
  }
  ShardFile f;
  try {
    if (h.at("format").get<std::string>() != kFormat) throw ConfigError("unknown shard format");
    const std::string endian = std::endian::native == std::endian::little ? "little" : "big";
    if (h.at("endian").get<std::string>() != endian) {
      throw ConfigError("shard was written with a different byte order");
    }
    f.header.config_text = h.at("config_text").get<std::string>();
    f.header.config_base = h.at("config_base").get<std::string>();
    f.header.config_hash = h.at("config_hash").get<std::uint64_t>();
    f.header.grid_hash = h.at("grid_hash").get<std::uint64_t>();
    f.header.times = h.at("times").get<std::vector<double>>();
    f.header.work_rows = h.at("work_rows").get<std::size_t>();
    f.header.row_start = h.at("row_start").get<std::size_t>();
    f.header.row_end = h.at("row_end").get<std::size_t>();
    f.header.block_size = h.at("block_size").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("shard header: ") + e.what());
  }
  const std::size_t count = h.at("records").get<std::size_t>();
  const std::size_t nt = f.header.times.size();
  const std::size_t n = f.header.block_size;
  f.records.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    RowRecord r;
    r.work_index = take<std::uint64_t>(in);
    r.row.block = static_cast<BlockRow>(take<std::uint8_t>(in));
    r.row.index = take<std::uint64_t>(in);
    r.stats.substeps = static_cast<long>(take<std::int64_t>(in));
    r.stats.rejections = static_cast<long>(take<std::int64_t>(in));
    r.stats.matvecs = static_cast<long>(take<std::int64_t>(in));
    r.stats.error_estimate = take<double>(in);
    const bool keep = take<std::uint8_t>(in) != 0;
    for (std::size_t ti = 0; ti < nt; ++ti) {
      r.norm2.push_back(take<double>(in));
      if (keep) {
        r.left.push_back(take_vector(in, n));
        r.right.push_back(take_vector(in, n));
      }
    }
    f.records.push_back(std::move(r));
  }
  return f;
}

}  // namespace fermibose
