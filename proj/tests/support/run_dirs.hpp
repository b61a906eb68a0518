#pragma once

// Helpers for tests that run whole configurations on disk.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

namespace rundirs {

namespace fs = std::filesystem;

/// Fresh empty directory under the system temp dir.
inline fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("fermibose_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

inline fs::path write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
  return path;
}

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Contents of every .csv and manifest.json in `dir`, keyed by file name.
inline std::map<std::string, std::string> result_files(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    const auto name = e.path().filename().string();
    if (e.path().extension() == ".csv" || name == "manifest.json") out[name] = read_file(e.path());
  }
  return out;
}

/// Sets the output root for the lifetime of the object.
class OutputRoot {
public:
  explicit OutputRoot(const fs::path& root) {
    if (const char* old = std::getenv("FERMIBOSE_OUTPUT_ROOT")) previous_ = old, had_ = true;
    ::setenv("FERMIBOSE_OUTPUT_ROOT", root.c_str(), 1);
  }
  ~OutputRoot() {
    if (had_) {
      ::setenv("FERMIBOSE_OUTPUT_ROOT", previous_.c_str(), 1);
    } else {
      ::unsetenv("FERMIBOSE_OUTPUT_ROOT");
    }
  }
  OutputRoot(const OutputRoot&) = delete;
  OutputRoot& operator=(const OutputRoot&) = delete;

private:
  std::string previous_;
  bool had_ = false;
};

/// Small two-dimensional Thomas-Fermi run that exercises every table.
inline std::string tf2d_config(const std::string& statistics = "fermion",
                               const std::string& times = "[0.0, 0.5, 1.0]") {
  return R"(name: tf2d
grid:
  dimension: 2
  half_width: 4
  dk_per_m: 2.8e5
physics:
  statistics: )" + statistics + R"(
  atom_mass_kg: 6.642e-26
  Omega_per_s: -1.0e3
  chi_m_halfD_per_s: 2.0e-5
  t0_s: 1.0e-3
condensate:
  kind: thomas_fermi
  rho0_per_m_D: 1.0e15
  tf_radii_m: [5.0e-6, 3.0e-6]
times_t0: )" + times + R"(
observables:
  modes: true
  pairs:
    - [[2, 1], [-2, -1]]
    - [[2, 1], [3, 1]]
  cl_slices:
    - {axis: 1, k_ref: [2, 0], label: x}
    - {axis: 2, k_ref: [2, 0], label: y}
  total_number: true
krylov:
  tol: 1.0e-10
threads: 1
output_dir: out
)";
}

}  // namespace rundirs
