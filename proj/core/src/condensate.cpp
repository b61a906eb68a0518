#include "fermibose/condensate.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "fermibose/errors.hpp"
#include "fft.hpp"

namespace fermibose {

std::string_view to_string(Symmetry s) noexcept {
  switch (s) {
    case Symmetry::general_complex: return "general_complex";
    case Symmetry::real_psi: return "real_psi";
    case Symmetry::real_even_psi: return "real_even_psi";
    case Symmetry::uniform: return "uniform";
  }
  return "general_complex";
}

Symmetry parse_symmetry(std::string_view name) {
  for (Symmetry s : {Symmetry::general_complex, Symmetry::real_psi, Symmetry::real_even_psi,
                     Symmetry::uniform}) {
    if (to_string(s) == name) return s;
  }
  throw std::invalid_argument("unknown symmetry class '" + std::string(name) + "'");
}

double site_position(int n, const GridSpec& grid) noexcept {
  return static_cast<double>(n) * grid.box_length() / grid.points_per_axis();
}

namespace {

// Position of lattice site m inside an FFT array of extent B per axis with the
// zero frequency (or x = 0) at offset 0.
std::vector<std::size_t> wrapped_positions(const GridSpec& grid) {
  const int b = grid.points_per_axis();
  std::vector<std::size_t> pos(grid.size());
  MultiIndex n(static_cast<std::size_t>(grid.dimension()));
  for (std::size_t m = 0; m < grid.size(); ++m) {
    grid.unflatten_into(m, n);
    std::size_t p = 0;
    for (int axis = 0; axis < grid.dimension(); ++axis) {
      p = p * static_cast<std::size_t>(b) + static_cast<std::size_t>((n[axis] + b) % b);
    }
    pos[m] = p;
  }
  return pos;
}

std::vector<int> fft_dims(const GridSpec& grid) {
  return std::vector<int>(static_cast<std::size_t>(grid.dimension()), grid.points_per_axis());
}

}  // namespace

Field build_condensate(const CondensateSpec& spec, const GridSpec& grid) {
  const std::size_t n = grid.size();
  const auto d = static_cast<std::size_t>(grid.dimension());
  if (!spec.phase.empty() && spec.phase.size() != n) {
    throw ConfigError("phase has " + std::to_string(spec.phase.size()) + " samples, grid has " +
                      std::to_string(n));
  }

  Field field(n);
  switch (spec.kind) {
    case CondensateKind::uniform: {
      if (!(spec.peak_density > 0.0)) throw ConfigError("rho0 must be positive");
      std::fill(field.begin(), field.end(), Complex(std::sqrt(spec.peak_density), 0.0));
      break;
    }
    case CondensateKind::thomas_fermi: {
      if (!(spec.peak_density > 0.0)) throw ConfigError("rho0 must be positive");
      if (spec.tf_radii.size() != d) {
        throw ConfigError("thomas_fermi needs " + std::to_string(d) + " radii, got " +
                          std::to_string(spec.tf_radii.size()));
      }
      for (std::size_t axis = 0; axis < d; ++axis) {
        const double r = spec.tf_radii[axis];
        if (!(r > 0.0)) throw ConfigError("Thomas-Fermi radii must be positive");
        if (2.0 * r >= grid.box_length()) {
          throw ConfigError("condensate diameter " + std::to_string(2.0 * r) + " m on axis " +
                            std::to_string(axis + 1) + " does not fit in box of length " +
                            std::to_string(grid.box_length()) + " m");
        }
      }
      MultiIndex site(d);
      for (std::size_t m = 0; m < n; ++m) {
        grid.unflatten_into(m, site);
        double s = 1.0;
        for (std::size_t axis = 0; axis < d; ++axis) {
          const double x = site_position(site[axis], grid) / spec.tf_radii[axis];
          s -= x * x;
        }
        field[m] = Complex(s > 0.0 ? std::sqrt(spec.peak_density * s) : 0.0, 0.0);
      }
      break;
    }
    case CondensateKind::grid_samples: {
      if (spec.samples.size() != n) {
        throw ConfigError("grid_samples has " + std::to_string(spec.samples.size()) +
                          " values, grid has " + std::to_string(n));
      }
      field = spec.samples;
      break;
    }
  }
  if (!spec.phase.empty()) {
    for (std::size_t m = 0; m < n; ++m) field[m] *= std::polar(1.0, spec.phase[m]);
  }
  return field;
}

Symmetry classify_symmetry(const GridSpec& grid, std::span<const FourierEntry> entries,
                           double tol_sym) {
  double lead = 0.0;
  for (const auto& e : entries) lead = std::max(lead, std::abs(e.value));
  if (lead == 0.0) return Symmetry::uniform;
  const double tol = tol_sym * lead;

  auto lookup = [&](std::size_t m) -> Complex {
    auto it = std::lower_bound(entries.begin(), entries.end(), m,
                               [](const FourierEntry& e, std::size_t key) { return e.index < key; });
    return (it != entries.end() && it->index == m) ? it->value : Complex{};
  };

  bool real = true;
  bool even = true;
  bool uniform = true;
  const std::size_t centre = grid.size() / 2;
  for (const auto& e : entries) {
    if (std::abs(lookup(grid.negate(e.index)) - std::conj(e.value)) > tol) real = false;
    if (std::abs(e.value.imag()) > tol) even = false;
    if (e.index != centre && std::abs(e.value) > tol) uniform = false;
  }
  if (uniform && even) return Symmetry::uniform;
  if (real && even) return Symmetry::real_even_psi;
  if (real) return Symmetry::real_psi;
  return Symmetry::general_complex;
}

bool axis_mirror_symmetric(const GridSpec& grid, std::span<const FourierEntry> entries,
                           double tol_sym) {
  double lead = 0.0;
  for (const auto& e : entries) lead = std::max(lead, std::abs(e.value));
  const double tol = tol_sym * lead;
  auto lookup = [&](std::size_t m) -> Complex {
    auto it = std::lower_bound(entries.begin(), entries.end(), m,
                               [](const FourierEntry& e, std::size_t key) { return e.index < key; });
    return (it != entries.end() && it->index == m) ? it->value : Complex{};
  };
  MultiIndex n(static_cast<std::size_t>(grid.dimension()));
  for (const auto& e : entries) {
    grid.unflatten_into(e.index, n);
    for (auto& c : n) {
      c = -c;
      if (std::abs(lookup(grid.flatten(n)) - e.value) > tol) return false;
      c = -c;
    }
  }
  return true;
}

FourierTensor FourierTensor::from_entries(const GridSpec& grid, std::vector<FourierEntry> entries,
                                          double tol_sym) {
  std::sort(entries.begin(), entries.end(),
            [](const FourierEntry& a, const FourierEntry& b) { return a.index < b.index; });
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].index >= grid.size()) {
      throw std::domain_error("coefficient index " + std::to_string(entries[i].index + 1) +
                              " outside lattice");
    }
    if (i > 0 && entries[i].index == entries[i - 1].index) {
      throw std::domain_error("duplicate coefficient at index " +
                              std::to_string(entries[i].index + 1));
    }
  }
  std::erase_if(entries, [](const FourierEntry& e) { return e.value == Complex{}; });

  FourierTensor t;
  t.grid_ = grid;
  t.symmetry_ = classify_symmetry(grid, entries, tol_sym);
  for (const auto& e : entries) t.leading_modulus_ = std::max(t.leading_modulus_, std::abs(e.value));
  if (t.symmetry_ == Symmetry::uniform) {
    // Project onto the single k = 0 coefficient the class promises.
    const std::size_t centre = grid.size() / 2;
    std::erase_if(entries, [centre](const FourierEntry& e) { return e.index != centre; });
    for (auto& e : entries) e.value = Complex(e.value.real(), 0.0);
  }
  t.entries_ = std::move(entries);
  return t;
}

Complex FourierTensor::at(std::size_t m) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), m,
                             [](const FourierEntry& e, std::size_t key) { return e.index < key; });
  return (it != entries_.end() && it->index == m) ? it->value : Complex{};
}

FourierTensor fourier_coefficients(std::span<const Complex> field, const GridSpec& grid,
                                   double tol_sym) {
  if (field.size() != grid.size()) {
    throw std::domain_error("field has " + std::to_string(field.size()) + " samples, grid has " +
                            std::to_string(grid.size()));
  }
  const auto pos = wrapped_positions(grid);
  detail::FftBuffer buf(grid.size());
  for (std::size_t m = 0; m < grid.size(); ++m) buf[pos[m]] = field[m];
  detail::FftPlan(fft_dims(grid), FFTW_FORWARD).execute(buf);

  const double d = grid.dimension();
  const double scale =
      std::pow(grid.box_length(), -0.5 * d) * std::pow(grid.box_length() / grid.points_per_axis(), d);
  std::vector<FourierEntry> entries;
  entries.reserve(grid.size());
  for (std::size_t m = 0; m < grid.size(); ++m) entries.push_back({m, scale * buf[pos[m]]});
  return FourierTensor::from_entries(grid, std::move(entries), tol_sym);
}

FourierTensor truncate_coefficients(const FourierTensor& tensor, double rel_threshold) {
  if (!(rel_threshold >= 0.0 && rel_threshold < 1.0)) {
    throw std::domain_error("truncation threshold must lie in [0, 1)");
  }
  FourierTensor out = tensor;
  const double cut = rel_threshold * tensor.leading_modulus();
  std::erase_if(out.entries_, [cut](const FourierEntry& e) { return std::abs(e.value) < cut; });
  return out;
}

Field reconstruct_density(const FourierTensor& tensor, const GridSpec& grid) {
  if (!(tensor.grid() == grid)) throw std::domain_error("tensor was built on a different grid");
  const auto pos = wrapped_positions(grid);
  detail::FftBuffer buf(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) buf[i] = Complex{};
  for (const auto& e : tensor.entries()) buf[pos[e.index]] = e.value;
  detail::FftPlan(fft_dims(grid), FFTW_BACKWARD).execute(buf);

  const double scale = std::pow(grid.box_length(), -0.5 * grid.dimension());
  Field field(grid.size());
  for (std::size_t m = 0; m < grid.size(); ++m) field[m] = scale * buf[pos[m]];
  return field;
}

Field read_field_samples(std::istream& in, const GridSpec& grid) {
  const auto d = static_cast<std::size_t>(grid.dimension());
  Field field(grid.size());
  std::vector<bool> seen(grid.size(), false);
  std::size_t count = 0;
  std::string line;
  std::size_t line_no = 0;
  MultiIndex n(d);
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    std::istringstream ls(line);
    for (std::size_t axis = 0; axis < d; ++axis) ls >> n[axis];
    double re = 0.0;
    double im = 0.0;
    ls >> re >> im;
    if (!ls) throw ConfigError("malformed sample on line " + std::to_string(line_no));
    const std::size_t m = grid.flatten(n);
    if (seen[m]) throw ConfigError("duplicate sample on line " + std::to_string(line_no));
    seen[m] = true;
    field[m] = Complex(re, im);
    ++count;
  }
  if (count != grid.size()) {
    throw ConfigError("expected " + std::to_string(grid.size()) + " samples, read " +
                      std::to_string(count));
  }
  return field;
}

void write_fourier_tensor(std::ostream& out, const FourierTensor& tensor) {
  const auto old_precision = out.precision(17);
  MultiIndex n(static_cast<std::size_t>(tensor.grid().dimension()));
  for (const auto& e : tensor.entries()) {
    tensor.grid().unflatten_into(e.index, n);
    for (int c : n) out << c << ' ';
    out << e.value.real() << ' ' << e.value.imag() << '\n';
  }
  out.precision(old_precision);
}

}  // namespace fermibose
