#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <string>

#include "run_dirs.hpp"

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(FERMIBOSE_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("exit codes") {
    const auto dir = rundirs::fresh_dir("cli");
    rundirs::OutputRoot root(dir);
    const auto good = rundirs::write_file(dir / "good.yaml", rundirs::tf2d_config("boson", "[0.5]"));
    const auto bad = rundirs::write_file(dir / "bad.yaml", "grid: {dimension: 7}\n");
    const auto uniform = rundirs::write_file(dir / "u.yaml", R"(name: u
grid: {dimension: 1, half_width: 6, dk_per_m: 1.1e5}
physics: {statistics: fermion, atom_mass_kg: 6.642e-26, Omega_per_s: -4.0e3, chi_m_halfD_per_s: 0.1}
condensate: {kind: uniform, rho0_per_m_D: 1.0e8}
times_t0: [0.5]
krylov: {tol: 1.0e-12}
compare: {uniform_rel_tol: 1.0e-30}
)");
    CHECK(run("--help") == 0);
    CHECK(run("") != 0);
    CHECK(run("simulate " + good.string()) == 0);
    CHECK(std::filesystem::exists(dir / "out" / "manifest.json"));
    CHECK(run("simulate " + bad.string()) == 2);
    CHECK(run("simulate " + (dir / "missing.yaml").string()) == 2);
    CHECK(run("simulate " + good.string() + " --row-start 0 --row-end 100000") == 2);
    CHECK(run("merge " + (dir / "nothing").string()) == 2);
    CHECK(run("compare-oracle " + uniform.string() + " --oracle uniform") == 3);  // impossible tolerance
    CHECK(run("compare-oracle " + good.string() + " --oracle golden_rule") == 2);  // not 3-D
    CHECK(run("compare-oracle " + good.string() + " --oracle tarot") == 2);
    CHECK(run("frobnicate") == 2);
    std::filesystem::remove_all(dir);
  }
}
