#include "doctest.h"

#include <fstream>
#include <sstream>

#include "fermibose/errors.hpp"
#include "fermibose/pipeline.hpp"
#include "run_dirs.hpp"

using namespace fermibose;
namespace fs = std::filesystem;

namespace {

std::size_t work_rows(const fs::path& config) { return prepare_run(config).work.size(); }

}  // namespace

TEST_SUITE("pipeline") {
  TEST_CASE("sharded runs merge to the unsharded result byte for byte") {
    const auto dir = rundirs::fresh_dir("pipeline_shards");
    const auto config = rundirs::write_file(dir / "tf2d.yaml", rundirs::tf2d_config());
    const std::size_t rows = work_rows(config);
    REQUIRE(rows > 4);

    {
      rundirs::OutputRoot root(dir / "whole");
      const auto s = simulate(config);
      CHECK_FALSE(s.sharded);
      CHECK(s.work_rows == rows);
      CHECK(s.output_dir == dir / "whole" / "out");
    }
    const auto whole = rundirs::result_files(dir / "whole" / "out");
    CHECK(whole.count("manifest.json") == 1);
    CHECK(whole.count("modes_t000.csv") == 1);
    CHECK(whole.count("pairs_t002.csv") == 1);
    CHECK(whole.count("cl_x_t001.csv") == 1);
    CHECK(whole.count("cl_y_t001.csv") == 1);
    CHECK(whole.count("atom_number.csv") == 1);
    CHECK(fs::exists(dir / "whole" / "out" / "run_log.json"));

    {
      rundirs::OutputRoot root(dir / "split");
      const std::size_t cuts[] = {0, rows / 3, rows / 3 + 1, rows};
      for (int i = 0; i < 3; ++i) {
        RunOverrides o;
        o.row_start = cuts[i];
        o.row_end = cuts[i + 1];
        const auto s = simulate(config, o);
        CHECK(s.sharded);
      }
      merge(dir / "split" / "out");
    }
    CHECK(rundirs::result_files(dir / "split" / "out") == whole);
    fs::remove_all(dir);
  }

  TEST_CASE("merge reports gaps, overlaps and foreign shards") {
    const auto dir = rundirs::fresh_dir("pipeline_merge");
    const auto config = rundirs::write_file(dir / "tf2d.yaml", rundirs::tf2d_config("fermion", "[0.5]"));
    const std::size_t rows = work_rows(config);
    rundirs::OutputRoot root(dir);
    auto shard = [&](std::size_t a, std::size_t b) {
      RunOverrides o;
      o.row_start = a;
      o.row_end = b;
      simulate(config, o);
    };
    shard(0, 2);
    shard(3, rows);
    CHECK_THROWS_WITH_AS(merge(dir / "out"), doctest::Contains("rows 2..2 missing"), ConfigError);
    shard(1, 3);
    CHECK_THROWS_WITH_AS(merge(dir / "out"), doctest::Contains("covered more than once"), ConfigError);
    fs::remove(dir / "out" / shard_file_name(1, 3));
    shard(2, 3);
    CHECK_NOTHROW(merge(dir / "out"));

    const auto other = rundirs::write_file(dir / "other.yaml", rundirs::tf2d_config("boson", "[0.5]"));
    {
      RunOverrides o;
      o.row_start = rows;
      o.row_end = rows + 1;
      // the boson run writes to the same directory but has a different hash
      CHECK_THROWS_AS(simulate(other, o), ConfigError);  // beyond the work list
      o.row_start = 0;
      o.row_end = 1;
      simulate(other, o);
    }
    CHECK_THROWS_WITH_AS(merge(dir / "out"), doctest::Contains("different configuration"), ConfigError);
    CHECK_THROWS_AS(merge(dir / "nowhere"), ConfigError);
    fs::remove_all(dir);
  }

  TEST_CASE("vacuum at t = 0 gives undefined correlations") {
    const auto dir = rundirs::fresh_dir("pipeline_vacuum");
    const auto config = rundirs::write_file(dir / "tf2d.yaml", rundirs::tf2d_config());
    rundirs::OutputRoot root(dir);
    simulate(config);
    std::ifstream in(dir / "out" / "cl_x_t000.csv");
    std::string header, line;
    std::getline(in, header);
    CHECK(header == "t_over_t0,k_axis_per_m,k1_per_m,k2_per_m,n_k,g2_same");
    int rows = 0;
    while (std::getline(in, line)) {
      ++rows;
      CHECK(line.find(",0,undefined") != std::string::npos);
    }
    CHECK(rows == 9);
    const auto atoms = rundirs::read_file(dir / "out" / "atom_number.csv");
    CHECK(atoms.find("\n0,0,0,0,0\n") != std::string::npos);
    fs::remove_all(dir);
  }

  TEST_CASE("fermionic slices dip to zero at the reference") {
    const auto dir = rundirs::fresh_dir("pipeline_dip");
    const auto config = rundirs::write_file(dir / "tf2d.yaml", rundirs::tf2d_config("fermion", "[1.0]"));
    const auto run = prepare_run(config);
    const auto res = assemble(run, compute_records(run, {0, run.work.size()}, 1));
    REQUIRE(res.slices.size() == 2);
    for (const auto& s : res.slices) {
      for (const auto& p : s[0].points) {
        REQUIRE(p.g2.has_value());
        if (p.index == s[0].reference) {
          CHECK(*p.g2 == 0.0);
        }
        CHECK(*p.g2 >= -1e-12);
        CHECK(p.occupation <= 1.0 + 1e-12);
      }
    }
    REQUIRE(res.atoms_per_spin.size() == 1);
    double sum = 0.0;
    for (const auto& [k, n] : res.modes[0].occupations) sum += n;
    CHECK(res.atoms_per_spin[0] == doctest::Approx(sum).epsilon(1e-12));
    fs::remove_all(dir);
  }

  TEST_CASE("assemble names missing and duplicated rows") {
    const auto dir = rundirs::fresh_dir("pipeline_assemble");
    const auto config = rundirs::write_file(dir / "tf2d.yaml", rundirs::tf2d_config("boson", "[0.5]"));
    const auto run = prepare_run(config);
    auto records = compute_records(run, {0, run.work.size()}, 1);
    auto missing = records;
    missing.erase(missing.begin() + 3);
    CHECK_THROWS_WITH_AS(assemble(run, missing), doctest::Contains("missing work row 3"), ConfigError);
    auto dup = records;
    dup.push_back(records[1]);
    CHECK_THROWS_WITH_AS(assemble(run, dup), doctest::Contains("more than once"), ConfigError);
    CHECK_THROWS_AS(compute_records(run, {2, run.work.size() + 1}, 1), ConfigError);
    fs::remove_all(dir);
  }

  TEST_CASE("oracle comparisons") {
    const auto dir = rundirs::fresh_dir("pipeline_oracle");
    const auto uniform = rundirs::write_file(dir / "u.yaml", R"(name: u
grid: {dimension: 1, half_width: 8, dk_per_m: 1.1e5}
physics: {statistics: boson, atom_mass_kg: 6.642e-26, Omega_per_s: -4.0e3, chi_m_halfD_per_s: 0.1}
condensate: {kind: uniform, rho0_per_m_D: 1.0e8}
times_t0: [0.25, 1.0]
krylov: {tol: 1.0e-12}
)");
    const auto rep = compare_oracle(uniform, OracleKind::uniform);
    CHECK(rep.pass());
    CHECK(rep.lines.size() == 6);
    std::ostringstream out;
    write_report(out, rep);
    CHECK(out.str().find("# overall: pass") != std::string::npos);

    const auto tf = rundirs::write_file(dir / "tf.yaml", rundirs::tf2d_config());
    CHECK_THROWS_AS(compare_oracle(tf, OracleKind::golden_rule), ConfigError);
    CHECK_THROWS_AS(compare_oracle(tf, OracleKind::uniform), ConfigError);
    CHECK_THROWS_AS(compare_oracle(uniform, OracleKind::cl_asymptote), ConfigError);
    CHECK(parse_oracle("golden-rule") == OracleKind::golden_rule);
    CHECK_THROWS_AS(parse_oracle("astrology"), ConfigError);
    fs::remove_all(dir);
  }

  TEST_CASE("output directories") {
    RunConfig cfg;
    cfg.output_dir = "/abs/place";
    CHECK(resolve_output_dir(cfg) == fs::path("/abs/place"));
    cfg.output_dir = "rel";
    {
      rundirs::OutputRoot root("/some/root");
      CHECK(resolve_output_dir(cfg) == fs::path("/some/root/rel"));
    }
  }
}
