#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "grasscap/bounds.hpp"
#include "grasscap/report.hpp"

using namespace grasscap;
namespace fs = std::filesystem;

namespace {

const char* cli_path() { return GRASSCAP_CLI_PATH; }

struct RunResult {
  int exit_code;
  std::string output;  // stdout + stderr
};

RunResult run_cli(const std::string& args) {
  const fs::path capture = fs::temp_directory_path() / "grasscap_cli_out.txt";
  const std::string cmd =
      std::string(cli_path()) + " " + args + " > " + capture.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  std::ifstream in(capture);
  std::stringstream buf;
  buf << in.rdbuf();
  fs::remove(capture);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, buf.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("bounds passes through the closed forms") {
  const RunResult res =
      run_cli("bounds --kappa 0.5 --sigma2-grid 0.01 --m 3 --k 1 --r-grid 0,2");
  REQUIRE(res.exit_code == 0);
  const CapacityBounds lin = c_linear_bounds(0.5, 0.01);
  const CapacityBounds aff = c_affine_bounds(0.5, 0.01);
  const std::string expected = "0.01," + format_double(lin.lower) + "," +
                               format_double(lin.upper) + "," +
                               format_double(aff.lower) + "," +
                               format_double(aff.upper);
  CHECK(res.output.find(expected) != std::string::npos);
  // DDT endpoints: d_affine is {M-k, 0} at r = {0, M-k}.
  CHECK(res.output.find("0,1,1,1,2") != std::string::npos);
  CHECK(res.output.find("2,0,0,0,0") != std::string::npos);
}

TEST_CASE("bounds validation failures exit with code 2 naming the flag") {
  const RunResult res = run_cli("bounds --kappa 1.5");
  CHECK(res.exit_code == 2);
  CHECK(res.output.find("kappa") != std::string::npos);

  const RunResult empty = run_cli("bounds --kappa 0.5 --sigma2-grid ,");
  CHECK(empty.exit_code == 2);
}

TEST_CASE("unknown flags and missing subcommands exit with code 2") {
  CHECK(run_cli("bounds --no-such-flag 1").exit_code == 2);
  CHECK(run_cli("").exit_code == 2);
  CHECK(run_cli("--help").exit_code == 0);
}

TEST_CASE("subcommand help documents the CSV columns") {
  const RunResult ddt_help = run_cli("ddt --help");
  CHECK(ddt_help.exit_code == 0);
  CHECK(ddt_help.output.find("p_hat,ci_low,ci_high") != std::string::npos);
  const RunResult faces_help = run_cli("faces --help");
  CHECK(faces_help.output.find("max_l_empirical") != std::string::npos);
}

TEST_CASE("config parse errors carry line numbers") {
  const fs::path dir = fs::temp_directory_path() / "grasscap_cli_badconf";
  fs::create_directories(dir);
  const fs::path conf = dir / "bad.conf";
  {
    std::ofstream out(conf);
    out << "n=3\n";
    out << "this line has no equals sign\n";
  }
  SUBCASE("library surface") {
    CHECK_THROWS_WITH_AS(parse_config_file(conf),
                         doctest::Contains(":2:"), ParseError);
  }
  SUBCASE("cli surface") {
    const RunResult res = run_cli("ddt --config " + conf.string());
    CHECK(res.exit_code == 2);
    CHECK(res.output.find(":2:") != std::string::npos);
  }
  fs::remove_all(dir);
}

TEST_CASE("ddt rejects an empty sigma2 grid") {
  CHECK(run_cli("ddt --sigma2-grid , --ensembles 1 --signals 1").exit_code ==
        2);
}

TEST_CASE("ddt runs from a config file and is reproducible") {
  const fs::path dir = fs::temp_directory_path() / "grasscap_cli_ddt";
  fs::create_directories(dir);
  const fs::path conf = dir / "run.conf";
  {
    std::ofstream out(conf);
    out << "# comment line\n";
    out << "mode=linear\n";
    out << "n=3\nm=3\nk=1\n";
    out << "sigma2_grid=1e-1,1e-2\n";
    out << "r_list=0,1.5\n";
    out << "ensembles=4\nsignals=25\n";
    out << "seed=31\n";
  }
  const fs::path out1 = dir / "a.csv";
  const fs::path out2 = dir / "b.csv";
  REQUIRE(run_cli("ddt --config " + conf.string() + " --out " + out1.string())
              .exit_code == 0);
  REQUIRE(run_cli("ddt --config " + conf.string() + " --threads 3 --out " +
                  out2.string())
              .exit_code == 0);
  const std::string text1 = slurp(out1);
  CHECK(text1 == slurp(out2));
  CHECK(text1.find("# seed=31") != std::string::npos);
  CHECK(text1.find("# table=slopes") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("the metadata header reproduces the run byte-for-byte") {
  const fs::path dir = fs::temp_directory_path() / "grasscap_cli_hdr";
  fs::create_directories(dir);
  const fs::path first = dir / "first.csv";
  REQUIRE(run_cli("ddt --n 3 --m 3 --k 1 --sigma2-grid 1e-1,1e-2 --r-list 0.75 "
                  "--ensembles 3 --signals 20 --seed 7 --out " +
                  first.string())
              .exit_code == 0);

  // Turn the '# key=value' header block into a config file and re-run.
  const fs::path conf = dir / "replay.conf";
  {
    std::ifstream in(first);
    std::ofstream out(conf);
    std::string line;
    while (std::getline(in, line)) {
      if (line.rfind("# ", 0) == 0 && line.find('=') != std::string::npos)
        out << line.substr(2) << "\n";
    }
  }
  const fs::path second = dir / "second.csv";
  REQUIRE(run_cli("ddt --config " + conf.string() + " --out " + second.string())
              .exit_code == 0);
  CHECK(slurp(first) == slurp(second));
  fs::remove_all(dir);
}

TEST_CASE("command-line flags win over config values") {
  const fs::path dir = fs::temp_directory_path() / "grasscap_cli_prec";
  fs::create_directories(dir);
  const fs::path conf = dir / "run.conf";
  {
    std::ofstream out(conf);
    out << "n=3\nm=3\nk=1\nsigma2_grid=1e-1\nr_list=0\n";
    out << "ensembles=2\nsignals=10\nseed=1\n";
  }
  const fs::path out1 = dir / "a.csv";
  REQUIRE(run_cli("ddt --config " + conf.string() + " --seed 2 --out " +
                  out1.string())
              .exit_code == 0);
  CHECK(slurp(out1).find("# seed=2") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("the GRASSCAP_SEED environment variable seeds the run") {
  const fs::path dir = fs::temp_directory_path() / "grasscap_cli_env";
  fs::create_directories(dir);
  const fs::path out1 = dir / "a.csv";
  const std::string cmd = "GRASSCAP_SEED=99 " + std::string(cli_path()) +
                          " ddt --n 3 --m 3 --k 1 --sigma2-grid 1e-1 "
                          "--r-list 0 --ensembles 2 --signals 10 --out " +
                          out1.string();
  REQUIRE(std::system(cmd.c_str()) == 0);
  CHECK(slurp(out1).find("# seed=99") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("ddt emits one slope summary per discrimination gain") {
  // Default r list has four entries; a single-sigma2 run cannot fit a
  // slope, so the summary columns degrade to nan but the rows remain.
  const RunResult res =
      run_cli("ddt --sigma2-grid 1e-1 --ensembles 2 --signals 10 --seed 1");
  REQUIRE(res.exit_code == 0);
  std::size_t slope_rows = 0;
  std::istringstream in(res.output);
  std::string line;
  bool in_slopes = false;
  while (std::getline(in, line)) {
    if (line == "# table=slopes") {
      in_slopes = true;
      continue;
    }
    if (in_slopes && !line.empty() && line[0] != '#' &&
        line.find("d_hat") == std::string::npos)
      ++slope_rows;
  }
  CHECK(slope_rows == 4);
}

TEST_CASE("capacity subcommand emits bound metadata") {
  const RunResult res =
      run_cli("capacity --nu 2 --kappa 0.25 --rho-list 0.5 --m-grid 4 "
              "--sigma2 1e-3 --ensembles 2 --signals 10 --seed 5");
  REQUIRE(res.exit_code == 0);
  CHECK(res.output.find("# c_linear_lower=") != std::string::npos);
  CHECK(res.output.find("rho,sigma2,l,m,n,k") != std::string::npos);
}

TEST_CASE("faces on a synthetic corpus is self-contained and reproducible") {
  const fs::path dir = fs::temp_directory_path() / "grasscap_cli_faces";
  fs::create_directories(dir);
  const fs::path out1 = dir / "a.csv";
  const fs::path out2 = dir / "b.csv";
  const std::string args =
      "faces --synthetic --classes 3 --images-per-class 8 --n 64 "
      "--k-true 2 --k-model 2 --sigma2 1e-4 --m-grid 4,8 --l-grid 1,2,3 "
      "--seed 3 --out ";
  REQUIRE(run_cli(args + out1.string()).exit_code == 0);
  REQUIRE(run_cli(args + out2.string()).exit_code == 0);
  const std::string text = slurp(out1);
  CHECK(text == slurp(out2));
  CHECK(text.find("# table=errors") != std::string::npos);
  CHECK(text.find("# table=classes") != std::string::npos);
  CHECK(text.find("max_l_empirical") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("faces without a data source fails validation") {
  CHECK(run_cli("faces").exit_code == 2);
  CHECK(run_cli("faces --data /no/such/directory").exit_code == 2);
}

TEST_CASE("unwritable output is a runtime failure, not a validation one") {
  const RunResult res =
      run_cli("bounds --kappa 0.5 --out /no/such/dir/file.csv");
  CHECK(res.exit_code == 1);
}

}  // TEST_SUITE
