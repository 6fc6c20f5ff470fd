#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>

#include "doctest.h"
#include "psector/config.hpp"
#include "psector/io.hpp"
#include "psector/types.hpp"

using namespace psector;

TEST_CASE("config parsing") {
  const CliConfig c = parse_config(
      "# grid\n"
      "n_r = 64\n"
      "\n"
      "  tol=1e-10  \n"
      "spacing = \"uniform\"\n"
      "seed = 12345678901234\n"
      "out_dir = results/run1\n");
  CHECK(c.n_r == 64);
  CHECK(c.n_phi == 256);
  CHECK(c.tol == 1e-10);
  CHECK(c.spacing == "uniform");
  CHECK(c.seed == 12345678901234ULL);
  CHECK(c.out_dir == "results/run1");
  CHECK_NOTHROW(c.validate());
  CHECK_THROWS_WITH_AS(parse_config("n_r = 64\nfoo = 1\n"), "config line 2: unknown key 'foo'", DomainError);
  CHECK_THROWS_AS(parse_config("n_r = 6x4\n"), DomainError);
  CHECK_THROWS_AS(parse_config("n_r\n"), DomainError);
  CliConfig bad;
  bad.spacing = "cubic";
  CHECK_THROWS_AS(bad.validate(), DomainError);
  CHECK_NOTHROW(CliConfig{}.validate());
}

TEST_CASE("config file and output directory override") {
  const auto dir = std::filesystem::temp_directory_path() / "psector_cfg_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream(dir / "a.cfg") << "walks = 500\n";
  }
  CHECK(load_config(dir / "a.cfg").walks == 500);
  CHECK_THROWS_AS(load_config(dir / "missing.cfg"), DomainError);
  CliConfig c;
  c.out_dir = "x";
  ::unsetenv("PSECTOR_OUT_DIR");
  CHECK(resolve_out_dir(c) == "x");
  ::setenv("PSECTOR_OUT_DIR", "y", 1);
  CHECK(resolve_out_dir(c) == "y");
  ::unsetenv("PSECTOR_OUT_DIR");
  std::filesystem::remove_all(dir);
}

TEST_CASE("number formatting") {
  for (double x : {0.1, 1.0 / 3.0, 2.0 / 3.0, 1e-300, 123456789.125, -7.5e22}) {
    CHECK(std::stod(format_shortest(x)) == x);
  }
  CHECK(format_shortest(1.0) == "1");
  CHECK(format_significant(2.0 / 3.0) == "0.6666666667");
  CHECK(format_significant(1.0) == "1");
}

TEST_CASE("csv table") {
  CsvTable t({"a", "b"});
  t.add_comment("note");
  t.add_row({1.0, 0.5});
  CHECK(t.row_count() == 1);
  CHECK(t.str() == "# note\na,b\n1,0.5\n");
}
