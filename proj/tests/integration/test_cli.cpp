#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tse/field_io.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

const std::string kCli = TSE_CLI_PATH;

struct Sandbox {
  fs::path dir;
  Sandbox() {
    dir = fs::temp_directory_path() / "tse_cli_test";
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Sandbox() { fs::remove_all(dir); }
  std::string path(const std::string& name) const { return (dir / name).string(); }
};

int run(const std::string& args) {
  const std::string cmd = kCli + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

std::size_t line_count(const std::string& path) {
  std::ifstream in(path);
  std::size_t n = 0;
  std::string line;
  while (std::getline(in, line)) ++n;
  return n;
}

std::string synth_config() {
  return "grid.n_x = 24\n"
         "grid.n_t = 80\n"
         "grid.dx = 10\n"
         "grid.dt = 1\n"
         "synth.bands = 150:5:-15:40\n"
         "synth.congested_speed = 55\n"
         "synth.noise_std = 2\n"
         "synth.seed = 21\n";
}

}  // namespace

TEST_CASE("synth then estimate, both methods, expected artifacts written") {
  Sandbox box;
  write_text(box.path("synth.cfg"), synth_config());
  REQUIRE(run("synth --config " + box.path("synth.cfg") + " --out " + box.path("data")) == 0);
  REQUIRE(fs::exists(box.path("data/truth.field")));

  CHECK(run("estimate --input " + box.path("data/truth.field") +
            " --method asm --detectors 4 --wave-speeds 80,-15 --out " + box.path("asm")) == 0);
  CHECK(fs::exists(box.path("asm/estimate.field")));
  CHECK(fs::exists(box.path("asm/weight_cong.field")));
  CHECK(fs::exists(box.path("asm/report.tsv")));

  CHECK(run("estimate --input " + box.path("data/truth.field") +
            " --method admm --detectors 4 --wave-speeds 80,-15 --trace --heatmap --out " +
            box.path("admm")) == 0);
  CHECK(fs::exists(box.path("admm/estimate.field")));
  CHECK(fs::exists(box.path("admm/weight_0.field")));
  CHECK(fs::exists(box.path("admm/weight_1.field")));
  CHECK(fs::exists(box.path("admm/trace.tsv")));
  CHECK(fs::exists(box.path("admm/estimate.ppm")));
  CHECK(line_count(box.path("admm/trace.tsv")) > 1);

  // The written estimate parses back onto the same grid.
  const tse::SpeedField est = tse::read_field(box.path("admm/estimate.field"));
  CHECK(est.grid.n_x == 24);
  CHECK(est.grid.n_t == 80);
  CHECK(est.dense());
}

TEST_CASE("estimate with a single wave speed runs the constrained solve") {
  Sandbox box;
  write_text(box.path("synth.cfg"), synth_config());
  REQUIRE(run("synth --config " + box.path("synth.cfg") + " --out " + box.path("data")) == 0);
  CHECK(run("estimate --input " + box.path("data/truth.field") +
            " --method admm --detectors 3 --wave-speeds -15 --out " + box.path("one")) == 0);
  CHECK(fs::exists(box.path("one/weight_0.field")));
}

TEST_CASE("validation failures exit with code 1") {
  Sandbox box;
  CHECK(run("estimate --out " + box.path("x")) == 1);  // no input source
  write_text(box.path("bad.cfg"), "nonsense.key = 1\n");
  CHECK(run("estimate --config " + box.path("bad.cfg")) == 1);
  write_text(box.path("synth.cfg"), synth_config());
  REQUIRE(run("synth --config " + box.path("synth.cfg") + " --out " + box.path("data")) == 0);
  CHECK(run("sweep-coverage --input " + box.path("data/truth.field") + " --out " +
            box.path("x")) == 1);  // missing counts
  CHECK(run("estimate --input " + box.path("data/truth.field") +
            " --detector-rows 99 --out " + box.path("x")) == 1);  // row out of range
  CHECK(run("estimate --input " + box.path("data/truth.field") +
            " --method asm --wave-speeds 80,15 --out " + box.path("x")) == 1);  // signs
}

TEST_CASE("ingest: toy file, malformed row, unit conversion") {
  Sandbox box;
  write_text(box.path("toy.csv"),
             "vehicle_id,time_s,position_m,speed_kmh\n"
             "a,0.5,5,50\n"
             "a,1.5,15,52\n"
             "a,2.5,25,54\n");
  REQUIRE(run("ingest --input " + box.path("toy.csv") +
              " --n-x 1 --n-t 5 --dx 100 --dt 1 --out " + box.path("ing")) == 0);
  const tse::SpeedField field = tse::read_field(box.path("ing/truth.field"));
  CHECK(field.grid.n_x == 1);
  CHECK(field.grid.n_t == 5);
  CHECK(field.values(0, 0) == 50.0);
  CHECK(field.values(0, 2) == 54.0);
  CHECK(fs::exists(box.path("ing/ingest_report.tsv")));

  write_text(box.path("bad.csv"),
             "vehicle_id,time_s,position_m,speed_kmh\n"
             "a,0.5,5,50\n"
             "a,zzz,15,52\n");
  CHECK(run("ingest --input " + box.path("bad.csv") +
            " --n-x 1 --n-t 5 --dx 100 --dt 1 --out " + box.path("ing2")) == 1);
}

TEST_CASE("sweep tables have one row per point") {
  Sandbox box;
  write_text(box.path("synth.cfg"), synth_config());
  REQUIRE(run("synth --config " + box.path("synth.cfg") + " --out " + box.path("data")) == 0);

  CHECK(run("sweep-coverage --input " + box.path("data/truth.field") +
            " --counts 1,2,3 --method admm --out " + box.path("cov")) == 0);
  CHECK(line_count(box.path("cov/coverage_sweep.tsv")) == 4);  // header + 3

  CHECK(run("sweep-wavespeeds --input " + box.path("data/truth.field") +
            " --detectors 4 --pairs \"-15:80,-12.5:70\" --out " + box.path("ws")) == 0);
  CHECK(line_count(box.path("ws/wavespeed_sweep.tsv")) == 3);  // header + 2
}
