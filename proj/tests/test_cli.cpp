#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "support/fixtures.hpp"
#include "turbstab/pgm.hpp"

using namespace turbstab;
namespace fs = std::filesystem;

namespace {

const char* kCli = TURBSTAB_CLI_PATH;

struct Sandbox {
  fs::path dir;
  Sandbox() {
    dir = fs::temp_directory_path() / ("turbstab_cli_" + std::to_string(std::rand()));
    fs::create_directories(dir);
  }
  ~Sandbox() {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }
  fs::path operator/(const char* name) const { return dir / name; }
};

int run(const std::string& args, const fs::path& stdout_file = {}) {
  std::string cmd = std::string(kCli) + " " + args;
  if (!stdout_file.empty())
    cmd += " > " + stdout_file.string() + " 2>&1";
  else
    cmd += " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

double max_abs_diff(const Image& a, const Image& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i)
    m = std::max(m, std::fabs(a.data[i] - b.data[i]));
  return m;
}

}  // namespace

TEST_CASE("simulate writes the documented file set, deterministically") {
  Sandbox sb;
  save_pgm(turbstab_test::smooth_image(48, 48), sb / "truth.pgm");
  const std::string common = (sb / "truth.pgm").string() +
                             " --set sim.frames=3 --set sim.amplitude=0.8 --seed 5 --out ";
  REQUIRE(run("simulate " + common + (sb / "out1").string()) == 0);

  for (const char* name : {"frame_000.pgm", "frame_001.pgm", "frame_002.pgm", "flow_000.txt",
                           "flow_001.txt", "flow_002.txt", "truth.pgm", "manifest.txt"})
    CHECK(fs::exists(sb.dir / "out1" / name));
  CHECK(!fs::exists(sb.dir / "out1" / "frame_003.pgm"));

  REQUIRE(run("simulate " + common + (sb / "out2").string()) == 0);
  for (const char* name : {"frame_000.pgm", "flow_002.txt", "manifest.txt"})
    CHECK(read_file(sb.dir / "out1" / name) == read_file(sb.dir / "out2" / name));
}

TEST_CASE("simulate with all degradations off emits the quantized truth") {
  Sandbox sb;
  save_pgm(turbstab_test::smooth_image(40, 40), sb / "truth.pgm");
  REQUIRE(run("simulate " + (sb / "truth.pgm").string() +
              " --set sim.frames=2 --set sim.amplitude=0 --set sim.blur_sigma=0"
              " --set sim.noise_sigma=0 --out " +
              (sb / "out").string()) == 0);
  const std::string truth_bytes = read_file(sb.dir / "out" / "truth.pgm");
  CHECK(read_file(sb.dir / "out" / "frame_000.pgm") == truth_bytes);
  CHECK(read_file(sb.dir / "out" / "frame_001.pgm") == truth_bytes);
}

TEST_CASE("stabilize on identical frames with huge lambda returns the frame") {
  Sandbox sb;
  const Image frame = turbstab_test::smooth_image(48, 48);
  save_pgm(frame, sb / "f0.pgm");
  save_pgm(frame, sb / "f1.pgm");
  save_pgm(frame, sb / "f2.pgm");
  REQUIRE(run("stabilize " + (sb / "f*.pgm").string() +
              " --set stab.lambda=1e8 --set stab.outer_iterations=2"
              " --set stab.inner_iterations=4 --set flow.pyramid_levels=2 --out " +
              (sb / "out").string()) == 0);
  const Image restored = load_pgm(sb.dir / "out" / "restored.pgm");
  CHECK(max_abs_diff(restored, frame) <= 0.5 / 255 + 1e-9);
  CHECK(fs::exists(sb.dir / "out" / "trace.csv"));
  CHECK(fs::exists(sb.dir / "out" / "manifest.txt"));
  const std::string trace = read_file(sb.dir / "out" / "trace.csv");
  CHECK(trace.rfind("outer,inner,fidelity,objective\n", 0) == 0);
}

TEST_CASE("stabilize smoke matrix: tv, nltv and frame all complete") {
  Sandbox sb;
  const Image truth = turbstab_test::test_chart(48, 48);
  save_pgm(truth, sb / "truth.pgm");
  REQUIRE(run("simulate " + (sb / "truth.pgm").string() +
              " --set sim.frames=4 --set sim.amplitude=0.8 --seed 3 --out " +
              (sb / "sim").string()) == 0);
  for (const char* reg : {"tv", "nltv", "frame"}) {
    const fs::path out = sb.dir / (std::string("out_") + reg);
    REQUIRE(run("stabilize " + (sb.dir / "sim" / "frame_*.pgm").string() +
                " --set regularizer=" + reg +
                " --set stab.outer_iterations=1 --set stab.inner_iterations=3"
                " --set flow.pyramid_levels=2 --set nltv.search_radius=5"
                " --set nltv.patch_radius=2 --out " + out.string()) == 0);
    CHECK(fs::exists(out / "restored.pgm"));
    CHECK(read_file(out / "trace.csv").size() > 40);
  }
}

TEST_CASE("stabilize fails cleanly when inputs are missing or mixed") {
  Sandbox sb;
  save_pgm(Image(32, 32, 0.5), sb / "a.pgm");
  CHECK(run("stabilize " + (sb / "a.pgm").string() + " " + (sb / "missing.pgm").string() +
            " --out " + (sb / "out").string()) != 0);
  CHECK(run("stabilize " + (sb / "nothing_*.pgm").string() + " --out " +
            (sb / "out").string()) != 0);
  CHECK(!fs::exists(sb.dir / "out" / "restored.pgm"));

  save_pgm(Image(16, 32, 0.5), sb / "b.pgm");
  CHECK(run("stabilize " + (sb / "a.pgm").string() + " " + (sb / "b.pgm").string() + " --out " +
            (sb / "out").string()) != 0);
  CHECK(!fs::exists(sb.dir / "out" / "restored.pgm"));
}

TEST_CASE("denoise keeps constants and honors the large-mu limit") {
  Sandbox sb;
  save_pgm(Image(32, 32, 0.5), sb / "const.pgm");
  REQUIRE(run("denoise " + (sb / "const.pgm").string() + " --out " + (sb / "out.pgm").string()) ==
          0);
  CHECK(max_abs_diff(load_pgm(sb / "out.pgm"), Image(32, 32, 0.5)) <= 0.5 / 255 + 1e-9);

  const Image v = turbstab_test::smooth_image(32, 32);
  save_pgm(v, sb / "v.pgm");
  REQUIRE(run("denoise " + (sb / "v.pgm").string() + " --set stab.lambda=1e6 --out " +
              (sb / "big.pgm").string()) == 0);
  CHECK(max_abs_diff(load_pgm(sb / "big.pgm"), load_pgm(sb / "v.pgm")) <= 1.0 / 255 + 1e-9);
}

TEST_CASE("denoise improves a noisy step with the tv regularizer") {
  Sandbox sb;
  Image clean(32, 32);
  for (int y = 0; y < 32; ++y)
    for (int x = 0; x < 32; ++x) clean.at(x, y) = x < 16 ? 0.25 : 0.75;
  turbstab_test::TestRng rng(91);
  Image noisy = clean;
  for (double& v : noisy.data) v = std::clamp(v + rng.uniform(-0.15, 0.15), 0.0, 1.0);
  save_pgm(clean, sb / "clean.pgm");
  save_pgm(noisy, sb / "noisy.pgm");
  REQUIRE(run("denoise " + (sb / "noisy.pgm").string() +
              " --set regularizer=tv --set stab.lambda=12 --out " + (sb / "den.pgm").string()) ==
          0);

  fs::path before = sb / "before.txt", after = sb / "after.txt";
  REQUIRE(run("metrics " + (sb / "noisy.pgm").string() + " " + (sb / "clean.pgm").string(),
              before) == 0);
  REQUIRE(run("metrics " + (sb / "den.pgm").string() + " " + (sb / "clean.pgm").string(), after) ==
          0);
  auto psnr_of = [](const std::string& text) {
    const auto pos = text.find("psnr=");
    return std::stod(text.substr(pos + 5));
  };
  CHECK(psnr_of(read_file(after)) > psnr_of(read_file(before)));
}

TEST_CASE("flow of an image against itself is the zero field") {
  Sandbox sb;
  save_pgm(turbstab_test::smooth_image(32, 32), sb / "u.pgm");
  REQUIRE(run("flow " + (sb / "u.pgm").string() + " " + (sb / "u.pgm").string() + " --out " +
              (sb / "flow.txt").string()) == 0);
  const std::string text = read_file(sb / "flow.txt");
  CHECK(text.rfind("FLO-TXT 32 32", 0) == 0);
  std::istringstream in(text);
  std::string magic;
  int w, h;
  in >> magic >> w >> h;
  double dx, dy;
  while (in >> dx >> dy) {
    CHECK(std::fabs(dx) <= 1e-8);
    CHECK(std::fabs(dy) <= 1e-8);
  }
}

TEST_CASE("metrics prints the documented lines") {
  Sandbox sb;
  save_pgm(turbstab_test::smooth_image(24, 24), sb / "a.pgm");
  fs::path out = sb / "metrics.txt";
  REQUIRE(run("metrics " + (sb / "a.pgm").string() + " " + (sb / "a.pgm").string(), out) == 0);
  const std::string text = read_file(out);
  CHECK(text.find("rmse=0.000000\n") != std::string::npos);
  CHECK(text.find("psnr=inf\n") != std::string::npos);
}

TEST_CASE("metrics reports zero EPE for truth flows against themselves") {
  Sandbox sb;
  save_pgm(turbstab_test::smooth_image(32, 32), sb / "truth.pgm");
  REQUIRE(run("simulate " + (sb / "truth.pgm").string() + " --set sim.frames=2 --out " +
              (sb / "sim").string()) == 0);
  fs::path out = sb / "metrics.txt";
  const std::string flows = (sb.dir / "sim" / "flow_*.txt").string();
  REQUIRE(run("metrics " + (sb.dir / "sim" / "truth.pgm").string() + " " +
              (sb.dir / "sim" / "truth.pgm").string() + " --est-flows " + flows +
              " --true-flows " + flows, out) == 0);
  CHECK(read_file(out).find("flow_epe=0.000000\n") != std::string::npos);
}

TEST_CASE("curvelet is accepted by the parser and rejected at run time") {
  Sandbox sb;
  save_pgm(Image(32, 32, 0.5), sb / "a.pgm");
  save_pgm(Image(32, 32, 0.5), sb / "b.pgm");
  fs::path log = sb / "log.txt";
  CHECK(run("stabilize " + (sb / "a.pgm").string() + " " + (sb / "b.pgm").string() +
            " --set regularizer=curvelet --out " + (sb / "out").string(), log) != 0);
  CHECK(read_file(log).find("not implemented") != std::string::npos);
}

TEST_CASE("a manifest reproduces its run byte for byte") {
  Sandbox sb;
  save_pgm(turbstab_test::smooth_image(40, 40), sb / "truth.pgm");
  REQUIRE(run("simulate " + (sb / "truth.pgm").string() +
              " --set sim.frames=3 --set sim.amplitude=1.2 --seed 29 --out " +
              (sb / "one").string()) == 0);
  REQUIRE(run("simulate " + (sb / "truth.pgm").string() + " --config " +
              (sb.dir / "one" / "manifest.txt").string() + " --out " + (sb / "two").string()) ==
          0);
  for (const char* name : {"frame_000.pgm", "frame_002.pgm", "flow_001.txt", "manifest.txt"})
    CHECK(read_file(sb.dir / "one" / name) == read_file(sb.dir / "two" / name));
}

TEST_CASE("config file values are overridden by --set") {
  Sandbox sb;
  {
    std::ofstream cfg(sb / "run.cfg");
    cfg << "# shared parameters\nsim.frames=4\nsim.amplitude=0.5\n";
  }
  save_pgm(turbstab_test::smooth_image(32, 32), sb / "truth.pgm");
  REQUIRE(run("simulate " + (sb / "truth.pgm").string() + " --config " +
              (sb / "run.cfg").string() + " --set sim.frames=2 --out " + (sb / "out").string()) ==
          0);
  CHECK(fs::exists(sb.dir / "out" / "frame_001.pgm"));
  CHECK(!fs::exists(sb.dir / "out" / "frame_002.pgm"));
  const std::string manifest = read_file(sb.dir / "out" / "manifest.txt");
  CHECK(manifest.find("sim.frames=2") != std::string::npos);
  CHECK(manifest.find("sim.amplitude=0.5") != std::string::npos);
}
