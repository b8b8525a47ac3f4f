#include <doctest.h>

#include <cmath>

#include "support/fixtures.hpp"
#include "turbstab/flow_io.hpp"
#include "turbstab/optical_flow.hpp"

using namespace turbstab;

namespace {

// Mean endpoint error against a constant ground-truth shift, excluding a border.
double interior_epe(const FlowField& flow, double sx, double sy, int border) {
  double s = 0.0;
  std::size_t n = 0;
  for (int y = border; y < flow.height - border; ++y) {
    for (int x = border; x < flow.width - border; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * flow.width + x;
      s += std::hypot(flow.dx[i] - sx, flow.dy[i] - sy);
      ++n;
    }
  }
  return s / static_cast<double>(n);
}

}  // namespace

TEST_CASE("downsample2 basics") {
  const Image c(10, 8, 0.6);
  const Image down = downsample2(c);
  CHECK(down.width == 5);
  CHECK(down.height == 4);
  for (double v : down.data) CHECK(v == doctest::Approx(0.6).epsilon(1e-15));

  Image q(2, 2);
  q.data = {0.1, 0.2, 0.3, 0.4};
  CHECK(downsample2(q).data[0] == doctest::Approx(0.25).epsilon(1e-15));

  CHECK_THROWS_AS(downsample2(Image(1, 5, 0.0)), std::invalid_argument);
}

TEST_CASE("downsample2 preserves the mean for even dimensions") {
  turbstab_test::TestRng rng(51);
  const Image img = turbstab_test::random_image(rng, 32, 24);
  const Image down = downsample2(img);
  double m0 = 0.0, m1 = 0.0;
  for (double v : img.data) m0 += v;
  for (double v : down.data) m1 += v;
  CHECK(std::fabs(m0 / img.data.size() - m1 / down.data.size()) <= 1e-12);
}

TEST_CASE("estimate_flow returns zero motion for identical images") {
  const Image u = turbstab_test::smooth_image(64, 64);
  const FlowField f = estimate_flow(u, u, FlowParams{});
  for (std::size_t i = 0; i < f.size(); ++i) {
    CHECK(std::fabs(f.dx[i]) <= 1e-8);
    CHECK(std::fabs(f.dy[i]) <= 1e-8);
  }
}

TEST_CASE("estimate_flow recovers a constant integer shift") {
  const Image ref = turbstab_test::smooth_image(128, 128);
  const Image target = warp_apply(ref, FlowField(128, 128, 1.0, 0.0));
  FlowParams params;
  const FlowField f = estimate_flow(ref, target, params);
  CHECK(interior_epe(f, 1.0, 0.0, params.window_radius + 2) <= 0.1);
}

TEST_CASE("estimate_flow recovers a constant subpixel shift through the pyramid") {
  const Image ref = turbstab_test::smooth_image(128, 128, 0.4);
  const Image target = warp_apply(ref, FlowField(128, 128, 3.5, -2.25));
  FlowParams params;
  params.pyramid_levels = 3;
  const FlowField f = estimate_flow(ref, target, params);
  CHECK(interior_epe(f, 3.5, -2.25, params.window_radius + 2) <= 0.25);
}

TEST_CASE("estimate_flow is deterministic") {
  const Image ref = turbstab_test::smooth_image(48, 48);
  const Image target = warp_apply(ref, FlowField(48, 48, 0.75, 0.5));
  const FlowField a = estimate_flow(ref, target, FlowParams{});
  const FlowField b = estimate_flow(ref, target, FlowParams{});
  CHECK(a.dx == b.dx);
  CHECK(a.dy == b.dy);
}

TEST_CASE("flat windows fall back to zero update instead of erroring") {
  const Image flat(32, 32, 0.5);
  Image target(32, 32, 0.5);
  target.at(16, 16) = 0.9;  // a lone speck; almost every window stays degenerate
  const FlowField f = estimate_flow(flat, target, FlowParams{});
  CHECK(all_finite(f));
  CHECK(std::fabs(f.dx[5 * 32 + 5]) <= 1e-12);
  CHECK(std::fabs(f.dy[5 * 32 + 5]) <= 1e-12);
}

TEST_CASE("estimate_flow validates inputs") {
  const Image small(8, 8, 0.0);
  CHECK_THROWS_AS(estimate_flow(small, small, FlowParams{}), std::invalid_argument);
  const Image a(32, 32, 0.0), b(32, 16, 0.0);
  CHECK_THROWS_AS(estimate_flow(a, b, FlowParams{}), std::invalid_argument);
  FlowParams bad;
  bad.window_radius = 0;
  CHECK_THROWS_AS(estimate_flow(a, a, bad), std::invalid_argument);
}

TEST_CASE("FLO-TXT round trip is exact") {
  turbstab_test::TestRng rng(52);
  const FlowField f = turbstab_test::random_flow(rng, 9, 7, 3.0);
  const auto path = std::filesystem::temp_directory_path() / "turbstab_flow_rt.txt";
  save_flow_txt(f, path);
  const FlowField back = load_flow_txt(path);
  CHECK(back.width == 9);
  CHECK(back.dx == f.dx);
  CHECK(back.dy == f.dy);
}
