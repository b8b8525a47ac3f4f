#include <doctest.h>

#include <cmath>

#include "support/fixtures.hpp"
#include "turbstab/regularizers.hpp"

using namespace turbstab;
using turbstab_test::TestRng;

namespace {

double coeff_norm2(const FrameCoefficients& c) {
  double s = 0.0;
  for (double v : c.lowpass.data) s += v * v;
  for (const auto& level : c.detail)
    for (const auto& band : level)
      for (double v : band.data) s += v * v;
  return s;
}

}  // namespace

TEST_CASE("frame_analysis of a constant image has zero details") {
  const Image c(32, 32, 0.45);
  const FrameCoefficients fc = frame_analysis(c, 2);
  for (const auto& level : fc.detail)
    for (const auto& band : level)
      for (double v : band.data) CHECK(std::fabs(v) <= 1e-15);
  for (double v : fc.lowpass.data) CHECK(v == doctest::Approx(0.45).epsilon(1e-14));
}

TEST_CASE("framelet transform is a unit tight frame (Parseval)") {
  TestRng rng(61);
  for (int levels = 1; levels <= 3; ++levels) {
    for (int t = 0; t < 8; ++t) {
      const Image u = turbstab_test::random_image(rng, 64, 64, -1.0, 1.0);
      const FrameCoefficients c = frame_analysis(u, levels);
      const double nu = dot(u, u);
      CHECK(std::fabs(coeff_norm2(c) - nu) <= 1e-10 * nu);
    }
  }
}

TEST_CASE("frame_synthesis inverts frame_analysis (W^T W = I)") {
  TestRng rng(62);
  for (int levels = 1; levels <= 3; ++levels) {
    const Image u = turbstab_test::random_image(rng, 48, 40);
    const Image back = frame_synthesis(frame_analysis(u, levels));
    double err = 0.0, ref = 0.0;
    for (std::size_t i = 0; i < u.data.size(); ++i) {
      err += (back.data[i] - u.data[i]) * (back.data[i] - u.data[i]);
      ref += u.data[i] * u.data[i];
    }
    CHECK(std::sqrt(err) <= 1e-10 * std::sqrt(ref));
  }
}

TEST_CASE("frame_synthesis is the adjoint of frame_analysis") {
  TestRng rng(63);
  const Image u = turbstab_test::random_image(rng, 32, 32, -1.0, 1.0);
  const FrameCoefficients wu = frame_analysis(u, 2);

  FrameCoefficients c = wu;  // reuse the layout, fill with fresh randoms
  for (double& v : c.lowpass.data) v = rng.uniform(-1.0, 1.0);
  for (auto& level : c.detail)
    for (auto& band : level)
      for (double& v : band.data) v = rng.uniform(-1.0, 1.0);

  double lhs = 0.0;
  lhs += dot(wu.lowpass, c.lowpass);
  for (int l = 0; l < 2; ++l)
    for (int k = 0; k < 8; ++k) lhs += dot(wu.detail[l][k], c.detail[l][k]);
  const double rhs = dot(u, frame_synthesis(c));
  CHECK(std::fabs(lhs - rhs) <= 1e-12 * (std::fabs(lhs) + std::fabs(rhs) + 1.0));
}

TEST_CASE("column ramp: linear-annihilating bands vanish away from the wrap") {
  const int n = 64;
  Image u(n, n);
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) u.at(x, y) = static_cast<double>(x);
  const int levels = 2;
  const FrameCoefficients c = frame_analysis(u, levels);
  const int margin = 1 << (levels + 1);
  for (int l = 0; l < levels; ++l) {
    const double d = static_cast<double>(1 << l);
    for (int iy = 0; iy < 3; ++iy) {
      for (int ix = 0; ix < 3; ++ix) {
        if (iy == 0 && ix == 0) continue;
        const Image& band = c.detail[l][iy * 3 + ix - 1];
        for (int y = margin; y < n - margin; ++y) {
          for (int x = margin; x < n - margin; ++x) {
            const double v = band.at(x, y);
            if (iy == 0 && ix == 1) {
              // h1 along x on a ramp gives a constant
              CHECK(v == doctest::Approx(-std::sqrt(2.0) / 2.0 * d).epsilon(1e-12));
            } else {
              // h2 annihilates linears; h1/h2 along y annihilate constants
              CHECK(std::fabs(v) <= 1e-12);
            }
          }
        }
      }
    }
  }
}

TEST_CASE("frame_synthesis of all-zero coefficients is the zero image") {
  FrameCoefficients c;
  c.width = 16;
  c.height = 16;
  c.levels = 2;
  c.lowpass = Image(16, 16);
  c.detail.assign(2, {});
  for (auto& level : c.detail)
    for (auto& band : level) band = Image(16, 16);
  for (double v : frame_synthesis(c).data) CHECK(v == 0.0);
}

TEST_CASE("framelet validates sizes and layout") {
  CHECK_THROWS_AS(frame_analysis(Image(4, 64, 0.0), 3), std::invalid_argument);
  CHECK_THROWS_AS(frame_analysis(Image(64, 64, 0.0), 0), std::invalid_argument);
  FrameCoefficients bad = frame_analysis(Image(16, 16, 0.0), 1);
  bad.detail[0][3] = Image(8, 8);
  CHECK_THROWS_AS(frame_synthesis(bad), std::invalid_argument);
}
