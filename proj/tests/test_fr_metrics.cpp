#include <cmath>
#include <limits>

#include "cootmv/errors.hpp"
#include "cootmv/fr_metrics.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace cootmv;
using testing::from_values;
using testing::random_image;

namespace {

GrayImage shifted(const GrayImage& img, int by) {
  GrayImage out = img;
  for (auto& p : out.pixels()) p = static_cast<std::uint8_t>(p + by);
  return out;
}

}  // namespace

TEST_CASE("AMBE") {
  const GrayImage a(4, 4, 100), b(4, 4, 120);
  CHECK(ambe(a, a) == 0.0);
  CHECK(ambe(a, b) == 20.0);
  const GrayImage r = random_image(9, 7, 3), s = random_image(9, 7, 4);
  CHECK(ambe(r, s) == ambe(s, r));
  CHECK_THROWS_AS(ambe(a, GrayImage(4, 5)), MetricError);
}

TEST_CASE("PSNR") {
  const GrayImage img = random_image(16, 16, 8, 0, 254);
  CHECK(std::isinf(psnr(img, img)));
  CHECK(psnr(img, img) > 0);
  // 10 log10(255^2) with MSE 1.
  CHECK(psnr(img, shifted(img, 1)) == doctest::Approx(48.1308036087).epsilon(1e-10));
  CHECK(std::abs(psnr(GrayImage(3, 3, 0), GrayImage(3, 3, 255))) < 1e-12);
  CHECK(psnr(img, shifted(img, 1), PsnrDenominator::kSqrtMse) ==
        doctest::Approx(psnr(img, shifted(img, 1))));
  CHECK_THROWS_AS(psnr(img, GrayImage(15, 16)), MetricError);

  const GrayImage base = random_image(20, 20, 5, 0, 200);
  double prev = std::numeric_limits<double>::infinity();
  for (int e = 1; e <= 50; ++e) {
    const double v = psnr(base, shifted(base, e));
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("SSI") {
  const GrayImage img = random_image(12, 12, 2);
  CHECK(ssi(img, img) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(ssi(GrayImage(3, 3, 90), GrayImage(3, 3, 90)) == 1.0);
  CHECK_THROWS_AS(ssi(img, GrayImage(1, 1)), MetricError);

  // 2x2 pattern and its photographic negative, evaluated by hand:
  // means 125 and 130, variances 625 each, covariance -625.
  const GrayImage in = from_values(2, 2, {100, 150, 150, 100});
  const GrayImage out = from_values(2, 2, {155, 105, 105, 155});
  const double c1 = kSsiC1, c2 = kSsiC2;
  const double expected =
      (2 * 125.0 * 130.0 + c1) * (2 * -625.0 + c2) / ((125.0 * 125.0 + 130.0 * 130.0 + c1) * (625.0 + 625.0 + c2));
  CHECK(ssi(in, out) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(ssi(in, out) < 0);
}

TEST_CASE("metric ranges on random pairs") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const GrayImage a = random_image(8, 8, 2 * seed), b = random_image(8, 8, 2 * seed + 1);
    const MetricReport r = evaluate_pair(a, b);
    CHECK((r.ambe >= 0 && r.ambe <= 255));
    CHECK((r.ssi >= -1 && r.ssi <= 1));
    CHECK(r.psnr > 0);
  }
}
