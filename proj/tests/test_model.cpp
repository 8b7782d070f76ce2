#include "doctest.h"
#include "elastic/model.hpp"

using namespace elastic;

TEST_CASE("epsilon rule") {
  CHECK(make_params(1.0, 4.0, 0.25).epsilon == doctest::Approx(1.0 / 32.0).epsilon(1e-14));
  CHECK(make_params(1.0, 4.0, 0.5).epsilon == 0.1);
  CHECK(make_params(1.0, 4.0, 0.0).epsilon == doctest::Approx(1.0 / std::sqrt(32.0)).epsilon(1e-14));
  CHECK(make_params(1.0, 4.0, 1.0).epsilon == doctest::Approx(1.0 / std::sqrt(32.0)).epsilon(1e-14));
}

TEST_CASE("parameter validation names the constraint") {
  auto msg = [](auto f) {
    try {
      f();
    } catch (const ValidationError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(msg([] { make_params(4.0, 1.0, 0.5); }) == "b2 must exceed a2");
  CHECK(msg([] { make_params(0.0, 1.0, 0.5); }) == "a2 must be positive");
  CHECK(msg([] { make_params(1.0, 4.0, 1.5); }) == "theta must lie in [0,1]");
  CHECK_THROWS_AS(make_params(1.0, 4.0, 0.25, 0.5), ValidationError);
  CHECK(make_params(1.0, 4.0, 0.25, 0.01).epsilon == 0.01);
}

TEST_CASE("zone partition of unity and plateaus") {
  for (double eps : {0.1, 1.0 / 32.0, 0.3}) {
    ZonePartition z{eps};
    const int n = 10000;
    for (int i = 0; i <= n; ++i) {
      double r = 4.0 / eps * i / n;
      double ci = z.chi_int(r), ce = z.chi_ext(r), cm = z.chi_mid(r);
      CHECK(std::abs(ci + ce + cm - 1.0) < 1e-15);
      CHECK(ci >= 0.0);
      CHECK(ce >= 0.0);
      CHECK(cm >= -1e-15);
      if (r <= eps / 2) CHECK(ci == 1.0);
      if (r >= eps) CHECK(ci == 0.0);
      if (r >= 2.0 / eps) CHECK(ce == 1.0);
      if (r <= 1.0 / eps) CHECK(ce == 0.0);
    }
  }
}

TEST_CASE("gaussian transform under the declared convention") {
  DataProfile g = gaussian_profile(1.0, 1.0, {1.0, 0.0, 0.0});
  CVec3 u = profile_fourier(g, {0.0, 0.0, 0.0});
  CHECK(u[0].real() == doctest::Approx(std::pow(2.0 * kPi, 1.5)).epsilon(1e-14));
  CHECK(std::abs(u[1]) == 0.0);
  CHECK(std::abs(profile_fourier(g, {40.0, 0.0, 0.0})[0]) < 1e-300);
  DataProfile m = g;
  m.kind = ProfileKind::modulated_gaussian;
  m.center_frequency = 5.0;
  CHECK(std::abs(profile_fourier(m, {60.0, 10.0, 0.0})[0]) < 1e-300);
}

TEST_CASE("ring profile peaks at its center frequency") {
  DataProfile p;
  p.kind = ProfileKind::ring;
  p.width = 2.0;
  p.center_frequency = 3.0;
  double best = -1.0, best_r = 0.0;
  for (int i = 0; i <= 6000; ++i) {
    double r = 6.0 * i / 6000.0;
    double v = std::abs(profile_scalar_fourier(p, {0.0, r, 0.0}));
    if (v > best) {
      best = v;
      best_r = r;
    }
  }
  CHECK(best_r == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("analytic norm matches the radial integral") {
  DataProfile g = gaussian_profile(1.3, 0.7, {0.0, 0.0, 1.0});
  g.riesz_order = 1.0;
  for (double s : {0.0, 0.5, 1.0, 2.0}) {
    // independent oracle: composite Simpson on 4 pi r^2 r^{2s} |g|^2 / (2 pi)^3
    const int n = 200000;
    const double R = 40.0 / g.width, h = R / n;
    double acc = 0.0;
    for (int i = 0; i <= n; ++i) {
      double r = (i == 0) ? 1e-12 * h : i * h;
      double f = 0.0;
      if (r > 0.0) {
        double v = profile_scalar_fourier(g, {r, 0.0, 0.0});
        f = 4.0 * kPi * r * r * std::pow(r, 2.0 * s) * v * v;
      }
      acc += f * ((i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0));
    }
    double num = std::sqrt(acc * h / 3.0 / std::pow(2.0 * kPi, 3.0));
    CHECK(num == doctest::Approx(gaussian_analytic_norm(g, s)).epsilon(1e-6));
  }
}

TEST_CASE("tail fraction bounds") {
  DataProfile g = gaussian_profile(1.0, 1.0, {1.0, 0.0, 0.0});
  CHECK(profile_tail_fraction(g, 1.0, 12.0) < 1e-10);
  CHECK(profile_tail_fraction(g, 0.0, 0.5) > 0.5);
}
