#include "doctest.h"
#include "elastic/semilinear.hpp"
#include "elastic/propagator.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

using namespace elastic;

namespace {

using Fields = std::array<std::vector<cplx>, 3>;

std::size_t at(int N, int i, int j, int k) { return (static_cast<std::size_t>(i) * N + j) * (N / 2 + 1) + k; }

RunConfig small_config(int N = 16, double L = 16.0 * kPi) {
  RunConfig c = default_run_config();
  c.N = N;
  c.L = L;
  c.dt = 0.05;
  c.T = 1.0;
  return c;
}

SpectralField empty_field(const RunConfig& c) {
  SpectralField f;
  f.N = c.N;
  f.L = c.L;
  const std::size_t M = f.modes();
  for (int q = 0; q < 3; ++q) {
    f.u[q].assign(M, 0.0);
    f.ut[q].assign(M, 0.0);
  }
  return f;
}

double field_distance(const SpectralField& a, const SpectralField& b) {
  double d = 0.0;
  for (int q = 0; q < 3; ++q)
    for (std::size_t i = 0; i < a.modes(); ++i) d += std::norm(a.u[q][i] - b.u[q][i]) + std::norm(a.ut[q][i] - b.ut[q][i]);
  return std::sqrt(d);
}

double field_size(const SpectralField& a) {
  double d = 0.0;
  for (int q = 0; q < 3; ++q)
    for (std::size_t i = 0; i < a.modes(); ++i) d += std::norm(a.u[q][i]) + std::norm(a.ut[q][i]);
  return std::sqrt(d);
}

// Classical RK4 on the spectral system u_tt = -A(xi) u - |xi|^{2 theta} u_t + F(u).
SpectralField rk4_reference(BoxSolver& solver, const SpectralField& f0, double T, int substeps) {
  const RunConfig& c = solver.config();
  const int N = c.N, nz = N / 2 + 1;
  const std::size_t M = f0.modes();
  const double dk = 2.0 * kPi / c.L;
  auto rhs = [&](const Fields& u, const Fields& v, Fields& du, Fields& dv) {
    const Fields F = solver.nonlinearity(u);
    du = v;
    for (int q = 0; q < 3; ++q) dv[q].assign(M, 0.0);
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j)
        for (int k = 0; k < nz; ++k) {
          const std::size_t idx = at(N, i, j, k);
          const Vec3 xi{(i <= N / 2 ? i : i - N) * dk, (j <= N / 2 ? j : j - N) * dk, k * dk};
          const double r2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
          const double damp = r2 == 0.0 ? 0.0 : std::pow(r2, c.params.theta);
          cplx dot = 0.0;
          for (int q = 0; q < 3; ++q) dot += xi[q] * u[q][idx];
          for (int q = 0; q < 3; ++q)
            dv[q][idx] = -c.params.a2 * r2 * u[q][idx] - (c.params.b2 - c.params.a2) * xi[q] * dot -
                         damp * v[q][idx] + F[q][idx];
        }
  };
  auto axpy = [&](const Fields& x, double a, const Fields& y) {
    Fields z = x;
    for (int q = 0; q < 3; ++q)
      for (std::size_t i = 0; i < M; ++i) z[q][i] += a * y[q][i];
    return z;
  };
  SpectralField f = f0;
  const double h = T / substeps;
  Fields k1u, k1v, k2u, k2v, k3u, k3v, k4u, k4v;
  for (int n = 0; n < substeps; ++n) {
    rhs(f.u, f.ut, k1u, k1v);
    rhs(axpy(f.u, h / 2, k1u), axpy(f.ut, h / 2, k1v), k2u, k2v);
    rhs(axpy(f.u, h / 2, k2u), axpy(f.ut, h / 2, k2v), k3u, k3v);
    rhs(axpy(f.u, h, k3u), axpy(f.ut, h, k3v), k4u, k4v);
    for (int q = 0; q < 3; ++q)
      for (std::size_t i = 0; i < M; ++i) {
        f.u[q][i] += h / 6 * (k1u[q][i] + 2.0 * k2u[q][i] + 2.0 * k3u[q][i] + k4u[q][i]);
        f.ut[q][i] += h / 6 * (k1v[q][i] + 2.0 * k2v[q][i] + 2.0 * k3v[q][i] + k4v[q][i]);
      }
  }
  f.t += T;
  return f;
}

}  // namespace

TEST_CASE("monitor weights at theta = 1/2 and m = 1") {
  const auto w = monitor_weights(1.0, 0.0, 0.5, {0.0, 0.0, 0.0});
  for (int k = 0; k < 3; ++k) {
    REQUIRE(w[k].size() == 3);
    CHECK(w[k][0].kind == MonitorKind::L2);
    CHECK(w[k][0].weight == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(w[k][1].kind == MonitorKind::grad);
    CHECK(w[k][1].weight == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(w[k][2].kind == MonitorKind::dt_L2);
    CHECK(w[k][2].weight == doctest::Approx(1.5).epsilon(1e-15));
  }
  const auto shifted = monitor_weights(1.0, 0.0, 0.5, {0.1, 0.0, 0.25});
  CHECK(shifted[0][0].weight == doctest::Approx(0.4));
  CHECK(shifted[1][1].weight == doctest::Approx(1.5));
  CHECK(shifted[2][2].weight == doctest::Approx(1.25));
}

TEST_CASE("monitor weights below theta = 1/2") {
  const auto w1 = monitor_weights(1.0, 0.0, 0.25, {0.0, 0.0, 0.0});
  CHECK(w1[0][0].weight == doctest::Approx(2.0 / 3.0 - 0.02));
  CHECK(w1[0][1].weight == doctest::Approx(4.0 / 3.0 - 0.02));
  const auto w15 = monitor_weights(1.5, 0.0, 0.25, {0.05, 0.0, 0.0});
  CHECK(w15[0][0].weight == doctest::Approx(-1.0 + 2.0 / 3.0 - 0.02 - 0.05));
  CHECK(w15[1][2].weight == doctest::Approx(2.0 / 3.0 - 0.02));
  const auto ws = monitor_weights(1.5, 0.25, 0.25, {0.0, 0.0, 0.0});
  REQUIRE(ws[0].size() == 4);
  CHECK(ws[0][2].kind == MonitorKind::Hs_grad);
  CHECK_THROWS_AS(monitor_weights(1.3, 0.0, 0.25, {0.0, 0.0, 0.0}), ValidationError);
  CHECK_THROWS_AS(monitor_weights(1.0, 0.5, 0.75, {0.0, 0.0, 0.0}), ValidationError);
}

TEST_CASE("run configuration validation") {
  RunConfig c = small_config();
  c.N = 24;
  CHECK_THROWS_AS(validate(c), ValidationError);
  c = small_config();
  c.delta = -1.0;
  CHECK_THROWS_AS(validate(c), ValidationError);
  c = small_config();
  c.dt = 2.0;
  CHECK_THROWS_AS(validate(c), ValidationError);
  c = small_config();
  c.triple = ExponentTriple{{2.5, 0.5, 2.5}};
  CHECK_THROWS(validate(c));
}

TEST_CASE("trust horizon accounts for the data support") {
  RunConfig c = default_run_config();
  CHECK(trust_horizon(c) == doctest::Approx((0.5 * c.L - 6.0) / 2.0));
  c.u0 = zero_profile();
  CHECK(trust_horizon(c) == doctest::Approx(c.L / 4.0));
}

TEST_CASE("zero data stays zero") {
  RunConfig c = small_config();
  c.delta = 0.0;
  const RunResult r = run(c);
  for (const auto& row : r.rows)
    for (int k = 0; k < 3; ++k)
      for (double v : row.raw[k]) CHECK(v == 0.0);
  CHECK(field_size(r.final_state) == 0.0);
}

TEST_CASE("linear step equals the per-mode propagator") {
  RunConfig c = small_config();
  c.nonlinear = false;
  SpectralField f = empty_field(c);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  const double dk = 2.0 * kPi / c.L;
  std::vector<std::array<int, 3>> picks{{1, 0, 1}, {0, 3, 2}, {15, 14, 5}, {2, 2, 3}, {13, 1, 4}};
  for (auto [i, j, k] : picks)
    for (int q = 0; q < 3; ++q) {
      f.u[q][at(c.N, i, j, k)] = cplx(nd(rng), nd(rng));
      f.ut[q][at(c.N, i, j, k)] = cplx(nd(rng), nd(rng));
    }
  const double dt = 0.7;
  const SpectralField g = step(c, f, dt);
  CHECK(g.t == doctest::Approx(dt));
  for (auto [i, j, k] : picks) {
    const std::size_t idx = at(c.N, i, j, k);
    ModeState s;
    s.xi = {(i <= 8 ? i : i - 16) * dk, (j <= 8 ? j : j - 16) * dk, k * dk};
    for (int q = 0; q < 3; ++q) {
      s.u_hat[q] = f.u[q][idx];
      s.ut_hat[q] = f.ut[q][idx];
    }
    const ModeState e = evolve_mode(c.params, s, dt);
    for (int q = 0; q < 3; ++q) {
      CHECK(std::abs(g.u[q][idx] - e.u_hat[q]) < 1e-12);
      CHECK(std::abs(g.ut[q][idx] - e.ut_hat[q]) < 1e-12);
    }
  }
}

TEST_CASE("one nonlinear step has third-order local error") {
  RunConfig c = small_config();
  c.delta = 40.0;
  c.triple = ExponentTriple{{2.0, 2.0, 2.0}};
  c.u1 = gaussian_profile(1.0, 4.0, {0.0, 1.0, 0.0});
  const SpectralField f0 = initial_field(c);
  BoxSolver solver(c);
  std::vector<double> err;
  for (double dt : {0.2, 0.1, 0.05}) {
    SpectralField f = f0;
    solver.invalidate_cache();
    solver.step(f, dt);
    const SpectralField ref = rk4_reference(solver, f0, dt, 200);
    err.push_back(field_distance(f, ref));
  }
  MESSAGE("local errors " << err[0] << " " << err[1] << " " << err[2]);
  CHECK(err[2] > 1e-12 * field_size(f0));
  CHECK(std::log2(err[0] / err[1]) > 2.7);
  CHECK(std::log2(err[1] / err[2]) > 2.7);
}

TEST_CASE("global step-size convergence is second order") {
  RunConfig c = small_config();
  c.delta = 40.0;
  c.u1 = gaussian_profile(1.0, 4.0, {0.0, 1.0, 0.0});
  std::vector<SpectralField> finals;
  for (double dt : {0.1, 0.05, 0.025}) {
    c.dt = dt;
    c.T = 1.0;
    finals.push_back(run(c).final_state);
  }
  const double e1 = field_distance(finals[0], finals[1]), e2 = field_distance(finals[1], finals[2]);
  MESSAGE("successive differences " << e1 << " " << e2);
  CHECK(e2 > 1e-12 * field_size(finals[2]));
  CHECK(std::log2(e1 / e2) >= 1.8);
}

TEST_CASE("nonlinear runs stay real and dealiased") {
  RunConfig c = small_config(32, 32.0 * kPi);
  c.delta = 40.0;
  c.T = 2.0;
  c.dt = 0.1;
  c.record_every = 1;
  const RunResult r = run(c);
  CHECK(r.max_hermitian_defect < 1e-12);
  CHECK(r.max_masked_energy == 0.0);
  CHECK(hermitian_defect(r.final_state) < 1e-12);
  CHECK(masked_energy(r.final_state) == 0.0);
}

TEST_CASE("linear box norms agree with the quadrature propagator inside the trust horizon") {
  RunConfig c = default_run_config();
  c.nonlinear = false;
  c.L = 64.0 * kPi;
  c.T = 25.0;
  c.dt = 0.5;
  c.record_every = 10;
  DataProfile ring;
  ring.kind = ProfileKind::ring;
  ring.center_frequency = 0.3;
  ring.width = 16.0;
  ring.direction = {0.6, 0.0, 0.8};
  c.u0 = ring;
  ring.direction = {0.0, 1.0, 0.0};
  c.u1 = ring;
  REQUIRE(c.T <= trust_horizon(c));
  const auto [a, b] = scaled_profiles(c);
  const RunResult r = run(c);
  std::vector<double> times;
  for (const auto& row : r.rows) times.push_back(row.t);
  const QuadratureGrid g = uniform_grid(1.6, 512, 24, 48);
  const auto ref_u = norm_series(c.params, a, b, times, {NormKind::L2, 0.0}, g);
  const auto ref_v = norm_series(c.params, a, b, times, {NormKind::dt_L2, 0.0}, g);
  for (std::size_t i = 0; i < times.size(); ++i) {
    double su = 0.0, sv = 0.0;
    for (int k = 0; k < 3; ++k) {
      su += std::pow(r.rows[i].raw[k][0], 2);
      sv += std::pow(r.rows[i].raw[k][2], 2);
    }
    CAPTURE(times[i]);
    CHECK(std::abs(std::sqrt(su) / ref_u[i] - 1.0) < 1e-6);
    CHECK(std::abs(std::sqrt(sv) / ref_v[i] - 1.0) < 1e-6);
  }
}

TEST_CASE("Picard probe with zero data") {
  RunConfig c = small_config();
  c.delta = 0.0;
  const PicardResult p = picard_probe(c, 4, 1.0);
  for (double d : p.d) CHECK(d == 0.0);
  CHECK_FALSE(p.diverged);
}

TEST_CASE("Picard second difference matches a single-mode hand computation") {
  RunConfig c = small_config(16, 8.0 * kPi);
  c.triple = ExponentTriple{{2.0, 2.0, 2.0}};
  c.dt = 1e-3;
  const double T = 2.0, A = 1.0;
  SpectralField f = empty_field(c);
  const double L3 = c.L * c.L * c.L, dk = 2.0 * kPi / c.L;
  f.u[2][at(c.N, 0, 0, 1)] = A * L3 / 2.0;
  const PicardResult p = picard_probe(c, 3, T, &f);

  // U3 = A c00(t) cos(dk z) on the longitudinal branch; F1 = |U3|^2 forces kz = 2 of U1 on the
  // transverse branch with coefficient L^3 A^2 c00^2 / 4.
  const double r1 = dk, r2 = 2.0 * dk;
  const double damp2 = std::pow(r2, 2.0 * c.params.theta);
  auto forcing = [&](double t) {
    const double v = branch_flow(c.params, c.params.b2, r1, t).c00;
    return L3 * A * A * v * v / 4.0;
  };
  const auto w = monitor_weights(c.m, c.s, c.params.theta, c.g);
  const double unit = std::sqrt(2.0 / L3);
  auto xn = [&](double t, double x, double xt, double r) {
    return std::pow(1.0 + t, w[0][0].weight) * unit * std::abs(x) +
           std::pow(1.0 + t, w[0][1].weight) * unit * r * std::abs(x) +
           std::pow(1.0 + t, w[0][2].weight) * unit * std::abs(xt);
  };
  double d1 = 0.0, d2 = 0.0, x = 0.0, xt = 0.0;
  const int n = 20000;
  const double h = T / n;
  auto acc = [&](double t, double y, double yt) { return forcing(t) - damp2 * yt - c.params.a2 * r2 * r2 * y; };
  for (int j = 0; j <= n; ++j) {
    const double t = j * h;
    const BranchFlow b = branch_flow(c.params, c.params.b2, r1, t);
    d1 = std::max(d1, xn(t, A * L3 / 2.0 * b.c00, A * L3 / 2.0 * b.c10, r1));
    d2 = std::max(d2, xn(t, x, xt, r2));
    if (j == n) break;
    const double k1x = xt, k1v = acc(t, x, xt);
    const double k2x = xt + h / 2 * k1v, k2v = acc(t + h / 2, x + h / 2 * k1x, xt + h / 2 * k1v);
    const double k3x = xt + h / 2 * k2v, k3v = acc(t + h / 2, x + h / 2 * k2x, xt + h / 2 * k2v);
    const double k4x = xt + h * k3v, k4v = acc(t + h, x + h * k3x, xt + h * k3v);
    x += h / 6 * (k1x + 2 * k2x + 2 * k3x + k4x);
    xt += h / 6 * (k1v + 2 * k2v + 2 * k3v + k4v);
  }
  REQUIRE(p.d.size() == 3);
  CHECK(p.d[0] == doctest::Approx(d1).epsilon(1e-9));
  CHECK(p.d[1] == doctest::Approx(d2).epsilon(1e-5));
}

TEST_CASE("Picard ratio shrinks with the data size") {
  RunConfig c = small_config();
  c.dt = 0.05;
  std::vector<double> ratios;
  for (double delta : {30.0, 3.0, 0.3}) {
    c.delta = delta;
    const PicardResult p = picard_probe(c, 4, 2.0);
    CHECK(std::isfinite(p.ratio));
    ratios.push_back(p.ratio);
  }
  MESSAGE("ratios " << ratios[0] << " " << ratios[1] << " " << ratios[2]);
  CHECK(ratios[0] > ratios[1]);
  CHECK(ratios[1] > ratios[2]);
}

TEST_CASE("checkpoint round trip") {
  RunConfig c = small_config();
  c.delta = 5.0;
  c.T = 0.5;
  c.t_ref = 0.5;
  const RunResult r = run(c);
  const auto dir = std::filesystem::temp_directory_path() / "elastic_ckpt_test";
  std::filesystem::create_directories(dir);
  const std::string prefix = (dir / "state").string();
  save_checkpoint(prefix, r.final_state, c);
  const SpectralField back = load_checkpoint(prefix);
  CHECK(back.N == c.N);
  CHECK(back.L == c.L);
  CHECK(back.t == r.final_state.t);
  CHECK(field_distance(back, r.final_state) == 0.0);
  CHECK(std::filesystem::file_size(prefix + ".bin") == 6 * r.final_state.modes() * 16);
  std::ifstream js(prefix + ".json");
  const nlohmann::json meta = nlohmann::json::parse(js);
  CHECK(meta["format"] == "elastic-spectral-checkpoint");
  CHECK(meta["version"] == 1);
  CHECK(meta["N"] == c.N);

  RunConfig cont = c;
  cont.T = 1.0;
  cont.t_ref = 0.5;
  const RunResult resumed = run(cont, &back);
  RunConfig full = c;
  full.T = 1.0;
  full.t_ref = 0.5;
  const RunResult direct = run(full);
  CHECK(field_distance(resumed.final_state, direct.final_state) <= 1e-12 * field_size(direct.final_state));
  std::filesystem::remove_all(dir);
}

TEST_CASE("run verdict follows the sup over reference rule") {
  RunConfig c = small_config(32, 32.0 * kPi);
  c.T = 5.0;
  c.dt = 0.05;
  c.record_every = 20;
  c.regime = ExponentRegime::cri;
  const RunResult r = run(c);
  CHECK(r.exponent_case == "i");
  bool within = true;
  for (int k = 0; k < 3; ++k) {
    REQUIRE(r.sup_value[k].size() == r.weights[k].size());
    for (std::size_t q = 0; q < r.sup_value[k].size(); ++q) {
      CHECK(r.sup_value[k][q] >= r.ref_value[k][q]);
      within = within && r.sup_value[k][q] <= 3.0 * r.ref_value[k][q];
    }
  }
  CHECK(r.bounded == within);
  CHECK(r.verdict == (within ? "bounded" : "growing"));
  CHECK(r.rows.size() == 6);
  CHECK(r.rows.back().t == doctest::Approx(5.0));
  const auto j = to_json(r);
  CHECK(j.contains("verdict"));
}
