#include "elastic/semilinear.hpp"

#include <fftw3.h>
#include <xmmintrin.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace elastic {

namespace {

// Far-field powers of small data underflow into subnormals, which slow the transforms
// by an order of magnitude; flush them to zero while the solver works.
struct FlushSubnormals {
  unsigned int saved;
  FlushSubnormals() : saved(_mm_getcsr()) { _mm_setcsr(saved | 0x8040); }
  ~FlushSubnormals() { _mm_setcsr(saved); }
};

int freq(int i, int N) { return i <= N / 2 ? i : i - N; }

bool self_conjugate_plane(int k, int N) { return k == 0 || k == N / 2; }

std::array<std::vector<cplx>, 3> zeros3(std::size_t n) {
  return {std::vector<cplx>(n), std::vector<cplx>(n), std::vector<cplx>(n)};
}

double powabs(double x, double p) {
  const double a = std::abs(x);
  const double twice = 2.0 * p;
  if (twice == std::floor(twice) && twice <= 16.0) {
    const int n = static_cast<int>(twice) / 2;
    double r = 1.0;
    for (int i = 0; i < n; ++i) r *= a;
    if (static_cast<int>(twice) % 2) r *= std::sqrt(a);
    return r;
  }
  return std::pow(a, p);
}

// Accumulates mult * w(xi) * |c|^2 / L^3 for the monitor kinds of every component.
struct NormSums {
  std::array<std::array<double, 5>, 3> v{};
};

NormSums norm_sums(int N, double L, double s, const std::array<std::vector<cplx>, 3>& u,
                   const std::array<std::vector<cplx>, 3>& ut) {
  const int nz = N / 2 + 1;
  const double dk = 2.0 * kPi / L;
  std::vector<NormSums> planes(N);
  parallel_for(static_cast<std::size_t>(N), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      NormSums acc;
      const double fx = freq(static_cast<int>(i), N) * dk;
      for (int j = 0; j < N; ++j) {
        const double fy = freq(j, N) * dk;
        for (int k = 0; k < nz; ++k) {
          const double fz = k * dk;
          const double r2 = fx * fx + fy * fy + fz * fz;
          const double mult = self_conjugate_plane(k, N) ? 1.0 : 2.0;
          const double ws = s == 0.0 ? 1.0 : std::pow(r2, s);
          const std::size_t idx = (i * N + j) * nz + k;
          for (int c = 0; c < 3; ++c) {
            const double a = std::norm(u[c][idx]), b2 = std::norm(ut[c][idx]);
            acc.v[c][0] += mult * a;
            acc.v[c][1] += mult * r2 * a;
            acc.v[c][2] += mult * b2;
            acc.v[c][3] += mult * ws * r2 * a;
            acc.v[c][4] += mult * ws * b2;
          }
        }
      }
      planes[i] = acc;
    }
  });
  NormSums out;
  const double inv = 1.0 / (L * L * L);
  for (int c = 0; c < 3; ++c)
    for (int q = 0; q < 5; ++q) {
      std::vector<double> col(N);
      for (int i = 0; i < N; ++i) col[i] = planes[i].v[c][q];
      out.v[c][q] = std::sqrt(pairwise_sum(col) * inv);
    }
  return out;
}

int kind_index(MonitorKind k) { return static_cast<int>(k); }

std::array<std::vector<double>, 3> weighted_of(const std::array<std::vector<MonitorEntry>, 3>& w,
                                               const NormSums& n, double t,
                                               std::array<std::vector<double>, 3>* raw = nullptr) {
  std::array<std::vector<double>, 3> out;
  for (int c = 0; c < 3; ++c)
    for (const MonitorEntry& e : w[c]) {
      const double v = n.v[c][kind_index(e.kind)];
      if (raw) (*raw)[c].push_back(v);
      out[c].push_back(std::pow(1.0 + t, e.weight) * v);
    }
  return out;
}

double xnorm(const std::array<std::vector<MonitorEntry>, 3>& w, const NormSums& n, double t) {
  double total = 0.0;
  for (const auto& row : weighted_of(w, n, t))
    for (double v : row) total += v;
  return total;
}

}  // namespace

void validate(const RunConfig& c) {
  if (!(c.delta >= 0.0) || !std::isfinite(c.delta)) throw ValidationError("delta must be nonnegative");
  if (!(c.T > 0.0)) throw ValidationError("horizon T must be positive");
  if (c.N < 16 || (c.N & (c.N - 1)) != 0) throw ValidationError("N must be a power of two >= 16");
  if (!(c.L > 0.0)) throw ValidationError("box length L must be positive");
  if (!(c.dt > 0.0) || c.dt > c.T) throw ValidationError("dt must lie in (0, T]");
  if (c.record_every < 1) throw ValidationError("record_every must be >= 1");
  if (!(c.eps1 > 0.0)) throw ValidationError("eps1 must be positive");
  make_triple(c.triple.p[0], c.triple.p[1], c.triple.p[2]);
  validate(c.u0);
  validate(c.u1);
}

RunConfig default_run_config() {
  RunConfig c;
  c.params = make_params(1.0, 4.0, 0.5);
  const double r3 = 1.0 / std::sqrt(3.0);
  c.u0 = gaussian_profile(1.0, 2.0, {r3, r3, r3});
  c.u1 = zero_profile();
  return c;
}

std::string to_string(MonitorKind k) {
  switch (k) {
    case MonitorKind::L2: return "L2";
    case MonitorKind::grad: return "grad";
    case MonitorKind::dt_L2: return "dt_L2";
    case MonitorKind::Hs_grad: return "Hs_grad";
    case MonitorKind::Hs_dt: return "Hs_dt";
  }
  return "";
}

std::array<std::vector<MonitorEntry>, 3> monitor_weights(double m, double s, double theta,
                                                         const std::array<double, 3>& g) {
  const double slack = 0.02;
  std::array<std::vector<MonitorEntry>, 3> w;
  auto fill = [&](double w_l2, double w_energy, bool higher, double w_higher) {
    for (int k = 0; k < 3; ++k) {
      w[k].push_back({MonitorKind::L2, w_l2 - g[k]});
      if (!higher) {
        w[k].push_back({MonitorKind::grad, w_energy - g[k]});
        w[k].push_back({MonitorKind::dt_L2, w_energy - g[k]});
      } else {
        w[k].push_back({MonitorKind::dt_L2, w_energy - g[k]});
        w[k].push_back({MonitorKind::Hs_grad, w_higher - g[k]});
        w[k].push_back({MonitorKind::Hs_dt, w_higher - g[k]});
      }
    }
  };
  if (theta >= 0.5 && theta <= 1.0 && s == 0.0) {
    if (m >= 1.0 && m < 1.2) {
      fill((6.0 - 5.0 * m) / (4.0 * m * theta), (6.0 - 3.0 * m) / (4.0 * m * theta), false, 0.0);
      return w;
    }
    if (m >= 1.2 && m < 1.5) {
      const double e = (6.0 - 3.0 * m) / (4.0 * m * theta);
      fill(-1.0 + e, e, false, 0.0);
      return w;
    }
  }
  if (theta >= 0.0 && theta < 0.5) {
    if (m == 1.0 && s == 0.0) {
      fill(rho_bound(1.0, 0.0, theta, true) - slack, rho_bound(1.0, 0.0, theta, false) - slack, false, 0.0);
      return w;
    }
    if (m == 1.5 && s >= 0.0 && s < 0.5) {
      const double rho1 = rho_bound(1.5, 0.0, theta, false) - slack;
      if (s == 0.0)
        fill(-1.0 + rho1, rho1, false, 0.0);
      else
        fill(-1.0 + rho1, rho1, true, rho_bound(1.5, s, theta, false) - slack);
      return w;
    }
  }
  std::ostringstream os;
  os << "no proved solution space for (m, s, theta) = (" << m << ", " << s << ", " << theta << ")";
  throw ValidationError(os.str());
}

double trust_horizon(const RunConfig& c) {
  double radius = 0.0;
  for (const DataProfile* d : {&c.u0, &c.u1})
    if (!d->zero) radius = std::max(radius, 3.0 * d->width);
  return std::max(0.0, (0.5 * c.L - radius) / c.params.b());
}

struct BoxSolver::Impl {
  int N, nz;
  double L;
  std::size_t M;
  double dk;
  double* real = nullptr;
  fftw_complex* spec = nullptr;
  fftw_plan fwd = nullptr, bwd = nullptr;
  std::vector<unsigned char> keep;
  std::vector<std::array<double, 8>> flows;
  double flow_dt = -1.0;
  ModelParams params;

  Impl(const RunConfig& c) : N(c.N), nz(c.N / 2 + 1), L(c.L), params(c.params) {
    M = static_cast<std::size_t>(N) * N * nz;
    dk = 2.0 * kPi / L;
    real = fftw_alloc_real(static_cast<std::size_t>(N) * N * N);
    spec = fftw_alloc_complex(M);
    fwd = fftw_plan_dft_r2c_3d(N, N, N, real, spec, FFTW_MEASURE);
    bwd = fftw_plan_dft_c2r_3d(N, N, N, spec, real, FFTW_MEASURE);
    keep.assign(M, 1);
    const int kmax = N / 3;
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j)
        for (int k = 0; k < nz; ++k) {
          const bool ok = std::abs(freq(i, N)) <= kmax && std::abs(freq(j, N)) <= kmax && k <= kmax;
          keep[(static_cast<std::size_t>(i) * N + j) * nz + k] = ok && !(i == 0 && j == 0 && k == 0);
        }
  }
  ~Impl() {
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
    fftw_free(real);
    fftw_free(spec);
  }
  Vec3 xi(std::size_t idx) const {
    const int k = static_cast<int>(idx % nz);
    const int j = static_cast<int>((idx / nz) % N);
    const int i = static_cast<int>(idx / (static_cast<std::size_t>(nz) * N));
    return {freq(i, N) * dk, freq(j, N) * dk, k * dk};
  }
  void ensure_flows(double dt) {
    if (dt == flow_dt) return;
    flows.resize(M);
    parallel_for(M, [&](std::size_t b, std::size_t e) {
      for (std::size_t idx = b; idx < e; ++idx) {
        const double r = norm(xi(idx));
        const BranchFlow l = branch_flow(params, params.b2, r, dt);
        const BranchFlow t = branch_flow(params, params.a2, r, dt);
        flows[idx] = {l.c00, l.c01, l.c10, l.c11, t.c00, t.c01, t.c10, t.c11};
      }
    });
    flow_dt = dt;
  }
};

BoxSolver::BoxSolver(const RunConfig& c) : cfg_(c), impl_(std::make_unique<Impl>(c)) {}
BoxSolver::~BoxSolver() = default;

void BoxSolver::apply_mask(std::vector<cplx>& c) const {
  for (std::size_t i = 0; i < c.size(); ++i)
    if (!impl_->keep[i]) c[i] = 0.0;
}

std::array<std::vector<cplx>, 3> BoxSolver::nonlinearity(const std::array<std::vector<cplx>, 3>& u) {
  FlushSubnormals ftz;
  Impl& I = *impl_;
  auto F = zeros3(I.M);
  const std::size_t R = static_cast<std::size_t>(I.N) * I.N * I.N;
  const double to_x = 1.0 / (I.L * I.L * I.L);
  const double to_c = std::pow(I.L / I.N, 3.0);
  for (int c = 0; c < 3; ++c) {
    const int src = (c + 2) % 3;
    const double p = cfg_.triple.p[c];
    std::memcpy(I.spec, u[src].data(), I.M * sizeof(fftw_complex));
    fftw_execute(I.bwd);
    for (std::size_t q = 0; q < R; ++q) I.real[q] = powabs(I.real[q] * to_x, p);
    fftw_execute(I.fwd);
    for (std::size_t idx = 0; idx < I.M; ++idx)
      F[c][idx] = I.keep[idx] ? cplx(I.spec[idx][0], I.spec[idx][1]) * to_c : cplx(0.0);
  }
  return F;
}

void BoxSolver::propagate(std::array<std::vector<cplx>, 3>& u, std::array<std::vector<cplx>, 3>& ut, double dt) {
  FlushSubnormals ftz;
  Impl& I = *impl_;
  I.ensure_flows(dt);
  parallel_for(I.M, [&](std::size_t b, std::size_t e) {
    for (std::size_t idx = b; idx < e; ++idx) {
      if (idx == 0) {
        for (int c = 0; c < 3; ++c) u[c][0] = ut[c][0] = 0.0;
        continue;
      }
      const Vec3 x = I.xi(idx);
      const double r = norm(x);
      const Vec3 eta{x[0] / r, x[1] / r, x[2] / r};
      const auto& f = I.flows[idx];
      cplx up = 0.0, vp = 0.0;
      for (int c = 0; c < 3; ++c) {
        up += eta[c] * u[c][idx];
        vp += eta[c] * ut[c][idx];
      }
      const cplx nup = f[0] * up + f[1] * vp, nvp = f[2] * up + f[3] * vp;
      for (int c = 0; c < 3; ++c) {
        const cplx uq = u[c][idx] - up * eta[c], vq = ut[c][idx] - vp * eta[c];
        u[c][idx] = nup * eta[c] + f[4] * uq + f[5] * vq;
        ut[c][idx] = nvp * eta[c] + f[6] * uq + f[7] * vq;
      }
    }
  });
}

void BoxSolver::step(SpectralField& f, double dt) {
  if (!cfg_.nonlinear) {
    propagate(f.u, f.ut, dt);
    f.t += dt;
    return;
  }
  if (!cache_valid_) {
    F_cache_ = nonlinearity(f.u);
    cache_valid_ = true;
  }
  const std::size_t M = impl_->M;
  auto pu = f.u, pv = f.ut;
  for (int c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < M; ++i) {
      pv[c][i] += dt * F_cache_[c][i];
      f.ut[c][i] += 0.5 * dt * F_cache_[c][i];
    }
  propagate(pu, pv, dt);
  const auto Fs = nonlinearity(pu);
  propagate(f.u, f.ut, dt);
  for (int c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < M; ++i) f.ut[c][i] += 0.5 * dt * Fs[c][i];
  f.t += dt;
  F_cache_ = nonlinearity(f.u);
}

SpectralField step(const RunConfig& c, const SpectralField& f, double dt) {
  BoxSolver s(c);
  SpectralField out = f;
  s.step(out, dt);
  return out;
}

namespace {

SpectralField field_from_profiles(const RunConfig& c, const DataProfile& u0, const DataProfile& u1) {
  BoxSolver probe(c);
  SpectralField f;
  f.N = c.N;
  f.L = c.L;
  f.t = 0.0;
  const int N = c.N, nz = N / 2 + 1;
  const std::size_t M = f.modes();
  f.u = zeros3(M);
  f.ut = zeros3(M);
  const double dk = 2.0 * kPi / c.L;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < nz; ++k) {
        const std::size_t idx = (static_cast<std::size_t>(i) * N + j) * nz + k;
        if (idx == 0) continue;
        const Vec3 xi{freq(i, N) * dk, freq(j, N) * dk, k * dk};
        const CVec3 a = profile_fourier(u0, xi), b = profile_fourier(u1, xi);
        for (int q = 0; q < 3; ++q) {
          f.u[q][idx] = a[q];
          f.ut[q][idx] = b[q];
        }
      }
  for (int q = 0; q < 3; ++q) {
    probe.apply_mask(f.u[q]);
    probe.apply_mask(f.ut[q]);
  }
  return f;
}

double vector_norm(const SpectralField& f, bool velocity) {
  const NormSums n = norm_sums(f.N, f.L, 0.0, f.u, f.ut);
  double s = 0.0;
  for (int c = 0; c < 3; ++c) s += std::pow(n.v[c][velocity ? 2 : 0], 2);
  return std::sqrt(s);
}

}  // namespace

std::pair<DataProfile, DataProfile> scaled_profiles(const RunConfig& c) {
  DataProfile a = c.u0, b = c.u1;
  a.amplitude = b.amplitude = 1.0;
  const SpectralField f = field_from_profiles(c, a, b);
  const double na = vector_norm(f, false), nb = vector_norm(f, true);
  if (!a.zero) {
    if (!(na > 0.0)) throw ValidationError("u0 has no resolved modes on the grid");
    a.amplitude = c.delta / na;
  }
  if (!b.zero) {
    if (!(nb > 0.0)) throw ValidationError("u1 has no resolved modes on the grid");
    b.amplitude = c.delta / nb;
  }
  return {a, b};
}

SpectralField initial_field(const RunConfig& c) {
  validate(c);
  auto [a, b] = scaled_profiles(c);
  return field_from_profiles(c, a, b);
}

double box_norm(const SpectralField& f, int component, MonitorKind kind, double s) {
  if (component < 0 || component > 2) throw ValidationError("component must be 0, 1 or 2");
  return norm_sums(f.N, f.L, s, f.u, f.ut).v[component][kind_index(kind)];
}

double hermitian_defect(const SpectralField& f) {
  const int N = f.N, nz = N / 2 + 1;
  double defect = 0.0, scale = 0.0;
  for (const auto* arr : {&f.u, &f.ut})
    for (int c = 0; c < 3; ++c)
      for (int k : {0, N / 2})
        for (int i = 0; i < N; ++i)
          for (int j = 0; j < N; ++j) {
            const cplx a = (*arr)[c][(static_cast<std::size_t>(i) * N + j) * nz + k];
            const cplx b = (*arr)[c][(static_cast<std::size_t>((N - i) % N) * N + (N - j) % N) * nz + k];
            defect = std::max(defect, std::abs(a - std::conj(b)));
            scale = std::max(scale, std::abs(a));
          }
  return scale > 0.0 ? defect / scale : 0.0;
}

double masked_energy(const SpectralField& f) {
  const int N = f.N, nz = N / 2 + 1, kmax = N / 3;
  double e = 0.0;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < nz; ++k) {
        if (std::abs(freq(i, N)) <= kmax && std::abs(freq(j, N)) <= kmax && k <= kmax) continue;
        const std::size_t idx = (static_cast<std::size_t>(i) * N + j) * nz + k;
        for (int c = 0; c < 3; ++c) e += std::norm(f.u[c][idx]) + std::norm(f.ut[c][idx]);
      }
  return e;
}

RunResult run(const RunConfig& c, const SpectralField* initial) {
  validate(c);
  RunResult res;
  res.g = c.g;
  if (c.regime) {
    const ExponentReport rep = classify_and_g(c.triple, c.m, c.s, c.params.theta, *c.regime, c.eps1);
    res.g = rep.g;
    res.exponent_case = to_string(rep.ecase);
  }
  res.weights = monitor_weights(c.m, c.s, c.params.theta, res.g);
  res.trust_horizon = trust_horizon(c);
  SpectralField f = initial ? *initial : initial_field(c);
  if (f.N != c.N || f.L != c.L) throw ValidationError("initial field does not match the configured grid");
  BoxSolver solver(c);
  const long steps = std::lround((c.T - f.t) / c.dt);
  bool have_ref = false;
  for (int k = 0; k < 3; ++k) res.sup_value[k].assign(res.weights[k].size(), 0.0);
  for (long n = 0; n <= steps; ++n) {
    if (n > 0) solver.step(f, c.dt);
    const NormSums ns = norm_sums(f.N, f.L, c.s, f.u, f.ut);
    std::array<std::vector<double>, 3> raw;
    const auto w = weighted_of(res.weights, ns, f.t, &raw);
    for (const auto& row : w)
      for (double v : row)
        if (!std::isfinite(v)) {
          std::ostringstream os;
          os << "non-finite state at t=" << f.t;
          throw NumericalError(os.str());
        }
    if (f.t >= c.t_ref - 1e-9) {
      if (!have_ref) {
        res.ref_value = w;
        have_ref = true;
      }
      for (int k = 0; k < 3; ++k)
        for (std::size_t q = 0; q < w[k].size(); ++q) res.sup_value[k][q] = std::max(res.sup_value[k][q], w[k][q]);
    }
    if (n % c.record_every == 0 || n == steps) {
      res.rows.push_back({f.t, raw, w});
      res.max_hermitian_defect = std::max(res.max_hermitian_defect, hermitian_defect(f));
      res.max_masked_energy = std::max(res.max_masked_energy, masked_energy(f));
    }
  }
  if (!have_ref) throw ValidationError("horizon T ends before the verdict reference time t_ref");
  for (int k = 0; k < 3; ++k)
    for (std::size_t q = 0; q < res.sup_value[k].size(); ++q)
      if (res.sup_value[k][q] > 3.0 * res.ref_value[k][q]) res.bounded = false;
  res.verdict = res.bounded ? "bounded" : "growing";
  res.final_state = std::move(f);
  return res;
}

PicardResult picard_probe(const RunConfig& c, int iterations, double T, const SpectralField* initial) {
  validate(c);
  if (iterations < 3) throw ValidationError("picard probe needs at least 3 iterations");
  if (!(T > 0.0)) throw ValidationError("picard horizon must be positive");
  std::array<double, 3> g = c.g;
  if (c.regime) g = classify_and_g(c.triple, c.m, c.s, c.params.theta, *c.regime, c.eps1).g;
  const auto weights = monitor_weights(c.m, c.s, c.params.theta, g);
  const SpectralField f0 = initial ? *initial : initial_field(c);
  if (f0.N != c.N || f0.L != c.L) throw ValidationError("initial field does not match the configured grid");
  BoxSolver solver(c);
  const int K = iterations;
  const std::size_t M = f0.modes();
  std::vector<std::array<std::vector<cplx>, 3>> U(K + 1, f0.u), V(K + 1, f0.ut);
  U[0] = zeros3(M);
  V[0] = zeros3(M);
  std::vector<std::array<std::vector<cplx>, 3>> Fold(K, zeros3(M)), Fnew(K, zeros3(M));
  if (c.nonlinear) {
    const auto F0 = solver.nonlinearity(f0.u);
    for (int n = 1; n < K; ++n) Fold[n] = F0;
  }
  PicardResult res;
  res.d.assign(K, 0.0);
  auto diff_norm = [&](int n, double t) {
    auto du = U[n], dv = V[n];
    for (int q = 0; q < 3; ++q)
      for (std::size_t i = 0; i < M; ++i) {
        du[q][i] -= U[n - 1][q][i];
        dv[q][i] -= V[n - 1][q][i];
      }
    return xnorm(weights, norm_sums(c.N, c.L, c.s, du, dv), t);
  };
  res.d[0] = diff_norm(1, 0.0);
  const long steps = std::lround(T / c.dt);
  const double dt = c.dt;
  for (long j = 1; j <= steps; ++j) {
    const double t = j * dt;
    for (int n = 1; n <= K; ++n) {
      for (int q = 0; q < 3; ++q)
        for (std::size_t i = 0; i < M; ++i) V[n][q][i] += 0.5 * dt * Fold[n - 1][q][i];
      solver.propagate(U[n], V[n], dt);
      for (int q = 0; q < 3; ++q)
        for (std::size_t i = 0; i < M; ++i) V[n][q][i] += 0.5 * dt * Fnew[n - 1][q][i];
      if (n < K && c.nonlinear) Fnew[n] = solver.nonlinearity(U[n]);
    }
    std::swap(Fold, Fnew);
    for (int n = 1; n <= K; ++n) {
      const double d = diff_norm(n, t);
      if (!std::isfinite(d)) {
        std::ostringstream os;
        os << "non-finite Picard iterate at t=" << t;
        throw NumericalError(os.str());
      }
      res.d[n - 1] = std::max(res.d[n - 1], d);
    }
  }
  const double floor = 1e-12 * res.d[0];
  for (int n = 1; n + 1 < K; ++n)
    if (res.d[n + 1] > floor && res.d[n] > floor) res.ratios.push_back(res.d[n + 1] / res.d[n]);
  res.noise_floor_reached = static_cast<int>(res.ratios.size()) < K - 2;
  int grow = 0;
  for (int n = 0; n + 1 < K; ++n) {
    grow = res.d[n + 1] > res.d[n] ? grow + 1 : 0;
    if (grow >= 3) res.diverged = true;
  }
  if (!res.ratios.empty()) {
    double lg = 0.0, mx = 0.0;
    for (double r : res.ratios) {
      lg += std::log(r);
      mx = std::max(mx, r);
    }
    res.ratio = std::exp(lg / res.ratios.size());
    res.contraction = mx < 1.0 && !res.diverged;
  } else if (res.d[0] > 0.0) {
    res.ratio = res.d[1] / res.d[0];
    res.contraction = res.ratio < 1.0 && !res.diverged;
  } else {
    res.ratio = 0.0;
    res.contraction = true;
  }
  res.verdict = res.diverged ? "diverging" : (res.contraction ? "contraction" : "no contraction");
  return res;
}

void save_checkpoint(const std::string& prefix, const SpectralField& f, const RunConfig& c) {
  std::ofstream bin(prefix + ".bin", std::ios::binary);
  if (!bin) throw ValidationError("cannot write " + prefix + ".bin");
  auto put = [&](double x) {
    if constexpr (std::endian::native == std::endian::big) {
      unsigned char b[8];
      std::memcpy(b, &x, 8);
      std::reverse(b, b + 8);
      bin.write(reinterpret_cast<const char*>(b), 8);
    } else {
      bin.write(reinterpret_cast<const char*>(&x), 8);
    }
  };
  for (const auto* arr : {&f.u, &f.ut})
    for (int q = 0; q < 3; ++q)
      for (const cplx& z : (*arr)[q]) {
        put(z.real());
        put(z.imag());
      }
  nlohmann::json j;
  j["format"] = "elastic-spectral-checkpoint";
  j["version"] = 1;
  j["endianness"] = "little";
  j["dtype"] = "complex128";
  j["fields"] = {"u1", "u2", "u3", "ut1", "ut2", "ut3"};
  j["dims"] = {f.N, f.N, f.N / 2 + 1};
  j["N"] = f.N;
  j["L"] = f.L;
  j["t"] = f.t;
  j["params"] = {{"a2", c.params.a2}, {"b2", c.params.b2}, {"theta", c.params.theta}, {"epsilon", c.params.epsilon}};
  j["triple"] = c.triple.p;
  j["program_version"] = kVersion;
  std::ofstream js(prefix + ".json");
  js << j.dump(2) << "\n";
}

SpectralField load_checkpoint(const std::string& prefix) {
  std::ifstream js(prefix + ".json");
  if (!js) throw ValidationError("cannot read " + prefix + ".json");
  nlohmann::json j = nlohmann::json::parse(js);
  if (j.value("format", "") != "elastic-spectral-checkpoint" || j.value("version", 0) != 1)
    throw ValidationError("unsupported checkpoint format in " + prefix + ".json");
  SpectralField f;
  f.N = j.at("N").get<int>();
  f.L = j.at("L").get<double>();
  f.t = j.at("t").get<double>();
  const std::size_t M = f.modes();
  f.u = zeros3(M);
  f.ut = zeros3(M);
  std::ifstream bin(prefix + ".bin", std::ios::binary);
  if (!bin) throw ValidationError("cannot read " + prefix + ".bin");
  auto get = [&]() {
    unsigned char b[8];
    bin.read(reinterpret_cast<char*>(b), 8);
    if (!bin) throw ValidationError("truncated checkpoint " + prefix + ".bin");
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + 8);
    double x;
    std::memcpy(&x, b, 8);
    return x;
  };
  for (auto* arr : {&f.u, &f.ut})
    for (int q = 0; q < 3; ++q)
      for (cplx& z : (*arr)[q]) {
        const double re = get();
        z = cplx(re, get());
      }
  return f;
}

nlohmann::json to_json(const RunResult& r) {
  nlohmann::json j;
  j["verdict"] = r.verdict;
  j["bounded"] = r.bounded;
  j["g"] = r.g;
  if (!r.exponent_case.empty()) j["case"] = r.exponent_case;
  j["trust_horizon"] = r.trust_horizon;
  j["max_hermitian_defect"] = r.max_hermitian_defect;
  j["max_masked_energy"] = r.max_masked_energy;
  j["components"] = nlohmann::json::array();
  for (int k = 0; k < 3; ++k) {
    nlohmann::json comp = nlohmann::json::array();
    for (std::size_t q = 0; q < r.weights[k].size(); ++q)
      comp.push_back({{"kind", to_string(r.weights[k][q].kind)},
                      {"weight", r.weights[k][q].weight},
                      {"value_at_t_ref", r.ref_value[k][q]},
                      {"sup", r.sup_value[k][q]}});
    j["components"].push_back(comp);
  }
  return j;
}

nlohmann::json to_json(const PicardResult& r) {
  return {{"d", r.d},
          {"ratios", r.ratios},
          {"ratio", r.ratio},
          {"contraction", r.contraction},
          {"diverged", r.diverged},
          {"noise_floor_reached", r.noise_floor_reached},
          {"verdict", r.verdict}};
}

}  // namespace elastic
