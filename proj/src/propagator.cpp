#include "elastic/propagator.hpp"

#include <algorithm>

namespace elastic {

BranchFlow branch_flow(const ModelParams& p, double speed2, double r, double t, double damping) {
  const double sigma = 0.5 * damping * rpow(r, 2.0 * p.theta);
  const double P = speed2 * r * r;
  const double S = 2.0 * sigma;
  const double D = sigma * sigma - P;
  const bool degenerate = std::abs(4.0 * D) <= 1e-12 * std::max(S * S, 4.0 * P);
  // eC = e^{-sigma t} C(t), eS = e^{-sigma t} S(t) with C' = D S, S' = C, C(0)=1, S(0)=0.
  double eC, eS;
  if (degenerate) {
    const double e = std::exp(-sigma * t);
    eC = e;
    eS = e * t;
  } else if (D > 0.0) {
    const double delta = std::sqrt(D);
    const double mu_minus = P / (sigma + delta);  // sigma - delta without cancellation
    const double em = std::exp(-mu_minus * t);
    const double x = -std::expm1(-2.0 * delta * t);  // 1 - e^{-2 delta t}
    eS = em * x / (2.0 * delta);
    eC = em * (1.0 - 0.5 * x);
  } else {
    const double w = std::sqrt(-D);
    const double e = std::exp(-sigma * t);
    eC = e * std::cos(w * t);
    eS = e * std::sin(w * t) / w;
  }
  BranchFlow f;
  f.c00 = eC + sigma * eS;
  f.c01 = eS;
  f.c10 = -P * eS;
  f.c11 = eC - sigma * eS;
  return f;
}

namespace {

Vec3 unit(const Vec3& x) {
  const double n = norm(x);
  return {x[0] / n, x[1] / n, x[2] / n};
}

cplx cdot(const Vec3& e, const CVec3& v) { return e[0] * v[0] + e[1] * v[1] + e[2] * v[2]; }

}  // namespace

CVec3 ModeState::longitudinal() const {
  const double r = norm(xi);
  if (r == 0.0) return {};
  const Vec3 e = unit(xi);
  const cplx c = cdot(e, u_hat);
  return {c * e[0], c * e[1], c * e[2]};
}

CVec3 ModeState::transverse() const {
  CVec3 l = longitudinal();
  return {u_hat[0] - l[0], u_hat[1] - l[1], u_hat[2] - l[2]};
}

ModeState evolve_mode(const ModelParams& p, const ModeState& s, double t, double damping) {
  if (!(t >= 0.0)) throw ValidationError("evolve_mode requires t >= 0");
  if (t == 0.0) return s;
  const double r = norm(s.xi);
  ModeState out = s;
  if (r == 0.0) {
    BranchFlow f = branch_flow(p, p.a2, 0.0, t, damping);
    for (int k = 0; k < 3; ++k) {
      out.u_hat[k] = f.c00 * s.u_hat[k] + f.c01 * s.ut_hat[k];
      out.ut_hat[k] = f.c10 * s.u_hat[k] + f.c11 * s.ut_hat[k];
    }
    return out;
  }
  const Vec3 e = unit(s.xi);
  const cplx l0 = cdot(e, s.u_hat), l1 = cdot(e, s.ut_hat);
  BranchFlow fa = branch_flow(p, p.a2, r, t, damping);
  BranchFlow fb = branch_flow(p, p.b2, r, t, damping);
  const cplx lu = fb.c00 * l0 + fb.c01 * l1, lut = fb.c10 * l0 + fb.c11 * l1;
  for (int k = 0; k < 3; ++k) {
    const cplx t0 = s.u_hat[k] - l0 * e[k], t1 = s.ut_hat[k] - l1 * e[k];
    out.u_hat[k] = fa.c00 * t0 + fa.c01 * t1 + lu * e[k];
    out.ut_hat[k] = fa.c10 * t0 + fa.c11 * t1 + lut * e[k];
  }
  return out;
}

MicroEnergy micro_energy(const ModelParams& p, const ModeState& s) {
  const double r = norm(s.xi);
  if (!(r > 0.0)) throw ValidationError("micro_energy requires |xi| > 0");
  const Mat3 Q = orthonormal_frame(unit(s.xi));
  const double sp[3] = {p.a(), p.a(), p.b()};
  MicroEnergy m;
  m.xi = s.xi;
  for (int k = 0; k < 3; ++k) {
    Vec3 q{Q(0, k), Q(1, k), Q(2, k)};
    const cplx v = cdot(q, s.u_hat), vt = cdot(q, s.ut_hat);
    const cplx dv = cplx(0.0, -1.0) * vt;
    m.W[k] = dv + sp[k] * r * v;
    m.W[k + 3] = dv - sp[k] * r * v;
  }
  return m;
}

ModeState from_micro_energy(const ModelParams& p, const MicroEnergy& m) {
  const double r = norm(m.xi);
  if (!(r > 0.0)) throw ValidationError("from_micro_energy requires |xi| > 0");
  const Mat3 Q = orthonormal_frame(unit(m.xi));
  const double sp[3] = {p.a(), p.a(), p.b()};
  ModeState s;
  s.xi = m.xi;
  for (int k = 0; k < 3; ++k) {
    const cplx v = (m.W[k] - m.W[k + 3]) / (2.0 * sp[k] * r);
    const cplx vt = cplx(0.0, 1.0) * (m.W[k] + m.W[k + 3]) / 2.0;
    for (int j = 0; j < 3; ++j) {
      s.u_hat[j] += Q(j, k) * v;
      s.ut_hat[j] += Q(j, k) * vt;
    }
  }
  return s;
}

double energy_pha(const ModelParams& p, const ModeState& s) {
  const double r2 = dot(s.xi, s.xi);
  double ut = 0.0, u = 0.0;
  for (int k = 0; k < 3; ++k) {
    ut += std::norm(s.ut_hat[k]);
    u += std::norm(s.u_hat[k]);
  }
  const double xu = std::norm(cdot(s.xi, s.u_hat));
  return ut + p.a2 * r2 * u + (p.b2 - p.a2) * xu;
}

double energy_mid(const ModelParams& p, const ModeState& s) { return 0.5 * energy_pha(p, s); }

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 1; j <= n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 1; j <= n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

namespace {

void sphere(QuadratureGrid& g, int npolar, int nazimuth) {
  std::vector<double> c, wc;
  gauss_legendre(npolar, c, wc);
  for (int i = 0; i < npolar; ++i) {
    const double st = std::sqrt(std::max(0.0, 1.0 - c[i] * c[i]));
    for (int j = 0; j < nazimuth; ++j) {
      const double ph = 2.0 * kPi * j / nazimuth;
      g.dirs.push_back({st * std::cos(ph), st * std::sin(ph), c[i]});
      g.wd.push_back(wc[i] * 2.0 * kPi / nazimuth);
    }
  }
}

void panel(QuadratureGrid& g, double lo, double hi, const std::vector<double>& x, const std::vector<double>& w) {
  const double h = 0.5 * (hi - lo);
  for (std::size_t i = 0; i < x.size(); ++i) {
    g.r.push_back(lo + h * (x[i] + 1.0));
    g.wr.push_back(h * w[i]);
  }
}

}  // namespace

QuadratureGrid uniform_grid(double R, int nr, int npolar, int nazimuth) {
  if (!(R > 0.0) || nr < 1 || npolar < 1 || nazimuth < 1) throw ValidationError("invalid quadrature grid");
  QuadratureGrid g;
  g.R = R;
  std::vector<double> x, w;
  gauss_legendre(nr, x, w);
  panel(g, 0.0, R, x, w);
  sphere(g, npolar, nazimuth);
  return g;
}

QuadratureGrid graded_grid(double R, double r_min, int panels, int nodes, int npolar, int nazimuth) {
  if (!(R > 0.0) || !(r_min > 0.0 && r_min < R) || panels < 1 || nodes < 1)
    throw ValidationError("invalid graded quadrature grid");
  QuadratureGrid g;
  g.R = R;
  std::vector<double> x, w;
  gauss_legendre(nodes, x, w);
  panel(g, 0.0, r_min, x, w);
  const double q = std::pow(R / r_min, 1.0 / panels);
  double lo = r_min;
  for (int k = 0; k < panels; ++k) {
    double hi = (k + 1 == panels) ? R : lo * q;
    panel(g, lo, hi, x, w);
    lo = hi;
  }
  sphere(g, npolar, nazimuth);
  return g;
}

double integrate(const QuadratureGrid& g, const std::function<double(double, const Vec3&)>& f) {
  std::vector<double> radial(g.r.size());
  parallel_for(g.r.size(), [&](std::size_t b, std::size_t e) {
    std::vector<double> tmp(g.dirs.size());
    for (std::size_t i = b; i < e; ++i) {
      for (std::size_t j = 0; j < g.dirs.size(); ++j) tmp[j] = g.wd[j] * f(g.r[i], g.dirs[j]);
      radial[i] = g.wr[i] * g.r[i] * g.r[i] * pairwise_sum(tmp);
    }
  });
  return pairwise_sum(radial) / std::pow(2.0 * kPi, 3.0);
}

const char* to_string(NormKind k) {
  switch (k) {
    case NormKind::L2: return "L2";
    case NormKind::Hs: return "Hs";
    case NormKind::dt_L2: return "dt-L2";
    case NormKind::dt_Hs: return "dt-Hs";
    case NormKind::energy: return "energy";
  }
  return "";
}

NormKind norm_kind_from_string(const std::string& s) {
  if (s == "L2") return NormKind::L2;
  if (s == "Hs") return NormKind::Hs;
  if (s == "dt-L2") return NormKind::dt_L2;
  if (s == "dt-Hs") return NormKind::dt_Hs;
  if (s == "energy") return NormKind::energy;
  throw ValidationError("norm kind must be one of L2, Hs, dt-L2, dt-Hs, energy (got '" + s + "')");
}

double norm_order_u(const NormSpec& n) {
  switch (n.kind) {
    case NormKind::L2: return 0.0;
    case NormKind::Hs: return n.s;
    case NormKind::energy: return n.s + 1.0;
    default: return -1.0;
  }
}

double norm_order_ut(const NormSpec& n) {
  switch (n.kind) {
    case NormKind::dt_L2: return 0.0;
    case NormKind::dt_Hs:
    case NormKind::energy: return n.s;
    default: return -1.0;
  }
}

void check_tail(const DataProfile& u0, const DataProfile& u1, const NormSpec& n, double R) {
  // u and u_t at any time mix both data with bounded multipliers of at most
  // polynomial growth |xi|^2, so the tail is checked two orders above the norm.
  const double s = std::max(norm_order_u(n), norm_order_ut(n)) + 2.0;
  for (const DataProfile* d : {&u0, &u1}) {
    if (d->zero) continue;
    if (profile_tail_fraction(*d, s, R) > 1e-10)
      throw ValidationError("quadrature radius R=" + std::to_string(R) +
                            " leaves spectral tail mass above 1e-10; increase R");
  }
}

std::vector<double> norm_series(const ModelParams& p, const DataProfile& u0, const DataProfile& u1,
                                const std::vector<double>& times, const NormSpec& n, const QuadratureGrid& g) {
  validate(u0);
  validate(u1);
  for (double t : times)
    if (!(t >= 0.0)) throw ValidationError("times must be nonnegative");
  check_tail(u0, u1, n, g.R);
  const double su = norm_order_u(n), sut = norm_order_ut(n);
  auto integrable = [](const DataProfile& d, double s) { return d.zero || s < 0.0 || s - d.riesz_order > -1.5; };
  if (!integrable(u0, su) || !integrable(u1, su) || !integrable(u1, sut))
    throw ValidationError("requested norm is infinite for these data (needs s - riesz_order > -3/2)");
  const std::size_t nt = times.size();
  std::vector<std::vector<double>> radial(nt, std::vector<double>(g.r.size()));
  parallel_for(g.r.size(), [&](std::size_t b, std::size_t e) {
    std::vector<std::vector<double>> tmp(nt, std::vector<double>(g.dirs.size()));
    std::vector<BranchFlow> fa(nt), fb(nt);
    for (std::size_t i = b; i < e; ++i) {
      const double r = g.r[i];
      for (std::size_t k = 0; k < nt; ++k) {
        fa[k] = branch_flow(p, p.a2, r, times[k]);
        fb[k] = branch_flow(p, p.b2, r, times[k]);
      }
      const double wu = su >= 0.0 ? rpow(r, 2.0 * su) : 0.0;
      const double wut = sut >= 0.0 ? rpow(r, 2.0 * sut) : 0.0;
      for (std::size_t j = 0; j < g.dirs.size(); ++j) {
        const Vec3& eta = g.dirs[j];
        const Vec3 xi{r * eta[0], r * eta[1], r * eta[2]};
        const double g0 = profile_scalar_fourier(u0, xi), g1 = profile_scalar_fourier(u1, xi);
        // longitudinal amplitudes and transverse vectors of the data
        const double l0 = g0 * dot(eta, u0.direction), l1 = g1 * dot(eta, u1.direction);
        const double tt00 = g0 * g0 - l0 * l0, tt11 = g1 * g1 - l1 * l1;
        const double tt01 = g0 * g1 * dot(u0.direction, u1.direction) - l0 * l1;
        for (std::size_t k = 0; k < nt; ++k) {
          const BranchFlow& A = fa[k];
          const BranchFlow& B = fb[k];
          const double lu = B.c00 * l0 + B.c01 * l1, lut = B.c10 * l0 + B.c11 * l1;
          const double tu = A.c00 * A.c00 * tt00 + 2.0 * A.c00 * A.c01 * tt01 + A.c01 * A.c01 * tt11;
          const double tut = A.c10 * A.c10 * tt00 + 2.0 * A.c10 * A.c11 * tt01 + A.c11 * A.c11 * tt11;
          tmp[k][j] = g.wd[j] * (wu * (lu * lu + tu) + wut * (lut * lut + tut));
        }
      }
      for (std::size_t k = 0; k < nt; ++k) radial[k][i] = g.wr[i] * r * r * pairwise_sum(tmp[k]);
    }
  });
  std::vector<double> out(nt);
  for (std::size_t k = 0; k < nt; ++k) {
    const double v = pairwise_sum(radial[k]) / std::pow(2.0 * kPi, 3.0);
    if (!std::isfinite(v)) throw NumericalError("non-finite norm at t=" + std::to_string(times[k]));
    out[k] = std::sqrt(std::max(0.0, v));
  }
  return out;
}

double norm_quadrature(const ModelParams& p, const DataProfile& u0, const DataProfile& u1, double t,
                       const NormSpec& n, const QuadratureGrid& g) {
  return norm_series(p, u0, u1, {t}, n, g)[0];
}

namespace {

double max_real_rate(const ModelParams& p, double r) {
  double m = 0.0;
  for (auto& z : exact_roots6(p, r)) m = std::max(m, z.real());
  return m;
}

double max_abs_rate(const ModelParams& p, double r) {
  double m = 0.0;
  for (auto& z : exact_roots6(p, r)) m = std::max(m, std::abs(z));
  return m;
}

double re_vbar_vt(const ModeState& s) {
  double acc = 0.0;
  for (int k = 0; k < 3; ++k) acc += (std::conj(s.u_hat[k]) * s.ut_hat[k]).real();
  return acc;
}

}  // namespace

LyapunovReport verify_lyapunov_mid(const ModelParams& p, const ModeState& s0, double T, int samples) {
  const double r = norm(s0.xi);
  const double eps = p.epsilon;
  if (!(r >= eps && r <= 1.0 / eps)) throw ValidationError("verify_lyapunov_mid requires eps <= |xi| <= 1/eps");
  if (!(T > 0.0) || samples < 2) throw ValidationError("verify_lyapunov_mid requires T > 0 and samples >= 2");
  LyapunovReport rep;
  const double e42 = 4.0 * p.theta - 2.0;
  const double rmax = e42 < 0.0 ? eps : 1.0 / eps;
  rep.c0 = 1.0 + std::pow(rmax, e42) / (2.0 * p.a2);
  rep.c2 = 1.0 / (p.a2 * eps * eps);
  rep.c1 = std::min(2.0 * rpow(eps, 2.0 * p.theta) / (2.0 * rep.c0 + 1.0), 1.0 / (2.0 * rep.c2));
  rep.c3 = rep.c2 + 1.0 / rep.c1;
  auto F = [&](const ModeState& s) { return energy_mid(p, s) / rep.c1 + re_vbar_vt(s); };
  const double h = std::min(1e-4 / std::max(max_abs_rate(p, r), 1e-300), 0.25 * T / (samples - 1));
  rep.E0 = energy_mid(p, s0);
  rep.F0 = F(s0);
  rep.max_violation = -INFINITY;
  rep.sandwich_lower = rep.sandwich_upper = -INFINITY;
  for (int k = 0; k < samples; ++k) {
    const double t = h + (T - h) * k / (samples - 1);
    const ModeState s = evolve_mode(p, s0, t);
    const double E = energy_mid(p, s), Ft = F(s);
    const double dF = (F(evolve_mode(p, s0, t + h)) - F(evolve_mode(p, s0, t - h))) / (2.0 * h);
    rep.max_violation = std::max(rep.max_violation, dF + Ft / rep.c3);
    rep.sandwich_lower = std::max(rep.sandwich_lower, rep.c2 * E - Ft);
    rep.sandwich_upper = std::max(rep.sandwich_upper, Ft - rep.c3 * E);
  }
  rep.ET = energy_mid(p, evolve_mode(p, s0, T));
  rep.gronwall_bound = 3.0 * std::exp(-T / rep.c3) * rep.E0;
  const double tol = 1e-6 * std::abs(rep.F0);
  rep.ok = rep.max_violation <= tol && rep.sandwich_lower <= tol && rep.sandwich_upper <= tol &&
           rep.ET <= rep.gronwall_bound * (1.0 + 1e-12);
  return rep;
}

EphaDecayReport verify_epha_decay(const ModelParams& p, const ModeState& s0, double T) {
  if (!(T > 0.0)) throw ValidationError("verify_epha_decay requires T > 0");
  const double r = norm(s0.xi);
  EphaDecayReport rep;
  rep.gamma = 2.0 * p.max_rate();
  rep.interior = r < p.epsilon;
  rep.bound = rep.interior ? (2.0 / 3.0) * rpow(r, rep.gamma) : 2.0 / 3.0;
  std::vector<double> ts, ls;
  const int n = 200;
  for (int k = 0; k <= n; ++k) {
    const double t = 0.5 * T + 0.5 * T * k / n;
    const double E = energy_pha(p, evolve_mode(p, s0, t));
    if (!(E > 0.0)) throw NumericalError("E_pha vanished along the trajectory; rate undefined");
    ts.push_back(t);
    ls.push_back(std::log(E));
  }
  rep.fitted_rate = -least_squares(ts, ls).slope;
  rep.ok = rep.fitted_rate >= rep.bound;
  return rep;
}

double dissipation_residual(const ModelParams& p, const ModeState& s0, double T, int samples) {
  const double r = norm(s0.xi);
  const double d = 2.0 * rpow(r, 2.0 * p.theta);
  const double h = 1e-4 / std::max(max_abs_rate(p, r), 1e-300);
  double worst = 0.0;
  for (int k = 0; k < samples; ++k) {
    const double t = h + T * k / std::max(1, samples - 1);
    const ModeState s = evolve_mode(p, s0, t);
    const double E = energy_pha(p, s);
    if (!(E > 0.0)) continue;
    double ut2 = 0.0;
    for (int j = 0; j < 3; ++j) ut2 += std::norm(s.ut_hat[j]);
    const double dE = (energy_pha(p, evolve_mode(p, s0, t + h)) - energy_pha(p, evolve_mode(p, s0, t - h))) / (2.0 * h);
    worst = std::max(worst, std::abs(dE + d * ut2) / (d * E));
  }
  return worst;
}

}  // namespace elastic
