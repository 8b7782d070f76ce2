#include "elastic/symbol.hpp"

#include <algorithm>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_complex.hpp>
#include <cmath>
#include <numeric>

namespace elastic {

namespace mp = boost::multiprecision;
using mreal = mp::cpp_bin_float_50;
using mcplx = mp::cpp_complex_50;

namespace {

const cplx I(0.0, 1.0);

void require_unit(const Vec3& eta) {
  if (std::abs(norm(eta) - 1.0) > 1e-12) throw ValidationError("eta must be a unit vector (|eta| = 1 within 1e-12)");
}

template <class R>
R rpow_t(const R& r, double e) {
  using std::pow;
  if (e == 0.0) return R(1);
  return pow(r, R(e));
}

// Roots of mu^2 - S mu + P = 0 without cancellation.
template <class R, class C>
void stable_roots(const R& S, const R& P, C& big, C& small, bool& osc, R& disc) {
  using std::sqrt;
  disc = S * S - 4 * P;
  if (disc >= 0) {
    R q = (S + sqrt(disc)) / 2;
    big = C(q, R(0));
    small = (q > 0) ? C(P / q, R(0)) : C(R(0), R(0));
    osc = false;
  } else {
    R w = sqrt(-disc) / 2;
    big = C(S / 2, w);
    small = C(S / 2, -w);
    osc = true;
  }
}

template <class R, class C>
std::array<C, 6> exact6_t(double a2, double b2, double theta, const R& r) {
  std::array<C, 6> out;
  const R S = rpow_t(r, 2.0 * theta);
  const double ys[3] = {a2, a2, b2};
  for (int k = 0; k < 3; ++k) {
    C big, small;
    bool osc;
    R disc;
    stable_roots<R, C>(S, R(ys[k]) * r * r, big, small, osc, disc);
    out[k] = small;
    out[k + 3] = big;
  }
  return out;
}

template <class R, class C>
struct Terms {
  C z1a, z1b, z2, z3, z4, z5;
  R z6a, z6b;
};

template <class R, class C>
Terms<R, C> terms_t(double a2, double b2, double theta, const R& r) {
  Terms<R, C> t;
  const C i(R(0), R(1));
  const R r42 = rpow_t(r, 2.0 - 4.0 * theta);
  const R r46 = rpow_t(r, 4.0 - 6.0 * theta);
  const R r34 = rpow_t(r, 3.0 - 4.0 * theta);
  const R r22 = rpow_t(r, 2.0 - 2.0 * theta);
  const R r2t = rpow_t(r, 2.0 * theta);
  const R r4t = rpow_t(r, 4.0 * theta);
  auto z1 = [&](double y2) { return i * (R(y2 * y2) * r46 / (R(1) - R(y2) * r42)); };
  auto z6 = [&](double y2) {
    using std::sqrt;
    R y = sqrt(R(y2));
    return y * y * y * r34 / (R(1) - R(y2) * r42);
  };
  t.z1a = z1(a2);
  t.z1b = z1(b2);
  t.z6a = z6(a2);
  t.z6b = z6(b2);
  const R s = R(a2 + b2);
  const R qa = t.z6a * t.z6a, qb = t.z6b * t.z6b;
  const R da = r4t - qa, db = r4t - qb;
  t.z2 = (i * (s * qa * r22) + R(2) * t.z1a * qa + i * (r2t * qa)) / da;
  t.z3 = (i * (R(2) * R(a2) * r22 * qa) + i * (r2t * qa) + R(2) * t.z1a * qa) / da;
  t.z4 = (i * (r2t * qb) + C(qb * t.z6b, R(0)) + t.z1b * qb - i * (s * r22 * qb)) / db;
  t.z5 = (R(2) * t.z1b * qb + i * (r2t * qb) + i * (s * r22 * qb)) / db;
  return t;
}

// Printed expansions with the fast-root leading coefficients attached to the
// branch whose correction terms they carry (mu_4 with a, mu_5 with b).
template <class R, class C>
std::array<C, 6> asym6_t(double a2, double b2, double theta, const R& r, bool parabolic) {
  std::array<C, 6> mu;
  const C i(R(0), R(1));
  const R r2t = rpow_t(r, 2.0 * theta);
  if (parabolic) {
    const R r22 = rpow_t(r, 2.0 - 2.0 * theta);
    Terms<R, C> z = terms_t<R, C>(a2, b2, theta, r);
    mu[0] = C(R(a2) * r22, R(0)) - i * z.z1a - i * z.z2;
    mu[1] = C(R(a2) * r22, R(0)) - i * z.z1a - i * z.z3;
    mu[2] = C(R(b2) * r22, R(0)) - i * z.z1b - i * z.z4;
    mu[3] = C(r2t - R(a2) * r22, R(0)) + i * z.z1a + i * z.z2;
    mu[4] = C(r2t - R(b2) * r22, R(0)) + i * z.z1b + i * z.z5;
    mu[5] = C(r2t - R(a2) * r22, R(0)) + i * z.z1a + i * z.z3;
  } else {
    using std::sqrt;
    const R r41 = rpow_t(r, 4.0 * theta - 1.0);
    const double ys[3] = {a2, a2, b2};
    for (int k = 0; k < 3; ++k) {
      R y = sqrt(R(ys[k]));
      R im = -r * y + r41 / (R(8) * y);
      mu[k] = C(r2t / 2, im);
      mu[k + 3] = C(r2t / 2, -im);
    }
  }
  return mu;
}

bool is_parabolic(double theta, Zone zone) {
  return (theta < 0.5) == (zone == Zone::interior);
}

void check_zone(const ModelParams& p, double r, Zone zone) {
  if (p.theta == 0.5) throw ValidationError("asymptotic expansions exclude theta = 1/2 (use jordan_spectrum)");
  if (zone == Zone::interior && !(r > 0.0 && r < p.epsilon))
    throw ValidationError("zone=int requires 0 < |xi| < epsilon");
  if (zone == Zone::exterior && !(r > 1.0 / p.epsilon)) throw ValidationError("zone=ext requires |xi| > 1/epsilon");
}

}  // namespace

Mat3 orthonormal_frame(const Vec3& eta) {
  require_unit(eta);
  Eigen::Vector3d n(eta[0], eta[1], eta[2]);
  int k = 0;
  for (int j = 1; j < 3; ++j)
    if (std::abs(n[j]) < std::abs(n[k])) k = j;
  Eigen::Vector3d h = Eigen::Vector3d::Zero();
  h[k] = 1.0;
  Eigen::Vector3d e1 = (h - h.dot(n) * n).normalized();
  Eigen::Vector3d e2 = n.cross(e1);
  Mat3 Q;
  Q.col(0) = e1;
  Q.col(1) = e2;
  Q.col(2) = n;
  return Q;
}

SymbolMatrices build_symbol(const ModelParams& p, const Vec3& eta, double xi_norm) {
  require_unit(eta);
  SymbolMatrices s;
  Eigen::Vector3d n(eta[0], eta[1], eta[2]);
  s.P_par = n * n.transpose();
  s.P_perp = Mat3::Identity() - s.P_par;
  s.A_eta = p.a2 * Mat3::Identity() + (p.b2 - p.a2) * s.P_par;
  s.B0.setZero();
  for (int k = 0; k < 3; ++k) {
    s.B0(k, k) = s.B0(k + 3, k + 3) = s.B0(k, k + 3) = s.B0(k + 3, k) = 1.0;
  }
  s.B1.setZero();
  const double sp[3] = {p.a(), p.a(), p.b()};
  for (int k = 0; k < 3; ++k) {
    s.B1(k, k) = sp[k];
    s.B1(k + 3, k + 3) = -sp[k];
  }
  const double r2t = rpow(xi_norm, 2.0 * p.theta);
  s.generator = (0.5 * I * r2t) * s.B0.cast<cplx>() + (xi_norm * s.B1).cast<cplx>();
  s.coefficient = -s.generator;
  return s;
}

ModeRoots exact_mode_roots(const ModelParams& p, double speed2, double xi_norm) {
  if (!(xi_norm >= 0.0)) throw ValidationError("xi_norm must be nonnegative");
  ModeRoots m;
  m.speed2 = speed2;
  const double S = rpow(xi_norm, 2.0 * p.theta);
  const double P = speed2 * xi_norm * xi_norm;
  cplx big, small;
  bool osc;
  double disc;
  stable_roots<double, cplx>(S, P, big, small, osc, disc);
  m.mu_plus = big;
  m.mu_minus = small;
  m.oscillatory = osc;
  m.degenerate = std::abs(disc) <= 1e-12 * std::max(S * S, 4.0 * P);
  return m;
}

std::array<cplx, 6> exact_roots6(const ModelParams& p, double xi_norm) {
  return exact6_t<double, cplx>(p.a2, p.b2, p.theta, xi_norm);
}

const char* to_string(Regime r) {
  switch (r) {
    case Regime::small_theta_lt_half: return "small-theta-lt-half";
    case Regime::small_theta_gt_half: return "small-theta-gt-half";
    case Regime::large_theta_lt_half: return "large-theta-lt-half";
    case Regime::large_theta_gt_half: return "large-theta-gt-half";
  }
  return "";
}

Zone zone_from_string(const std::string& s) {
  if (s == "int" || s == "interior") return Zone::interior;
  if (s == "ext" || s == "exterior") return Zone::exterior;
  throw ValidationError("zone must be 'int' or 'ext' (got '" + s + "')");
}

CorrectionTerms correction_terms(const ModelParams& p, double xi_norm) {
  auto t = terms_t<double, cplx>(p.a2, p.b2, p.theta, xi_norm);
  return CorrectionTerms{t.z1a, t.z1b, t.z2, t.z3, t.z4, t.z5, t.z6a, t.z6b};
}

AsymptoticEigs asymptotic_eigs(const ModelParams& p, double xi_norm, Zone zone) {
  check_zone(p, xi_norm, zone);
  AsymptoticEigs out;
  out.parabolic = is_parabolic(p.theta, zone);
  out.mu = asym6_t<double, cplx>(p.a2, p.b2, p.theta, xi_norm, out.parabolic);
  if (out.parabolic)
    out.speed2 = {p.a2, p.a2, p.b2, p.a2, p.b2, p.a2};
  else
    out.speed2 = {p.a2, p.a2, p.b2, p.a2, p.a2, p.b2};
  const bool lt = p.theta < 0.5;
  if (zone == Zone::interior) {
    out.regime = lt ? Regime::small_theta_lt_half : Regime::small_theta_gt_half;
    out.remainder_order = lt ? 7.0 - 12.0 * p.theta : 6.0 * p.theta - 2.0;
  } else {
    out.regime = lt ? Regime::large_theta_lt_half : Regime::large_theta_gt_half;
    out.remainder_order = lt ? 6.0 * p.theta - 2.0 : 7.0 - 12.0 * p.theta;
  }
  return out;
}

std::vector<double> default_order_samples(const ModelParams& p, Zone zone, std::size_t n) {
  if (zone == Zone::interior) return geomspace(p.epsilon / 200.0, p.epsilon / 2.0, n);
  return geomspace(2.0 / p.epsilon, 200.0 / p.epsilon, n);
}

OrderFit asymptotic_error_order(const ModelParams& p, Zone zone, std::optional<double> speed2,
                                const std::vector<double>& samples) {
  if (samples.size() < 3) throw ValidationError("asymptotic_error_order needs at least three samples");
  const double lo = *std::min_element(samples.begin(), samples.end());
  const double hi = *std::max_element(samples.begin(), samples.end());
  if (hi < 100.0 * lo * (1.0 - 1e-12)) throw ValidationError("samples must span at least two decades");
  const bool parabolic = is_parabolic(p.theta, zone);
  OrderFit fit;
  fit.predicted = asymptotic_eigs(p, zone == Zone::interior ? lo : hi, zone).remainder_order;
  std::vector<double> lx, ly;
  for (double r : samples) {
    check_zone(p, r, zone);
    const mreal R(r);
    auto ex = exact6_t<mreal, mcplx>(p.a2, p.b2, p.theta, R);
    auto as = asym6_t<mreal, mcplx>(p.a2, p.b2, p.theta, R, parabolic);
    const std::array<double, 6> ex_speed{p.a2, p.a2, p.b2, p.a2, p.a2, p.b2};
    const std::array<double, 6> as_speed = parabolic ? std::array<double, 6>{p.a2, p.a2, p.b2, p.a2, p.b2, p.a2}
                                                     : std::array<double, 6>{p.a2, p.a2, p.b2, p.a2, p.a2, p.b2};
    std::vector<int> ei, ai;
    for (int k = 0; k < 6; ++k) {
      if (!speed2 || ex_speed[k] == *speed2) ei.push_back(k);
      if (!speed2 || as_speed[k] == *speed2) ai.push_back(k);
    }
    if (ei.empty() || ei.size() != ai.size()) throw ValidationError("speed2 must equal a2 or b2");
    std::vector<cplx> exd(6), asd(6);
    double scale = 0.0;
    for (int k = 0; k < 6; ++k) {
      exd[k] = cplx(static_cast<double>(ex[k].real()), static_cast<double>(ex[k].imag()));
      asd[k] = cplx(static_cast<double>(as[k].real()), static_cast<double>(as[k].imag()));
      scale = std::max(scale, std::abs(exd[k]));
    }
    // Distinct roots (different branch speed or different root of one branch)
    // closer than 1e-14 make the pairing ambiguous.
    for (std::size_t x = 0; x < ei.size(); ++x)
      for (std::size_t y = x + 1; y < ei.size(); ++y) {
        int u = ei[x], v = ei[y];
        bool same_class = ex_speed[u] == ex_speed[v] && ((u < 3) == (v < 3));
        if (!same_class && std::abs(exd[u] - exd[v]) <= 1e-14 * scale)
          throw NumericalError("ambiguous root pairing: two exact roots coincide within 1e-14");
      }
    std::vector<int> perm(ai.size());
    std::iota(perm.begin(), perm.end(), 0);
    double best = INFINITY;
    std::vector<int> best_perm = perm;
    do {
      double tot = 0.0;
      for (std::size_t j = 0; j < ei.size(); ++j) {
        mcplx d = ex[ei[j]] - as[ai[perm[j]]];
        tot += static_cast<double>(abs(d));
      }
      if (tot < best) {
        best = tot;
        best_perm = perm;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    mreal worst(0);
    for (std::size_t j = 0; j < ei.size(); ++j) {
      mreal d = abs(ex[ei[j]] - as[ai[best_perm[j]]]);
      if (d > worst) worst = d;
    }
    double err = static_cast<double>(worst);
    if (!(err > 0.0)) throw NumericalError("asymptotic error vanished identically; order undefined");
    fit.xi.push_back(r);
    fit.error.push_back(err);
    lx.push_back(std::log(r));
    ly.push_back(std::log(err));
  }
  LinearFit lf = least_squares(lx, ly);
  fit.order = lf.slope;
  fit.r2 = lf.r2;
  return fit;
}

std::vector<int> jordan_block_sizes(const CMat6& M, double cluster_tol) {
  Eigen::ComplexEigenSolver<CMat6> es(M, false);
  std::vector<cplx> ev(es.eigenvalues().data(), es.eigenvalues().data() + 6);
  std::vector<bool> used(6, false);
  std::vector<int> sizes;
  const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  for (int k = 0; k < 6; ++k) {
    if (used[k]) continue;
    cplx lam = 0.0;
    int mult = 0;
    for (int j = 0; j < 6; ++j)
      if (!used[j] && std::abs(ev[j] - ev[k]) <= cluster_tol * scale) {
        used[j] = true;
        lam += ev[j];
        ++mult;
      }
    lam /= static_cast<double>(mult);
    CMat6 N = M - lam * CMat6::Identity();
    CMat6 Pk = CMat6::Identity();
    std::vector<int> rank{6};
    for (int q = 1; q <= mult; ++q) {
      Pk = Pk * N;
      Eigen::FullPivLU<CMat6> lu(Pk);
      lu.setThreshold(1e-6);
      rank.push_back(static_cast<int>(lu.rank()));
    }
    // blocks of size >= q: rank[q-1] - rank[q]
    std::vector<int> atleast(mult + 2, 0);
    for (int q = 1; q <= mult; ++q) atleast[q] = rank[q - 1] - rank[q];
    for (int q = 1; q <= mult; ++q) {
      int exactly = atleast[q] - atleast[q + 1];
      for (int c = 0; c < exactly; ++c) sizes.push_back(q);
    }
  }
  std::sort(sizes.rbegin(), sizes.rend());
  return sizes;
}

JordanSpectrum jordan_spectrum(const ModelParams& p) {
  if (p.theta != 0.5) throw ValidationError("jordan_spectrum requires theta = 1/2");
  JordanSpectrum js;
  js.params = p;
  const double tol = 1e-10;
  auto pair = [&](double y2) -> std::array<cplx, 2> {
    if (y2 < 0.25) {
      double s = 0.5 * std::sqrt(1.0 - 4.0 * y2);
      return {cplx(0.0, 0.5 + s), cplx(0.0, 0.5 - s)};
    }
    double s = 0.5 * std::sqrt(4.0 * y2 - 1.0);
    return {cplx(s, 0.5), cplx(-s, 0.5)};
  };
  const bool a_quarter = std::abs(p.a2 - 0.25) <= tol;
  const bool b_quarter = std::abs(p.b2 - 0.25) <= tol;
  if (a_quarter) {
    js.regime = "a2-quarter";
    auto lb = pair(p.b2);
    js.lambdas = {cplx(0.0, 0.5), lb[0], lb[1]};
    js.blocks = {{4, js.lambdas[0]}, {1, lb[0]}, {1, lb[1]}};
  } else if (b_quarter) {
    js.regime = "b2-quarter";
    auto la = pair(p.a2);
    js.lambdas = {la[0], la[1], cplx(0.0, 0.5)};
    js.blocks = {{2, la[0]}, {2, la[1]}, {2, cplx(0.0, 0.5)}};
  } else {
    js.regime = "generic";
    auto la = pair(p.a2);
    auto lb = pair(p.b2);
    js.lambdas = {la[0], la[1], lb[0], lb[1]};
    js.blocks = {{2, la[0]}, {2, la[1]}, {1, lb[0]}, {1, lb[1]}};
  }
  for (auto& b : js.blocks) {
    js.block_structure.push_back(b.size);
    js.polynomial_degree = std::max(js.polynomial_degree, b.size - 1);
  }
  Vec3 e1{1.0, 0.0, 0.0};
  SymbolMatrices s = build_symbol(p, e1, 1.0);
  js.true_block_structure = jordan_block_sizes(s.generator);
  return js;
}

CVec6 jordan_mode_solution(const JordanSpectrum& spec, double xi_norm, const CVec6& W0, double t) {
  CVec6 out = CVec6::Zero();
  int off = 0;
  const cplx x = I * xi_norm * t;
  for (const auto& b : spec.blocks) {
    const cplx ph = std::exp(x * b.lambda);
    for (int row = 0; row < b.size; ++row) {
      cplx acc = 0.0;
      cplx c = 1.0;
      for (int k = 0; row + k < b.size; ++k) {
        acc += c * W0[off + row + k];
        c *= x / static_cast<double>(k + 1);
      }
      out[off + row] = ph * acc;
    }
    off += b.size;
  }
  return out;
}

CVec6 theta_half_propagate(const ModelParams& p, double xi_norm, const CVec6& W0, double t) {
  // Block (k, k+3): M = (i/2) I + N with N = [[y, i/2], [i/2, -y]], N^2 = (y^2 - 1/4) I.
  CVec6 out;
  const double rt = xi_norm * t;
  const double sp[3] = {p.a(), p.a(), p.b()};
  for (int k = 0; k < 3; ++k) {
    const double y = sp[k];
    const double q = y * y - 0.25;
    cplx C, S;  // exp(i rt N) = C I + S N
    if (q > 0.0) {
      const double w = std::sqrt(q);
      C = std::cos(rt * w);
      S = (w * rt > 1e-8) ? I * std::sin(rt * w) / w : I * rt * (1.0 - q * rt * rt / 6.0);
    } else if (q < 0.0) {
      const double w = std::sqrt(-q);
      C = std::cosh(rt * w);
      S = (w * rt > 1e-8) ? I * std::sinh(rt * w) / w : I * rt * (1.0 - q * rt * rt / 6.0);
    } else {
      C = 1.0;
      S = I * rt;
    }
    const cplx ph = std::exp(-0.5 * rt);
    const cplx u = W0[k], v = W0[k + 3];
    const cplx Nu = y * u + 0.5 * I * v;
    const cplx Nv = 0.5 * I * u - y * v;
    out[k] = ph * (C * u + S * Nu);
    out[k + 3] = ph * (C * v + S * Nv);
  }
  return out;
}

GevreyFit gevrey_probe(const ModelParams& p, const std::vector<double>& xi_samples) {
  if (!(p.theta > 0.0 && p.theta < 1.0)) throw ValidationError("gevrey_probe requires theta in (0,1)");
  std::vector<double> lx, ly;
  for (double r : xi_samples) {
    if (!(r > 1.0 / p.epsilon)) throw ValidationError("gevrey_probe samples must lie in Z_ext (|xi| > 1/epsilon)");
    auto mu = exact_roots6(p, r);
    double m = INFINITY;
    for (auto& z : mu) m = std::min(m, z.real());
    lx.push_back(std::log(r));
    ly.push_back(std::log(m));
  }
  LinearFit f = least_squares(lx, ly);
  GevreyFit g;
  g.kappa_prime = f.slope;
  g.gevrey_order = 1.0 / f.slope;
  g.predicted_kappa = 1.0 / (2.0 * std::min(1.0 - p.theta, p.theta));
  g.r2 = f.r2;
  return g;
}

double validate_M_eta(const ModelParams& p, const Vec3& eta) {
  require_unit(eta);
  const double e1 = eta[0], e2 = eta[1], e3 = eta[2];
  if (std::abs(e1) < 1e-6 || std::abs(e3) < 1e-6)
    throw ValidationError("M(eta) is singular on this chart (|eta_1| or |eta_3| < 1e-6)");
  Mat3 M;
  M << -e2 / e1, -e3 / e1, e1 / e3, 1.0, 0.0, e2 / e3, 0.0, 1.0, 1.0;
  Mat3 A = build_symbol(p, eta).A_eta;
  Mat3 D = M.inverse() * A * M;
  Mat3 target = Mat3::Zero();
  target(0, 0) = p.a2;
  target(1, 1) = p.a2;
  target(2, 2) = p.b2;
  return (D - target).cwiseAbs().maxCoeff();
}

}  // namespace elastic
