#include "elastic/diffusion.hpp"

#include <Eigen/SVD>
#include <algorithm>

namespace elastic {

namespace {
const cplx I(0.0, 1.0);
}

CMat6 T1_matrix() {
  const double rows[6][6] = {{0, 1, 0, 0, 0, 1},  {1, 0, 0, 1, 0, 0},  {0, 0, 1, 0, 1, 0},
                             {0, -1, 0, 0, 0, 1}, {-1, 0, 0, 1, 0, 0}, {0, 0, -1, 0, 1, 0}};
  CMat6 T;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) T(i, j) = rows[i][j] / std::sqrt(2.0);
  return T;
}

CMat6 N1_matrix(const ModelParams& p, double r) {
  CMat6 M = CMat6::Zero();
  const double a = p.a(), b = p.b();
  M(0, 3) = -a;
  M(1, 5) = -a;
  M(2, 4) = -b;
  M(3, 0) = a;
  M(4, 2) = b;
  M(5, 1) = a;
  return I * rpow(r, 1.0 - 2.0 * p.theta) * M;
}

CMat6 N2_matrix(const ModelParams& p, double r) {
  CorrectionTerms z = correction_terms(p, r);
  CMat6 M = CMat6::Zero();
  M(0, 3) = z.z6a;
  M(1, 5) = z.z6a;
  M(2, 4) = z.z6b;
  M(3, 0) = -z.z6a;
  M(4, 2) = -z.z6b;
  M(5, 1) = -z.z6a;
  return (-I / rpow(r, 2.0 * p.theta)) * M;
}

CMat6 N3_matrix(const ModelParams& p, double r) {
  CMat6 M = CMat6::Zero();
  const double a = p.a(), b = p.b();
  M(0, 3) = -1.0 / a;
  M(1, 4) = -1.0 / a;
  M(2, 5) = -1.0 / b;
  M(3, 0) = 1.0 / a;
  M(4, 1) = 1.0 / a;
  M(5, 2) = 1.0 / b;
  return (I * rpow(r, 2.0 * p.theta - 1.0) / 4.0) * M;
}

std::array<cplx, 6> ReferenceSystem::mu_tilde(double r) const {
  std::array<cplx, 6> mu;
  const double r1 = rpow(r, 2.0 * sigma1), r2 = rpow(r, 2.0 * sigma2);
  for (int k = 0; k < 6; ++k) mu[k] = M1[k] * r1 + M2[k] * r2;
  return mu;
}

CMat6 ReferenceSystem::L(double r) const {
  const CMat6 Id = CMat6::Identity();
  if (params.theta < 0.5) return T1_matrix() * (Id + N1_matrix(params, r)) * (Id + N2_matrix(params, r));
  return Id + N3_matrix(params, r);
}

CMat6 ReferenceSystem::H(double r) const {
  const CMat6 Id = CMat6::Identity();
  auto guarded_inverse = [](const CMat6& A) -> CMat6 {
    Eigen::JacobiSVD<CMat6> svd(A);
    const auto& sv = svd.singularValues();
    const double cond = sv(0) / sv(5);
    if (!(cond <= 1e6)) throw NumericalError("reference multiplier is ill-conditioned (cond > 1e6)");
    return A.inverse();
  };
  if (params.theta < 0.5) {
    return guarded_inverse(Id + N2_matrix(params, r)) * guarded_inverse(Id + N1_matrix(params, r)) *
           T1_matrix().adjoint();
  }
  return guarded_inverse(Id + N3_matrix(params, r));
}

ReferenceSystem build_reference(const ModelParams& p) {
  if (p.theta == 0.5)
    throw ValidationError(
        "no diffusion reference at theta = 1/2: the e^{-|xi|t/2} factor gives no improvement for the difference");
  ReferenceSystem ref;
  ref.params = p;
  const double a2 = p.a2, b2 = p.b2;
  if (p.theta < 0.5) {
    ref.sigma1 = 1.0 - p.theta;
    ref.sigma2 = p.theta;
    ref.M1 = {a2, a2, b2, 0.0, 0.0, 0.0};
    ref.M2 = {0.0, 0.0, 0.0, 1.0, 1.0, 1.0};
  } else {
    const double a = p.a(), b = p.b();
    ref.sigma1 = 0.5;
    ref.sigma2 = p.theta;
    ref.M1 = {-I * a, -I * a, -I * b, I * a, I * a, I * b};
    ref.M2 = {0.5, 0.5, 0.5, 0.5, 0.5, 0.5};
  }
  return ref;
}

double predicted_gap(double theta) {
  if (theta == 0.0) return 0.5;
  if (theta < 0.5) return (1.0 - 2.0 * theta) / (2.0 * (1.0 - theta));
  if (theta > 0.5) return (2.0 * theta - 1.0) / (2.0 * theta);
  return 0.0;
}

std::pair<double, double> gap_window(const ModelParams& p) {
  const double t0 = 50.0 * std::pow(p.epsilon, -2.0 * p.max_rate());
  return {t0, 100.0 * t0};
}

namespace {

struct Series {
  std::vector<double> diff, sol, ref, slow, fast;
};

// Per-time integrals of chi_int^2 r^{2s} |.|^2 over the Z_int grid.
Series integrate_series(const ModelParams& p, const ReferenceSystem& ref, const DataProfile& u0,
                        const DataProfile& u1, double s, const std::vector<double>& times) {
  validate(u0);
  validate(u1);
  const double eps = p.epsilon;
  const ZonePartition zp{eps};
  const QuadratureGrid g = graded_grid(eps, 1e-12 * eps, 64, 16);
  std::vector<Mat3> frames(g.dirs.size());
  for (std::size_t j = 0; j < g.dirs.size(); ++j) frames[j] = orthonormal_frame(g.dirs[j]);
  const std::size_t nt = times.size();
  const double sp[3] = {p.a(), p.a(), p.b()};
  const double spd2[3] = {p.a2, p.a2, p.b2};
  std::vector<std::vector<double>> rd(5 * nt, std::vector<double>(g.r.size()));
  parallel_for(g.r.size(), [&](std::size_t b, std::size_t e) {
    std::vector<std::vector<double>> tmp(5 * nt, std::vector<double>(g.dirs.size()));
    std::vector<std::array<BranchFlow, 3>> flows(nt);
    std::vector<std::array<cplx, 6>> decay(nt);
    for (std::size_t i = b; i < e; ++i) {
      const double r = g.r[i];
      const double chi = zp.chi_int(r);
      const double w = chi * chi * rpow(r, 2.0 * s);
      const CMat6 L = ref.L(r), H = ref.H(r);
      const auto mu = ref.mu_tilde(r);
      for (std::size_t k = 0; k < nt; ++k) {
        for (int c = 0; c < 3; ++c) flows[k][c] = branch_flow(p, spd2[c], r, times[k]);
        for (int l = 0; l < 6; ++l) decay[k][l] = std::exp(-mu[l] * times[k]);
      }
      for (std::size_t j = 0; j < g.dirs.size(); ++j) {
        const Vec3& eta = g.dirs[j];
        const Vec3 xi{r * eta[0], r * eta[1], r * eta[2]};
        const double g0 = profile_scalar_fourier(u0, xi), g1 = profile_scalar_fourier(u1, xi);
        const Mat3& Q = frames[j];
        double v0[3], v1[3];
        for (int c = 0; c < 3; ++c) {
          Vec3 q{Q(0, c), Q(1, c), Q(2, c)};
          v0[c] = g0 * dot(q, u0.direction);
          v1[c] = g1 * dot(q, u1.direction);
        }
        CVec6 W0;
        for (int c = 0; c < 3; ++c) {
          W0[c] = -I * v1[c] + sp[c] * r * v0[c];
          W0[c + 3] = -I * v1[c] - sp[c] * r * v0[c];
        }
        const CVec6 HW0 = H * W0;
        for (std::size_t k = 0; k < nt; ++k) {
          CVec6 W, Wt;
          for (int c = 0; c < 3; ++c) {
            const BranchFlow& f = flows[k][c];
            const double v = f.c00 * v0[c] + f.c01 * v1[c];
            const double vt = f.c10 * v0[c] + f.c11 * v1[c];
            W[c] = -I * vt + sp[c] * r * v;
            W[c + 3] = -I * vt - sp[c] * r * v;
          }
          for (int l = 0; l < 6; ++l) Wt[l] = decay[k][l] * HW0[l];
          const CVec6 LWt = L * Wt;
          const double wd = g.wd[j] * w;
          tmp[5 * k + 0][j] = wd * (W - LWt).squaredNorm();
          tmp[5 * k + 1][j] = wd * W.squaredNorm();
          tmp[5 * k + 2][j] = wd * LWt.squaredNorm();
          tmp[5 * k + 3][j] = wd * Wt.head<3>().squaredNorm();
          tmp[5 * k + 4][j] = wd * Wt.tail<3>().squaredNorm();
        }
      }
      for (std::size_t q = 0; q < 5 * nt; ++q) rd[q][i] = g.wr[i] * r * r * pairwise_sum(tmp[q]);
    }
  });
  Series out;
  const double c = std::pow(2.0 * kPi, -3.0);
  for (std::size_t k = 0; k < nt; ++k) {
    auto val = [&](int q) {
      const double v = pairwise_sum(rd[5 * k + q]) * c;
      if (!std::isfinite(v)) throw NumericalError("non-finite diffusion norm at t=" + std::to_string(times[k]));
      return std::sqrt(std::max(0.0, v));
    };
    out.diff.push_back(val(0));
    out.sol.push_back(val(1));
    out.ref.push_back(val(2));
    out.slow.push_back(val(3));
    out.fast.push_back(val(4));
  }
  return out;
}

}  // namespace

GapMeasurement gap_decay(const ModelParams& p, const ReferenceSystem& ref, const DataProfile& u0,
                         const DataProfile& u1, double s, double m, double t_min, double t_max, int samples) {
  if (!(s >= 0.0)) throw ValidationError("s must be nonnegative");
  if (!(m >= 1.0 && m <= 2.0)) throw ValidationError("m must lie in [1,2]");
  if (!(t_min > 0.0) || !(t_max >= 10.0 * t_min)) throw ValidationError("fit window needs t_max >= 10 t_min > 0");
  if (samples < 20) throw ValidationError("fit needs at least 20 samples");
  const std::vector<double> t = geomspace(t_min, t_max, samples);
  Series se = integrate_series(p, ref, u0, u1, s, t);
  GapMeasurement g;
  g.s = s;
  g.m = m;
  g.difference = fit_power_law(t, se.diff);
  g.solution = fit_power_law(t, se.sol);
  g.reference_norm = se.ref;
  g.predicted_gap = predicted_gap(p.theta);
  g.predicted_solution_slope = -(3.0 * (2.0 - m) + 2.0 * m * s) / (4.0 * m * p.max_rate());
  g.measured_gap = g.solution.slope - g.difference.slope;
  return g;
}

double initial_mismatch(const ModelParams& p, const ReferenceSystem& ref, const DataProfile& u0,
                        const DataProfile& u1) {
  Series se = integrate_series(p, ref, u0, u1, 0.0, {0.0});
  return se.sol[0] > 0.0 ? se.diff[0] / se.sol[0] : 0.0;
}

DoubleDiffusion double_diffusion_split(const ModelParams& p, const DataProfile& u0, const DataProfile& u1,
                                       double t_min, double t_max, int samples) {
  if (!(p.theta > 0.0 && p.theta < 0.5)) throw ValidationError("double diffusion needs theta in (0,1/2)");
  if (u0.zero && u1.zero) throw ValidationError("zero data: both block norms vanish, fits rejected");
  const ReferenceSystem ref = build_reference(p);
  const std::vector<double> t = geomspace(t_min, t_max, samples);
  Series se = integrate_series(p, ref, u0, u1, 0.0, t);
  DoubleDiffusion d;
  d.slow_block = fit_power_law(t, se.slow);
  d.fast_block = fit_power_law(t, se.fast);
  d.predicted_slow = -0.75 * 2.0 / (2.0 - 2.0 * p.theta);
  d.predicted_fast = -0.75 * 2.0 / (2.0 * p.theta);
  return d;
}

}  // namespace elastic
