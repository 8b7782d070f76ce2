#pragma once

#include <map>
#include <vector>

#include "elastic/symbol.hpp"

namespace elastic {

// (v, v_t)(t) = [[c00, c01], [c10, c11]] (v0, v1) for v_tt + d|xi|^{2theta} v_t + y^2|xi|^2 v = 0.
struct BranchFlow {
  double c00 = 1.0, c01 = 0.0, c10 = 0.0, c11 = 1.0;
};

// damping scales the |xi|^{2theta} term (1 for the model, 0 for the undamped check).
BranchFlow branch_flow(const ModelParams& p, double speed2, double xi_norm, double t, double damping = 1.0);

struct ModeState {
  Vec3 xi{0.0, 0.0, 0.0};
  CVec3 u_hat{};
  CVec3 ut_hat{};

  CVec3 longitudinal() const;  // (eta . u_hat) eta
  CVec3 transverse() const;    // u_hat - longitudinal
};

ModeState evolve_mode(const ModelParams& p, const ModeState& s, double t, double damping = 1.0);

// W = (D_t v + A^{1/2} v, D_t v - A^{1/2} v) with v = Q^T u_hat in the frame of
// orthonormal_frame(eta), A^{1/2} = |xi| diag(a, a, b) and D_t = -i d/dt.
struct MicroEnergy {
  CVec6 W;
  Vec3 xi;
};

MicroEnergy micro_energy(const ModelParams& p, const ModeState& s);
ModeState from_micro_energy(const ModelParams& p, const MicroEnergy& m);

// |u_t|^2 + a^2|xi|^2|u|^2 + (b^2 - a^2)|xi . u|^2
double energy_pha(const ModelParams& p, const ModeState& s);
// (1/2) sum_k (|v_t^k|^2 + w_k |xi|^2 |v^k|^2), w = (a^2, a^2, b^2)
double energy_mid(const ModelParams& p, const ModeState& s);

// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);

struct QuadratureGrid {
  std::vector<double> r, wr;    // radial nodes and weights (measure dr)
  std::vector<Vec3> dirs;       // unit directions
  std::vector<double> wd;       // solid-angle weights, sum 4 pi
  double R = 0.0;
};

// nr Gauss-Legendre nodes on [0, R].
QuadratureGrid uniform_grid(double R, int nr = 512, int npolar = 24, int nazimuth = 48);
// [0, r_min] plus geometric panels on [r_min, R], each with `nodes` Gauss-Legendre points.
// Resolves integrands concentrated at |xi| ~ t^{-1/k} for large t.
QuadratureGrid graded_grid(double R, double r_min, int panels = 48, int nodes = 16, int npolar = 24,
                           int nazimuth = 48);

// (2 pi)^{-3} int f(r, eta) r^2 dr d eta with a deterministic parallel reduction.
double integrate(const QuadratureGrid& g, const std::function<double(double r, const Vec3& eta)>& f);

enum class NormKind { L2, Hs, dt_L2, dt_Hs, energy };

// energy: (||u||_{H^{s+1} dot}^2 + ||u_t||_{H^s dot}^2)^{1/2}
struct NormSpec {
  NormKind kind = NormKind::L2;
  double s = 0.0;
};

const char* to_string(NormKind k);
NormKind norm_kind_from_string(const std::string& s);

// Largest Sobolev order the spec touches on u and on u_t.
double norm_order_u(const NormSpec& n);
double norm_order_ut(const NormSpec& n);

// Checks that the spectral mass of both profiles beyond g.R is below 1e-10.
void check_tail(const DataProfile& u0, const DataProfile& u1, const NormSpec& n, double R);

// Norm of the solution with data (u0, u1) at each requested time.
std::vector<double> norm_series(const ModelParams& p, const DataProfile& u0, const DataProfile& u1,
                                const std::vector<double>& times, const NormSpec& n, const QuadratureGrid& g);
double norm_quadrature(const ModelParams& p, const DataProfile& u0, const DataProfile& u1, double t,
                       const NormSpec& n, const QuadratureGrid& g);

struct LyapunovReport {
  double c0 = 0.0, c1 = 0.0, c2 = 0.0, c3 = 0.0;
  double F0 = 0.0;
  double max_violation = 0.0;   // max over samples of dF/dt + F/c3
  double sandwich_lower = 0.0;  // max of c2 E - F (<= 0 when the lower bound holds)
  double sandwich_upper = 0.0;  // max of F - c3 E
  double E0 = 0.0, ET = 0.0;
  double gronwall_bound = 0.0;  // 3 e^{-T/c3} E(0)
  bool ok = false;
};

LyapunovReport verify_lyapunov_mid(const ModelParams& p, const ModeState& s0, double T, int samples = 1000);

struct EphaDecayReport {
  double gamma = 0.0;
  double fitted_rate = 0.0;  // -d/dt log E_pha over the second half of [0, T]
  double bound = 0.0;        // (2/3)|xi|^gamma on Z_int, 2/3 otherwise
  bool interior = false;
  bool ok = false;
};

EphaDecayReport verify_epha_decay(const ModelParams& p, const ModeState& s0, double T);

// Central-difference residual of dE_pha/dt + 2|xi|^{2theta}|u_t|^2 along the
// trajectory, normalized by 2|xi|^{2theta} E_pha; returns the max over samples.
double dissipation_residual(const ModelParams& p, const ModeState& s0, double T, int samples = 100);

}  // namespace elastic
