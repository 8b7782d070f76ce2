#pragma once

#include "elastic/decay_lab.hpp"

#include <utility>

namespace elastic {

// U_t + M1 (-Delta)^{sigma1} U + M2 (-Delta)^{sigma2} U = 0 in the micro-energy
// frame, approximating W = L W~ with W~(t) = diag(e^{-mu~ t}) H W0 on Z_int.
struct ReferenceSystem {
  ModelParams params;
  double sigma1 = 1.0, sigma2 = 0.0;
  std::array<cplx, 6> M1{}, M2{};

  std::array<cplx, 6> mu_tilde(double r) const;
  CMat6 L(double r) const;
  CMat6 H(double r) const;  // L^{-1}, rejected when cond(L) > 1e6
};

CMat6 T1_matrix();
CMat6 N1_matrix(const ModelParams& p, double r);
CMat6 N2_matrix(const ModelParams& p, double r);
CMat6 N3_matrix(const ModelParams& p, double r);

ReferenceSystem build_reference(const ModelParams& p);

double predicted_gap(double theta);

// Fit window [50 eps^{-2 max}, 100x that]: the frequencies that dominate the norm sit well inside Z_int.
std::pair<double, double> gap_window(const ModelParams& p);

struct GapMeasurement {
  double s = 0.0, m = 1.0;
  SlopeFit difference;        // ||chi_int (W - L W~)||_{H^s dot}
  SlopeFit solution;          // ||chi_int W||_{H^s dot}
  double predicted_gap = 0.0;
  double predicted_solution_slope = 0.0;
  double measured_gap = 0.0;  // solution slope - difference slope
  std::vector<double> reference_norm;  // ||chi_int L W~||
};

// Times are log-spaced on [t_min, t_max].
GapMeasurement gap_decay(const ModelParams& p, const ReferenceSystem& ref, const DataProfile& u0,
                         const DataProfile& u1, double s, double m, double t_min = 1e2, double t_max = 1e4,
                         int samples = 20);

// ||chi_int (W - L H W0)|| at t = 0 relative to ||chi_int W0||.
double initial_mismatch(const ModelParams& p, const ReferenceSystem& ref, const DataProfile& u0,
                        const DataProfile& u1);

struct DoubleDiffusion {
  SlopeFit slow_block;  // W~_{1..3}, heat flow of order 2 - 2 theta
  SlopeFit fast_block;  // W~_{4..6}, heat flow of order 2 theta
  double predicted_slow = 0.0, predicted_fast = 0.0;
};

DoubleDiffusion double_diffusion_split(const ModelParams& p, const DataProfile& u0, const DataProfile& u1,
                                       double t_min = 1e2, double t_max = 1e4, int samples = 20);

}  // namespace elastic
