#pragma once

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <string>
#include <vector>

#include "elastic/model.hpp"

namespace elastic {

using Mat3 = Eigen::Matrix3d;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using CMat6 = Eigen::Matrix<cplx, 6, 6>;
using CVec6 = Eigen::Matrix<cplx, 6, 1>;

struct SymbolMatrices {
  Mat3 A_eta;
  Mat3 P_par;   // eta eta^T, eigenvalue b2
  Mat3 P_perp;  // I - eta eta^T, eigenvalue a2
  Mat6 B0;
  Mat6 B1;
  // -(i/2)|xi|^{2theta} B0 - |xi| B1: the system reads D_t W + coefficient W = 0.
  CMat6 coefficient;
  // (i/2)|xi|^{2theta} B0 + |xi| B1: D_t W = generator W, eigenvalues i*mu.
  CMat6 generator;
};

SymbolMatrices build_symbol(const ModelParams& p, const Vec3& eta, double xi_norm = 1.0);

// Columns (e1, e2, eta): e1, e2 span the transverse plane.
Mat3 orthonormal_frame(const Vec3& eta);

struct ModeRoots {
  double speed2 = 0.0;
  cplx mu_plus;   // larger real part, or positive imaginary part in the oscillatory case
  cplx mu_minus;
  bool degenerate = false;
  bool oscillatory = false;
};

ModeRoots exact_mode_roots(const ModelParams& p, double speed2, double xi_norm);

// All six exact roots in (a, a, b | a, a, b) order: small/-i roots first.
std::array<cplx, 6> exact_roots6(const ModelParams& p, double xi_norm);

enum class Zone { interior, exterior };
enum class Regime { small_theta_lt_half, small_theta_gt_half, large_theta_lt_half, large_theta_gt_half };

const char* to_string(Regime r);
Zone zone_from_string(const std::string& s);

struct AsymptoticEigs {
  std::array<cplx, 6> mu;
  std::array<double, 6> speed2;  // branch carried by each entry
  double remainder_order = 0.0;
  Regime regime = Regime::small_theta_lt_half;
  bool parabolic = true;
};

AsymptoticEigs asymptotic_eigs(const ModelParams& p, double xi_norm, Zone zone);

// Correction terms z1..z6 at |xi| (z1, z6 for the given speed; z2..z5 mix both).
struct CorrectionTerms {
  cplx z1a, z1b, z2, z3, z4, z5;
  double z6a = 0.0, z6b = 0.0;
};
CorrectionTerms correction_terms(const ModelParams& p, double xi_norm);

struct OrderFit {
  double order = 0.0;
  double r2 = 0.0;
  std::vector<double> xi;
  std::vector<double> error;
  double predicted = 0.0;
};

// Fits log|mu_asym - mu_exact| against log|xi| with both sides evaluated in
// 50-digit arithmetic. speed2 restricts the comparison to one branch.
OrderFit asymptotic_error_order(const ModelParams& p, Zone zone, std::optional<double> speed2,
                                const std::vector<double>& samples);

// Samples spanning two decades inside a zone, away from its boundary.
std::vector<double> default_order_samples(const ModelParams& p, Zone zone, std::size_t n = 17);

struct JordanBlock {
  int size = 1;
  cplx lambda;
};

struct JordanSpectrum {
  ModelParams params;
  std::vector<cplx> lambdas;             // distinct eigenvalues as listed in the theorem
  std::vector<JordanBlock> blocks;       // block structure as printed
  std::vector<int> block_structure;      // sizes of the printed blocks
  int polynomial_degree = 0;             // max power of t in the printed representation
  std::vector<int> true_block_structure; // sizes computed from ranks of (M - lambda)^k
  std::string regime;                    // generic, b2-quarter, a2-quarter
};

JordanSpectrum jordan_spectrum(const ModelParams& p);

// e^{i|xi| J t} W0 for the printed J (the listed closed-form representation).
CVec6 jordan_mode_solution(const JordanSpectrum& spec, double xi_norm, const CVec6& W0, double t);

// Exact flow of D_t W = |xi|((i/2)B0 + B1) W in the original micro-energy frame.
CVec6 theta_half_propagate(const ModelParams& p, double xi_norm, const CVec6& W0, double t);

// Jordan block sizes of a complex matrix computed from rank sequences.
std::vector<int> jordan_block_sizes(const CMat6& M, double cluster_tol = 1e-7);

struct GevreyFit {
  double kappa_prime = 0.0;
  double gevrey_order = 0.0;
  double predicted_kappa = 0.0;
  double r2 = 0.0;
};

GevreyFit gevrey_probe(const ModelParams& p, const std::vector<double>& xi_samples);

double validate_M_eta(const ModelParams& p, const Vec3& eta);

}  // namespace elastic
