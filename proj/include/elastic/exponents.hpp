#pragma once

#include <array>
#include <string>
#include <vector>

#include "elastic/common.hpp"
#include "json.hpp"

namespace elastic {

// Nonlinearity F(U) = (|U3|^p1, |U1|^p2, |U2|^p3). Indices k are 1-based and cyclic:
// p_{k+1}, p_{k+2} wrap around.
struct ExponentTriple {
  std::array<double, 3> p{};
  double at(int k) const;  // p_k for any integer k, taken mod 3
};
ExponentTriple make_triple(double p1, double p2, double p3);

enum class ExponentRegime { cri, bal_3_2_s, bal_m_0 };
enum class ExistenceCase { i, ii, iii, inadmissible };
std::string to_string(ExponentRegime r);
std::string to_string(ExistenceCase c);
ExponentRegime exponent_regime_from_string(const std::string& s);

double critical_exponent(double m, double theta);
double balanced_exponent(double m, double s, double theta);

double alpha(int k, const ExponentTriple& t, double m, double theta);
double alpha_tilde(int k, const ExponentTriple& t, double m, double theta);
double alpha_bal(int k, const ExponentTriple& t, double m, double s, double theta);
double alpha_tilde_bal(int k, const ExponentTriple& t, double m, double s, double theta);

// Loss-of-decay formulas of each regime: g_{k1}(p_{k1}) and g_{k2}(p_{k1}, p_{k2}).
double loss_first(ExponentRegime r, double p1, double m, double s, double theta);
double loss_second(ExponentRegime r, double p1, double p2, double m, double s, double theta);

struct Window {
  double lo = 1.0, hi = 3.0;
  bool lo_open = false, hi_open = false;
  bool contains(double p) const;
  std::string describe() const;
};

struct GnReport {
  Window window;
  std::array<bool, 3> inside{};
  std::string rule;
  bool all_inside() const { return inside[0] && inside[1] && inside[2]; }
};
GnReport gn_admissible(const ExponentTriple& t, double m, double s);

struct Check {
  std::string name;
  bool pass = true;
  std::string detail;
};

struct ExponentReport {
  ExponentRegime regime = ExponentRegime::cri;
  double m = 1.0, s = 0.0, theta = 0.5;
  ExponentTriple triple;
  double threshold = 0.0;  // p_c or p_bal
  double p_c = 0.0;        // NaN outside the cri regime
  std::array<double, 3> alpha{}, alpha_tilde{};
  ExistenceCase ecase = ExistenceCase::i;
  std::array<int, 3> rotation{1, 2, 3};  // (k1, k2, k3)
  std::array<double, 3> g{};
  GnReport windows;
  std::vector<Check> checks;
  std::string status;
};

ExponentReport classify_and_g(const ExponentTriple& t, double m, double s, double theta, ExponentRegime regime,
                              double eps1 = 1e-3);
nlohmann::json to_json(const ExponentReport& r);

struct GnParameters {
  double q1 = 0, q2 = 0, r1 = 0, r2 = 0, r3 = 0, r4 = 0, r5 = 0, r6 = 0;
  std::vector<Check> checks;
  bool ok = true;
  std::string failure;  // first failed beta range
};
GnParameters pick_gn_parameters(double p, double s);

}  // namespace elastic
