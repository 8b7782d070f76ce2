#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "elastic/exponents.hpp"
#include "elastic/decay_lab.hpp"
#include "json.hpp"

namespace elastic {

// Box Fourier coefficients c(xi) = integral over the box of u e^{-i xi.x}, stored in the
// real-to-complex half layout [i][j][k], k < N/2 + 1, for the three components of U and U_t.
struct SpectralField {
  int N = 0;
  double L = 0.0;
  double t = 0.0;
  bool hermitian = true;
  std::array<std::vector<cplx>, 3> u, ut;

  std::size_t modes() const { return static_cast<std::size_t>(N) * N * (N / 2 + 1); }
};

struct RunConfig {
  ExponentTriple triple{{2.5, 2.5, 2.5}};
  ModelParams params;
  double m = 1.0;
  double s = 0.0;
  double delta = 1e-3;
  int N = 64;
  double L = 32.0 * kPi;
  double dt = 0.01;
  double T = 100.0;
  double t_ref = 1.0;             // verdict reference time
  double eps1 = 1e-3;
  std::optional<ExponentRegime> regime;   // when set, g comes from classify_and_g
  std::array<double, 3> g{};      // used when no regime is set
  DataProfile u0;
  DataProfile u1;
  bool nonlinear = true;
  int record_every = 10;
};

void validate(const RunConfig& c);
// Default data: u0 a width-2 Gaussian along (1,1,1)/sqrt 3, u1 = 0.
RunConfig default_run_config();

enum class MonitorKind { L2, grad, dt_L2, Hs_grad, Hs_dt };
std::string to_string(MonitorKind k);

struct MonitorEntry {
  MonitorKind kind = MonitorKind::L2;
  double weight = 0.0;  // (1+t)^weight multiplies the norm
};
// Per-component weights of the X(T) norm; row k lists the entries of U^(k).
std::array<std::vector<MonitorEntry>, 3> monitor_weights(double m, double s, double theta,
                                                         const std::array<double, 3>& g);

// Time until waves leaving the data support (3 widths) at speed b reach the half box.
double trust_horizon(const RunConfig& c);

// Profiles with amplitudes scaled so that the box L2 norm of each datum equals delta.
std::pair<DataProfile, DataProfile> scaled_profiles(const RunConfig& c);
SpectralField initial_field(const RunConfig& c);

// Box norms of one component, from coefficients.
double box_norm(const SpectralField& f, int component, MonitorKind kind, double s = 0.0);
double hermitian_defect(const SpectralField& f);
double masked_energy(const SpectralField& f);

class BoxSolver {
 public:
  explicit BoxSolver(const RunConfig& c);
  ~BoxSolver();
  BoxSolver(const BoxSolver&) = delete;
  BoxSolver& operator=(const BoxSolver&) = delete;

  const RunConfig& config() const { return cfg_; }
  // Dealiased nonlinearity (|U3|^p1, |U1|^p2, |U2|^p3) without its zero mode.
  std::array<std::vector<cplx>, 3> nonlinearity(const std::array<std::vector<cplx>, 3>& u);
  // Exact linear flow over dt applied in place; forcing is added to the u_t channel first.
  void propagate(std::array<std::vector<cplx>, 3>& u, std::array<std::vector<cplx>, 3>& ut, double dt);
  // One interaction-picture trapezoid step; F_n is taken from (or stored into) the cache.
  void step(SpectralField& f, double dt);
  void invalidate_cache() { cache_valid_ = false; }
  void apply_mask(std::vector<cplx>& c) const;

 private:
  struct Impl;
  RunConfig cfg_;
  std::unique_ptr<Impl> impl_;
  std::array<std::vector<cplx>, 3> F_cache_;
  bool cache_valid_ = false;
};

SpectralField step(const RunConfig& c, const SpectralField& f, double dt);

struct TraceRow {
  double t = 0.0;
  std::array<std::vector<double>, 3> raw, weighted;
};

struct RunResult {
  std::array<std::vector<MonitorEntry>, 3> weights;
  std::array<double, 3> g{};
  std::string exponent_case;  // classification when a regime was given
  std::vector<TraceRow> rows;
  // Per component and entry: weighted value at t_ref and sup over [t_ref, T] (every step).
  std::array<std::vector<double>, 3> ref_value, sup_value;
  bool bounded = true;
  std::string verdict;
  double trust_horizon = 0.0;
  double max_hermitian_defect = 0.0;
  double max_masked_energy = 0.0;
  SpectralField final_state;
};

RunResult run(const RunConfig& c, const SpectralField* initial = nullptr);

struct PicardResult {
  std::vector<double> d;       // d_n = ||U^(n) - U^(n-1)||_{X(T)}, n = 1..iterations
  std::vector<double> ratios;  // d_{n+1}/d_n for n >= 2 above the noise floor
  double ratio = 0.0;          // geometric mean of ratios
  bool contraction = false;
  bool diverged = false;
  bool noise_floor_reached = false;
  std::string verdict;
};
PicardResult picard_probe(const RunConfig& c, int iterations = 5, double T = 10.0,
                          const SpectralField* initial = nullptr);

void save_checkpoint(const std::string& prefix, const SpectralField& f, const RunConfig& c);
SpectralField load_checkpoint(const std::string& prefix);

nlohmann::json to_json(const RunResult& r);
nlohmann::json to_json(const PicardResult& r);

}  // namespace elastic
