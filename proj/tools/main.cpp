#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "elastic/diffusion.hpp"
#include "elastic/exponents.hpp"
#include "elastic/semilinear.hpp"

using nlohmann::json;
using namespace elastic;
namespace fs = std::filesystem;

namespace {

class CheckFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

const char* kCommands[] = {"symbol-check", "gevrey", "lyapunov", "decay-fit",
                           "diffusion-gap", "exponents", "simulate", "picard"};

json profile_json(const DataProfile& p) {
  return {{"kind", to_string(p.kind)},
          {"amplitude", p.amplitude},
          {"width", p.width},
          {"center_frequency", p.center_frequency},
          {"direction", p.direction},
          {"riesz_order", p.riesz_order},
          {"zero", p.zero}};
}

json default_config() {
  const RunConfig rc = default_run_config();
  json c;
  c["model"] = {{"a2", 1.0}, {"b2", 4.0}, {"theta", 0.5}, {"epsilon", nullptr}};
  c["profile"] = {{"u0", profile_json(rc.u0)}, {"u1", profile_json(rc.u1)}};
  c["experiment"] = {
      {"symbol_check", {{"samples", 17}, {"identity_samples", 1000}}},
      {"gevrey", {{"xi_min", 1e2}, {"xi_max", 1e4}, {"samples", 15}}},
      {"lyapunov", {{"modes", 100}, {"T", 50.0}, {"samples", 200}}},
      {"decay_fit",
       {{"theorem", "additional-decay-D2m"},
        {"quantity", "energy"},
        {"m", 1.0},
        {"s", 0.0},
        {"data", "concentrated"},
        {"t_min", 1e2},
        {"t_max", 1e4},
        {"samples", 20},
        {"tolerance", 0.05}}},
      {"diffusion_gap",
       {{"m", 1.0}, {"s", 0.0}, {"data", "concentrated"}, {"t_min", nullptr}, {"t_max", nullptr}, {"samples", 20}}},
      {"exponents", {{"p", {2.5, 2.5, 2.5}}, {"m", 1.0}, {"s", 0.0}, {"regime", "cri"}, {"eps1", 1e-3}}},
      {"simulate",
       {{"N", rc.N},
        {"L", rc.L},
        {"dt", rc.dt},
        {"T", rc.T},
        {"t_ref", rc.t_ref},
        {"delta", rc.delta},
        {"record_every", rc.record_every},
        {"nonlinear", rc.nonlinear},
        {"checkpoint", ""},
        {"restart", ""}}},
      {"picard", {{"iterations", 5}, {"T", 10.0}, {"max_ratio", 0.5}}}};
  return c;
}

// Recursively overlays user values on the defaults; keys absent from the defaults are rejected.
void overlay(json& base, const json& user, const std::string& path) {
  if (!user.is_object()) throw ValidationError("config field " + (path.empty() ? "<root>" : path) + ": expected an object");
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string key = path.empty() ? it.key() : path + "." + it.key();
    if (!base.contains(it.key())) throw ValidationError("config field " + key + ": unknown key");
    json& slot = base[it.key()];
    if (slot.is_object() && it.value().is_object())
      overlay(slot, it.value(), key);
    else if (slot.is_object())
      throw ValidationError("config field " + key + ": expected an object");
    else
      slot = it.value();
  }
}

const json& field(const json& j, const std::string& path) {
  const json* cur = &j;
  std::stringstream ss(path);
  std::string part;
  while (std::getline(ss, part, '.')) cur = cur->is_array() ? &cur->at(std::stoul(part)) : &cur->at(part);
  return *cur;
}

double num(const json& j, const std::string& path) {
  const json& v = field(j, path);
  if (!v.is_number()) throw ValidationError("config field " + path + ": expected a number");
  return v.get<double>();
}

std::optional<double> opt_num(const json& j, const std::string& path) {
  const json& v = field(j, path);
  if (v.is_null()) return std::nullopt;
  return num(j, path);
}

int integer(const json& j, const std::string& path) {
  const json& v = field(j, path);
  if (!v.is_number_integer()) throw ValidationError("config field " + path + ": expected an integer");
  return v.get<int>();
}

bool boolean(const json& j, const std::string& path) {
  const json& v = field(j, path);
  if (!v.is_boolean()) throw ValidationError("config field " + path + ": expected true or false");
  return v.get<bool>();
}

std::string text(const json& j, const std::string& path) {
  const json& v = field(j, path);
  if (!v.is_string()) throw ValidationError("config field " + path + ": expected a string");
  return v.get<std::string>();
}

template <class F>
auto with_field(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    if (msg.rfind("config field", 0) == 0) throw;
    throw ValidationError("config field " + path + ": " + msg);
  }
}

ModelParams model_from(const json& c) {
  const double a2 = num(c, "model.a2"), b2 = num(c, "model.b2"), th = num(c, "model.theta");
  const auto eps = opt_num(c, "model.epsilon");
  return with_field("model", [&] { return eps ? make_params(a2, b2, th, *eps) : make_params(a2, b2, th); });
}

DataProfile profile_from(const json& c, const std::string& path) {
  DataProfile p;
  p.kind = with_field(path + ".kind", [&] { return profile_kind_from_string(text(c, path + ".kind")); });
  p.amplitude = num(c, path + ".amplitude");
  p.width = num(c, path + ".width");
  p.center_frequency = num(c, path + ".center_frequency");
  const json& d = field(c, path + ".direction");
  if (!d.is_array() || d.size() != 3) throw ValidationError("config field " + path + ".direction: expected 3 numbers");
  for (int k = 0; k < 3; ++k) p.direction[k] = num(c, path + ".direction." + std::to_string(k));
  p.riesz_order = num(c, path + ".riesz_order");
  p.zero = boolean(c, path + ".zero");
  with_field(path, [&] {
    validate(p);
    return 0;
  });
  return p;
}

std::pair<DataProfile, DataProfile> data_from(const json& c, const std::string& section, double m) {
  const std::string kind = text(c, section + ".data");
  if (kind == "concentrated") return with_field(section + ".m", [&] { return concentrated_profiles(m); });
  if (kind == "profile") return {profile_from(c, "profile.u0"), profile_from(c, "profile.u1")};
  throw ValidationError("config field " + section + ".data: expected \"concentrated\" or \"profile\"");
}

ExponentTriple triple_from(const json& c) {
  const json& p = field(c, "experiment.exponents.p");
  if (!p.is_array() || p.size() != 3) throw ValidationError("config field experiment.exponents.p: expected 3 numbers");
  std::array<double, 3> v;
  for (int k = 0; k < 3; ++k) v[k] = num(c, "experiment.exponents.p." + std::to_string(k));
  return with_field("experiment.exponents.p", [&] { return make_triple(v[0], v[1], v[2]); });
}

RunConfig run_config_from(const json& c) {
  RunConfig r = default_run_config();
  r.params = model_from(c);
  r.triple = triple_from(c);
  r.m = num(c, "experiment.exponents.m");
  r.s = num(c, "experiment.exponents.s");
  r.eps1 = num(c, "experiment.exponents.eps1");
  r.regime = with_field("experiment.exponents.regime",
                        [&] { return exponent_regime_from_string(text(c, "experiment.exponents.regime")); });
  const std::string sim = "experiment.simulate.";
  r.N = integer(c, sim + "N");
  r.L = num(c, sim + "L");
  r.dt = num(c, sim + "dt");
  r.T = num(c, sim + "T");
  r.t_ref = num(c, sim + "t_ref");
  r.delta = num(c, sim + "delta");
  r.record_every = integer(c, sim + "record_every");
  r.nonlinear = boolean(c, sim + "nonlinear");
  r.u0 = profile_from(c, "profile.u0");
  r.u1 = profile_from(c, "profile.u1");
  with_field("experiment.simulate", [&] {
    validate(r);
    return 0;
  });
  return r;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class Csv {
 public:
  Csv(const fs::path& path, const std::string& command, const std::string& hash, const std::vector<std::string>& cols)
      : out_(path) {
    if (!out_) throw ValidationError("cannot write " + path.string());
    out_ << "# elastic-lab " << kVersion << " command=" << command << " config_hash=fnv1a64:" << hash << "\n";
    for (std::size_t i = 0; i < cols.size(); ++i) out_ << (i ? "," : "") << cols[i];
    out_ << "\n";
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << "\n";
  }
  void row(const std::vector<double>& cells) {
    std::vector<std::string> s;
    for (double v : cells) s.push_back(fmt(v));
    row(s);
  }

 private:
  std::ofstream out_;
};

struct Context {
  std::string command;
  json config;
  fs::path out;
  std::string hash;
  bool check = false;
  std::uint64_t seed = 1;

  Csv csv(const std::vector<std::string>& cols) const { return Csv(out / (command + ".csv"), command, hash, cols); }
  void report(json j, bool pass) const {
    j["command"] = command;
    j["config_hash"] = "fnv1a64:" + hash;
    j["version"] = kVersion;
    j["check"] = {{"requested", check}, {"pass", pass}};
    std::ofstream(out / (command + ".json")) << j.dump(2) << "\n";
    std::cout << j.dump(2) << "\n";
    if (check && !pass) throw CheckFailure(command + " acceptance check failed");
  }
};

ModeState random_mode(std::mt19937_64& rng, double r) {
  std::normal_distribution<double> n;
  Vec3 e{n(rng), n(rng), n(rng)};
  const double l = norm(e);
  ModeState s;
  s.xi = {r * e[0] / l, r * e[1] / l, r * e[2] / l};
  for (int k = 0; k < 3; ++k) {
    s.u_hat[k] = cplx(n(rng), n(rng));
    s.ut_hat[k] = cplx(n(rng), n(rng));
  }
  return s;
}

void cmd_symbol_check(const Context& ctx) {
  const ModelParams p = model_from(ctx.config);
  const int n = integer(ctx.config, "experiment.symbol_check.samples");
  const int ni = integer(ctx.config, "experiment.symbol_check.identity_samples");
  if (n < 3) throw ValidationError("config field experiment.symbol_check.samples: need at least 3");
  Csv csv = ctx.csv({"zone", "xi", "error"});
  json zones = json::array();
  bool pass = true;
  if (p.theta != 0.5) {
    for (Zone z : {Zone::interior, Zone::exterior}) {
      const OrderFit f = asymptotic_error_order(p, z, std::nullopt, default_order_samples(p, z, n));
      const bool inner = z == Zone::interior;
      for (std::size_t i = 0; i < f.xi.size(); ++i)
        csv.row(std::vector<std::string>{inner ? "interior" : "exterior", fmt(f.xi[i]), fmt(f.error[i])});
      const bool ok = inner ? f.order >= f.predicted - 0.3 : f.order <= f.predicted + 0.3;
      pass = pass && ok;
      zones.push_back({{"zone", inner ? "interior" : "exterior"},
                       {"fitted_order", f.order},
                       {"predicted_order", f.predicted},
                       {"r2", f.r2},
                       {"pass", ok}});
    }
  }
  std::mt19937_64 rng(ctx.seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double trace_res = 0.0, prod_res = 0.0;
  for (int k = 0; k < ni; ++k) {
    const double r = std::pow(10.0, -3.0 + 6.0 * u(rng));
    double sre = 0.0;
    for (const cplx& z : exact_roots6(p, r)) sre += z.real();
    const double tr = 3.0 * std::pow(r, 2.0 * p.theta);
    trace_res = std::max(trace_res, std::abs(sre - tr) / tr);
    for (double y2 : {p.a2, p.b2}) {
      const ModeRoots m = exact_mode_roots(p, y2, r);
      prod_res = std::max(prod_res, std::abs(m.mu_plus * m.mu_minus - y2 * r * r) / (y2 * r * r));
    }
  }
  pass = pass && trace_res <= 1e-12 && prod_res <= 1e-12;
  ctx.report({{"theta", p.theta},
              {"asymptotic_orders", zones},
              {"trace_identity_max_rel", trace_res},
              {"product_identity_max_rel", prod_res},
              {"identity_samples", ni}},
             pass);
}

void cmd_gevrey(const Context& ctx) {
  const ModelParams p = model_from(ctx.config);
  const auto xs = geomspace(num(ctx.config, "experiment.gevrey.xi_min"), num(ctx.config, "experiment.gevrey.xi_max"),
                            integer(ctx.config, "experiment.gevrey.samples"));
  const GevreyFit g = with_field("experiment.gevrey", [&] { return gevrey_probe(p, xs); });
  Csv csv = ctx.csv({"kappa_prime", "gevrey_order", "predicted_kappa", "r2"});
  csv.row(std::vector<double>{g.kappa_prime, g.gevrey_order, g.predicted_kappa, g.r2});
  const bool pass = std::abs(g.gevrey_order - g.predicted_kappa) <= 0.05 * g.predicted_kappa;
  ctx.report({{"kappa_prime", g.kappa_prime},
              {"gevrey_order", g.gevrey_order},
              {"predicted_kappa", g.predicted_kappa},
              {"r2", g.r2}},
             pass);
}

void cmd_lyapunov(const Context& ctx) {
  const ModelParams p = model_from(ctx.config);
  const int modes = integer(ctx.config, "experiment.lyapunov.modes");
  const double T = num(ctx.config, "experiment.lyapunov.T");
  const int samples = integer(ctx.config, "experiment.lyapunov.samples");
  if (modes < 1) throw ValidationError("config field experiment.lyapunov.modes: must be positive");
  std::mt19937_64 rng(ctx.seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Csv csv = ctx.csv({"mode", "xi_norm", "c3", "F0", "max_violation", "E0", "ET", "gronwall_bound", "ok"});
  bool pass = true;
  double worst = 0.0;
  for (int k = 0; k < modes; ++k) {
    const double r = p.epsilon * std::pow(1.0 / (p.epsilon * p.epsilon), u(rng));
    const ModeState s = random_mode(rng, r);
    const LyapunovReport rep = verify_lyapunov_mid(p, s, T, samples);
    const bool ok = rep.ok && rep.max_violation <= 1e-6 * rep.F0 && rep.ET <= rep.gronwall_bound;
    pass = pass && ok;
    worst = std::max(worst, rep.F0 > 0.0 ? rep.max_violation / rep.F0 : 0.0);
    csv.row(std::vector<double>{double(k), r, rep.c3, rep.F0, rep.max_violation, rep.E0, rep.ET, rep.gronwall_bound,
                                ok ? 1.0 : 0.0});
  }
  ctx.report({{"modes", modes}, {"T", T}, {"max_relative_violation", worst}, {"all_ok", pass}}, pass);
}

void cmd_decay_fit(const Context& ctx) {
  const json& c = ctx.config;
  const ModelParams p = model_from(c);
  const std::string sec = "experiment.decay_fit";
  EstimateKind k;
  k.theorem = with_field(sec + ".theorem", [&] { return theorem_from_string(text(c, sec + ".theorem")); });
  k.quantity = with_field(sec + ".quantity", [&] { return quantity_from_string(text(c, sec + ".quantity")); });
  k.m = num(c, sec + ".m");
  k.s = num(c, sec + ".s");
  const auto [u0, u1] = data_from(c, sec, k.m);
  const double tol = num(c, sec + ".tolerance");
  const DecayPrediction pred = with_field(sec, [&] { return predicted_exponent(k, p); });
  const SlopeFit f = measure_decay(k, p, u0, u1, num(c, sec + ".t_min"), num(c, sec + ".t_max"),
                                   integer(c, sec + ".samples"));
  Csv csv = ctx.csv({"t", "norm"});
  for (std::size_t i = 0; i < f.t.size(); ++i) csv.row(std::vector<double>{f.t[i], f.norm[i]});
  const Verdict v = compare(pred, f, tol);
  ctx.report({{"theorem", to_string(k.theorem)},
              {"quantity", to_string(k.quantity)},
              {"m", k.m},
              {"s", k.s},
              {"predicted_exponent", pred.exponent},
              {"sharp", pred.sharp},
              {"epsilon_slack", pred.epsilon_slack},
              {"measured_slope", f.slope},
              {"r2", f.r2},
              {"window", {f.t_min, f.t_max}},
              {"transient_warning", f.warning},
              {"verdict", to_string(v)}},
             v == Verdict::consistent);
}

void cmd_diffusion_gap(const Context& ctx) {
  const json& c = ctx.config;
  const ModelParams p = model_from(c);
  const std::string sec = "experiment.diffusion_gap";
  const double m = num(c, sec + ".m"), s = num(c, sec + ".s");
  const auto [u0, u1] = data_from(c, sec, m);
  const ReferenceSystem ref = with_field("model.theta", [&] { return build_reference(p); });
  auto [t0, t1] = gap_window(p);
  if (auto v = opt_num(c, sec + ".t_min")) t0 = *v;
  if (auto v = opt_num(c, sec + ".t_max")) t1 = *v;
  const GapMeasurement g = gap_decay(p, ref, u0, u1, s, m, t0, t1, integer(c, sec + ".samples"));
  Csv csv = ctx.csv({"t", "solution_norm", "reference_norm", "difference_norm"});
  for (std::size_t i = 0; i < g.solution.t.size(); ++i)
    csv.row(std::vector<double>{g.solution.t[i], g.solution.norm[i], g.reference_norm[i], g.difference.norm[i]});
  const bool pass = g.measured_gap >= g.predicted_gap - 0.1;
  ctx.report({{"window", {t0, t1}},
              {"solution_slope", g.solution.slope},
              {"predicted_solution_slope", g.predicted_solution_slope},
              {"difference_slope", g.difference.slope},
              {"measured_gap", g.measured_gap},
              {"predicted_gap", g.predicted_gap},
              {"solution_r2", g.solution.r2},
              {"difference_r2", g.difference.r2}},
             pass);
}

void cmd_exponents(const Context& ctx) {
  const json& c = ctx.config;
  const double theta = num(c, "model.theta");
  const ExponentTriple t = triple_from(c);
  const ExponentRegime reg = with_field("experiment.exponents.regime", [&] {
    return exponent_regime_from_string(text(c, "experiment.exponents.regime"));
  });
  const ExponentReport r = with_field("experiment.exponents", [&] {
    return classify_and_g(t, num(c, "experiment.exponents.m"), num(c, "experiment.exponents.s"), theta, reg,
                          num(c, "experiment.exponents.eps1"));
  });
  Csv csv = ctx.csv({"k", "p", "alpha", "alpha_tilde", "g"});
  for (int k = 0; k < 3; ++k)
    csv.row(std::vector<double>{double(k + 1), t.p[k], r.alpha[k], r.alpha_tilde[k], r.g[k]});
  ctx.report(to_json(r), r.ecase != ExistenceCase::inadmissible);
}

void write_run_csv(const Context& ctx, const RunResult& r) {
  std::vector<std::string> cols{"t"};
  for (const char* prefix : {"raw", "weighted"})
    for (int k = 0; k < 3; ++k)
      for (const MonitorEntry& e : r.weights[k]) cols.push_back(std::string(prefix) + "_u" + std::to_string(k + 1) + "_" + to_string(e.kind));
  Csv csv = ctx.csv(cols);
  for (const TraceRow& row : r.rows) {
    std::vector<double> v{row.t};
    for (const auto* part : {&row.raw, &row.weighted})
      for (int k = 0; k < 3; ++k) v.insert(v.end(), (*part)[k].begin(), (*part)[k].end());
    csv.row(v);
  }
}

void cmd_simulate(const Context& ctx) {
  const RunConfig rc = run_config_from(ctx.config);
  const std::string restart = text(ctx.config, "experiment.simulate.restart");
  const std::string ckpt = text(ctx.config, "experiment.simulate.checkpoint");
  std::optional<SpectralField> init;
  if (!restart.empty()) init = with_field("experiment.simulate.restart", [&] { return load_checkpoint(restart); });
  const RunResult r = run(rc, init ? &*init : nullptr);
  write_run_csv(ctx, r);
  if (!ckpt.empty()) save_checkpoint((ctx.out / ckpt).string(), r.final_state, rc);
  json j = to_json(r);
  j["N"] = rc.N;
  j["L"] = rc.L;
  j["dt"] = rc.dt;
  j["T"] = rc.T;
  j["delta"] = rc.delta;
  ctx.report(j, r.bounded);
}

void cmd_picard(const Context& ctx) {
  const RunConfig rc = run_config_from(ctx.config);
  const PicardResult r = picard_probe(rc, integer(ctx.config, "experiment.picard.iterations"),
                                      num(ctx.config, "experiment.picard.T"));
  Csv csv = ctx.csv({"n", "d_n"});
  for (std::size_t n = 0; n < r.d.size(); ++n) csv.row(std::vector<double>{double(n + 1), r.d[n]});
  const double max_ratio = num(ctx.config, "experiment.picard.max_ratio");
  json j = to_json(r);
  j["max_ratio"] = max_ratio;
  ctx.report(j, r.contraction && r.ratio < max_ratio);
}

void write_error(const fs::path& out, const std::string& command, const std::string& kind, const std::string& msg,
                 int code) {
  json e{{"command", command}, {"error", kind}, {"message", msg}, {"exit_code", code}};
  std::error_code ec;
  fs::create_directories(out, ec);
  std::ofstream(out / "error.json") << e.dump(2) << "\n";
  std::cerr << "error: " << msg << "\n";
}

const char* kColumns = R"(CSV columns per command (first line is a '#' comment with version and config hash):
  symbol-check   zone, xi, error
  gevrey         kappa_prime, gevrey_order, predicted_kappa, r2
  lyapunov       mode, xi_norm, c3, F0, max_violation, E0, ET, gronwall_bound, ok
  decay-fit      t, norm
  diffusion-gap  t, solution_norm, reference_norm, difference_norm
  exponents      k, p, alpha, alpha_tilde, g
  simulate       t, raw_u<k>_<norm>..., weighted_u<k>_<norm>...
  picard         n, d_n
Exit codes: 0 success, 2 validation error, 3 numerical failure, 4 failed --check.)";

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral laboratory for elastic waves with fractional damping"};
  app.footer(kColumns);
  std::string command, config_path, out_dir = ".";
  bool check = false, print_config = false;
  int threads = 0;
  std::uint64_t seed = 1;
  std::vector<double> p_override;
  std::optional<double> m_override, s_override, theta_override;
  std::string regime_override;
  app.add_option("command", command, "Command to run")
      ->check(CLI::IsMember(std::vector<std::string>(std::begin(kCommands), std::end(kCommands))));
  app.add_option("--config", config_path, "JSON config (sections model, profile, experiment)");
  app.add_option("--out", out_dir, "Output directory for CSV and JSON artifacts");
  app.add_flag("--check", check, "Exit 4 when the command's acceptance check fails");
  app.add_option("--threads", threads, "Worker threads (default: hardware count)")->check(CLI::NonNegativeNumber);
  app.add_option("--seed", seed, "Seed for randomized samples");
  app.add_flag("--print-config", print_config, "Print the effective config and exit");
  app.add_option("--p", p_override, "Exponent triple p1 p2 p3")->expected(3);
  app.add_option("--m", m_override, "Integrability index m");
  app.add_option("--s", s_override, "Regularity index s");
  app.add_option("--theta", theta_override, "Damping exponent theta");
  app.add_option("--regime", regime_override, "Exponent regime: cri, bal-3/2-s, bal-m-0");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  const fs::path out(out_dir);
  try {
    json cfg = default_config();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw ValidationError("cannot read config " + config_path);
      json user;
      try {
        user = json::parse(in);
      } catch (const json::parse_error& e) {
        throw ValidationError(std::string("config is not valid JSON: ") + e.what());
      }
      overlay(cfg, user, "");
    }
    if (!p_override.empty()) cfg["experiment"]["exponents"]["p"] = p_override;
    if (m_override) cfg["experiment"]["exponents"]["m"] = *m_override;
    if (s_override) cfg["experiment"]["exponents"]["s"] = *s_override;
    if (theta_override) cfg["model"]["theta"] = *theta_override;
    if (!regime_override.empty()) cfg["experiment"]["exponents"]["regime"] = regime_override;
    if (print_config) {
      std::cout << cfg.dump(2) << "\n";
      return 0;
    }
    if (command.empty()) {
      std::cerr << app.help();
      return 2;
    }
    if (threads > 0) set_thread_count(threads);
    fs::create_directories(out);
    fs::remove(out / "error.json");
    char hash[17];
    std::snprintf(hash, sizeof hash, "%016" PRIx64, fnv1a(cfg.dump()));
    const Context ctx{command, cfg, out, hash, check, seed};
    if (command == "symbol-check") cmd_symbol_check(ctx);
    else if (command == "gevrey") cmd_gevrey(ctx);
    else if (command == "lyapunov") cmd_lyapunov(ctx);
    else if (command == "decay-fit") cmd_decay_fit(ctx);
    else if (command == "diffusion-gap") cmd_diffusion_gap(ctx);
    else if (command == "exponents") cmd_exponents(ctx);
    else if (command == "simulate") cmd_simulate(ctx);
    else if (command == "picard") cmd_picard(ctx);
    return 0;
  } catch (const ValidationError& e) {
    write_error(out, command, "validation", e.what(), 2);
    return 2;
  } catch (const json::exception& e) {
    write_error(out, command, "validation", std::string("config: ") + e.what(), 2);
    return 2;
  } catch (const NumericalError& e) {
    write_error(out, command, "numerical", e.what(), 3);
    return 3;
  } catch (const CheckFailure& e) {
    write_error(out, command, "check", e.what(), 4);
    return 4;
  } catch (const std::exception& e) {
    write_error(out, command, "numerical", e.what(), 3);
    return 3;
  }
}
