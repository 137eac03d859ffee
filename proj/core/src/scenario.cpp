#include "roughflow/scenario.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "roughflow/drift.hpp"
#include "roughflow/error.hpp"
#include "roughflow/flow.hpp"
#include "roughflow/gfd_io.hpp"
#include "roughflow/gronwall.hpp"
#include "roughflow/holder.hpp"
#include "roughflow/parabolic.hpp"
#include "roughflow/spde.hpp"
#include "roughflow/zvonkin.hpp"

namespace roughflow {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

const json& defaults() {
  static const json d = [] {
    const json drift = {{"kind", "weierstrass"}, {"d", 1},       {"N", 128},   {"M", 64},
                        {"T", 1.0},              {"alpha", 0.5}, {"q", 2.0},   {"J", 4},
                        {"theta", 0.45},         {"amplitude", 0.5}, {"file", ""}};
    json smooth = drift;
    smooth["kind"] = "smooth";
    smooth["N"] = 32;
    json s;
    s["gen-drift"] = {{"drift", drift}};
    s["solve-pde"] = {{"drift", drift}, {"source", "sin"}, {"lambda", 1.0}, {"kappa", 1.0},
                      {"tol", 1e-10},  {"max_iter", 200}};
    s["build-zvonkin"] = {{"drift", drift}, {"direction", "fwd"}, {"eta", 0.0}};
    s["simulate-flow"] = {{"drift", drift}, {"route", "direct"}, {"flow_steps", 256}, {"paths", 20},
                          {"points", 8},    {"stride", 4},       {"scheme", "euler"}, {"eta", 0.0}};
    s["stability-sweep"] = {{"drift", drift},
                            {"flow_steps", 256},
                            {"paths", 1000},
                            {"lattice", 16},
                            {"p", 2.0},
                            {"eps", {1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125}},
                            {"eps_ref", 1.0 / 256.0},
                            {"stride", 1}};
    s["run-transport"] = {{"drift", smooth},    {"flow_steps", 256}, {"paths", 10},       {"stride", 4},
                          {"datum", "gauss"},   {"box", {2.0, 4.0}}, {"test_center", 3.0}, {"test_radius", 1.5},
                          {"eval_points", 64},  {"output_nodes", 8}, {"quad", 48}};
    s["run-continuity"] = {{"drift", smooth},     {"flow_steps", 256},   {"paths", 10},
                           {"stride", 4},         {"particles", 200},    {"density_box", {1.0, 5.0}},
                           {"test_center", 3.0},  {"test_radius", 1.5},  {"output_nodes", 8}};
    json fine = smooth;
    fine["M"] = 4096;
    s["verify-duality"] = {{"drift", fine}, {"flow_steps", 4096}, {"paths", 20},
                           {"strides", {256, 64, 16}}, {"particles", 50}, {"min_order", 0.9}};
    s["verify-gronwall"] = {{"kernel", "constant"}, {"beta", 0.25}, {"M", 1000},      {"T", 1.0},
                            {"p", 2.0},             {"counterexample", false}, {"nodes", 1000}, {"T_counter", 5.0}};
    s["full-pipeline"] = {{"drift", drift},       {"eta", 0.0},          {"flow_steps", 256},
                          {"paths", 50},          {"points", 4},         {"strides", {16, 8, 4}},
                          {"stability_paths", 200}, {"lattice", 8}};
    return s;
  }();
  return d;
}

[[noreturn]] void invalid(const std::string& path, const std::string& what) {
  fail(ErrorCode::config_invalid, path + ": " + what);
}

// Every key of `given` must exist in `ref` with a compatible type.
void check_keys(const json& given, const json& ref, const std::string& path) {
  if (!given.is_object()) invalid(path, "expected an object");
  for (auto it = given.begin(); it != given.end(); ++it) {
    const std::string p = path + "." + it.key();
    if (!ref.contains(it.key())) invalid(p, "unknown parameter");
    const json& r = ref.at(it.key());
    const json& g = it.value();
    if (r.is_object()) {
      check_keys(g, r, p);
    } else if (r.is_number() && !g.is_number()) {
      invalid(p, "expected a number");
    } else if (r.is_number_integer() && !g.is_number_integer()) {
      invalid(p, "expected an integer");
    } else if (r.is_string() && !g.is_string()) {
      invalid(p, "expected a string");
    } else if (r.is_boolean() && !g.is_boolean()) {
      invalid(p, "expected a boolean");
    } else if (r.is_array() && !g.is_array()) {
      invalid(p, "expected an array");
    }
  }
}

json merged_params(const RunConfig& c) {
  if (!defaults().contains(c.scenario)) invalid("scenario", "unknown scenario '" + c.scenario + "'");
  json given;
  try {
    given = json::parse(c.params);
  } catch (const json::exception& e) {
    invalid("params", e.what());
  }
  check_keys(given, defaults().at(c.scenario), "params");
  json m = defaults().at(c.scenario);
  m.merge_patch(given);
  return m;
}

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(6) << v;
  return s.str();
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

template <class T>
T get(const json& j, const char* key, const std::string& path) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    invalid(path + "." + key, "missing or wrong type");
  }
}

// ---------------------------------------------------------------------------

class Run {
 public:
  Run(const RunConfig& c, json params) : cfg_(c), p_(std::move(params)) {
    m_.scenario = c.scenario;
    m_.config_hash = config_hash(c);
    m_.run_dir = (fs::path(c.output_dir) / (c.scenario + "-" + m_.config_hash)).string();
    fs::create_directories(m_.run_dir);
  }

  const json& params() const { return p_; }
  std::uint64_t seed() const { return cfg_.seed; }
  json& results() { return results_; }

  template <class F>
  auto stage(const std::string& name, F&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    auto finish = [&] {
      m_.timings.push_back(
          {name, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()});
    };
    try {
      if constexpr (std::is_void_v<decltype(fn())>) {
        fn();
        finish();
      } else {
        auto r = fn();
        finish();
        return r;
      }
    } catch (const Error& e) {
      throw Error(e.code(), "[" + name + "] " + e.what());
    }
  }

  void check(const std::string& name, bool pass, const std::string& detail = "") {
    m_.assertions.push_back({name, pass, detail});
  }

  std::ofstream open(const std::string& file) {
    m_.files.push_back(file);
    std::ofstream out(fs::path(m_.run_dir) / file, std::ios::binary);
    if (!out) fail(ErrorCode::io_error, "cannot write " + file);
    out << std::setprecision(17);
    out << "# config " << m_.config_hash << "\n";
    return out;
  }

  std::string path_of(const std::string& file) {
    m_.files.push_back(file);
    return (fs::path(m_.run_dir) / file).string();
  }

  RunManifest finish() {
    m_.results = results_.dump();
    const fs::path final_path = fs::path(m_.run_dir) / "manifest.json";
    const fs::path tmp = fs::path(m_.run_dir) / "manifest.json.tmp";
    {
      std::ofstream out(tmp, std::ios::binary);
      if (!out) fail(ErrorCode::io_error, "cannot write manifest");
      out << m_.to_json() << "\n";
    }
    fs::rename(tmp, final_path);
    return m_;
  }

 private:
  RunConfig cfg_;
  json p_;
  RunManifest m_;
  json results_ = json::object();
};

double smooth_drift_value(double t, const Point& x, int c) {
  return c == 0 ? 0.6 * std::sin(x[0]) + 0.3 * std::cos(2.0 * x[0] + t) : 0.4 * std::cos(x[0] - x[1]);
}

struct DriftSetup {
  std::string kind;
  DriftSpec spec;
  TimeIndexedField b;
};

DriftSetup make_drift(const json& d, std::uint64_t seed, const std::string& path) {
  const std::string kind = get<std::string>(d, "kind", path);
  if (kind == "file") {
    const auto file = get<std::string>(d, "file", path);
    return DriftSetup{kind, DriftSpec{}, read_gfd_timefield(file)};
  }
  const int dim = get<int>(d, "d", path);
  if (dim != 1 && dim != 2) invalid(path + ".d", "must be 1 or 2");
  const int N = get<int>(d, "N", path);
  const int M = get<int>(d, "M", path);
  const double T = get<double>(d, "T", path);
  if (M < 1) invalid(path + ".M", "must be positive");
  const Torus torus(dim, 2.0 * std::numbers::pi, N);
  const TimeGrid grid(T, M);
  DriftSpec spec;
  spec.alpha = get<double>(d, "alpha", path);
  spec.q = get<double>(d, "q", path);
  spec.J = get<int>(d, "J", path);
  spec.theta = get<double>(d, "theta", path);
  spec.amplitude = get<double>(d, "amplitude", path);
  spec.seed = seed;
  if (kind == "weierstrass") return DriftSetup{kind, spec, generate_drift(spec, torus, grid)};
  auto F = TimeIndexedField::zeros(torus, grid, TimeSampling::nodes, dim, spec.q, spec.alpha);
  if (kind == "zero") return DriftSetup{kind, spec, F};
  if (kind != "smooth") invalid(path + ".kind", "expected weierstrass, smooth, zero or file");
  for (std::size_t k = 0; k < F.size(); ++k)
    for (std::size_t p = 0; p < torus.size(); ++p)
      for (int c = 0; c < dim; ++c)
        F.slice(k).at(p, c) = smooth_drift_value(F.slice_time(k), torus.coordinate(p), c);
  return DriftSetup{kind, spec, F};
}

// Driver grid with `steps` steps on the drift's horizon; steps must be a
// multiple of the drift's M so cell lookups stay aligned.
BrownianDriver make_driver(std::uint64_t seed, const TimeIndexedField& b, int steps, int paths,
                           const std::string& path) {
  if (steps < 1 || steps % b.grid().steps() != 0) invalid(path + ".flow_steps", "must be a multiple of drift.M");
  if (paths < 1) invalid(path + ".paths", "must be positive");
  return BrownianDriver(seed, TimeGrid(b.grid().horizon(), steps), b.torus().dimension(), paths);
}

// The Zvonkin map needs coefficients on the flow's time grid: refine the
// drift to the driver grid by repeating cell values (piecewise constant).
TimeIndexedField refine_drift(const TimeIndexedField& b, int steps) {
  if (b.grid().steps() == steps) return b;
  const int r = steps / b.grid().steps();
  const TimeGrid g(b.grid().horizon(), steps);
  std::vector<GridField> slices;
  if (b.sampling() == TimeSampling::cells) {
    for (int k = 0; k < steps; ++k) slices.push_back(b.slice(k / r));
    return TimeIndexedField(g, TimeSampling::cells, std::move(slices), b.q(), b.alpha());
  }
  for (int k = 0; k <= steps; ++k) {
    const int lo = k / r, rem = k % r;
    if (rem == 0) {
      slices.push_back(b.slice(lo));
    } else {
      const double w = static_cast<double>(rem) / r;
      slices.push_back((1.0 - w) * b.slice(lo) + w * b.slice(lo + 1));
    }
  }
  return TimeIndexedField(g, TimeSampling::nodes, std::move(slices), b.q(), b.alpha());
}

std::vector<Point> lattice(const Torus& torus, int per_axis) {
  std::vector<Point> pts;
  const double h = torus.length() / per_axis;
  for (int i = 0; i < per_axis; ++i) {
    if (torus.dimension() == 1) {
      pts.push_back(Point{(i + 0.5) * h, 0.0});
    } else {
      for (int j = 0; j < per_axis; ++j) pts.push_back(Point{(i + 0.5) * h, (j + 0.5) * h});
    }
  }
  return pts;
}

double eta_of(const json& p, int dim) {
  const double eta = p.at("eta").get<double>();
  return eta > 0.0 ? eta : 1.0 / (2.0 * dim);
}

bool nonincreasing(const std::vector<double>& v, double floor = 1e-12) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[i - 1] && v[i] > floor) return false;
  return true;
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

double fitted_order(const std::vector<double>& h, const std::vector<double>& e) {
  const double n = static_cast<double>(h.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double lx = std::log(h[i]), ly = std::log(e[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// ---------------------------------------------------------------------------

void scenario_gen_drift(Run& run) {
  const auto setup = run.stage("generate", [&] { return make_drift(run.params().at("drift"), run.seed(), "params.drift"); });
  write_gfd(run.path_of("drift.gfd"), setup.b);
  const double lq = run.stage("certify", [&] { return lq_time_norm(setup.b, NormKind::C0a); });
  run.results()["lq_c0a"] = lq;
  run.check("drift finite", setup.b.torus().size() > 0 && std::isfinite(lq), "L^q C^0,alpha = " + fmt(lq));
  if (setup.kind == "weierstrass") {
    const auto cert = run.stage("probe", [&] { return certify_drift(setup.spec, setup.b); });
    run.results()["probe_ratio_at_alpha"] = cert.at_alpha.ratio;
    run.results()["probe_ratio_above_alpha"] = cert.above_alpha.ratio;
    run.check("roughness probe grows above alpha", cert.above_alpha.ratio > cert.at_alpha.ratio);
    auto out = run.open("certificate.csv");
    out << "quantity,value\n";
    out << "lq_c0a," << cert.lq_c0a << "\nsup_slice_c0a," << cert.sup_slice_c0a << "\nprobe_at_alpha,"
        << cert.at_alpha.ratio << "\nprobe_above_alpha," << cert.above_alpha.ratio << "\n";
  }
}

void scenario_solve_pde(Run& run) {
  const json& p = run.params();
  const auto setup = make_drift(p.at("drift"), run.seed(), "params.drift");
  const auto& b = setup.b;
  const std::string source = get<std::string>(p, "source", "params");
  TimeIndexedField f = b;
  if (source == "sin") {
    f = TimeIndexedField::zeros(b.torus(), b.grid(), b.sampling(), 1, b.q(), b.alpha());
    for (std::size_t k = 0; k < f.size(); ++k)
      for (std::size_t i = 0; i < b.torus().size(); ++i) f.slice(k).at(i) = std::sin(b.torus().coordinate(i)[0]);
  } else if (source != "drift") {
    invalid("params.source", "expected sin or drift");
  }
  const PdeProblem prob{b, f, get<double>(p, "lambda", "params"), get<double>(p, "kappa", "params")};
  const double tol = get<double>(p, "tol", "params");
  const auto sol = run.stage("solve", [&] { return solve_mild(prob, tol, get<int>(p, "max_iter", "params")); });
  write_gfd(run.path_of("v.gfd"), sol.v);
  auto out = run.open("norms.csv");
  out << "t,sup_v,sup_grad_v\n";
  for (std::size_t k = 0; k < sol.v.size(); ++k)
    out << sol.v.slice_time(k) << "," << sol.v.slice(k).sup_norm() << "," << sol.gradient.slice(k).sup_norm() << "\n";
  run.results()["iterations"] = sol.iterations;
  run.results()["residual"] = sol.residual;
  run.results()["linf_c1"] = sol.linf_c1;
  run.check("fixed point converged", sol.residual <= tol, "residual " + fmt(sol.residual));
  if (setup.kind == "zero" && source == "sin") {
    const double a = prob.lambda + prob.kappa;
    double worst = 0.0;
    for (std::size_t k = 0; k < sol.v.size(); ++k) {
      const double prof = -std::expm1(-a * sol.v.slice_time(k)) / a;
      for (std::size_t i = 0; i < b.torus().size(); ++i)
        worst = std::max(worst, std::abs(sol.v.slice(k).at(i, 0) - prof * std::sin(b.torus().coordinate(i)[0])));
    }
    run.results()["closed_form_error"] = worst;
    run.check("closed-form Fourier mode", worst <= 1e-6, fmt(worst));
  }
}

void scenario_build_zvonkin(Run& run) {
  const json& p = run.params();
  const auto setup = make_drift(p.at("drift"), run.seed(), "params.drift");
  const int d = setup.b.torus().dimension();
  const double eta = eta_of(p, d);
  const std::string dir = get<std::string>(p, "direction", "params");
  if (dir != "fwd" && dir != "bwd") invalid("params.direction", "expected fwd or bwd");
  const Direction direction = dir == "fwd" ? Direction::forward : Direction::backward;
  const ZvonkinMap map = run.stage("tune", [&] { return build_map(setup.b, direction, eta); });
  const auto coeffs = run.stage("transform", [&] { return transform_coefficients(map); });
  auto out = run.open("lambda_curve.csv");
  out << "lambda,linf_c1\n";
  for (const auto& [l, n] : map.lambda_curve()) out << l << "," << n << "\n";
  write_gfd(run.path_of("v.gfd"), map.pde().v);
  const double dom = diagonal_dominance(map);
  run.results()["lambda"] = map.lambda();
  run.results()["margin"] = map.margin();
  run.results()["eta"] = eta;
  run.results()["diagonal_dominance"] = dom;
  run.results()["sigma_deviation"] = coeffs.sigma_deviation;
  run.results()["transformed_drift_sup"] = coeffs.drift_sup;
  run.check("margin <= eta", map.margin() <= eta, fmt(map.margin()));
  run.check("diagonal dominance >= 1 - d eta", dom >= 1.0 - d * eta - 1e-12, fmt(dom));
  run.check("|sigma - I| <= eta", coeffs.sigma_deviation <= eta, fmt(coeffs.sigma_deviation));
  bool curve_ok = true;
  double prev = std::numeric_limits<double>::infinity();
  for (const auto& [l, n] : map.lambda_curve()) {
    if (std::isfinite(n) && n > prev * (1.0 + 1e-12)) curve_ok = false;
    if (std::isfinite(n)) prev = n;
  }
  run.check("lambda curve nonincreasing", curve_ok);
}

Scheme scheme_of(const json& p) {
  const auto s = get<std::string>(p, "scheme", "params");
  if (s == "euler") return Scheme::euler;
  if (s == "milstein") return Scheme::milstein;
  invalid("params.scheme", "expected euler or milstein");
}

void scenario_simulate_flow(Run& run) {
  const json& p = run.params();
  const auto setup = make_drift(p.at("drift"), run.seed(), "params.drift");
  const int steps = get<int>(p, "flow_steps", "params");
  const int paths = get<int>(p, "paths", "params");
  const BrownianDriver drv = make_driver(run.seed(), setup.b, steps, paths, "params");
  const auto pts = lattice(setup.b.torus(), get<int>(p, "points", "params"));
  const int stride = get<int>(p, "stride", "params");
  const std::string route = get<std::string>(p, "route", "params");
  FlowEnsemble e;
  ResidualStats comp, inv;
  if (route == "direct") {
    const SdeSystem sys(setup.b);
    const FlowOptions o{stride, scheme_of(p), true};
    e = run.stage("integrate", [&] { return integrate_forward(sys, drv, 0, steps, pts, o); });
    const auto r = direct_route(sys, drv, o);
    comp = run.stage("flow property", [&] { return verify_flow_property(r, 0, steps / 2 + stride / 2, steps, replicate(pts, paths, sys.dimension())); });
    inv = run.stage("inverse flow", [&] { return verify_inverse_flow(r, r, 0, steps, replicate(pts, paths, sys.dimension())); });
  } else if (route == "zvonkin") {
    const auto fine = refine_drift(setup.b, steps);
    const double eta = eta_of(p, fine.torus().dimension());
    const auto maps = run.stage("maps", [&] { return build_maps(fine, eta); });
    const SdeSystem fs(transform_coefficients(maps.forward)), bs(transform_coefficients(maps.backward));
    const FlowOptions o{stride, Scheme::milstein, true};
    const auto start = replicate(pts, paths, fs.dimension());
    e = run.stage("integrate", [&] { return flow_via_zvonkin(maps.forward, fs, drv, 0, steps, start, o); });
    const auto fr = zvonkin_route(maps.forward, fs, drv, o);
    const auto br = zvonkin_route(maps.backward, bs, drv, o);
    comp = run.stage("flow property", [&] { return verify_flow_property(fr, 0, steps / 2 + stride / 2, steps, start); });
    inv = run.stage("inverse flow", [&] { return verify_inverse_flow(fr, br, 0, steps, start); });
    run.results()["lambda_forward"] = maps.forward.lambda();
    run.results()["lambda_backward"] = maps.backward.lambda();
  } else {
    invalid("params.route", "expected direct or zvonkin");
  }
  auto out = run.open("positions.csv");
  const int d = e.dimension;
  out << "path,point,x0" << (d == 2 ? ",x1" : "") << ",det_jacobian\n";
  bool finite = true;
  for (std::size_t i = 0; i < e.particles(); ++i) {
    out << i / e.points_per_path << "," << i % e.points_per_path;
    for (int c = 0; c < d; ++c) {
      out << "," << e.positions[i][c];
      finite = finite && std::isfinite(e.positions[i][c]);
    }
    out << "," << det(e.jacobians[i], d) << "\n";
  }
  auto res = run.open("residuals.csv");
  res << "check,max,mean\n";
  res << "composition," << comp.max << "," << comp.mean << "\ninverse," << inv.max << "," << inv.mean << "\n";
  run.results()["composition_residual"] = comp.mean;
  run.results()["inverse_residual"] = inv.mean;
  run.check("positions finite", finite);
  run.check("residuals finite", std::isfinite(comp.max) && std::isfinite(inv.max));
}

void scenario_stability(Run& run) {
  const json& p = run.params();
  const auto setup = make_drift(p.at("drift"), run.seed(), "params.drift");
  const BrownianDriver drv = make_driver(run.seed(), setup.b, get<int>(p, "flow_steps", "params"),
                                         get<int>(p, "paths", "params"), "params");
  StabilityOptions o;
  o.eps = p.at("eps").get<std::vector<double>>();
  if (o.eps.empty()) invalid("params.eps", "needs at least one scale");
  o.eps_ref = get<double>(p, "eps_ref", "params");
  o.p = get<double>(p, "p", "params");
  o.lattice = get<int>(p, "lattice", "params");
  o.stride = get<int>(p, "stride", "params");
  const auto c = run.stage("sweep", [&] { return stability_sweep(setup.b, drv, o); });
  auto out = run.open("stability.csv");
  out << "n,eps,value,stderr,grad_value,grad_stderr\n";
  for (std::size_t i = 0; i < c.eps.size(); ++i)
    out << i << "," << c.eps[i] << "," << c.value[i] << "," << c.stderr_[i] << "," << c.grad_value[i] << ","
        << c.grad_stderr[i] << "\n";
  run.results()["value"] = c.value;
  run.results()["grad_value"] = c.grad_value;
  run.results()["empirical_rate"] = c.empirical_rate;
  run.results()["stderr_spread"] = c.stderr_spread;
  if (setup.kind == "zero") {
    const double worst = *std::max_element(c.value.begin(), c.value.end());
    run.check("curve vanishes for b = 0", worst == 0.0, fmt(worst));
    return;
  }
  run.check("curves positive", c.positive);
  run.check("position curve monotone (20% slack)", c.monotone);
  run.check("gradient curve monotone (20% slack)", c.grad_monotone);
  run.check("stderr <= 25% of each value", c.stderr_ok, "spread " + fmt(c.stderr_spread));
}

BVInitialData datum_of(const json& p) {
  const auto kind = get<std::string>(p, "datum", "params");
  if (kind == "gauss")
    return BVInitialData::smooth(
        1, [](const Point& x) { return std::exp(-(x[0] - 3.0) * (x[0] - 3.0)); },
        [](const Point& x) { return Point{-2.0 * (x[0] - 3.0) * std::exp(-(x[0] - 3.0) * (x[0] - 3.0)), 0.0}; },
        0.0, 1.0);
  if (kind == "box") {
    const auto box = p.at("box").get<std::vector<double>>();
    if (box.size() != 2 || !(box[0] < box[1])) invalid("params.box", "expected [lo, hi] with lo < hi");
    return BVInitialData::indicator(1, Box{{box[0], 0.0}, {box[1], 0.0}});
  }
  invalid("params.datum", "expected gauss or box");
}

std::vector<int> output_nodes(int steps, int count, int stride) {
  std::vector<int> n;
  for (int i = 1; i <= count; ++i) {
    int k = static_cast<int>(std::lround(static_cast<double>(steps) * i / count));
    k = std::max(stride, k / stride * stride);
    if (n.empty() || k > n.back()) n.push_back(k);
  }
  return n;
}

void require_1d(const DriftSetup& s, const std::string& path) {
  if (s.b.torus().dimension() != 1) invalid(path, "this scenario runs in d = 1");
}

void scenario_transport(Run& run) {
  const json& p = run.params();
  const auto setup = make_drift(p.at("drift"), run.seed(), "params.drift");
  require_1d(setup, "params.drift.d");
  const int steps = get<int>(p, "flow_steps", "params");
  const int stride = get<int>(p, "stride", "params");
  const BrownianDriver drv = make_driver(run.seed(), setup.b, steps, get<int>(p, "paths", "params"), "params");
  const SdeSystem sys(setup.b);
  const auto u = datum_of(p);
  const Bump th{{get<double>(p, "test_center", "params"), 0.0}, get<double>(p, "test_radius", "params"), 1};
  check_test_functions({th}, sys.horizon() > 0 ? setup.b.torus().length() : 0.0);
  const int ne = get<int>(p, "eval_points", "params");
  std::vector<Point> pts;
  const double lo = th.center[0] - th.radius, hi = th.center[0] + th.radius;
  for (int i = 0; i < ne; ++i) pts.push_back(Point{lo + (hi - lo) * (i + 0.5) / ne, 0.0});
  auto out = run.open("transport.csv");
  out << "path,t,int_u_theta,min_u,max_u\n";
  bool maxp = true;
  run.stage("transport", [&] {
    for (int k : output_nodes(steps, get<int>(p, "output_nodes", "params"), stride)) {
      const auto back = integrate_backward(sys, drv, 0, k, pts, FlowOptions{stride, Scheme::euler, false});
      const auto sol = solve_transport(u, back);
      for (int path = 0; path < sol.paths; ++path) {
        double integral = 0.0, mn = 1e300, mx = -1e300;
        for (int i = 0; i < ne; ++i) {
          const double v = sol.at(path, i);
          integral += v * th.value(pts[i]) * (hi - lo) / ne;
          mn = std::min(mn, v);
          mx = std::max(mx, v);
          maxp = maxp && v >= u.min_value() && v <= u.max_value();
        }
        out << path << "," << drv.grid().node(k) << "," << integral << "," << mn << "," << mx << "\n";
      }
    }
  });
  run.check("pathwise maximum principle", maxp);
  if (u.kind() == BVInitialData::Kind::smooth) {
    const auto w = run.stage("weak form", [&] {
      return verify_weak_form_transport(sys, drv, u, {th}, stride, get<int>(p, "quad", "params"));
    });
    run.results()["weak_form_rms"] = w.rms;
    run.check("weak-form residual finite", std::isfinite(w.rms), fmt(w.rms));
  } else {
    const auto bv = run.stage("bv bound", [&] { return bv_mass_bound(u, sys, drv, th, stride); });
    run.results()["bv_mass_bound"] = bv.max;
    run.check("BV mass bound finite", bv.finite, fmt(bv.max));
  }
}

void scenario_continuity(Run& run) {
  const json& p = run.params();
  const auto setup = make_drift(p.at("drift"), run.seed(), "params.drift");
  require_1d(setup, "params.drift.d");
  const int steps = get<int>(p, "flow_steps", "params");
  const int stride = get<int>(p, "stride", "params");
  const BrownianDriver drv = make_driver(run.seed(), setup.b, steps, get<int>(p, "paths", "params"), "params");
  const SdeSystem sys(setup.b);
  const auto box = p.at("density_box").get<std::vector<double>>();
  if (box.size() != 2 || !(box[0] < box[1])) invalid("params.density_box", "expected [lo, hi] with lo < hi");
  const ParticleMeasure mu = sample_density(1, Point{box[0], 0.0}, Point{box[1], 0.0}, get<int>(p, "particles", "params"),
                                            [](const Point& x) { return 1.0 + 0.5 * std::sin(x[0]); });
  const Bump th{{get<double>(p, "test_center", "params"), 0.0}, get<double>(p, "test_radius", "params"), 1};
  check_test_functions({th}, setup.b.torus().length());
  auto out = run.open("continuity.csv");
  out << "path,t,int_theta_mu,mass\n";
  bool mass_ok = true;
  run.stage("pushforward", [&] {
    for (int k : output_nodes(steps, get<int>(p, "output_nodes", "params"), stride)) {
      const auto mus = solve_continuity(mu, integrate_forward(sys, drv, 0, k, mu.points, FlowOptions{stride, Scheme::euler, false}));
      for (std::size_t path = 0; path < mus.size(); ++path) {
        const double m = mus[path].mass();
        mass_ok = mass_ok && m == mu.mass();
        out << path << "," << drv.grid().node(k) << ","
            << mus[path].integrate([&](const Point& x) { return th.value(x); }) << "," << m << "\n";
      }
    }
  });
  const auto w = run.stage("weak form", [&] { return verify_weak_form_continuity(sys, drv, mu, {th}, stride, 0.5); });
  const auto w1 = run.stage("weak form (factor 1)", [&] { return verify_weak_form_continuity(sys, drv, mu, {th}, stride, 1.0); });
  run.results()["weak_form_rms_half"] = w.rms;
  run.results()["weak_form_rms_one"] = w1.rms;
  run.check("mass conserved exactly per path", mass_ok);
  run.check("weak-form residual finite", std::isfinite(w.rms), fmt(w.rms));
}

void scenario_duality(Run& run) {
  const json& p = run.params();
  const auto setup = make_drift(p.at("drift"), run.seed(), "params.drift");
  require_1d(setup, "params.drift.d");
  const int steps = get<int>(p, "flow_steps", "params");
  const int paths = get<int>(p, "paths", "params");
  const BrownianDriver drv = make_driver(run.seed(), setup.b, steps, paths, "params");
  const SdeSystem sys(setup.b);
  const auto strides = p.at("strides").get<std::vector<int>>();
  const BVInitialData u = BVInitialData::smooth(
      1, [](const Point& x) { return std::exp(-(x[0] - 3.0) * (x[0] - 3.0)); },
      [](const Point& x) { return Point{-2.0 * (x[0] - 3.0) * std::exp(-(x[0] - 3.0) * (x[0] - 3.0)), 0.0}; }, 0.0,
      1.0);
  const ParticleMeasure mu = sample_density(1, Point{1.0, 0.0}, Point{5.0, 0.0}, get<int>(p, "particles", "params"),
                                            [](const Point& x) { return 1.0 + 0.5 * std::sin(x[0]); });
  std::vector<double> h, drift;
  auto out = run.open("duality.csv");
  out << "stride,dt,max_relative_drift\n";
  run.stage("duality", [&] {
    for (int s : strides) {
      if (s < 1 || steps % s != 0) invalid("params.strides", "each stride must divide flow_steps");
      const auto r = direct_route(sys, drv, FlowOptions{s, Scheme::euler, false});
      const double dr = verify_duality(u, mu, r, r, paths, {steps}).max_relative_drift;
      h.push_back(s * drv.grid().dt());
      drift.push_back(dr);
      out << s << "," << h.back() << "," << dr << "\n";
    }
  });
  run.results()["drift"] = drift;
  const double worst = *std::max_element(drift.begin(), drift.end());
  if (setup.kind == "zero") {
    run.check("duality exact for b = 0", worst < 1e-12, fmt(worst));
  } else if (h.size() >= 2) {
    const double order = fitted_order(h, drift);
    run.results()["order"] = order;
    run.check("duality drift order >= min_order", order >= get<double>(p, "min_order", "params"), fmt(order));
  }
}

void scenario_gronwall(Run& run) {
  const json& p = run.params();
  if (get<bool>(p, "counterexample", "params")) {
    const auto r = run.stage("counterexample", [&] {
      return refute_flawed_inequality(get<int>(p, "nodes", "params"), get<double>(p, "T_counter", "params"));
    });
    auto out = run.open("counterexample.csv");
    out << "t,u,rhs,rhs_quadrature\n";
    for (std::size_t i = 0; i < r.t.size(); ++i) out << r.t[i] << "," << r.u[i] << "," << r.rhs[i] << "," << r.rhs_quad[i] << "\n";
    run.results()["min_gap"] = r.min_gap;
    run.check("e^(1-e^-t) < 1 + t", r.refuted && r.min_gap > 0.0, "min gap " + fmt(r.min_gap));
    run.check("closed form matches quadrature", r.max_quad_error < 1e-8, fmt(r.max_quad_error));
    return;
  }
  VolterraProblem v;
  v.f = [](double) { return 1.0; };
  v.h = [](double) { return 1.0; };
  v.M = get<int>(p, "M", "params");
  v.T = get<double>(p, "T", "params");
  v.p = get<double>(p, "p", "params");
  if (!(v.p > 1.0)) invalid("params.p", "must exceed 1");
  v.q = v.p / (v.p - 1.0);
  const auto kernel = get<std::string>(p, "kernel", "params");
  if (kernel == "constant") {
    v.r = [](double, double) { return 1.0; };
  } else if (kernel == "exponential") {
    v.r = [](double t, double s) { return std::exp(-(t - s)); };
  } else if (kernel == "singular") {
    v.r = [](double, double) { return 1.0; };
    v.beta = get<double>(p, "beta", "params");
  } else {
    invalid("params.kernel", "expected constant, exponential or singular");
  }
  const auto r = run.stage("bound", [&] { return verify_gronwall_bound(v); });
  auto out = run.open("gronwall.csv");
  out << "t,u,bound\n";
  for (std::size_t i = 0; i < r.t.size(); ++i) out << r.t[i] << "," << r.u[i] << "," << r.bound[i] << "\n";
  run.results()["min_margin"] = r.min_margin;
  run.check("u <= E ||f|| at every node", r.holds, "min margin " + fmt(r.min_margin));
}

void scenario_full(Run& run) {
  const json& p = run.params();
  const auto setup = run.stage("drift", [&] { return make_drift(p.at("drift"), run.seed(), "params.drift"); });
  const auto& b = setup.b;
  const int d = b.torus().dimension();
  const double lq = lq_time_norm(b, NormKind::C0a);
  run.results()["drift_lq_c0a"] = lq;
  run.check("drift L^q C^0,alpha finite", std::isfinite(lq), fmt(lq));

  const int steps = get<int>(p, "flow_steps", "params");
  const int paths = get<int>(p, "paths", "params");
  const BrownianDriver drv = make_driver(run.seed(), b, steps, paths, "params");
  const auto fine = refine_drift(b, steps);
  const double eta = eta_of(p, d);
  const auto maps = run.stage("zvonkin", [&] { return build_maps(fine, eta); });
  run.results()["lambda_forward"] = maps.forward.lambda();
  run.results()["lambda_backward"] = maps.backward.lambda();
  run.results()["margin_forward"] = maps.forward.margin();
  run.results()["margin_backward"] = maps.backward.margin();
  run.check("forward margin <= eta", maps.forward.margin() <= eta, fmt(maps.forward.margin()));
  run.check("backward margin <= eta", maps.backward.margin() <= eta, fmt(maps.backward.margin()));

  const SdeSystem fs(transform_coefficients(maps.forward)), bs(transform_coefficients(maps.backward));
  const auto start = replicate(lattice(b.torus(), get<int>(p, "points", "params")), paths, d);
  const auto strides = p.at("strides").get<std::vector<int>>();
  std::vector<double> comp, inv;
  auto out = run.open("flow_residuals.csv");
  out << "stride,composition_mean,inverse_mean\n";
  run.stage("flow", [&] {
    for (int s : strides) {
      if (s < 1 || steps % s != 0) invalid("params.strides", "each stride must divide flow_steps");
      const FlowOptions o{s, Scheme::milstein, true};
      const auto fr = zvonkin_route(maps.forward, fs, drv, o);
      const auto br = zvonkin_route(maps.backward, bs, drv, o);
      comp.push_back(verify_flow_property(fr, 0, steps / 2 + s / 2, steps, start).mean);
      inv.push_back(verify_inverse_flow(fr, br, 0, steps, start).mean);
      out << s << "," << comp.back() << "," << inv.back() << "\n";
    }
  });
  run.results()["composition_residual"] = comp;
  run.results()["inverse_residual"] = inv;
  if (setup.kind == "zero") {
    const double worst = std::max(*std::max_element(comp.begin(), comp.end()), *std::max_element(inv.begin(), inv.end()));
    run.check("flow residuals vanish for b = 0", worst < 1e-12, fmt(worst));
  } else {
    run.check("composition residual decreases", strictly_decreasing(comp));
    run.check("inverse residual decreases", strictly_decreasing(inv));
  }

  if (d == 1) {
    const SdeSystem direct(b);
    const BVInitialData u = BVInitialData::smooth(
        1, [](const Point& x) { return std::exp(-(x[0] - 3.0) * (x[0] - 3.0)); },
        [](const Point& x) { return Point{-2.0 * (x[0] - 3.0) * std::exp(-(x[0] - 3.0) * (x[0] - 3.0)), 0.0}; },
        0.0, 1.0);
    const ParticleMeasure mu = sample_density(1, Point{1.0, 0.0}, Point{5.0, 0.0}, 40, [](const Point&) { return 1.0; });
    std::vector<double> dual;
    auto dout = run.open("duality.csv");
    dout << "stride,max_relative_drift\n";
    run.stage("duality", [&] {
      for (int s : strides) {
        const auto r = direct_route(direct, drv, FlowOptions{s, Scheme::euler, false});
        dual.push_back(verify_duality(u, mu, r, r, paths, {steps}).max_relative_drift);
        dout << s << "," << dual.back() << "\n";
      }
    });
    run.results()["duality_drift"] = dual;
    if (setup.kind == "zero") {
      run.check("duality exact for b = 0", *std::max_element(dual.begin(), dual.end()) < 1e-12);
    } else {
      run.check("duality drift nonincreasing", nonincreasing(dual));
    }
  }

  const BrownianDriver sdrv = make_driver(run.seed() + 1, b, steps, get<int>(p, "stability_paths", "params"), "params");
  StabilityOptions so;
  so.lattice = get<int>(p, "lattice", "params");
  const auto c = run.stage("stability", [&] { return stability_sweep(b, sdrv, so); });
  auto sout = run.open("stability.csv");
  sout << "n,eps,value,stderr,grad_value,grad_stderr\n";
  for (std::size_t i = 0; i < c.eps.size(); ++i)
    sout << i << "," << c.eps[i] << "," << c.value[i] << "," << c.stderr_[i] << "," << c.grad_value[i] << ","
         << c.grad_stderr[i] << "\n";
  run.results()["stability"] = c.value;
  run.results()["gradient_stability"] = c.grad_value;
  if (setup.kind == "zero") {
    run.check("stability curve vanishes for b = 0", *std::max_element(c.value.begin(), c.value.end()) == 0.0);
  } else {
    run.check("stability curves positive", c.positive);
    run.check("stability curve monotone (20% slack)", c.monotone);
    run.check("gradient stability curve monotone (20% slack)", c.grad_monotone);
  }
}

const std::map<std::string, std::function<void(Run&)>>& registry() {
  static const std::map<std::string, std::function<void(Run&)>> r = {
      {"gen-drift", scenario_gen_drift},         {"solve-pde", scenario_solve_pde},
      {"build-zvonkin", scenario_build_zvonkin}, {"simulate-flow", scenario_simulate_flow},
      {"stability-sweep", scenario_stability},   {"run-transport", scenario_transport},
      {"run-continuity", scenario_continuity},   {"verify-duality", scenario_duality},
      {"verify-gronwall", scenario_gronwall},    {"full-pipeline", scenario_full}};
  return r;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    invalid("config", e.what());
  }
  if (!j.is_object()) invalid("config", "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (it.key() != "scenario" && it.key() != "seed" && it.key() != "output_dir" && it.key() != "params")
      invalid(it.key(), "unknown field");
  RunConfig c;
  if (!j.contains("scenario") || !j["scenario"].is_string()) invalid("scenario", "missing or not a string");
  c.scenario = j["scenario"].get<std::string>();
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !(j["seed"].is_number_integer() && j["seed"].get<long long>() >= 0))
      invalid("seed", "expected a nonnegative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("output_dir")) {
    if (!j["output_dir"].is_string()) invalid("output_dir", "expected a string");
    c.output_dir = j["output_dir"].get<std::string>();
  }
  if (j.contains("params")) c.params = j["params"].dump();
  merged_params(c);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io_error, "cannot read config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string canonical_config(const RunConfig& c) {
  const json j = {{"scenario", c.scenario}, {"seed", c.seed}, {"params", merged_params(c)}};
  return j.dump();
}

std::string config_hash(const RunConfig& c) {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << fnv1a(canonical_config(c));
  return s.str();
}

bool RunManifest::all_passed() const noexcept {
  return std::all_of(assertions.begin(), assertions.end(), [](const Assertion& a) { return a.pass; });
}

std::string RunManifest::to_json() const {
  json j;
  j["scenario"] = scenario;
  j["config_hash"] = config_hash;
  j["run_dir"] = run_dir;
  j["timings"] = json::array();
  for (const auto& t : timings) j["timings"].push_back({{"stage", t.stage}, {"seconds", t.seconds}});
  j["files"] = files;
  j["assertions"] = json::array();
  for (const auto& a : assertions) j["assertions"].push_back({{"name", a.name}, {"pass", a.pass}, {"detail", a.detail}});
  j["all_passed"] = all_passed();
  j["results"] = json::parse(results);
  return j.dump(2);
}

std::vector<std::string> scenario_names() {
  std::vector<std::string> n;
  for (const auto& [k, v] : registry()) n.push_back(k);
  return n;
}

RunManifest run_scenario(const RunConfig& c) {
  json params = merged_params(c);
  Run run(c, std::move(params));
  registry().at(c.scenario)(run);
  return run.finish();
}

std::string config_reference() { return defaults().dump(2); }

}  // namespace roughflow
