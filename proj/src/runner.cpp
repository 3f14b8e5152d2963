#include "percap/runner.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "percap/capacity.hpp"
#include "percap/errors.hpp"
#include "percap/estimators.hpp"
#include "percap/oracle.hpp"
#include "percap/regularity.hpp"
#include "percap/walker.hpp"

namespace percap::runner {

using nlohmann::json;

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Point point_from(const json& j, int dim, const std::string& field) {
  if (!j.is_array() || j.size() != size_t(dim))
    throw ConfigError("field '" + field + "' must be an array of " + std::to_string(dim) +
                      " integers");
  std::vector<int64_t> c;
  for (const auto& v : j) {
    if (!v.is_number_integer()) throw ConfigError("field '" + field + "' must hold integers");
    c.push_back(v.get<int64_t>());
  }
  return Point::of(c);
}

std::vector<Point> points_from(const json& j, int dim, const std::string& field) {
  if (!j.is_array()) throw ConfigError("field '" + field + "' must be an array of points");
  std::vector<Point> pts;
  for (size_t i = 0; i < j.size(); ++i)
    pts.push_back(point_from(j[i], dim, field + "[" + std::to_string(i) + "]"));
  return pts;
}

json point_json(const Point& p) {
  json a = json::array();
  for (int i = 0; i < p.dim; ++i) a.push_back(p.c[i]);
  return a;
}

json points_json(const std::vector<Point>& pts) {
  json a = json::array();
  for (const Point& p : pts) a.push_back(point_json(p));
  return a;
}

// Strict field validation: every config key must be consumed.
class Fields {
 public:
  Fields(const json& j, std::string kind) : j_(j), kind_(std::move(kind)) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
  }

  const json* get(const std::string& key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }
  const json& require(const std::string& key) {
    const json* v = get(key);
    if (!v) throw ConfigError("experiment '" + kind_ + "' requires field '" + key + "'");
    return *v;
  }
  template <class T>
  T get_or(const std::string& key, T fallback) {
    const json* v = get(key);
    if (!v) return fallback;
    try {
      return v->get<T>();
    } catch (const json::exception&) {
      throw ConfigError("field '" + key + "' has the wrong type");
    }
  }
  template <class T>
  T req(const std::string& key) {
    const json& v = require(key);
    try {
      return v.get<T>();
    } catch (const json::exception&) {
      throw ConfigError("field '" + key + "' has the wrong type");
    }
  }
  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      (void)value;
      if (!seen_.count(key))
        throw ConfigError("unknown field '" + key + "' for experiment '" + kind_ + "'");
    }
  }

 private:
  const json& j_;
  std::string kind_;
  std::set<std::string> seen_;
};

struct Row {
  std::string experiment;
  std::string params;
  uint64_t n = 0;
  uint64_t hits = 0;
  uint64_t truncated = 0;
  double value = 0.0;
  double se = 0.0;
  double wilson_lo = 0.0;
  double wilson_hi = 0.0;
  uint64_t seed = 0;
};

std::string csv_of(const std::vector<Row>& rows) {
  std::ostringstream os;
  os << "experiment,params,n,hits,truncated,value,se,wilson_lo,wilson_hi,seed\n";
  for (const Row& r : rows) {
    os << r.experiment << ",\"" << r.params << "\"," << r.n << "," << r.hits << "," << r.truncated
       << "," << fmt(r.value) << "," << fmt(r.se) << "," << fmt(r.wilson_lo) << ","
       << fmt(r.wilson_hi) << "," << r.seed << "\n";
  }
  return os.str();
}

Row row_of_estimate(const std::string& experiment, const std::string& params, const Estimate& e,
                    uint64_t seed) {
  Row r;
  r.experiment = experiment;
  r.params = params;
  r.n = e.n;
  r.hits = e.hits;
  r.truncated = e.n_truncated;
  r.value = e.value;
  r.se = e.std_error;
  r.wilson_lo = e.wilson_lo;
  r.wilson_hi = e.wilson_hi;
  r.seed = seed;
  return r;
}

json estimate_json(const Estimate& e) {
  return json{{"value", e.value}, {"se", e.std_error},     {"n", e.n},
              {"hits", e.hits},   {"truncated", e.n_truncated}, {"lower", e.lower},
              {"upper", e.upper}, {"wilson_lo", e.wilson_lo},   {"wilson_hi", e.wilson_hi}};
}

json ratio_json(const RatioEstimate& r) {
  return json{{"ratio", r.ratio},
              {"se", r.std_error},
              {"numerator", estimate_json(r.numerator)},
              {"denominator", estimate_json(r.denominator)}};
}

struct Parsed {
  std::string kind;
  GraphSpec spec;
  McOptions mc;
  std::string out_dir;
  json echo;
};

struct Outcome {
  std::vector<Row> rows;
  json results;
};

GraphSpec parse_spec(Fields& f, bool needs_p) {
  const int dim = f.req<int>("dimension");
  const std::string conn = f.get_or<std::string>("connectivity", "nn");
  double p = 0.0;
  if (needs_p)
    p = f.req<double>("p");
  else
    p = f.get_or<double>("p", 0.0);
  if (conn == "nn") {
    if (f.get("range")) throw ConfigError("field 'range' applies only to spread_out connectivity");
    return GraphSpec::nn(dim, p);
  }
  if (conn == "spread_out") return GraphSpec::spread_out(dim, f.req<int>("range"), p);
  throw ConfigError("connectivity must be 'nn' or 'spread_out'");
}

std::vector<Point> read_points_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open points file: " + path);
  int d = 0;
  uint64_t n = 0;
  if (!(in >> d >> n)) throw ConfigError("points file must start with 'd n'");
  std::vector<Point> pts;
  for (uint64_t i = 0; i < n; ++i) {
    std::vector<int64_t> c(static_cast<size_t>(d));
    for (int k = 0; k < d; ++k) {
      if (!(in >> c[static_cast<size_t>(k)])) throw ConfigError("points file ended early");
    }
    pts.push_back(Point::of(c));
  }
  return pts;
}

std::string spec_params(const GraphSpec& spec) {
  std::ostringstream os;
  os << "d=" << spec.dim
     << ";conn=" << (spec.connectivity == Connectivity::NearestNeighbor ? "nn" : "so");
  if (spec.connectivity == Connectivity::SpreadOut) os << ";range=" << spec.range;
  os << ";p=" << fmt(spec.p);
  return os.str();
}

Outcome dispatch(const Parsed& cfg, Fields& f);

Parsed parse_config(const json& j, const RunOverrides& overrides, Fields& f) {
  Parsed cfg;
  cfg.kind = f.req<std::string>("kind");
  static const std::set<std::string> kKinds = {
      "tau",         "pcap",         "two_sets",   "one_arm",
      "one_arm_set", "pioneer_tail", "regularity", "equilibrium",
      "ordering_equilibrium", "iic_hit", "ball_capacity", "cap_d4", "calibrate_pc"};
  if (!kKinds.count(cfg.kind)) throw ConfigError("unknown experiment kind '" + cfg.kind + "'");
  const bool needs_p = cfg.kind != "cap_d4" && cfg.kind != "ball_capacity" && cfg.kind != "calibrate_pc";
  cfg.spec = parse_spec(f, needs_p);
  cfg.mc.n = f.get_or<uint64_t>("n", 0);
  cfg.mc.budget = f.get_or<uint64_t>("budget", 1000000);
  const uint64_t cfg_seed = f.get_or<uint64_t>("master_seed", 0);
  cfg.mc.master_seed = overrides.seed_set ? overrides.seed : cfg_seed;
  const int cfg_workers = f.get_or<int>("workers", 1);
  cfg.mc.workers = overrides.workers > 0 ? overrides.workers : cfg_workers;
  cfg.mc.paired = f.get_or<bool>("paired", false);
  const std::string cfg_out = f.get_or<std::string>("out", "");
  cfg.out_dir = !overrides.output_dir.empty() ? overrides.output_dir : cfg_out;
  cfg.echo = j;
  cfg.echo["master_seed"] = cfg.mc.master_seed;
  // The worker count is execution machinery, not part of the experiment
  // identity: results are byte-identical for every worker count, so the
  // echoed config must not carry it.
  cfg.echo.erase("workers");
  return cfg;
}

}  // namespace

// defined after dispatch helpers below
static void write_atomic(const std::string& dir, const std::string& name,
                         const std::string& content, std::string* final_path) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const fs::path tmp = fs::path(dir) / (".tmp." + name);
  const fs::path dst = fs::path(dir) / name;
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out) throw std::runtime_error("failed writing " + tmp.string());
  }
  fs::rename(tmp, dst);
  *final_path = dst.string();
}

namespace {

Outcome dispatch(const Parsed& cfg, Fields& f) {
  Outcome out;
  const GraphSpec& spec = cfg.spec;
  const uint64_t seed = cfg.mc.master_seed;
  const std::string base_params = spec_params(spec);

  auto need_n = [&]() {
    if (cfg.mc.n == 0) throw ConfigError("experiment '" + cfg.kind + "' requires field 'n'");
  };

  if (cfg.kind == "tau") {
    need_n();
    const Point z = point_from(f.require("z"), spec.dim, "z");
    const Estimate e = estimate_tau(spec, z, cfg.mc);
    out.rows.push_back(
        row_of_estimate("tau", base_params + ";z=" + z.str(), e, seed));
    out.results = json{{"tau", estimate_json(e)}, {"z", point_json(z)}};
  } else if (cfg.kind == "pcap") {
    need_n();
    const std::vector<Point> A = points_from(f.require("A"), spec.dim, "A");
    Point z = f.get("z") ? point_from(*f.get("z"), spec.dim, "z")
                         : default_pcap_source(A, spec.dim);
    const RatioEstimate r = estimate_pcap(spec, A, z, cfg.mc);
    const std::string params = base_params + ";|A|=" + std::to_string(A.size()) + ";z=" + z.str();
    out.rows.push_back(row_of_estimate("pcap_numerator", params, r.numerator, seed));
    out.rows.push_back(row_of_estimate("pcap_denominator", params, r.denominator, seed));
    Row ratio_row;
    ratio_row.experiment = "pcap_ratio";
    ratio_row.params = params;
    ratio_row.n = r.denominator.n;
    ratio_row.value = r.ratio;
    ratio_row.se = r.std_error;
    ratio_row.seed = seed;
    out.rows.push_back(ratio_row);
    out.results = json{{"pcap", ratio_json(r)}, {"A", points_json(A)}, {"z", point_json(z)}};
  } else if (cfg.kind == "two_sets") {
    need_n();
    const std::vector<Point> A = points_from(f.require("A"), spec.dim, "A");
    const std::vector<Point> B = points_from(f.require("B"), spec.dim, "B");
    const Point z = point_from(f.require("z"), spec.dim, "z");
    const RatioEstimate r = estimate_two_sets(spec, A, B, z, cfg.mc);
    const std::string params = base_params + ";|A|=" + std::to_string(A.size()) +
                               ";|B|=" + std::to_string(B.size()) + ";z=" + z.str();
    out.rows.push_back(row_of_estimate("two_sets_numerator", params, r.numerator, seed));
    out.rows.push_back(row_of_estimate("two_sets_denominator", params, r.denominator, seed));
    Row ratio_row;
    ratio_row.experiment = "two_sets_ratio";
    ratio_row.params = params;
    ratio_row.n = r.denominator.n;
    ratio_row.value = r.ratio;
    ratio_row.se = r.std_error;
    ratio_row.seed = seed;
    out.rows.push_back(ratio_row);
    out.results = json{{"two_sets", ratio_json(r)}};
  } else if (cfg.kind == "one_arm" || cfg.kind == "one_arm_set") {
    need_n();
    const int64_t r = f.req<int64_t>("r");
    Estimate e;
    std::string params = base_params + ";r=" + std::to_string(r);
    if (cfg.kind == "one_arm_set") {
      const std::vector<Point> A = points_from(f.require("A"), spec.dim, "A");
      e = estimate_one_arm_set(spec, A, r, cfg.mc);
      params += ";|A|=" + std::to_string(A.size());
    } else {
      e = estimate_one_arm(spec, r, cfg.mc);
    }
    out.rows.push_back(row_of_estimate(cfg.kind, params, e, seed));
    out.results = json{{"one_arm", estimate_json(e)},
                       {"r", r},
                       {"r2_scaled", double(r) * double(r) * e.value}};
  } else if (cfg.kind == "pioneer_tail") {
    need_n();
    const int64_t r = f.req<int64_t>("r");
    const int64_t s = f.req<int64_t>("s");
    Point x = f.get("x") ? point_from(*f.get("x"), spec.dim, "x")
                         : Point::axis(spec.dim, 0, r);
    std::vector<int64_t> t_grid;
    if (const json* tg = f.get("t_grid")) {
      for (const auto& v : *tg) t_grid.push_back(v.get<int64_t>());
    } else {
      for (int64_t t = 0; t <= 4 * s * s; ++t) t_grid.push_back(t);
    }
    const PioneerTailTable table = pioneer_tail(spec, r, s, x, t_grid, cfg.mc);
    json jt = json::array();
    for (size_t i = 0; i < table.t_grid.size(); ++i) {
      const std::string params = base_params + ";r=" + std::to_string(r) +
                                 ";s=" + std::to_string(s) + ";x=" + x.str() +
                                 ";t=" + std::to_string(table.t_grid[i]);
      out.rows.push_back(row_of_estimate("pioneer_tail_ccdf", params, table.ccdf[i], seed));
      jt.push_back(json{{"t", table.t_grid[i]},
                        {"ccdf", estimate_json(table.ccdf[i])},
                        {"conditional_ccdf", table.conditional_ccdf[i]},
                        {"ref_s2", table.ref_s2[i]},
                        {"ref_s3", table.ref_s3[i]}});
    }
    out.results = json{{"table", jt},
                       {"contacts", table.contacts},
                       {"fitted_c_s2", table.fitted_c_s2},
                       {"fitted_c_s3", table.fitted_c_s3}};
  } else if (cfg.kind == "regularity") {
    need_n();
    const int64_t r = f.req<int64_t>("r");
    const int64_t K = f.req<int64_t>("K");
    const uint64_t M = f.req<uint64_t>("M");
    const RegularFractionResult res = regular_fraction_experiment(spec, r, K, M, cfg.mc);
    const std::string params = base_params + ";r=" + std::to_string(r) +
                               ";K=" + std::to_string(K) + ";M=" + std::to_string(M);
    out.rows.push_back(row_of_estimate("regularity_event", params, res.event_frequency, seed));
    out.results = json{{"event_frequency", estimate_json(res.event_frequency)},
                       {"reached", res.reached_count},
                       {"mean_pioneers", res.mean_pioneers},
                       {"mean_regular", res.mean_regular},
                       {"mean_line_good", res.mean_line_good}};
  } else if (cfg.kind == "equilibrium" || cfg.kind == "ordering_equilibrium") {
    need_n();
    const std::vector<Point> A = points_from(f.require("A"), spec.dim, "A");
    Point z = f.get("z") ? point_from(*f.get("z"), spec.dim, "z")
                         : default_pcap_source(A, spec.dim);
    EquilibriumResult res;
    if (cfg.kind == "equilibrium") {
      EquilibriumOptions eo;
      eo.mc = cfg.mc;
      eo.max_walk_steps = f.get_or<uint64_t>("max_steps", 1000000);
      res = estimate_equilibrium(spec, A, z, eo);
    } else {
      res = ordering_equilibrium(spec, A, z, cfg.mc);
    }
    json pts = json::array();
    for (size_t i = 0; i < res.points.size(); ++i) {
      const std::string params = base_params + ";z=" + z.str() + ";a=" + res.points[i].str();
      out.rows.push_back(
          row_of_estimate(cfg.kind + "_numerator", params, res.e[i].numerator, seed));
      pts.push_back(json{{"point", point_json(res.points[i])},
                         {"e_hat", res.e[i].ratio},
                         {"se", res.e[i].std_error}});
    }
    out.rows.push_back(row_of_estimate(cfg.kind + "_tau", base_params + ";z=" + z.str(),
                                       res.tau, seed));
    out.results = json{{"points", pts},
                       {"sum", ratio_json(res.sum)},
                       {"tau", estimate_json(res.tau)},
                       {"walk_timeouts", res.walk_timeouts},
                       {"truncated", res.truncated}};
  } else if (cfg.kind == "iic_hit") {
    need_n();
    const std::vector<Point> A = points_from(f.require("A"), spec.dim, "A");
    const Point z = point_from(f.require("z"), spec.dim, "z");
    const int64_t w_norm = f.req<int64_t>("w_norm");
    const IicHitResult res = estimate_iic_hit(spec, A, z, w_norm, cfg.mc);
    const std::string params = base_params + ";z=" + z.str() +
                               ";w_norm=" + std::to_string(w_norm) +
                               ";|A|=" + std::to_string(A.size());
    Row r;
    r.experiment = "iic_hit";
    r.params = params;
    r.n = res.accepted;
    r.hits = res.hits;
    r.truncated = res.truncated_attempts + res.truncated_hits;
    r.value = res.scaled_value;
    r.se = res.scaled_se;
    const WilsonInterval w = wilson_interval(res.hits, res.accepted);
    r.wilson_lo = w.lo * res.scale;
    r.wilson_hi = w.hi * res.scale;
    r.seed = seed;
    out.rows.push_back(r);
    out.results = json{{"attempts", res.attempts},     {"accepted", res.accepted},
                       {"hits", res.hits},             {"acceptance_rate", res.acceptance_rate},
                       {"frequency", res.frequency},   {"frequency_se", res.frequency_se},
                       {"scale", res.scale},           {"scaled_value", res.scaled_value},
                       {"scaled_se", res.scaled_se}};
  } else if (cfg.kind == "ball_capacity") {
    const int64_t r = f.req<int64_t>("r");
    BallCapacityOptions bo;
    bo.tol = f.get_or<double>("tol", 1e-9);
    const CapacityResult res = ball_capacity(r, spec.dim, bo);
    Row row;
    row.experiment = "ball_capacity";
    row.params = base_params + ";r=" + std::to_string(r);
    row.n = res.iterations;
    row.value = res.capacity;
    row.seed = seed;
    out.rows.push_back(row);
    out.results = json{{"capacity", res.capacity},
                       {"energy", res.energy},
                       {"iterations", res.iterations},
                       {"converged", res.converged},
                       {"support_size", res.minimizer.support.size()},
                       {"orbit_compressed", !res.minimizer_multiplicity.empty()}};
  } else if (cfg.kind == "cap_d4") {
    std::vector<Point> A;
    if (const json* pf = f.get("points_file")) {
      A = read_points_file(pf->get<std::string>());
    } else {
      A = points_from(f.require("A"), spec.dim, "A");
    }
    CapacityOptions co;
    co.tol = f.get_or<double>("tol", 1e-9);
    const CapacityResult res = cap_d4(A, spec.dim, co);
    Row row;
    row.experiment = "cap_d4";
    row.params = base_params + ";|A|=" + std::to_string(A.size());
    row.n = res.iterations;
    row.value = res.capacity;
    row.seed = seed;
    out.rows.push_back(row);
    json support = json::array();
    json weights = json::array();
    for (size_t i = 0; i < res.minimizer.support.size(); ++i) {
      support.push_back(point_json(res.minimizer.support[i]));
      weights.push_back(res.minimizer.weights[i]);
    }
    out.results = json{{"capacity", res.capacity}, {"energy", res.energy},
                       {"converged", res.converged}, {"iterations", res.iterations},
                       {"support", support},        {"weights", weights}};
  } else if (cfg.kind == "calibrate_pc") {
    need_n();
    const json& rp = f.require("r_pair");
    const json& br = f.require("bracket");
    if (!rp.is_array() || rp.size() != 2) throw ConfigError("r_pair must be [r1, r2]");
    if (!br.is_array() || br.size() != 2) throw ConfigError("bracket must be [p_lo, p_hi]");
    const int iterations = f.get_or<int>("iterations", 10);
    const CalibrationResult res =
        calibrate_pc(spec, {rp[0].get<int64_t>(), rp[1].get<int64_t>()},
                     {br[0].get<double>(), br[1].get<double>()}, cfg.mc.n, iterations, cfg.mc);
    Row row;
    row.experiment = "calibrate_pc";
    row.params = base_params + ";r_pair=" + rp.dump() + ";bracket=" + br.dump();
    row.n = cfg.mc.n;
    row.value = res.p_c;
    row.seed = seed;
    out.rows.push_back(row);
    json evals = json::array();
    for (const auto& ev : res.evaluations)
      evals.push_back(json{{"p", ev.p}, {"f", ev.f}, {"se", ev.se}});
    out.results = json{{"p_c", res.p_c}, {"evaluations", evals}};
  } else {
    throw ConfigError("unknown experiment kind '" + cfg.kind + "'");
  }
  return out;
}

RunResult finalize(const Parsed& cfg, const std::vector<Row>& rows, const json& results,
                   const std::string& name) {
  RunResult rr;
  rr.csv = csv_of(rows);
  json record{{"version", kVersion}, {"config", cfg.echo}, {"results", results}};
  rr.json = record.dump(2) + "\n";
  if (!cfg.out_dir.empty()) {
    write_atomic(cfg.out_dir, name + ".csv", rr.csv, &rr.csv_path);
    write_atomic(cfg.out_dir, name + ".json", rr.json, &rr.json_path);
  }
  return rr;
}

}  // namespace

RunResult run(const std::string& config_json, const RunOverrides& overrides) {
  json j;
  try {
    j = json::parse(config_json);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  Fields f(j, j.value("kind", std::string("?")));
  Parsed cfg = parse_config(j, overrides, f);
  Outcome out = dispatch(cfg, f);
  f.finish();
  return finalize(cfg, out.rows, out.results, cfg.kind);
}

namespace {

struct GridAxis {
  std::string param;
  std::vector<json> values;
};

GridAxis parse_grid(const std::string& spec) {
  const size_t eq = spec.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 >= spec.size())
    throw ConfigError("grid must look like param=v1,v2,...");
  GridAxis axis;
  axis.param = spec.substr(0, eq);
  std::string rest = spec.substr(eq + 1);
  std::istringstream is(rest);
  std::string tok;
  while (std::getline(is, tok, ',')) {
    try {
      axis.values.push_back(json::parse(tok));
    } catch (const json::exception&) {
      throw ConfigError("grid value '" + tok + "' is not a JSON scalar");
    }
  }
  if (axis.values.empty()) throw ConfigError("grid has no values");
  return axis;
}

void apply_param(json& j, const std::string& param, const json& value, int dim) {
  // z_norm and w_axis_norm place axis-aligned points; other params set the
  // homonymous config field.
  if (param == "z_norm") {
    json arr = json::array();
    for (int i = 0; i < dim - 1; ++i) arr.push_back(0);
    arr.push_back(value.get<int64_t>());
    j["z"] = arr;
    return;
  }
  j[param] = value;
}

}  // namespace

RunResult sweep(const std::string& config_json, const std::vector<std::string>& grids,
                const RunOverrides& overrides) {
  if (grids.empty() || grids.size() > 2)
    throw ConfigError("sweep requires one or two --grid parameters");
  json base;
  try {
    base = json::parse(config_json);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!base.is_object()) throw ConfigError("config must be a JSON object");
  const int dim = base.value("dimension", 0);
  std::vector<GridAxis> axes;
  for (const std::string& g : grids) axes.push_back(parse_grid(g));

  const uint64_t base_seed =
      overrides.seed_set ? overrides.seed : base.value("master_seed", uint64_t(0));
  std::string out_dir = !overrides.output_dir.empty()
                            ? overrides.output_dir
                            : base.value("out", std::string());

  std::vector<std::string> csv_blocks;
  json records = json::array();
  uint64_t combo = 0;
  const size_t n0 = axes[0].values.size();
  const size_t n1 = axes.size() > 1 ? axes[1].values.size() : 1;
  for (size_t i = 0; i < n0; ++i) {
    for (size_t k = 0; k < n1; ++k) {
      json j = base;
      j.erase("out");  // per-combination outputs are not written separately
      apply_param(j, axes[0].param, axes[0].values[i], dim);
      if (axes.size() > 1) apply_param(j, axes[1].param, axes[1].values[k], dim);
      // first combination keeps the base seed (a size-1 sweep equals a run);
      // later combinations get distinct derived seeds
      j["master_seed"] = combo == 0 ? base_seed : rng::splitmix64(base_seed ^ (0xC0FFEEull + combo));
      RunOverrides ro;
      ro.workers = overrides.workers;
      RunResult one = run(j.dump(), ro);
      if (csv_blocks.empty()) {
        csv_blocks.push_back(one.csv);
      } else {
        // drop the header line of subsequent blocks
        const size_t nl = one.csv.find('\n');
        csv_blocks.push_back(one.csv.substr(nl + 1));
      }
      records.push_back(json::parse(one.json));
      ++combo;
    }
  }

  RunResult rr;
  for (const std::string& b : csv_blocks) rr.csv += b;
  json doc{{"version", kVersion}, {"sweep", records}};
  rr.json = doc.dump(2) + "\n";
  if (!out_dir.empty()) {
    write_atomic(out_dir, "sweep.csv", rr.csv, &rr.csv_path);
    write_atomic(out_dir, "sweep.json", rr.json, &rr.json_path);
  }
  return rr;
}

std::string oracle_enumerate(const std::string& request_json) {
  json j;
  try {
    j = json::parse(request_json);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("oracle request is not valid JSON: ") + e.what());
  }
  Fields f(j, "oracle");
  GraphSpec spec = parse_spec(f, true);

  const json& reg = f.require("region");
  if (!reg.is_object() || reg.value("kind", "") != "box")
    throw ConfigError("oracle region must be {\"kind\":\"box\",...}");
  const Point center = point_from(reg.at("center"), spec.dim, "region.center");
  const Region region = Region::box(center, reg.at("radius").get<int64_t>());

  oracle::Request req;
  req.source = point_from(f.require("source"), spec.dim, "source");
  if (const json* t = f.get("targets")) req.targets = points_from(*t, spec.dim, "targets");
  if (const json* fe = f.get("feature_edge")) {
    if (!fe->is_array() || fe->size() != 2) throw ConfigError("feature_edge must be [a, b]");
    req.feature_edge = canonical_edge(point_from((*fe)[0], spec.dim, "feature_edge[0]"),
                                      point_from((*fe)[1], spec.dim, "feature_edge[1]"), spec);
  }
  req.cluster_law = f.get_or<bool>("cluster_law", false);
  req.cluster_law_conditional = f.get_or<bool>("cluster_law_conditional", false);
  f.finish();

  const oracle::TinyGraph g = oracle::build_tiny_graph(spec, region);
  const oracle::Result res = oracle::enumerate(g, req);

  json out{{"p_connect", res.p_connect},
           {"expected_cluster_size", res.expected_cluster_size},
           {"edge_count", res.edge_count},
           {"pioneer_distribution", res.pioneer_distribution}};
  if (req.feature_edge) out["p_feature_given_connect"] = res.p_feature_given_connect;
  if (req.cluster_law) {
    json law = json::array();
    for (const auto& [shape, prob] : res.cluster_law)
      law.push_back(json{{"mask", shape}, {"probability", prob}});
    out["cluster_law"] = law;
    json pts = json::array();
    for (const Point& p : g.points) pts.push_back(point_json(p));
    out["points"] = pts;
  }
  return out.dump(2) + "\n";
}

}  // namespace percap::runner
