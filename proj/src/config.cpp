#include "wegnerlab/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace wegnerlab {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::InvalidArgument, path + ": " + what);
}

// Strict view of a JSON object: every key must be read, and finish()
// reports the first one that was not.
class Obj {
 public:
  Obj(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_, "expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const Json& at(const std::string& key) {
    if (!j_.contains(key)) fail(path_, "missing key '" + key + "'");
    seen_.insert(key);
    return j_.at(key);
  }

  const Json* opt(const std::string& key) {
    if (!j_.contains(key)) return nullptr;
    seen_.insert(key);
    const Json& v = j_.at(key);
    return v.is_null() ? nullptr : &v;
  }

  std::string sub(const std::string& key) const { return path_ + "." + key; }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) fail(path_, "unknown key '" + it.key() + "'");
    }
  }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

double num(const Json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

long long integer(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<long long>();
}

std::uint64_t seed_value(const Json& j, const std::string& path) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<long long>() >= 0) return static_cast<std::uint64_t>(j.get<long long>());
  fail(path, "expected a nonnegative 64-bit integer");
}

std::vector<double> num_list(const Json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t k = 0; k < j.size(); ++k) out.push_back(num(j[k], path + "[" + std::to_string(k) + "]"));
  return out;
}

std::vector<int> int_list(const Json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of integers");
  std::vector<int> out;
  for (std::size_t k = 0; k < j.size(); ++k) {
    out.push_back(static_cast<int>(integer(j[k], path + "[" + std::to_string(k) + "]")));
  }
  return out;
}

std::vector<std::pair<double, double>> pair_list(const Json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of [x, y] pairs");
  std::vector<std::pair<double, double>> out;
  for (std::size_t k = 0; k < j.size(); ++k) {
    const std::string p = path + "[" + std::to_string(k) + "]";
    if (!j[k].is_array() || j[k].size() != 2) fail(p, "expected a pair [x, y]");
    out.emplace_back(num(j[k][0], p), num(j[k][1], p));
  }
  return out;
}

Json pairs_to_json(const std::vector<std::pair<double, double>>& v) {
  Json a = Json::array();
  for (const auto& [x, y] : v) a.push_back({x, y});
  return a;
}

std::string str(const Json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

MeasureSpec measure_at(const Json& j, const std::string& path) {
  try {
    return measure_from_json(j);
  } catch (const Error& e) {
    fail(path, e.what());
  }
}

PotentialSpec potential_from_json(const Json& j, const std::string& path) {
  Obj o(j, path);
  PotentialSpec u;
  if (auto* k = o.opt("kind")) {
    const std::string kind = str(*k, o.sub("kind"));
    if (kind == "cosine_bump") {
      u.kind = PotentialSpec::Kind::CosineBump;
    } else if (kind == "box") {
      u.kind = PotentialSpec::Kind::Box;
    } else {
      fail(o.sub("kind"), "unknown potential kind '" + kind + "' (cosine_bump, box)");
    }
  }
  if (auto* r = o.opt("radius")) u.radius = num(*r, o.sub("radius"));
  if (auto* h = o.opt("height")) u.height = num(*h, o.sub("height"));
  o.finish();
  return u;
}

ModelSpec model_from_json(const Json& j, const std::string& path) {
  Obj o(j, path);
  ModelSpec m;
  if (auto* v = o.opt("dimension")) m.dimension = static_cast<int>(integer(*v, o.sub("dimension")));
  if (auto* v = o.opt("box_sizes")) m.box_sizes = int_list(*v, o.sub("box_sizes"));
  if (auto* v = o.opt("points_per_cell")) m.points_per_cell = static_cast<int>(integer(*v, o.sub("points_per_cell")));
  if (auto* v = o.opt("u")) m.u = potential_from_json(*v, o.sub("u"));
  if (auto* v = o.opt("v0")) {
    const std::vector<double> s = num_list(*v, o.sub("v0"));
    m.v0 = Eigen::Map<const Eigen::VectorXd>(s.data(), static_cast<Index>(s.size()));
  }
  if (auto* v = o.opt("kinetic_scale")) m.kinetic_scale = num(*v, o.sub("kinetic_scale"));
  if (auto* v = o.opt("flux_per_plaquette")) {
    Obj f(*v, o.sub("flux_per_plaquette"));
    FluxSpec flux;
    flux.p = static_cast<long>(integer(f.at("p"), f.sub("p")));
    flux.q = static_cast<long>(integer(f.at("q"), f.sub("q")));
    f.finish();
    m.flux = flux;
  }
  if (auto* v = o.opt("landau_index")) m.landau_index = static_cast<int>(integer(*v, o.sub("landau_index")));
  if (auto* v = o.opt("dense_cap")) m.dense_cap = static_cast<Index>(integer(*v, o.sub("dense_cap")));
  o.finish();
  return m;
}

Expectation expectation_from_json(const Json& j, const std::string& path) {
  Obj o(j, path);
  Expectation e{num(o.at("value"), o.sub("value")), num(o.at("tolerance"), o.sub("tolerance"))};
  o.finish();
  return e;
}

ExperimentConfig experiment_at(const Json& j, const std::string& path, std::string* label) {
  Obj o(j, path);
  ExperimentConfig c;
  if (auto* v = o.opt("label")) {
    if (label == nullptr) fail(o.sub("label"), "labels are only allowed in experiment sections");
    *label = str(*v, o.sub("label"));
  }
  if (auto* v = o.opt("model")) c.model = model_from_json(*v, o.sub("model"));
  c.measure = measure_at(o.at("measure"), o.sub("measure"));
  if (auto* v = o.opt("energy_E0")) c.energy_E0 = num(*v, o.sub("energy_E0"));
  if (auto* v = o.opt("epsilons")) c.epsilons = num_list(*v, o.sub("epsilons"));
  if (auto* v = o.opt("energy_grid")) c.energy_grid = num_list(*v, o.sub("energy_grid"));
  if (auto* v = o.opt("n_realizations")) c.n_realizations = static_cast<int>(integer(*v, o.sub("n_realizations")));
  if (auto* v = o.opt("master_seed")) c.master_seed = seed_value(*v, o.sub("master_seed"));
  if (auto* v = o.opt("workers")) c.workers = static_cast<int>(integer(*v, o.sub("workers")));
  if (auto* v = o.opt("expect")) {
    Obj e(*v, o.sub("expect"));
    if (auto* x = e.opt("volume_exponent")) c.expect.volume_exponent = expectation_from_json(*x, e.sub("volume_exponent"));
    if (auto* x = e.opt("epsilon_exponent")) c.expect.epsilon_exponent = expectation_from_json(*x, e.sub("epsilon_exponent"));
    if (auto* x = e.opt("plateau")) {
      if (!x->is_boolean()) fail(e.sub("plateau"), "expected a boolean");
      c.expect.plateau = x->get<bool>();
    }
    e.finish();
  }
  o.finish();
  try {
    c.validate();
  } catch (const Error& err) {
    fail(path, err.what());
  }
  return c;
}

ResolventSuiteConfig resolvent_from_json(const Json& j, const std::string& path) {
  Obj o(j, path);
  ResolventSuiteConfig r;
  if (auto* v = o.opt("cells")) r.cells = static_cast<int>(integer(*v, o.sub("cells")));
  if (auto* v = o.opt("site")) r.site = static_cast<int>(integer(*v, o.sub("site")));
  if (auto* v = o.opt("measure")) r.measure = measure_at(*v, o.sub("measure"));
  if (auto* v = o.opt("energy_E0")) r.energy_E0 = num(*v, o.sub("energy_E0"));
  if (auto* v = o.opt("epsilons")) r.epsilons = num_list(*v, o.sub("epsilons"));
  if (auto* v = o.opt("n_realizations")) r.n_realizations = static_cast<int>(integer(*v, o.sub("n_realizations")));
  o.finish();
  if (r.cells < 2 || r.site < 0 || r.site >= r.cells) fail(path, "site must lie in [0, cells)");
  for (double e : r.epsilons) {
    if (!(e > 0.0 && e <= 1.0)) fail(o.sub("epsilons"), "epsilon outside the admissible window range (0, 1]");
  }
  if (r.n_realizations < 8) fail(o.sub("n_realizations"), "must be at least 8");
  return r;
}

void positive(int v, const std::string& path) {
  if (v < 0) fail(path, "must be nonnegative");
}

std::vector<LabeledExperiment> experiments_at(const Json& j, const std::string& path) {
  std::vector<LabeledExperiment> out;
  if (j.is_array()) {
    for (std::size_t k = 0; k < j.size(); ++k) {
      LabeledExperiment e;
      e.config = experiment_at(j[k], path + "[" + std::to_string(k) + "]", &e.label);
      out.push_back(std::move(e));
    }
  } else {
    LabeledExperiment e;
    e.config = experiment_at(j, path, &e.label);
    out.push_back(std::move(e));
  }
  return out;
}

const std::set<std::string> kSections{"wegner", "ids", "landau", "averaging", "tracebounds"};

}  // namespace

Json measure_to_json(const MeasureSpec& measure) {
  return std::visit(
      [](const auto& m) -> Json {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, UniformDensity>) {
          return {{"kind", "uniform"}, {"lo", m.lo}, {"hi", m.hi}};
        } else if constexpr (std::is_same_v<T, PiecewiseLinearDensity>) {
          return {{"kind", "piecewise_linear"}, {"knots", pairs_to_json(m.knots)}};
        } else if constexpr (std::is_same_v<T, CantorMeasure>) {
          return {{"kind", "cantor"}, {"depth", m.depth}};
        } else if constexpr (std::is_same_v<T, Atomic>) {
          return {{"kind", "atomic"}, {"atoms", pairs_to_json(m.atoms)}};
        } else if constexpr (std::is_same_v<T, ToeplitzCorrelated>) {
          Json coeffs = Json::array();
          for (const auto& c : m.coeffs) {
            coeffs.push_back({{"offset", {c.offset[0], c.offset[1]}}, {"alpha", c.alpha}});
          }
          return {{"kind", "toeplitz"}, {"base", measure_to_json(*m.base)}, {"coeffs", coeffs}};
        } else {
          return {{"kind", "affine"}, {"base", measure_to_json(*m.base)}, {"scale", m.scale}, {"shift", m.shift}};
        }
      },
      measure.variant());
}

MeasureSpec measure_from_json(const Json& j) {
  Obj o(j, "measure");
  const std::string kind = str(o.at("kind"), "measure.kind");
  MeasureSpec out = [&]() -> MeasureSpec {
    if (kind == "uniform") return MeasureSpec::uniform(num(o.at("lo"), "measure.lo"), num(o.at("hi"), "measure.hi"));
    if (kind == "piecewise_linear") return MeasureSpec::piecewise_linear(pair_list(o.at("knots"), "measure.knots"));
    if (kind == "cantor") return MeasureSpec::cantor(static_cast<int>(integer(o.at("depth"), "measure.depth")));
    if (kind == "atomic") return MeasureSpec::atomic(pair_list(o.at("atoms"), "measure.atoms"));
    if (kind == "toeplitz") {
      MeasureSpec base = measure_from_json(o.at("base"));
      const Json& cj = o.at("coeffs");
      if (!cj.is_array()) fail("measure.coeffs", "expected an array");
      std::vector<GammaCoefficient> coeffs;
      for (std::size_t k = 0; k < cj.size(); ++k) {
        const std::string p = "measure.coeffs[" + std::to_string(k) + "]";
        Obj c(cj[k], p);
        GammaCoefficient g{{0, 0}, num(c.at("alpha"), p + ".alpha")};
        const Json& off = c.at("offset");
        if (off.is_number_integer()) {
          g.offset[0] = static_cast<int>(off.get<long long>());
        } else if (off.is_array() && off.size() >= 1 && off.size() <= 2) {
          for (std::size_t a = 0; a < off.size(); ++a) g.offset[a] = static_cast<int>(integer(off[a], p + ".offset"));
        } else {
          fail(p + ".offset", "expected an integer or an array of one or two integers");
        }
        c.finish();
        coeffs.push_back(g);
      }
      return MeasureSpec::toeplitz(std::move(base), std::move(coeffs));
    }
    if (kind == "affine") {
      return MeasureSpec::affine(measure_from_json(o.at("base")), num(o.at("scale"), "measure.scale"),
                                 num(o.at("shift"), "measure.shift"));
    }
    fail("measure.kind", "unknown measure kind '" + kind +
                             "' (uniform, piecewise_linear, cantor, atomic, toeplitz, affine)");
  }();
  o.finish();
  return out;
}

ExperimentConfig experiment_from_json(const Json& j) { return experiment_at(j, "config", nullptr); }

AveragingSuiteConfig averaging_from_json(const Json& j) {
  Obj o(j, "averaging");
  AveragingSuiteConfig c;
  if (auto* v = o.opt("seed")) c.seed = seed_value(*v, o.sub("seed"));
  if (auto* v = o.opt("instances")) c.instances = static_cast<int>(integer(*v, o.sub("instances")));
  if (auto* v = o.opt("dimension")) c.dimension = static_cast<int>(integer(*v, o.sub("dimension")));
  if (auto* v = o.opt("b_min")) c.b_min = num(*v, o.sub("b_min"));
  if (auto* v = o.opt("y_grid")) c.y_grid = static_cast<int>(integer(*v, o.sub("y_grid")));
  if (auto* v = o.opt("singular_instances")) c.singular_instances = static_cast<int>(integer(*v, o.sub("singular_instances")));
  if (auto* v = o.opt("lambdas")) c.lambdas = num_list(*v, o.sub("lambdas"));
  if (auto* v = o.opt("dissipative_instances")) c.dissipative_instances = static_cast<int>(integer(*v, o.sub("dissipative_instances")));
  if (auto* v = o.opt("arctan_instances")) c.arctan_instances = static_cast<int>(integer(*v, o.sub("arctan_instances")));
  if (auto* v = o.opt("arctan_dimension")) c.arctan_dimension = static_cast<int>(integer(*v, o.sub("arctan_dimension")));
  if (auto* v = o.opt("ell_bs")) c.ell_bs = num_list(*v, o.sub("ell_bs"));
  if (o.has("resolvent")) {
    const Json* v = o.opt("resolvent");
    c.resolvent = v ? std::optional(resolvent_from_json(*v, o.sub("resolvent"))) : std::nullopt;
  }
  if (auto* v = o.opt("workers")) c.workers = static_cast<int>(integer(*v, o.sub("workers")));
  o.finish();
  if (c.instances < 1) fail(o.sub("instances"), "must be at least 1");
  if (c.dimension < 1 || c.arctan_dimension < 1) fail("averaging", "dimensions must be positive");
  if (!(c.b_min > 0.0 && c.b_min <= 1.0)) fail(o.sub("b_min"), "must lie in (0, 1]");
  if (c.y_grid < 2) fail(o.sub("y_grid"), "must be at least 2");
  positive(c.singular_instances, o.sub("singular_instances"));
  positive(c.dissipative_instances, o.sub("dissipative_instances"));
  positive(c.arctan_instances, o.sub("arctan_instances"));
  if (c.dissipative_instances > 0 && c.lambdas.empty()) fail(o.sub("lambdas"), "must not be empty");
  for (double l : c.lambdas) {
    if (!(l > 0.0)) fail(o.sub("lambdas"), "lambda must be positive");
  }
  for (double b : c.ell_bs) {
    if (!(b > 0.0)) fail(o.sub("ell_bs"), "b must be positive");
  }
  return c;
}

TraceSuiteConfig tracebounds_from_json(const Json& j) {
  Obj o(j, "tracebounds");
  TraceSuiteConfig c;
  if (auto* v = o.opt("seed")) c.seed = seed_value(*v, o.sub("seed"));
  if (auto* v = o.opt("cells")) c.cells = static_cast<int>(integer(*v, o.sub("cells")));
  if (auto* v = o.opt("shift_M")) c.shift_M = num(*v, o.sub("shift_M"));
  if (auto* v = o.opt("separations")) c.separations = int_list(*v, o.sub("separations"));
  if (auto* v = o.opt("kernel_separations")) c.kernel_separations = int_list(*v, o.sub("kernel_separations"));
  if (auto* v = o.opt("bump_kind")) {
    const std::string k = str(*v, o.sub("bump_kind"));
    if (k == "exponential") {
      c.bump_kind = BumpSpec::Kind::Exponential;
    } else if (k == "polynomial") {
      c.bump_kind = BumpSpec::Kind::Polynomial;
    } else {
      fail(o.sub("bump_kind"), "expected 'exponential' or 'polynomial'");
    }
  }
  if (auto* v = o.opt("bump_order")) c.bump_order = static_cast<int>(integer(*v, o.sub("bump_order")));
  if (auto* v = o.opt("k0_instances")) c.k0_instances = static_cast<int>(integer(*v, o.sub("k0_instances")));
  if (auto* v = o.opt("trace_instances")) c.trace_instances = static_cast<int>(integer(*v, o.sub("trace_instances")));
  if (auto* v = o.opt("trace_dimension")) c.trace_dimension = static_cast<int>(integer(*v, o.sub("trace_dimension")));
  if (auto* v = o.opt("trace_rank")) c.trace_rank = static_cast<int>(integer(*v, o.sub("trace_rank")));
  if (auto* v = o.opt("volume_sizes")) c.volume_sizes = int_list(*v, o.sub("volume_sizes"));
  if (auto* v = o.opt("volume_points_per_cell")) c.volume_points_per_cell = static_cast<int>(integer(*v, o.sub("volume_points_per_cell")));
  if (auto* v = o.opt("volume_bump_radius")) c.volume_bump_radius = num(*v, o.sub("volume_bump_radius"));
  if (auto* v = o.opt("volume_m")) c.volume_m = static_cast<int>(integer(*v, o.sub("volume_m")));
  if (auto* v = o.opt("ucp_sizes")) c.ucp_sizes = int_list(*v, o.sub("ucp_sizes"));
  if (auto* v = o.opt("ucp_points_per_cell")) c.ucp_points_per_cell = static_cast<int>(integer(*v, o.sub("ucp_points_per_cell")));
  if (auto* v = o.opt("workers")) c.workers = static_cast<int>(integer(*v, o.sub("workers")));
  o.finish();
  if (c.cells < 4) fail(o.sub("cells"), "must be at least 4");
  if (!(c.shift_M > 0.0)) fail(o.sub("shift_M"), "must be positive");
  if (c.separations.size() < 4) fail(o.sub("separations"), "an exponential fit needs at least 4 separations");
  if (c.kernel_separations.size() < 2) fail(o.sub("kernel_separations"), "needs at least 2 separations");
  for (int s : c.separations) {
    if (s < 1 || s > c.cells / 2) fail(o.sub("separations"), "separations must lie in [1, cells/2]");
  }
  for (int s : c.kernel_separations) {
    if (s < 1 || s > c.cells / 2) fail(o.sub("kernel_separations"), "separations must lie in [1, cells/2]");
  }
  positive(c.k0_instances, o.sub("k0_instances"));
  positive(c.trace_instances, o.sub("trace_instances"));
  if (c.trace_rank < 1 || c.trace_rank > c.trace_dimension) fail(o.sub("trace_rank"), "must lie in [1, trace_dimension]");
  if (c.volume_m < 0) fail(o.sub("volume_m"), "must be nonnegative");
  for (int L : c.volume_sizes) {
    if (L < 2) fail(o.sub("volume_sizes"), "sizes must be at least 2");
  }
  for (int L : c.ucp_sizes) {
    if (L < 2) fail(o.sub("ucp_sizes"), "sizes must be at least 2");
  }
  if (c.volume_points_per_cell < 1 || c.ucp_points_per_cell < 1) fail("tracebounds", "points per cell must be positive");
  return c;
}

void RunConfig::override_seed(std::uint64_t seed) {
  for (auto* v : {&wegner, &ids, &landau}) {
    for (auto& e : *v) e.config.master_seed = seed;
  }
  if (averaging) averaging->seed = seed;
  if (tracebounds) tracebounds->seed = seed;
}

void RunConfig::override_workers(int workers) {
  for (auto* v : {&wegner, &ids, &landau}) {
    for (auto& e : *v) e.config.workers = workers;
  }
  if (averaging) averaging->workers = workers;
  if (tracebounds) tracebounds->workers = workers;
}

RunConfig run_config_from_json(const Json& j, const std::string& subcommand) {
  if (!j.is_object()) fail("config", "expected an object");
  RunConfig rc;
  auto section = [&](const std::string& name) -> const Json* {
    if (j.contains(name)) return &j.at(name);
    return nullptr;
  };
  if (subcommand == "verify-all") {
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!kSections.count(it.key())) fail("config", "unknown section '" + it.key() + "'");
    }
    if (auto* s = section("wegner")) rc.wegner = experiments_at(*s, "wegner");
    if (auto* s = section("ids")) rc.ids = experiments_at(*s, "ids");
    if (auto* s = section("landau")) rc.landau = experiments_at(*s, "landau");
    if (auto* s = section("averaging")) rc.averaging = averaging_from_json(*s);
    if (auto* s = section("tracebounds")) rc.tracebounds = tracebounds_from_json(*s);
    return rc;
  }
  if (!kSections.count(subcommand)) fail("subcommand", "unknown subcommand '" + subcommand + "'");
  const Json* s = section(subcommand);
  const Json& body = s ? *s : j;
  if (subcommand == "wegner") rc.wegner = experiments_at(body, "wegner");
  if (subcommand == "ids") rc.ids = experiments_at(body, "ids");
  if (subcommand == "landau") rc.landau = experiments_at(body, "landau");
  if (subcommand == "averaging") rc.averaging = averaging_from_json(body);
  if (subcommand == "tracebounds") rc.tracebounds = tracebounds_from_json(body);
  return rc;
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open config file '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::InvalidArgument, "config file '" + path + "' is not valid JSON: " + e.what());
  }
}

}  // namespace wegnerlab
