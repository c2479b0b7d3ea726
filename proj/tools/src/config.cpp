#include "gapkin_cli/config.hpp"
#include "gapkin_cli/acceptance.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace gapkin::cli {

namespace {

// A mapping node plus the keys consumed from it; finish() rejects the rest.
class Section {
public:
  Section(YAML::Node node, std::string path) : node_(std::move(node)), path_(std::move(path))
  {
    if (node_ && !node_.IsNull() && !node_.IsMap()) fail("expected a mapping");
  }

  template <class T>
  void get(const char* key, T& out)
  {
    seen_.insert(key);
    if (!node_ || node_.IsNull() || !node_[key]) return;
    try {
      out = node_[key].template as<T>();
    } catch (const YAML::Exception&) {
      fail(std::string("bad value for '") + key + "'");
    }
  }

  template <class T>
  void get_list(const char* key, std::vector<T>& out)
  {
    seen_.insert(key);
    if (!node_ || node_.IsNull() || !node_[key]) return;
    YAML::Node v = node_[key];
    try {
      if (v.IsSequence()) {
        out.clear();
        for (const auto& e : v) out.push_back(e.template as<T>());
      } else {
        out = {v.template as<T>()};
      }
    } catch (const YAML::Exception&) {
      fail(std::string("bad value for '") + key + "'");
    }
  }

  Section sub(const char* key)
  {
    seen_.insert(key);
    YAML::Node child;
    if (node_ && node_.IsMap() && node_[key]) child = node_[key];
    return Section(child, path_.empty() ? key : path_ + "." + key);
  }

  YAML::Node raw(const char* key)
  {
    seen_.insert(key);
    if (node_ && node_.IsMap() && node_[key]) return node_[key];
    return {};
  }

  void finish() const
  {
    if (!node_ || !node_.IsMap()) return;
    for (const auto& kv : node_) {
      auto k = kv.first.as<std::string>();
      if (!seen_.count(k)) fail("unknown key '" + k + "'");
    }
  }

  [[noreturn]] void fail(const std::string& what) const
  {
    throw ConfigError((path_.empty() ? std::string("config") : path_) + ": " + what);
  }

private:
  YAML::Node node_;
  std::string path_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& what)
{
  if (!ok) throw ConfigError(what);
}

template <class T>
bool one_of(const T& v, std::initializer_list<T> set)
{
  return std::find(set.begin(), set.end(), v) != set.end();
}

void read_grid(Section s, SpectralGrid& g)
{
  s.get("boundary_nodes", g.boundary_nodes);
  s.get("speed_nodes", g.speed_nodes);
  s.get("direction_nodes", g.direction_nodes);
  s.get("panel_order", g.panel_order);
  s.get("dense_cap", g.dense_cap);
  s.get("power_tol", g.power_tol);
  s.get("power_max_iter", g.power_max_iter);
  s.finish();
}

void check_grid(const SpectralGrid& g, const std::string& where)
{
  require(g.boundary_nodes >= 4, where + ".boundary_nodes must be >= 4");
  require(g.speed_nodes >= 2, where + ".speed_nodes must be >= 2");
  require(g.direction_nodes >= 2, where + ".direction_nodes must be >= 2");
  require(g.panel_order >= 1 && g.panel_order <= 64, where + ".panel_order must be in [1, 64]");
  require(g.power_tol > 0 && g.power_max_iter > 0, where + ": power iteration settings must be positive");
}

void validate(const RunConfig& c)
{
  const auto& d = c.domain;
  require(one_of<std::string>(d.type, {"disk", "ball", "ellipse"}), "domain.type must be disk, ball or ellipse");
  require(d.radius > 0, "domain.radius must be positive");
  require(d.a > 0 && d.b > 0, "domain.a and domain.b must be positive");

  const auto& v = c.velocity;
  require(v.r0 > 0 && v.R0 > v.r0, "velocity: need 0 < r0 < R0");
  require(one_of<std::string>(v.weight, {"power", "stretched", "gaussian"}),
          "velocity.weight must be power, stretched or gaussian");
  require(v.s > 0, "velocity.s must be positive");
  require(v.radial_nodes >= 4, "velocity.radial_nodes must be >= 4");

  const auto& w = c.wall;
  require(one_of<std::string>(w.kernel, {"maxwell", "uniform"}), "wall.kernel must be maxwell or uniform");
  require(!w.theta.empty() && !w.alpha.empty(), "wall.theta and wall.alpha must not be empty");
  for (double t : w.theta) require(t > 0, "wall.theta must be positive");
  for (double a : w.alpha) require(a >= 0 && a <= 1, "wall.alpha must lie in [0, 1]");
  require(one_of<std::string>(w.reflection, {"specular", "bounceback"}),
          "wall.reflection must be specular or bounceback");

  const auto& s = c.sim;
  require(s.particles >= 1 && s.batch >= 1, "sim.particles and sim.batch must be >= 1");
  require(s.t_end >= 0 && s.record_dt > 0, "sim: need t_end >= 0 and record_dt > 0");
  require(one_of<std::string>(s.mode, {"evolve", "absorbing"}), "sim.mode must be evolve or absorbing");
  require(s.max_generation >= 1, "sim.max_generation must be >= 1");
  require(s.rebound_checks >= 0, "sim.rebound_checks must be >= 0");
  for (int n : s.grid) require(n >= 1, "sim.grid entries must be >= 1");
  require(one_of<std::string>(s.initial.type, {"uniform", "pointcloud", "invariant"}),
          "sim.initial.type must be uniform, pointcloud or invariant");
  require(s.initial.type != "pointcloud" || !s.initial.points.empty(), "sim.initial.points is empty");
  require(std::abs(s.initial.tilt) <= 1, "sim.initial.tilt must lie in [-1, 1]");
  require(s.fit.t_max > s.fit.t_min, "sim.fit: need t_min < t_max");

  check_grid(c.spectral.grid, "spectral.grid");
  check_grid(c.spectral.full_grid, "spectral.full_grid");
  const auto& sc = c.spectral.scan;
  require(sc.re_max > sc.re_min, "spectral.scan: need re_min < re_max");
  require(sc.step > 0 && sc.im_max >= 0, "spectral.scan: need step > 0 and im_max >= 0");
  require(sc.flag_tol > 0 && sc.root_tol > 0, "spectral.scan: tolerances must be positive");

  require(c.geometry.panels >= 2 && c.geometry.flatness_samples >= 8, "geometry: too few panels or samples");

  const auto& l = c.laplace;
  require(l.particles >= 2, "laplace.particles must be >= 2");
  require(!l.n.empty() && !l.lambda.empty(), "laplace.n and laplace.lambda must not be empty");
  for (int n : l.n) require(n >= 0 && n <= 20, "laplace.n entries must lie in [0, 20]");
  for (double x : l.lambda) require(x > 0, "laplace.lambda entries must be positive");
  require(std::abs(l.tilt) <= 1, "laplace.tilt must lie in [-1, 1]");
  require(l.rel_tol > 0, "laplace.rel_tol must be positive");

  const auto& a = c.acceptance;
  const auto& names = check_names();
  for (const auto& n : a.only)
    require(std::find(names.begin(), names.end(), n) != names.end(), "acceptance.only: unknown check '" + n + "'");
  const auto tol = default_tolerances();
  for (const auto& [k, x] : a.tolerances) {
    require(tol.count(k) > 0, "acceptance.tolerances: unknown tolerance '" + k + "'");
    require(x >= 0, "acceptance.tolerances." + k + " must be >= 0");
  }
  require(a.rebound_particles >= 1 && a.stationarity_particles >= 100 && a.laplace_particles >= 2 &&
              a.decay_particles >= 1000 && a.determinism_particles >= 1,
          "acceptance: particle counts too small");
}

RunConfig from_node(const YAML::Node& root)
{
  RunConfig c;
  Section top(root, "");
  top.get("experiment", c.experiment);
  top.get("seed", c.seed);
  top.get("output", c.output);

  {
    Section s = top.sub("domain");
    s.get("type", c.domain.type);
    s.get("radius", c.domain.radius);
    s.get("a", c.domain.a);
    s.get("b", c.domain.b);
    s.finish();
  }
  {
    Section s = top.sub("velocity");
    s.get("r0", c.velocity.r0);
    s.get("R0", c.velocity.R0);
    s.get("weight", c.velocity.weight);
    s.get("m", c.velocity.m);
    s.get("alpha", c.velocity.alpha);
    s.get("s", c.velocity.s);
    s.get("beta", c.velocity.beta);
    s.get("radial_nodes", c.velocity.radial_nodes);
    s.finish();
  }
  {
    Section s = top.sub("wall");
    s.get("kernel", c.wall.kernel);
    s.get_list("theta", c.wall.theta);
    s.get_list("alpha", c.wall.alpha);
    s.get("reflection", c.wall.reflection);
    s.finish();
  }
  {
    Section s = top.sub("sim");
    auto& m = c.sim;
    s.get("particles", m.particles);
    s.get("batch", m.batch);
    s.get("t_end", m.t_end);
    s.get("record_dt", m.record_dt);
    s.get("mode", m.mode);
    s.get("max_generation", m.max_generation);
    s.get("rebound_checks", m.rebound_checks);
    std::vector<int> grid(m.grid.begin(), m.grid.end());
    s.get_list("grid", grid);
    if (grid.size() != 4) s.fail("grid needs four entries [n_r, n_phi, n_rho, n_mu]");
    std::copy(grid.begin(), grid.end(), m.grid.begin());
    {
      Section i = s.sub("initial");
      i.get("type", m.initial.type);
      i.get("tilt", m.initial.tilt);
      YAML::Node pts = i.raw("points");
      if (pts && !pts.IsNull()) {
        if (!pts.IsSequence()) i.fail("points must be a list of [x0, x1, x2, v0, v1, v2]");
        for (const auto& p : pts) {
          std::vector<double> row;
          try {
            row = p.as<std::vector<double>>();
          } catch (const YAML::Exception&) {
            i.fail("points must be a list of [x0, x1, x2, v0, v1, v2]");
          }
          if (row.size() != 6) i.fail("each point needs six numbers");
          std::array<double, 6> a{};
          std::copy(row.begin(), row.end(), a.begin());
          m.initial.points.push_back(a);
        }
      }
      i.finish();
    }
    {
      Section f = s.sub("fit");
      f.get("enabled", m.fit.enabled);
      f.get("t_min", m.fit.t_min);
      f.get("t_max", m.fit.t_max);
      f.finish();
    }
    s.finish();
  }
  {
    Section s = top.sub("spectral");
    read_grid(s.sub("grid"), c.spectral.grid);
    read_grid(s.sub("full_grid"), c.spectral.full_grid);
    Section sc = s.sub("scan");
    auto& x = c.spectral.scan;
    sc.get("re_min", x.re_min);
    sc.get("re_max", x.re_max);
    sc.get("im_max", x.im_max);
    sc.get("step", x.step);
    sc.get("flag_tol", x.flag_tol);
    sc.get("root_tol", x.root_tol);
    sc.get("complex", x.complex_plane);
    sc.get("refine", x.refine);
    sc.finish();
    s.finish();
  }
  {
    Section s = top.sub("geometry");
    s.get("panels", c.geometry.panels);
    s.get("flatness_samples", c.geometry.flatness_samples);
    s.finish();
  }
  {
    Section s = top.sub("laplace");
    s.get("particles", c.laplace.particles);
    s.get_list("n", c.laplace.n);
    s.get_list("lambda", c.laplace.lambda);
    s.get("tilt", c.laplace.tilt);
    s.get("rel_tol", c.laplace.rel_tol);
    s.finish();
  }
  {
    Section s = top.sub("acceptance");
    auto& a = c.acceptance;
    s.get_list("only", a.only);
    YAML::Node tol = s.raw("tolerances");
    if (tol && !tol.IsNull()) {
      if (!tol.IsMap()) s.fail("tolerances must be a mapping");
      for (const auto& kv : tol) {
        try {
          a.tolerances[kv.first.as<std::string>()] = kv.second.as<double>();
        } catch (const YAML::Exception&) {
          s.fail("tolerances must map names to numbers");
        }
      }
    }
    s.get("rebound_particles", a.rebound_particles);
    s.get("stationarity_particles", a.stationarity_particles);
    s.get("laplace_particles", a.laplace_particles);
    s.get("decay_particles", a.decay_particles);
    s.get("determinism_particles", a.determinism_particles);
    s.finish();
  }
  top.finish();
  validate(c);
  return c;
}

void emit_grid(YAML::Emitter& e, const char* name, const SpectralGrid& g)
{
  e << YAML::Key << name << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "boundary_nodes" << YAML::Value << g.boundary_nodes;
  e << YAML::Key << "speed_nodes" << YAML::Value << g.speed_nodes;
  e << YAML::Key << "direction_nodes" << YAML::Value << g.direction_nodes;
  e << YAML::Key << "panel_order" << YAML::Value << g.panel_order;
  e << YAML::Key << "dense_cap" << YAML::Value << g.dense_cap;
  e << YAML::Key << "power_tol" << YAML::Value << g.power_tol;
  e << YAML::Key << "power_max_iter" << YAML::Value << g.power_max_iter;
  e << YAML::EndMap;
}

template <class T>
void emit_list(YAML::Emitter& e, const char* name, const std::vector<T>& v)
{
  e << YAML::Key << name << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (const auto& x : v) e << x;
  e << YAML::EndSeq;
}

} // namespace

RunConfig parse_config(const std::string& text)
{
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& ex) {
    throw ConfigError(std::string("config: parse error: ") + ex.what());
  }
  if (root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
  if (!root.IsMap()) throw ConfigError("config: top level must be a mapping");
  return from_node(root);
}

RunConfig load_config(const std::string& path)
{
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string dump_config(const RunConfig& c, bool with_output)
{
  YAML::Emitter e;
  e.SetDoublePrecision(17);
  e << YAML::BeginMap;
  e << YAML::Key << "experiment" << YAML::Value << c.experiment;
  e << YAML::Key << "seed" << YAML::Value << c.seed;
  if (with_output) e << YAML::Key << "output" << YAML::Value << c.output;

  e << YAML::Key << "domain" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "type" << YAML::Value << c.domain.type;
  e << YAML::Key << "radius" << YAML::Value << c.domain.radius;
  e << YAML::Key << "a" << YAML::Value << c.domain.a;
  e << YAML::Key << "b" << YAML::Value << c.domain.b;
  e << YAML::EndMap;

  const auto& v = c.velocity;
  e << YAML::Key << "velocity" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "r0" << YAML::Value << v.r0;
  e << YAML::Key << "R0" << YAML::Value << v.R0;
  e << YAML::Key << "weight" << YAML::Value << v.weight;
  e << YAML::Key << "m" << YAML::Value << v.m;
  e << YAML::Key << "alpha" << YAML::Value << v.alpha;
  e << YAML::Key << "s" << YAML::Value << v.s;
  e << YAML::Key << "beta" << YAML::Value << v.beta;
  e << YAML::Key << "radial_nodes" << YAML::Value << v.radial_nodes;
  e << YAML::EndMap;

  e << YAML::Key << "wall" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "kernel" << YAML::Value << c.wall.kernel;
  emit_list(e, "theta", c.wall.theta);
  emit_list(e, "alpha", c.wall.alpha);
  e << YAML::Key << "reflection" << YAML::Value << c.wall.reflection;
  e << YAML::EndMap;

  const auto& s = c.sim;
  e << YAML::Key << "sim" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "particles" << YAML::Value << s.particles;
  e << YAML::Key << "batch" << YAML::Value << s.batch;
  e << YAML::Key << "t_end" << YAML::Value << s.t_end;
  e << YAML::Key << "record_dt" << YAML::Value << s.record_dt;
  e << YAML::Key << "mode" << YAML::Value << s.mode;
  e << YAML::Key << "max_generation" << YAML::Value << s.max_generation;
  e << YAML::Key << "rebound_checks" << YAML::Value << s.rebound_checks;
  emit_list(e, "grid", std::vector<int>(s.grid.begin(), s.grid.end()));
  e << YAML::Key << "initial" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "type" << YAML::Value << s.initial.type;
  e << YAML::Key << "tilt" << YAML::Value << s.initial.tilt;
  e << YAML::Key << "points" << YAML::Value << YAML::BeginSeq;
  for (const auto& p : s.initial.points) {
    e << YAML::Flow << YAML::BeginSeq;
    for (double x : p) e << x;
    e << YAML::EndSeq;
  }
  e << YAML::EndSeq;
  e << YAML::EndMap;
  e << YAML::Key << "fit" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "enabled" << YAML::Value << s.fit.enabled;
  e << YAML::Key << "t_min" << YAML::Value << s.fit.t_min;
  e << YAML::Key << "t_max" << YAML::Value << s.fit.t_max;
  e << YAML::EndMap;
  e << YAML::EndMap;

  e << YAML::Key << "spectral" << YAML::Value << YAML::BeginMap;
  emit_grid(e, "grid", c.spectral.grid);
  emit_grid(e, "full_grid", c.spectral.full_grid);
  const auto& sc = c.spectral.scan;
  e << YAML::Key << "scan" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "re_min" << YAML::Value << sc.re_min;
  e << YAML::Key << "re_max" << YAML::Value << sc.re_max;
  e << YAML::Key << "im_max" << YAML::Value << sc.im_max;
  e << YAML::Key << "step" << YAML::Value << sc.step;
  e << YAML::Key << "flag_tol" << YAML::Value << sc.flag_tol;
  e << YAML::Key << "root_tol" << YAML::Value << sc.root_tol;
  e << YAML::Key << "complex" << YAML::Value << sc.complex_plane;
  e << YAML::Key << "refine" << YAML::Value << sc.refine;
  e << YAML::EndMap;
  e << YAML::EndMap;

  e << YAML::Key << "geometry" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "panels" << YAML::Value << c.geometry.panels;
  e << YAML::Key << "flatness_samples" << YAML::Value << c.geometry.flatness_samples;
  e << YAML::EndMap;

  const auto& l = c.laplace;
  e << YAML::Key << "laplace" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "particles" << YAML::Value << l.particles;
  emit_list(e, "n", l.n);
  emit_list(e, "lambda", l.lambda);
  e << YAML::Key << "tilt" << YAML::Value << l.tilt;
  e << YAML::Key << "rel_tol" << YAML::Value << l.rel_tol;
  e << YAML::EndMap;

  const auto& a = c.acceptance;
  e << YAML::Key << "acceptance" << YAML::Value << YAML::BeginMap;
  emit_list(e, "only", a.only);
  e << YAML::Key << "tolerances" << YAML::Value << YAML::BeginMap;
  for (const auto& [k, x] : a.tolerances) e << YAML::Key << k << YAML::Value << x;
  e << YAML::EndMap;
  e << YAML::Key << "rebound_particles" << YAML::Value << a.rebound_particles;
  e << YAML::Key << "stationarity_particles" << YAML::Value << a.stationarity_particles;
  e << YAML::Key << "laplace_particles" << YAML::Value << a.laplace_particles;
  e << YAML::Key << "decay_particles" << YAML::Value << a.decay_particles;
  e << YAML::Key << "determinism_particles" << YAML::Value << a.determinism_particles;
  e << YAML::EndMap;

  e << YAML::EndMap;
  return std::string(e.c_str()) + "\n";
}

std::string config_hash(const RunConfig& c)
{
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : dump_config(c, false)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::unique_ptr<Model> build_model(const RunConfig& c)
{
  const auto& d = c.domain;
  Domain dom = d.type == "disk" ? Domain::disk(d.radius)
             : d.type == "ball" ? Domain::ball(d.radius)
                                : Domain::ellipse(d.a, d.b);
  const auto& v = c.velocity;
  WeightProfile w = v.weight == "power"       ? WeightProfile::power(v.m)
                    : v.weight == "stretched" ? WeightProfile::stretched(v.alpha, v.s)
                                              : WeightProfile::gaussian(v.beta);
  SpeedMeasure sm(dom.dim(), v.r0, v.R0, w, v.radial_nodes);
  auto field = [](const std::vector<double>& x) {
    return x.size() == 1 ? BoundaryField(x.front()) : BoundaryField(x);
  };
  DiffuseKernel k = c.wall.kernel == "maxwell" ? DiffuseKernel::maxwell(dom, sm, field(c.wall.theta))
                                               : DiffuseKernel::uniform(dom, sm);
  Reflection refl = c.wall.reflection == "specular" ? Reflection::specular : Reflection::bounceback;
  auto m = std::unique_ptr<Model>(new Model{dom, sm, nullptr});
  m->wall = std::make_unique<Wall>(std::move(k), field(c.wall.alpha), refl);
  return m;
}

} // namespace gapkin::cli
