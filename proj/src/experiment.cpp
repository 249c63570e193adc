#include "enstrack/experiment.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "enstrack/io.hpp"
#include "enstrack/parallel.hpp"

namespace enstrack {
namespace {

// shortest round-trip text, for labels and file names
std::string shortest(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v == 0.0 ? 0.0 : v);
  return std::string(buf, r.ptr);
}

using nlohmann::json;
namespace fs = std::filesystem;

// Strict object reader: every key must be consumed, type errors name the key.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + " must be an object");
  }

  template <class T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(where(key) + ": " + e.what());
    }
  }

  template <class T>
  void read(const char* key, std::optional<T>& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    if (j_.at(key).is_null()) {
      out.reset();
      return;
    }
    T v{};
    read(key, v);
    out = v;
  }

  void read(const char* key, std::vector<Convention>& out) {
    std::vector<std::string> names;
    read(key, names);
    if (!j_.contains(key)) return;
    out.clear();
    try {
      for (const auto& n : names) out.push_back(parse_convention(n));
    } catch (const Error& e) {
      throw ConfigError(where(key) + ": " + e.what());
    }
  }

  std::optional<Section> child(const char* key) {
    seen_.insert(key);
    if (!j_.contains(key)) return std::nullopt;
    return Section(j_.at(key), where(key));
  }

  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.count(k)) throw ConfigError(where(k.c_str()) + ": unknown key");
    }
  }

  std::string where(const char* key = nullptr) const {
    std::string w = path_.empty() ? std::string("config") : path_;
    if (key) w += std::string(path_.empty() ? ":" : ".") + key;
    return w;
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

std::string slurp(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot read config " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void read_output(Section& s, OutputOptions& out) {
  std::string dir = out.dir.string();
  s.read("dir", dir);
  out.dir = dir;
  s.read("trajectory_ell", out.trajectory_ell);
  s.read("trajectory_every", out.trajectory_every);
  s.read("plots", out.plots);
  s.finish();
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

void check_common(double horizon, std::size_t steps, const std::vector<double>& ells,
                  const std::vector<Convention>& conventions, std::size_t stride,
                  const OutputOptions& out) {
  require(horizon > 0.0 && std::isfinite(horizon), "config: horizon must be positive");
  require(steps >= 2, "config: steps must be >= 2");
  require(!ells.empty(), "config: ells must not be empty");
  for (double e : ells) require(e >= 0.0 && std::isfinite(e), "config: ells must be >= 0");
  require(!conventions.empty(), "config: at least one averaged convention is required");
  require(stride >= 1, "config: stride must be >= 1");
  require(out.trajectory_every >= 1, "config: output.trajectory_every must be >= 1");
  require(!out.dir.empty(), "config: output.dir must not be empty");
}

}  // namespace

OscillatorConfig parse_oscillator_config(const std::string& json_text) {
  const json j = parse_json(json_text);
  OscillatorConfig c;
  Section root(j, "");
  std::string kind = "oscillator";
  root.read("experiment", kind);
  require(kind == "oscillator", "config: experiment is '" + kind + "', expected oscillator");
  root.read("horizon", c.horizon);
  root.read("steps", c.steps);
  root.read("seed", c.seed);
  root.read("ells", c.ells);
  root.read("stride", c.stride);
  root.read("gaps", c.gaps);
  if (auto s = root.child("target")) {
    s->read("sigma", c.target_sigma);
    s->read("y0", c.y0);
    s->finish();
  }
  if (auto s = root.child("weights")) {
    s->read("position", c.position_weight);
    s->finish();
  }
  if (auto s = root.child("training")) {
    s->read("count", c.training_count);
    s->read("ell", c.training_ell);
    s->finish();
  }
  if (auto s = root.child("test")) {
    s->read("count", c.test_count);
    s->read("scale", c.test_scale);
    s->read("ell", c.test_ell);
    s->finish();
  }
  if (auto s = root.child("feedback")) {
    s->read("conventions", c.conventions);
    s->read("single_optimal", c.single_optimal);
    s->finish();
  }
  if (auto s = root.child("output")) read_output(*s, c.output);
  root.finish();

  check_common(c.horizon, c.steps, c.ells, c.conventions, c.stride, c.output);
  require(c.y0.size() == 2, "config: target.y0 must have 2 entries");
  require(c.training_count >= 1 && c.test_count >= 1, "config: counts must be >= 1");
  require(c.test_scale >= 0.0, "config: test.scale must be >= 0");
  return c;
}

CdrConfig parse_cdr_config(const std::string& json_text) {
  const json j = parse_json(json_text);
  CdrConfig c;
  Section root(j, "");
  std::string kind = "cdr";
  root.read("experiment", kind);
  require(kind == "cdr", "config: experiment is '" + kind + "', expected cdr");
  root.read("horizon", c.horizon);
  root.read("steps", c.steps);
  root.read("seed", c.seed);
  root.read("ells", c.ells);
  root.read("stride", c.stride);
  root.read("gaps", c.gaps);
  root.read("convection", c.convections);
  root.read("target_diffusivity", c.target_diffusivity);
  if (auto s = root.child("model")) {
    s->read("nodes", c.setup.nodes);
    s->read("reaction", c.setup.reaction);
    s->read("actuators", c.setup.actuators);
    s->read("output_weight", c.setup.output_weight);
    if (auto d = s->child("diffusion")) {
      d->read("mean", c.setup.diffusion.mean);
      d->read("decay", c.setup.diffusion.decay);
      d->read("terms", c.setup.diffusion.terms);
      d->finish();
    }
    s->finish();
  }
  if (auto s = root.child("training")) {
    s->read("draws", c.training_draws);
    s->read("first_draw", c.training_first_draw);
    s->finish();
  }
  if (auto s = root.child("test")) {
    s->read("draws", c.test_draws);
    s->read("first_draw", c.test_first_draw);
    s->read("scale", c.test_scale);
    s->finish();
  }
  if (auto s = root.child("feedback")) {
    s->read("conventions", c.conventions);
    s->read("single_optimal", c.single_optimal);
    s->finish();
  }
  if (auto s = root.child("output")) read_output(*s, c.output);
  root.finish();

  check_common(c.horizon, c.steps, c.ells, c.conventions, c.stride, c.output);
  require(c.setup.nodes >= 3, "config: model.nodes must be >= 3");
  require(c.setup.diffusion.terms >= 1, "config: model.diffusion.terms must be >= 1");
  require(c.setup.diffusion.mean > 0.0, "config: model.diffusion.mean must be positive");
  require(!c.convections.empty(), "config: convection must list at least one value");
  require(c.training_draws >= 1 && c.test_draws >= 1, "config: draw counts must be >= 1");
  require(c.target_diffusivity > 0.0, "config: target_diffusivity must be positive");
  require(c.test_scale >= 0.0, "config: test.scale must be >= 0");
  return c;
}

OscillatorConfig load_oscillator_config(const fs::path& path) {
  return parse_oscillator_config(slurp(path));
}

CdrConfig load_cdr_config(const fs::path& path) { return parse_cdr_config(slurp(path)); }

namespace {

void prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  }
}

std::string series_name(const TrajectoryRecord& r) {
  std::string s = r.feedback;
  if (!r.convention.empty()) s += "-" + r.convention;
  return s;
}

std::string series_id(const TrajectoryRecord& r) {
  return series_name(r) + "/ell=" + io::format_number(r.ell) + "/test=" +
         std::to_string(r.test_id);
}

std::vector<double> times(const ControlledTrajectory& t, std::size_t every) {
  std::vector<double> out;
  for (std::size_t k = 0; k <= t.grid.steps(); ++k) {
    if (k % every == 0 || k == t.grid.steps()) out.push_back(t.grid.node(k));
  }
  return out;
}

std::vector<double> sample(const ControlledTrajectory& t, std::size_t every,
                           const std::function<double(std::size_t)>& f) {
  std::vector<double> out;
  for (std::size_t k = 0; k <= t.grid.steps(); ++k) {
    if (k % every == 0 || k == t.grid.steps()) out.push_back(f(k));
  }
  return out;
}

json invariants_json(const std::vector<RiccatiInvariants>& inv, const std::vector<double>& ells) {
  json arr = json::array();
  for (std::size_t i = 0; i < inv.size() && i < ells.size(); ++i) {
    arr.push_back({{"ell", ells[i]},
                   {"max_asymmetry", inv[i].max_asymmetry},
                   {"min_eigen_ratio", inv[i].min_eigen_ratio},
                   {"ok", inv[i].ok}});
  }
  return arr;
}

json conventions_json(const std::vector<Convention>& cs) {
  json arr = json::array();
  for (auto c : cs) arr.push_back(std::string(to_string(c)));
  return arr;
}

void write_json(const json& j, const fs::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os << j.dump(2) << '\n';
  if (!os) throw IoError("write failed: " + path.string());
}

bool any_failed(const SweepTable& t) {
  for (const auto& r : t.costs) {
    if (!r.error.empty()) return true;
  }
  for (const auto& r : t.gaps) {
    if (!r.error.empty()) return true;
  }
  return false;
}

const char* kConventionNote =
    "averaged feedback: optimal tracking feedback of the mean training parameter; "
    "unit weights the objective by Q^T Q and P^T P, paper-literal by Q^T Q / N and P^T P / N "
    "with N the training ensemble size";

}  // namespace

ExperimentResult run_oscillator(const OscillatorConfig& cfg) {
  prepare_dir(cfg.output.dir);
  const TimeGrid grid(cfg.horizon, cfg.steps);
  Matrix q(1, 2);
  q << cfg.position_weight, 0.0;
  const ParameterFamily family = oscillator_family(q, Matrix::Identity(2, 2));
  const Vector y0 = Eigen::Map<const Vector>(cfg.y0.data(), 2);
  const TargetSignal g =
      TargetSignal::from_dynamics(family.a(scalar_parameter(cfg.target_sigma)), y0, grid);

  SweepSpec spec;
  spec.ells = cfg.ells;
  spec.training = [&](double ell) {
    return ParameterEnsemble::symmetric_grid(cfg.training_ell.value_or(ell), cfg.training_count);
  };
  spec.test = [&](double ell) {
    return ParameterEnsemble::symmetric_grid(cfg.test_ell.value_or(cfg.test_scale * ell),
                                             cfg.test_count);
  };
  spec.conventions = cfg.conventions;
  spec.single_optimal_rows = cfg.single_optimal;
  spec.gaps = cfg.gaps;
  spec.trajectory_ell = cfg.output.trajectory_ell;
  spec.stride = cfg.stride;
  spec.threads = thread_cap();

  ExperimentResult result;
  result.runs.push_back({"oscillator", uncertainty_sweep(family, spec, g, y0, grid)});
  const SweepTable& table = result.runs.front().table;
  result.any_row_failed = any_failed(table);
  const fs::path& dir = cfg.output.dir;

  io::write_csv(io::costs_table("oscillator", table.costs), dir / "costs.csv");
  result.files.push_back(dir / "costs.csv");
  if (cfg.gaps) {
    io::write_csv(io::gaps_table("oscillator", table.gaps), dir / "gaps.csv");
    result.files.push_back(dir / "gaps.csv");
  }
  io::CsvTable traj = io::trajectories_header();
  for (const auto& r : table.trajectories) {
    io::append_trajectory(traj, r.trajectory, series_id(r), cfg.output.trajectory_every);
  }
  io::write_csv(traj, dir / "trajectories.csv");
  result.files.push_back(dir / "trajectories.csv");

  if (cfg.output.plots && !table.trajectories.empty()) {
    const std::size_t every = cfg.output.trajectory_every;
    std::map<std::size_t, std::vector<const TrajectoryRecord*>> by_test;
    std::map<std::string, std::vector<const TrajectoryRecord*>> by_feedback;
    for (const auto& r : table.trajectories) {
      by_test[r.test_id].push_back(&r);
      by_feedback[series_name(r)].push_back(&r);
    }
    const char* names[] = {"position", "velocity"};
    for (const auto& [id, recs] : by_test) {
      std::vector<io::SvgChart> panels(3);
      const double sigma = recs.front()->trajectory.sigma(0);
      for (int c = 0; c < 2; ++c) {
        panels[c].title = std::string(names[c]) + ", sigma = " + io::format_number(sigma);
        panels[c].x_label = "t";
      }
      panels[2].title = "control";
      panels[2].x_label = "t";
      for (const auto* r : recs) {
        const auto& tr = r->trajectory;
        const auto ts = times(tr, every);
        for (int c = 0; c < 2; ++c) {
          panels[c].series.push_back(
              {series_name(*r), ts, sample(tr, every, [&](std::size_t k) { return tr.states[k](c); })});
        }
        panels[2].series.push_back(
            {series_name(*r), ts, sample(tr, every, [&](std::size_t k) { return tr.controls[k](0); })});
      }
      std::vector<double> gt;
      std::vector<double> gv[2];
      for (std::size_t k = 0; k <= grid.steps(); ++k) {
        if (k % every != 0 && k != grid.steps()) continue;
        gt.push_back(grid.node(k));
        for (int c = 0; c < 2; ++c) gv[c].push_back(g.value(k)(c));
      }
      for (int c = 0; c < 2; ++c) panels[c].series.push_back({"target", gt, gv[c]});
      const fs::path p = dir / ("test-" + std::to_string(id) + ".svg");
      io::write_svg(panels, p);
      result.files.push_back(p);
    }
    for (const auto& [name, recs] : by_feedback) {
      std::vector<io::SvgChart> panels(2);
      for (int c = 0; c < 2; ++c) {
        panels[c].title = std::string(names[c]) + ", " + name;
        panels[c].x_label = "t";
        for (const auto* r : recs) {
          const auto& tr = r->trajectory;
          panels[c].series.push_back(
              {"sigma = " + io::format_number(tr.sigma(0)), times(tr, every),
               sample(tr, every, [&](std::size_t k) { return tr.states[k](c); })});
        }
      }
      const fs::path p = dir / ("states-" + name + ".svg");
      io::write_svg(panels, p);
      result.files.push_back(p);
    }
  }

  json meta = {{"experiment", "oscillator"},
               {"horizon", cfg.horizon},
               {"steps", cfg.steps},
               {"seed", cfg.seed},
               {"target_sigma", cfg.target_sigma},
               {"y0", cfg.y0},
               {"position_weight", cfg.position_weight},
               {"ells", cfg.ells},
               {"training", {{"count", cfg.training_count}}},
               {"test", {{"count", cfg.test_count}, {"scale", cfg.test_scale}}},
               {"conventions", conventions_json(cfg.conventions)},
               {"convention_note", kConventionNote},
               {"stride", cfg.stride},
               {"riccati_invariants", invariants_json(table.invariants, cfg.ells)},
               {"rows_failed", result.any_row_failed}};
  meta["training"]["ell"] = cfg.training_ell ? json(*cfg.training_ell) : json(nullptr);
  meta["test"]["ell"] = cfg.test_ell ? json(*cfg.test_ell) : json(nullptr);
  write_json(meta, dir / "metadata.json");
  result.files.push_back(dir / "metadata.json");
  return result;
}

ExperimentResult run_cdr(const CdrConfig& cfg) {
  prepare_dir(cfg.output.dir);
  const TimeGrid grid(cfg.horizon, cfg.steps);
  const pde::Mesh1D mesh(cfg.setup.nodes);
  const auto n = static_cast<Eigen::Index>(mesh.size());
  Vector y0_nodal(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    y0_nodal(j) = std::sin(2.0 * std::numbers::pi * mesh.nodes()(j)) - 1.0;
  }
  const TargetSignal g =
      pde::heat_target(mesh, cfg.target_diffusivity, y0_nodal, grid).scaled(mesh.sqrt_weights());
  const Vector y0 = mesh.to_orthonormal(y0_nodal);

  const std::size_t terms = cfg.setup.diffusion.terms;
  std::vector<Vector> train_raw, test_raw;
  for (std::size_t d = 0; d < cfg.training_draws; ++d) {
    train_raw.push_back(pde::standard_normals(cfg.seed, cfg.training_first_draw + d, terms));
  }
  for (std::size_t d = 0; d < cfg.test_draws; ++d) {
    test_raw.push_back(pde::standard_normals(cfg.seed, cfg.test_first_draw + d, terms));
  }
  auto scaled = [](const std::vector<Vector>& raw, double s) {
    std::vector<Vector> out;
    for (const auto& v : raw) out.push_back(s * v);
    return ParameterEnsemble(out);
  };

  ExperimentResult result;
  const fs::path& dir = cfg.output.dir;
  io::CsvTable costs, gaps, traj = io::trajectories_header();
  json runs = json::array();
  const io::LabelFn label = [&](std::size_t id, const Vector&) {
    return io::TestLabel{id, static_cast<double>(cfg.test_first_draw + id)};
  };

  for (double b : cfg.convections) {
    pde::CdrSetup setup = cfg.setup;
    setup.convection = b;
    const ParameterFamily family = pde::cdr_family(setup, mesh);
    const std::string name = "cdr-b" + shortest(b);

    SweepSpec spec;
    spec.ells = cfg.ells;
    spec.training = [&](double ell) { return scaled(train_raw, ell); };
    spec.test = [&](double) { return scaled(test_raw, cfg.test_scale); };
    spec.conventions = cfg.conventions;
    spec.single_optimal_rows = cfg.single_optimal;
    spec.gaps = cfg.gaps;
    spec.trajectory_ell = cfg.output.trajectory_ell;
    spec.stride = cfg.stride;
    spec.threads = thread_cap();
    result.runs.push_back({name, uncertainty_sweep(family, spec, g, y0, grid)});
    const SweepTable& table = result.runs.back().table;
    result.any_row_failed = result.any_row_failed || any_failed(table);

    io::CsvTable c = io::costs_table(name, table.costs, label);
    if (costs.header.empty() || c.header.size() > costs.header.size()) {
      // widen to the error variant if any run produced failures
      if (!costs.header.empty()) {
        for (auto& r : costs.rows) r.emplace_back();
      }
      costs.header = c.header;
    } else if (c.header.size() < costs.header.size()) {
      for (auto& r : c.rows) r.emplace_back();
    }
    costs.rows.insert(costs.rows.end(), c.rows.begin(), c.rows.end());

    if (cfg.gaps) {
      io::CsvTable gt = io::gaps_table(name, table.gaps, label);
      if (gaps.header.empty() || gt.header.size() > gaps.header.size()) {
        if (!gaps.header.empty()) {
          for (auto& r : gaps.rows) r.emplace_back();
        }
        gaps.header = gt.header;
      } else if (gt.header.size() < gaps.header.size()) {
        for (auto& r : gt.rows) r.emplace_back();
      }
      gaps.rows.insert(gaps.rows.end(), gt.rows.begin(), gt.rows.end());
    }

    const Vector& sw = mesh.sqrt_weights();
    for (const auto& r : table.trajectories) {
      ControlledTrajectory nodal = r.trajectory;
      for (auto& y : nodal.states) y = y.cwiseQuotient(sw);
      io::append_trajectory(traj, nodal, name + "/" + series_id(r), cfg.output.trajectory_every);
    }

    if (cfg.output.plots && !table.trajectories.empty()) {
      const std::size_t every = cfg.output.trajectory_every;
      std::map<std::size_t, std::vector<const TrajectoryRecord*>> by_test;
      for (const auto& r : table.trajectories) by_test[r.test_id].push_back(&r);
      for (const auto& [id, recs] : by_test) {
        std::vector<io::SvgChart> panels(1 + setup.actuators.size());
        const std::string draw = std::to_string(cfg.test_first_draw + id);
        panels[0].title = "|y - g|, b = " + io::format_number(b) + ", test draw " + draw;
        panels[0].x_label = "t";
        for (std::size_t a = 0; a < setup.actuators.size(); ++a) {
          panels[1 + a].title = "control u" + std::to_string(a);
          panels[1 + a].x_label = "t";
        }
        for (const auto* r : recs) {
          const auto& tr = r->trajectory;
          const auto ts = times(tr, every);
          panels[0].series.push_back({series_name(*r), ts, sample(tr, every, [&](std::size_t k) {
                                        return (tr.states[k] - g.value(k)).norm();
                                      })});
          for (std::size_t a = 0; a < setup.actuators.size(); ++a) {
            panels[1 + a].series.push_back(
                {series_name(*r), ts, sample(tr, every, [&](std::size_t k) {
                   return tr.controls[k](static_cast<Eigen::Index>(a));
                 })});
          }
        }
        const fs::path p = dir / (name + "-test-" + std::to_string(id) + ".svg");
        io::write_svg(panels, p);
        result.files.push_back(p);
      }
    }

    runs.push_back({{"name", name},
                    {"convection", b},
                    {"riccati_invariants", invariants_json(table.invariants, cfg.ells)}});
  }

  if (costs.header.empty()) {
    costs.header = io::costs_table("cdr", {}).header;
  }
  io::write_csv(costs, dir / "costs.csv");
  result.files.push_back(dir / "costs.csv");
  if (cfg.gaps) {
    io::write_csv(gaps, dir / "gaps.csv");
    result.files.push_back(dir / "gaps.csv");
  }
  io::write_csv(traj, dir / "trajectories.csv");
  result.files.push_back(dir / "trajectories.csv");

  io::CsvTable fields;
  fields.header = {"set", "draw", "scale", "x", "diffusion"};
  const Matrix basis = pde::diffusion_basis(mesh, cfg.setup.diffusion);
  auto emit_fields = [&](const char* set, const std::vector<Vector>& raw, std::uint64_t first,
                         double s) {
    for (std::size_t d = 0; d < raw.size(); ++d) {
      const Vector a = pde::diffusion_field(basis, cfg.setup.diffusion, s * raw[d]);
      for (Eigen::Index j = 0; j < n; ++j) {
        fields.rows.push_back({set, std::to_string(first + d), io::format_number(s),
                               io::format_number(mesh.nodes()(j)), io::format_number(a(j))});
      }
    }
  };
  for (double ell : cfg.ells) emit_fields("training", train_raw, cfg.training_first_draw, ell);
  emit_fields("test", test_raw, cfg.test_first_draw, cfg.test_scale);
  io::write_csv(fields, dir / "field-samples.csv");
  result.files.push_back(dir / "field-samples.csv");

  json meta = {{"experiment", "cdr"},
               {"horizon", cfg.horizon},
               {"steps", cfg.steps},
               {"seed", cfg.seed},
               {"random",
                "Philox4x32-10 keyed by seed; draw d uses counter stream d; normals by "
                "Box-Muller, component i from pair i/2 (cos for even i, sin for odd i)"},
               {"nodes", cfg.setup.nodes},
               {"diffusion",
                {{"mean", cfg.setup.diffusion.mean},
                 {"decay", cfg.setup.diffusion.decay},
                 {"terms", cfg.setup.diffusion.terms}}},
               {"reaction", cfg.setup.reaction},
               {"actuators", cfg.setup.actuators},
               {"output_weight", cfg.setup.output_weight},
               {"target_diffusivity", cfg.target_diffusivity},
               {"ells", cfg.ells},
               {"training", {{"draws", cfg.training_draws}, {"first_draw", cfg.training_first_draw}}},
               {"test",
                {{"draws", cfg.test_draws},
                 {"first_draw", cfg.test_first_draw},
                 {"scale", cfg.test_scale}}},
               {"test_param", "test_param column holds the test draw index"},
               {"conventions", conventions_json(cfg.conventions)},
               {"convention_note", kConventionNote},
               {"stride", cfg.stride},
               {"coordinates",
                "trajectories.csv holds nodal values; costs use the trapezoid-weighted L2 norm"},
               {"runs", runs},
               {"rows_failed", result.any_row_failed}};
  write_json(meta, dir / "metadata.json");
  result.files.push_back(dir / "metadata.json");
  return result;
}

}  // namespace enstrack
