#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "alphaforge/alphashape.hpp"
#include "alphaforge/error.hpp"
#include "alphaforge/loss.hpp"
#include "alphaforge/mesh.hpp"
#include "alphaforge/meshio.hpp"
#include "alphaforge/metrics.hpp"
#include "alphaforge/policy.hpp"
#include "alphaforge/refine.hpp"
#include "alphaforge/sampling.hpp"
#include "alphaforge/synth.hpp"

namespace alphaforge::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kSchemaVersion = 1;

// Per-component seed offsets from the global --seed.
constexpr std::uint64_t kSynthSeed = 0;
constexpr std::uint64_t kSampleSeed = 1;
constexpr std::uint64_t kRefineSeed = 2;
constexpr std::uint64_t kTrainSeed = 3;
constexpr std::uint64_t kEvalSeed = 4;
constexpr std::uint64_t kAblateSeed = 5;

struct Io {
  std::istream& in;
  std::ostream& out;
  std::ostream& err;
};

struct Globals {
  std::uint64_t seed = 0;
  std::string config;
  int jobs = 1;
};

// Writes to --out when given, otherwise to the primary output stream.
template <class Fn>
void emit(const std::string& path, Io& io, Fn&& write) {
  if (path.empty() || path == "-") {
    write(io.out);
    io.out.flush();
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(Errc::IoError, "cannot open '" + path + "' for writing");
  write(file);
  file.flush();
  if (!file) throw Error(Errc::IoError, "failed writing '" + path + "'");
}

PointFormat point_format(const std::string& path, const std::string& name) {
  if (!name.empty()) return parse_point_format(name);
  if (path.empty() || path == "-") return PointFormat::Xyz;
  return point_format_for(path);
}

MeshFormat mesh_format(const std::string& path, const std::string& name) {
  if (!name.empty()) return parse_mesh_format(name);
  if (path.empty() || path == "-") return MeshFormat::Obj;
  return mesh_format_for(path);
}

PointCloud load_points(const std::string& path, const std::string& format, Io& io) {
  const PointFormat f = point_format(path, format);
  if (path.empty() || path == "-") return read_points(io.in, f);
  return read_points(fs::path(path), f);
}

Mesh load_mesh(const std::string& path, const std::string& format, Io& io) {
  const MeshFormat f = mesh_format(path, format);
  if (path.empty() || path == "-") return read_mesh(io.in, f);
  return read_mesh(fs::path(path), f);
}

void save_mesh(const std::string& path, const std::string& format, const Mesh& mesh, Io& io) {
  const MeshFormat f = mesh_format(path, format);
  emit(path, io, [&](std::ostream& os) { write_mesh(os, mesh, f); });
}

void save_points(const std::string& path, const std::string& format, const PointCloud& cloud, Io& io) {
  const PointFormat f = point_format(path, format);
  emit(path, io, [&](std::ostream& os) { write_points(os, cloud, f); });
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fixed2(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", x);
  return buf;
}

void describe(const Mesh& mesh, std::ostream& err) {
  err << "vertices " << mesh.vertices.size() << ", edges " << unique_edges(mesh).size() << ", faces "
      << mesh.faces.size() << ", euler " << euler_characteristic(mesh) << ", boundary edges "
      << boundary_edges(mesh).size() << '\n';
}

// Runs fn(i) for i in [0, n) on up to `jobs` threads; results are written by
// index, so callers see input order whatever the scheduling.
template <class Fn>
void parallel_for(std::size_t n, int jobs, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(jobs, 1)));
  std::vector<std::exception_ptr> errors(n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

struct Instance {
  std::string name;
  fs::path points;
  fs::path reference;
};

std::optional<fs::path> reference_for(const fs::path& points) {
  for (const char* ext : {".obj", ".off", ".ply"}) {
    fs::path p = points;
    p.replace_extension(ext);
    if (fs::exists(p)) return p;
  }
  return std::nullopt;
}

// Every *.xyz below `dir` (sorted by path) paired with its same-stem mesh.
std::vector<Instance> collect_instances(const fs::path& dir, bool recursive) {
  if (!fs::is_directory(dir)) throw Error(Errc::IoError, "'" + dir.string() + "' is not a directory");
  std::vector<fs::path> files;
  auto consider = [&](const fs::directory_entry& e) {
    if (e.is_regular_file() && e.path().extension() == ".xyz") files.push_back(e.path());
  };
  if (recursive) {
    for (const auto& e : fs::recursive_directory_iterator(dir)) consider(e);
  } else {
    for (const auto& e : fs::directory_iterator(dir)) consider(e);
  }
  std::sort(files.begin(), files.end());
  std::vector<Instance> out;
  for (const auto& f : files) {
    const auto ref = reference_for(f);
    if (!ref) throw Error(Errc::IoError, "no reference mesh next to '" + f.string() + "'");
    out.push_back({fs::relative(f, dir).replace_extension().generic_string(), f, *ref});
  }
  return out;
}

std::vector<TrainingInstance> load_instances(const std::vector<Instance>& list) {
  std::vector<TrainingInstance> out;
  out.reserve(list.size());
  for (const auto& inst : list) out.push_back({read_points(inst.points), read_mesh(inst.reference)});
  return out;
}

std::vector<double> resolve_taus(const std::vector<double>& taus, const std::string& preset) {
  if (!taus.empty()) return taus;
  if (preset == "smooth") return tau_presets::smooth();
  if (preset == "pretty") return tau_presets::pretty();
  throw Error(Errc::ConfigError, "unknown action preset '" + preset + "'");
}

json report_json(const EvalReport& r) {
  json f1 = json::object();
  for (const auto& [radius, value] : r.f1) f1[format_real(radius)] = value;
  json per_class = json::object();
  for (const auto& [label, value] : r.per_class) per_class[label] = value;
  return {{"protocol", r.protocol},
          {"chamfer", r.chamfer},
          {"f1", f1},
          {"normal_cosine", r.normal_cosine},
          {"per_class", per_class}};
}

// ---- config files -------------------------------------------------------

std::vector<std::string> config_values(const json& v, const std::string& key) {
  auto scalar = [&](const json& x) -> std::string {
    if (x.is_string()) return x.get<std::string>();
    if (x.is_boolean()) return x.get<bool>() ? "true" : "false";
    if (x.is_number_integer()) return std::to_string(x.get<long long>());
    if (x.is_number()) return format_real(x.get<double>());
    throw Error(Errc::ConfigError, "config key '" + key + "' has an unsupported value");
  };
  std::vector<std::string> out;
  if (v.is_array()) {
    for (const auto& x : v) out.push_back(scalar(x));
  } else {
    out.push_back(scalar(v));
  }
  return out;
}

// Config keys are long option names. Values fill options left unset on the
// command line; a key that names no option of the command is an error.
void apply_config(const std::string& path, CLI::App& app, CLI::App& sub) {
  json doc;
  try {
    doc = json::parse(read_text(path));
  } catch (const json::exception& e) {
    throw Error(Errc::ConfigError, "config '" + path + "': " + e.what());
  }
  if (!doc.is_object()) throw Error(Errc::ConfigError, "config must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (key == "config") throw Error(Errc::ConfigError, "config files cannot nest");
    CLI::Option* opt = nullptr;
    for (CLI::App* scope : {&sub, &app}) {
      try {
        opt = scope->get_option("--" + key);
        break;
      } catch (const CLI::OptionNotFound&) {
      }
    }
    if (!opt) throw Error(Errc::ConfigError, "unknown config key '" + key + "' for " + sub.get_name());
    if (opt->count() > 0) continue;
    for (const auto& s : config_values(value, key)) opt->add_result(s);
    opt->run_callback();
  }
}

// ---- subcommands --------------------------------------------------------

struct SynthArgs {
  std::string shape = "sphere";
  std::size_t n = 2000;
  double sigma = 0.0;
  double major = 1.0;
  double minor = 0.25;
  std::string out, format, reference;
};

int cmd_synth(const SynthArgs& a, const Globals& g, Io& io) {
  SyntheticSpec spec;
  spec.shape = parse_shape(a.shape);
  spec.n = a.n;
  spec.sigma = a.sigma;
  spec.seed = g.seed + kSynthSeed;
  spec.major_radius = a.major;
  spec.minor_radius = a.minor;
  const SyntheticShape s = synth(spec);
  if (!a.reference.empty()) write_mesh(fs::path(a.reference), s.reference);
  save_points(a.out, a.format, s.cloud, io);
  return kExitOk;
}

struct TriangulateArgs {
  std::string input = "-", in_format;
  double tau = 0.0;
  std::string out, format;
};

int cmd_triangulate(const TriangulateArgs& a, Io& io) {
  const PointCloud cloud = load_points(a.input, a.in_format, io);
  const Mesh mesh = triangulate(cloud, a.tau);
  describe(mesh, io.err);
  save_mesh(a.out, a.format, mesh, io);
  return kExitOk;
}

struct SampleArgs {
  std::string mesh = "-", mesh_format;
  std::size_t n = kMetricSamples;
  std::string out, format;
};

int cmd_sample(const SampleArgs& a, const Globals& g, Io& io) {
  const Mesh mesh = load_mesh(a.mesh, a.mesh_format, io);
  validate(mesh);
  save_points(a.out, a.format, sample_surface(mesh, a.n, g.seed + kSampleSeed), io);
  return kExitOk;
}

struct ReconstructArgs {
  std::string input = "-", in_format;
  std::optional<double> tau;
  std::string policy, gt, gt_format;
  std::string preset = "smooth";
  int stages = 2;
  int iters = 100;
  double step = 0.05;
  std::size_t samples = 2000;
  bool subdivide = false;
  int taubin_iters = 10;
  double taubin_lambda = 0.5;
  double taubin_mu = -0.53;
  std::string out, format, trace;
};

int cmd_reconstruct(const ReconstructArgs& a, const Globals& g, Io& io) {
  if (a.tau.has_value() == !a.policy.empty()) throw Error(Errc::ConfigError, "give exactly one of --tau and --policy");
  const PointCloud cloud = load_points(a.input, a.in_format, io);
  double tau = a.tau.value_or(0.0);
  if (!a.policy.empty()) {
    const QPolicy policy = policy_from_json(read_text(a.policy));
    tau = policy.actions[greedy_action(policy, state_descriptor(cloud))];
    io.err << "policy selected tau " << format_real(tau) << '\n';
  }
  TaubinConfig taubin;
  taubin.lambda = a.taubin_lambda;
  taubin.mu_shrink = a.taubin_mu;
  taubin.iterations = a.taubin_iters;

  RefineConfig cfg;
  cfg.stages = a.stages;
  cfg.iters_per_stage = a.iters;
  cfg.step_size = a.step;
  cfg.weights = loss_preset(a.preset);
  cfg.subdivide_between_stages = a.subdivide;
  cfg.n_samples = a.samples;

  const PointCloud target = a.gt.empty() ? cloud : read_points(fs::path(a.gt), point_format(a.gt, a.gt_format));
  if (cfg.weights.lambda6 > 0.0 && !target.has_normals()) {
    io.err << "target has no normals; normal loss disabled\n";
    cfg.weights.lambda6 = 0.0;
  }
  const Mesh initial = triangulate(cloud, tau);
  const Mesh baseline = build_baseline(cloud, tau, taubin);
  const RefineResult result = refine_mesh(initial, target, baseline, cfg, g.seed + kRefineSeed);
  describe(result.mesh, io.err);
  if (!a.trace.empty()) {
    std::ofstream t(a.trace, std::ios::binary);
    if (!t) throw Error(Errc::IoError, "cannot open '" + a.trace + "' for writing");
    write_trace_csv(t, result.trace);
  }
  save_mesh(a.out, a.format, result.mesh, io);
  return kExitOk;
}

struct TrainArgs {
  std::string dataset;
  std::string actions = "smooth";
  std::vector<double> taus;
  std::size_t episodes = 2000;
  double epsilon = 0.9;
  double epsilon_decay = 0.99;
  int period = 2;
  double learning_rate = 1e-2;
  double nu = 1e-4;
  std::size_t samples = kRewardSamples;
  std::string out, log;
};

int cmd_train(const TrainArgs& a, const Globals& g, Io& io) {
  QPolicy policy = QPolicy::create(resolve_taus(a.taus, a.actions), a.epsilon, a.epsilon_decay, a.period);
  policy.learning_rate = a.learning_rate;
  policy.validate();
  if (a.dataset.empty()) throw Error(Errc::ConfigError, "--dataset is required");
  const auto list = collect_instances(a.dataset, true);
  if (list.empty()) throw Error(Errc::IoError, "dataset '" + a.dataset + "' holds no instances");
  const auto data = load_instances(list);
  TrainOptions opts;
  opts.nu = a.nu;
  opts.reward_samples = a.samples;
  const TrainLog log = train_policy(data, policy, a.episodes, g.seed + kTrainSeed, opts);
  if (!a.log.empty()) {
    std::ofstream l(a.log, std::ios::binary);
    if (!l) throw Error(Errc::IoError, "cannot open '" + a.log + "' for writing");
    l << "episode,state_hash,action,tau,reward,epsilon,greedy\n";
    for (std::size_t i = 0; i < log.steps.size(); ++i) {
      const auto& s = log.steps[i];
      l << i << ',' << s.state_hash << ',' << s.action << ',' << format_real(policy.actions[s.action]) << ','
        << format_real(s.reward) << ',' << format_real(s.epsilon) << ',' << (s.greedy ? 1 : 0) << '\n';
    }
  }
  io.err << "trained on " << data.size() << " instances for " << a.episodes << " episodes\n";
  const std::string text = policy_to_json(policy);
  emit(a.out, io, [&](std::ostream& os) { os << text; });
  return kExitOk;
}

struct EvaluateArgs {
  std::vector<std::string> pred, gt, labels;
  std::string protocol = "meshrcnn";
  std::size_t samples = kMetricSamples;
  std::vector<double> radii;
  std::string out;
};

int cmd_evaluate(const EvaluateArgs& a, const Globals& g, Io& io) {
  if (a.pred.empty() || a.pred.size() != a.gt.size()) {
    throw Error(Errc::ConfigError, "--pred and --gt must be given the same number of times");
  }
  if (!a.labels.empty() && a.labels.size() != a.pred.size()) {
    throw Error(Errc::ConfigError, "--class must be given once per --pred or not at all");
  }
  const Protocol protocol = parse_protocol(a.protocol);
  std::vector<EvalReport> reports(a.pred.size());
  parallel_for(a.pred.size(), g.jobs, [&](std::size_t i) {
    EvalOptions opts;
    opts.n_samples = a.samples;
    opts.seed = g.seed + kEvalSeed;
    opts.radii = a.radii;
    if (!a.labels.empty()) opts.class_label = a.labels[i];
    reports[i] = evaluate(read_mesh(fs::path(a.pred[i])), read_mesh(fs::path(a.gt[i])), protocol, opts);
  });
  json doc = report_json(aggregate(reports, protocol));
  doc["schema_version"] = kSchemaVersion;
  doc["instances"] = json::array();
  for (std::size_t i = 0; i < reports.size(); ++i) {
    json r = report_json(reports[i]);
    r["pred"] = a.pred[i];
    r["gt"] = a.gt[i];
    doc["instances"].push_back(r);
  }
  const std::string text = doc.dump(2) + "\n";
  emit(a.out, io, [&](std::ostream& os) { os << text; });
  return kExitOk;
}

struct AblateArgs {
  std::string dataset;
  std::vector<double> taus;
  std::string actions = "smooth";
  std::string policy;
  double nu = 1e-4;
  std::size_t samples = kRewardSamples;
  std::string out;
};

int cmd_ablate(const AblateArgs& a, const Globals& g, Io& io) {
  std::optional<QPolicy> policy;
  if (!a.policy.empty()) policy = policy_from_json(read_text(a.policy));
  const std::vector<double> taus =
      !a.taus.empty() || !policy ? resolve_taus(a.taus, a.actions) : policy->actions;

  if (a.dataset.empty()) throw Error(Errc::ConfigError, "--dataset is required");
  std::vector<std::string> classes;
  for (const auto& e : fs::directory_iterator(a.dataset)) {
    if (e.is_directory()) classes.push_back(e.path().filename().string());
  }
  std::sort(classes.begin(), classes.end());
  if (classes.empty()) throw Error(Errc::IoError, "dataset '" + a.dataset + "' has no class directories");

  const std::size_t rows = taus.size() + (policy ? 1 : 0);
  std::vector<std::vector<double>> table(rows, std::vector<double>(classes.size(), 0.0));
  for (std::size_t c = 0; c < classes.size(); ++c) {
    const auto list = collect_instances(fs::path(a.dataset) / classes[c], false);
    if (list.empty()) throw Error(Errc::IoError, "class '" + classes[c] + "' holds no instances");
    std::vector<std::vector<double>> scores(list.size(), std::vector<double>(rows, 0.0));
    parallel_for(list.size(), g.jobs, [&](std::size_t i) {
      const PointCloud cloud = read_points(list[i].points);
      const Mesh reference = read_mesh(list[i].reference);
      const DelaunayComplex complex = delaunay_complex(cloud);
      const std::uint64_t seed = g.seed + kAblateSeed;
      auto score = [&](double tau) {
        try {
          return 100.0 * reward(triangulate_surface(complex, tau).mesh, reference, a.nu, a.samples, seed);
        } catch (const Error& e) {
          if (e.code() == Errc::EmptyMesh || e.code() == Errc::NoSurface) return 0.0;
          throw;
        }
      };
      for (std::size_t r = 0; r < taus.size(); ++r) scores[i][r] = score(taus[r]);
      if (policy) scores[i][taus.size()] = score(policy->actions[greedy_action(*policy, state_descriptor(cloud))]);
    });
    for (std::size_t r = 0; r < rows; ++r) {
      double sum = 0.0;
      for (const auto& s : scores) sum += s[r];
      table[r][c] = sum / static_cast<double>(list.size());
    }
  }

  emit(a.out, io, [&](std::ostream& os) {
    os << "tau";
    for (const auto& c : classes) os << ',' << c;
    os << '\n';
    for (std::size_t r = 0; r < rows; ++r) {
      os << (r < taus.size() ? format_real(taus[r]) : std::string("policy"));
      for (double v : table[r]) os << ',' << fixed2(v);
      os << '\n';
    }
  });
  return kExitOk;
}

int default_jobs() {
  if (const char* env = std::getenv("ALPHAFORGE_JOBS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 1;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  Io io{in, out, err};
  Globals g;
  g.jobs = default_jobs();

  CLI::App app{"Point-cloud to mesh reconstruction with learnable alpha-shape thresholds", "alphaforge"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.add_option("--seed", g.seed, "Global seed; components use fixed offsets from it");
  app.add_option("--config", g.config, "JSON object of option values (long names without dashes)");
  app.add_option("--jobs", g.jobs, "Parallel instances for evaluate/ablate (env ALPHAFORGE_JOBS)")
      ->check(CLI::PositiveNumber);

  SynthArgs sa;
  auto* synth_cmd = app.add_subcommand("synth", "Sample a synthetic shape with known topology");
  synth_cmd->add_option("--shape", sa.shape, "sphere | torus | box | stacked");
  synth_cmd->add_option("--n", sa.n, "Number of points");
  synth_cmd->add_option("--sigma", sa.sigma, "Gaussian noise along normals");
  synth_cmd->add_option("--major", sa.major, "Torus major radius");
  synth_cmd->add_option("--minor", sa.minor, "Torus minor radius");
  synth_cmd->add_option("--out", sa.out, "Points file (default: standard output)");
  synth_cmd->add_option("--format", sa.format, "xyz | ply (default: from --out, else xyz)");
  synth_cmd->add_option("--reference", sa.reference, "Also write the reference mesh here");

  TriangulateArgs ta;
  auto* tri_cmd = app.add_subcommand("triangulate", "Alpha-shape surface of a point cloud at threshold tau");
  tri_cmd->add_option("--input", ta.input, "Points file, - for standard input");
  tri_cmd->add_option("--in-format", ta.in_format, "xyz | ply (default: from --input, else xyz)");
  tri_cmd->add_option("--tau", ta.tau, "Circumradius threshold");
  tri_cmd->add_option("--out", ta.out, "Mesh file (default: standard output)");
  tri_cmd->add_option("--format", ta.format, "obj | off | ply (default: from --out, else obj)");

  SampleArgs sma;
  auto* sample_cmd = app.add_subcommand("sample", "Area-uniform surface samples of a mesh");
  sample_cmd->add_option("--mesh", sma.mesh, "Mesh file, - for standard input");
  sample_cmd->add_option("--mesh-format", sma.mesh_format, "obj | off | ply (default: from --mesh, else obj)");
  sample_cmd->add_option("--n", sma.n, "Number of samples");
  sample_cmd->add_option("--out", sma.out, "Points file (default: standard output)");
  sample_cmd->add_option("--format", sma.format, "xyz | ply");

  ReconstructArgs ra;
  auto* rec_cmd = app.add_subcommand("reconstruct", "Triangulate, build the baseline and refine");
  rec_cmd->add_option("--input", ra.input, "Points file, - for standard input");
  rec_cmd->add_option("--in-format", ra.in_format, "xyz | ply");
  rec_cmd->add_option("--tau", ra.tau, "Fixed threshold (exclusive with --policy)");
  rec_cmd->add_option("--policy", ra.policy, "Policy JSON choosing tau per cloud");
  rec_cmd->add_option("--gt", ra.gt, "Refinement target points (default: the input cloud)");
  rec_cmd->add_option("--gt-format", ra.gt_format, "xyz | ply");
  rec_cmd->add_option("--preset", ra.preset, "Loss weights: smooth | pretty");
  rec_cmd->add_option("--stages", ra.stages, "Refinement stages");
  rec_cmd->add_option("--iters", ra.iters, "Gradient steps per stage");
  rec_cmd->add_option("--step", ra.step, "Gradient step size");
  rec_cmd->add_option("--samples", ra.samples, "Surface samples per loss evaluation");
  rec_cmd->add_flag("--subdivide", ra.subdivide, "Midpoint-subdivide between stages");
  rec_cmd->add_option("--taubin-iters", ra.taubin_iters, "Taubin iterations for the baseline");
  rec_cmd->add_option("--taubin-lambda", ra.taubin_lambda, "Taubin lambda");
  rec_cmd->add_option("--taubin-mu", ra.taubin_mu, "Taubin mu (negative)");
  rec_cmd->add_option("--out", ra.out, "Mesh file (default: standard output)");
  rec_cmd->add_option("--format", ra.format, "obj | off | ply");
  rec_cmd->add_option("--trace", ra.trace, "Loss trace CSV");

  TrainArgs tra;
  auto* train_cmd = app.add_subcommand("train-policy", "Train the threshold policy on a dataset directory");
  train_cmd->add_option("--dataset", tra.dataset,
                        "Directory of <name>.xyz clouds with <name>.obj|off|ply references");
  train_cmd->add_option("--actions", tra.actions, "Threshold preset: smooth | pretty");
  train_cmd->add_option("--taus", tra.taus, "Explicit thresholds (overrides --actions)")->delimiter(',');
  train_cmd->add_option("--episodes", tra.episodes, "Training episodes");
  train_cmd->add_option("--epsilon", tra.epsilon, "Initial exploration rate");
  train_cmd->add_option("--epsilon-decay", tra.epsilon_decay, "Exploration decay per update");
  train_cmd->add_option("--period", tra.period, "Transitions between replays");
  train_cmd->add_option("--learning-rate", tra.learning_rate, "RMSProp step size");
  train_cmd->add_option("--nu", tra.nu, "Reward F1 radius");
  train_cmd->add_option("--samples", tra.samples, "Surface samples per reward");
  train_cmd->add_option("--out", tra.out, "Policy JSON (default: standard output)");
  train_cmd->add_option("--log", tra.log, "Training log CSV");

  EvaluateArgs ea;
  auto* eval_cmd = app.add_subcommand("evaluate", "Compare predicted and ground-truth meshes");
  eval_cmd->add_option("--pred", ea.pred, "Predicted mesh (repeatable)");
  eval_cmd->add_option("--gt", ea.gt, "Ground-truth mesh (repeatable, paired with --pred)");
  eval_cmd->add_option("--class", ea.labels, "Class label per pair (repeatable)");
  eval_cmd->add_option("--protocol", ea.protocol, "pixel2mesh | meshrcnn | tmnet | skeleton");
  eval_cmd->add_option("--samples", ea.samples, "Surface samples per mesh");
  eval_cmd->add_option("--radii", ea.radii, "F1 radii (default: protocol's)")->delimiter(',');
  eval_cmd->add_option("--out", ea.out, "Report JSON (default: standard output)");

  AblateArgs aa;
  auto* ablate_cmd = app.add_subcommand("ablate", "F1 per class for fixed thresholds and the policy");
  ablate_cmd->add_option("--dataset", aa.dataset, "Directory with one subdirectory per class");
  ablate_cmd->add_option("--taus", aa.taus, "Fixed thresholds (default: the policy's actions or --actions)")
      ->delimiter(',');
  ablate_cmd->add_option("--actions", aa.actions, "Threshold preset when --taus is absent: smooth | pretty");
  ablate_cmd->add_option("--policy", aa.policy, "Policy JSON adding a 'policy' row");
  ablate_cmd->add_option("--nu", aa.nu, "F1 radius");
  ablate_cmd->add_option("--samples", aa.samples, "Surface samples per mesh");
  ablate_cmd->add_option("--out", aa.out, "CSV table (default: standard output)");

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  try {
    if (!g.config.empty()) apply_config(g.config, app, *sub);
    if (sub == synth_cmd) return cmd_synth(sa, g, io);
    if (sub == tri_cmd) return cmd_triangulate(ta, io);
    if (sub == sample_cmd) return cmd_sample(sma, g, io);
    if (sub == rec_cmd) return cmd_reconstruct(ra, g, io);
    if (sub == train_cmd) return cmd_train(tra, g, io);
    if (sub == eval_cmd) return cmd_evaluate(ea, g, io);
    if (sub == ablate_cmd) return cmd_ablate(aa, g, io);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.code() == Errc::ConfigError ? kExitUsage : kExitData;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace alphaforge::cli
