/*
 * Copyright 2026 The morphfit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// morphfit command-line tool: build-model, register, reconstruct, synth,
// evaluate. Exit codes: 0 success, 1 validation/input error, 2 numeric failure.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "morphfit/error.hpp"
#include "morphfit/mesh_io.hpp"
#include "morphfit/model_io.hpp"
#include "morphfit/registration.hpp"
#include "morphfit/synth.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace morphfit;

namespace {

constexpr std::uint64_t kInitStream = 0x9e3779b97f4a7c15ULL;

Vec3 to_vec3(const std::vector<double>& v, const char* what) {
  if (v.size() != 3) throw ValidationError(std::string(what) + " needs three comma-separated values");
  return Vec3(v[0], v[1], v[2]);
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

std::string format_row(const Eigen::VectorXd& v) {
  std::string row;
  char buf[32];
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%s%.17g", i ? "," : "", v[i]);
    row += buf;
  }
  return row + "\n";
}

unsigned worker_limit() {
  unsigned limit = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("MORPHFIT_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n >= 1) limit = static_cast<unsigned>(n);
    } catch (const std::exception&) {
      std::cerr << "warning: ignoring MORPHFIT_THREADS='" << env << "'\n";
    }
  }
  return limit;
}

// Runs job(i) for i in [0, n) on a bounded pool; rethrows the first failure.
template <class Job>
void run_pool(std::size_t n, Job job) {
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(n, worker_limit()));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i; (i = next++) < n;) {
      try {
        job(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

// ---------------------------------------------------------------------------
// build-model

struct BuildOptions {
  std::string reference;
  double scale = 25.0;
  double bandwidth = 40.0;
  int rank = 50;
  std::string out;
};

void cmd_build_model(const BuildOptions& o) {
  const TriangleMesh reference = load_mesh(o.reference);
  const int full = static_cast<int>(3 * reference.vertex_count());
  int rank = o.rank;
  if (rank < 1) throw ValidationError("rank must be positive");
  if (rank > full) {
    std::cerr << "warning: rank " << rank << " exceeds 3n = " << full << "; clamped\n";
    rank = full;
  }
  const GaussianKernel kernel(o.scale, o.bandwidth);
  const LowRankGP model = build_low_rank(kernel, reference, rank);
  for (int i = 1; i < model.rank(); ++i)
    if (model.eigenvalues()[i] > model.eigenvalues()[i - 1]) throw NumericError("eigenvalues are not sorted");
  std::ostringstream description;
  description << "gaussian s=" << o.scale << " sigma=" << o.bandwidth << " rank=" << rank;
  save_model(model, o.out, description.str());

  const Eigen::VectorXd& ev = model.eigenvalues();
  const double total = ev.sum();
  std::printf("model: %zu vertices, rank %d, %s\n", model.vertex_count(), model.rank(), description.str().c_str());
  std::printf("eigenvalues (mm^2): first %.6g, last %.6g, sum %.6g\n", ev[0], ev[ev.size() - 1], total);
  double running = 0.0;
  for (int i = 0; i < model.rank(); ++i) {
    running += ev[i];
    if (i < 10 || i + 1 == model.rank())
      std::printf("  %3d  %12.6g  cumulative %6.2f%%\n", i + 1, ev[i], total > 0 ? 100.0 * running / total : 0.0);
  }
}

// ---------------------------------------------------------------------------
// register / reconstruct

struct RunOptions {
  std::string model;
  std::vector<std::string> targets;
  std::string method = "mcmc";
  std::string likelihood = "l2";
  double sigma_l2 = 1.0;
  double lambda_h = 1.0;
  double sigma_cl = 1.0;
  bool filter_boundary = true;
  std::string proposal = "cp";
  double normal_variance = 3.0;
  double tangential_variance = 100.0;
  double flip_probability = 0.2;
  bool cp_filter_boundary = false;
  double cp_weight = 0.5;
  std::vector<double> rw_scales{1.0, 1e-1, 1e-2, 1e-3, 1e-4, 1e-5};
  int iterations = 1000;
  int burn_in = 300;
  int thinning = 10;
  std::uint64_t seed = 0;
  int runs = 1;
  double init_scale = 0.0;
  int icp_iterations = 100;
  double icp_sigma = 1.0;
  std::string out;
  // reconstruct only
  std::vector<double> excision_center{0.0, 0.0, 0.0};
  double excision_radius = 0.0;
};

McmcSettings mcmc_settings(const RunOptions& o) {
  McmcSettings s;
  s.likelihood.kind = likelihood_kind_from_string(o.likelihood);
  s.likelihood.sigma_l2 = o.sigma_l2;
  s.likelihood.lambda_h = o.lambda_h;
  s.likelihood.sigma_cl = o.sigma_cl;
  s.likelihood.filter_boundary = o.filter_boundary;
  s.proposal = proposal_kind_from_string(o.proposal);
  s.cp.normal_variance = o.normal_variance;
  s.cp.tangential_variance = o.tangential_variance;
  s.cp.flip_probability = o.flip_probability;
  s.cp.filter_boundary = o.cp_filter_boundary;
  s.cp_weight = o.cp_weight;
  s.random_walk.scales = o.rw_scales;
  s.random_walk.weights.assign(o.rw_scales.size(), 1.0 / static_cast<double>(o.rw_scales.size()));
  s.iterations = o.iterations;
  s.burn_in = o.burn_in;
  s.thinning = o.thinning;
  s.validate();
  return s;
}

IcpSettings icp_settings(const RunOptions& o) {
  IcpSettings s;
  s.iterations = o.icp_iterations;
  s.sigma = o.icp_sigma;
  s.filter_boundary = o.filter_boundary && o.likelihood == "collective";
  s.validate();
  return s;
}

json snapshot(const RunOptions& o, const std::string& command, const std::string& target, std::uint64_t seed) {
  json j;
  j["command"] = command;
  j["model"] = o.model;
  j["target"] = target;
  j["method"] = o.method;
  j["seed"] = seed;
  j["init_scale"] = o.init_scale;
  if (o.method == "mcmc") {
    j["likelihood"] = {{"kind", o.likelihood},
                       {"sigma_l2", o.sigma_l2},
                       {"lambda_h", o.lambda_h},
                       {"sigma_cl", o.sigma_cl},
                       {"filter_boundary", o.filter_boundary}};
    j["proposal"] = {{"kind", o.proposal},
                     {"normal_variance", o.normal_variance},
                     {"tangential_variance", o.tangential_variance},
                     {"flip_probability", o.flip_probability},
                     {"filter_boundary", o.cp_filter_boundary},
                     {"cp_weight", o.cp_weight},
                     {"rw_scales", o.rw_scales}};
    j["iterations"] = o.iterations;
    j["burn_in"] = o.burn_in;
    j["thinning"] = o.thinning;
  } else {
    j["icp"] = {{"iterations", o.icp_iterations}, {"sigma", o.icp_sigma}};
  }
  if (command == "reconstruct") {
    j["excision"] = {{"center", o.excision_center}, {"radius", o.excision_radius}};
  }
  return j;
}

struct Job {
  std::size_t target = 0;
  std::uint64_t seed = 0;
  fs::path dir;
};

TriangleMesh excise(const TriangleMesh& mesh, const Vec3& center, double radius) {
  if (radius < 0.0) throw ValidationError("excision radius must be non-negative");
  if (radius == 0.0) return mesh;
  TriangleMesh cut = remove_vertices_within(mesh, center, radius);
  if (cut.empty() || cut.face_count() == 0) throw ValidationError("excision removes the whole target");
  return cut;
}

void write_result(const RegistrationResult& r, const LowRankGP& model, const Job& job, const json& config,
                  const std::string& target_name, const RunOptions& o, bool reconstruct) {
  fs::create_directories(job.dir);
  std::optional<std::vector<double>> quality;
  if (r.uncertainty) quality = std::vector<double>(r.uncertainty->total.data(), r.uncertainty->total.data() + r.uncertainty->total.size());
  save_mesh(r.map_mesh, job.dir / "map.ply", MeshFormat::kPlyBinary, quality);

  std::string samples;
  for (int i = 0; i < model.rank(); ++i) samples += (i ? ",a" : "a") + std::to_string(i);
  samples += "\n";
  for (const Coefficients& a : r.samples) samples += format_row(a);
  write_file(job.dir / "samples.csv", samples);
  write_file(job.dir / "map_coefficients.csv", format_row(r.map_coefficients));

  if (r.chain) {
    std::ostringstream chain;
    r.chain->write_csv(chain, false);
    write_file(job.dir / "chain.csv", chain.str());
    std::string timing = "iteration,wall_ms\n";
    char buf[64];
    for (std::size_t i = 0; i < r.chain->steps.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%zu,%.3f\n", i, r.chain->steps[i].wall_ms);
      timing += buf;
    }
    write_file(job.dir / "chain_timing.csv", timing);
  } else {
    std::string trajectory = "iteration,mean_distance\n";
    for (std::size_t i = 0; i < r.trajectory_distance.size(); ++i)
      trajectory += std::to_string(i) + "," + std::to_string(r.trajectory_distance[i]) + "\n";
    write_file(job.dir / "trajectory.csv", trajectory);
  }

  if (reconstruct && r.uncertainty) {
    const Vec3 center = to_vec3(o.excision_center, "--excision-center");
    std::string csv = "vertex,region,normal,tangential,total\n";
    char buf[160];
    for (std::size_t j = 0; j < r.map_mesh.vertex_count(); ++j) {
      const bool excised = o.excision_radius > 0.0 && (r.map_mesh.vertex(j) - center).norm() <= o.excision_radius;
      const auto k = static_cast<Eigen::Index>(j);
      std::snprintf(buf, sizeof buf, "%zu,%s,%.9g,%.9g,%.9g\n", j, excised ? "excised" : "observed",
                    r.uncertainty->normal[k], r.uncertainty->tangential[k], r.uncertainty->total[k]);
      csv += buf;
    }
    write_file(job.dir / "uncertainty.csv", csv);
  }

  json metrics;
  metrics["method"] = r.method;
  metrics["seed"] = job.seed;
  metrics["target"] = target_name;
  metrics["mean_l2"] = r.mean_l2;
  metrics["hausdorff"] = r.hausdorff;
  metrics["acceptance_rate"] = r.acceptance_rate;
  metrics["iterations"] = r.iterations;
  metrics["wall_ms"] = r.wall_ms;
  metrics["map_log_posterior"] = r.map_log_posterior;
  metrics["samples"] = r.samples.size();
  write_file(job.dir / "metrics.json", metrics.dump(2) + "\n");
  write_file(job.dir / "config.json", config.dump(2) + "\n");
}

void cmd_register(const RunOptions& o, bool reconstruct) {
  if (o.method != "mcmc" && o.method != "icp") throw ValidationError("--method must be mcmc or icp");
  if (o.runs < 1) throw ValidationError("--runs must be positive");
  if (o.init_scale < 0.0) throw ValidationError("--init-scale must be non-negative");
  if (o.targets.empty()) throw ValidationError("no target given");
  for (const auto& t : o.targets)
    if (!fs::exists(t)) throw ValidationError("target not found: " + t);
  if (!fs::exists(o.model)) throw ValidationError("model not found: " + o.model);

  RunOptions options = o;
  if (reconstruct) {
    if (o.method != "mcmc") throw ValidationError("reconstruct needs --method mcmc");
    options.likelihood = "collective";
    options.filter_boundary = true;
    options.cp_filter_boundary = true;
  }
  const McmcSettings base = mcmc_settings(options);
  const IcpSettings icp = icp_settings(options);
  const LowRankGP model = load_model(options.model);

  std::vector<TargetSurface> targets;
  for (const auto& t : options.targets) {
    TriangleMesh mesh = load_mesh(t);
    if (reconstruct) mesh = excise(mesh, to_vec3(options.excision_center, "--excision-center"), options.excision_radius);
    targets.emplace_back(std::move(mesh));
  }

  std::vector<Job> jobs;
  const bool single = options.targets.size() == 1 && options.runs == 1;
  for (std::size_t t = 0; t < options.targets.size(); ++t) {
    for (int k = 0; k < options.runs; ++k) {
      Job job{t, options.seed + static_cast<std::uint64_t>(k), options.out};
      if (!single)
        job.dir /= fs::path(options.targets[t]).stem().string() + "_" + options.method + "_seed" + std::to_string(job.seed);
      jobs.push_back(job);
    }
  }

  std::mutex print_mutex;
  run_pool(jobs.size(), [&](std::size_t i) {
    const Job& job = jobs[i];
    Coefficients init = Coefficients::Zero(model.rank());
    if (options.init_scale > 0.0) {
      Rng rng(job.seed ^ kInitStream);
      init = options.init_scale * standard_normal(model.rank(), rng);
    }
    RegistrationResult r;
    if (options.method == "mcmc") {
      McmcSettings s = base;
      s.seed = job.seed;
      r = register_mcmc(model, targets[job.target], s, init);
    } else {
      r = register_icp(model, targets[job.target], icp, init);
    }
    const std::string name = options.targets[job.target];
    write_result(r, model, job, snapshot(options, reconstruct ? "reconstruct" : "register", name, job.seed), name,
                 options, reconstruct);
    std::lock_guard lock(print_mutex);
    std::printf("%s seed %llu: mean L2 %.4f mm, Hausdorff %.4f mm, acceptance %.3f, %.1f s -> %s\n", name.c_str(),
                static_cast<unsigned long long>(job.seed), r.mean_l2, r.hausdorff, r.acceptance_rate,
                r.wall_ms / 1000.0, job.dir.string().c_str());
  });
}

// ---------------------------------------------------------------------------
// synth

struct SynthOptions {
  std::string shape = "ellipsoid";
  int resolution = 16;
  std::vector<double> size{60.0, 40.0, 30.0};
  std::string model;
  std::uint64_t seed = 0;
  double scale = 1.0;
  std::vector<double> translate{0.0, 0.0, 0.0};
  std::vector<double> excision_center{0.0, 0.0, 0.0};
  double excision_radius = 0.0;
  std::string out;
};

void cmd_synth(const SynthOptions& o) {
  const Vec3 shift = to_vec3(o.translate, "--translate");
  const Vec3 center = to_vec3(o.excision_center, "--excision-center");
  TriangleMesh mesh;
  json truth;
  if (!o.model.empty()) {
    if (o.scale < 0.0) throw ValidationError("--scale must be non-negative");
    const LowRankGP model = load_model(o.model);
    Rng rng(o.seed);
    const Coefficients alpha = o.scale * standard_normal(model.rank(), rng);
    mesh = model.instance(alpha);
    truth["model"] = o.model;
    truth["seed"] = o.seed;
    truth["scale"] = o.scale;
    truth["coefficients"] = std::vector<double>(alpha.data(), alpha.data() + alpha.size());
  } else {
    SynthSpec spec;
    spec.shape = shape_from_string(o.shape);
    spec.resolution = o.resolution;
    spec.size = to_vec3(o.size, "--size");
    spec.validate();
    mesh = synthesize(spec);
  }
  if (shift != Vec3::Zero()) {
    std::vector<Vec3> moved = mesh.vertices();
    for (Vec3& p : moved) p += shift;
    mesh = TriangleMesh(std::move(moved), mesh.faces());
  }
  mesh = excise(mesh, center, o.excision_radius);

  const fs::path out(o.out);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  save_mesh(mesh, out, format_from_extension(out));
  if (!truth.empty()) {
    truth["translate"] = o.translate;
    truth["excision"] = {{"center", o.excision_center}, {"radius", o.excision_radius}};
    fs::path alpha_path = out;
    alpha_path.replace_extension(".alpha.json");
    write_file(alpha_path, truth.dump(2) + "\n");
  }
  std::printf("%s: %zu vertices, %zu faces\n", o.out.c_str(), mesh.vertex_count(), mesh.face_count());
}

// ---------------------------------------------------------------------------
// evaluate

struct EvaluateOptions {
  std::vector<std::string> dirs;
  std::string out;
};

void collect(const fs::path& path, std::vector<fs::path>& found) {
  if (fs::exists(path / "metrics.json") || !fs::is_directory(path)) {
    found.push_back(path);
    return;
  }
  std::vector<fs::path> children;
  for (const auto& e : fs::directory_iterator(path))
    if (e.is_directory()) children.push_back(e.path());
  std::sort(children.begin(), children.end());
  if (children.empty()) found.push_back(path);
  for (const auto& c : children) found.push_back(c);
}

int cmd_evaluate(const EvaluateOptions& o) {
  std::vector<fs::path> dirs;
  for (const auto& d : o.dirs) collect(d, dirs);
  std::string csv = "target,method,seed,mean_l2,hausdorff,acceptance_rate,wall_ms\n";
  int rows = 0;
  for (const auto& dir : dirs) {
    try {
      std::ifstream in(dir / "metrics.json");
      if (!in) throw IoError("no metrics.json");
      const json m = json::parse(in);
      auto number = [&](const char* key) {
        const auto& v = m.at(key);
        return v.is_null() ? std::string("nan") : v.dump();
      };
      csv += m.at("target").get<std::string>() + "," + m.at("method").get<std::string>() + "," +
             m.at("seed").dump() + "," + number("mean_l2") + "," + number("hausdorff") + "," +
             number("acceptance_rate") + "," + number("wall_ms") + "\n";
      ++rows;
    } catch (const std::exception& e) {
      std::cerr << "warning: skipping " << dir.string() << ": " << e.what() << "\n";
    }
  }
  if (o.out.empty()) {
    std::cout << csv;
  } else {
    write_file(o.out, csv);
  }
  if (rows == 0) {
    std::cerr << "error: no usable result directories\n";
    return 1;
  }
  return 0;
}

void add_run_options(CLI::App* app, RunOptions& o) {
  app->add_option("--model", o.model, "model file")->required();
  app->add_option("--target", o.targets, "target mesh (repeatable)")->required();
  app->add_option("--method", o.method, "mcmc or icp")->capture_default_str();
  app->add_option("--likelihood", o.likelihood, "l2, hausdorff or collective")->capture_default_str();
  app->add_option("--sigma-l2", o.sigma_l2, "L2 likelihood sigma (mm)")->capture_default_str();
  app->add_option("--lambda-h", o.lambda_h, "Hausdorff rate (1/mm)")->capture_default_str();
  app->add_option("--sigma-cl", o.sigma_cl, "collective likelihood sigma (mm^2)")->capture_default_str();
  app->add_option("--filter-boundary", o.filter_boundary, "drop boundary matches in the collective likelihood")
      ->capture_default_str();
  app->add_option("--proposal", o.proposal, "cp, random-walk or mixture")->capture_default_str();
  app->add_option("--normal-variance", o.normal_variance, "CP noise along the normal (mm^2)")->capture_default_str();
  app->add_option("--tangential-variance", o.tangential_variance, "CP noise along the tangent plane (mm^2)")
      ->capture_default_str();
  app->add_option("--flip-probability", o.flip_probability, "CP probability of target-to-model matching")
      ->capture_default_str();
  app->add_option("--cp-filter-boundary", o.cp_filter_boundary, "drop CP matches on the target boundary")
      ->capture_default_str();
  app->add_option("--cp-weight", o.cp_weight, "CP share in the mixture proposal")->capture_default_str();
  app->add_option("--rw-scales", o.rw_scales, "random-walk scales")->delimiter(',')->capture_default_str();
  app->add_option("--iterations", o.iterations)->capture_default_str();
  app->add_option("--burn-in", o.burn_in)->capture_default_str();
  app->add_option("--thinning", o.thinning)->capture_default_str();
  app->add_option("--seed", o.seed, "first seed")->capture_default_str();
  app->add_option("--runs", o.runs, "seeds per target (seed, seed+1, ...)")->capture_default_str();
  app->add_option("--init-scale", o.init_scale, "random start: init ~ N(0, scale^2 I); 0 starts at the mean")
      ->capture_default_str();
  app->add_option("--icp-iterations", o.icp_iterations)->capture_default_str();
  app->add_option("--icp-sigma", o.icp_sigma, "ICP correspondence noise (mm)")->capture_default_str();
  app->add_option("--out", o.out, "result directory")->required();
  app->add_option("--config", "configuration file (TOML or INI, keys are option names); flags override it");
}

// Replaces `--config FILE` with the flags it contains, skipping any option
// also given on the command line.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  auto it = std::find(args.begin(), args.end(), "--config");
  std::string file;
  if (it != args.end() && it + 1 != args.end()) {
    file = *(it + 1);
    args.erase(it, it + 2);
  } else {
    for (auto a = args.begin(); a != args.end(); ++a) {
      if (a->rfind("--config=", 0) == 0) {
        file = a->substr(9);
        args.erase(a);
        break;
      }
    }
  }
  if (file.empty()) return args;

  std::ifstream in(file);
  if (!in) throw ValidationError("cannot read config file " + file);
  std::set<std::string> given;
  for (const auto& a : args)
    if (a.rfind("--", 0) == 0) given.insert(a.substr(2, a.find('=') - 2));
  std::vector<std::string> flags;
  for (const CLI::ConfigItem& item : CLI::ConfigTOML().from_config(in)) {
    if (item.name == "++" || item.name == "--" || given.count(item.name)) continue;
    flags.push_back("--" + item.name);
    flags.insert(flags.end(), item.inputs.begin(), item.inputs.end());
  }
  // Insert right after the subcommand name.
  args.insert(args.begin() + (args.empty() ? 0 : 1), flags.begin(), flags.end());
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Probabilistic non-rigid surface registration with Gaussian process shape models"};
  app.require_subcommand(1);

  BuildOptions build;
  auto* build_cmd = app.add_subcommand("build-model", "build a low-rank Gaussian process model on a reference mesh");
  build_cmd->add_option("--reference", build.reference, "reference mesh (PLY or OBJ)")->required()->check(CLI::ExistingFile);
  build_cmd->add_option("--scale", build.scale, "kernel variance s (mm^2)")->capture_default_str();
  build_cmd->add_option("--bandwidth", build.bandwidth, "kernel bandwidth sigma (mm)")->capture_default_str();
  build_cmd->add_option("--rank", build.rank, "number of basis functions")->capture_default_str();
  build_cmd->add_option("--out", build.out, "model file")->required();
  build_cmd->add_option("--config", "configuration file (TOML or INI, keys are option names); flags override it");

  RunOptions run;
  auto* register_cmd = app.add_subcommand("register", "register a model to target meshes");
  add_run_options(register_cmd, run);

  RunOptions recon;
  recon.method = "mcmc";
  recon.likelihood = "collective";
  auto* reconstruct_cmd = app.add_subcommand("reconstruct", "register to a partial target and report uncertainty");
  add_run_options(reconstruct_cmd, recon);
  reconstruct_cmd->add_option("--excision-center", recon.excision_center, "x,y,z")->delimiter(',')->expected(3);
  reconstruct_cmd->add_option("--excision-radius", recon.excision_radius, "mm")->capture_default_str();

  SynthOptions synth;
  auto* synth_cmd = app.add_subcommand("synth", "generate synthetic meshes");
  synth_cmd->add_option("--shape", synth.shape, "ellipsoid, thin-cylinder or face-plate")->capture_default_str();
  synth_cmd->add_option("--resolution", synth.resolution)->capture_default_str();
  synth_cmd->add_option("--size", synth.size,
                        "ellipsoid semi-axes a,b,c; cylinder radius,length,0; plate side,bump height,bump width")
      ->delimiter(',')
      ->expected(3);
  synth_cmd->add_option("--model", synth.model, "draw an in-span target from this model instead");
  synth_cmd->add_option("--seed", synth.seed)->capture_default_str();
  synth_cmd->add_option("--scale", synth.scale, "coefficient scale for in-span targets")->capture_default_str();
  synth_cmd->add_option("--translate", synth.translate, "x,y,z")->delimiter(',')->expected(3);
  synth_cmd->add_option("--excision-center", synth.excision_center, "x,y,z")->delimiter(',')->expected(3);
  synth_cmd->add_option("--excision-radius", synth.excision_radius, "mm")->capture_default_str();
  synth_cmd->add_option("--out", synth.out, "output mesh (.ply or .obj)")->required();

  EvaluateOptions evaluate;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "summarize result directories as CSV");
  evaluate_cmd->add_option("dirs", evaluate.dirs, "result directories (or parents of them)")->required();
  evaluate_cmd->add_option("--out", evaluate.out, "CSV file (default: stdout)");

  try {
    std::vector<std::string> args = expand_config(argc, argv);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*build_cmd) cmd_build_model(build);
    if (*register_cmd) cmd_register(run, false);
    if (*reconstruct_cmd) cmd_register(recon, true);
    if (*synth_cmd) cmd_synth(synth);
    if (*evaluate_cmd) return cmd_evaluate(evaluate);
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
