/*
 * Copyright 2026 The nbrw-lab Authors
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

// nbrw: experiment runner.
//
//   nbrw generate  write a graph as an edge list and summarize it
//   nbrw mixing    exact deviation-from-uniform sweep, rho and tau
//   nbrw visits    visit-count histograms over independent walks
//   nbrw sieve     Bonferroni bounds from a factorial-moment table
//
// Every output file carries {tool_version, master_seed, config_hash};
// timestamps go only to run.log.

#include <CLI11.hpp>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "nbrw/nbrw.hpp"

namespace fs = std::filesystem;
using nbrw::io::json;

namespace {

enum Exit { kOk = 0, kInvalidConfig = 2, kRefused = 3, kResourceCap = 4 };

int exit_code_for(nbrw::ErrorCode code) {
  using nbrw::ErrorCode;
  switch (code) {
    case ErrorCode::BipartiteOrDisconnected:
    case ErrorCode::Infeasible:
    case ErrorCode::OddDegreeSum:
      return kRefused;
    case ErrorCode::AttemptsExhausted:
    case ErrorCode::NoConvergence:
    case ErrorCode::OverflowRisk:
      return kResourceCap;
    default:
      return kInvalidConfig;
  }
}

std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t x) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

// Console summaries; files keep full precision.
std::string short_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) nbrw::fail(nbrw::ErrorCode::IoError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Options {
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::string out = ".";

  // graph source
  std::string named;
  std::string graph_file;
  std::uint32_t n = 0;
  std::uint32_t d = 3;
  std::uint32_t min_girth = 0;
  std::uint64_t max_attempts = 10000;

  // mixing
  std::uint32_t cap = 200;

  // visits
  std::string walk = "nbrw";
  std::uint64_t length = 0;
  std::uint32_t start = 0;
  std::uint64_t trials = 1;
  bool trace = false;
  std::uint32_t radius = 0;
  std::uint32_t t_range = 6;
  bool oracle = false;
  bool counts_csv = false;
  double delta = 0.5;

  // sieve
  std::string table_file;
  std::string preset;
  std::vector<double> mu;
  std::string from_trials;
  std::vector<std::uint64_t> m;
  std::uint64_t kmax = 1;
  double epsilon = -1;
  std::uint64_t brun_s = 0;
  std::uint64_t brun_T = 0;
};

class Runner {
 public:
  Runner(const Options& opt, std::string command, std::string config_text)
      : opt_(opt), command_(std::move(command)) {
    std::uint64_t h = fnv1a(command_);
    h = fnv1a(config_text, h);
    for (const auto* path : {&opt.graph_file, &opt.table_file, &opt.from_trials})
      if (!path->empty()) h = fnv1a(read_file(*path), h);
    config_hash_ = hex64(h);
    fs::create_directories(opt_.out);
  }

  json meta() const {
    return json{{"tool_version", NBRW_VERSION}, {"master_seed", opt_.seed}, {"config_hash", config_hash_}};
  }

  std::string csv_header() const {
    return "# tool_version=" NBRW_VERSION " master_seed=" + std::to_string(opt_.seed) +
           " config_hash=" + config_hash_ + "\n";
  }

  void write(const std::string& name, const std::string& body) const {
    std::ofstream out(fs::path(opt_.out) / name, std::ios::binary);
    if (!out) nbrw::fail(nbrw::ErrorCode::IoError, "cannot write " + name);
    out << body;
  }

  void write_json(const std::string& name, json j) const {
    j["meta"] = meta();
    write(name, j.dump(2) + "\n");
  }

  void log(const std::string& line) const {
    std::ofstream out(fs::path(opt_.out) / "run.log", std::ios::app);
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    out << stamp << " " << command_ << " config_hash=" << config_hash_ << " " << line << "\n";
  }

 private:
  const Options& opt_;
  std::string command_;
  std::string config_hash_;
};

// Walks and balls draw from a stream family distinct from the generator's.
std::uint64_t walk_seed(std::uint64_t master) { return nbrw::mix64(master ^ 0x57414C4B53454544ULL); }

nbrw::RegularGraph load_graph(const Options& opt) {
  if (!opt.named.empty()) return nbrw::named_graph(opt.named);
  if (!opt.graph_file.empty()) {
    std::ifstream in(opt.graph_file, std::ios::binary);
    if (!in) nbrw::fail(nbrw::ErrorCode::IoError, "cannot open " + opt.graph_file);
    return nbrw::read_edge_list(in);
  }
  if (opt.n == 0) nbrw::fail(nbrw::ErrorCode::InvalidArgument, "no graph source: use --named, --graph or --n");
  nbrw::GraphGenSpec spec;
  spec.n = opt.n;
  spec.d = opt.d;
  if (opt.min_girth > 0) spec.min_girth = opt.min_girth;
  spec.seed = opt.seed;
  spec.max_attempts = opt.max_attempts;
  return nbrw::random_regular(spec);
}

int cmd_generate(const Options& opt, const Runner& run) {
  const auto g = load_graph(opt);
  const auto gg = nbrw::girth(g);
  const auto spectrum = nbrw::second_eigenvalue(g);
  run.write("graph.edges", nbrw::to_edge_list(g));
  json info{{"n", g.n()}, {"d", g.d()}, {"lambda", spectrum.lambda}};
  info["girth"] = gg == nbrw::kInfinity ? json(nullptr) : json(gg);
  run.write_json("graph.meta.json", info);
  std::cout << "n=" << g.n() << " d=" << g.d() << " girth=" << (gg == nbrw::kInfinity ? "inf" : std::to_string(gg))
            << " lambda=" << short_double(spectrum.lambda) << "\n";
  run.log("ok");
  return kOk;
}

int cmd_mixing(const Options& opt, const Runner& run) {
  const auto g = load_graph(opt);
  const auto report = nbrw::fine_mixing_time_tau(g, opt.cap, opt.threads);
  run.write_json("mixing.json", nbrw::io::to_json(report));
  run.write("dev.csv", run.csv_header() + nbrw::io::dev_csv(report));
  std::cout << "rho=" << short_double(report.rho) << " lambda=" << short_double(report.lambda)
            << " tau=" << (report.tau ? std::to_string(*report.tau) : "null") << "\n";
  if (!report.tau) {
    std::cerr << "nbrw: dev(" << opt.cap << ") still above 1/n^2; raise --cap\n";
    run.log("tau not reached");
    return kResourceCap;
  }
  run.log("ok");
  return kOk;
}

int cmd_visits(const Options& opt, const Runner& run) {
  const bool graph_free = opt.oracle && opt.named.empty() && opt.graph_file.empty();
  std::optional<nbrw::RegularGraph> g;
  if (!graph_free) g = load_graph(opt);
  const std::uint64_t n = g ? g->n() : opt.n;
  if (n == 0) nbrw::fail(nbrw::ErrorCode::InvalidArgument, "oracle mode needs --n");
  if (opt.oracle && opt.radius > 0) nbrw::fail(nbrw::ErrorCode::InvalidArgument, "--radius has no meaning with --oracle");
  const std::uint64_t length = opt.length > 0 ? opt.length : n;
  const double mu = static_cast<double>(length) / static_cast<double>(n);

  std::vector<nbrw::VisitHistogram> hists(opt.trials);
  std::vector<std::uint64_t> max_visits(opt.trials);
  const std::uint64_t seed = walk_seed(opt.seed);
  nbrw::WalkConfig cfg;
  cfg.length = length;
  cfg.start = opt.start;
  cfg.kind = nbrw::parse_walk_kind(opt.walk);
  cfg.seed = seed;
  cfg.record_trace = opt.trace;
  if (opt.oracle) {
    if (opt.trials == 0) nbrw::fail(nbrw::ErrorCode::InvalidArgument, "trials must be at least 1");
    nbrw::parallel_for(opt.trials, opt.threads, [&](std::size_t i) {
      nbrw::Rng rng(seed, i);
      hists[i] = nbrw::balls_and_bins(length, n, rng);
      max_visits[i] = hists[i].max_load();
    });
  } else {
    std::optional<nbrw::VisitCounts> first;
    nbrw::for_each_trial(*g, cfg, opt.trials, opt.threads, [&](std::size_t i, nbrw::VisitCounts&& c) {
      hists[i] = nbrw::visit_histogram(c, *g, opt.radius);
      max_visits[i] = c.max_count();
      if (i == 0) first = std::move(c);
    });
    if (opt.counts_csv) run.write("counts.csv", run.csv_header() + nbrw::io::counts_csv(*first));
    if (opt.trace) {
      std::string body = run.csv_header() + "step,vertex\n";
      for (std::size_t i = 0; i < first->trace.size(); ++i)
        body += std::to_string(i) + "," + std::to_string(first->trace[i]) + "\n";
      run.write("trace.csv", body);
    }
  }

  nbrw::HistogramEnsemble ens;
  for (const auto& h : hists) ens.add(h);
  const auto law = ens.mean_law();
  const auto cmp = nbrw::compare_to_poisson(law, n, ens.max_load(), mu, opt.t_range, opt.delta);

  json report;
  report["mode"] = opt.oracle ? "balls_and_bins" : std::string(nbrw::to_string(cfg.kind));
  report["n"] = n;
  report["length"] = length;
  report["trials"] = opt.trials;
  report["excluded_radius"] = opt.radius;
  std::vector<double> means, errs;
  for (std::size_t t = 0; t <= std::max<std::size_t>(opt.t_range, law.size() - 1); ++t) {
    means.push_back(ens.mean(t));
    errs.push_back(ens.stderr_of_mean(t));
  }
  report["mean_fraction"] = means;
  report["stderr"] = errs;
  report["max_visits"] = max_visits;
  report["comparison"] = nbrw::io::to_json(cmp);
  report["pooled"] = nbrw::io::to_json(ens.pooled());
  run.write_json("report.json", report);
  run.write("histogram.csv", run.csv_header() + nbrw::io::histogram_csv(ens, mu, opt.t_range));

  std::cout << "trials=" << opt.trials << " n=" << n << " length=" << length
            << " tv=" << short_double(cmp.tv_distance) << " max_visit=" << ens.max_load() << "\n";
  run.log("ok");
  return kOk;
}

std::vector<std::vector<std::uint64_t>> read_tuples(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<std::vector<std::uint64_t>> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    std::vector<std::uint64_t> tuple;
    std::string tok;
    while (row >> tok) {
      std::uint64_t v = 0;
      if (!nbrw::detail::parse_uint(tok, v)) nbrw::fail(nbrw::ErrorCode::ParseError, "bad count '" + tok + "'");
      tuple.push_back(v);
    }
    if (!tuple.empty()) out.push_back(std::move(tuple));
  }
  return out;
}

int cmd_sieve(const Options& opt, const Runner& run) {
  const int sources = !opt.table_file.empty() + !opt.preset.empty() + !opt.from_trials.empty();
  if (sources != 1) nbrw::fail(nbrw::ErrorCode::InvalidArgument, "give exactly one of --table, --preset, --from-trials");

  std::vector<std::uint64_t> m = opt.m;
  auto depth_for = [&](std::size_t r) {
    if (m.empty()) m.assign(r, 0);
    std::uint64_t depth = *std::max_element(m.begin(), m.end()) + opt.kmax;
    if (opt.epsilon >= 0) depth = std::max<std::uint64_t>(depth, r * (opt.brun_T + 2 * opt.brun_s));
    return static_cast<std::uint32_t>(depth);
  };

  std::optional<nbrw::FactorialMomentTable> table;
  if (!opt.table_file.empty()) {
    json j;
    try {
      j = json::parse(read_file(opt.table_file));
    } catch (const json::exception& e) {
      nbrw::fail(nbrw::ErrorCode::ParseError, e.what());
    }
    table = nbrw::io::moment_table_from_json(j);
    if (m.empty()) m.assign(table->r(), 0);
  } else if (opt.preset == "poisson") {
    nbrw::PoissonParams params(opt.mu.empty() ? std::vector<double>{1.0} : opt.mu);
    table = nbrw::poisson_moment_table(params, depth_for(params.r()));
  } else if (opt.preset == "coin") {
    table = nbrw::factorial_moments_exact(nbrw::JointPmf{{2}, {0.5, 0.5}}, depth_for(1));
  } else if (!opt.preset.empty()) {
    nbrw::fail(nbrw::ErrorCode::InvalidArgument, "preset must be poisson or coin");
  } else {
    const auto tuples = read_tuples(opt.from_trials);
    if (tuples.empty()) nbrw::fail(nbrw::ErrorCode::EmptyEnsemble, "no tuples in " + opt.from_trials);
    table = nbrw::factorial_moments_mc(tuples, depth_for(tuples.front().size()));
  }

  const auto bounds = nbrw::bonferroni_bounds(*table, m, opt.kmax);
  json out = nbrw::io::to_json(bounds);
  if (opt.epsilon >= 0) {
    if (opt.mu.size() != table->r())
      nbrw::fail(nbrw::ErrorCode::DimensionMismatch, "the Brun check needs one --mu per coordinate");
    nbrw::BrunRegime regime{opt.epsilon, opt.brun_s, opt.brun_T, nbrw::PoissonParams(opt.mu)};
    out["brun"] = nbrw::io::to_json(nbrw::brun_hypothesis_check(*table, regime));
  }
  run.write_json("sieve.json", out);
  std::cout << "lower=" << short_double(bounds.lower) << " upper=" << short_double(bounds.upper) << "\n";
  run.log("ok");
  return kOk;
}

// Effective settings of the parsed command, in declaration order; the
// thread count and output directory do not affect results and are left out.
std::string effective_config(const CLI::App& app, const CLI::App& sub) {
  std::string text;
  for (const CLI::App* a : {&app, &sub})
    for (const CLI::Option* o : a->get_options()) {
      const std::string name = o->get_name();
      if (name == "--help" || name == "--threads" || name == "--out" || name == "--config" || name == "--version")
        continue;
      text += name + "=";
      for (const auto& r : o->results()) text += r + ";";
      text += "\n";
    }
  return text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Non-backtracking random walk laboratory"};
  app.set_version_flag("--version", NBRW_VERSION);
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "key=value settings file; [generate] style sections scope subcommand keys");
  Options opt;

  app.add_option("--seed", opt.seed, "master seed")->capture_default_str();
  app.add_option("--threads", opt.threads, "worker threads")->capture_default_str()->check(CLI::Range(1u, 1024u));
  app.add_option("--out", opt.out, "output directory")->capture_default_str();

  auto* named = app.add_option("--named", opt.named, "k4 | petersen | k33 | q3")->group("Graph");
  auto* file = app.add_option("--graph", opt.graph_file, "edge-list file")->group("Graph")->check(CLI::ExistingFile);
  auto* n = app.add_option("--n", opt.n, "vertices of a random regular graph (bins with --oracle)")->group("Graph");
  app.add_option("--d", opt.d, "degree")->capture_default_str()->group("Graph");
  app.add_option("--min-girth", opt.min_girth, "reject graphs of smaller girth")->group("Graph");
  app.add_option("--max-attempts", opt.max_attempts, "girth rejection budget")->capture_default_str()->group("Graph");
  named->excludes(file);
  file->excludes(named);
  (void)n;

  auto* gen = app.add_subcommand("generate", "write graph.edges and graph.meta.json");
  auto* mix = app.add_subcommand("mixing", "write mixing.json and dev.csv");
  mix->add_option("--cap", opt.cap, "largest k examined")->capture_default_str()->check(CLI::PositiveNumber);

  auto* vis = app.add_subcommand("visits", "write histogram.csv and report.json");
  vis->add_option("--walk", opt.walk, "nbrw | srw")->capture_default_str()->check(CLI::IsMember({"nbrw", "srw"}));
  vis->add_option("--length", opt.length, "walk length m (default n)");
  vis->add_option("--start", opt.start, "start vertex")->capture_default_str();
  vis->add_option("--trials", opt.trials, "independent walks")->capture_default_str()->check(CLI::PositiveNumber);
  vis->add_flag("--trace", opt.trace, "write trace.csv for trial 0");
  vis->add_option("--radius", opt.radius, "count only vertices at least this far from the start");
  vis->add_option("--t-range", opt.t_range, "compare t = 0..t_range")->capture_default_str();
  vis->add_option("--delta", opt.delta, "max-visit window half-width")->capture_default_str();
  vis->add_flag("--oracle", opt.oracle, "balls and bins instead of a walk");
  vis->add_flag("--counts-csv", opt.counts_csv, "write counts.csv for trial 0");

  auto* sie = app.add_subcommand("sieve", "write sieve.json");
  sie->add_option("--table", opt.table_file, "factorial-moment table (JSON)")->check(CLI::ExistingFile);
  sie->add_option("--preset", opt.preset, "poisson | coin");
  sie->add_option("--mu", opt.mu, "Poisson means")->delimiter(',');
  sie->add_option("--from-trials", opt.from_trials, "file of count tuples, one per line")->check(CLI::ExistingFile);
  sie->add_option("--m", opt.m, "target tuple")->delimiter(',');
  sie->add_option("--kmax", opt.kmax, "deepest partial sum")->capture_default_str()->check(CLI::PositiveNumber);
  sie->add_option("--epsilon", opt.epsilon, "run the Brun check with this epsilon");
  sie->add_option("--brun-s", opt.brun_s, "s of the Brun check");
  sie->add_option("--brun-T", opt.brun_T, "T of the Brun check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalidConfig;
  }

  CLI::App* sub = app.get_subcommands().front();
  try {
    Runner run(opt, sub->get_name(), effective_config(app, *sub));
    if (sub == gen) return cmd_generate(opt, run);
    if (sub == mix) return cmd_mixing(opt, run);
    if (sub == vis) return cmd_visits(opt, run);
    return cmd_sieve(opt, run);
  } catch (const nbrw::Error& e) {
    std::cerr << "nbrw: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "nbrw: " << e.what() << "\n";
    return kInvalidConfig;
  }
}
