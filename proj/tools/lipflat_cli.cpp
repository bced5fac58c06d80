#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <memory>
#include <sstream>

#include "lipflat/expansion.hpp"
#include "lipflat/experiments.hpp"
#include "lipflat/samplers.hpp"
#include "lipflat/transform.hpp"

using namespace lipflat;

namespace {

struct Globals {
  std::uint64_t seed = 1;
  std::string out;
  std::string format = "csv";
  std::uint64_t cap = 10'000'000;
  unsigned threads = 1;
};

struct FunctionArgs {
  std::string graph;
  Vertex v0 = 0;
  int slope = 1;
  bool hom = false;

  FunctionMode mode() const { return hom ? FunctionMode::homomorphism() : FunctionMode::lipschitz(slope); }
};

void add_function_args(CLI::App* cmd, FunctionArgs& a) {
  cmd->add_option("--graph,-g", a.graph, "graph spec, e.g. cycle:6 or file:edges.txt")->required();
  cmd->add_option("--v0", a.v0, "pinned vertex");
  cmd->add_option("--M", a.slope, "Lipschitz constant")->check(CLI::PositiveNumber);
  cmd->add_flag("--hom", a.hom, "graph homomorphisms to Z instead of Lipschitz functions");
}

// Writes to --out when given, else stdout.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw Error(Errc::io, "cannot write " + path);
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

void write_functions(std::ostream& out, const std::vector<HeightFunction>& fs, std::size_t n, const std::string& format) {
  if (format == "csv") {
    for (std::size_t v = 0; v < n; ++v) out << (v ? "," : "") << 'v' << v;
    out << '\n';
    for (const auto& f : fs) {
      for (std::size_t v = 0; v < f.size(); ++v) out << (v ? "," : "") << f[static_cast<Vertex>(v)];
      out << '\n';
    }
    return;
  }
  for (const auto& f : fs) out << nlohmann::json{{"values", f.values}}.dump() << '\n';
}

double lambda_from(const std::string& source, const Graph& g, ExpansionMode mode) {
  if (source == "spectral") return spectral_lambda(g, mode);
  if (source == "exhaustive") return exhaustive_lambda(g, mode);
  std::size_t used = 0;
  const double value = std::stod(source, &used);
  if (used != source.size() || value < 0.0) throw Error(Errc::parse, "bad lambda '" + source + "'");
  return value;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lipschitz and homomorphism height functions on expanders and trees"};
  app.require_subcommand(1);
  Globals gl;
  app.add_option("--seed", gl.seed, "random seed")->capture_default_str();
  app.add_option("--out,-o", gl.out, "output file (default stdout)");
  app.add_option("--format", gl.format, "csv or jsonl")->check(CLI::IsMember({"csv", "jsonl"}))->capture_default_str();
  app.add_option("--cap", gl.cap, "enumeration cap")->capture_default_str();
  app.add_option("--threads", gl.threads, "worker threads (results never depend on it)")->capture_default_str();
  app.fallthrough();

  // gen
  auto* gen = app.add_subcommand("gen", "generate a graph and write its edge list");
  std::string gen_spec;
  gen->add_option("spec", gen_spec, "graph spec")->required();

  // certify
  auto* certify_cmd = app.add_subcommand("certify", "expansion parameters and goodness predicates");
  std::string certify_graph;
  bool certify_bipartite = false;
  std::vector<int> certify_slopes{1};
  std::size_t certify_bits = 24;
  bool certify_props = false;
  certify_cmd->add_option("--graph,-g", certify_graph, "graph spec")->required();
  certify_cmd->add_flag("--bipartite", certify_bipartite, "bi-expander parameters");
  certify_cmd->add_option("--slopes", certify_slopes, "Lipschitz constants for the M-good predicate")->delimiter(',');
  certify_cmd->add_option("--max-bits", certify_bits, "largest side for exhaustive search");
  certify_cmd->add_flag("--props", certify_props, "also check the expansion inequalities");

  // enumerate
  auto* enum_cmd = app.add_subcommand("enumerate", "list every pinned function");
  FunctionArgs enum_args;
  add_function_args(enum_cmd, enum_args);

  // sample
  auto* sample_cmd = app.add_subcommand("sample", "Glauber dynamics samples");
  FunctionArgs sample_args;
  McmcOptions mcmc;
  add_function_args(sample_cmd, sample_args);
  sample_cmd->add_option("--burnin", mcmc.burnin)->capture_default_str();
  sample_cmd->add_option("--thin", mcmc.thin)->capture_default_str();
  sample_cmd->add_option("--samples", mcmc.samples, "samples per chain")->capture_default_str();
  sample_cmd->add_option("--chains", mcmc.chains)->capture_default_str();

  // phase
  auto* phase_cmd = app.add_subcommand("phase", "phase of a function read from a file");
  FunctionArgs phase_args;
  std::string phase_file, phase_lambda = "spectral";
  add_function_args(phase_cmd, phase_args);
  phase_cmd->add_option("--function,-f", phase_file, "one value per line")->required();
  phase_cmd->add_option("--lambda", phase_lambda, "spectral, exhaustive or a number")->capture_default_str();

  // verify-transform
  auto* verify_cmd = app.add_subcommand("verify-transform", "exhaustive check of the flattening counts");
  FunctionArgs verify_args;
  std::vector<Vertex> verify_vertices;
  std::size_t verify_t = 1;
  std::string verify_level = "phase", verify_lambda = "exhaustive";
  std::uint64_t verify_guard = kDefaultImageGuard;
  add_function_args(verify_cmd, verify_args);
  verify_cmd->add_option("--v", verify_vertices, "vertices to test (default all)")->delimiter(',');
  verify_cmd->add_option("--t", verify_t)->capture_default_str();
  verify_cmd->add_option("--level", verify_level, "phase or zero")
      ->check(CLI::IsMember({"phase", "zero"}))
      ->capture_default_str();
  verify_cmd->add_option("--lambda", verify_lambda, "spectral, exhaustive or a number")->capture_default_str();
  verify_cmd->add_option("--image-guard", verify_guard, "largest image listed in full")->capture_default_str();

  // experiment
  auto* exp_cmd = app.add_subcommand("experiment", "run a config-driven experiment");
  std::string exp_config;
  std::vector<std::string> exp_sets;
  exp_cmd->add_option("config", exp_config, "key = value file")->required()->check(CLI::ExistingFile);
  exp_cmd->add_option("--set", exp_sets, "override, key=value");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      const Graph g = graph_from_spec(gen_spec, gl.seed);
      Output out(gl.out);
      write_graph(out.stream(), g);
    } else if (*certify_cmd) {
      const Graph g = graph_from_spec(certify_graph, gl.seed);
      const auto mode = certify_bipartite ? ExpansionMode::bipartite : ExpansionMode::general;
      const ExpansionReport r = certify(g, mode, certify_slopes, {}, certify_bits);
      nlohmann::ordered_json j;
      j["mode"] = certify_bipartite ? "bipartite" : "general";
      j["n"] = r.n;
      j["d"] = r.d;
      j["lambda_spectral"] = r.lambda_spectral;
      j["lambda_exhaustive"] = r.lambda_exhaustive ? nlohmann::ordered_json(*r.lambda_exhaustive) : nullptr;
      j["predicates"] = r.predicates;
      if (certify_props) {
        const double lambda = r.lambda_exhaustive.value_or(r.lambda_spectral);
        const auto props = check_expansion_props(g, lambda, mode);
        for (const auto& c : props.checks)
          j["props"][c.name] = {{"checked", c.checked}, {"failed", c.failed}, {"skipped", c.skipped}, {"witness", c.witness}};
      }
      Output out(gl.out);
      out.stream() << j.dump(2) << '\n';
    } else if (*enum_cmd) {
      const Graph g = graph_from_spec(enum_args.graph, gl.seed);
      const auto r = enumerate(g, enum_args.v0, enum_args.mode(), gl.cap);
      Output out(gl.out);
      write_functions(out.stream(), r.functions, g.num_vertices(), gl.format);
      std::cerr << "count " << r.count << '\n';
    } else if (*sample_cmd) {
      const Graph g = graph_from_spec(sample_args.graph, gl.seed);
      mcmc.seed = gl.seed;
      mcmc.threads = gl.threads;
      const auto samples = mcmc_sample(g, sample_args.v0, sample_args.mode(), mcmc);
      Output out(gl.out);
      write_functions(out.stream(), samples, g.num_vertices(), gl.format);
    } else if (*phase_cmd) {
      const Graph g = graph_from_spec(phase_args.graph, gl.seed);
      std::ifstream in(phase_file);
      if (!in) throw Error(Errc::io, "cannot read " + phase_file);
      const HeightFunction f = read_function(in, phase_args.v0, phase_args.mode());
      if (const auto bad = validate(g, f); !bad.empty()) throw Error(Errc::invalid_argument, bad.front().describe());
      const double lambda =
          lambda_from(phase_lambda, g, phase_args.hom ? ExpansionMode::bipartite : ExpansionMode::general);
      const Phase p = compute_phase(g, f, lambda);
      nlohmann::ordered_json j;
      j["lambda"] = lambda;
      j["low"] = p.low;
      j["high"] = p.high;
      j["class_index"] = p.class_index ? nlohmann::ordered_json(*p.class_index) : nullptr;
      j["far_count"] = p.far_count ? nlohmann::ordered_json(*p.far_count) : nullptr;
      j["outside"] = count_outside(f, p.low, p.high);
      Output out(gl.out);
      out.stream() << j.dump(2) << '\n';
    } else if (*verify_cmd) {
      const Graph g = graph_from_spec(verify_args.graph, gl.seed);
      CountingOptions options;
      options.level = verify_level == "zero" ? LevelStrategy::zero : LevelStrategy::phase;
      if (options.level == LevelStrategy::phase)
        options.lambda =
            lambda_from(verify_lambda, g, verify_args.hom ? ExpansionMode::bipartite : ExpansionMode::general);
      options.cap = gl.cap;
      options.image_guard = verify_guard;
      options.seed = gl.seed;
      if (verify_vertices.empty())
        for (Vertex v = 0; v < g.num_vertices(); ++v) verify_vertices.push_back(v);
      Output out(gl.out);
      out.stream() << "v,t,check,checked,failed,skipped,omega_plus,witness\n";
      bool ok = true;
      for (Vertex v : verify_vertices) {
        const auto r = verify_counting(g, verify_args.v0, v, verify_t, verify_args.mode(), options);
        ok = ok && r.all_passed();
        for (const auto& c : r.checks)
          out.stream() << v << ',' << verify_t << ',' << c.name << ',' << c.checked << ',' << c.failed << ','
                       << c.skipped << ',' << r.omega_plus << ",\"" << c.witness << "\"\n";
      }
      if (!ok) {
        std::cerr << "verify-transform: some checks failed\n";
        return 1;
      }
    } else if (*exp_cmd) {
      ExperimentConfig config = load_config(exp_config);
      for (const auto& s : exp_sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw Error(Errc::parse, "--set expects key=value");
        apply_setting(config, s.substr(0, eq), s.substr(eq + 1));
      }
      if (app.get_option("--seed")->count()) config.seed = gl.seed;
      if (app.get_option("--out")->count()) config.out = gl.out;
      if (app.get_option("--format")->count()) config.format = gl.format == "csv" ? ReportFormat::csv : ReportFormat::jsonl;
      if (app.get_option("--cap")->count()) config.cap = gl.cap;
      if (app.get_option("--threads")->count()) config.threads = gl.threads;
      const ExperimentResult r = run_experiment(config);
      if (config.out.empty()) {
        emit_report(std::cout, r, config.format);
      } else {
        write_outputs(config, r);
      }
      for (const auto& note : r.notes) std::cerr << note << '\n';
      std::cerr << "rows " << r.rows.size() << " passed " << r.passed << " failed " << r.failed << " unchecked "
                << r.unchecked << '\n';
      if (!r.all_passed()) return 1;
    }
  } catch (const Error& e) {
    std::cerr << "error (" << errc_name(e.code()) << "): " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
