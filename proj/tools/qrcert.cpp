// qrcert command-line tool: generators, checkers, analyzers and pipelines.
#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "qrcert/cut_engine.hpp"
#include "qrcert/density_space.hpp"
#include "qrcert/exact_matrix.hpp"
#include "qrcert/parallel.hpp"
#include "qrcert/pipeline.hpp"
#include "qrcert/structure.hpp"

namespace fs = std::filesystem;
using namespace qr;

namespace {

// Flags every subcommand accepts.
struct Common {
  std::uint64_t seed = 1;
  std::uint64_t budget = 0;  // 0 = subcommand default
  double tol = -1;           // < 0 = no gate / subcommand default
  std::string out;
  unsigned threads = 0;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--seed", c.seed, "Master seed");
  app->add_option("--budget", c.budget, "Sample / enumeration / node budget");
  app->add_option("--tol", c.tol, "Tolerance gate");
  app->add_option("--out", c.out, "Output file or directory");
  app->add_option("--threads", c.threads, "Worker threads (default: hardware)");
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  if (const auto dir = fs::path(path).parent_path(); !dir.empty()) fs::create_directories(dir);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

std::string parts_text(const Partition& parts) {
  std::string s;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) s += '|';
    for (std::size_t j = 0; j < parts[i].size(); ++j) s += (j ? "," : "") + std::to_string(parts[i][j]);
  }
  return s;
}

Partition parse_parts(const std::string& text) {
  Partition parts;
  for (const auto& block : split(text, '|')) parts.push_back(split_ints(block));
  return parts;
}

// Parts of a generated graph come from its sidecar; otherwise t consecutive blocks.
Partition load_parts(const std::string& input, const std::string& parts_file, int t, int n) {
  const std::string meta = parts_file.empty() ? input + ".meta" : parts_file;
  if (t > 0) return consecutive_equipartition(n - n % t, t);
  if (fs::exists(meta)) {
    const auto kv = KeyValues::parse(read_text(meta));
    if (kv.has("parts")) return parse_parts(kv.get("parts"));
  }
  throw std::invalid_argument("no partition: pass --t or generate the input with a .meta sidecar");
}

std::string relative_to(const std::string& target, const std::string& report) {
  if (report.empty() || report == "-") return target;
  const auto base = fs::absolute(fs::path(report)).parent_path();
  return fs::relative(fs::absolute(target), base).generic_string();
}

int finish_report(const DeviationReport& rep, const Common& c) {
  write_text(c.out, rep.to_text());
  if (c.tol >= 0 && rep.max_abs_deviation > c.tol) {
    std::cerr << "deviation " << format_double(rep.max_abs_deviation) << " exceeds --tol " << format_double(c.tol) << '\n';
    return exit_gate_failure;
  }
  return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quasi-random cut property toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolkitVersion));

  // gen
  Common gen_c;
  GenSpec spec;
  std::string family = "gnp", gen_config;
  auto* gen = app.add_subcommand("gen", "Generate a graph; writes an edge list and a .meta sidecar");
  add_common(gen, gen_c);
  gen->add_option("--family", family, "gnp | half_split | planted_structure | tripartite | complete | empty");
  gen->add_option("--config", gen_config, "GenSpec key-value file (overrides the flags)");
  gen->add_option("--n", spec.n);
  gen->add_option("--p", spec.p);
  gen->add_option("--t", spec.t);
  gen->add_option("--m", spec.m);
  gen->add_option("--s", spec.s);
  gen->add_option("--x", spec.x);
  gen->add_option("--y", spec.y);
  gen->add_option("--d12", spec.d12);
  gen->add_option("--d13", spec.d13);
  gen->add_option("--d23", spec.d23);

  // check
  Common chk_c;
  std::string property, input, hyper_input, parts_file, pair = "0,1";
  double p = 0.5, alpha = 0.5, epsilon = 0.1;
  std::vector<double> alphas{0.5, 0.5};
  int k = 3, check_t = 0;
  auto* check = app.add_subcommand("check", "Evaluate a quasi-random property; writes a deviation report");
  add_common(check, chk_c);
  check->add_option("--property", property, "p1 | p2 | p3 | cut_graph | cut_hypergraph | clique_cut | regularity")->required();
  check->add_option("--input", input, "Graph (or hypergraph for cut_hypergraph) edge list")->required();
  check->add_option("--p", p, "Reference density");
  check->add_option("--alpha", alpha, "Subset fraction for p2");
  check->add_option("--alphas", alphas, "Cut fractions")->delimiter(',');
  check->add_option("--k", k, "Clique size for clique_cut");
  check->add_option("--pair", pair, "Part indices for regularity");
  check->add_option("--epsilon", epsilon, "Regularity epsilon");
  check->add_option("--t", check_t, "Use t consecutive parts for regularity");
  check->add_option("--parts", parts_file, "Partition sidecar for regularity");

  // swap
  Common swap_c;
  std::string swap_input, swap_parts;
  int swap_i = 0, swap_j = 1, swap_k = 3, swap_t = 0;
  double swap_alpha = 0.5;
  auto* swap = app.add_subcommand("swap", "Swap-partition experiment between two parts");
  add_common(swap, swap_c);
  swap->add_option("--input", swap_input)->required();
  swap->add_option("--i", swap_i);
  swap->add_option("--j", swap_j);
  swap->add_option("--alpha", swap_alpha);
  swap->add_option("--k", swap_k);
  swap->add_option("--t", swap_t, "Use t consecutive parts");
  swap->add_option("--parts", swap_parts, "Partition sidecar");

  // classify
  Common cls_c;
  std::string cls_input, cls_parts;
  int cls_t = 0;
  auto* classify = app.add_subcommand("classify", "Classify the density profile of a partition");
  add_common(classify, cls_c);
  classify->add_option("--input", cls_input)->required();
  classify->add_option("--t", cls_t, "Use t consecutive parts");
  classify->add_option("--parts", cls_parts, "Partition sidecar");

  // matrix
  Common mat_c;
  std::string mat_family = "inclusion", subset_i;
  int mt = 6, mh = 3, mk = 2, mr = 2;
  double mp = 0.5;
  bool want_rank = false, want_dedup = false;
  auto* matrix = app.add_subcommand("matrix", "Build inclusion / crossing matrices or u-vectors");
  add_common(matrix, mat_c);
  matrix->add_option("--family", mat_family, "inclusion | M | N | N-distinct | u");
  matrix->add_option("--t", mt);
  matrix->add_option("--row-size", mh, "Row subset size h for inclusion");
  matrix->add_option("--k", mk);
  matrix->add_option("--r", mr);
  matrix->add_option("--p", mp, "Density for u");
  matrix->add_option("--subset", subset_i, "Comma list I for u (|I| = t/2)");
  matrix->add_flag("--rank", want_rank, "Print the exact rank");
  matrix->add_flag("--dedup", want_dedup, "Remove repeated rows");

  // factor
  Common fac_c;
  std::string fac_input;
  int fac_k = 3;
  auto* factor = app.add_subcommand("factor", "Search for a perfect K_k-factor");
  add_common(factor, fac_c);
  factor->add_option("--input", fac_input)->required();
  factor->add_option("--k", fac_k);

  // run
  Common run_c;
  std::string run_preset, run_config;
  bool list_presets = false;
  auto* run = app.add_subcommand("run", "Run a pipeline from a preset or config file");
  add_common(run, run_c);
  run->add_option("--preset", run_preset);
  run->add_option("--config", run_config);
  run->add_flag("--list", list_presets, "List presets");

  // verify
  Common ver_c;
  std::string report_path;
  auto* verify = app.add_subcommand("verify", "Re-evaluate a report's witness against its input");
  add_common(verify, ver_c);
  verify->add_option("report", report_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_invalid_config;
  }

  try {
    for (const Common* c : {&gen_c, &chk_c, &swap_c, &cls_c, &mat_c, &fac_c, &run_c, &ver_c})
      if (c->threads) set_thread_count(c->threads);

    if (*gen) {
      if (!gen_config.empty()) spec = GenSpec::from_text(read_text(gen_config));
      else spec.family = parse_family(family);
      if (gen->count("--seed") || gen_config.empty()) spec.seed = gen_c.seed;
      const auto g = generate(spec);
      const std::string out = gen_c.out.empty() ? "graph.txt" : gen_c.out;
      if (const auto dir = fs::path(out).parent_path(); !dir.empty()) fs::create_directories(dir);
      save_edge_list_file(out, g.graph);
      write_text(out + ".meta", spec.to_text() + "parts = " + parts_text(g.parts) + "\n");
      std::cerr << out << ": " << g.graph.n() << " vertices, " << g.graph.num_edges() << " edges\n";
      return exit_ok;
    }

    if (*check) {
      const Property prop = parse_property(property);
      SearchOptions opts;
      opts.seed = chk_c.seed;
      if (chk_c.budget) opts.budget = chk_c.budget;
      DeviationReport rep;
      if (prop == Property::cut_hypergraph) {
        const auto h = load_hypergraph_file(input).hypergraph;
        rep = check_cut_hypergraph(h, p, alphas, opts);
      } else {
        const auto g = load_graph_file(input).graph;
        switch (prop) {
          case Property::p1: rep = check_p1(g, p, opts); break;
          case Property::p2: rep = check_p2(g, p, alpha, opts); break;
          case Property::p3: rep = check_p3(g, p); break;
          case Property::cut_graph: rep = check_cut_graph(g, p, alphas, opts); break;
          case Property::clique_cut: rep = check_clique_cut(g, p, k, alphas, opts); break;
          case Property::regularity: {
            const auto parts = load_parts(input, parts_file, check_t, g.n());
            const auto ij = split_ints(pair);
            if (ij.size() != 2 || ij[0] < 0 || ij[1] < 0 || static_cast<std::size_t>(std::max(ij[0], ij[1])) >= parts.size())
              throw std::invalid_argument("--pair needs two part indices");
            rep = regularity_deviation(g, parts[static_cast<std::size_t>(ij[0])], parts[static_cast<std::size_t>(ij[1])],
                                       epsilon, chk_c.budget ? chk_c.budget : 10'000, chk_c.seed);
            break;
          }
          default: break;
        }
      }
      rep.input = relative_to(input, chk_c.out);
      return finish_report(rep, chk_c);
    }

    if (*swap) {
      const auto g = load_graph_file(swap_input).graph;
      const auto parts = load_parts(swap_input, swap_parts, swap_t, g.n());
      const auto s = swap_experiment(g, parts, swap_i, swap_j, swap_alpha, swap_c.seed, swap_k);
      const auto res = residual_matrix(s.stats);
      KeyValues kv;
      kv.set("i", std::to_string(s.i));
      kv.set("j", std::to_string(s.j));
      kv.set("k", std::to_string(s.k));
      kv.set("alpha", format_double(s.alpha));
      kv.set("alpha_effective", format_double(s.alpha_effective));
      kv.set("d0", join_doubles(s.d0.values));
      kv.set("d_alpha", join_doubles(s.d_alpha.values));
      kv.set("d1", join_doubles(s.d1.values));
      kv.set("d_prime", join_doubles(s.d_prime.values));
      kv.set("predicted", join_doubles(s.predicted.values));
      kv.set("max_prediction_error", format_double(s.max_prediction_error()));
      kv.set("residual_max", format_double(res.max_abs));
      kv.set("residual_mean", format_double(res.mean_abs));
      write_text(swap_c.out, kv.to_text());
      const double gate = swap_c.tol >= 0 ? swap_c.tol : 0.03;
      return s.max_prediction_error() <= gate ? exit_ok : exit_gate_failure;
    }

    if (*classify) {
      const auto g = load_graph_file(cls_input).graph;
      const auto parts = load_parts(cls_input, cls_parts, cls_t, g.n());
      const auto v = classify_structure(partition_stats(g, parts), cls_c.tol >= 0 ? cls_c.tol : 0.02);
      write_text(cls_c.out, v.to_text());
      return exit_ok;
    }

    if (*matrix) {
      const std::uint64_t budget = mat_c.budget ? mat_c.budget : kDefaultEnumerationBudget;
      if (mat_family == "u") {
        std::uint64_t mask = 0;
        for (int e : split_ints(subset_i)) {
          if (e < 0 || e >= mt) throw std::invalid_argument("--subset element out of range");
          mask |= std::uint64_t{1} << e;
        }
        const auto u = u_vector(mt, mk, mp, mask);
        std::string text;
        for (auto m : subsets_colex(mt, mk)) text += subset_label(m) + " " + format_double(u.at(m)) + "\n";
        write_text(mat_c.out, text);
        return exit_ok;
      }
      ExactMatrix m;
      if (mat_family == "inclusion") m = inclusion_matrix(mt, mh, mk);
      else if (mat_family == "M") m = crossing_matrix_M(mt, mr, mk, budget);
      else if (mat_family == "N") m = crossing_submatrix_N(mt, mr, mk, budget);
      else if (mat_family == "N-distinct") m = crossing_submatrix_N_distinct(mt, mr, mk);
      else throw std::invalid_argument("unknown matrix family '" + mat_family + "'");
      if (want_dedup) m = dedup_rows(m);
      std::ostringstream ss;
      write_triplets(ss, m);
      write_text(mat_c.out, ss.str());
      if (want_rank) {
        const auto r = rank_exact(m, mat_c.seed);
        std::cerr << "rank = " << r.rank << " (" << r.method << ", " << m.rows << "x" << m.cols << ")\n";
      }
      return exit_ok;
    }

    if (*factor) {
      const auto g = load_graph_file(fac_input).graph;
      const auto f = clique_factor(g, fac_k, fac_c.budget ? fac_c.budget : 10'000'000);
      std::string text;
      const char* status = f.status == CliqueFactorResult::Status::found       ? "found"
                           : f.status == CliqueFactorResult::Status::no_factor ? "no_factor"
                                                                               : "budget_exceeded";
      text += "status = " + std::string(status) + "\nnodes = " + std::to_string(f.nodes) + "\n";
      for (std::size_t i = 0; i < f.cliques.size(); ++i) {
        std::string c;
        for (std::size_t a = 0; a < f.cliques[i].size(); ++a) c += (a ? "," : "") + std::to_string(f.cliques[i][a]);
        text += "clique." + std::to_string(i) + " = " + c + "\n";
      }
      write_text(fac_c.out, text);
      if (f.status == CliqueFactorResult::Status::budget_exceeded) return exit_internal_fault;
      return f.status == CliqueFactorResult::Status::found ? exit_ok : exit_gate_failure;
    }

    if (*run) {
      if (list_presets) {
        for (const auto& n : preset_names()) std::cout << n << '\n';
        return exit_ok;
      }
      if (run_preset.empty() == run_config.empty()) throw std::invalid_argument("run needs exactly one of --preset, --config");
      ExperimentConfig cfg = run_preset.empty() ? ExperimentConfig::from_text(read_text(run_config)) : preset(run_preset);
      if (run->count("--seed")) cfg.seed = run_c.seed;
      if (run_c.budget) cfg.budget = run_c.budget;
      if (run_c.tol >= 0) cfg.tol = run_c.tol;
      if (!run_c.out.empty()) cfg.out = run_c.out;
      const auto res = run_pipeline(cfg);
      for (const auto& s : res.stages)
        std::cout << (s.passed ? "PASS " : "FAIL ") << s.stage << ": " << s.summary << " [" << s.report_file << "]\n";
      if (!res.error.empty()) std::cerr << "error: " << res.error << '\n';
      return res.exit_code;
    }

    if (*verify) {
      const auto r = verify_report(report_path);
      std::cout << (r.ok ? "OK " : "MISMATCH ") << r.message << '\n';
      return r.ok ? exit_ok : exit_gate_failure;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_invalid_config;
  } catch (const EnumerationBudgetExceeded& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_invalid_config;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return exit_internal_fault;
  }
  return exit_ok;
}
