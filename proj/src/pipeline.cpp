#include "qrcert/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

#include "qrcert/cut_engine.hpp"
#include "qrcert/density_space.hpp"
#include "qrcert/exact_matrix.hpp"
#include "qrcert/parallel.hpp"
#include "qrcert/reference.hpp"
#include "qrcert/rng.hpp"
#include "qrcert/structure.hpp"

namespace fs = std::filesystem;

namespace qr {

namespace {

const std::vector<std::string>& all_stages() {
  static const std::vector<std::string> names = {
      "gen",       "check_p1", "check_p2",   "check_p3",       "check_cut_graph", "check_clique_cut",
      "check_cut_hypergraph",  "regularity", "oracle",         "gottlieb",        "n_rank",
      "swap",      "classify", "identities", "w_distance",     "hajnal",          "concentration",
      "reproducibility"};
  return names;
}

bool needs_graph(std::string_view stage) {
  return stage.starts_with("check_") || stage == "regularity" || stage == "swap" || stage == "w_distance" ||
         stage == "concentration";
}

std::string join(const std::vector<std::string>& items, char sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

struct Context {
  const ExperimentConfig& cfg;
  fs::path out;
  std::optional<GeneratedGraph> graph;
};

struct Outcome {
  bool passed = true;
  KeyValues report;
  std::string summary;
};

// Gates compare a measured value against a bound and record the result.
class Gates {
 public:
  explicit Gates(KeyValues& report) : report_(report) {}
  void at_most(const std::string& name, double value, double bound) { add(name, value, "<=", bound, value <= bound); }
  void at_least(const std::string& name, double value, double bound) { add(name, value, ">=", bound, value >= bound); }
  void require(const std::string& name, bool ok) {
    report_.set("gate." + name, ok ? "pass" : "fail");
    passed_ = passed_ && ok;
  }
  bool passed() const { return passed_; }

 private:
  void add(const std::string& name, double value, const char* op, double bound, bool ok) {
    report_.set("gate." + name, format_double(value) + " " + op + " " + format_double(bound) + (ok ? " pass" : " fail"));
    passed_ = passed_ && ok;
  }
  KeyValues& report_;
  bool passed_ = true;
};

SearchOptions search_options(const Context& ctx, const std::string& stage) {
  SearchOptions o;
  o.budget = static_cast<std::uint64_t>(ctx.cfg.param_int(stage, "budget", static_cast<std::int64_t>(ctx.cfg.budget)));
  o.seed = stage_seed(ctx.cfg, stage);
  o.refine = static_cast<std::uint64_t>(ctx.cfg.param_int(stage, "refine", 16));
  o.enumeration_budget = ctx.cfg.enumeration_budget;
  o.exhaustive_max_n = static_cast<int>(ctx.cfg.param_int(stage, "exhaustive_max_n", 20));
  return o;
}

KeyValues report_from_text(const std::string& text) { return KeyValues::parse(text); }

// Deviation report plus its optional max/min gates.
Outcome deviation_outcome(const Context& ctx, const std::string& stage, DeviationReport dev, const std::string& input) {
  dev.input = input;
  Outcome out;
  out.report = report_from_text(dev.to_text());
  Gates gates(out.report);
  if (ctx.cfg.has_param(stage, "max")) gates.at_most("max_abs_deviation", dev.max_abs_deviation, ctx.cfg.param_double(stage, "max", 0));
  if (ctx.cfg.has_param(stage, "min")) gates.at_least("max_abs_deviation", dev.max_abs_deviation, ctx.cfg.param_double(stage, "min", 0));
  out.passed = gates.passed();
  out.summary = "deviation " + format_double(dev.max_abs_deviation) + " (" + (dev.mode == Mode::exhaustive ? "exhaustive" : "sampled") +
                ", " + std::to_string(dev.samples) + " evaluated)";
  return out;
}

double stage_p(const Context& ctx, const std::string& stage) { return ctx.cfg.param_double(stage, "p", ctx.cfg.p); }

// ---- stages ----

Outcome stage_gen(Context& ctx, const std::string& stage) {
  GenSpec spec = ctx.cfg.gen;
  spec.seed = derive_seed(stage_seed(ctx.cfg, stage), ctx.cfg.gen.seed);
  ctx.graph = generate(spec);
  save_edge_list_file((ctx.out / "graph.txt").string(), ctx.graph->graph);
  Outcome out;
  const Graph& g = ctx.graph->graph;
  out.report.set("family", std::string(family_name(spec.family)));
  out.report.set("vertices", std::to_string(g.n()));
  out.report.set("edges", std::to_string(g.num_edges()));
  const double pairs = static_cast<double>(g.n()) * (g.n() - 1) / 2.0;
  out.report.set("density", format_double(pairs > 0 ? static_cast<double>(g.num_edges()) / pairs : 0.0));
  out.report.set("parts", std::to_string(ctx.graph->parts.size()));
  out.report.set("seed", std::to_string(spec.seed));
  out.report.set("output", "graph.txt");
  out.summary = std::to_string(g.n()) + " vertices, " + std::to_string(g.num_edges()) + " edges";
  return out;
}

Outcome stage_check(Context& ctx, const std::string& stage) {
  const Graph& g = ctx.graph->graph;
  const auto opts = search_options(ctx, stage);
  const double p = stage_p(ctx, stage);
  if (stage == "check_p1") return deviation_outcome(ctx, stage, check_p1(g, p, opts), "graph.txt");
  if (stage == "check_p2")
    return deviation_outcome(ctx, stage, check_p2(g, p, ctx.cfg.param_double(stage, "alpha", 0.5), opts), "graph.txt");
  if (stage == "check_p3") return deviation_outcome(ctx, stage, check_p3(g, p), "graph.txt");
  if (stage == "check_cut_graph") return deviation_outcome(ctx, stage, check_cut_graph(g, p, ctx.cfg.alpha, opts), "graph.txt");
  if (stage == "check_clique_cut")
    return deviation_outcome(ctx, stage, check_clique_cut(g, p, ctx.cfg.k, ctx.cfg.alpha, opts), "graph.txt");
  // check_cut_hypergraph on the k-clique lift; density defaults to p^C(k,2).
  const int k = ctx.cfg.k;
  const UniformHypergraph h = clique_hypergraph(g, k);
  save_edge_list_file((ctx.out / "hypergraph.txt").string(), h);
  const double hp = ctx.cfg.param_double(stage, "p", std::pow(ctx.cfg.p, k * (k - 1) / 2));
  return deviation_outcome(ctx, stage, check_cut_hypergraph(h, hp, ctx.cfg.alpha, opts), "hypergraph.txt");
}

Outcome stage_regularity(Context& ctx, const std::string& stage) {
  const Graph& g = ctx.graph->graph;
  Partition parts = ctx.graph->parts;
  if (parts.size() < 2) parts = consecutive_equipartition(g.n() - g.n() % 2, 2);
  const auto i = static_cast<std::size_t>(ctx.cfg.param_int(stage, "i", 0));
  const auto j = static_cast<std::size_t>(ctx.cfg.param_int(stage, "j", 1));
  if (i >= parts.size() || j >= parts.size() || i == j) throw std::invalid_argument("regularity needs two distinct part indices");
  const auto dev = regularity_deviation(g, parts[i], parts[j], ctx.cfg.param_double(stage, "epsilon", 0.1),
                                        search_options(ctx, stage).budget, stage_seed(ctx.cfg, stage));
  return deviation_outcome(ctx, stage, dev, "graph.txt");
}

Outcome stage_oracle(Context& ctx, const std::string& stage) {
  const auto& cfg = ctx.cfg;
  const int graphs = static_cast<int>(cfg.param_int(stage, "graphs", 100));
  const int n_min = static_cast<int>(cfg.param_int(stage, "n_min", 4));
  const int n_max = static_cast<int>(cfg.param_int(stage, "n_max", 14));
  const int r_max = static_cast<int>(cfg.param_int(stage, "r_max", 3));
  if (n_min < 1 || n_max < n_min) throw std::invalid_argument("oracle needs 1 <= n_min <= n_max");
  const std::uint64_t seed = stage_seed(cfg, stage);

  std::vector<std::uint64_t> comparisons(static_cast<std::size_t>(graphs), 0), mismatches(static_cast<std::size_t>(graphs), 0),
      cuts(static_cast<std::size_t>(graphs), 0);
  std::vector<std::string> first_failure(static_cast<std::size_t>(graphs));
  parallel_for(static_cast<std::size_t>(graphs), [&](std::size_t gi) {
    Xoshiro256 rng(derive_seed(seed, gi));
    const int n = n_min + static_cast<int>(gi % static_cast<std::size_t>(n_max - n_min + 1));
    const double p = 0.2 + 0.6 * rng.uniform();
    const Graph g = gen_gnp(n, p, rng());
    const UniformHypergraph lift = clique_hypergraph(g, 3);
    auto compare = [&](Count fast, Count slow, const std::string& what) {
      ++comparisons[gi];
      if (fast != slow) {
        ++mismatches[gi];
        if (first_failure[gi].empty()) first_failure[gi] = what;
      }
    };
    compare(count_c4(g), reference::count_c4(g), "count_c4");
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<Vertex> u, x, y;
      for (Vertex v = 0; v < n; ++v) {
        if (rng() >> 63) u.push_back(v);
        const auto side = rng.below(3);
        if (side == 0) x.push_back(v);
        if (side == 1) y.push_back(v);
      }
      compare(edges_within(g, u), reference::edges_within(g, u), "edges_within");
      compare(edges_between(g, x, y), reference::edges_between(g, x, y), "edges_between");
    }
    for (int r = 2; r <= std::min(r_max, n); ++r) {
      const auto alpha = balanced_alpha(r);
      CutEnumerator en(n, alpha);
      std::vector<int> a;
      while (en.next(a)) {
        ++cuts[gi];
        const VertexCut cut = VertexCut::from_assignment(a, r, alpha);
        compare(cliques_crossing(g, cut, 2), reference::cliques_crossing(g, a, 2), "edges_crossing");
        const Count tri = reference::cliques_crossing(g, a, 3);
        compare(triangles_crossing(g, cut), tri, "triangles_crossing");
        compare(cliques_crossing(g, cut, 3), tri, "cliques_crossing");
        compare(hyperedges_crossing(lift, cut), reference::hyperedges_crossing(lift, a), "hyperedges_crossing");
      }
    }
  });
  Outcome out;
  std::uint64_t total = 0, bad = 0, total_cuts = 0;
  std::string failure;
  for (std::size_t gi = 0; gi < comparisons.size(); ++gi) {
    total += comparisons[gi];
    bad += mismatches[gi];
    total_cuts += cuts[gi];
    if (failure.empty() && !first_failure[gi].empty()) failure = "graph " + std::to_string(gi) + ": " + first_failure[gi];
  }
  out.report.set("graphs", std::to_string(graphs));
  out.report.set("cuts", std::to_string(total_cuts));
  out.report.set("comparisons", std::to_string(total));
  out.report.set("mismatches", std::to_string(bad));
  if (!failure.empty()) out.report.set("first_mismatch", failure);
  Gates gates(out.report);
  gates.require("all_kernels_match", bad == 0);
  out.passed = gates.passed();
  out.summary = std::to_string(total) + " comparisons over " + std::to_string(total_cuts) + " cuts, " + std::to_string(bad) + " mismatches";
  return out;
}

Outcome stage_gottlieb(Context& ctx, const std::string& stage) {
  const int t_max = static_cast<int>(ctx.cfg.param_int(stage, "t_max", 12));
  const std::uint64_t seed = stage_seed(ctx.cfg, stage);
  struct Case {
    int t, h, k;
  };
  std::vector<Case> cases;
  for (int t = 4; t <= t_max; ++t)
    for (int k = 2; 2 * k <= t; ++k)
      for (int h = k; h + k <= t; ++h) cases.push_back({t, h, k});
  std::vector<RankResult> ranks(cases.size());
  parallel_for(cases.size(), [&](std::size_t c) {
    ranks[c] = rank_exact(inclusion_matrix(cases[c].t, cases[c].h, cases[c].k), derive_seed(seed, c));
  });
  Outcome out;
  std::size_t failures = 0, certified = 0;
  std::string failed;
  for (std::size_t c = 0; c < cases.size(); ++c) {
    const auto expect = binomial(static_cast<std::uint64_t>(cases[c].t), static_cast<std::uint64_t>(cases[c].k));
    if (ranks[c].method == "modular-certificate") ++certified;
    if (ranks[c].rank != expect) {
      ++failures;
      failed += (failed.empty() ? "" : ",") + std::to_string(cases[c].t) + "/" + std::to_string(cases[c].h) + "/" + std::to_string(cases[c].k);
    }
  }
  out.report.set("t_max", std::to_string(t_max));
  out.report.set("cases", std::to_string(cases.size()));
  out.report.set("bareiss", std::to_string(cases.size() - certified));
  out.report.set("modular_certificate", std::to_string(certified));
  out.report.set("failures", std::to_string(failures));
  if (!failed.empty()) out.report.set("failed_cases", failed);
  Gates gates(out.report);
  gates.require("rank_equals_binomial", failures == 0);
  out.passed = gates.passed();
  out.summary = std::to_string(cases.size()) + " inclusion matrices, " + std::to_string(failures) + " rank failures";
  return out;
}

Outcome stage_n_rank(Context& ctx, const std::string& stage) {
  const int t_max = static_cast<int>(ctx.cfg.param_int(stage, "t_max", 12));
  const auto full_limit = static_cast<std::uint64_t>(ctx.cfg.param_int(stage, "full_limit", 20'000));
  const std::uint64_t seed = stage_seed(ctx.cfg, stage);
  Outcome out;
  std::size_t cases = 0, failures = 0, dedup_checked = 0, singleton_failures = 0;
  std::string lines, failed;
  for (int k : {3, 4})
    for (int t = k; t <= t_max; ++t)
      for (int r = k; r <= t; ++r) {
        if (t % r != 0) continue;
        ++cases;
        const auto expect = binomial(static_cast<std::uint64_t>(t - 2), static_cast<std::uint64_t>(k - 2));
        const ExactMatrix distinct = crossing_submatrix_N_distinct(t, r, k);
        const auto rank = rank_exact(distinct, derive_seed(seed, cases)).rank;
        bool ok = rank == expect;
        const auto cuts = count_cuts(t, balanced_alpha(r));
        if (cuts && *cuts <= full_limit) {
          const ExactMatrix full = crossing_submatrix_N(t, r, k, full_limit);
          const ExactMatrix dedup = dedup_rows(full);
          ok = ok && rank_exact(full, derive_seed(seed, cases)).rank == rank &&
               rank_exact(dedup, derive_seed(seed, cases)).rank == rank && dedup.rows == distinct.rows;
          ++dedup_checked;
        }
        if (!ok) {
          ++failures;
          // With r = t every cut is into singletons, so all rows of N agree.
          if (r == t) ++singleton_failures;
          failed += (failed.empty() ? "" : ",") + std::to_string(t) + "/" + std::to_string(r) + "/" + std::to_string(k);
        }
        lines += (lines.empty() ? "" : ";") + std::to_string(t) + "/" + std::to_string(r) + "/" + std::to_string(k) + ":" +
                 std::to_string(distinct.rows) + "x" + std::to_string(distinct.cols) + " rank " + std::to_string(rank);
      }
  out.report.set("cases", std::to_string(cases));
  out.report.set("dedup_checked", std::to_string(dedup_checked));
  out.report.set("failures", std::to_string(failures));
  out.report.set("failures_r_equals_t", std::to_string(singleton_failures));
  if (!failed.empty()) out.report.set("failed_cases", failed);
  out.report.set("matrices", lines);
  Gates gates(out.report);
  gates.require("full_column_rank", failures == 0);
  out.passed = gates.passed();
  out.summary = std::to_string(cases) + " (t,r,k) cases, " + std::to_string(failures) + " failures";
  return out;
}

Outcome stage_swap(Context& ctx, const std::string& stage) {
  const auto& cfg = ctx.cfg;
  const int i = static_cast<int>(cfg.param_int(stage, "i", 1));
  const int j = static_cast<int>(cfg.param_int(stage, "j", 2));
  const double alpha = cfg.param_double(stage, "alpha", 0.5);
  const double max_error = cfg.param_double(stage, "max_error", 0.03);
  const double max_residual = cfg.param_double(stage, "max_residual", 0.03);
  const int k = static_cast<int>(cfg.param_int(stage, "k", 3));
  const std::uint64_t seed = stage_seed(cfg, stage);

  Outcome out;
  Gates gates(out.report);
  const auto main = swap_experiment(ctx.graph->graph, ctx.graph->parts, i, j, alpha, derive_seed(seed, 0), k);
  const auto res = residual_matrix(main.stats);
  out.report.set("alpha_effective", format_double(main.alpha_effective));
  out.report.set("d_prime", join_doubles(main.d_prime.values));
  out.report.set("predicted", join_doubles(main.predicted.values));
  out.report.set("residual_max", format_double(res.max_abs));
  out.report.set("residual_mean", format_double(res.mean_abs));
  gates.at_most("prediction_error", main.max_prediction_error(), max_error);
  gates.at_most("residual_max", res.max_abs, max_residual);
  if (cfg.gen.family == Family::planted_structure) {
    const auto exact = residual_matrix(planted_targets(cfg.gen.t, cfg.gen.m, cfg.gen.s, cfg.gen.x, cfg.gen.y));
    out.report.set("target_residual_max", format_double(exact.max_abs));
    gates.at_most("target_residual_max", exact.max_abs, 1e-12);
  }
  if (cfg.param_int(stage, "control", 1) != 0) {
    // Same swap on a G(n, p) graph cut into the same number of blocks.
    const int n = ctx.graph->graph.n();
    const int t = static_cast<int>(ctx.graph->parts.size());
    const Graph control = gen_gnp(n, cfg.param_double(stage, "control_p", 0.5), derive_seed(seed, 1));
    const auto c = swap_experiment(control, consecutive_equipartition(n, t), i, j, alpha, derive_seed(seed, 2), k);
    out.report.set("control_d_prime", join_doubles(c.d_prime.values));
    out.report.set("control_predicted", join_doubles(c.predicted.values));
    gates.at_most("control_prediction_error", c.max_prediction_error(), max_error);
  }
  out.passed = gates.passed();
  out.summary = "max |d' - prediction| " + format_double(main.max_prediction_error()) + ", residual max " + format_double(res.max_abs);
  return out;
}

Outcome stage_classify(Context& ctx, const std::string& stage) {
  const auto& cfg = ctx.cfg;
  const int seeds = static_cast<int>(cfg.param_int(stage, "seeds", 20));
  const double recover = cfg.param_double(stage, "recover_tol", 0.02);
  const double control_p = cfg.param_double(stage, "control_p", 0.5);
  const GenSpec& g = cfg.gen;
  if (g.family != Family::planted_structure) throw std::invalid_argument("classify needs a planted_structure generator");
  const std::uint64_t seed = stage_seed(cfg, stage);

  std::vector<StructureVerdict> planted(static_cast<std::size_t>(seeds)), control(static_cast<std::size_t>(seeds));
  std::vector<int> truth(static_cast<std::size_t>(seeds));
  parallel_for(static_cast<std::size_t>(seeds), [&](std::size_t q) {
    Xoshiro256 rng(derive_seed(seed, q));
    const int s = static_cast<int>(rng.below(static_cast<std::uint64_t>(g.t)));
    truth[q] = s;
    const auto pg = gen_planted_structure(g.t, g.m, s, g.x, g.y, rng());
    planted[q] = classify_structure(partition_stats(pg.graph, pg.parts), cfg.tol);
    const int n = g.t * g.m;
    const Graph cg = gen_gnp(n, control_p, rng());
    control[q] = classify_structure(partition_stats(cg, consecutive_equipartition(n, g.t)), cfg.tol);
  });
  Outcome out;
  int recovered = 0, uniform = 0;
  double worst_x = 0, worst_y = 0;
  std::string verdicts;
  for (std::size_t q = 0; q < planted.size(); ++q) {
    const auto& v = planted[q];
    const bool ok_tag = v.tag == StructureVerdict::Tag::special_vertex && v.s == truth[q];
    const double ex = ok_tag ? std::abs(std::sqrt(v.x) - std::sqrt(g.x)) : INFINITY;
    const double ey = ok_tag ? std::abs(std::sqrt(v.y) - std::sqrt(g.y)) : INFINITY;
    worst_x = std::max(worst_x, ex);
    worst_y = std::max(worst_y, ey);
    if (ok_tag && ex <= recover && ey <= recover) ++recovered;
    if (control[q].tag == StructureVerdict::Tag::uniform) ++uniform;
    verdicts += (q ? ";" : "") + std::to_string(truth[q]) + ":" + v.tag_name() + ":" + std::to_string(v.s) + ":" +
                format_double(std::sqrt(v.x)) + ":" + format_double(std::sqrt(v.y)) + "/" + control[q].tag_name();
  }
  out.report.set("seeds", std::to_string(seeds));
  out.report.set("tol", format_double(cfg.tol));
  out.report.set("verdicts", verdicts);
  Gates gates(out.report);
  gates.at_least("planted_recovered", recovered, seeds);
  gates.at_least("control_uniform", uniform, seeds);
  gates.at_most("worst_sqrt_x_error", worst_x, recover);
  gates.at_most("worst_sqrt_y_error", worst_y, recover);
  out.passed = gates.passed();
  out.summary = std::to_string(recovered) + "/" + std::to_string(seeds) + " planted recovered, " + std::to_string(uniform) + "/" +
                std::to_string(seeds) + " controls uniform";
  return out;
}

double relative_error(double a, double b, double scale) {
  const double s = std::max({std::abs(a), std::abs(b), scale});
  return s == 0 ? 0.0 : std::abs(a - b) / s;
}

Outcome stage_identities(Context& ctx, const std::string& stage) {
  const auto& cfg = ctx.cfg;
  const int profiles = static_cast<int>(cfg.param_int(stage, "profiles", 10'000));
  const auto ks = split_ints(cfg.param(stage, "k", "4,5,6"));
  const double rel_tol = cfg.param_double(stage, "rel_tol", 1e-12);
  const double floor = cfg.param_double(stage, "density_floor", 0.05);
  const std::uint64_t seed = stage_seed(cfg, stage);
  Outcome out;
  Gates gates(out.report);
  for (int k : ks) {
    if (k < 3 || k > 20) throw std::invalid_argument("identities need 3 <= k <= 20");
    std::vector<double> e1(static_cast<std::size_t>(profiles)), e2(e1.size()), e3(e1.size());
    parallel_for(e1.size(), [&](std::size_t q) {
      Xoshiro256 rng(derive_seed(derive_seed(seed, static_cast<std::uint64_t>(k)), q));
      const auto kk = static_cast<std::size_t>(k);
      std::vector<double> x(kk), d(kk * kk, 0.0);
      for (auto& v : x) v = floor + (1 - floor) * rng.uniform();
      for (std::size_t a = 0; a < kk; ++a)
        for (std::size_t b = a + 1; b < kk; ++b) d[a * kk + b] = d[b * kk + a] = floor + (1 - floor) * rng.uniform();
      const PartitionStats st(1, x, d);
      std::vector<int> order(kk);
      for (std::size_t a = 0; a < kk; ++a) order[a] = static_cast<int>(a);
      rng.shuffle(std::span<int>(order));
      std::uint64_t set_i = 0;
      for (int a = 0; a < k - 3; ++a) set_i |= std::uint64_t{1} << order[static_cast<std::size_t>(a)];
      const int j1 = order[kk - 3], j2 = order[kk - 2], j3 = order[kk - 1];
      const std::uint64_t all = (std::uint64_t{1} << k) - 1;
      const double lhs1 = transformed_pair(st, set_i, j1, j2) * transformed_pair(st, set_i, j2, j3) * transformed_pair(st, set_i, j3, j1);
      e1[q] = relative_error(lhs1, pair_product(st, all), 0);
      const double d13 = transformed_pair(st, set_i, j1, j3);
      const double lhs2 = transformed_self(st, set_i, j1) * d13 * d13;
      e2[q] = relative_error(lhs2, clique_extension_term(st, set_i | (std::uint64_t{1} << j3), j1), 0);
      // The reduced triple residual against the k-clique residual, relative to the size of its terms.
      const std::uint64_t rest = set_i | (std::uint64_t{1} << j3);
      const double scale = clique_extension_term(st, rest, j1) + clique_extension_term(st, rest, j2) + 2 * pair_product(st, all);
      e3[q] = relative_error(general_triple_residual(st, set_i, j1, j2, j3), clique_residual(st, all, j1, j2), scale);
    });
    const double m1 = *std::max_element(e1.begin(), e1.end());
    const double m2 = *std::max_element(e2.begin(), e2.end());
    const double m3 = *std::max_element(e3.begin(), e3.end());
    const std::string p = "k" + std::to_string(k) + ".";
    gates.at_most(p + "triangle_product", m1, rel_tol);
    gates.at_most(p + "extension_term", m2, rel_tol);
    gates.at_most(p + "residual", m3, rel_tol);
  }
  out.report.set("profiles", std::to_string(profiles));
  out.passed = gates.passed();
  out.summary = std::string(out.passed ? "identities hold" : "identity violated") + " on " + std::to_string(profiles) + " profiles per k";
  return out;
}

Outcome stage_w_distance(Context& ctx, const std::string& stage) {
  const auto& cfg = ctx.cfg;
  const int t = static_cast<int>(cfg.param_int(stage, "t", 8));
  const int k = static_cast<int>(cfg.param_int(stage, "k", 3));
  const double max_linf = cfg.param_double(stage, "max_linf", 0.05);
  const double member_tol = cfg.param_double(stage, "member_tol", 1e-10);
  const bool exact = cfg.param_int(stage, "exact", 1) != 0;
  const Graph& g = ctx.graph->graph;
  const int n = g.n() - g.n() % t;
  const Partition parts = consecutive_equipartition(n, t);
  const DensityVectorK d = clique_density_vector(g, parts, k);
  // Hyperedge density of the lift: k-cliques / C(n, k).
  const UniformHypergraph lift = clique_hypergraph(g, k);
  const double ph = static_cast<double>(lift.size()) /
                    static_cast<double>(binomial(static_cast<std::uint64_t>(g.n()), static_cast<std::uint64_t>(k)));
  const WDistance w = distance_to_W(d, ph, exact);

  Xoshiro256 rng(stage_seed(cfg, stage));
  std::vector<int> elems(static_cast<std::size_t>(t));
  for (int a = 0; a < t; ++a) elems[static_cast<std::size_t>(a)] = a;
  rng.shuffle(std::span<int>(elems));
  std::uint64_t set_i = 0;
  for (int a = 0; a < t / 2; ++a) set_i |= std::uint64_t{1} << elems[static_cast<std::size_t>(a)];
  const WDistance wu = distance_to_W(u_vector(t, k, ph, set_i), ph);
  DensityVectorK constant(t, k);
  std::fill(constant.values.begin(), constant.values.end(), ph);
  const WDistance wc = distance_to_W(constant, ph);

  Outcome out;
  out.report.set("t", std::to_string(t));
  out.report.set("k", std::to_string(k));
  out.report.set("hyperedge_density", format_double(ph));
  out.report.set("density_vector", join_doubles(d.values));
  out.report.set("l2", format_double(w.l2));
  out.report.set("linf", format_double(w.linf));
  if (w.linf_exact) out.report.set("linf_exact", format_double(*w.linf_exact));
  out.report.set("weights", join_doubles(w.weights));
  out.report.set("u_member_subset", subset_label(set_i));
  Gates gates(out.report);
  gates.at_most("linf", w.linf, max_linf);
  gates.at_most("u_member_linf", wu.linf, member_tol);
  gates.at_most("constant_member_linf", wc.linf, member_tol);
  out.passed = gates.passed();
  out.summary = "linf residual " + format_double(w.linf) + (w.linf_exact ? " (exact " + format_double(*w.linf_exact) + ")" : "");
  return out;
}

Outcome stage_hajnal(Context& ctx, const std::string& stage) {
  const auto& cfg = ctx.cfg;
  const int graphs = static_cast<int>(cfg.param_int(stage, "graphs", 100));
  const int n = static_cast<int>(cfg.param_int(stage, "n", 12));
  const int k = static_cast<int>(cfg.param_int(stage, "k", 3));
  const int min_degree = static_cast<int>(cfg.param_int(stage, "min_degree", 8));
  const double p = cfg.param_double(stage, "p", 0.3);
  const std::uint64_t seed = stage_seed(cfg, stage);
  std::vector<int> status(static_cast<std::size_t>(graphs));
  parallel_for(status.size(), [&](std::size_t q) {
    const Graph g = gen_min_degree(n, min_degree, p, derive_seed(seed, q));
    for (Vertex v = 0; v < n; ++v)
      if (g.degree(v) < min_degree) {
        status[q] = 2;
        return;
      }
    const auto f = clique_factor(g, k);
    if (f.status != CliqueFactorResult::Status::found) {
      status[q] = f.status == CliqueFactorResult::Status::budget_exceeded ? 3 : 1;
      return;
    }
    // Check the factor: disjoint k-cliques covering every vertex.
    std::vector<int> covered(static_cast<std::size_t>(n), 0);
    for (const auto& c : f.cliques) {
      if (static_cast<int>(c.size()) != k) status[q] = 4;
      for (std::size_t a = 0; a < c.size(); ++a) {
        ++covered[static_cast<std::size_t>(c[a])];
        for (std::size_t b = a + 1; b < c.size(); ++b)
          if (!g.has_edge(c[a], c[b])) status[q] = 4;
      }
    }
    for (int cnt : covered)
      if (cnt != 1) status[q] = 4;
  });
  Outcome out;
  const auto found = static_cast<int>(std::count(status.begin(), status.end(), 0));
  out.report.set("graphs", std::to_string(graphs));
  out.report.set("found", std::to_string(found));
  out.report.set("no_factor", std::to_string(std::count(status.begin(), status.end(), 1)));
  out.report.set("degree_violations", std::to_string(std::count(status.begin(), status.end(), 2)));
  out.report.set("budget_exceeded", std::to_string(std::count(status.begin(), status.end(), 3)));
  out.report.set("invalid_factor", std::to_string(std::count(status.begin(), status.end(), 4)));
  Gates gates(out.report);
  gates.at_least("factors_found", found, graphs);
  out.passed = gates.passed();
  out.summary = std::to_string(found) + "/" + std::to_string(graphs) + " graphs have a verified K" + std::to_string(k) + "-factor";
  return out;
}

Outcome stage_concentration(Context& ctx, const std::string& stage) {
  const auto& cfg = ctx.cfg;
  const int trials = static_cast<int>(cfg.param_int(stage, "trials", 100));
  const double alpha = cfg.param_double(stage, "alpha", 0.5);
  const double frac = cfg.param_double(stage, "tol_fraction", 0.01);
  const int min_pass = static_cast<int>(cfg.param_int(stage, "min_pass", 99));
  const Graph& g = ctx.graph->graph;
  const double n = g.n();
  const double pairs = n * (n - 1) / 2;
  const double density = static_cast<double>(g.num_edges()) / pairs;
  const std::uint64_t seed = stage_seed(cfg, stage);
  std::vector<double> gaps(static_cast<std::size_t>(trials));
  parallel_for(gaps.size(), [&](std::size_t q) {
    const auto u = sample_bernoulli_subset(g.n(), alpha, derive_seed(seed, q));
    gaps[q] = std::abs(static_cast<double>(edges_within(g, u)) - alpha * alpha * density * pairs) / (n * n);
  });
  const auto passes = static_cast<int>(std::count_if(gaps.begin(), gaps.end(), [&](double v) { return v <= frac; }));
  Outcome out;
  out.report.set("trials", std::to_string(trials));
  out.report.set("density", format_double(density));
  out.report.set("max_gap", format_double(*std::max_element(gaps.begin(), gaps.end())));
  out.report.set("within_tolerance", std::to_string(passes));
  Gates gates(out.report);
  gates.at_least("trials_within_tolerance", passes, min_pass);
  out.passed = gates.passed();
  out.summary = std::to_string(passes) + "/" + std::to_string(trials) + " trials within " + format_double(frac) + " n^2";
  return out;
}

Outcome stage_reproducibility(Context& ctx, const std::string& stage) {
  const auto names = split(ctx.cfg.param(stage, "presets", "theorem-1-2-separation"), ',');
  const auto threads = static_cast<unsigned>(ctx.cfg.param_int(stage, "threads", 4));
  const unsigned saved = thread_count();
  Outcome out;
  Gates gates(out.report);
  std::size_t files = 0;
  for (const auto& name : names) {
    ExperimentConfig inner = preset(name);
    inner.seed = derive_seed(ctx.cfg.seed, name);
    std::vector<std::map<std::string, std::string>> runs;
    bool inner_ok = true;
    const unsigned counts[] = {1, threads, 1};
    for (std::size_t run = 0; run < 3; ++run) {
      inner.out = (ctx.out / (name + "-run" + std::to_string(run) + "-threads" + std::to_string(counts[run]))).string();
      set_thread_count(counts[run]);
      const auto res = run_pipeline(inner);
      inner_ok = inner_ok && res.exit_code == exit_ok;
      std::map<std::string, std::string> bytes;
      for (const auto& entry : fs::directory_iterator(inner.out))
        if (entry.is_regular_file()) bytes[entry.path().filename().string()] = read_file(entry.path());
      runs.push_back(std::move(bytes));
    }
    set_thread_count(saved);
    files += runs[0].size();
    gates.require(name + ".identical_across_runs", runs[0] == runs[2]);
    gates.require(name + ".identical_across_threads", runs[0] == runs[1]);
    gates.require(name + ".inner_exit_ok", inner_ok);
  }
  out.report.set("presets", join(names, ','));
  out.report.set("threads", "1," + std::to_string(threads));
  out.report.set("files_compared", std::to_string(files));
  out.passed = gates.passed();
  out.summary = std::string(out.passed ? "byte-identical" : "MISMATCH") + " across 3 runs of " + std::to_string(names.size()) + " preset(s)";
  return out;
}

Outcome run_stage(Context& ctx, const std::string& stage) {
  if (stage == "gen") return stage_gen(ctx, stage);
  if (needs_graph(stage) && !ctx.graph) throw std::invalid_argument("stage " + stage + " needs a preceding gen stage");
  if (stage.starts_with("check_")) return stage_check(ctx, stage);
  if (stage == "regularity") return stage_regularity(ctx, stage);
  if (stage == "oracle") return stage_oracle(ctx, stage);
  if (stage == "gottlieb") return stage_gottlieb(ctx, stage);
  if (stage == "n_rank") return stage_n_rank(ctx, stage);
  if (stage == "swap") return stage_swap(ctx, stage);
  if (stage == "classify") return stage_classify(ctx, stage);
  if (stage == "identities") return stage_identities(ctx, stage);
  if (stage == "w_distance") return stage_w_distance(ctx, stage);
  if (stage == "hajnal") return stage_hajnal(ctx, stage);
  if (stage == "concentration") return stage_concentration(ctx, stage);
  if (stage == "reproducibility") return stage_reproducibility(ctx, stage);
  throw std::invalid_argument("unknown stage '" + stage + "'");
}

std::string config_hash(const ExperimentConfig& cfg) {
  // The output directory does not take part in the hash.
  ExperimentConfig copy = cfg;
  copy.out.clear();
  return hex64(fnv1a64(copy.to_text()));
}

}  // namespace

// ---- config ----

std::string ExperimentConfig::to_text() const {
  KeyValues kv;
  kv.set("name", name);
  kv.set("stages", join(stages, ','));
  kv.set("seed", std::to_string(seed));
  kv.set("p", format_double(p));
  kv.set("alpha", join_doubles(alpha));
  kv.set("k", std::to_string(k));
  kv.set("budget", std::to_string(budget));
  kv.set("enumeration_budget", std::to_string(enumeration_budget));
  kv.set("tol", format_double(tol));
  kv.set("out", out);
  const KeyValues gen_kv = KeyValues::parse(gen.to_text());
  for (const auto& [key, value] : gen_kv.entries()) kv.set("gen." + key, value);
  for (const auto& [key, value] : params.entries()) kv.set("param." + key, value);
  return kv.to_text();
}

ExperimentConfig ExperimentConfig::from_text(std::string_view text) {
  const KeyValues kv = KeyValues::parse(text);
  ExperimentConfig cfg;
  KeyValues gen_kv;
  bool has_gen = false;
  for (const auto& [key, value] : kv.entries()) {
    if (key == "name") cfg.name = value;
    else if (key == "stages") cfg.stages = split(value, ',');
    else if (key == "seed") cfg.seed = kv.get_u64(key);
    else if (key == "p") cfg.p = parse_double(value);
    else if (key == "alpha") cfg.alpha = split_doubles(value);
    else if (key == "k") cfg.k = static_cast<int>(kv.get_int(key));
    else if (key == "budget") cfg.budget = kv.get_u64(key);
    else if (key == "enumeration_budget") cfg.enumeration_budget = kv.get_u64(key);
    else if (key == "tol") cfg.tol = parse_double(value);
    else if (key == "out") cfg.out = value;
    else if (key.starts_with("gen.")) {
      gen_kv.set(key.substr(4), value);
      has_gen = true;
    } else if (key.starts_with("param.")) cfg.params.set(key.substr(6), value);
    else throw std::invalid_argument("unknown config key '" + key + "'");
  }
  if (has_gen) {
    if (!gen_kv.has("family")) throw std::invalid_argument("gen.* keys need gen.family");
    cfg.gen = GenSpec::from_text(gen_kv.to_text());
  }
  return cfg;
}

bool ExperimentConfig::has_param(std::string_view stage, std::string_view name) const {
  return params.has(std::string(stage) + "." + std::string(name));
}

std::string ExperimentConfig::param(std::string_view stage, std::string_view name, std::string fallback) const {
  return params.get_or(std::string(stage) + "." + std::string(name), std::move(fallback));
}

double ExperimentConfig::param_double(std::string_view stage, std::string_view name, double fallback) const {
  const std::string key = std::string(stage) + "." + std::string(name);
  return params.has(key) ? params.get_double(key) : fallback;
}

std::int64_t ExperimentConfig::param_int(std::string_view stage, std::string_view name, std::int64_t fallback) const {
  const std::string key = std::string(stage) + "." + std::string(name);
  return params.has(key) ? params.get_int(key) : fallback;
}

void ExperimentConfig::set_param(std::string_view stage, std::string_view name, std::string value) {
  params.set(std::string(stage) + "." + std::string(name), std::move(value));
}

void ExperimentConfig::validate() const {
  bool generated = false;
  std::vector<std::string> seen;
  for (const auto& s : stages) {
    if (std::find(all_stages().begin(), all_stages().end(), s) == all_stages().end())
      throw std::invalid_argument("unknown stage '" + s + "'");
    if (std::find(seen.begin(), seen.end(), s) != seen.end()) throw std::invalid_argument("stage '" + s + "' listed twice");
    seen.push_back(s);
    if (s == "gen") {
      gen.validate();
      generated = true;
    }
    if (needs_graph(s) && !generated) throw std::invalid_argument("stage " + s + " needs a preceding gen stage");
  }
  if (!(p >= 0 && p <= 1)) throw std::invalid_argument("p must lie in [0,1]");
  if (k < 2) throw std::invalid_argument("k must be at least 2");
  if (!(tol >= 0)) throw std::invalid_argument("tol must be non-negative");
  if (out.empty()) throw std::invalid_argument("out directory must be set");
}

std::uint64_t stage_seed(const ExperimentConfig& cfg, std::string_view stage) { return derive_seed(cfg.seed, stage); }

std::vector<std::string> stage_names() { return all_stages(); }

PipelineResult run_pipeline(const ExperimentConfig& cfg) {
  PipelineResult result;
  try {
    cfg.validate();
    Context ctx{cfg, fs::path(cfg.out), std::nullopt};
    fs::create_directories(ctx.out);
    KeyValues manifest;
    manifest.set("version", std::string(kToolkitVersion));
    manifest.set("config_hash", config_hash(cfg));
    manifest.set("name", cfg.name);
    write_file(ctx.out / "config.txt", [&] {
      ExperimentConfig copy = cfg;
      copy.out.clear();
      return copy.to_text();
    }());
    for (std::size_t i = 0; i < cfg.stages.size(); ++i) {
      const std::string& stage = cfg.stages[i];
      Outcome o = run_stage(ctx, stage);
      char prefix[8];
      std::snprintf(prefix, sizeof prefix, "%02zu", i + 1);
      const std::string file = std::string(prefix) + "-" + stage + ".txt";
      KeyValues head;
      head.set("stage", stage);
      head.set("status", o.passed ? "pass" : "fail");
      write_file(ctx.out / file, head.to_text() + o.report.to_text());
      manifest.set("stage." + std::string(prefix), stage + " " + file + " " + (o.passed ? "pass" : "fail"));
      result.stages.push_back({stage, o.passed, file, o.summary});
      if (!o.passed) result.exit_code = exit_gate_failure;
    }
    write_file(ctx.out / "manifest.txt", manifest.to_text());
  } catch (const std::invalid_argument& e) {
    result.exit_code = exit_invalid_config;
    result.error = e.what();
  } catch (const EnumerationBudgetExceeded& e) {
    result.exit_code = exit_invalid_config;
    result.error = e.what();
  } catch (const std::exception& e) {
    result.exit_code = exit_internal_fault;
    result.error = e.what();
  }
  return result;
}

VerifyResult verify_report(const std::string& path) {
  const fs::path report_path(path);
  const std::string text = read_file(report_path);
  const KeyValues kv = KeyValues::parse(text);
  VerifyResult res;
  if (!kv.has("property") || !kv.has("witness")) {
    res.message = "report has no witness to re-evaluate";
    return res;
  }
  const DeviationReport rep = DeviationReport::from_text(text);
  if (rep.input.empty()) throw std::runtime_error("report does not name its input artifact");
  fs::path input(rep.input);
  if (input.is_relative()) input = report_path.parent_path() / input;
  if (!fs::exists(input)) throw std::runtime_error("input artifact " + input.string() + " is missing");
  res.reported = rep.max_abs_deviation;
  if (rep.property == Property::cut_hypergraph) {
    const auto h = load_hypergraph_file(input.string());
    res.recomputed = reevaluate_witness(rep, nullptr, &h.hypergraph);
  } else {
    const auto g = load_graph_file(input.string());
    res.recomputed = reevaluate_witness(rep, &g.graph, nullptr);
  }
  res.ok = res.recomputed == res.reported;
  res.message = res.ok ? "witness reproduces the reported deviation"
                       : "witness gives " + format_double(res.recomputed) + ", report says " + format_double(res.reported);
  return res;
}

}  // namespace qr
