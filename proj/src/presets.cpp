#include <stdexcept>

#include "qrcert/pipeline.hpp"

namespace qr {

namespace {

ExperimentConfig base(std::string name, std::vector<std::string> stages) {
  ExperimentConfig cfg;
  cfg.name = std::move(name);
  cfg.stages = std::move(stages);
  cfg.seed = 20240601;
  cfg.out = "runs/" + cfg.name;
  return cfg;
}

GenSpec gnp(int n, double p) {
  GenSpec g;
  g.family = Family::gnp;
  g.n = n;
  g.p = p;
  return g;
}

GenSpec planted(int t, int m, int s, double x, double y) {
  GenSpec g;
  g.family = Family::planted_structure;
  g.t = t;
  g.m = m;
  g.s = s;
  g.x = x;
  g.y = y;
  return g;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"oracle-equivalence",  "gottlieb-sweep",   "n-full-rank",    "theorem-1-2-separation",
          "forward-direction",   "swap-calculus",    "classifier",     "substitution-identities",
          "w-distance",          "hajnal-szemeredi", "concentration",  "reproducibility"};
}

ExperimentConfig preset(std::string_view name) {
  if (name == "oracle-equivalence") {
    auto cfg = base("oracle-equivalence", {"oracle"});
    cfg.set_param("oracle", "graphs", "100");
    cfg.set_param("oracle", "n_max", "14");
    cfg.set_param("oracle", "r_max", "3");
    return cfg;
  }
  if (name == "gottlieb-sweep") {
    auto cfg = base("gottlieb-sweep", {"gottlieb"});
    cfg.set_param("gottlieb", "t_max", "12");
    return cfg;
  }
  if (name == "n-full-rank") {
    auto cfg = base("n-full-rank", {"n_rank"});
    cfg.set_param("n_rank", "t_max", "12");
    return cfg;
  }
  if (name == "theorem-1-2-separation") {
    auto cfg = base("theorem-1-2-separation", {"gen", "check_cut_graph", "check_p1"});
    cfg.gen.family = Family::half_split;
    cfg.gen.n = 600;
    cfg.gen.p = 0.3;
    cfg.p = 0.3;
    cfg.alpha = {0.5, 0.5};
    cfg.set_param("check_cut_graph", "budget", "10000");
    cfg.set_param("check_cut_graph", "max", "0.02");
    cfg.set_param("check_p1", "budget", "2000");
    cfg.set_param("check_p1", "min", "0.03");
    return cfg;
  }
  if (name == "forward-direction") {
    auto cfg = base("forward-direction", {"gen", "check_clique_cut", "check_p2"});
    cfg.gen = gnp(600, 0.5);
    cfg.p = 0.5;
    cfg.k = 3;
    cfg.alpha = {1.0 / 3, 1.0 / 3, 1.0 / 3};
    cfg.set_param("check_clique_cut", "budget", "200");
    cfg.set_param("check_clique_cut", "max", "0.02");
    cfg.set_param("check_p2", "alpha", "0.5");
    cfg.set_param("check_p2", "budget", "1000");
    cfg.set_param("check_p2", "max", "0.02");
    return cfg;
  }
  if (name == "swap-calculus") {
    auto cfg = base("swap-calculus", {"gen", "swap"});
    cfg.gen = planted(6, 300, 0, 0.25, 0.36);
    cfg.set_param("swap", "i", "1");
    cfg.set_param("swap", "j", "2");
    cfg.set_param("swap", "alpha", "0.5");
    cfg.set_param("swap", "max_error", "0.03");
    cfg.set_param("swap", "max_residual", "0.03");
    return cfg;
  }
  if (name == "classifier") {
    auto cfg = base("classifier", {"classify"});
    cfg.gen = planted(8, 400, 0, 0.25, 0.36);
    cfg.tol = 0.02;
    cfg.set_param("classify", "seeds", "20");
    cfg.set_param("classify", "recover_tol", "0.02");
    return cfg;
  }
  if (name == "substitution-identities") {
    auto cfg = base("substitution-identities", {"identities"});
    cfg.set_param("identities", "k", "4,5,6");
    cfg.set_param("identities", "profiles", "10000");
    cfg.set_param("identities", "rel_tol", "1e-12");
    return cfg;
  }
  if (name == "w-distance") {
    auto cfg = base("w-distance", {"gen", "w_distance"});
    cfg.gen = gnp(400, 0.5);
    cfg.set_param("w_distance", "t", "8");
    cfg.set_param("w_distance", "k", "3");
    cfg.set_param("w_distance", "max_linf", "0.05");
    cfg.set_param("w_distance", "member_tol", "1e-10");
    return cfg;
  }
  if (name == "hajnal-szemeredi") {
    auto cfg = base("hajnal-szemeredi", {"hajnal"});
    cfg.set_param("hajnal", "graphs", "100");
    cfg.set_param("hajnal", "n", "12");
    cfg.set_param("hajnal", "k", "3");
    cfg.set_param("hajnal", "min_degree", "8");
    return cfg;
  }
  if (name == "concentration") {
    auto cfg = base("concentration", {"gen", "concentration"});
    cfg.gen = gnp(2000, 0.5);
    cfg.set_param("concentration", "trials", "100");
    cfg.set_param("concentration", "alpha", "0.5");
    cfg.set_param("concentration", "tol_fraction", "0.01");
    cfg.set_param("concentration", "min_pass", "99");
    return cfg;
  }
  if (name == "reproducibility") {
    auto cfg = base("reproducibility", {"reproducibility"});
    cfg.set_param("reproducibility", "presets", "theorem-1-2-separation,swap-calculus,forward-direction");
    cfg.set_param("reproducibility", "threads", "4");
    return cfg;
  }
  throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
}

}  // namespace qr
