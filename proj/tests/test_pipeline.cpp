#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "qrcert/parallel.hpp"
#include "qrcert/pipeline.hpp"

using namespace qr;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "qrcert-test-pipeline" / name;
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig small_config(const fs::path& out) {
  ExperimentConfig cfg;
  cfg.name = "small";
  cfg.stages = {"gen", "check_p1", "check_cut_graph", "check_clique_cut", "check_p3", "check_cut_hypergraph", "regularity"};
  cfg.gen.family = Family::half_split;
  cfg.gen.n = 60;
  cfg.gen.p = 0.3;
  cfg.p = 0.3;
  cfg.alpha = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  cfg.budget = 200;
  cfg.seed = 77;
  cfg.out = out.string();
  return cfg;
}

}  // namespace

TEST_CASE("config text round trip") {
  ExperimentConfig cfg = preset("swap-calculus");
  cfg.alpha = {0.2, 0.3, 0.5};
  cfg.tol = 0.0123456789;
  cfg.enumeration_budget = 12345;
  cfg.set_param("swap", "note", "a value with spaces");
  const std::string text = cfg.to_text();
  const auto back = ExperimentConfig::from_text(text);
  CHECK(back.to_text() == text);
  CHECK(back.gen.to_text() == cfg.gen.to_text());
  CHECK(back.param("swap", "note", "") == "a value with spaces");
  CHECK(back.param_double("swap", "max_error", 0) == 0.03);
  CHECK_THROWS_AS(ExperimentConfig::from_text("bogus = 1\n"), std::invalid_argument);
  for (const auto& name : preset_names()) {
    const auto p = preset(name);
    CHECK(ExperimentConfig::from_text(p.to_text()).to_text() == p.to_text());
  }
}

TEST_CASE("presets cover every criterion and validate") {
  CHECK(preset_names().size() == 12);
  for (const auto& name : preset_names()) CHECK_NOTHROW(preset(name).validate());
  CHECK_THROWS_AS(preset("no-such-preset"), std::invalid_argument);
}

TEST_CASE("stage seeds") {
  ExperimentConfig cfg;
  cfg.seed = 5;
  CHECK(stage_seed(cfg, "check_p1") == stage_seed(cfg, "check_p1"));
  CHECK(stage_seed(cfg, "check_p1") != stage_seed(cfg, "check_p2"));
  ExperimentConfig other = cfg;
  other.seed = 6;
  CHECK(stage_seed(cfg, "gen") != stage_seed(other, "gen"));
}

TEST_CASE("empty stage list") {
  ExperimentConfig cfg;
  cfg.out = scratch("empty").string();
  const auto r = run_pipeline(cfg);
  CHECK(r.exit_code == exit_ok);
  CHECK(r.stages.empty());
  for (const auto& e : fs::directory_iterator(cfg.out)) {
    const auto name = e.path().filename().string();
    CHECK((name == "manifest.txt" || name == "config.txt"));
  }
}

TEST_CASE("invalid configs exit 2") {
  ExperimentConfig cfg;
  cfg.out = scratch("invalid").string();
  cfg.stages = {"no_such_stage"};
  CHECK(run_pipeline(cfg).exit_code == exit_invalid_config);
  cfg.stages = {"check_p1"};
  CHECK(run_pipeline(cfg).exit_code == exit_invalid_config);
  cfg.stages = {"gen", "gen"};
  CHECK(run_pipeline(cfg).exit_code == exit_invalid_config);
  cfg.stages = {"gen"};
  cfg.gen.family = Family::half_split;
  cfg.gen.n = 10;
  cfg.gen.p = 0.9;
  const auto r = run_pipeline(cfg);
  CHECK(r.exit_code == exit_invalid_config);
  CHECK_FALSE(r.error.empty());
  cfg.gen.p = 0.2;
  cfg.p = 1.5;
  CHECK(run_pipeline(cfg).exit_code == exit_invalid_config);
}

TEST_CASE("gate failures exit 1") {
  auto cfg = small_config(scratch("gate"));
  cfg.stages = {"gen", "check_cut_graph"};
  cfg.set_param("check_cut_graph", "max", "0");
  const auto r = run_pipeline(cfg);
  CHECK(r.exit_code == exit_gate_failure);
  REQUIRE(r.stages.size() == 2);
  CHECK(r.stages[0].passed);
  CHECK_FALSE(r.stages[1].passed);
  CHECK(slurp(fs::path(cfg.out) / r.stages[1].report_file).find("status = fail") != std::string::npos);
}

TEST_CASE("reports, manifest and verification") {
  const auto out = scratch("verify");
  const auto cfg = small_config(out);
  const auto r = run_pipeline(cfg);
  REQUIRE(r.exit_code == exit_ok);
  REQUIRE(r.stages.size() == cfg.stages.size());
  CHECK(r.stages[1].report_file == "02-check_p1.txt");
  const std::string manifest = slurp(out / "manifest.txt");
  CHECK(manifest.find("version = qrcert 0.1.0") != std::string::npos);
  CHECK(manifest.find("config_hash = ") != std::string::npos);
  CHECK(fs::exists(out / "graph.txt"));
  CHECK(fs::exists(out / "hypergraph.txt"));

  for (std::size_t i = 1; i < r.stages.size(); ++i) {
    const auto path = (out / r.stages[i].report_file).string();
    if (r.stages[i].stage == "check_p3") continue;
    const auto v = verify_report(path);
    CAPTURE(path);
    CHECK(v.ok);
    CHECK(v.reported == v.recomputed);
  }

  // Tamper with the deviation.
  const auto path = out / "03-check_cut_graph.txt";
  std::string text = slurp(path);
  const auto at = text.find("max_abs_deviation = ");
  REQUIRE(at != std::string::npos);
  text.replace(at, text.find('\n', at) - at, "max_abs_deviation = 0.5");
  {
    std::ofstream o(out / "tampered.txt", std::ios::binary);
    o << text;
  }
  CHECK_FALSE(verify_report((out / "tampered.txt").string()).ok);

  fs::copy_file(path, out / ".." / "orphan.txt", fs::copy_options::overwrite_existing);
  CHECK_THROWS(verify_report((out / ".." / "orphan.txt").string()));
}

TEST_CASE("config hash ignores the output directory") {
  auto a = small_config(scratch("hash-a"));
  auto b = small_config(scratch("hash-b"));
  a.stages = b.stages = {"gen"};
  run_pipeline(a);
  run_pipeline(b);
  CHECK(slurp(fs::path(a.out) / "manifest.txt") == slurp(fs::path(b.out) / "manifest.txt"));
  b.seed = 78;
  run_pipeline(b);
  CHECK(slurp(fs::path(a.out) / "manifest.txt") != slurp(fs::path(b.out) / "manifest.txt"));
}

TEST_CASE("reports are byte-identical across thread counts") {
  const unsigned saved = thread_count();
  std::vector<std::string> all;
  for (unsigned threads : {1u, 3u, 1u}) {
    set_thread_count(threads);
    const auto out = scratch("threads-" + std::to_string(all.size()));
    auto cfg = small_config(out);
    cfg.stages.push_back("concentration");
    cfg.set_param("concentration", "tol_fraction", "0.05");
    REQUIRE(run_pipeline(cfg).exit_code == exit_ok);
    std::string joined;
    for (const auto& name : {"manifest.txt", "graph.txt", "02-check_p1.txt", "03-check_cut_graph.txt", "04-check_clique_cut.txt",
                             "06-check_cut_hypergraph.txt", "07-regularity.txt", "08-concentration.txt"})
      joined += slurp(out / name);
    all.push_back(joined);
  }
  set_thread_count(saved);
  CHECK(all[0] == all[1]);
  CHECK(all[0] == all[2]);
}

TEST_CASE("small analysis stages") {
  ExperimentConfig cfg;
  cfg.out = scratch("analysis").string();
  cfg.stages = {"gottlieb", "identities", "hajnal"};
  cfg.set_param("gottlieb", "t_max", "7");
  cfg.set_param("identities", "profiles", "200");
  cfg.set_param("hajnal", "graphs", "5");
  const auto r = run_pipeline(cfg);
  CHECK(r.exit_code == exit_ok);
  CHECK(r.stages.size() == 3);
}
