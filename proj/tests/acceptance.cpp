// Runs one preset per acceptance criterion and prints one PASS/FAIL line each.
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "qrcert/pipeline.hpp"

namespace fs = std::filesystem;
using namespace qr;

namespace {

struct Criterion {
  int id;
  const char* preset;
  double max_seconds;  // 0 = no runtime gate
  bool verify_witnesses;
};

const std::vector<Criterion> kCriteria = {
    {1, "oracle-equivalence", 60, false},      {2, "gottlieb-sweep", 300, false},
    {3, "n-full-rank", 0, false},              {4, "theorem-1-2-separation", 120, true},
    {5, "forward-direction", 0, true},         {6, "swap-calculus", 0, false},
    {7, "classifier", 0, false},               {8, "substitution-identities", 0, false},
    {9, "w-distance", 0, false},               {10, "hajnal-szemeredi", 0, false},
    {11, "concentration", 0, false},           {12, "reproducibility", 0, false},
};

}  // namespace

int main(int argc, char** argv) {
  const fs::path root = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "qrcert-acceptance";
  fs::remove_all(root);
  int failed = 0;
  for (const auto& c : kCriteria) {
    ExperimentConfig cfg = preset(c.preset);
    cfg.out = (root / c.preset).string();
    const auto start = std::chrono::steady_clock::now();
    const PipelineResult r = run_pipeline(cfg);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    bool ok = r.exit_code == exit_ok;
    std::string detail;
    for (const auto& s : r.stages) {
      if (s.stage == "gen") continue;
      detail += (detail.empty() ? "" : "; ") + s.stage + ": " + s.summary;
    }
    if (!r.error.empty()) detail += (detail.empty() ? "" : "; ") + std::string("error: ") + r.error;
    if (c.verify_witnesses)
      for (const auto& s : r.stages) {
        if (s.stage.rfind("check_", 0) != 0) continue;
        const auto v = verify_report((fs::path(cfg.out) / s.report_file).string());
        if (!v.ok) {
          ok = false;
          detail += "; witness of " + s.stage + " does not reproduce";
        }
      }
    if (c.max_seconds > 0 && seconds > c.max_seconds) {
      ok = false;
      detail += "; runtime over " + std::to_string(static_cast<int>(c.max_seconds)) + " s";
    }
    char time_buf[32];
    std::snprintf(time_buf, sizeof time_buf, "%.1f s", seconds);
    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << c.id << " [" << c.preset << "] (" << time_buf << "): " << detail
              << std::endl;
    if (!ok) ++failed;
  }
  std::cout << (kCriteria.size() - static_cast<std::size_t>(failed)) << "/" << kCriteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
