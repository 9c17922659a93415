// Acceptance runner: A1-A9 in process, A10 by running the CLI twice and
// comparing its CSV output byte for byte. Exit status 0 iff every line passes.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>

#include "lamsmooth/acceptance.hpp"

namespace fs = std::filesystem;
namespace acc = lamsmooth::acceptance;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

bool report(const std::string& id, bool pass, const std::string& title, const std::string& detail) {
  std::cout << id << ' ' << (pass ? "PASS" : "FAIL") << "  " << title << "\n    " << detail << std::endl;
  return pass;
}

bool determinism(const std::string& cli) {
  const fs::path root = fs::temp_directory_path() / "lamsmooth_acceptance";
  fs::remove_all(root);
  int rc[2];
  for (int i = 0; i < 2; ++i) {
    const std::string cmd = "\"" + cli + "\" verify --all --seed 7 --out \"" + (root / std::to_string(i)).string() +
                            "\" > \"" + (root / ("log" + std::to_string(i))).string() + "\" 2>&1";
    fs::create_directories(root);
    rc[i] = std::system(cmd.c_str());
  }
  std::string detail = "cli exit codes " + std::to_string(rc[0]) + ", " + std::to_string(rc[1]);
  bool same = rc[0] == 0 && rc[1] == 0;
  for (const char* name : {"acceptance_reports.csv", "acceptance_summary.csv"}) {
    const auto a = slurp(root / "0" / name), b = slurp(root / "1" / name);
    const bool eq = !a.empty() && a == b;
    detail += std::string("; ") + name + (eq ? " identical (" + std::to_string(a.size()) + " bytes)" : " differs");
    same = same && eq;
  }
  if (same) fs::remove_all(root);
  return report("A10", same, "verify --all --seed 7 is deterministic", detail);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: acceptance <path-to-lamsmooth-cli>\n";
    return 2;
  }
  acc::Options o;
  bool all = true;
  for (const auto& c : acc::criteria()) {
    const auto r = acc::run_criterion(c, o);
    std::ostringstream timing;
    timing << std::fixed << std::setprecision(2) << r.seconds << " s of " << std::setprecision(0) << r.limit_seconds
           << " s";
    all &= report(r.id, r.pass && r.within_limit(), r.title, r.detail + " [" + timing.str() + "]");
  }
  all &= determinism(argv[1]);
  std::cout << "acceptance: " << (all ? "PASS" : "FAIL") << std::endl;
  return all ? 0 : 1;
}
