// Acceptance suite: one pass/fail line per criterion, driven through the C API.
#include <algorithm>
#include <bit>
#include <cstdint>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "porohom/porohom.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kConfigs = POROHOM_CONFIG_DIR;
const fs::path kWork = POROHOM_ACCEPTANCE_DIR;

struct Failure {
  std::string what;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw Failure{what};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  require(static_cast<bool>(in), "cannot read " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json load_config(const std::string& name) { return json::parse(slurp(kConfigs / name)); }

// Runs a subcommand on a config document and returns the output directory.
fs::path run(const json& config, const std::string& subcommand, const std::string& tag) {
  const fs::path out = kWork / tag;
  fs::remove_all(out);
  phm_session* session = nullptr;
  const std::string text = config.dump();
  require(phm_session_from_text(text.c_str(), &session) == PHM_OK,
          tag + ": config rejected: " + phm_last_error());
  int code = -1;
  const phm_status st = phm_run(session, subcommand.c_str(), out.c_str(), &code);
  phm_session_free(session);
  require(st == PHM_OK || st == PHM_ERR_CHECK, tag + ": " + phm_last_error());
  require(code == 0 || code == 1, tag + ": exit status " + std::to_string(code));
  return out;
}

json report(const fs::path& dir) { return json::parse(slurp(dir / "report.json")); }
json timing(const fs::path& dir) { return json::parse(slurp(dir / "timing.json")); }

// Column-major numeric table from a CSV file with a header row.
std::map<std::string, std::vector<double>> read_csv(const fs::path& p) {
  std::istringstream in(slurp(p));
  std::string line;
  std::getline(in, line);
  std::vector<std::string> names;
  std::stringstream header(line);
  for (std::string cell; std::getline(header, cell, ',');) names.push_back(cell);
  std::map<std::string, std::vector<double>> table;
  while (std::getline(in, line)) {
    std::stringstream row(line);
    std::size_t k = 0;
    for (std::string cell; std::getline(row, cell, ','); ++k) table[names.at(k)].push_back(std::stod(cell));
  }
  return table;
}

std::vector<std::string> species_columns(const std::map<std::string, std::vector<double>>& t,
                                         const std::string& prefix) {
  std::vector<std::string> out;
  for (int i = 1; t.count(prefix + std::to_string(i)); ++i) out.push_back(prefix + std::to_string(i));
  require(!out.empty(), "no columns named " + prefix + "<i>");
  return out;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// Criterion 1: effective tensor.
std::string effective_tensor() {
  json none = load_config("cell_disk.json");
  none["geometry"]["inclusion"] = {{"kind", "none"}};
  none["geometry"]["r"] = 32;
  const json a_none = report(run(none, "cell", "c1_none"))["A_hom"];
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 2; ++k)
      require(std::abs(a_none[j][k].get<double>() - (j == k ? 1.0 : 0.0)) <= 1e-10,
              "no-inclusion tensor differs from identity");

  const fs::path dir = run(load_config("cell_disk.json"), "cell", "c1_disk");
  const json r = report(dir);
  require(r["resolution"] == 128, "disk cell not at resolution 128");
  const auto& a = r["A_hom"];
  const auto& e = r["energy_form"];
  require(std::abs(a[0][1].get<double>() - a[1][0].get<double>()) <= 1e-10, "tensor asymmetric");
  require(std::abs(a[0][1].get<double>()) <= 1e-6 && std::abs(a[1][0].get<double>()) <= 1e-6,
          "off-diagonal above 1e-6");
  require(r["min_eigenvalue"].get<double>() > 0.0, "tensor not SPD");
  double mismatch = 0.0;
  for (int k = 0; k < 2; ++k) {
    const double d = a[k][k];
    require(d > 0.0 && d < 1.0, "diagonal outside (0,1)");
    for (int j = 0; j < 2; ++j)
      mismatch = std::max(mismatch, std::abs(a[j][k].get<double>() - e[j][k].get<double>()) / d);
  }
  require(mismatch <= 1e-8, "energy form and mean flux disagree by " + fmt(mismatch));
  const double seconds = timing(dir)["cell_seconds"];
  require(seconds < 10.0, "cell solve took " + fmt(seconds) + " s");
  return "A_hom=" + fmt(a[0][0]) + " asym=" + fmt(std::abs(a[0][1].get<double>() - a[1][0].get<double>())) +
         " t=" + fmt(seconds) + "s";
}

json canonical() { return load_config("canonical_micro.json"); }

void check_canonical_data(const json& c) {
  require(c["geometry"]["m"] == 8 && c["geometry"]["r"] == 8, "canonical grid is not m=8, r=8");
  require(c["species"].size() == 2, "canonical run needs two species");
  require(c["species"][0]["z"] == 1 && c["species"][1]["z"] == -1, "canonical charges not +-1");
  require(c["scaling"]["T"] == 0.1, "canonical T is not 0.1");
}

fs::path canonical_run() {
  static fs::path dir;
  if (dir.empty()) {
    check_canonical_data(canonical());
    dir = run(canonical(), "micro", "c2_canonical");
  }
  return dir;
}

// Criterion 2: conservation.
std::string conservation() {
  const fs::path dir = canonical_run();
  const auto t = read_csv(dir / "diagnostics.csv");
  double drift = 0.0;
  for (const auto& col : species_columns(t, "mass_c_")) {
    const auto& m = t.at(col);
    for (double v : m) drift = std::max(drift, rel(v, m.front()));
  }
  double compat = 0.0;
  for (double v : t.at("compatibility")) compat = std::max(compat, std::abs(v));
  const double seconds = timing(dir)["micro_seconds"];
  require(drift <= 1e-9, "mass drift " + fmt(drift));
  require(compat <= 1e-10, "compatibility residual " + fmt(compat));
  require(seconds < 120.0, "runtime " + fmt(seconds) + " s");
  return "mass_drift=" + fmt(drift) + " compat=" + fmt(compat) + " t=" + fmt(seconds) + "s";
}

// Criterion 3: energy decay and the L^p surrogate.
std::string energy_decay() {
  const json c = canonical();
  const fs::path dir = canonical_run();
  const auto t = read_csv(dir / "diagnostics.csv");
  const auto& v = t.at("energy");
  const double v0 = v.front();
  double rise = -INFINITY;
  for (std::size_t k = 1; k < v.size(); ++k) rise = std::max(rise, v[k] - v[k - 1]);
  require(rise <= 1e-8 * v0, "energy increased by " + fmt(rise / v0) + " V(0)");
  const double eta = c["scaling"]["eta"], p = c["scaling"]["p"];
  double lp = 0.0;
  for (const auto& col : species_columns(t, "lp_c_"))
    for (double x : t.at(col)) lp = std::max(lp, eta / (p - 1.0) * x / v0);
  require(lp <= 1.0, "Lp bound ratio " + fmt(lp));
  return "samples=" + std::to_string(v.size()) + " max_rise/V0=" + fmt(rise / v0) +
         " lp_ratio=" + fmt(lp);
}

// Criterion 4: nonnegativity and boundedness.
std::string nonnegativity() {
  const auto t = read_csv(canonical_run() / "diagnostics.csv");
  double lo = INFINITY, hi = -INFINITY, hi0 = -INFINITY;
  for (const auto& col : species_columns(t, "min_c_"))
    for (double x : t.at(col)) lo = std::min(lo, x);
  for (const auto& col : species_columns(t, "max_c_")) {
    hi0 = std::max(hi0, t.at(col).front());
    for (double x : t.at(col)) hi = std::max(hi, x);
  }
  require(lo >= -1e-12, "min concentration " + fmt(lo));
  require(hi <= 1.5 * hi0, "max concentration grew to " + fmt(hi / hi0) + "x");
  return "min=" + fmt(lo) + " max/max0=" + fmt(hi / hi0);
}

// Criterion 5: manufactured solutions.
std::string mms() {
  const json c = load_config("mms.json");
  require(c["study"]["mms_resolutions"] == json({32, 64, 128}), "MMS resolutions are not 32/64/128");
  const fs::path dir = run(c, "mms", "c5_mms");
  const json results = report(dir)["results"];
  std::map<std::string, double> order;
  for (const auto& r : results) order[r["kind"].get<std::string>()] = r["order"].get<double>();
  for (const char* k : {"poisson_micro", "poisson_macro"})
    require(order.at(k) >= 1.8 && order.at(k) <= 2.2, std::string(k) + " order " + fmt(order.at(k)));
  require(order.at("diffusion_space") >= 1.8, "diffusion spatial order " + fmt(order.at("diffusion_space")));
  require(order.at("diffusion_time") >= 0.9, "diffusion temporal order " + fmt(order.at("diffusion_time")));
  const double seconds = timing(dir)["total_seconds"];
  require(seconds < 120.0, "runtime " + fmt(seconds) + " s");
  return "poisson_micro=" + fmt(order["poisson_micro"]) + " poisson_macro=" +
         fmt(order["poisson_macro"]) + " space=" + fmt(order["diffusion_space"]) +
         " time=" + fmt(order["diffusion_time"]) + " t=" + fmt(seconds) + "s";
}

void check_study_data(const json& c, double beta) {
  require(c["study"]["m_list"] == json({4, 8, 16}), "epsilon list is not 1/4, 1/8, 1/16");
  require(c["geometry"]["r"] == 8 && c["geometry"]["inclusion"]["radius"] == 0.25, "cell data differ");
  require(c["scaling"]["T"] == 0.05, "study T is not 0.05");
  require(c["scaling"]["alpha"] == 0 && c["scaling"]["beta"] == beta, "unexpected alpha/beta");
}

std::string error_table(const json& r) {
  std::string s;
  for (const auto& l : r["levels"]) {
    s += " m=" + std::to_string(l["m"].get<int>()) + ":";
    for (const auto& e : l["concentration_error"]) s += fmt(e) + "/";
    s.pop_back();
  }
  return s;
}

void require_decreasing(const json& r) {
  const auto& levels = r["levels"];
  require(levels.size() == 3, "expected three epsilon levels");
  for (std::size_t k = 1; k < levels.size(); ++k)
    for (std::size_t i = 0; i < levels[k]["concentration_error"].size(); ++i)
      require(levels[k]["concentration_error"][i].get<double>() <
                  levels[k - 1]["concentration_error"][i].get<double>(),
              "concentration error of species " + std::to_string(i + 1) + " does not decrease");
}

// Criterion 6: homogenization convergence with alpha == beta.
std::string convergence_coupled() {
  const json c = load_config("converge_coupled.json");
  check_study_data(c, 0);
  const fs::path dir = run(c, "converge", "c6_coupled");
  const json r = report(dir);
  require(r["mode"] == "coupled", "macro model not coupled");
  require_decreasing(r);
  const auto& last = r["levels"].back();
  const double plain = last["potential_error"], corrected = last["potential_corrected_error"];
  require(corrected <= plain, "corrector does not improve the potential");
  const double seconds = timing(dir)["total_seconds"];
  require(seconds < 1200.0, "runtime " + fmt(seconds) + " s");
  return "errors" + error_table(r) + " phi@1/16=" + fmt(plain) + "->" + fmt(corrected) +
         " t=" + fmt(seconds) + "s";
}

// Criterion 7: decoupling for alpha < beta.
std::string convergence_decoupled() {
  const json c = load_config("converge_decoupled.json");
  check_study_data(c, 1);
  const json r = report(run(c, "converge", "c7_decoupled"));
  require(r["mode"] == "decoupled", "macro model not decoupled");
  require_decreasing(r);

  json base = c;
  base["solver"]["macro_resolution"] = 32;
  base["output"]["snapshot_every"] = 1;
  json neutral = base;
  neutral["species"][0]["z"] = 0;
  neutral["species"][1]["z"] = 0;
  json charged = base;
  charged["species"][0]["z"] = 2;
  charged["species"][1]["z"] = -3;
  charged["surface_charge"] = {{"xi1", "0.5 + cos(2*pi*y1)*x2"}, {"xi2", "x1*x2"}, {"auto_balance", true}};
  const fs::path dirs[3] = {run(base, "macro", "c7_base"), run(neutral, "macro", "c7_neutral"),
                            run(charged, "macro", "c7_charged")};
  std::size_t compared = 0;
  for (const auto& entry : fs::directory_iterator(dirs[0])) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("snapshot_", 0) != 0) continue;
    const auto ref = read_csv(entry.path());
    for (int v = 1; v < 3; ++v) {
      const auto other = read_csv(dirs[v] / name);
      for (const auto& col : species_columns(ref, "c0_")) {
        const auto& a = ref.at(col);
        const auto& b = other.at(col);
        require(a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(),
                                                   [](double x, double y) {
                                                     return std::bit_cast<std::uint64_t>(x) ==
                                                            std::bit_cast<std::uint64_t>(y);
                                                   }),
                "decoupled trajectory changed with z/xi in " + name);
      }
    }
    ++compared;
  }
  require(compared >= 2, "too few macro snapshots to compare");
  return "errors" + error_table(r) + " invariant_snapshots=" + std::to_string(compared);
}

// Criterion 8: determinism of criteria 2 and 6.
std::string determinism() {
  std::size_t files = 0;
  const auto compare = [&](const json& cfg, const std::string& sub, const std::string& tag) {
    const fs::path a = run(cfg, sub, tag + "_a");
    const fs::path b = run(cfg, sub, tag + "_b");
    for (const auto& entry : fs::directory_iterator(a)) {
      const std::string name = entry.path().filename().string();
      if (name == "timing.json" || name == "manifest.json") continue;
      require(fs::exists(b / name), tag + ": " + name + " missing in replay");
      require(slurp(entry.path()) == slurp(b / name), tag + ": " + name + " differs");
      ++files;
    }
    require(fs::exists(a / "report.json"), tag + ": no report");
  };
  compare(canonical(), "micro", "c8_micro");
  compare(load_config("converge_coupled.json"), "converge", "c8_converge");
  return "identical_files=" + std::to_string(files);
}

}  // namespace

int main() {
  fs::create_directories(kWork);
  const std::vector<std::pair<std::string, std::function<std::string()>>> criteria{
      {"effective tensor", effective_tensor},
      {"conservation", conservation},
      {"energy decay", energy_decay},
      {"nonnegativity and boundedness", nonnegativity},
      {"manufactured solutions", mms},
      {"homogenization convergence (alpha = beta)", convergence_coupled},
      {"decoupling (alpha < beta)", convergence_decoupled},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    std::string detail;
    bool ok = true;
    try {
      detail = criteria[k].second();
    } catch (const Failure& f) {
      ok = false;
      detail = f.what;
    } catch (const std::exception& e) {
      ok = false;
      detail = e.what();
    }
    failed += ok ? 0 : 1;
    std::printf("criterion %zu %s: %s (%s)\n", k + 1, ok ? "PASS" : "FAIL",
                criteria[k].first.c_str(), detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
