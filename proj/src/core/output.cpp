#include "output.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>

#include "config.hpp"
#include "error.hpp"

namespace porohom {

std::string format_number(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

namespace {

void append(std::string& line, double v) {
  line += ',';
  line += format_number(v);
}

}  // namespace

std::string diagnostics_csv(const DiagnosticsRecord& record, const std::string& conc_name,
                            const std::string& phi_name) {
  const std::size_t species = record.samples.empty() ? 0 : record.samples.front().mass.size();
  std::string out = "t";
  for (std::size_t i = 1; i <= species; ++i) out += ",mass_" + conc_name + "_" + std::to_string(i);
  out += ",energy";
  for (std::size_t i = 1; i <= species; ++i) out += ",min_" + conc_name + "_" + std::to_string(i);
  for (std::size_t i = 1; i <= species; ++i) out += ",max_" + conc_name + "_" + std::to_string(i);
  out += ",mean_" + phi_name + ",compatibility,dt,grad_" + phi_name + "_norm";
  for (std::size_t i = 1; i <= species; ++i)
    out += ",grad_" + conc_name + "_" + std::to_string(i) + "_norm";
  for (std::size_t i = 1; i <= species; ++i) out += ",lp_" + conc_name + "_" + std::to_string(i);
  out += '\n';
  for (const auto& s : record.samples) {
    std::string line = format_number(s.t);
    for (double v : s.mass) append(line, v);
    append(line, s.energy);
    for (double v : s.min_conc) append(line, v);
    for (double v : s.max_conc) append(line, v);
    append(line, s.mean_phi);
    append(line, s.compatibility);
    append(line, s.dt);
    append(line, s.grad_phi_norm);
    for (double v : s.grad_conc_norm) append(line, v);
    for (double v : s.lp_norm_p) append(line, v);
    out += line;
    out += '\n';
  }
  return out;
}

std::string snapshot_csv(const MaskedGrid& grid, const FieldState& state,
                         const std::string& conc_name, const std::string& phi_name) {
  const int dim = grid.dimension();
  std::string out = "cell_index";
  for (int d = 1; d <= dim; ++d) out += ",x" + std::to_string(d);
  for (std::size_t i = 1; i <= state.conc.size(); ++i)
    out += "," + conc_name + "_" + std::to_string(i);
  out += "," + phi_name + "\n";
  for (std::size_t k = 0; k < grid.fluid_cells(); ++k) {
    const int c = static_cast<int>(k);
    std::string line = std::to_string(grid.lattice_cell(c));
    const Point x = grid.center(c);
    for (int d = 0; d < dim; ++d) append(line, x[d]);
    for (const auto& conc : state.conc) append(line, conc[k]);
    append(line, state.phi.empty() ? 0.0 : state.phi[k]);
    out += line;
    out += '\n';
  }
  return out;
}

std::string snapshot_name(double t) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "snapshot_%.9g.csv", t);
  return buf;
}

RunDirectory::RunDirectory(std::filesystem::path root) : root_(std::move(root)) {
  std::error_code ec;
  std::filesystem::create_directories(root_, ec);
  if (ec) throw Error(ErrorKind::io, "cannot create " + root_.string() + ": " + ec.message());
}

void RunDirectory::write(const std::string& name, const std::string& content) {
  const auto path = root_ / name;
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  file.write(content.data(), static_cast<std::streamsize>(content.size()));
  file.close();
  if (!file) throw Error(ErrorKind::io, "cannot write " + path.string());
  for (auto& e : entries_)
    if (e.name == name) {
      e.bytes = content.size();
      e.sha256 = sha256_hex(content);
      return;
    }
  entries_.push_back({name, content.size(), sha256_hex(content)});
}

void RunDirectory::write_json(const std::string& name, const nlohmann::json& doc) {
  write(name, doc.dump(2) + "\n");
}

bool RunDirectory::contains(const std::string& name) const {
  for (const auto& e : entries_)
    if (e.name == name) return true;
  return false;
}

nlohmann::json RunDirectory::inventory() const {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& e : entries_)
    list.push_back({{"name", e.name}, {"bytes", e.bytes}, {"sha256", e.sha256}});
  return list;
}

}  // namespace porohom
