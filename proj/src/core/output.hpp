#pragma once

#include <filesystem>
#include <json.hpp>
#include <string>
#include <vector>

#include "geometry.hpp"
#include "simulation.hpp"

namespace porohom {

/// Shortest decimal text that round-trips to the same double.
std::string format_number(double value);

/// Diagnostics time series: t, mass_<i>, energy, min_<i>, max_<i>, mean_<phi>,
/// compatibility, dt, grad_<phi>_norm, grad_<c>_<i>_norm, lp_<c>_<i>.
std::string diagnostics_csv(const DiagnosticsRecord& record, const std::string& conc_name,
                            const std::string& phi_name);

/// One row per fluid cell: cell_index, x1..xn, <c>_1..<c>_P, <phi>.
std::string snapshot_csv(const MaskedGrid& grid, const FieldState& state,
                         const std::string& conc_name, const std::string& phi_name);

std::string snapshot_name(double t);

/// Output directory that remembers every file written to it.
class RunDirectory {
 public:
  explicit RunDirectory(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }
  void write(const std::string& name, const std::string& content);
  void write_json(const std::string& name, const nlohmann::json& doc);
  bool contains(const std::string& name) const;

  /// [{name, bytes, sha256}] in write order.
  nlohmann::json inventory() const;

 private:
  struct Entry {
    std::string name;
    std::size_t bytes;
    std::string sha256;
  };
  std::filesystem::path root_;
  std::vector<Entry> entries_;
};

}  // namespace porohom
