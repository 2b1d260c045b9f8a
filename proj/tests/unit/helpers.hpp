#pragma once

#include <json.hpp>
#include <string>

#include "config.hpp"

namespace porohom::testing {

// Two charged species over a centered disk; small enough for unit tests.
inline nlohmann::json two_species(int m, int r, double t_final, double alpha = 0.0,
                                  double beta = 0.0, const std::string& kind = "disk") {
  nlohmann::json j;
  j["geometry"] = {{"inclusion", {{"kind", kind}, {"radius", 0.25}}}, {"m", m}, {"r", r}};
  j["scaling"] = {{"alpha", alpha}, {"beta", beta}, {"eta", 1.0}, {"p", 4.0},
                  {"T", t_final}, {"dt", 0.001}, {"output_interval", 0.005}};
  j["species"] = nlohmann::json::array({
      {{"D", 1.0}, {"z", 1}, {"c0", "1+0.5*cos(pi*x1)"}},
      {{"D", 1.0}, {"z", -1}, {"c0", "1+0.5*cos(pi*x2)"}},
  });
  return j;
}

inline std::string two_species_config(int m, int r, double t_final, double alpha = 0.0,
                                      double beta = 0.0, const std::string& kind = "disk") {
  return two_species(m, r, t_final, alpha, beta, kind).dump();
}

inline RunConfig parse(const nlohmann::json& j) { return parse_and_validate(j.dump()); }

}  // namespace porohom::testing
