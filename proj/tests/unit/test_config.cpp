#include <gtest/gtest.h>

#include "config.hpp"
#include "error.hpp"
#include "helpers.hpp"

using namespace porohom;
using porohom::testing::parse;
using porohom::testing::two_species;

TEST(Config, MinimalDocumentIsAccepted) {
  const RunConfig cfg = parse_and_validate(R"({"species":[{"D":1,"z":0,"c0":1}]})");
  EXPECT_EQ(cfg.geometry.m, 1);
  EXPECT_EQ(cfg.species.size(), 1u);
  EXPECT_EQ(cfg.macro_mode(), MacroMode::coupled);
}

TEST(Config, ParsesAllSections) {
  auto j = two_species(4, 8, 0.1, 0.5, 1.0);
  j["solver"] = {{"macro_mode", "decoupled"}, {"macro_resolution", 16}, {"poisson_every_step", true}};
  j["output"] = {{"snapshot_every", 3}, {"correctors", true}};
  j["study"] = {{"m_list", {2, 4}}, {"eta_list", {0.5, 0.25}}};
  const RunConfig cfg = parse(j);
  EXPECT_DOUBLE_EQ(cfg.epsilon(), 0.25);
  EXPECT_EQ(cfg.macro_mode(), MacroMode::decoupled);
  EXPECT_EQ(cfg.solver.macro_resolution, 16);
  EXPECT_TRUE(cfg.solver.poisson_every_step);
  EXPECT_TRUE(cfg.output.write_correctors);
  EXPECT_EQ(cfg.study.m_list, (std::vector<int>{2, 4}));
  EXPECT_EQ(cfg.species[1].charge, -1);
}

TEST(Config, RejectsViolatedAssumptions) {
  const auto rejects = [](nlohmann::json j) {
    EXPECT_THROW(parse(j), ConfigError) << j.dump();
  };
  rejects(two_species(2, 8, 0.1, 1.0, 0.0));
  auto j = two_species(2, 8, 0.1);
  j["scaling"]["p"] = 3.0;
  rejects(j);
  j = two_species(2, 8, 0.1);
  j["scaling"]["eta"] = 0.0;
  rejects(j);
  j = two_species(2, 8, 0.1);
  j["species"][0]["D"] = -1.0;
  rejects(j);
  j = two_species(2, 8, 0.1);
  j["species"][0]["c0"] = "x1-0.5";
  rejects(j);
  j = two_species(2, 8, 0.1);
  j["geometry"]["inclusion"]["radius"] = 0.49;
  rejects(j);
  j = two_species(2, 8, 0.1);
  j["geometry"]["colour"] = 1;
  rejects(j);
  j = two_species(2, 8, 0.1);
  j["study"] = {{"m_list", {4, 2}}};
  rejects(j);
  j = two_species(2, 8, 0.1);
  j["study"] = {{"eta_list", {0.1, 0.2}}};
  rejects(j);
  j = two_species(2, 8, 0.1);
  j["surface_charge"] = {{"xi2", "y1"}};
  rejects(j);
  j = two_species(2, 8, 0.1);
  j["solver"] = {{"macro_mode", "coupled"}};
  j["scaling"]["beta"] = 1.0;
  rejects(j);
  EXPECT_THROW(parse_and_validate("{not json"), ConfigError);
}

TEST(Config, AlphaAboveBetaMessageNamesTheAssumption) {
  try {
    parse(two_species(2, 8, 0.1, 1.0, 0.0));
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("alpha <= beta"), std::string::npos);
  }
}

TEST(Config, CompatibilityResidualIsReported) {
  auto j = two_species(2, 8, 0.1);
  j["species"][1]["z"] = 1;
  try {
    parse(j);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_GT(e.residual(), 0.0);
  }
}

TEST(Config, AutoBalanceShiftsXi2) {
  auto j = two_species(2, 8, 0.1);
  j["species"] = nlohmann::json::array({{{"D", 1.0}, {"z", 1}, {"c0", 1.0}}});
  j["surface_charge"] = {{"auto_balance", true}};
  const RunConfig cfg = parse(j);
  const MaskedGrid g =
      build_masked_grid(build_cell_geometry(InclusionShape::disk(0.25), 8), 2, 8);
  EXPECT_NEAR(cfg.surface.xi2_shift, -g.fluid_volume() / g.outer_area(), 1e-14);
}

TEST(Config, HashesAreStable) {
  const RunConfig a = parse(two_species(2, 8, 0.1));
  const RunConfig b = parse(two_species(2, 8, 0.1));
  EXPECT_EQ(config_hash(a), config_hash(b));
  EXPECT_EQ(config_hash(a).size(), 64u);
  const RunConfig c = parse(two_species(4, 8, 0.1));
  EXPECT_NE(config_hash(a), config_hash(c));
  EXPECT_EQ(physics_hash(a), physics_hash(c));
  EXPECT_NE(physics_hash(a), physics_hash(parse(two_species(2, 8, 0.2))));
  EXPECT_EQ(sha256_hex("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
