#include <gtest/gtest.h>

#include <filesystem>
#include <string>
#include <vector>

#include "porohom/porohom.h"

namespace fs = std::filesystem;

namespace {

const char* kConfig = R"J({"geometry":{"inclusion":{"kind":"disk","radius":0.25},"m":2,"r":8},
  "scaling":{"T":0.005,"dt":0.001},
  "species":[{"D":1,"z":1,"c0":"1+0.5*cos(pi*x1)"},{"D":1,"z":-1,"c0":"1+0.5*cos(pi*x2)"}]})J";

}  // namespace

TEST(CApi, VersionAndErrors) {
  EXPECT_NE(std::string(phm_version()), "");
  phm_session* s = nullptr;
  EXPECT_EQ(phm_session_from_text("{\"scaling\":{\"alpha\":1}}", &s), PHM_ERR_CONFIG);
  EXPECT_EQ(s, nullptr);
  EXPECT_NE(std::string(phm_last_error()).find("alpha"), std::string::npos);
  EXPECT_EQ(phm_session_from_text(nullptr, &s), PHM_ERR_ARGUMENT);
  EXPECT_EQ(phm_session_from_file("/nonexistent/config.json", &s), PHM_ERR_IO);
  phm_session_free(nullptr);
}

TEST(CApi, EffectiveTensor) {
  phm_session* s = nullptr;
  ASSERT_EQ(phm_session_from_text(kConfig, &s), PHM_OK);
  double a[9];
  int dim = 0;
  double porosity = 0.0;
  ASSERT_EQ(phm_effective_tensor(s, a, 9, &dim, &porosity), PHM_OK);
  EXPECT_EQ(dim, 2);
  EXPECT_NEAR(a[0], 0.76608312122331, 1e-8);
  EXPECT_NEAR(a[0], a[3], 1e-12);
  EXPECT_NEAR(porosity, 1.0 - 12.0 / 64.0, 1e-15);
  EXPECT_EQ(phm_effective_tensor(s, a, 2, &dim, &porosity), PHM_ERR_ARGUMENT);
  EXPECT_EQ(std::string(phm_session_hash(s)).size(), 64u);
  phm_session_free(s);
}

TEST(CApi, MicroHandle) {
  phm_session* s = nullptr;
  ASSERT_EQ(phm_session_from_text(kConfig, &s), PHM_OK);
  phm_micro* m = nullptr;
  ASSERT_EQ(phm_micro_create(s, &m), PHM_OK);
  const size_t cells = phm_micro_cells(m);
  EXPECT_EQ(cells, 256u - 4u * 12u);
  EXPECT_EQ(phm_micro_species(m), 2u);
  double mass0 = 0.0, mass1 = 0.0, e0 = 0.0, e1 = 0.0;
  ASSERT_EQ(phm_micro_mass(m, 0, &mass0), PHM_OK);
  ASSERT_EQ(phm_micro_energy(m, &e0), PHM_OK);
  ASSERT_EQ(phm_micro_step(m, 1e-3), PHM_OK);
  ASSERT_EQ(phm_micro_run(m), PHM_OK);
  EXPECT_NEAR(phm_micro_time(m), 0.005, 1e-14);
  ASSERT_EQ(phm_micro_mass(m, 0, &mass1), PHM_OK);
  ASSERT_EQ(phm_micro_energy(m, &e1), PHM_OK);
  EXPECT_NEAR(mass1, mass0, 1e-12 * mass0);
  EXPECT_LT(e1, e0);
  std::vector<double> c(cells), phi(cells);
  EXPECT_EQ(phm_micro_concentration(m, 1, c.data(), cells), PHM_OK);
  EXPECT_EQ(phm_micro_potential(m, phi.data(), cells), PHM_OK);
  EXPECT_EQ(phm_micro_concentration(m, 5, c.data(), cells), PHM_ERR_ARGUMENT);
  EXPECT_EQ(phm_micro_concentration(m, 0, c.data(), cells - 1), PHM_ERR_ARGUMENT);
  EXPECT_EQ(phm_micro_step(m, -1.0), PHM_ERR_STATE);
  phm_micro_free(m);
  phm_session_free(s);
}

TEST(CApi, RunWritesArtifacts) {
  phm_session* s = nullptr;
  ASSERT_EQ(phm_session_from_text(kConfig, &s), PHM_OK);
  const fs::path out = fs::temp_directory_path() / "porohom_capi_run";
  fs::remove_all(out);
  int code = -1;
  ASSERT_EQ(phm_run(s, "micro", out.c_str(), &code), PHM_OK);
  EXPECT_EQ(code, 0);
  EXPECT_TRUE(fs::exists(out / "manifest.json"));
  EXPECT_EQ(phm_run(s, "bogus", out.c_str(), &code), PHM_ERR_ARGUMENT);
  EXPECT_EQ(code, 64);
  EXPECT_EQ(phm_session_set_flag(s, static_cast<phm_flag>(99), 1), PHM_ERR_ARGUMENT);
  fs::remove_all(out);
  phm_session_free(s);
}
