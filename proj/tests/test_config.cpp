#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "ordvar/report.hpp"

using namespace ordvar;
using nlohmann::json;

namespace {

json base_doc() {
  return json::parse(R"({
    "grid": {
      "pairs": [[5, 7]],
      "ratios": [0.8],
      "nus": [8],
      "replications": 200,
      "estimators": ["d11_Q", "dBZ_Q"]
    }
  })");
}

std::string error_key(const json& doc) {
  try {
    parse_run_config(doc);
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "";
}

}  // namespace

TEST(Config, ParsesMinimalDocument) {
  const auto cfg = parse_run_config(base_doc());
  ASSERT_EQ(cfg.panels.size(), 1u);
  const auto& g = cfg.panels[0].grid;
  EXPECT_EQ(g.replications, 200);
  EXPECT_EQ(g.estimators.size(), 2u);
  EXPECT_EQ(g.estimators[1].family, EstimatorFamily::Boundary);
  EXPECT_EQ(g.parameterization, Parameterization::Paper);
  EXPECT_TRUE(cfg.wants(OutputFormat::LongCsv));
}

TEST(Config, UnknownKeysNamed) {
  auto doc = base_doc();
  doc["grid"]["colour"] = "blue";
  EXPECT_EQ(error_key(doc), "grid.colour");
  doc = base_doc();
  doc["extra"] = 1;
  EXPECT_EQ(error_key(doc), "extra");
}

TEST(Config, TypeAndValueErrorsNamed) {
  auto doc = base_doc();
  doc["grid"]["replications"] = "many";
  EXPECT_EQ(error_key(doc), "grid.replications");
  doc = base_doc();
  doc["grid"]["estimators"] = json::array({"d99_Q"});
  EXPECT_EQ(error_key(doc), "grid.estimators[0]");
  doc = base_doc();
  doc["grid"]["parameterization"] = "other";
  EXPECT_EQ(error_key(doc), "grid.parameterization");
  doc = base_doc();
  doc["grid"].erase("nus");
  EXPECT_EQ(error_key(doc), "grid.nus");
  doc = base_doc();
  doc["grid"]["ratios"] = json::array({1.2});
  EXPECT_EQ(error_key(doc), "grid");
  doc["enforce_ordering"] = false;
  EXPECT_EQ(error_key(doc), "");
}

TEST(Config, ScalarMeanFillsVector) {
  auto doc = base_doc();
  doc["grid"]["mu1"] = 1.5;
  doc["grid"]["p"] = 3;
  const auto cfg = parse_run_config(doc);
  EXPECT_EQ(cfg.panels[0].grid.mu1, std::vector<double>(3, 1.5));
  doc["grid"]["mu1"] = json::array({1.0});
  EXPECT_EQ(error_key(doc), "grid.mu1");
}

TEST(Config, MissingFile) {
  try {
    load_run_config("/nonexistent/missing.toml");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("missing.toml"), std::string::npos);
  }
}

TEST(Config, CheckSection) {
  const auto cfg = parse_run_config(json::parse(R"({"check": {"target": "sigma2", "loss": "E",
      "candidate": {"kind": "constant", "value": 0.1}, "grid": [0.1, 1, 10]}})"));
  ASSERT_TRUE(cfg.check.has_value());
  EXPECT_EQ(cfg.check->target, Target::Sigma2);
  EXPECT_EQ(cfg.check->candidate_value, 0.1);
  EXPECT_EQ(error_key(json::parse(R"({"check": {"grid": [1, 0.5]}})")), "check.grid");
}

TEST(Presets, Tables) {
  const auto t1 = table_preset(1);
  const auto& g = t1.panels[0].grid;
  EXPECT_EQ(g.pairs.size(), 5u);
  EXPECT_EQ(g.ratios.size(), 6u);
  EXPECT_EQ(g.nus.size(), 4u);
  EXPECT_EQ(g.estimators[0].name(), "d11_Q");
  EXPECT_EQ(g.estimators[1].name(), "dBZ_Q");
  EXPECT_EQ(table_preset(2).panels[0].grid.estimators[1].name(), "dBZ_E");
  const auto f = figures_preset();
  EXPECT_EQ(f.panels.size(), 6u);
  EXPECT_FALSE(f.wants(OutputFormat::TableCsv));
  EXPECT_EQ(f.panels[1].grid.mu1, std::vector<double>(2, 3.0));
}

TEST(EstimatorNames, RoundTrip) {
  for (const char* name : {"baee1_Q", "baee2_E", "d11_Q", "d12_E", "d21_Q", "d22_E", "dBZ_Q", "dBZ2_E"}) {
    const auto spec = EstimatorSpec::parse(name);
    ASSERT_TRUE(spec.has_value()) << name;
    EXPECT_EQ(spec->name(), name);
  }
  EXPECT_EQ(EstimatorSpec::parse("dBZ1_E")->name(), "dBZ_E");
  EXPECT_FALSE(EstimatorSpec::parse("d11").has_value());
  EXPECT_FALSE(EstimatorSpec::parse("d11_X").has_value());
}

TEST(Formatting, LocaleIndependent) {
  EXPECT_EQ(format_fixed(20.034, 2), "20.03");
  EXPECT_EQ(format_fixed(-0.001, 2), "0.00");
  EXPECT_EQ(format_fixed(std::nan(""), 2), "NA");
  EXPECT_EQ(format_shortest(0.1), "0.1");
  EXPECT_EQ(format_shortest(5.0), "5");
}

TEST(Outputs, TableAndMetadataFiles) {
  auto cfg = parse_run_config(base_doc());
  cfg.name = "unit";
  cfg.output_dir = std::filesystem::temp_directory_path() / "ordvar_test_outputs";
  std::filesystem::remove_all(cfg.output_dir);
  std::vector<PanelResult> results;
  results.push_back({cfg.panels[0], run_grid(cfg.panels[0].grid, 1)});
  const auto files = write_outputs(cfg, results, "run");
  ASSERT_EQ(files.size(), 3u);
  std::ifstream table(cfg.output_dir / "unit_nu8.csv");
  std::string header, line;
  std::getline(table, header);
  std::getline(table, line);
  EXPECT_EQ(header, "n1,n2,ratio,rri_d11_Q,rri_dBZ_Q");
  EXPECT_EQ(line.rfind("5,7,0.8,", 0), 0u);
  std::ifstream meta_in(cfg.output_dir / "unit_metadata.json");
  const auto meta = json::parse(meta_in);
  for (const char* key : {"master_seed", "replications", "parameterization", "mu1", "mu2", "dbz_interpretation",
                          "version", "failed_cells"}) {
    EXPECT_TRUE(meta.contains(key)) << key;
  }
  EXPECT_EQ(meta["parameterization"]["tag"], "paper");
}
