#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("ccchart_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(std::vector<std::string> args) {
    args.insert(args.begin(), "ccchart");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    out_.str("");
    err_.str("");
    return ccchart::cli::run(static_cast<int>(argv.size()), argv.data(), out_, err_);
  }

  std::string out() const { return dir_.string(); }
  json read_json(const std::string& name) const {
    std::ifstream in(dir_ / name);
    return json::parse(in);
  }
  std::string read(const fs::path& p) const {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  }
  void write(const std::string& name, const std::string& text) const {
    std::ofstream(dir_ / name) << text;
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

}  // namespace

TEST_F(CliTest, AreaUniformFixedFour) {
  ASSERT_EQ(run({"area", "--preset", "ufix4", "--out", out()}), 0) << err_.str();
  const json j = read_json("ufix4_cca.json");
  EXPECT_NEAR(j["cca_boundary_integral"].get<double>(), 0.1309, 1e-4);
  EXPECT_NEAR(j["cca_grid"].get<double>(), 0.1309, 2e-3);
  EXPECT_LT(j["relative_difference"].get<double>(), 0.01);
  EXPECT_EQ(j["grid_resolution"], 801);
  EXPECT_EQ(j["config"]["subcommand"], "area");
  EXPECT_EQ(j["config"]["presets"], (json{"ufix4"}));
}

TEST_F(CliTest, AreaUniformFixedThreeIsZero) {
  ASSERT_EQ(run({"area", "--preset", "ufix3", "--grid", "201", "--out", out()}), 0);
  const json j = read_json("ufix3_cca.json");
  EXPECT_EQ(j["cca_grid"].get<double>(), 0.0);
  EXPECT_EQ(j["cca_boundary_integral"].get<double>(), 0.0);
}

TEST_F(CliTest, AreaRatio) {
  ASSERT_EQ(run({"area", "--preset", "omega", "--preset", "ufix4", "--ratio", "--out", out()}), 0);
  const json j = read_json("omega_ufix4_eta_a.json");
  EXPECT_NEAR(j["eta_a_boundary_integral"].get<double>(), 1.753, 0.02 * 1.753);
  EXPECT_NEAR(j["eta_a_grid"].get<double>(), 1.753, 0.02 * 1.753);
  EXPECT_EQ(run({"area", "--preset", "omega", "--ratio", "--out", out()}), 1);
}

TEST_F(CliTest, VolumeAndRatio) {
  ASSERT_EQ(run({"volume", "--preset", "ufix4", "--grid", "101", "--angles", "90", "--out", out()}), 0);
  const json j = read_json("ufix4_ccv.json");
  EXPECT_GT(j["ccv_grid"].get<double>(), 0.0);
  EXPECT_EQ(j["sphere"], (json{90, 180}));
  ASSERT_EQ(run({"ratio", "--preset", "omega", "--preset", "ufix4", "--objective", "ccv", "--angles", "90",
                 "--out", out()}),
            0);
  EXPECT_NEAR(read_json("omega_ufix4_ratio.json")["eta"].get<double>(), 1.627, 0.03 * 1.627);
}

TEST_F(CliTest, DesignFile) {
  write("mine.json", R"({"name":"mine","legs":[0.25,0.25,0.5],"reconfigurable":true})");
  ASSERT_EQ(run({"area", "--design", (dir_ / "mine.json").string(), "--grid", "101", "--out", out()}), 0);
  EXPECT_TRUE(fs::exists(dir_ / "mine_cca.json"));
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(run({"area", "--design", (dir_ / "missing.json").string(), "--out", out()}), 2);
  write("bad.json", R"({"name":"x","legs":[0.5,0.4],"reconfigurable":true})");
  EXPECT_EQ(run({"area", "--design", (dir_ / "bad.json").string(), "--out", out()}), 3);
  write("junk.json", "{not json");
  EXPECT_EQ(run({"area", "--design", (dir_ / "junk.json").string(), "--out", out()}), 3);
  EXPECT_EQ(run({"boundary", "--preset", "s4opt", "--mode", "planar", "--ptotal", "0.5", "--out", out()}), 4);
  EXPECT_EQ(run({"boundary", "--preset", "s4opt", "--ptotal", "0.5", "--out", out()}), 4);
  EXPECT_EQ(run({"boundary", "--preset", "s4opt", "--mode", "spherical", "--ptotal", "0.5", "--out", out()}), 4);
  EXPECT_EQ(run({"boundary", "--preset", "s4opt", "--psi", "30", "--out", out()}), 4);
  EXPECT_EQ(run({"area", "--preset", "s4opt", "--ptotal", "0.5", "--out", out()}), 4);
  EXPECT_EQ(run({"slice", "--preset", "s4opt", "--mode", "planar", "--ptotal", "0.5", "--out", out()}), 4);
  EXPECT_EQ(run({"optimize", "--preset", "s4opt", "--out", out()}), 4);
  EXPECT_EQ(run({"area", "--out", out()}), 1);
  EXPECT_EQ(run({"area", "--preset", "nosuch", "--out", out()}), 1);
  EXPECT_EQ(run({"frobnicate"}), 1);
  EXPECT_EQ(run({}), 1);
  EXPECT_EQ(run({"area", "--preset", "s4opt", "--grid", "10", "--out", out()}), 1);
  EXPECT_EQ(run({"slice", "--preset", "s4opt", "--out", out()}), 1);
  EXPECT_EQ(run({"boundary", "--preset", "s4opt", "--mode", "spherical", "--psi", "400", "--out", out()}), 1);
  EXPECT_EQ(run({"--help"}), 0);
}

TEST_F(CliTest, SphericalBoundaryCsv) {
  ASSERT_EQ(run({"boundary", "--preset", "i4opt", "--mode", "spherical", "--psi", "45", "--out", out()}), 0);
  const std::string csv = read(dir_ / "i4opt_boundary_spherical_psi45.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "theta_rad,psi_rad,r_pu");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 362);
  const json meta = read_json("i4opt_boundary_spherical_psi45.json");
  EXPECT_NEAR(meta["psi_rad"].get<double>(), ccchart::kPi / 4, 1e-15);
  EXPECT_EQ(meta["config"]["psi_deg"], 45.0);
}

TEST_F(CliTest, SliceReportsSeveralComponents) {
  ASSERT_EQ(run({"slice", "--preset", "i4opt", "--ptotal", "0.75", "--out", out()}), 0);
  const json j = read_json("i4opt_slice_p0.75.json");
  EXPECT_GT(j["components"].get<int>(), 1);
  EXPECT_EQ(j["p_ttl"], 0.75);
  EXPECT_TRUE(j.contains("holes"));
  EXPECT_TRUE(j.contains("cca_of_slice"));
  EXPECT_TRUE(j["features"].is_array());
  EXPECT_TRUE(fs::exists(dir_ / "i4opt_slice_p0.75.csv"));
}

TEST_F(CliTest, OptimizeWritesDesignAndTopK) {
  ASSERT_EQ(run({"optimize", "--legs", "4", "--objective", "cca", "--step", "0.02", "--angles", "360",
                 "--grid", "401", "--top", "5", "--out", out()}),
            0)
      << err_.str();
  const json d = read_json("opt_cca_m4.json");
  const auto design = ccchart::io::design_from_json(d);
  const std::vector<double> ref{0.12, 0.22, 0.26, 0.4};
  for (int i = 0; i < 4; ++i) EXPECT_LE(std::abs(design.legs()[i] - ref[i]), 0.04 + 1e-9);
  EXPECT_EQ(d["config"]["step"], 0.02);
  const std::string top = read(dir_ / "opt_cca_m4_top.csv");
  EXPECT_EQ(top.substr(0, top.find('\n')), "alpha1,alpha2,alpha3,alpha4,metric");
  EXPECT_EQ(std::count(top.begin(), top.end(), '\n'), 6);
  EXPECT_TRUE(read_json("opt_cca_m4_summary.json").contains("near_ties"));
}

TEST_F(CliTest, RenderIsDeterministic) {
  ASSERT_EQ(run({"boundary", "--preset", "u8", "--svg", "--out", out()}), 0);
  const fs::path a = dir_ / "u8_boundary_planar_abg.svg";
  ASSERT_TRUE(fs::exists(a));
  const std::string first = read(a);
  EXPECT_NE(first.find("stroke-dasharray=\"6,4\""), std::string::npos);
  EXPECT_NE(first.find("omega"), std::string::npos);
  EXPECT_NE(first.find("ufix4"), std::string::npos);
  const fs::path again = dir_ / "again";
  ASSERT_EQ(run({"render", "--input", (dir_ / "u8_boundary_planar.json").string(), "--out", again.string()}), 0);
  EXPECT_EQ(read(again / "u8_boundary_planar_abg.svg"), first);
  EXPECT_EQ(read(again / "u8_boundary_planar_nominal.svg"), read(dir_ / "u8_boundary_planar_nominal.svg"));
}

TEST_F(CliTest, RenderSliceAndCylindrical) {
  ASSERT_EQ(run({"slice", "--preset", "i4opt", "--ptotal", "0.45", "--grid", "201", "--svg", "--out", out()}), 0);
  EXPECT_TRUE(fs::exists(dir_ / "i4opt_slice_p0.45_abg.svg"));
  EXPECT_TRUE(fs::exists(dir_ / "i4opt_slice_p0.45_nominal.svg"));
  ASSERT_EQ(run({"boundary", "--preset", "i4opt", "--mode", "cylindrical", "--ptotal", "0.3", "--svg", "--out",
                 out()}),
            0);
  EXPECT_TRUE(fs::exists(dir_ / "i4opt_boundary_cylindrical_p0.3_nominal.svg"));
}

TEST_F(CliTest, RenderMalformed) {
  write("junk.json", "nonsense");
  EXPECT_EQ(run({"render", "--input", (dir_ / "junk.json").string(), "--out", out()}), 5);
  write("nokind.json", R"({"csv":"x.csv"})");
  EXPECT_EQ(run({"render", "--input", (dir_ / "nokind.json").string(), "--out", out()}), 5);
  ASSERT_EQ(run({"boundary", "--preset", "s4opt", "--out", out()}), 0);
  write("s4opt_boundary_planar.csv", "theta_rad,r_pu\n0,zzz\n");
  EXPECT_EQ(run({"render", "--input", (dir_ / "s4opt_boundary_planar.json").string(), "--out", out()}), 5);
  EXPECT_EQ(run({"render", "--input", (dir_ / "absent.json").string(), "--out", out()}), 5);
}
