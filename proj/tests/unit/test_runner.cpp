#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dbarlab/config.hpp"
#include "dbarlab/field_io.hpp"
#include "dbarlab/presets.hpp"
#include "dbarlab/runner.hpp"

using namespace dbarlab;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("dbarlab-runner-" + name);
    fs::remove_all(p);
    return p;
}

json preset_json(const std::string& name) { return parse_toml(find_preset(name).text, name); }

}  // namespace

TEST(Runner, MissingKeyExitsWithConfigCode) {
    json j = preset_json("thm11_solve");
    j["grid"].erase("N");
    std::ostringstream out, err;
    const fs::path dir = scratch("missing");
    EXPECT_EQ(run_config(j, Overrides{dir.string(), {}, {}}, out, err), kExitConfig);
    EXPECT_NE(err.str().find("grid.N"), std::string::npos);
    EXPECT_FALSE(fs::exists(dir / "report.json"));
}

TEST(Runner, SolverFailureWritesReport) {
    json j = preset_json("thm11_solve");
    j["grid"]["N"] = 32;
    j["solver"]["max_iterations"] = 2;
    std::ostringstream out, err;
    const fs::path dir = scratch("solverfail");
    EXPECT_EQ(run_config(j, Overrides{dir.string(), {}, {}}, out, err), kExitSolver);
    std::ifstream in(dir / "report.json");
    const json r = json::parse(in);
    EXPECT_EQ(r["status"], "solver-failure");
    EXPECT_FALSE(r["residual_history"].empty());
    fs::remove_all(dir);
}

TEST(Runner, ValidatePresetPasses) {
    std::ostringstream out, err;
    const fs::path dir = scratch("validate");
    EXPECT_EQ(run_config(preset_json("validate"), Overrides{dir.string(), 2, {}}, out, err), kExitOk) << out.str();
    std::ifstream in(dir / "report.json");
    const json r = json::parse(in);
    EXPECT_EQ(r["schema_version"], kSchemaVersion);
    EXPECT_EQ(r["passed"], true);
    for (const json& a : r["assertions"]) EXPECT_TRUE(a["passed"].get<bool>()) << a["name"];
    fs::remove_all(dir);
}

TEST(Runner, DecayPresetWritesSevenRows) {
    std::ostringstream out, err;
    const fs::path dir = scratch("decay");
    ASSERT_EQ(run_config(preset_json("thm21_decay"), Overrides{dir.string(), 4, {}}, out, err), kExitOk) << err.str();
    std::ifstream in(dir / "decay.csv");
    std::string line;
    int rows = -1;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 7);
    EXPECT_NE(out.str().find("PASS"), std::string::npos);
    fs::remove_all(dir);
}

TEST(Runner, SolveIsDeterministic) {
    json j = preset_json("thm11_solve");
    j["grid"]["N"] = 32;
    std::ostringstream out, err;
    const fs::path a = scratch("det-a"), b = scratch("det-b");
    ASSERT_EQ(run_config(j, Overrides{a.string(), 2, 5}, out, err), kExitOk) << err.str();
    ASSERT_EQ(run_config(j, Overrides{b.string(), 2, 5}, out, err), kExitOk);
    for (const char* f : {"report.json", "u.bin"}) {
        std::ifstream x(a / f, std::ios::binary), y(b / f, std::ios::binary);
        std::stringstream sx, sy;
        sx << x.rdbuf();
        sy << y.rdbuf();
        EXPECT_EQ(sx.str(), sy.str()) << f;
    }
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST(Runner, ZeroDataSolvesTrivially) {
    json j = preset_json("thm11_solve");
    j["data"] = {{"kind", "zero"}};
    std::ostringstream out, err;
    const fs::path dir = scratch("zero");
    EXPECT_EQ(run_config(j, Overrides{dir.string(), {}, {}}, out, err), kExitOk) << err.str();
    EXPECT_TRUE(read_field_blob(dir / "u.bin").is_zero());
    fs::remove_all(dir);
}
