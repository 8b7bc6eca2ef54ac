#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dbarlab/config.hpp"
#include "dbarlab/errors.hpp"
#include "dbarlab/presets.hpp"

using namespace dbarlab;
using nlohmann::json;

namespace {

const char* kMinimal = R"(
experiment = "solve"
[grid]
n = 1
R = 3.0
N = 16
[weight]
kind = "gaussian"
params = [1.0]
)";

std::string error_of(const json& j) {
    try {
        parse_config(j);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST(Config, MinimalSolveParses) {
    const ExperimentConfig c = parse_config(parse_toml(kMinimal));
    EXPECT_EQ(c.kind, ExperimentKind::solve);
    EXPECT_EQ(c.grid(), Grid(1, 3.0, 16));
    EXPECT_EQ(c.weight().kind(), WeightSpec::Kind::gaussian);
    EXPECT_EQ(c.data.kind, "dbar-potential");
    EXPECT_EQ(c.to_json()["grid"]["N"], 16);
}

TEST(Config, ErrorsNameTheKeyPath) {
    json j = parse_toml(kMinimal);
    j["grid"].erase("N");
    EXPECT_NE(error_of(j).find("'grid.N'"), std::string::npos);

    j = parse_toml(kMinimal);
    j["grid"]["N"] = "sixteen";
    EXPECT_NE(error_of(j).find("'grid.N' must be an integer"), std::string::npos);

    j = parse_toml(kMinimal);
    j["solver"]["tolerence"] = 1e-8;
    EXPECT_NE(error_of(j).find("unknown key 'solver.tolerence'"), std::string::npos);

    j = parse_toml(kMinimal);
    j["experiment"] = "explode";
    EXPECT_NE(error_of(j).find("'experiment'"), std::string::npos);

    j = parse_toml(kMinimal);
    j["grid"]["N"] = 15;
    EXPECT_FALSE(error_of(j).empty());

    j = parse_toml(kMinimal);
    j["experiment"] = "decay";
    EXPECT_NE(error_of(j).find("geometry"), std::string::npos);
}

TEST(Config, TomlSyntaxErrorsAreConfigErrors) {
    EXPECT_THROW(parse_toml("[grid\nn = 1"), ConfigError);
}

TEST(Config, ReadsJsonAndTomlFiles) {
    const auto dir = std::filesystem::temp_directory_path() / "dbarlab-config-test";
    std::filesystem::create_directories(dir);
    {
        std::ofstream(dir / "a.toml") << kMinimal;
        std::ofstream(dir / "a.json") << parse_toml(kMinimal).dump();
    }
    EXPECT_EQ(read_config_file(dir / "a.toml"), read_config_file(dir / "a.json"));
    EXPECT_EQ(load_config(dir / "a.toml").N, 16);
    EXPECT_THROW(read_config_file(dir / "missing.toml"), ConfigError);
    std::filesystem::remove_all(dir);
}

TEST(Presets, AllParseAndCrossCheck) {
    ASSERT_EQ(presets().size(), 6u);
    for (const Preset& p : presets()) {
        SCOPED_TRACE(p.name);
        const ExperimentConfig c = parse_config(parse_toml(p.text, p.name));
        EXPECT_EQ(c.name, p.name);
        EXPECT_FALSE(p.theorem.empty());
    }
    EXPECT_EQ(find_preset("validate").name, "validate");
    EXPECT_THROW(find_preset("nope"), ConfigError);
}

TEST(Presets, AcceptanceGeometry) {
    const ExperimentConfig decay = parse_config(parse_toml(find_preset("thm21_decay").text));
    EXPECT_EQ(decay.ks, (std::vector<double>{0, 2, 4, 6, 8, 10, 12}));
    const ExperimentConfig cons = parse_config(parse_toml(find_preset("thm21_constants").text));
    EXPECT_EQ(cons.n, 1);
    EXPECT_EQ(cons.N, 128);
    const ExperimentConfig avoid = parse_config(parse_toml(find_preset("thm22_avoid").text));
    EXPECT_EQ(avoid.n, 2);
    EXPECT_EQ(avoid.N, 16);
    const ExperimentConfig approx = parse_config(parse_toml(find_preset("thm31_approx").text));
    EXPECT_EQ(approx.stages, 8);
    EXPECT_EQ(approx.duality_tests, 20);
}

TEST(Presets, ShippedFilesMatchEmbedded) {
    const std::filesystem::path dir = DBARLAB_PRESET_DIR;
    std::vector<Preset> all = presets();
    all.push_back(validate_preset());
    for (const Preset& p : all) {
        SCOPED_TRACE(p.name);
        std::ifstream in(dir / (p.name + ".toml"));
        ASSERT_TRUE(in.good());
        std::stringstream s;
        s << in.rdbuf();
        EXPECT_EQ(s.str(), p.text);
    }
}
