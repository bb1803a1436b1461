#include "cli.hpp"
#include "frame_file.hpp"

#include "sprac/error.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using sprac::cli::run;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result cli(const std::vector<std::string>& args)
{
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override
    {
        dir = fs::temp_directory_path()
            / ("sprac_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir);
        fs::create_directories(dir);
        std::ofstream payload(path("payload.bin"), std::ios::binary);
        for (int i = 0; i < 531; ++i) {
            payload.put(static_cast<char>((i * 37 + 11) & 0xFF));
        }
    }

    void TearDown() override { fs::remove_all(dir); }

    std::string path(const std::string& name) const { return (dir / name).string(); }

    fs::path dir;
};

} // namespace

TEST_F(CliTest, CleanRoundTrip)
{
    ASSERT_EQ(cli({"encode", "--input", path("payload.bin"), "--output", path("f.sprf")}).code, 0);
    const auto r = cli({"recover", "--input", path("f.sprf"), "--output", path("out.bin")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(slurp(path("out.bin")), slurp(path("payload.bin")));
    const auto json = nlohmann::json::parse(r.out);
    EXPECT_EQ(json["status"], "recovered");
    EXPECT_EQ(json["metrics"]["crc_evaluations"], 0);
}

TEST_F(CliTest, CorruptThenRecoverWithBothEngines)
{
    ASSERT_EQ(cli({"encode", "--input", path("payload.bin"), "--output", path("f.sprf"), "--segments", "2",
                   "--field-size", "16", "--seed", "9"})
                  .code,
              0);
    ASSERT_EQ(cli({"corrupt", "--input", path("f.sprf"), "--output", path("c.sprf"), "--errors", "4", "--placement",
                   "spread", "--seed", "3"})
                  .code,
              0);
    EXPECT_NE(slurp(path("f.sprf")), slurp(path("c.sprf")));
    for (const std::string scheme : {"sprac", "daprac"}) {
        const auto r = cli({"recover", "--input", path("c.sprf"), "--output", path(scheme + ".bin"), "--scheme", scheme,
                            "--metrics", path(scheme + ".json")});
        ASSERT_EQ(r.code, 0) << r.err;
        EXPECT_EQ(slurp(path(scheme + ".bin")), slurp(path("payload.bin")));
        const auto json = nlohmann::json::parse(slurp(path(scheme + ".json")));
        EXPECT_EQ(json["scheme"], scheme);
        EXPECT_GT(json["metrics"]["crc_evaluations"].get<int>(), 0);
    }
}

TEST_F(CliTest, FrameFileFormatIsStable)
{
    ASSERT_EQ(cli({"encode", "--input", path("payload.bin"), "--output", path("f.sprf")}).code, 0);
    const auto bytes = sprac::cli::read_binary(path("f.sprf"));
    const auto file = sprac::cli::decode_frame_file(bytes);
    EXPECT_EQ(sprac::cli::encode_frame_file(file), bytes);
    EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "SPRF");
    EXPECT_EQ(file.payload_length, 531U);
    EXPECT_EQ(file.frames.size(), file.config.coded);

    // Corrupting with zero errors must reproduce the file byte for byte.
    ASSERT_EQ(cli({"corrupt", "--input", path("f.sprf"), "--output", path("same.sprf"), "--errors", "0"}).code, 0);
    EXPECT_EQ(slurp(path("same.sprf")), slurp(path("f.sprf")));

    auto truncated = bytes;
    truncated.pop_back();
    EXPECT_THROW((void)sprac::cli::decode_frame_file(truncated), sprac::Error);
    auto bad_magic = bytes;
    bad_magic[0] = 'X';
    EXPECT_THROW((void)sprac::cli::decode_frame_file(bad_magic), sprac::Error);
}

TEST_F(CliTest, RecoveryFailureHasItsOwnExitCode)
{
    ASSERT_EQ(cli({"encode", "--input", path("payload.bin"), "--output", path("f.sprf")}).code, 0);
    const auto file = sprac::cli::decode_frame_file(sprac::cli::read_binary(path("f.sprf")));
    const sprac::FrameGeometry geometry(sprac::Field(file.config.field_size), file.config.originals, file.layout());
    const std::string crc_bit = std::to_string(geometry.inner_crc_offset(0) * 8 + 1);
    ASSERT_EQ(cli({"corrupt", "--input", path("f.sprf"), "--output", path("c.sprf"), "--placement", "explicit",
                   "--positions", crc_bit, "--targets", "0", "--allow-crc-corruption"})
                  .code,
              0);
    const auto r = cli({"recover", "--input", path("c.sprf"), "--metrics", path("m.json")});
    EXPECT_EQ(r.code, sprac::cli::exit_unrecovered);
    EXPECT_EQ(r.err.rfind("error: code=unrecovered message=", 0), 0U);
    EXPECT_EQ(nlohmann::json::parse(slurp(path("m.json")))["status"], "unrecoverable");
}

TEST_F(CliTest, UsageErrors)
{
    for (const auto& args : std::vector<std::vector<std::string>>{
             {},
             {"bogus"},
             {"encode", "--input", path("payload.bin")},
             {"encode", "--input", path("payload.bin"), "--output", path("x"), "--segments", "3"},
             {"encode", "--input", path("payload.bin"), "--output", path("x"), "--field-size", "3"},
             {"bench", "--repetitions", "0"},
             {"bench", "--placement", "diagonal"},
             {"recover", "--input", path("payload.bin"), "--scheme", "both"},
         }) {
        const auto r = cli(args);
        EXPECT_EQ(r.code, sprac::cli::exit_usage) << r.err;
        EXPECT_EQ(r.err.rfind("error: code=", 0), 0U) << r.err;
        EXPECT_NE(r.err.find(" message="), std::string::npos);
    }
    const auto big = cli({"encode", "--input", path("payload.bin"), "--output", path("x"), "--originals", "1"});
    EXPECT_EQ(big.code, sprac::cli::exit_usage);
}

TEST_F(CliTest, OtherFailures)
{
    const auto missing = cli({"recover", "--input", path("nope.sprf")});
    EXPECT_EQ(missing.code, sprac::cli::exit_failure);
    EXPECT_EQ(missing.err.rfind("error: code=io message=", 0), 0U);
    const auto garbage = cli({"recover", "--input", path("payload.bin")});
    EXPECT_EQ(garbage.code, sprac::cli::exit_failure);
    EXPECT_EQ(garbage.err.rfind("error: code=format message=", 0), 0U);
}

TEST_F(CliTest, DemoPrintsTheWorkedExample)
{
    const auto r = cli({"demo"});
    ASSERT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("count law:         S-PRAC 12, DAPRAC 64"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("crc evaluations:   S-PRAC 12, DAPRAC 64"), std::string::npos) << r.out;
}

TEST_F(CliTest, BenchIsDeterministic)
{
    const std::vector<std::string> args{"bench", "--generation-sizes", "4,8", "--segments", "2", "--errors", "3",
                                        "--repetitions", "5", "--seed", "17", "--no-timings"};
    auto with_output = [&](const std::string& name) {
        auto a = args;
        a.insert(a.end(), {"--output", path(name), "--summary", path(name + ".summary")});
        return a;
    };
    ASSERT_EQ(cli(with_output("a.csv")).code, 0);
    ASSERT_EQ(cli(with_output("b.csv")).code, 0);
    EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
    EXPECT_EQ(slurp(path("a.csv.summary")), slurp(path("b.csv.summary")));
    const auto csv = slurp(path("a.csv"));
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 2 * 5 * 2);
    EXPECT_EQ(cli(args).out, csv);
}

TEST_F(CliTest, ConfigFileWithFlagPrecedence)
{
    {
        std::ofstream cfg(path("plan.ini"));
        cfg << "# sweep\nrepetitions=3\nerrors=2\nsegments=1\ngeneration-sizes=4\nseed=5\nno-timings=true\n";
    }
    const auto from_file = cli({"bench", "--config", path("plan.ini")});
    ASSERT_EQ(from_file.code, 0) << from_file.err;
    EXPECT_EQ(std::count(from_file.out.begin(), from_file.out.end(), '\n'), 1 + 3 * 2);
    const auto overridden = cli({"bench", "--config", path("plan.ini"), "--repetitions", "2"});
    ASSERT_EQ(overridden.code, 0) << overridden.err;
    EXPECT_EQ(std::count(overridden.out.begin(), overridden.out.end(), '\n'), 1 + 2 * 2);

    {
        std::ofstream cfg(path("bad.ini"));
        cfg << "no-such-key=1\n";
    }
    EXPECT_EQ(cli({"bench", "--config", path("bad.ini")}).code, sprac::cli::exit_usage);
}

TEST_F(CliTest, LogLevel)
{
    const auto quiet = cli({"encode", "--input", path("payload.bin"), "--output", path("f.sprf")});
    EXPECT_TRUE(quiet.err.empty());
    const auto chatty = cli({"--log-level", "info", "encode", "--input", path("payload.bin"), "--output", path("f.sprf")});
    EXPECT_NE(chatty.err.find("info: wrote"), std::string::npos);
}

class HelpGolden : public ::testing::TestWithParam<std::string> {};

TEST_P(HelpGolden, MatchesFile)
{
    std::vector<std::string> args;
    std::string name = "help";
    if (!GetParam().empty()) {
        args.push_back(GetParam());
        name += "_" + GetParam();
    }
    args.push_back("--help");
    const auto r = cli(args);
    ASSERT_EQ(r.code, 0);
    const fs::path golden = fs::path(SPRAC_GOLDEN_DIR) / (name + ".txt");
    if (std::getenv("SPRAC_UPDATE_GOLDEN") != nullptr) {
        std::ofstream(golden, std::ios::binary) << r.out;
    }
    EXPECT_EQ(r.out, slurp(golden)) << "regenerate with SPRAC_UPDATE_GOLDEN=1";
}

INSTANTIATE_TEST_SUITE_P(Commands, HelpGolden,
                         ::testing::Values("", "encode", "corrupt", "recover", "bench", "demo"),
                         [](const auto& info) { return info.param.empty() ? std::string("top") : info.param; });
