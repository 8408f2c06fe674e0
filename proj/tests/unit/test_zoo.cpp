#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "../support/gen.hpp"
#include "../support/oracles.hpp"
#include "qproc/error.hpp"
#include "qproc/tensor.hpp"
#include "qproc/zoo.hpp"

using namespace qproc;
namespace fs = std::filesystem;

namespace {

ErrorCode parse_code(const std::string &text) {
    try {
        deserialize(text);
    } catch (const Error &e) {
        return e.code();
    }
    ADD_FAILURE() << "no error";
    return ErrorCode::BadParams;
}

std::string read(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write(const fs::path &p, const std::string &text) {
    std::ofstream(p, std::ios::binary) << text;
}

class Cli : public ::testing::Test {
  protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() / ("qproc_cli_" + std::to_string(::getpid()) + "_" +
                                            ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::create_directories(dir_);
    }
    void TearDown() override {
        fs::remove_all(dir_);
    }
    int run(const std::string &args, const std::string &stdout_name = "out.txt") {
        const std::string cmd = std::string(QPROC_CLI_PATH) + " " + args + " > " + (dir_ / stdout_name).string() +
                                " 2> " + (dir_ / "err.txt").string();
        const int status = std::system(cmd.c_str());
        return WEXITSTATUS(status);
    }
    fs::path path(const std::string &name) const {
        return dir_ / name;
    }

  private:
    fs::path dir_;
};

}  // namespace

TEST(ProcessFile, RoundTripIsByteIdentical) {
    for (const char *cls : {"M", "MM", "CM", "SEP", "QM"}) {
        ProcessFile f{1, random_process(cls, 3, 2, 7).op(), {{"name", "random"}, {"construction", cls}}};
        const auto text = serialize(f);
        const auto back = deserialize(text);
        EXPECT_EQ(serialize(back), text);
        EXPECT_EQ(back.op.matrix(), f.op.matrix());  // bit-exact doubles
        EXPECT_EQ(back.metadata, f.metadata);
    }
}

TEST(ProcessFile, NegativeZeroAndTinyValuesSurvive) {
    Matrix m(2, 2);
    m << cdouble(-0.0, 1e-300), cdouble(0.1, -0.0), cdouble(1.0 / 3.0, 5e-324), cdouble(-2.5e17, 0.0);
    ProcessFile f{1, LabeledOperator({sys_in(1, 2)}, m), {}};
    const auto text = serialize(f);
    EXPECT_NE(text.find("-0.0"), std::string::npos);
    const auto back = deserialize(text);
    EXPECT_TRUE(std::signbit(back.op.matrix()(0, 0).real()));
    EXPECT_EQ(back.op.matrix(), m);
    EXPECT_EQ(serialize(back), text);
}

TEST(ProcessFile, ParseErrors) {
    const auto good = serialize({1, guerin_process().op(), {}});
    EXPECT_EQ(parse_code(good.substr(0, good.size() / 2)), ErrorCode::ParseError);
    try {
        deserialize(good.substr(0, 120));
    } catch (const Error &e) {
        EXPECT_NE(std::string(e.what()).find("byte"), std::string::npos);
    }
    EXPECT_EQ(parse_code(R"({"format_version": 2, "labels": [], "matrix": [[[1, 0]]]})"), ErrorCode::ParseError);
    EXPECT_EQ(parse_code(R"({"format_version": 1, "labels": [{"time": 1, "port": "sideways", "role": "system", "dim": 2}], "matrix": []})"),
              ErrorCode::ParseError);
    EXPECT_EQ(parse_code(R"({"format_version": 1, "labels": [{"time": 1, "port": "input", "role": "system", "dim": 2}], "matrix": [[[1, 0], [0, 0]]]})"),
              ErrorCode::ParseError);
    EXPECT_EQ(parse_code(R"({"format_version": 1, "labels": [{"time": 1, "port": "input", "role": "system", "dim": 2}, {"time": 1, "port": "input", "role": "system", "dim": 2}], "matrix": [[[1,0],[0,0],[0,0],[0,0]],[[0,0],[0,0],[0,0],[0,0]],[[0,0],[0,0],[0,0],[0,0]],[[0,0],[0,0],[0,0],[0,0]]]})"),
              ErrorCode::ParseError);
    std::string big = R"({"format_version": 1, "labels": [)";
    for (int t = 1; t <= 10; ++t) {
        big += std::string(t > 1 ? "," : "") + R"({"time": )" + std::to_string(t) +
               R"(, "port": "input", "role": "system", "dim": 2})";
    }
    big += R"(], "matrix": []})";
    EXPECT_EQ(parse_code(big), ErrorCode::DimensionOverflow);
}

TEST(Zoo, RandomProcessDeterministicAndChecked) {
    EXPECT_EQ(random_process("CM", 3, 2, 5).op().matrix(), random_process("CM", 3, 2, 5).op().matrix());
    EXPECT_NE(random_process("CM", 3, 2, 5).op().matrix(), random_process("CM", 3, 2, 6).op().matrix());
    EXPECT_THROW(random_process("XX", 3, 2, 1), Error);
    try {
        random_process("M", 6, 2, 1);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::DimensionOverflow);
    }
}

TEST(Zoo, CommonCauseRejectsNonStates) {
    EXPECT_THROW(common_cause(Matrix::Identity(4, 4), 2, 2), Error);
    EXPECT_THROW(common_cause(Matrix::Identity(3, 3) / 3.0, 2, 2), Error);
}

TEST_F(Cli, BuildIsDeterministic) {
    ASSERT_EQ(run("build random --class MM --seed 7 -o " + path("a.json").string()), 0);
    ASSERT_EQ(run("build random --class MM --seed 7 -o " + path("b.json").string()), 0);
    EXPECT_EQ(read(path("a.json")), read(path("b.json")));
    ASSERT_EQ(run("build guerin -o " + path("g.json").string()), 0);
    const auto g = deserialize(read(path("g.json")));
    EXPECT_NEAR(g.op.trace().real(), 2.0, 1e-12);
    EXPECT_EQ(g.op.labels().size(), 3u);
}

TEST_F(Cli, ExitCodes) {
    EXPECT_EQ(run("build nothing"), 1);
    EXPECT_EQ(run("frobnicate"), 1);
    EXPECT_EQ(run("build random --class MM --n 9"), 2);
    write(path("bad.json"), "{\"format_version\": 1, \"labels\": [");
    EXPECT_EQ(run("classify " + path("bad.json").string()), 2);
    ASSERT_EQ(run("build guerin -o " + path("g.json").string()), 0);
    EXPECT_EQ(run("classify --kext 2 --solver none " + path("g.json").string()), 3);
    EXPECT_EQ(run("classify --kext 2 " + path("g.json").string()), 0);
}

TEST_F(Cli, ClassifyReportsFig3Residual) {
    ASSERT_EQ(run("build fig3 -o " + path("f.json").string()), 0);
    ASSERT_EQ(run("classify " + path("f.json").string()), 0);
    const auto text = read(path("out.txt"));
    EXPECT_NE(text.find("NS: fail"), std::string::npos);
    EXPECT_NE(text.find("ns_residual_k2 = 4"), std::string::npos);
    ASSERT_EQ(run("classify --json " + path("f.json").string(), "out.json"), 0);
    EXPECT_NE(read(path("out.json")).find("\"NS\": \"fail\""), std::string::npos);
}

TEST_F(Cli, ProbesAndToleranceEnvironment) {
    ASSERT_EQ(run("build trivial_identity --n 3 -o " + path("t.json").string()), 0);
    Matrix p0 = Matrix::Zero(2, 2), p1 = Matrix::Zero(2, 2);
    p0(0, 0) = 1.0;
    p1(1, 1) = 1.0;
    write(path("p0.json"), serialize({1, LabeledOperator({sys_out(1, 2)}, p0), {}}));
    write(path("p1.json"), serialize({1, LabeledOperator({sys_out(1, 2)}, p1), {}}));
    ASSERT_EQ(run("classify --probe " + path("p0.json").string() + " --probe " + path("p1.json").string() +
                  " --probe-time 2 " + path("t.json").string()),
              0);
    EXPECT_NE(read(path("out.txt")).find("signalling_distance_2o = 1"), std::string::npos);
    EXPECT_EQ(run("classify --probe " + path("p0.json").string() + " " + path("t.json").string()), 1);
    const std::string env = "QPROC_TOLERANCE=1e-3 ";
    const std::string cmd = env + QPROC_CLI_PATH + " classify --json " + path("t.json").string() + " > " +
                            path("tol.json").string();
    ASSERT_EQ(WEXITSTATUS(std::system(cmd.c_str())), 0);
    EXPECT_NE(read(path("tol.json")).find("\"residual\": 0.001"), std::string::npos);
}

TEST_F(Cli, RoundtripCanonicalisesPermutedFiles) {
    ASSERT_EQ(run("build random --class QM --seed 3 -o " + path("q.json").string()), 0);
    ASSERT_EQ(run("roundtrip " + path("q.json").string(), "same.json"), 0);
    EXPECT_EQ(read(path("same.json")), read(path("q.json")));

    auto f = deserialize(read(path("q.json")));
    auto labels = f.op.labels();
    std::reverse(labels.begin(), labels.end());
    const auto original = f.op;
    f.op = permute(f.op, labels);
    write(path("perm.json"), serialize(f));
    ASSERT_EQ(run("roundtrip " + path("perm.json").string(), "canon.json"), 0);
    const auto canon = deserialize(read(path("canon.json")));
    EXPECT_EQ(canon.op.labels(), original.labels());
    const auto ev_a = oracle::eigenvalues(canon.op.matrix());
    const auto ev_b = oracle::eigenvalues(f.op.matrix());
    EXPECT_LT((ev_a - ev_b).norm(), 1e-12);

    write(path("trunc.json"), read(path("q.json")).substr(0, 200));
    EXPECT_EQ(run("roundtrip " + path("trunc.json").string()), 2);
    EXPECT_NE(read(path("err.txt")).find("byte"), std::string::npos);
}
