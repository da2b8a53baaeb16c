#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "cli.hpp"
#include "fsq/context_io.hpp"
#include "fsq/lattice.hpp"
#include "support/test_support.hpp"

namespace fsq {
namespace {

namespace fs = std::filesystem;

struct Outcome {
    int status;
    std::string out;
    std::string err;
};

class CliTest : public ::testing::Test {
  protected:
    void SetUp() override
    {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / fmt_name(info->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
        ws_ = (dir_ / "ws").string();
    }

    void TearDown() override { fs::remove_all(dir_); }

    static std::string fmt_name(const std::string& test) { return "fsq-cli-" + test + "-" + std::to_string(::getpid()); }

    Outcome run(std::vector<std::string> args, const std::string& input = {})
    {
        args.insert(args.begin(), "fsq");
        std::istringstream in(input);
        std::ostringstream out;
        std::ostringstream err;
        int status = cli::run(args, {in, out, err});
        return {status, out.str(), err.str()};
    }

    void ingest_employees()
    {
        auto r = run({"ingest", "--memberships", test::fixture("employees.json").string(), "--workspace", ws_});
        ASSERT_EQ(r.status, 0) << r.err;
    }

    void build(const std::string& threshold = "0.4")
    {
        auto r = run({"build", "--threshold", threshold, "--workspace", ws_});
        ASSERT_EQ(r.status, 0) << r.err;
    }

    fs::path dir_;
    std::string ws_;
};

TEST_F(CliTest, IngestMemberships)
{
    auto r = run({"ingest", "--memberships", test::fixture("employees.json").string(), "--workspace", ws_});
    EXPECT_EQ(r.status, 0) << r.err;
    EXPECT_EQ(r.out, "6 tuples, 3 attributes, 8 labels\n");
    EXPECT_TRUE(fs::exists(fs::path(ws_) / "manifest.json"));
    EXPECT_EQ(load_context_file(fs::path(ws_) / "context.json"), test::employees());
}

TEST_F(CliTest, IngestRawTableThroughClustering)
{
    auto r = run({"ingest", "--raw", test::fixture("employees_raw.csv").string(), "--cluster-config",
                  test::fixture("employees_clustering.json").string(), "--workspace", ws_});
    EXPECT_EQ(r.status, 0) << r.err;
    EXPECT_EQ(r.out, "7 tuples, 2 attributes, 5 labels\n");
    EXPECT_TRUE(fs::exists(fs::path(ws_) / "clustering.json"));
    auto again = run({"ingest", "--raw", test::fixture("employees_raw.csv").string(), "--cluster-config",
                      test::fixture("employees_clustering.json").string(), "--workspace", (dir_ / "ws2").string()});
    EXPECT_EQ(again.status, 0);
    EXPECT_EQ(load_context_file(fs::path(ws_) / "context.json"), load_context_file(dir_ / "ws2" / "context.json"));
}

TEST_F(CliTest, IngestErrorsAreInputErrors)
{
    auto missing = run({"ingest", "--memberships", (dir_ / "nope.json").string(), "--workspace", ws_});
    EXPECT_EQ(missing.status, 2);
    EXPECT_NE(missing.err.find("nope.json"), std::string::npos);

    std::ofstream(dir_ / "bad.json") << R"({"attributes": [{"name": "A", "labels": ["x"]}],
                                           "tuples": [{"id": "g", "memberships": {"A": {"x": 1.2}}}]})";
    auto bad = run({"ingest", "--memberships", (dir_ / "bad.json").string(), "--workspace", ws_});
    EXPECT_EQ(bad.status, 2);
    EXPECT_NE(bad.err.find("tuples[0].memberships.A.x"), std::string::npos);

    EXPECT_EQ(run({"ingest", "--workspace", ws_}).status, 2);
    EXPECT_EQ(run({"ingest", "--raw", "x.csv", "--workspace", ws_}).status, 2);
    EXPECT_EQ(run({"frobnicate"}).status, 2);
}

TEST_F(CliTest, BuildReportsNaiveConceptCount)
{
    ingest_employees();
    auto r = run({"build", "--threshold", "0.4", "--workspace", ws_});
    ASSERT_EQ(r.status, 0) << r.err;
    auto expected = test::naive_concepts(test::employees()).size();
    EXPECT_EQ(r.out.rfind(std::to_string(expected) + " concepts, ", 0), 0u) << r.out;
    auto lattice = lattice_from_json(nlohmann::json::parse(read_text_file(fs::path(ws_) / "lattice.json")));
    EXPECT_EQ(lattice.size(), expected);
}

TEST_F(CliTest, BuildDefaultsToContextThreshold)
{
    ingest_employees();
    auto r = run({"build", "--workspace", ws_});
    EXPECT_EQ(r.status, 0);
    EXPECT_NE(r.out.find("(T=0.4)"), std::string::npos);
    auto docs = run({"ingest", "--memberships", test::fixture("documents.csv").string(), "--relation", "Documents",
                     "--workspace", ws_});
    ASSERT_EQ(docs.status, 0) << docs.err;
    auto r2 = run({"build", "--workspace", ws_});
    EXPECT_EQ(r2.out, "6 concepts, 7 edges (T=0.5)\n");
}

TEST_F(CliTest, BuildRejectsBadThresholdAndMissingWorkspace)
{
    ingest_employees();
    EXPECT_EQ(run({"build", "--threshold", "1.01", "--workspace", ws_}).status, 2);
    EXPECT_EQ(run({"build", "--threshold", "abc", "--workspace", ws_}).status, 2);
    EXPECT_EQ(run({"build", "--workspace", (dir_ / "empty").string()}).status, 2);
}

TEST_F(CliTest, BuildExportsDot)
{
    ingest_employees();
    auto dot = dir_ / "lattice.dot";
    auto r = run({"build", "--threshold", "0.4", "--export-dot", dot.string(), "--workspace", ws_});
    ASSERT_EQ(r.status, 0) << r.err;
    auto text = read_text_file(dot);
    EXPECT_EQ(text.rfind("digraph", 0), 0u);
    EXPECT_EQ(text.substr(text.size() - 2), "}\n");
}

TEST_F(CliTest, QueryPrintsFirstPaperSummary)
{
    ingest_employees();
    build();
    auto r = run({"query", "Select 3 0.5 Income, ProfessionalBackground From Employees Where Age IN (Young);",
                  "--oracle", "--workspace", ws_});
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_NE(r.out.find("oracle members: {t1:0.5, t3:0.7, t5:0.6, t6:0.5}"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("engine members (all pertinent): {t1:0.5, t3:0.7, t5:0.6, t6:0.5}"), std::string::npos);
    EXPECT_NE(r.out.find("member sets identical: yes"), std::string::npos);
}

TEST_F(CliTest, QueryFirstPaperSummaryUnlimited)
{
    ingest_employees();
    build();
    auto r = run({"query", "Select 0.5 Income, ProfessionalBackground From Employees Where Age IN (Young);",
                  "--workspace", ws_});
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_NE(r.out.find("{t1:0.5(0.5), t3:0.7(0.7), t5:0.6(0.6), t6:0.5(0.5)}"), std::string::npos) << r.out;
}

TEST_F(CliTest, QueryJsonFormat)
{
    ingest_employees();
    build();
    auto r = run({"query", "SELECT 2 * FROM Employees WHERE Income IN (Poor);", "--format", "json", "--oracle",
                  "--workspace", ws_});
    ASSERT_EQ(r.status, 0) << r.err;
    auto doc = nlohmann::json::parse(r.out);
    EXPECT_EQ(doc["k"], 2);
    EXPECT_LE(doc["results"].size(), 2u);
    EXPECT_TRUE(doc.contains("oracle"));
    EXPECT_EQ(run({"query", "SELECT * FROM Employees WHERE Income IN (Poor);", "--format", "yaml", "--workspace", ws_})
                  .status,
              2);
}

TEST_F(CliTest, QueryErrorsAreStatusThree)
{
    ingest_employees();
    build();
    auto syntax = run({"query", "Selct 3 * From Employees Where Age IN (Young);", "--workspace", ws_});
    EXPECT_EQ(syntax.status, 3);
    EXPECT_NE(syntax.err.find("1:1"), std::string::npos);
    auto label = run({"query", "Select * From Employees Where Age IN (Old);", "--workspace", ws_});
    EXPECT_EQ(label.status, 3);
    EXPECT_NE(label.err.find("YA (Young)"), std::string::npos);
    auto empty = run({"query", "Select 1.0 * From Employees Where Age IN (Young);", "--workspace", ws_});
    EXPECT_EQ(empty.status, 0);
}

TEST_F(CliTest, QueryNeedsLattice)
{
    ingest_employees();
    EXPECT_EQ(run({"query", "Select * From Employees Where Age IN (Young);", "--workspace", ws_}).status, 2);
    EXPECT_EQ(run({"export", "--workspace", ws_}).status, 2);
}

TEST_F(CliTest, ReplEvaluatesUntilEndOfInput)
{
    ingest_employees();
    build();
    std::string script = "Select 0.5 * From Employees Where Age IN (Young);\n"
                         "\n"
                         "Select * From Employees\n"
                         "  Where Income IN (Poor);\n"
                         "Select nonsense;\n"
                         "Select * From Employees Where Income IN (Modest);";
    auto r = run({"query", "--repl", "--format", "json", "--workspace", ws_}, script);
    EXPECT_EQ(r.status, 3);
    std::istringstream lines(r.out);
    std::string line;
    int docs = 0;
    while (std::getline(lines, line)) {
        EXPECT_TRUE(nlohmann::json::accept(line)) << line;
        ++docs;
    }
    EXPECT_EQ(docs, 3);
    EXPECT_NE(r.err.find("syntax error"), std::string::npos);

    auto clean = run({"query", "--repl", "--workspace", ws_}, "Select 0.5 * From Employees Where Age IN (Young);\n");
    EXPECT_EQ(clean.status, 0);
}

TEST_F(CliTest, ExportFormats)
{
    ingest_employees();
    build();
    auto dot = run({"export", "--format", "dot", "--workspace", ws_});
    EXPECT_EQ(dot.status, 0);
    EXPECT_EQ(dot.out.rfind("digraph", 0), 0u);
    auto structured = run({"export", "--format", "structured", "--workspace", ws_});
    ASSERT_EQ(structured.status, 0);
    EXPECT_EQ(lattice_from_json(nlohmann::json::parse(structured.out)), build_lattice(test::employees()));
    auto file = dir_ / "out.json";
    EXPECT_EQ(run({"export", "--output", file.string(), "--workspace", ws_}).status, 0);
    EXPECT_EQ(read_text_file(file), structured.out);
    EXPECT_EQ(run({"export", "--format", "xml", "--workspace", ws_}).status, 2);
}

TEST_F(CliTest, CorruptWorkspaceIsDetected)
{
    ingest_employees();
    build();
    fs::remove(fs::path(ws_) / "lattice.json");
    auto r = run({"export", "--workspace", ws_});
    EXPECT_EQ(r.status, 2);
    EXPECT_NE(r.err.find("lattice.json"), std::string::npos);
}

TEST_F(CliTest, WorkspaceFromEnvironment)
{
    ::setenv(cli::workspace_env, ws_.c_str(), 1);
    auto r = run({"ingest", "--memberships", test::fixture("employees.json").string()});
    ::unsetenv(cli::workspace_env);
    EXPECT_EQ(r.status, 0) << r.err;
    EXPECT_TRUE(fs::exists(fs::path(ws_) / "manifest.json"));
}

TEST_F(CliTest, HelpExitsCleanly)
{
    auto r = run({"--help"});
    EXPECT_EQ(r.status, 0);
    EXPECT_NE(r.out.find("ingest"), std::string::npos);
}

}  // namespace
}  // namespace fsq
