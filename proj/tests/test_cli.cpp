#include <gtest/gtest.h>

#include <fstream>

#include "fixtures.hpp"
#include "photoscout/cli.hpp"
#include "photoscout/errors.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;
namespace cli = photoscout::cli;
using testutil::quote;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    photoscout::fixtures::write_album(photoscout::fixtures::fig1(), dir_ / "albums" / "fig1");
    photoscout::fixtures::write_album(photoscout::fixtures::transportation(), dir_ / "albums" / "transportation");
  }

  testutil::CommandResult ps(const std::string& args, bool merge = false) const {
    return testutil::run_command("PHOTOSCOUT_HOME=" + quote(dir_ / "home") + " " + quote(PHOTOSCOUT_BIN) + " " + args,
                                 merge);
  }

  fs::path write(const std::string& name, const std::string& text) const {
    const auto p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  fs::path album(const std::string& id) const { return dir_ / "albums" / id; }

  testutil::TempDir dir_{"ps-cli"};
};

}  // namespace

TEST_F(CliTest, IngestAndList) {
  auto r = ps("ingest " + quote(album("fig1")));
  ASSERT_EQ(r.exit_code, 0) << r.out;
  EXPECT_EQ(r.out, "ingested album fig1: 4 images, 13 objects, 8 faces, 0 tags\n");
  r = ps("ingest " + quote(album("transportation")) + " --album street");
  ASSERT_EQ(r.exit_code, 0);
  r = ps("albums");
  EXPECT_EQ(r.out, "fig1\t" + fs::absolute(album("fig1")).string() + "\nstreet\t" +
                       fs::absolute(album("transportation")).string() + "\n");
  EXPECT_EQ(ps("ingest " + quote(album("fig1"))).exit_code, 1);
  EXPECT_EQ(ps("ingest " + quote(dir_ / "missing")).exit_code, 1);
}

TEST_F(CliTest, IngestRejectsBadAnnotations) {
  fs::create_directories(dir_ / "bad");
  write("bad/a.json", R"({"image_id": "a", "width": 10, "height": 10, "objects": [{"object_id": "o1"}]})");
  const auto r = ps("ingest " + quote(dir_ / "bad"), true);
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_NE(r.out.find("a.json"), std::string::npos) << r.out;
  EXPECT_TRUE(ps("albums").out.empty());
}

TEST_F(CliTest, Eval) {
  ps("ingest " + quote(album("transportation")));
  const auto program = write("p.txt", "exists x. exists y. HasType(x, Car) && HasType(y, Bicycle)\n");
  auto r = ps("eval --album transportation --program " + quote(program));
  ASSERT_EQ(r.exit_code, 0);
  EXPECT_EQ(r.out, "t1\nt4\n");
  // An unregistered directory works too.
  r = ps("eval --album " + quote(album("transportation")) + " --program " + quote(program));
  EXPECT_EQ(r.out, "t1\nt4\n");
}

TEST_F(CliTest, EvalErrors) {
  ps("ingest " + quote(album("fig1")));
  auto r = ps("eval --album fig1 --program " +
                  quote(write("h.txt", "exists x. exists y. HasType(x, Alice) && Holding(x, y)")),
              true);
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.out.find("holes"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("Alice"), std::string::npos);
  r = ps("eval --album fig1 --program " + quote(write("s.txt", "exists x. HasType(x, Flower")), true);
  EXPECT_EQ(r.exit_code, 2);
  r = ps("eval --album fig1 --program " + quote(dir_ / "nothing.txt"));
  EXPECT_EQ(r.exit_code, 2);
  r = ps("eval --album nope --program " + quote(write("ok.txt", "exists x. HasType(x, Flower)")));
  EXPECT_EQ(r.exit_code, 2);
}

TEST_F(CliTest, SearchHuman) {
  ps("ingest " + quote(album("fig1")));
  const auto r = ps("search --album fig1 --query 'Alice is holding flowers' --tag alice=c01 --pos img1 --pos img2 "
                    "--neg img4");
  ASSERT_EQ(r.exit_code, 0) << r.out;
  EXPECT_EQ(r.out,
            "status: complete\n"
            "program: exists x. exists y. HasType(x, Alice) && HasType(y, Flower) && HasRelation(x, y, Above)\n"
            "explanation: Matches images in which there is Alice and a flower such that Alice is above the flower.\n"
            "results: 3\n  img1\n  img2\n  img3\n");
}

TEST_F(CliTest, SearchJsonAndClarification) {
  ps("ingest " + quote(album("fig1")));
  auto r = ps("search --album fig1 --query 'Alice is holding flowers' --json");
  ASSERT_EQ(r.exit_code, 0);
  const auto body = photoscout::service::Json::parse(r.out);
  EXPECT_EQ(body["v"], 1);
  EXPECT_EQ(body["status"], "needs_clarification");
  EXPECT_EQ(body["unknown_terms"], photoscout::service::Json::array({"alice", "holding"}));
  r = ps("search --album fig1 --query 'Alice is holding flowers'");
  EXPECT_NE(r.out.find("unknown terms: alice, holding"), std::string::npos) << r.out;
}

TEST_F(CliTest, SearchInputErrors) {
  ps("ingest " + quote(album("fig1")));
  EXPECT_EQ(ps("search --album fig1 --query 'a flower' --pos img99").exit_code, 2);
  EXPECT_EQ(ps("search --album fig1 --query 'a flower' --pos img1 --neg img1").exit_code, 2);
  EXPECT_EQ(ps("search --album fig1 --query 'a flower' --tag alice").exit_code, 2);
  EXPECT_EQ(ps("search --album fig1 --query 'a flower' --tag alice=c99").exit_code, 2);
  EXPECT_EQ(ps("search --album fig1 --query 'a flower' --sketch-source bogus").exit_code, 2);
  EXPECT_EQ(ps("search --album fig1").exit_code, 2);
  EXPECT_EQ(ps("frobnicate").exit_code, 2);
  EXPECT_EQ(ps("").exit_code, 2);
  EXPECT_EQ(ps("--help").exit_code, 0);
}

TEST_F(CliTest, SearchWithReplayedCandidates) {
  const auto replay = std::string(PHOTOSCOUT_SOURCE_DIR) + "/fixtures/llm/fig1_alice_holding.txt";
  const auto r = ps("search --album " + quote(album("fig1")) + " --query 'ignored' --tag alice=c01 --pos img1 --neg img4" +
                    " --sketch-source replay:" + quote(replay) + " --json");
  ASSERT_EQ(r.exit_code, 0) << r.out;
  const auto body = photoscout::service::Json::parse(r.out);
  EXPECT_EQ(body["results"], photoscout::service::Json::array({"img1", "img2", "img3"}));
  EXPECT_EQ(ps("search --album " + quote(album("fig1")) + " --query q --sketch-source replay:/nonexistent").exit_code, 3);
}

TEST_F(CliTest, UnreachableEndpointIsAnEnvironmentError) {
  const auto config = write("ps.conf", "[search]\nsketch_source = llm\n[llm]\nurl = http://127.0.0.1:9/v1\n"
                                       "timeout_ms = 300\nfallback_on_error = false\n");
  const auto r = ps("--config " + quote(config) + " search --album " + quote(album("fig1")) + " --query 'a flower'");
  EXPECT_EQ(r.exit_code, 3);
  EXPECT_EQ(ps("--config " + quote(write("bad.conf", "nonsense = 1\n")) + " search --album " + quote(album("fig1")) +
               " --query 'a flower'")
                .exit_code,
            2);
}

TEST_F(CliTest, ReplayPassAndFail) {
  ps("ingest " + quote(album("fig1")));
  const auto pass = write("pass.psscript",
                          "# fig1\n"
                          "query Alice is holding flowers\n"
                          "expect_status needs_clarification\n"
                          "expect_terms holding alice\n"
                          "tag alice=c01\n"
                          "pos img1\n"
                          "neg img4\n"
                          "expect_status complete\n"
                          "expect_program exists x. exists y. HasType(x, Alice) && HasType(y, Flower) && "
                          "HasRelation(x, y, Above)\n"
                          "expect_results @album/ground_truth.txt\n"
                          "expect_absent img4\n"
                          "save_all\n"
                          "unsave img2\n"
                          "export " + (dir_ / "out").string() + "\n");
  auto r = ps("replay --album fig1 --script " + quote(pass), true);
  ASSERT_EQ(r.exit_code, 0) << r.out;
  EXPECT_NE(r.out.find("PASS: 13 steps"), std::string::npos) << r.out;
  EXPECT_TRUE(fs::exists(dir_ / "out" / "manifest.json"));

  const auto fail = write("fail.psscript", "query A flower\nexpect_absent img4\nexpect_status complete\n");
  r = ps("replay --album fig1 --script " + quote(fail), true);
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_NE(r.out.find("FAIL: step 2 (line 2)"), std::string::npos) << r.out;

  r = ps("replay --album fig1 --script " + quote(write("bad.psscript", "jump img1\n")), true);
  EXPECT_EQ(r.exit_code, 2);
}

TEST(Script, Parse) {
  const auto steps = cli::parse_script("# c\n\nquery a b  c\n  pos img1\nsearch\n");
  ASSERT_EQ(steps.size(), 3u);
  EXPECT_EQ(steps[0].verb, "query");
  EXPECT_EQ(steps[0].arg, "a b  c");
  EXPECT_EQ(steps[0].line, 3u);
  EXPECT_EQ(steps[1].verb, "pos");
  EXPECT_EQ(steps[1].arg, "img1");
  EXPECT_THROW(cli::parse_script("pos\n"), std::invalid_argument);
  EXPECT_THROW(cli::parse_script("teleport x\n"), std::invalid_argument);
}

TEST(Script, RunsInProcess) {
  photoscout::service::App app(photoscout::service::Config{});
  app.add_album(photoscout::fixtures::transportation().album());
  const auto steps = cli::parse_script("query A car and a bicycle\nexpect_contains t1\nexpect_contains t4\n"
                                       "expect_absent t2\nneg t4\nexpect_status no_program\n");
  const auto report = cli::run_script(app, "transportation", steps, {});
  EXPECT_TRUE(report.passed) << report.failure;
  EXPECT_EQ(report.steps_run, 6u);
}

TEST(Registry, PersistsAcrossInstances) {
  testutil::TempDir home("ps-home");
  {
    cli::Registry r(home.path());
    r.add("a", home / "x");
    EXPECT_THROW(r.add("a", home / "y"), photoscout::Error);
  }
  cli::Registry again(home.path());
  ASSERT_TRUE(again.find("a"));
  EXPECT_EQ(*again.find("a"), fs::absolute(home / "x"));
  EXPECT_FALSE(again.find("b"));
}

TEST_F(CliTest, MatchesServiceOutput) {
  ps("ingest " + quote(album("fig1")));
  const auto cli_out = ps("search --album fig1 --query 'Alice is holding flowers' --tag alice=c01 --pos img1 "
                          "--neg img4 --json");
  ASSERT_EQ(cli_out.exit_code, 0);

  photoscout::service::Config config;
  config.album_root = dir_ / "albums";
  photoscout::service::App app(config);
  app.handle("POST", "/albums", R"({"path": "fig1"})");
  app.handle("POST", "/albums/fig1/tags", R"({"name": "alice", "face_cluster": "c01"})");
  const auto sid = app.handle("POST", "/sessions", R"({"album_id": "fig1"})").body["session_id"].get<std::string>();
  const auto r = app.handle("POST", "/sessions/" + sid + "/search",
                            R"({"query": "Alice is holding flowers", "positive": ["img1"], "negative": ["img4"]})");
  EXPECT_EQ(photoscout::service::Json::parse(cli_out.out), r.body);
}
