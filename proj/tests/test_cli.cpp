#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"

namespace fs = std::filesystem;

namespace {

// A configuration small enough that the full command pipeline runs in
// seconds: T=60, tiny net, few pairs.
const char* kTinyConfig =
    "schema_version = 1\n"
    "dim = 2\n"
    "conditions = 2\n"
    "hidden = 12\n"
    "hidden_layers = 1\n"
    "time_embed = 4\n"
    "timesteps = 60\n"
    "target_modes = -1.5 0 ; 1.5 0\n"
    "target_cov = 0.02\n"
    "pretrain_modes = -1.5 1.8 ; 1.5 -1.8\n"
    "method = sdpo\n"
    "beta = 0.02\n"
    "steps = 25\n"
    "pairs = 6\n"
    "diag_cadence = 10\n"
    "pretrain_steps = 120\n"
    "pretrain_batch = 16\n"
    "eval_samples = 8\n"
    "flow_steps = 40\n"
    "flow_paths = 50\n"
    "rounds = 2\n"
    "epochs = 1\n"
    "pairs_per_round = 4\n";

struct TempTree {
    fs::path root;
    TempTree() {
        root = fs::temp_directory_path() / "prefdiff_cli_test";
        fs::remove_all(root);
        fs::create_directories(root);
        std::ofstream(root / "tiny.cfg") << kTinyConfig;
    }
    std::string cfg() const { return (root / "tiny.cfg").string(); }
    std::string dir(const std::string& name) const { return (root / name).string(); }
};

int run_cli(const std::vector<std::string>& args) { return prefdiff::cli::run(args); }

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("cli: full pipeline with exit codes, reproducibility, and reports") {
    TempTree t;

    SUBCASE("missing seed is an error") {
        CHECK(run_cli({"pretrain", "--config", t.cfg(), "--out", t.dir("x")}) == 2);
    }
    SUBCASE("unknown flag rejected") {
        CHECK(run_cli({"pretrain", "--config", t.cfg(), "--seed", "1", "--out", t.dir("x"),
                       "--bogus"}) == 2);
    }
    SUBCASE("invalid config gives exit 2 with a field message") {
        std::ofstream(t.root / "bad.cfg") << "schema_version = 1\nbeta = -1\n";
        CHECK(run_cli({"pretrain", "--config", (t.root / "bad.cfg").string(), "--seed", "1", "--out",
                       t.dir("x")}) == 2);
    }
    SUBCASE("missing checkpoint is a runtime failure") {
        CHECK(run_cli({"align", "--config", t.cfg(), "--seed", "1", "--out", t.dir("x"), "--init",
                       t.dir("nope.txt")}) == 1);
    }

    SUBCASE("pipeline") {
        REQUIRE(run_cli({"pretrain", "--config", t.cfg(), "--seed", "3", "--out", t.dir("pre")}) == 0);
        CHECK(fs::exists(t.dir("pre") + "/checkpoint.txt"));
        CHECK(fs::exists(t.dir("pre") + "/pretrain_log.csv"));
        CHECK(fs::exists(t.dir("pre") + "/config.snapshot"));

        const std::string ckpt = t.dir("pre") + "/checkpoint.txt";

        REQUIRE(run_cli({"gen-pairs", "--config", t.cfg(), "--seed", "4", "--out", t.dir("gp"), "--init",
                         ckpt, "--n", "5"}) == 0);
        CHECK(fs::exists(t.dir("gp") + "/pairs.csv"));
        REQUIRE(run_cli({"gen-pairs", "--config", t.cfg(), "--seed", "4", "--out", t.dir("gpu"), "--init",
                         ckpt, "--n", "5", "--unlike"}) == 0);

        // align twice with the same seed: byte-identical output trees
        REQUIRE(run_cli({"align", "--config", t.cfg(), "--seed", "7", "--out", t.dir("a1"), "--init",
                         ckpt, "--method", "sdpo"}) == 0);
        REQUIRE(run_cli({"align", "--config", t.cfg(), "--seed", "7", "--out", t.dir("a2"), "--init",
                         ckpt, "--method", "sdpo"}) == 0);
        for (const char* f : {"/training_log.csv", "/weight_report.csv", "/density_trace.csv",
                              "/weight_curve.csv", "/checkpoint.txt", "/config.snapshot"}) {
            CHECK(fs::exists(t.dir("a1") + f));
            CHECK(slurp(t.dir("a1") + f) == slurp(t.dir("a2") + f));
        }

        // align from a pairs file
        REQUIRE(run_cli({"align", "--config", t.cfg(), "--seed", "8", "--out", t.dir("a3"), "--init",
                         ckpt, "--pairs", t.dir("gp") + "/pairs.csv"}) == 0);

        // diagnose all three modes
        REQUIRE(run_cli({"diagnose", "--config", t.cfg(), "--seed", "9", "--out", t.dir("d1"), "--init",
                         ckpt, "--what", "weight-curve", "--n", "6", "--bins", "4"}) == 0);
        CHECK(fs::exists(t.dir("d1") + "/weight_curve.csv"));
        REQUIRE(run_cli({"diagnose", "--config", t.cfg(), "--seed", "9", "--out", t.dir("d2"), "--init",
                         ckpt, "--what", "weight-compare", "--n", "6", "--bins", "4"}) == 0);
        CHECK(fs::exists(t.dir("d2") + "/weight_compare.csv"));
        REQUIRE(run_cli({"diagnose", "--config", t.cfg(), "--seed", "9", "--out", t.dir("d3"), "--init",
                         ckpt, "--what", "density-trace", "--n", "6"}) == 0);
        CHECK(run_cli({"diagnose", "--config", t.cfg(), "--seed", "9", "--out", t.dir("d4"), "--init",
                       ckpt, "--what", "nonsense"}) == 2);

        // iterate
        REQUIRE(run_cli({"iterate", "--config", t.cfg(), "--seed", "10", "--out", t.dir("it"), "--init",
                         ckpt}) == 0);
        CHECK(fs::exists(t.dir("it") + "/rounds.csv"));

        // sde-sample: deterministic endpoints
        REQUIRE(run_cli({"sde-sample", "--config", t.cfg(), "--seed", "11", "--out", t.dir("s1"),
                         "--paths", "20", "--trace", "2"}) == 0);
        REQUIRE(run_cli({"sde-sample", "--config", t.cfg(), "--seed", "11", "--out", t.dir("s2"),
                         "--paths", "20"}) == 0);
        CHECK(slurp(t.dir("s1") + "/endpoints.csv") == slurp(t.dir("s2") + "/endpoints.csv"));
        CHECK(fs::exists(t.dir("s1") + "/paths.csv"));

        // report renders SVGs from the run CSVs
        REQUIRE(run_cli({"report", "--run", t.dir("a1")}) == 0);
        CHECK(fs::exists(t.dir("a1") + "/loss.svg"));
        CHECK(fs::exists(t.dir("a1") + "/weight_curve.svg"));
        CHECK(fs::exists(t.dir("a1") + "/density_trace.svg"));
        CHECK(fs::exists(t.dir("a1") + "/report.txt"));

        // report twice: byte-identical SVGs
        const std::string svg1 = slurp(t.dir("a1") + "/loss.svg");
        REQUIRE(run_cli({"report", "--run", t.dir("a1")}) == 0);
        CHECK(slurp(t.dir("a1") + "/loss.svg") == svg1);

        // report on an empty dir fails: everything missing
        fs::create_directories(t.dir("empty"));
        CHECK(run_cli({"report", "--run", t.dir("empty")}) == 1);

        // the input config file was never modified
        CHECK(slurp(t.cfg()) == kTinyConfig);
    }
}

TEST_CASE("cli: emit_plots skips missing CSVs with a warning") {
    TempTree t;
    fs::create_directories(t.dir("partial"));
    std::ofstream(t.dir("partial") + "/training_log.csv")
        << "run_id,step,t,method,loss,logit,w_raw,w_clipped,beta\nr,1,5,sdpo,0.7,0,1,1,0.02\n";
    std::string message;
    CHECK(prefdiff::cli::emit_plots(t.dir("partial"), &message) == 0);
    CHECK(message.find("wrote loss.svg") != std::string::npos);
    CHECK(message.find("skipped") != std::string::npos);

    // empty weight CSV (header only): skipped with a warning
    std::ofstream(t.dir("partial") + "/weight_curve.csv") << "run_id,bin,t_lo,t_hi,mean_raw,n\n";
    message.clear();
    CHECK(prefdiff::cli::emit_plots(t.dir("partial"), &message) == 0);
    CHECK(message.find("skipped weight_curve.csv (empty)") != std::string::npos);
}
