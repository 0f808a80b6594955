#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <nlohmann/json.hpp>
#include <sstream>
#include <sys/wait.h>

#include "amodal/backends/server.hpp"
#include "test_util.hpp"

using namespace amodal;
using namespace amodal::testutil;

namespace {

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

nlohmann::json read_json(const std::filesystem::path& path) {
    return nlohmann::json::parse(read_text(path));
}

/// Run the CLI through the shell; returns the exit code, captures stdout+stderr.
int run_cli(const std::string& args, std::string* output = nullptr,
            const std::string& env_prefix = "") {
    static int counter = 0;
    const auto capture = std::filesystem::temp_directory_path() / "amodal-tests" /
                         ("cli-capture-" + std::to_string(counter++) + ".txt");
    std::filesystem::create_directories(capture.parent_path());
    const std::string cmd = env_prefix + "\"" + std::string(AMODAL_CLI_PATH) + "\" " +
                            args + " > \"" + capture.string() + "\" 2>&1";
    const int status = std::system(cmd.c_str());
    if (output) *output = read_text(capture);
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

std::filesystem::path scene_path(const std::string& name, bool two_stage = false) {
    const auto dir = temp_dir(name);
    const auto path = dir / "scene.json";
    if (two_stage) {
        write_two_stage_scene_json(path);
    } else {
        write_simple_scene_json(path);
    }
    return path;
}

std::string q(const std::filesystem::path& p) { return "\"" + p.string() + "\" "; }

}  // namespace

TEST_CASE("usage errors exit with code 2") {
    std::string out;
    CHECK(run_cli("complete --out /tmp/x", &out) == 2);  // --query missing
    CHECK(run_cli("definitely-not-a-subcommand", &out) == 2);
    CHECK(run_cli("complete --query cat --out /tmp/x --variants 0", &out) == 2);

    // Malformed --point is a usage error too.
    const auto scene = scene_path("cli-point");
    CHECK(run_cli("complete --query cat --point nope --scene " + q(scene) +
                      "--out " + q(temp_dir("cli-point-out")),
                  &out) == 2);
    CHECK(out.find("X,Y") != std::string::npos);
}

TEST_CASE("a query no instance matches exits with code 3") {
    const auto scene = scene_path("cli-badquery");
    std::string out;
    CHECK(run_cli("complete --query bus --scene " + q(scene) + "--out " +
                      q(temp_dir("cli-badquery-out")),
                  &out) == 3);
    CHECK(out.find("query resolution error") != std::string::npos);
}

TEST_CASE("an unreachable remote endpoint exits with code 4") {
    const auto dir = temp_dir("cli-deadremote");
    std::ofstream(dir / "config.json")
        << R"({"backends": {"mode": "remote", "url": "http://127.0.0.1:9"}})";
    std::string out;
    CHECK(run_cli("backends check --config " + q(dir / "config.json"), &out) == 4);
    CHECK(out.find("transport") != std::string::npos);
}

TEST_CASE("mock mode without a scene is a contract error, code 5") {
    std::string out;
    CHECK(run_cli("complete --query cat --out " + q(temp_dir("cli-noscene-out")),
                  &out) == 5);
    CHECK(out.find("scene") != std::string::npos);
}

TEST_CASE("config file values apply and flags override them") {
    const auto dir = temp_dir("cli-precedence");
    const auto scene = scene_path("cli-precedence-scene");
    std::ofstream(dir / "config.json") << R"({
  "rng_seed": 100,
  "composite_step": 25,
  "open_vocabulary": ["fence"],
  "backends": {"mode": "mock", "scene": ")" << scene.string() << R"("}
})";

    const auto out_a = dir / "from-config";
    REQUIRE(run_cli("complete --query cat --config " + q(dir / "config.json") +
                    "--out " + q(out_a)) == 0);
    const nlohmann::json m_a = read_json(out_a / "manifest.json");
    CHECK(m_a.at("seed") == 100);
    CHECK(m_a.at("config").at("composite_step") == 25);

    const auto out_b = dir / "flag-override";
    REQUIRE(run_cli("complete --query cat --config " + q(dir / "config.json") +
                    "--seed 5 --k 30 --out " + q(out_b)) == 0);
    const nlohmann::json m_b = read_json(out_b / "manifest.json");
    CHECK(m_b.at("seed") == 5);
    CHECK(m_b.at("config").at("composite_step") == 30);
}

TEST_CASE("AMODAL_BACKEND_URL overrides the configured endpoint") {
    // The config points at a dead port; the environment points at a live
    // server. A successful check proves the environment won.
    const ScriptedScene scene = simple_scene();
    BackendSet local = make_mock_backends(scene, 50, /*with_metric=*/true);
    BackendHttpServer server{local, "env-stack", "0.1"};
    const int port = server.start();

    const auto dir = temp_dir("cli-env");
    std::ofstream(dir / "config.json")
        << R"({"backends": {"mode": "remote", "url": "http://127.0.0.1:9"}})";

    std::string out;
    const std::string env =
        "AMODAL_BACKEND_URL=http://127.0.0.1:" + std::to_string(port) + " ";
    CHECK(run_cli("backends check --config " + q(dir / "config.json"), &out, env) == 0);
    CHECK(out.find("ping ok: http://127.0.0.1:" + std::to_string(port)) !=
          std::string::npos);
}

TEST_CASE("complete produces a deterministic bundle plus a volatile run record") {
    const auto scene = scene_path("cli-complete");
    const auto out_a = temp_dir("cli-complete-a");
    const auto out_b = temp_dir("cli-complete-b");

    std::string stdout_a;
    REQUIRE(run_cli("complete --query cat --scene " + q(scene) + "--out " + q(out_a) +
                    "--json", &stdout_a) == 0);
    const nlohmann::json summary = nlohmann::json::parse(stdout_a);
    REQUIRE(summary.at("bundles").size() == 1);
    CHECK(summary.at("bundles")[0].at("iterations") == 1);
    CHECK(summary.at("bundles")[0].at("termination") == "unoccluded");

    REQUIRE(run_cli("complete --query cat --scene " + q(scene) + "--out " + q(out_b)) ==
            0);
    // Acceptance-grade determinism: byte-identical manifests across runs.
    CHECK(read_text(out_a / "manifest.json") == read_text(out_b / "manifest.json"));
    for (const char* f : {"original.png", "amodal.png", "amodal_mask.png",
                          "overlay.png"}) {
        CHECK(std::filesystem::exists(out_a / f));
    }
    // run.json carries the wall clock and command line, outside the manifest.
    const nlohmann::json run = read_json(out_a / "run.json");
    CHECK(run.at("unix_time_ms").get<std::int64_t>() > 0);
    CHECK(run.at("command_line").get<std::string>().find("--query cat") !=
          std::string::npos);
    CHECK(read_text(out_a / "manifest.json").find("unix_time") == std::string::npos);
}

TEST_CASE("a seed point picks the instance under it") {
    const auto scene = scene_path("cli-seedpoint");
    const auto out = temp_dir("cli-seedpoint-out");
    REQUIRE(run_cli("complete --query cat --point 25,35 --scene " + q(scene) +
                    "--out " + q(out)) == 0);
    const nlohmann::json manifest = read_json(out / "manifest.json");
    CHECK(manifest.at("query").at("seed_point") == nlohmann::json({25, 35}));
}

TEST_CASE("variants fan out into seed-distinct bundles") {
    const auto scene = scene_path("cli-variants", /*two_stage=*/true);
    const auto out = temp_dir("cli-variants-out");
    REQUIRE(run_cli("complete --query cat --seed 7 --variants 3 --scene " + q(scene) +
                    "--out " + q(out)) == 0);
    for (int v = 0; v < 3; ++v) {
        const auto dir = out / ("variant_" + std::to_string(v));
        REQUIRE(std::filesystem::exists(dir / "manifest.json"));
        CHECK(read_json(dir / "manifest.json").at("seed") == 7 + v);
    }
    CHECK(read_json(out / "run.json").at("outputs").size() == 3);
}

TEST_CASE("debug traces are opt-in artifacts") {
    const auto scene = scene_path("cli-trace");
    const auto plain = temp_dir("cli-trace-off");
    const auto traced = temp_dir("cli-trace-on");
    REQUIRE(run_cli("complete --query cat --scene " + q(scene) + "--out " + q(plain)) ==
            0);
    REQUIRE(run_cli("complete --query cat --debug-trace --scene " + q(scene) +
                    "--out " + q(traced)) == 0);
    CHECK_FALSE(std::filesystem::exists(plain / "iter_0" / "trace"));
    CHECK(std::filesystem::exists(traced / "iter_0" / "trace" / "i_syn.png"));
    CHECK(std::filesystem::exists(traced / "iter_0" / "trace" / "diagnostics.json"));
    // Same deterministic manifest either way.
    CHECK(read_text(plain / "manifest.json") == read_text(traced / "manifest.json"));
}

TEST_CASE("curate scores a finished bundle against labels") {
    const auto scene = scene_path("cli-curate");
    const auto bundles = temp_dir("cli-curate-bundles");
    REQUIRE(run_cli("complete --query cat --scene " + q(scene) + "--out " +
                    q(bundles / "sample_0")) == 0);

    const auto labels = bundles / "labels.json";
    std::ofstream(labels) << R"({"sample_0": "complete"})";
    const auto report_path = bundles / "report.json";

    std::string out;
    REQUIRE(run_cli("curate --batch " + q(bundles) + "--labels " + q(labels) +
                    "--scene " + q(scene) + "--out " + q(report_path), &out) == 0);
    const nlohmann::json report = read_json(report_path);
    REQUIRE(report.at("items").size() == 1);
    CHECK(report.at("items")[0].at("id") == "sample_0");
    CHECK(report.at("items")[0].at("label") == "complete");
    CHECK(report.at("items")[0].at("reason") == "contained_in_dilation");
    CHECK(report.at("metrics").at("tp") == 1);
    CHECK(report.at("metrics").at("accuracy") == 1.0);
    CHECK(nlohmann::json::parse(out) == report);  // stdout mirrors the file

    // --bundle and --batch are mutually exclusive.
    CHECK(run_cli("curate --bundle " + q(bundles / "sample_0") + "--batch " +
                  q(bundles) + "--scene " + q(scene)) == 2);
    // Neither is a usage error as well.
    CHECK(run_cli("curate --scene " + q(scene)) == 2);
}

TEST_CASE("dataset build then eval round trip") {
    const auto pool = temp_dir("cli-pool");
    write_pool_entry(pool, "cat", kObjectTag, BBox{20, 20, 72, 72});
    write_pool_entry(pool, "fence", kOccluderTag, BBox{30, 4, 62, 92});

    const auto data = temp_dir("cli-data");
    std::string out;
    REQUIRE(run_cli("dataset build --pool " + q(pool) + "--easy 2 --hard 2 --seed 3 " +
                    "--out " + q(data), &out) == 0);
    CHECK(out.find("wrote 4 samples") != std::string::npos);

    const auto report_path = temp_dir("cli-eval") / "report.json";
    REQUIRE(run_cli("eval --dataset " + q(data) + "--metrics iou,l1 --out " +
                    q(report_path), &out) == 0);
    CHECK(out.rfind("method,difficulty,metric,mean,n\n", 0) == 0);
    CHECK(std::filesystem::exists(report_path));
    CHECK(std::filesystem::exists(
        std::filesystem::path(report_path).replace_extension(".csv")));

    const nlohmann::json report = read_json(report_path);
    CHECK(report.at("schema") == "amodal-eval/1");
    for (const auto& entry : report.at("metrics")) {
        if (entry.at("metric") == "iou") {
            CHECK(entry.at("easy").at("mean") == 1.0);
            CHECK(entry.at("hard").at("mean") == 1.0);
        }
    }
}

TEST_CASE("backends check lists the mock stack") {
    const auto scene = scene_path("cli-backends");
    std::string out;
    CHECK(run_cli("backends check --scene " + q(scene), &out) == 0);
    for (const char* role : {"diffusion:", "segmentation:", "depth:", "removal:",
                             "metric:"}) {
        CHECK(out.find(role) != std::string::npos);
    }
}
