#include <doctest.h>

#include <sklab/config.hpp>

#include <json.hpp>

#include <stdexcept>
#include <string>

using namespace sklab;

namespace {

const char* kSample = R"(# sweep over a short ladder
[mapping]
kind = spiral_1_2
a = 0.25
stretch = identity

[source]
dimension = 1
sigma_x = 1.0

[channel]
csnr_db = 20   # per-dimension
power = 1.0

[decoder]
anomaly_threshold = 5.0
mmse_scale = false

[run]
trials = 5000
seed = 42
jobs = 2
csnr_sweep_db = 10, 15, 20
)";

}  // namespace

TEST_CASE("config: full round trip of a sweep description") {
    const auto c = cfg::parse_experiment_config(kSample);
    CHECK(c.mapping.kind == map::MappingKind::spiral_1_2);
    CHECK(c.mapping.a == 0.25);
    CHECK(c.source.dimension == 1);
    CHECK(c.channel.power_per_dim == 1.0);
    CHECK(c.channel.noise_var == doctest::Approx(1e-2).epsilon(1e-12));
    CHECK(c.decoder.anomaly_threshold == 5.0);
    CHECK_FALSE(c.decoder.mmse_scale);
    CHECK(c.trials == 5000);
    CHECK(c.seed == 42);
    CHECK(c.jobs == 2);
    REQUIRE(c.csnr_sweep_db.size() == 3);
    CHECK(c.csnr_sweep_db[1] == 15.0);
}

TEST_CASE("config: noise_var overrides csnr_db when both are present") {
    const auto c = cfg::parse_experiment_config(
        "[channel]\ncsnr_db = 20\nnoise_var = 0.5\n[run]\ntrials = 1\n");
    CHECK(c.channel.noise_var == 0.5);
}

TEST_CASE("config: errors name the offending field") {
    auto message_of = [](const std::string& text) -> std::string {
        try {
            cfg::parse_experiment_config(text);
        } catch (const std::invalid_argument& e) {
            return e.what();
        }
        return "";
    };
    CHECK(message_of("[mapping]\nradius = 3\n").find("mapping.radius") != std::string::npos);
    CHECK(message_of("[run]\ntrials = lots\n").find("run.trials") != std::string::npos);
    CHECK(message_of("[decoder]\nmmse_scale = maybe\n").find("decoder.mmse_scale") !=
          std::string::npos);
    CHECK(message_of("[turbo]\nx = 1\n").find("turbo") != std::string::npos);
    CHECK(message_of("key_without_section = 1\n").find("line 1") != std::string::npos);
    CHECK(message_of("[run\ntrials = 1\n").find("section") != std::string::npos);
    // Semantic validation still runs after parsing.
    CHECK_THROWS_AS(cfg::parse_experiment_config("[run]\ntrials = 0\n"), std::invalid_argument);
}

TEST_CASE("config: digest is canonical over formatting, sensitive to values") {
    const auto base = cfg::config_digest(kSample);

    // Reordered sections and keys, different comments and spacing.
    const char* shuffled = R"(
[run]
csnr_sweep_db=10, 15, 20
jobs   = 2
seed=42
trials=5000
[decoder]
mmse_scale = false
anomaly_threshold=5.0
[channel]
power=1.0
csnr_db=20
[source]
sigma_x=1.0
dimension=1
[mapping]
stretch=identity
a=0.25
kind=spiral_1_2
)";
    CHECK(cfg::config_digest(shuffled) == base);
    CHECK(cfg::config_digest(std::string(kSample) + "\n[run]\nseed = 43\n") != base);
    CHECK(cfg::config_digest("[run]\ntrials = 1\n") !=
          cfg::config_digest("[run]\ntrials = 2\n"));
    // The key/value boundary is part of the canonical form.
    CHECK(cfg::config_digest("[run]\nab = c\n") != cfg::config_digest("[run]\na = bc\n"));
}

TEST_CASE("manifest: serializes every field as valid JSON") {
    cfg::RunManifest man;
    man.config_digest = 0x0123456789abcdefull;
    man.tool_version = "1.2.3";
    man.seed = 7;
    man.started_at = "2026-01-02T03:04:05Z";
    man.finished_at = "2026-01-02T03:04:06Z";
    man.outputs = {"sweep.csv", "manifest.json"};

    const auto j = nlohmann::json::parse(man.to_json());
    CHECK(j["config_digest"] == "0123456789abcdef");
    CHECK(j["tool_version"] == "1.2.3");
    CHECK(j["seed"] == 7);
    CHECK(j["started_at"] == "2026-01-02T03:04:05Z");
    CHECK(j["finished_at"] == "2026-01-02T03:04:06Z");
    REQUIRE(j["outputs"].size() == 2);
    CHECK(j["outputs"][0] == "sweep.csv");
}

TEST_CASE("manifest: timestamps are ISO 8601 UTC") {
    const auto ts = cfg::iso8601_utc_now();
    REQUIRE(ts.size() == 20);
    CHECK(ts[4] == '-');
    CHECK(ts[10] == 'T');
    CHECK(ts.back() == 'Z');
}
