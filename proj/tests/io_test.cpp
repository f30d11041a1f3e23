#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "curveshift/error.hpp"
#include "curveshift/io.hpp"

#include <cstdio>
#include <fstream>

using namespace curveshift;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    const std::string path = std::string("io_test_") + name;
    std::ofstream out(path);
    out << content;
    return path;
}

} // namespace

TEST_CASE("bundled growth series load") {
    const Sample male = ingest_csv(DATA_DIR "/cdc_length_male.csv", Orientation::Concave);
    const Sample female = ingest_csv(DATA_DIR "/cdc_length_female.csv", Orientation::Concave);
    CHECK(male.size() == 37);
    CHECK(female.size() == 37);
    CHECK(male.negated());
    // negated lengths: increasing and negative
    CHECK(male.responses.front() < -0.9);
    CHECK(male.responses.back() > male.responses.front());
}

TEST_CASE("header lines are skipped") {
    const std::string path = write_temp("header.csv",
                                        "value\n1\n2\n3\n4\n5\n6\n7\n8\n9\n10\n");
    const Sample s = ingest_csv(path, Orientation::Convex);
    CHECK(s.size() == 10);
    CHECK(s.responses.front() == 1.0);
    std::remove(path.c_str());
}

TEST_CASE("short and empty files raise TooFewRows") {
    const std::string path = write_temp("short.csv", "1\n2\n3\n4\n5\n");
    try {
        (void)ingest_csv(path, Orientation::Convex);
        FAIL("expected TooFewRows");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::TooFewRows);
    }
    std::remove(path.c_str());

    const std::string empty = write_temp("empty.csv", "");
    CHECK_THROWS_AS((void)ingest_csv(empty, Orientation::Convex), Error);
    std::remove(empty.c_str());
}

TEST_CASE("bad rows raise ParseError with the line number") {
    const std::string path =
        write_temp("bad.csv", "1\n2\nabc\n4\n5\n6\n7\n8\n9\n10\n");
    try {
        (void)ingest_csv(path, Orientation::Convex);
        FAIL("expected ParseError");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ParseError);
        CHECK(std::string(e.what()).find(":3:") != std::string::npos);
    }
    std::remove(path.c_str());

    const std::string nan_path =
        write_temp("nan.csv", "1\n2\nnan\n4\n5\n6\n7\n8\n9\n10\n");
    CHECK_THROWS_AS((void)ingest_csv(nan_path, Orientation::Convex), Error);
    std::remove(nan_path.c_str());
}

TEST_CASE("config files round-trip") {
    PipelineConfig config;
    config.kernel = KernelChoice::Biweight;
    config.bandwidth1 = 0.21;
    config.N = 123;
    config.eta = 0.003;
    config.L = 400;
    config.M = 700;
    config.lrv_m = 4;
    config.lrv_tau = 0.22;
    config.lrv_detrend = true;
    config.B = 321;
    config.alpha = 0.07;
    config.seed = 987654321;
    const std::string path = write_temp("config.json", config_json(config).dump(2));

    PipelineConfig loaded;
    apply_config_file(path, loaded);
    CHECK(loaded.kernel == KernelChoice::Biweight);
    CHECK(loaded.bandwidth1 == doctest::Approx(0.21));
    CHECK(*loaded.N == 123);
    CHECK(loaded.eta == doctest::Approx(0.003));
    CHECK(loaded.L == 400);
    CHECK(loaded.M == 700);
    CHECK(*loaded.lrv_m == 4);
    CHECK(*loaded.lrv_tau == doctest::Approx(0.22));
    CHECK(loaded.lrv_detrend);
    CHECK(loaded.B == 321);
    CHECK(loaded.alpha == doctest::Approx(0.07));
    CHECK(loaded.seed == 987654321);
    CHECK(config_json(loaded).dump() == config_json(config).dump());
    std::remove(path.c_str());
}

TEST_CASE("unknown config keys are rejected") {
    const std::string path = write_temp("bad_config.json", "{\"bogus\": 1}");
    PipelineConfig config;
    CHECK_THROWS_AS(apply_config_file(path, config), Error);
    std::remove(path.c_str());
}

TEST_CASE("identical inputs give a zero statistic and unit p-value") {
    const Sample s = ingest_csv(DATA_DIR "/cdc_length_male.csv", Orientation::Concave);
    PipelineConfig config;
    config.B = 100;
    config.seed = 5;
    config.threads = 2;
    const PipelineResult r = run_pipeline(s, s, config);
    CHECK(r.stat.value == 0.0);
    CHECK(r.boot.p_value == 1.0);
    CHECK_FALSE(r.boot.reject);
}

TEST_CASE("reports are byte-identical across invocations") {
    const Sample s1 = ingest_csv(DATA_DIR "/cdc_length_male.csv", Orientation::Concave);
    const Sample s2 = ingest_csv(DATA_DIR "/cdc_length_female.csv", Orientation::Concave);
    PipelineConfig config;
    config.B = 120;
    config.seed = 2024;
    config.eta = 0.001;
    const std::string a = report_json(run_pipeline(s1, s2, config), config).dump();
    const std::string b = report_json(run_pipeline(s1, s2, config), config).dump();
    CHECK(a == b);
}

TEST_CASE("shift signs map back to the input order") {
    PipelineResult r;
    r.shift.c_hat = 0.25;
    r.shift.d_hat = -0.5;
    r.shift.swapped = true;
    r.inputs_negated = true;
    CHECK(r.c_hat_input_order() == doctest::Approx(-0.25));
    CHECK(r.d_hat_input_order() == doctest::Approx(-0.5)); // two sign flips
    r.shift.swapped = false;
    CHECK(r.c_hat_input_order() == doctest::Approx(0.25));
    CHECK(r.d_hat_input_order() == doctest::Approx(0.5));
}
