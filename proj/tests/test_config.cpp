// Strict INI parsing: dotted lookups, typed reads, overrides, and the
// loud-failure paths (missing keys, type errors, duplicates, leftovers).
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>

#include "chmhd/config.hpp"
#include "chmhd/util.hpp"

using namespace chmhd;

namespace {

const char* kSample = R"(# leading comment
[time]
dt = 0.01
steps = 50

; alternate comment marker
[solver]
newton_tol = 1e-12
reuse = adaptive
verbose = yes
)";

}  // namespace

TEST_CASE("parse and typed lookups") {
    Config c = Config::from_text(kSample, "sample.ini");
    CHECK(c.has("time.dt"));
    CHECK(!c.has("time.dx"));
    CHECK(c.require_double("time.dt") == doctest::Approx(0.01));
    CHECK(c.get_int("time.steps", -1) == 50);
    CHECK(c.require_double("solver.newton_tol") == doctest::Approx(1e-12));
    CHECK(c.require_string("solver.reuse") == "adaptive");
    CHECK(c.get_bool("solver.verbose", false));
    CHECK(c.get_bool("solver.quiet", true));
    CHECK(c.get_double("time.t_end", 2.5) == doctest::Approx(2.5));
    CHECK(c.get_string("output.dir", "out") == "out");
    CHECK(c.get_u64("experiment.seed", 7u) == 7u);
    c.reject_unknown();  // everything above was consumed
}

TEST_CASE("missing required value reports origin") {
    Config c = Config::from_text(kSample, "sample.ini");
    CHECK_THROWS_WITH_AS(c.require_double("time.t_end"),
                         "sample.ini: missing required value for 'time.t_end'", Error);
}

TEST_CASE("type errors report origin and line") {
    Config c = Config::from_text(kSample, "sample.ini");
    CHECK_THROWS_WITH_AS(c.require_double("solver.reuse"),
                         "sample.ini:9: expected a number, got 'adaptive' for 'solver.reuse'", Error);
    CHECK_THROWS_AS(c.get_int("time.dt", 0), Error);
    CHECK_THROWS_AS(c.get_bool("time.steps", false), Error);
}

TEST_CASE("override replaces and adds entries") {
    Config c = Config::from_text(kSample, "sample.ini");
    c.apply_override("time.dt=0.5");
    c.apply_override("output.dir = /tmp/x");
    CHECK(c.require_double("time.dt") == doctest::Approx(0.5));
    CHECK(c.require_string("output.dir") == "/tmp/x");
    CHECK_THROWS_AS(c.apply_override("no_equals_sign"), Error);
    CHECK_THROWS_AS(c.apply_override("nodot=3"), Error);
}

TEST_CASE("malformed input throws") {
    CHECK_THROWS_AS(Config::from_text("[time\ndt = 1\n"), Error);     // unterminated header
    CHECK_THROWS_AS(Config::from_text("dt = 1\n"), Error);            // key before any section
    CHECK_THROWS_AS(Config::from_text("[time]\njust words\n"), Error);  // no equals sign
    CHECK_THROWS_AS(Config::from_text("[time]\ndt = 1\ndt = 2\n"), Error);  // duplicate
    CHECK_THROWS_AS(Config::from_text("[ti me]\n"), Error);           // bad section name
    CHECK_THROWS_AS(Config::from_text("[time]\nd-t = 1\n"), Error);   // bad key name
}

TEST_CASE("reject_unknown lists leftover keys") {
    Config c = Config::from_text(kSample, "sample.ini");
    c.require_double("time.dt");
    try {
        c.reject_unknown();
        FAIL("expected reject_unknown to throw");
    } catch (const Error& e) {
        const std::string msg = e.what();
        CHECK(msg.find("unknown configuration keys") != std::string::npos);
        CHECK(msg.find("time.steps") != std::string::npos);
        CHECK(msg.find("solver.reuse") != std::string::npos);
        CHECK(msg.find("time.dt") == std::string::npos);
    }
}

TEST_CASE("missing file throws") {
    CHECK_THROWS_AS(Config::from_file("/nonexistent/path/config.ini"), Error);
}
