#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "fpsi/config.hpp"
#include "fpsi/driver.hpp"

using namespace fpsi;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& text) {
        static int counter = 0;
        path = (std::filesystem::temp_directory_path() /
                ("fpsi_test_" + std::to_string(counter++) + ".cfg"))
                   .string();
        std::ofstream os(path);
        os << text;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("config files parse key=value lines and skip comments") {
    TempFile f("# header comment\n"
               "dt = 0.025\n"
               "refine=2\n"
               "\n"
               "label = annulus run\n");
    Config c = load_config(f.path);
    CHECK(c.get_double("dt", 0) == 0.025);
    CHECK(c.get_int("refine", 0) == 2);
    CHECK(c.get("label", "") == "annulus run");
    CHECK(c.get_double("missing", 7.5) == 7.5);
    CHECK_FALSE(c.has("missing"));
}

TEST_CASE("malformed input is rejected") {
    TempFile f("dt 0.025\n");
    CHECK_THROWS(load_config(f.path));
    CHECK_THROWS(load_config("/nonexistent/path.cfg"));

    Config c;
    c.set("dt", "0.1x");
    CHECK_THROWS(c.get_double("dt", 0));
    c.set("refine", "2.5");
    CHECK_THROWS(c.get_int("refine", 0));
}

TEST_CASE("command-line assignments override file values") {
    Config c;
    c.set("dt", "0.05");
    apply_assignment(c, "dt=0.01");
    apply_assignment(c, "nu=0.02");
    CHECK(c.get_double("dt", 0) == 0.01);
    CHECK(c.get_double("nu", 0) == 0.02);
    CHECK_THROWS(apply_assignment(c, "no-equals-sign"));
}

TEST_CASE("run configuration picks up every physical key") {
    Config c;
    c.set("refine", "2");
    c.set("M", "128");
    c.set("K", "12");
    c.set("delta", "0.2");
    c.set("dt", "0.01");
    c.set("T", "0.5");
    c.set("nu", "0.03");
    c.set("beta", "2");
    c.set("rho_b", "1.5");
    c.set("h", "0.25");
    c.set("mu_e", "3");
    c.set("lambda_e", "4");
    c.set("mu_v", "0.5");
    c.set("lambda_v", "0.6");
    c.set("c0", "0.7");
    c.set("alpha", "0.8");
    c.set("kappa", "0.9");
    RunConfig rc = run_config_from(c);
    CHECK(rc.refine == 2);
    CHECK(rc.M == 128);
    CHECK(rc.K == 12);
    CHECK(rc.delta == 0.2);
    CHECK(rc.dt == 0.01);
    CHECK(rc.steps() == 50);
    CHECK(rc.prm.nu == 0.03);
    CHECK(rc.prm.beta == 2.0);
    CHECK(rc.prm.rho_b == 1.5);
    CHECK(rc.prm.h == 0.25);
    CHECK(rc.prm.mu_e == 3.0);
    CHECK(rc.prm.lambda_e == 4.0);
    CHECK(rc.prm.mu_v == 0.5);
    CHECK(rc.prm.lambda_v == 0.6);
    CHECK(rc.prm.c0 == 0.7);
    CHECK(rc.prm.alpha == 0.8);
    CHECK(rc.prm.kappa == 0.9);
}
