// the C interface seen from a client: error codes, handles, and agreement with direct evaluation
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstring>
#include <filesystem>
#include <random>
#include <vector>

#include "doctest.h"
#include "ips_c.h"

static const char* kBall = R"({"grid": {"n": 12},
  "obstacle": {"shapes": [{"kind": "ball", "center": [0.5, 0.5, 0.5], "radius": 0.2, "sign": 1, "amp": 5}]}})";

TEST_CASE("config errors come back as codes with a message") {
    ips_config* c = nullptr;
    CHECK(ips_config_parse("{\"grid\": ", &c) == IPS_E_CONFIG);
    CHECK(c == nullptr);
    CHECK(std::strlen(ips_last_error()) > 0);
    CHECK(ips_config_parse(R"({"bogus": 1})", &c) == IPS_E_CONFIG);
    CHECK(std::strstr(ips_last_error(), "bogus") != nullptr);
    CHECK(ips_config_load("/nonexistent/config.json", &c) == IPS_E_CONFIG);
    CHECK(ips_config_parse(nullptr, &c) == IPS_E_ARG);
    CHECK(ips_config_parse(kBall, nullptr) == IPS_E_ARG);
    REQUIRE(ips_config_parse(kBall, &c) == IPS_OK);
    CHECK(std::strlen(ips_last_error()) == 0);
    CHECK(ips_config_set_grid(c, "x") == IPS_E_CONFIG);
    CHECK(ips_run_scan(c, 1, nullptr) == IPS_E_CONFIG);  // no points
    CHECK(ips_run_needle(c, 1, nullptr) == IPS_E_CONFIG);
    CHECK(ips_report("/nonexistent/out", nullptr, nullptr) == IPS_E_IO);
    ips_config_free(c);
    ips_config_free(nullptr);
}

TEST_CASE("seed and grid changes alter the hash") {
    ips_config* c = nullptr;
    REQUIRE(ips_config_parse(kBall, &c) == IPS_OK);
    uint64_t h0 = 0, h1 = 0, h2 = 0;
    ips_config_hash(c, &h0);
    REQUIRE(ips_config_set_seed(c, 99) == IPS_OK);
    ips_config_hash(c, &h1);
    REQUIRE(ips_config_set_grid(c, "10x12x14") == IPS_OK);
    ips_config_hash(c, &h2);
    CHECK(h0 != h1);
    CHECK(h1 != h2);
    ips_config_free(c);
}

TEST_CASE("problem handle: DtN pairings and indicators") {
    ips_config* c = nullptr;
    REQUIRE(ips_config_parse(kBall, &c) == IPS_OK);
    ips_problem* p = nullptr;
    REQUIRE(ips_problem_create(c, &p) == IPS_OK);
    double lam = 0;
    ips_problem_lambda_min(p, &lam);
    CHECK(lam > 0);
    size_t nb = 0;
    ips_problem_boundary_size(p, &nb);
    REQUIRE(nb > 0);
    std::vector<double> xyz(3 * nb);
    CHECK(ips_problem_boundary_nodes(p, xyz.data()) == IPS_OK);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(-1, 1);
    std::vector<double> f(nb), g(nb);
    for (size_t i = 0; i < nb; ++i) f[i] = U(rng), g[i] = U(rng);
    double fg = 0, gf = 0, d = 0;
    CHECK(ips_problem_dtn_pairing(p, f.data(), g.data(), &fg) == IPS_OK);
    CHECK(ips_problem_dtn_pairing(p, g.data(), f.data(), &gf) == IPS_OK);
    CHECK(fg == doctest::Approx(gf).epsilon(1e-9));
    // a positive potential raises the quadratic form
    CHECK(ips_problem_dtn_difference(p, f.data(), f.data(), &d) == IPS_OK);
    CHECK(d > 0);

    double x[3] = {0.8, 0.5, 0.5}, used[3], v = 0;
    CHECK(ips_problem_indicator(p, "probe", x, &v, used) == IPS_OK);
    CHECK(v > 0);
    CHECK(std::abs(used[0] - 0.8) < 1.0 / 11);
    CHECK(ips_problem_indicator(p, "nonsense", x, &v, nullptr) == IPS_E_ARG);
    double out[3] = {1.5, 0.5, 0.5};
    CHECK(ips_problem_indicator(p, "probe", out, &v, nullptr) == IPS_E_ARG);
    ips_problem_free(p);

    // a well deep enough to lose coercivity
    ips_config* w = nullptr;
    REQUIRE(ips_config_parse(R"({"grid": {"n": 10}, "obstacle": {"shapes": [{"kind": "box",
        "lo": [0.05, 0.05, 0.05], "hi": [0.95, 0.95, 0.95], "sign": -1, "amp": 29.6}]}})",
                             &w) == IPS_OK);
    ips_problem* q = nullptr;
    CHECK(ips_problem_create(w, &q) == IPS_E_WELLPOSED);
    CHECK(q == nullptr);
    ips_config_free(w);
    ips_config_free(c);
}

TEST_CASE("drivers write their summaries and report collects them") {
    namespace fs = std::filesystem;
    auto dir = fs::temp_directory_path() / "ips_capi_out";
    fs::remove_all(dir);
    ips_config* c = nullptr;
    REQUIRE(ips_config_parse(R"({"grid": {"n": 10}, "methods": ["probe", "cim"],
      "obstacle": {"shapes": [{"kind": "ball", "center": [0.5, 0.5, 0.5], "radius": 0.2, "sign": -1, "amp": 3}]},
      "points": [{"type": "line", "target": [0.7, 0.5, 0.5], "direction": [1, 0, 0],
                  "distances": [0.25, 0.2, 0.15, 0.1, 0.06]}]})",
                             &c) == IPS_OK);
    CHECK(ips_run_scan(c, 2, (dir / "scan").c_str()) == IPS_OK);
    CHECK(ips_run_forward(c, 1, (dir / "forward").c_str()) == IPS_OK);
    int np = -1, nf = -1;
    CHECK(ips_report(dir.c_str(), &np, &nf) == IPS_OK);
    CHECK(np + nf > 0);
    CHECK(fs::exists(dir / "report.txt"));
    ips_config_free(c);
    fs::remove_all(dir);
}
