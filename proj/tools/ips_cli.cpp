// command-line front end; talks to the library only through the C interface
#include <cstdio>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "ips_c.h"

namespace {

int exit_code(int rc) {
    switch (rc) {
        case IPS_OK: return 0;
        case IPS_E_ARG:
        case IPS_E_CONFIG: return 2;
        case IPS_E_WELLPOSED: return 3;
        case IPS_E_NUMERIC: return 4;
        default: return 1;
    }
}

int fail(int rc) {
    std::fprintf(stderr, "error: %s\n", ips_last_error());
    return exit_code(rc);
}

struct Common {
    std::string config, out, grid;
    int threads = int(std::max(1u, std::thread::hardware_concurrency()));
    long long seed = -1;
};

void add_common(CLI::App* sub, Common& o) {
    sub->add_option("--config", o.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "output directory, default from the config");
    sub->add_option("--threads", o.threads, "worker threads")->check(CLI::Range(1, 256));
    sub->add_option("--seed", o.seed, "seed for randomized batteries")->check(CLI::NonNegativeNumber);
    sub->add_option("--grid", o.grid, "grid override, N or NxNxN");
}

using Runner = int (*)(const ips_config*, int, const char*);

int run(const Common& o, Runner fn, const char* what) {
    ips_config* c = nullptr;
    int rc = ips_config_load(o.config.c_str(), &c);
    if (rc) return fail(rc);
    if (!o.grid.empty() && (rc = ips_config_set_grid(c, o.grid.c_str()))) {
        ips_config_free(c);
        return fail(rc);
    }
    if (o.seed >= 0 && (rc = ips_config_set_seed(c, static_cast<uint64_t>(o.seed)))) {
        ips_config_free(c);
        return fail(rc);
    }
    const char* dir = o.out.empty() ? nullptr : o.out.c_str();
    std::string shown = dir ? dir : "";
    if (!dir) {
        const char* d = nullptr;
        ips_config_out_dir(c, &d);
        shown = d;
    }
    rc = fn(c, o.threads, dir);
    ips_config_free(c);
    if (rc) return fail(rc);
    std::printf("%s: wrote %s\n", what, shown.c_str());
    std::FILE* f = std::fopen((shown + "/summary.txt").c_str(), "r");
    if (f) {
        char buf[512];
        while (std::fgets(buf, sizeof buf, f)) std::fputs(buf, stdout);
        std::fclose(f);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"potential-jump indicator lab"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(ips_version()));

    Common fw, nd, sc, cl, rt;
    auto* f = app.add_subcommand("forward", "solver checks, DtN difference forms and dense DtN assembly");
    add_common(f, fw);
    auto* n = app.add_subcommand("needle", "generate needle sequences and their diagnostics");
    add_common(n, nd);
    auto* s = app.add_subcommand("scan", "indicator values over probe points, with rate fits");
    add_common(s, sc);
    auto* k = app.add_subcommand("classify", "inside/outside verdicts from needle sequences");
    add_common(k, cl);
    auto* r = app.add_subcommand("rates", "cone, exterior energy and I1 rate checks");
    add_common(r, rt);
    std::string report_dir;
    auto* rep = app.add_subcommand("report", "collect the summaries under an output directory");
    rep->add_option("--out", report_dir, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    if (*f) return run(fw, ips_run_forward, "forward");
    if (*n) return run(nd, ips_run_needle, "needle");
    if (*s) return run(sc, ips_run_scan, "scan");
    if (*k) return run(cl, ips_run_classify, "classify");
    if (*r) return run(rt, ips_run_rates, "rates");
    int passed = 0, failed = 0;
    int rc = ips_report(report_dir.c_str(), &passed, &failed);
    if (rc) return fail(rc);
    std::printf("report: %s/report.txt, PASS %d, FAIL %d\n", report_dir.c_str(), passed, failed);
    return 0;
}
