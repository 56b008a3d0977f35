#include "ips_c.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <memory>
#include <new>
#include <sstream>
#include <string>

#include "dtn_difference.hpp"
#include "json.hpp"
#include "scan.hpp"

struct ips_config {
    ips::ExperimentConfig c;
};

struct ips_problem {
    ips::GridSpec g;
    ips::PotentialSpec pot;
    std::unique_ptr<ips::SchrodingerOperator> op;
    ips::WellPosedness wp;
    ips::IndicatorOptions quad;
};

namespace {

thread_local std::string last_error;

template <class F>
int guard(F&& f) {
    last_error.clear();
    try {
        f();
        return IPS_OK;
    } catch (const ips::Error& e) {
        last_error = e.what();
        switch (e.code) {
            case ips::E_ARG: return IPS_E_ARG;
            case ips::E_CONFIG: return IPS_E_CONFIG;
            case ips::E_WELLPOSED: return IPS_E_WELLPOSED;
            case ips::E_NUMERIC: return IPS_E_NUMERIC;
            case ips::E_IO: return IPS_E_IO;
        }
        return IPS_E_INTERNAL;
    } catch (const nlohmann::json::exception& e) {
        last_error = std::string("config: ") + e.what();
        return IPS_E_CONFIG;
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
        return IPS_E_NUMERIC;
    } catch (const std::exception& e) {
        last_error = e.what();
        return IPS_E_INTERNAL;
    } catch (...) {
        last_error = "unknown failure";
        return IPS_E_INTERNAL;
    }
}

void need(const void* p, const char* what) {
    if (!p) throw ips::Error(ips::E_ARG, std::string(what) + " is null");
}

std::string out_of(const ips_config* c, const char* dir) { return dir ? std::string(dir) : c->c.out_dir; }

}  // namespace

extern "C" {

const char* ips_last_error(void) { return last_error.c_str(); }
const char* ips_version(void) { return "1.0.0"; }

int ips_config_load(const char* path, ips_config** out) {
    return guard([&] {
        need(path, "path");
        need(out, "out");
        *out = nullptr;
        auto c = std::make_unique<ips_config>();
        c->c = ips::load_config(path);
        *out = c.release();
    });
}

int ips_config_parse(const char* text, ips_config** out) {
    return guard([&] {
        need(text, "text");
        need(out, "out");
        *out = nullptr;
        auto c = std::make_unique<ips_config>();
        c->c = ips::parse_config(text);
        *out = c.release();
    });
}

int ips_config_set_grid(ips_config* c, const char* spec) {
    return guard([&] {
        need(c, "config");
        need(spec, "grid spec");
        ips::override_grid(c->c, spec);
    });
}

int ips_config_set_seed(ips_config* c, uint64_t seed) {
    return guard([&] {
        need(c, "config");
        auto j = nlohmann::json::parse(c->c.source_text);
        j["seed"] = seed;
        c->c = ips::parse_config(j.dump());
    });
}

int ips_config_hash(const ips_config* c, uint64_t* out) {
    return guard([&] {
        need(c, "config");
        need(out, "out");
        *out = ips::config_hash(c->c);
    });
}

int ips_config_out_dir(const ips_config* c, const char** out) {
    return guard([&] {
        need(c, "config");
        need(out, "out");
        *out = c->c.out_dir.c_str();
    });
}

void ips_config_free(ips_config* c) { delete c; }

int ips_run_forward(const ips_config* c, int threads, const char* dir) {
    return guard([&] {
        need(c, "config");
        ips::emit_report(ips::run_forward(c->c, threads), out_of(c, dir));
    });
}

int ips_run_needle(const ips_config* c, int threads, const char* dir) {
    return guard([&] {
        need(c, "config");
        if (c->c.needles.empty()) throw ips::Error(ips::E_CONFIG, "config has no needles");
        ips::emit_report(ips::run_needles(c->c, threads), out_of(c, dir));
    });
}

int ips_run_scan(const ips_config* c, int threads, const char* dir) {
    return guard([&] {
        need(c, "config");
        if (c->c.point_sets.empty()) throw ips::Error(ips::E_CONFIG, "config has no points");
        ips::emit_report(ips::run_scan(c->c, threads), out_of(c, dir));
    });
}

int ips_run_classify(const ips_config* c, int threads, const char* dir) {
    return guard([&] {
        need(c, "config");
        if (c->c.classify.points.empty()) throw ips::Error(ips::E_CONFIG, "config has no classify points");
        ips::emit_report(ips::run_classify(c->c, threads), out_of(c, dir));
    });
}

int ips_run_rates(const ips_config* c, int threads, const char* dir) {
    return guard([&] {
        need(c, "config");
        ips::emit_report(ips::run_rates(c->c, threads), out_of(c, dir));
    });
}

int ips_report(const char* dir, int* passed, int* failed) {
    return guard([&] {
        need(dir, "directory");
        namespace fs = std::filesystem;
        std::error_code ec;
        if (!fs::is_directory(dir, ec)) throw ips::Error(ips::E_IO, std::string("no such directory '") + dir + "'");
        std::vector<fs::path> files, subs;
        if (fs::exists(fs::path(dir) / "summary.txt")) files.push_back(fs::path(dir) / "summary.txt");
        for (const auto& e : fs::directory_iterator(dir))
            if (e.is_directory() && fs::exists(e.path() / "summary.txt")) subs.push_back(e.path() / "summary.txt");
        std::sort(subs.begin(), subs.end());
        files.insert(files.end(), subs.begin(), subs.end());
        if (files.empty()) throw ips::Error(ips::E_IO, std::string("no summary.txt under '") + dir + "'");
        int np = 0, nf = 0;
        std::ostringstream os;
        for (const auto& f : files) {
            std::ifstream in(f);
            if (!in) throw ips::Error(ips::E_IO, "cannot read '" + f.string() + "'");
            os << "== " << fs::relative(f.parent_path(), dir).generic_string() << "\n";
            std::string line;
            while (std::getline(in, line)) {
                np += line.rfind("PASS", 0) == 0;
                nf += line.rfind("FAIL", 0) == 0;
                os << line << "\n";
            }
        }
        os << "total PASS " << np << ", FAIL " << nf << "\n";
        std::ofstream o(fs::path(dir) / "report.txt", std::ios::binary);
        if (!(o << os.str())) throw ips::Error(ips::E_IO, "cannot write report.txt");
        if (passed) *passed = np;
        if (failed) *failed = nf;
    });
}

int ips_problem_create(const ips_config* c, ips_problem** out) {
    return guard([&] {
        need(c, "config");
        need(out, "out");
        *out = nullptr;
        auto p = std::make_unique<ips_problem>();
        p->g = ips::build_grid(c->c.ext, c->c.n);
        p->pot = ips::sample_potential(p->g, c->c.obstacle);
        p->op = std::make_unique<ips::SchrodingerOperator>(p->g, p->pot.V, c->c.solver_rtol, c->c.solver_max_iter);
        p->wp = ips::prepare_run(c->c, p->g, *p->op).wp;
        p->quad = c->c.quad;
        *out = p.release();
    });
}

void ips_problem_free(ips_problem* p) { delete p; }

int ips_problem_lambda_min(const ips_problem* p, double* out) {
    return guard([&] {
        need(p, "problem");
        need(out, "out");
        *out = p->wp.lambda_min;
    });
}

int ips_problem_boundary_size(const ips_problem* p, size_t* out) {
    return guard([&] {
        need(p, "problem");
        need(out, "out");
        *out = p->g.n_boundary();
    });
}

int ips_problem_boundary_nodes(const ips_problem* p, double* xyz) {
    return guard([&] {
        need(p, "problem");
        need(xyz, "xyz");
        for (std::size_t b = 0; b < p->g.n_boundary(); ++b) {
            auto q = p->g.pos(p->g.boundary[b]);
            for (int a = 0; a < 3; ++a) xyz[3 * b + a] = q[a];
        }
    });
}

int ips_problem_dtn_pairing(const ips_problem* p, const double* f, const double* g, double* out) {
    return guard([&] {
        need(p, "problem");
        need(f, "f");
        need(g, "g");
        need(out, "out");
        std::size_t nb = p->g.n_boundary();
        *out = ips::dtn_pairing(*p->op, ips::BField(f, f + nb), ips::BField(g, g + nb));
    });
}

int ips_problem_dtn_difference(const ips_problem* p, const double* f, const double* g, double* out) {
    return guard([&] {
        need(p, "problem");
        need(f, "f");
        need(g, "g");
        need(out, "out");
        std::size_t nb = p->g.n_boundary();
        *out = ips::bdot(ips::dtn_difference(*p->op, ips::BField(f, f + nb)), ips::BField(g, g + nb));
    });
}

int ips_problem_indicator(const ips_problem* p, const char* method, const double x[3], double* value,
                          double x_used[3]) {
    return guard([&] {
        need(p, "problem");
        need(method, "method");
        need(x, "x");
        need(value, "value");
        ips::Vec3 q{x[0], x[1], x[2]};
        if (!p->g.inside_open(q)) throw ips::Error(ips::E_ARG, "point is outside the box");
        ips::ProbeFields px(*p->op, ips::snap_probe(p->g, q));
        *value = ips::evaluate_method(*p->op, px, method, p->quad).value;
        if (x_used)
            for (int a = 0; a < 3; ++a) x_used[a] = px.x()[a];
    });
}

}  // extern "C"
