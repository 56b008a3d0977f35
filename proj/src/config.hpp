#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "indicators.hpp"
#include "needle.hpp"
#include "potential.hpp"

namespace ips {

// a straight approach toward a target point: x = target + d * direction
struct ApproachLine {
    std::string name;
    Vec3 target{};
    Vec3 direction{};
    std::vector<double> distances;  // decreasing
};

struct PointSet {
    std::string name;
    std::vector<Vec3> points;
    std::vector<double> distances;  // filled for lines, used by the rate fits
    Vec3 target{};                  // line target
    bool is_line = false;
};

struct NeedleDesc {
    Vec3 entry{};
    std::vector<Vec3> waypoints;
    Vec3 tip{};
};

struct ClassifyConfig {
    std::vector<Vec3> points;
    std::vector<std::string> methods{"probe"};
    std::vector<int> components{0};  // 0-based
    int needles_per_point = 3;
    double angle_deg = 35.0;
};

struct ExperimentConfig {
    std::string name = "experiment";
    Vec3 ext{1, 1, 1};
    std::array<int, 3> n{32, 32, 32};
    ObstacleSpec obstacle;
    double solver_rtol = 1e-13;
    int solver_max_iter = 1000;
    double wellposed_floor = 1e-2;
    IndicatorOptions quad;
    std::vector<std::string> methods{"probe", "ssm", "cim"};
    std::vector<PointSet> point_sets;
    std::vector<NeedleDesc> needles;
    NeedleParams needle_params;
    ClassifyConfig classify;
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    std::string cache_dir;  // DtN cache for the forward command; empty disables it
    std::string source_text;  // canonical JSON echo
};

// all scan methods understood by run_scan
const std::vector<std::string>& scan_method_names();

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);
// replaces the grid size, "32" or "32x32x48"
void override_grid(ExperimentConfig& c, const std::string& spec);
std::uint64_t config_hash(const ExperimentConfig& c);

}  // namespace ips
