#pragma once

#include "cmetric/collocation.hpp"
#include "cmetric/types.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace cmetric::cli {

/// Malformed or inconsistent configuration (exit code 2).
class ConfigError : public Error {
public:
    using Error::Error;
};

struct EllipseConfig {
    PointList anchors;
    double level = 0.01;
    int samples = 64;
};

/// Run configuration. Every field has a default; see README.md for the file
/// format.
struct RunConfig {
    std::string system = "linear-example";
    double kernel_c = 0.9;
    std::optional<Matrix> rhs;   // identity when absent
    GridSpec grid;
    GridSpec check_grid;
    std::optional<GridSpec> eval_grid;   // check grid when absent
    std::vector<double> alphas;
    std::filesystem::path output_dir = "cmetric-out";
    bool regularize = false;
    unsigned threads = 1;
    std::optional<double> probe_spacing;   // grid spacing / 8 when absent
    EllipseConfig ellipses;

    RunConfig();

    const GridSpec& evaluation_grid() const { return eval_grid ? *eval_grid : check_grid; }
    double fill_probe_spacing() const { return probe_spacing ? *probe_spacing : grid.spacing / 8.0; }
};

/// Parses JSON text; unknown keys and wrong types raise ConfigError.
RunConfig parse_config(const std::string& text);

RunConfig load_config(const std::filesystem::path& path);

}  // namespace cmetric::cli
