#include "config.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace cmetric::cli {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) {
        throw ConfigError(where + " must be an object");
    }
    for (const auto& [key, _] : obj.items()) {
        if (!allowed.count(key)) {
            throw ConfigError("unknown key '" + key + "' in " + where);
        }
    }
}

double number(const json& v, const std::string& where) {
    if (!v.is_number()) {
        throw ConfigError(where + " must be a number");
    }
    return v.get<double>();
}

Vector vector_of(const json& v, const std::string& where) {
    if (!v.is_array() || v.empty()) {
        throw ConfigError(where + " must be a nonempty array of numbers");
    }
    Vector out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
        out[static_cast<Eigen::Index>(i)] = number(v[i], where);
    }
    return out;
}

GridSpec grid_of(const json& v, const std::string& where, const GridSpec& defaults) {
    reject_unknown(v, {"lower", "upper", "spacing", "offset"}, where);
    GridSpec spec = defaults;
    if (v.contains("lower")) spec.lower = vector_of(v["lower"], where + ".lower");
    if (v.contains("upper")) spec.upper = vector_of(v["upper"], where + ".upper");
    if (v.contains("spacing")) spec.spacing = number(v["spacing"], where + ".spacing");
    spec.offset = v.contains("offset") ? number(v["offset"], where + ".offset") : 0.0;
    try {
        grid_shape(spec);
    } catch (const Error& ex) {
        throw ConfigError(where + ": " + ex.what());
    }
    return spec;
}

Matrix matrix_of(const json& v, const std::string& where) {
    if (!v.is_array() || v.empty()) {
        throw ConfigError(where + " must be a nonempty array of rows");
    }
    const auto n = static_cast<Eigen::Index>(v.size());
    Matrix out(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Vector row = vector_of(v[static_cast<std::size_t>(i)], where);
        if (row.size() != n) {
            throw ConfigError(where + " must be square");
        }
        out.row(i) = row.transpose();
    }
    return out;
}

GridSpec square(double lo, double hi, double spacing, double offset) {
    GridSpec spec;
    spec.lower = Vector::Constant(2, lo);
    spec.upper = Vector::Constant(2, hi);
    spec.spacing = spacing;
    spec.offset = offset;
    return spec;
}

}  // namespace

RunConfig::RunConfig()
    : grid(square(-1.0, 1.0, 0.125, 0.0)),
      check_grid(square(-1.0, 1.0, 1.0 / 64.0, 1.0 / 128.0)),
      alphas{0.5, 0.25, 0.125, 0.0625, 0.03125} {
    ellipses.anchors.push_back(Vector::Zero(2));
}

RunConfig parse_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& ex) {
        throw ConfigError(std::string("config is not valid JSON: ") + ex.what());
    }
    reject_unknown(root,
                   {"system", "kernel", "rhs", "grid", "check_grid", "eval_grid", "alphas",
                    "output_dir", "regularize", "threads", "probe_spacing", "ellipses"},
                   "config");

    RunConfig cfg;
    if (root.contains("system")) {
        if (!root["system"].is_string()) throw ConfigError("system must be a string");
        cfg.system = root["system"].get<std::string>();
    }
    if (root.contains("kernel")) {
        reject_unknown(root["kernel"], {"c"}, "kernel");
        if (root["kernel"].contains("c")) cfg.kernel_c = number(root["kernel"]["c"], "kernel.c");
        if (!(cfg.kernel_c > 0.0)) throw ConfigError("kernel.c must be positive");
    }
    if (root.contains("rhs")) cfg.rhs = matrix_of(root["rhs"], "rhs");
    if (root.contains("grid")) cfg.grid = grid_of(root["grid"], "grid", cfg.grid);
    if (root.contains("check_grid")) {
        cfg.check_grid = grid_of(root["check_grid"], "check_grid", cfg.check_grid);
    }
    if (root.contains("eval_grid")) cfg.eval_grid = grid_of(root["eval_grid"], "eval_grid", cfg.check_grid);
    if (root.contains("alphas")) {
        const Vector a = vector_of(root["alphas"], "alphas");
        cfg.alphas.assign(a.begin(), a.end());
        for (std::size_t t = 0; t < cfg.alphas.size(); ++t) {
            if (!(cfg.alphas[t] > 0.0) || (t > 0 && !(cfg.alphas[t] < cfg.alphas[t - 1]))) {
                throw ConfigError("alphas must be positive and strictly decreasing");
            }
        }
    }
    if (root.contains("output_dir")) {
        if (!root["output_dir"].is_string()) throw ConfigError("output_dir must be a string");
        cfg.output_dir = root["output_dir"].get<std::string>();
    }
    if (root.contains("regularize")) {
        if (!root["regularize"].is_boolean()) throw ConfigError("regularize must be a boolean");
        cfg.regularize = root["regularize"].get<bool>();
    }
    if (root.contains("threads")) {
        if (!root["threads"].is_number_unsigned() || root["threads"].get<unsigned>() == 0) {
            throw ConfigError("threads must be a positive integer");
        }
        cfg.threads = root["threads"].get<unsigned>();
    }
    if (root.contains("probe_spacing")) {
        cfg.probe_spacing = number(root["probe_spacing"], "probe_spacing");
        if (!(*cfg.probe_spacing > 0.0)) throw ConfigError("probe_spacing must be positive");
    }
    if (root.contains("ellipses")) {
        const auto& e = root["ellipses"];
        reject_unknown(e, {"anchors", "level", "samples"}, "ellipses");
        if (e.contains("anchors")) {
            if (!e["anchors"].is_array()) throw ConfigError("ellipses.anchors must be an array");
            cfg.ellipses.anchors.clear();
            for (const auto& a : e["anchors"]) {
                cfg.ellipses.anchors.push_back(vector_of(a, "ellipses.anchors"));
            }
        }
        if (e.contains("level")) cfg.ellipses.level = number(e["level"], "ellipses.level");
        if (e.contains("samples")) {
            if (!e["samples"].is_number_integer() || e["samples"].get<int>() < 1) {
                throw ConfigError("ellipses.samples must be a positive integer");
            }
            cfg.ellipses.samples = e["samples"].get<int>();
        }
        if (!(cfg.ellipses.level > 0.0)) throw ConfigError("ellipses.level must be positive");
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path.string() + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

}  // namespace cmetric::cli
