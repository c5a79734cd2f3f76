#pragma once

// Run configuration files (JSON). Field reference: docs/config.md.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mdx/decay.hpp"
#include "mdx/errors.hpp"
#include "mdx/models.hpp"
#include "mdx/montecarlo.hpp"

namespace mdx {

/// Invalid configuration; field() names the offending entry ("model.components[1].hurst").
class ConfigError : public InvalidArgument {
public:
    ConfigError(std::string field, const std::string& message)
        : InvalidArgument(field + ": " + message), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

struct SaddleConfig {
    SymMatrix A;
    Vector q;
    int trials = 1000;
    std::uint64_t seed = 1;
};

struct RunConfig {
    nlohmann::json raw;  ///< effective configuration, echoed into every summary

    std::optional<CovModel> model;
    std::optional<DriftModel> drift;
    std::optional<DomainGrid> grid;
    std::size_t excluded_points = 0;  ///< degenerate grid points dropped on load
    Vector q;
    std::optional<double> u;
    std::vector<double> u_list;

    double delta = 1e-3;
    RateOptions rate;
    McOptions mc;
    Estimator estimator = Estimator::Crude;

    std::optional<RegVarSpec> regvar;
    TSearch t_search;
    std::optional<SaddleConfig> saddle;
};

ScalarKernel parse_kernel(const nlohmann::json& j, const std::string& field);
CovModel parse_model(const nlohmann::json& j, const std::string& field = "model");
DriftModel parse_drift(const nlohmann::json& j, const CovModel& model,
                       const std::string& field = "drift");
DomainGrid parse_grid(const nlohmann::json& j, const std::string& field = "grid");
Matrix parse_matrix(const nlohmann::json& j, const std::string& field);
Vector parse_vector(const nlohmann::json& j, const std::string& field);

/// Parses and validates. Structural checks only; threshold checks that need
/// u are made by validate_for_rate().
RunConfig load_config(const nlohmann::json& j);
RunConfig load_config_file(const std::filesystem::path& path);

/// Requires model, grid, q and either u or u_list; throws ConfigError naming
/// "u" or "u_list" (message includes u0) when some u does not exceed u0.
void validate_for_rate(const RunConfig& cfg, bool need_u_list);

}  // namespace mdx
