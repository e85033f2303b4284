#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "homogh/ansatz.hpp"
#include "homogh/path_lab.hpp"
#include "homogh/verify.hpp"

namespace homogh {

struct MuConfig {
    std::string kind = "none";          // none | scale | perturb | polynomial
    double parameter = 1.0;
    std::vector<Complex> coeffs;

    bool operator==(const MuConfig&) const = default;
};

struct DataConfig {
    std::string kind = "blaschke";      // blaschke | flat
    std::vector<Complex> targets{{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}};
    int per_vertex = 2;
    bool balance = true;
    std::vector<BlaschkeZero> zeros;    // explicit zeros override targets
    MuConfig mu;
    std::string rho0 = "canonical";     // canonical | linear
    double rho0_a = 0.0, rho0_b = 0.0;  // h = a u + b v for the linear gauge
    double v_multiplier = 1.0;
    double ball_radius = 0.1;

    bool operator==(const DataConfig&) const = default;
};

struct GridConfig {
    int depth = 4;
    int resolution = 41;
    int points = 50;
    double radius = 0.9;
    std::uint64_t seed = 1;
    int beta_grid = 40;
    int contact_samples = 500;
    int curvature_points = 3;
    int curvature_resolution = 5;       // u, v grid of curvature-scan
    std::vector<double> curvature_t{-0.5, 0.0, 0.5};
    double curvature_theta = 0.3;

    bool operator==(const GridConfig&) const = default;
};

struct SweepSettings {
    std::vector<double> ladder{0.9, 0.99, 0.999, 0.9999, 0.99999};
    double floor = 0.05;
    std::vector<std::string> metrics{"sphere", "disc"};

    bool operator==(const SweepSettings&) const = default;
};

struct FingerprintSettings {
    int samples = 100;
    double radius = 0.9;
    std::vector<MuConfig> mus;

    bool operator==(const FingerprintSettings&) const = default;
};

struct Budgets {
    double cr = 1e-8, xi = 1e-5, curl = 1e-4, closed = 1e-4, quaternion = 1e-8, slice = 1e-8,
           structure = 1e-4, beta = 1e-6, riemann_flat = 1e-3, ricci = 1e-4, contact = 1e-4,
           separation = 1e-3;

    bool operator==(const Budgets&) const = default;
};

struct ExperimentConfig {
    DataConfig data;
    GridConfig grid;
    FDConfig fd;
    FDConfig curvature_fd{1e-3, 2, 1e-4};
    Budgets budgets;
    SweepSettings sweep;
    FingerprintSettings fingerprint;
    std::string output = "out";

    bool operator==(const ExperimentConfig&) const = default;

    /// Throws ConfigError on schema or range violations.
    void validate() const;
};

nlohmann::json to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

std::string sha256_hex(const std::string& bytes);
std::string file_sha256(const std::filesystem::path& path);

HolomorphicData build_data(const DataConfig& d);
MuSpec mu_spec(const MuConfig& m);
VerifyConfig verify_config(const ExperimentConfig& cfg);

/// Writes command artifacts under cfg.output and records them in
/// manifest.json there. Returns the process exit code: 0 success, 1 a check
/// failed, 2 configuration error. Diagnostics go to `diag` as key=value lines.
int run_command(const std::string& command, const ExperimentConfig& cfg, std::ostream& diag);

extern const std::vector<std::string> kCommands;

}  // namespace homogh
