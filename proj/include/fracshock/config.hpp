#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fracshock/entropy_check.hpp"
#include "fracshock/estimates.hpp"
#include "fracshock/solver.hpp"

namespace fracshock {

/// Initial profile by name: bump, gaussian, sine, step, tanh or zero.
struct ProfileSpec {
    std::string name = "bump";
    double center = 0.0;
    double width = 1.5;
    double amplitude = 1.0;
    double offset = 0.0;
    double frequency = 1.0;

    Field sample(const Grid& grid) const;
};

struct RunConfig {
    // grid
    std::size_t n_cells = 512;
    double x_min = -4.0;
    double x_max = 4.0;
    Boundary boundary = Boundary::zero_extension;

    // problem
    std::string flux = "burgers";
    double flux_clip = 4.0;
    double flux_speed = 1.0;
    std::string diffusion = "ramp";
    double diffusion_threshold = 0.25;
    double diffusion_slope = 1.0;
    double diffusion_scale = 1.0;
    double diffusion_level = 1.0;
    std::string noise = "geometric";
    double noise_K = 0.25;
    double noise_sigma = 0.5;
    std::size_t noise_modes = 16;
    bool space_dependent = false;
    double noise_center = 0.0;
    double noise_width = 2.0;
    double noise_working_range = 4.0;
    ProfileSpec u0{};
    ProfileSpec v0{"bump", 0.5, 1.0, 0.5, 0.0, 1.0};

    // solver
    SolverConfig solver{};
    bool dt_auto = true;
    double lambda = 0.5;
    double c_lambda = 1.0;

    // experiment
    std::string name;
    std::optional<std::uint64_t> seed;
    std::size_t paths = 16;
    std::size_t snapshots = 10;
    std::vector<double> eps_list{0.0625, 0.03125, 0.015625, 0.0078125};
    std::vector<double> cd_deltas{0.25, 0.125, 0.0625, 0.03125};
    std::vector<double> entropy_deltas{0.05, 0.025};
    std::size_t k_count = 17;
    double k_pad = 0.1;
    double quadrature_dt = 0.01;
    double entropy_r = 0.25;
    double entropy_tol_constant = 1.0;
    double path_quantile = 0.95;
    double contraction_tol = 0.02;
    double slope_tol = 0.05;
    double ci_floor = 0.3;
    double ref_fraction = 0.125;
    std::size_t bootstrap_replicates = 1000;
    std::uint64_t bootstrap_seed = 20240601;
    double tv_tol = 0.02;
    double l1_ratio_limit = 2.0;
    double energy_ratio_limit = 3.0;

    // output
    std::string directory;
    bool write_json = true;
    bool write_csv = true;
    std::size_t field_paths = 1;

    Problem make_problem() const;
    Problem make_problem(const ProfileSpec& initial) const;
    EntropyCheckSpec entropy_spec(const Solver& solver) const;
    RateOptions rate_options() const;
    ViscousLimits viscous_limits() const;
    /// seed, seed + 1, ..., seed + paths - 1.
    std::vector<std::uint64_t> seeds(std::uint64_t base) const;

    /// Every key with its effective value.
    nlohmann::json echo() const;
};

/// Carries every violation found while reading a config.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(std::vector<std::string> messages);
    const std::vector<std::string>& messages() const { return messages_; }

private:
    std::vector<std::string> messages_;
};

/// Parses `section.key = value` lines ('#' starts a comment) and validates
/// the result. Throws ConfigError listing all problems.
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config(const std::string& path);

/// Checks ranges, names and the stability of an explicit dt; returns all violations.
std::vector<std::string> validate_config(const RunConfig& c);

/// Every recognised key.
std::vector<std::string> config_keys();

} // namespace fracshock
