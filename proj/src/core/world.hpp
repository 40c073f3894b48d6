#pragma once

#include "matrix.hpp"

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace mcr::world {

/// Raised for any invalid scenario parameter. `field()` names the offending
/// key using the JSON spelling (e.g. "xi", "centers[1].category_mix").
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& message)
        : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

/// Position in cell coordinates; (0,0) is the centroid of the top-left cell.
struct CellCoord {
    double row = 0.0;
    double col = 0.0;
};

struct CenterSpec {
    CellCoord position;
    double amplitude = 1.0;          // workers per cell at the peak, before scaling
    double gradient = 0.35;          // 1/km
    double job_share = 1.0;          // relative job weight of this center
    std::vector<double> category_mix; // S entries summing to 1
};

struct FurnessParams {
    double tolerance = 1e-8;
    int max_iter = 1000;
};

/// Regional link given by the user (pre-seeded network or JSON edge list).
struct LinkSpec {
    int from = 0;
    int to = 0;
    double capacity = 0.0;
    double v_link = 0.0;
};

struct ScenarioConfig {
    int grid_rows = 10;
    int grid_cols = 10;
    double cell_size_km = 2.0;
    int categories = 2;
    std::vector<CenterSpec> centers;

    double lambda = 1.0; // distribution distance aversion, 1/h
    double nu = 0.5;     // accessibility decay, 1/h
    double gamma = 0.5;
    double mu = 0.05;
    double xi = 0.5;
    Matrix m;       // S×S worker proximity exponents
    Matrix m_prime; // S×S job proximity exponents

    double relocation_fraction = 0.1;
    bool landuse_enabled = true;
    int steps = 6;

    double v_local = 20.0;  // km/h
    double v_link = 60.0;   // km/h
    double capacity = 1500; // veh/step
    double bpr_alpha = 0.15;
    double bpr_beta = 4.0;
    FurnessParams furness;
    int assignment_iterations = 4;

    double total_workers = 10000.0;
    double total_jobs = 10000.0;
    int network_extension_radius = 3;
    bool congestion_in_evaluation = false;
    std::vector<double> mayor_weight_override; // empty: weights are job counts
    std::vector<LinkSpec> initial_links;
};

/// Built-in two-city scenario (10×10, S=2, unequal centers).
ScenarioConfig default_config();

/// Throws ConfigError naming the first offending field.
void validate(const ScenarioConfig& config);

ScenarioConfig config_from_json_text(const std::string& text);
ScenarioConfig load_config(const std::string& path);

/// JSON edge list `[{"from","to","capacity","v_link"}, ...]`.
std::vector<LinkSpec> link_list_from_json_text(const std::string& text);
std::string link_list_to_json_text(const std::vector<LinkSpec>& links);
std::string config_to_json_text(const ScenarioConfig& config);

struct Grid {
    int rows = 0;
    int cols = 0;
    double cell_size_km = 1.0;

    std::size_t size() const { return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols); }
    int row_of(int cell) const { return cell / cols; }
    int col_of(int cell) const { return cell % cols; }
    int cell_at(int row, int col) const { return row * cols + col; }

    /// Euclidean centroid distance.
    double distance_km(int a, int b) const;
    double distance_km(int cell, const CellCoord& p) const;
    /// Chebyshev distance in cells.
    int chebyshev(int a, int b) const;

    friend bool operator==(const Grid&, const Grid&) = default;
};

struct Cell {
    int id = 0;
    int row = 0;
    int col = 0;
    std::vector<double> workers;
    std::vector<double> jobs;
    int territory = 0;
};

/// The closed metropolis: per-cell, per-category worker and job counts and
/// the fixed partition into mayor territories.
class Metropolis {
public:
    Metropolis() = default;
    Metropolis(Grid grid, int categories, int mayors);

    const Grid& grid() const { return grid_; }
    std::size_t size() const { return grid_.size(); }
    int categories() const { return categories_; }
    int mayor_count() const { return mayors_; }

    Matrix& workers() { return workers_; }
    const Matrix& workers() const { return workers_; }
    Matrix& jobs() { return jobs_; }
    const Matrix& jobs() const { return jobs_; }

    int territory(int cell) const { return territory_[static_cast<std::size_t>(cell)]; }
    const std::vector<int>& territories() const { return territory_; }
    void set_territories(std::vector<int> territory);
    std::vector<int> territory_cells(int mayor) const;

    double total_workers(int category) const { return workers_.column_sum(static_cast<std::size_t>(category)); }
    double total_jobs(int category) const { return jobs_.column_sum(static_cast<std::size_t>(category)); }

    Cell cell(int id) const;

    friend bool operator==(const Metropolis&, const Metropolis&) = default;

private:
    Grid grid_;
    int categories_ = 0;
    int mayors_ = 0;
    Matrix workers_; // N×S
    Matrix jobs_;    // N×S
    std::vector<int> territory_;
};

Grid grid_of(const ScenarioConfig& config);

/// Heikkila polycentric density Σ_i A_i exp(-b_i d_i) at a cell.
double raw_density(const Grid& grid, const std::vector<CenterSpec>& centers, int cell);

/// Places workers and jobs by the polycentric exponential law and assigns
/// territories. Throws ConfigError when the raw density sums to zero.
Metropolis init_metropolis(const ScenarioConfig& config, double total_workers, double total_jobs);

/// Nearest-center partition; ties go to the lowest center index.
void assign_territories(Metropolis& metropolis, const std::vector<CenterSpec>& centers);

/// Y_i: total jobs (all categories) in each mayor's territory.
std::vector<double> mayor_weights(const Metropolis& metropolis);

} // namespace mcr::world
