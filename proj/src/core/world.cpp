#include "world.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace mcr::world {

using nlohmann::json;

double Grid::distance_km(int a, int b) const {
    const double dr = row_of(a) - row_of(b);
    const double dc = col_of(a) - col_of(b);
    return std::hypot(dr, dc) * cell_size_km;
}

double Grid::distance_km(int cell, const CellCoord& p) const {
    return std::hypot(row_of(cell) - p.row, col_of(cell) - p.col) * cell_size_km;
}

int Grid::chebyshev(int a, int b) const {
    return std::max(std::abs(row_of(a) - row_of(b)), std::abs(col_of(a) - col_of(b)));
}

Metropolis::Metropolis(Grid grid, int categories, int mayors)
    : grid_(grid),
      categories_(categories),
      mayors_(mayors),
      workers_(grid.size(), static_cast<std::size_t>(categories)),
      jobs_(grid.size(), static_cast<std::size_t>(categories)),
      territory_(grid.size(), 0) {}

void Metropolis::set_territories(std::vector<int> territory) {
    if (territory.size() != size()) throw std::invalid_argument("territory vector size mismatch");
    for (int t : territory) {
        if (t < 0 || t >= mayors_) throw std::invalid_argument("territory id out of range");
    }
    territory_ = std::move(territory);
}

std::vector<int> Metropolis::territory_cells(int mayor) const {
    std::vector<int> cells;
    for (std::size_t c = 0; c < territory_.size(); ++c) {
        if (territory_[c] == mayor) cells.push_back(static_cast<int>(c));
    }
    return cells;
}

Cell Metropolis::cell(int id) const {
    Cell c;
    c.id = id;
    c.row = grid_.row_of(id);
    c.col = grid_.col_of(id);
    auto w = workers_.row(static_cast<std::size_t>(id));
    auto j = jobs_.row(static_cast<std::size_t>(id));
    c.workers.assign(w.begin(), w.end());
    c.jobs.assign(j.begin(), j.end());
    c.territory = territory(id);
    return c;
}

Grid grid_of(const ScenarioConfig& config) {
    return Grid{config.grid_rows, config.grid_cols, config.cell_size_km};
}

double raw_density(const Grid& grid, const std::vector<CenterSpec>& centers, int cell) {
    double rho = 0.0;
    for (const auto& center : centers) {
        rho += center.amplitude * std::exp(-center.gradient * grid.distance_km(cell, center.position));
    }
    return rho;
}

Metropolis init_metropolis(const ScenarioConfig& config, double total_workers, double total_jobs) {
    validate(config);
    const Grid grid = grid_of(config);
    const auto S = static_cast<std::size_t>(config.categories);
    Metropolis metro(grid, config.categories, static_cast<int>(config.centers.size()));

    double worker_mass = 0.0;
    double job_mass = 0.0;
    for (std::size_t c = 0; c < grid.size(); ++c) {
        for (const auto& center : config.centers) {
            const double base = center.amplitude
                * std::exp(-center.gradient * grid.distance_km(static_cast<int>(c), center.position));
            for (std::size_t s = 0; s < S; ++s) {
                metro.workers()(c, s) += base * center.category_mix[s];
                metro.jobs()(c, s) += base * center.job_share * center.category_mix[s];
            }
        }
        worker_mass += metro.workers().row_sum(c);
        job_mass += metro.jobs().row_sum(c);
    }
    if (!(worker_mass > 0.0) || !std::isfinite(worker_mass)) {
        throw ConfigError("centers", "total raw worker density is zero");
    }
    if (total_jobs > 0.0 && (!(job_mass > 0.0) || !std::isfinite(job_mass))) {
        throw ConfigError("centers", "total raw job density is zero (all job_share are 0)");
    }

    const double wscale = total_workers / worker_mass;
    const double jscale = job_mass > 0.0 ? total_jobs / job_mass : 0.0;
    for (double& v : metro.workers().values()) v *= wscale;
    for (double& v : metro.jobs().values()) v *= jscale;

    assign_territories(metro, config.centers);
    return metro;
}

void assign_territories(Metropolis& metropolis, const std::vector<CenterSpec>& centers) {
    const Grid& grid = metropolis.grid();
    std::vector<int> territory(grid.size(), 0);
    for (std::size_t c = 0; c < grid.size(); ++c) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < centers.size(); ++i) {
            const double d = grid.distance_km(static_cast<int>(c), centers[i].position);
            if (d < best) {
                best = d;
                territory[c] = static_cast<int>(i);
            }
        }
    }
    metropolis.set_territories(std::move(territory));
}

std::vector<double> mayor_weights(const Metropolis& metropolis) {
    std::vector<double> y(static_cast<std::size_t>(metropolis.mayor_count()), 0.0);
    for (std::size_t c = 0; c < metropolis.size(); ++c) {
        y[static_cast<std::size_t>(metropolis.territory(static_cast<int>(c)))] += metropolis.jobs().row_sum(c);
    }
    return y;
}

ScenarioConfig default_config() {
    ScenarioConfig cfg;
    // Mayor 0 is the minor city (east), mayor 1 the major city (west).
    CenterSpec minor;
    minor.position = {4.5, 6.0};
    minor.amplitude = 1.0;
    minor.category_mix = {0.5, 0.5};
    CenterSpec major = minor;
    major.position = {4.5, 3.0};
    major.amplitude = 6.0;
    cfg.centers = {minor, major};

    cfg.m = Matrix(2, 2);
    cfg.m(0, 0) = -0.2;
    cfg.m(0, 1) = 0.1;
    cfg.m(1, 0) = 0.1;
    cfg.m(1, 1) = -0.2;
    cfg.m_prime = Matrix(2, 2);
    cfg.m_prime(0, 0) = 0.2;
    cfg.m_prime(1, 1) = 0.2;
    return cfg;
}

// --- validation -----------------------------------------------------------

namespace {

void require(bool ok, const std::string& field, const std::string& message) {
    if (!ok) throw ConfigError(field, message);
}

bool finite(double v) { return std::isfinite(v); }

void require_unit(double v, const std::string& field) {
    require(finite(v) && v >= 0.0 && v <= 1.0, field, "must lie in [0, 1]");
}

void require_nonneg(double v, const std::string& field) {
    require(finite(v) && v >= 0.0, field, "must be a finite nonnegative number");
}

void require_positive(double v, const std::string& field) {
    require(finite(v) && v > 0.0, field, "must be a finite positive number");
}

} // namespace

void validate(const ScenarioConfig& c) {
    require(c.grid_rows > 0, "grid_rows", "must be a positive integer");
    require(c.grid_cols > 0, "grid_cols", "must be a positive integer");
    require_positive(c.cell_size_km, "cell_size_km");
    require(c.categories >= 1, "categories", "must be >= 1");
    require(!c.centers.empty(), "centers", "at least one center is required");
    const auto S = static_cast<std::size_t>(c.categories);
    for (std::size_t i = 0; i < c.centers.size(); ++i) {
        const auto& ctr = c.centers[i];
        const std::string base = "centers[" + std::to_string(i) + "]";
        require(finite(ctr.position.row) && finite(ctr.position.col) && ctr.position.row >= 0.0
                    && ctr.position.col >= 0.0 && ctr.position.row <= c.grid_rows - 1
                    && ctr.position.col <= c.grid_cols - 1,
                base + ".position", "must lie inside the grid");
        require_positive(ctr.amplitude, base + ".amplitude");
        require_positive(ctr.gradient, base + ".gradient");
        require_nonneg(ctr.job_share, base + ".job_share");
        require(ctr.category_mix.size() == S, base + ".category_mix", "must have one entry per category");
        double sum = 0.0;
        for (double v : ctr.category_mix) {
            require_nonneg(v, base + ".category_mix");
            sum += v;
        }
        require(std::abs(sum - 1.0) <= 1e-9, base + ".category_mix", "must sum to 1");
    }
    require_nonneg(c.lambda, "lambda");
    require_nonneg(c.nu, "nu");
    require_unit(c.gamma, "gamma");
    require_nonneg(c.mu, "mu");
    require_unit(c.xi, "xi");
    require(c.m.rows() == S && c.m.cols() == S, "m", "must be an S x S matrix");
    require(c.m_prime.rows() == S && c.m_prime.cols() == S, "m_prime", "must be an S x S matrix");
    for (double v : c.m.values()) require(finite(v), "m", "entries must be finite");
    for (double v : c.m_prime.values()) require(finite(v), "m_prime", "entries must be finite");
    require_unit(c.relocation_fraction, "relocation_fraction");
    require(c.steps >= 0, "steps", "must be a nonnegative integer");
    require_positive(c.v_local, "v_local");
    require_positive(c.v_link, "v_link");
    require_positive(c.capacity, "capacity");
    require_nonneg(c.bpr_alpha, "bpr_alpha");
    require_nonneg(c.bpr_beta, "bpr_beta");
    require_positive(c.furness.tolerance, "furness.tolerance");
    require(c.furness.max_iter >= 1, "furness.max_iter", "must be >= 1");
    require(c.assignment_iterations >= 1, "assignment_iterations", "must be >= 1");
    require_nonneg(c.total_workers, "total_workers");
    require_nonneg(c.total_jobs, "total_jobs");
    require(c.network_extension_radius >= 1, "network_extension_radius", "must be >= 1");
    if (!c.mayor_weight_override.empty()) {
        require(c.mayor_weight_override.size() == c.centers.size(), "mayor_weight_override",
                "must have one entry per center");
        for (double v : c.mayor_weight_override) require_nonneg(v, "mayor_weight_override");
    }
    const int n = c.grid_rows * c.grid_cols;
    std::set<std::pair<int, int>> seen;
    for (std::size_t i = 0; i < c.initial_links.size(); ++i) {
        const auto& l = c.initial_links[i];
        const std::string base = "initial_links[" + std::to_string(i) + "]";
        require(l.from >= 0 && l.from < n && l.to >= 0 && l.to < n, base, "endpoint outside the grid");
        require(l.from != l.to, base, "self loop");
        require_positive(l.capacity, base + ".capacity");
        require_positive(l.v_link, base + ".v_link");
        require(seen.insert(std::minmax(l.from, l.to)).second, base, "duplicate link");
    }
}

// --- JSON -------------------------------------------------------------------

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where.empty() ? "<root>" : where, "must be a JSON object");
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.count(key)) {
            throw ConfigError(where.empty() ? key : where + "." + key, "unknown key");
        }
    }
}

template <typename T>
void read(const json& obj, const char* key, T& out, const std::string& where = {}) {
    auto it = obj.find(key);
    if (it == obj.end()) return;
    const std::string field = where.empty() ? key : where + "." + key;
    try {
        if constexpr (std::is_same_v<T, bool>) {
            if (!it->is_boolean()) throw ConfigError(field, "must be a boolean");
        } else if constexpr (std::is_integral_v<T>) {
            if (!it->is_number_integer()) throw ConfigError(field, "must be an integer");
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!it->is_number()) throw ConfigError(field, "must be a number");
        }
        out = it->template get<T>();
    } catch (const json::exception&) {
        throw ConfigError(field, "has the wrong type");
    }
}

Matrix read_matrix(const json& value, const std::string& field) {
    if (!value.is_array()) throw ConfigError(field, "must be an array of rows");
    const std::size_t rows = value.size();
    const std::size_t cols = rows ? value[0].size() : 0;
    Matrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        if (!value[r].is_array() || value[r].size() != cols) throw ConfigError(field, "ragged matrix");
        for (std::size_t c = 0; c < cols; ++c) {
            if (!value[r][c].is_number()) throw ConfigError(field, "entries must be numbers");
            m(r, c) = value[r][c].get<double>();
        }
    }
    return m;
}

json write_matrix(const Matrix& m) {
    json rows = json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
        auto row = m.row(r);
        rows.push_back(std::vector<double>(row.begin(), row.end()));
    }
    return rows;
}

std::vector<double> read_vector(const json& value, const std::string& field) {
    if (!value.is_array()) throw ConfigError(field, "must be an array of numbers");
    std::vector<double> out;
    for (const auto& v : value) {
        if (!v.is_number()) throw ConfigError(field, "must be an array of numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

CenterSpec read_center(const json& obj, const std::string& where) {
    reject_unknown(obj, {"position", "amplitude", "gradient", "job_share", "category_mix"}, where);
    CenterSpec c;
    if (auto it = obj.find("position"); it != obj.end()) {
        reject_unknown(*it, {"row", "col"}, where + ".position");
        read(*it, "row", c.position.row, where + ".position");
        read(*it, "col", c.position.col, where + ".position");
    } else {
        throw ConfigError(where + ".position", "is required");
    }
    read(obj, "amplitude", c.amplitude, where);
    read(obj, "gradient", c.gradient, where);
    read(obj, "job_share", c.job_share, where);
    if (auto it = obj.find("category_mix"); it != obj.end()) {
        c.category_mix = read_vector(*it, where + ".category_mix");
    }
    return c;
}

} // namespace

namespace {

std::vector<LinkSpec> links_from_json(const json& value, const std::string& where) {
    if (!value.is_array()) throw ConfigError(where, "must be an array of links");
    std::vector<LinkSpec> links;
    for (std::size_t i = 0; i < value.size(); ++i) {
        const std::string f = where + "[" + std::to_string(i) + "]";
        reject_unknown(value[i], {"from", "to", "capacity", "v_link"}, f);
        LinkSpec l;
        read(value[i], "from", l.from, f);
        read(value[i], "to", l.to, f);
        read(value[i], "capacity", l.capacity, f);
        read(value[i], "v_link", l.v_link, f);
        links.push_back(l);
    }
    return links;
}

json links_to_json(const std::vector<LinkSpec>& links) {
    json out = json::array();
    for (const auto& l : links) {
        out.push_back({{"from", l.from}, {"to", l.to}, {"capacity", l.capacity}, {"v_link", l.v_link}});
    }
    return out;
}

} // namespace

std::vector<LinkSpec> link_list_from_json_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("<links>", std::string("malformed JSON: ") + e.what());
    }
    return links_from_json(doc, "links");
}

std::string link_list_to_json_text(const std::vector<LinkSpec>& links) { return links_to_json(links).dump(2); }

ScenarioConfig config_from_json_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("<document>", std::string("malformed JSON: ") + e.what());
    }
    reject_unknown(doc,
                   {"grid_rows", "grid_cols", "cell_size_km", "categories", "centers", "lambda", "nu", "gamma",
                    "mu", "xi", "m", "m_prime", "relocation_fraction", "landuse_enabled", "steps", "v_local",
                    "v_link", "capacity", "bpr_alpha", "bpr_beta", "furness", "assignment_iterations",
                    "total_workers", "total_jobs", "network_extension_radius", "congestion_in_evaluation",
                    "mayor_weight_override", "initial_links"},
                   "");

    ScenarioConfig cfg = default_config();
    read(doc, "grid_rows", cfg.grid_rows);
    read(doc, "grid_cols", cfg.grid_cols);
    read(doc, "cell_size_km", cfg.cell_size_km);
    read(doc, "categories", cfg.categories);
    if (auto it = doc.find("centers"); it != doc.end()) {
        if (!it->is_array()) throw ConfigError("centers", "must be an array");
        cfg.centers.clear();
        for (std::size_t i = 0; i < it->size(); ++i) {
            cfg.centers.push_back(read_center((*it)[i], "centers[" + std::to_string(i) + "]"));
        }
    }
    read(doc, "lambda", cfg.lambda);
    read(doc, "nu", cfg.nu);
    read(doc, "gamma", cfg.gamma);
    read(doc, "mu", cfg.mu);
    read(doc, "xi", cfg.xi);
    if (auto it = doc.find("m"); it != doc.end()) cfg.m = read_matrix(*it, "m");
    if (auto it = doc.find("m_prime"); it != doc.end()) cfg.m_prime = read_matrix(*it, "m_prime");
    read(doc, "relocation_fraction", cfg.relocation_fraction);
    read(doc, "landuse_enabled", cfg.landuse_enabled);
    read(doc, "steps", cfg.steps);
    read(doc, "v_local", cfg.v_local);
    read(doc, "v_link", cfg.v_link);
    read(doc, "capacity", cfg.capacity);
    read(doc, "bpr_alpha", cfg.bpr_alpha);
    read(doc, "bpr_beta", cfg.bpr_beta);
    if (auto it = doc.find("furness"); it != doc.end()) {
        reject_unknown(*it, {"tolerance", "max_iter"}, "furness");
        read(*it, "tolerance", cfg.furness.tolerance, "furness");
        read(*it, "max_iter", cfg.furness.max_iter, "furness");
    }
    read(doc, "assignment_iterations", cfg.assignment_iterations);
    read(doc, "total_workers", cfg.total_workers);
    read(doc, "total_jobs", cfg.total_jobs);
    read(doc, "network_extension_radius", cfg.network_extension_radius);
    read(doc, "congestion_in_evaluation", cfg.congestion_in_evaluation);
    if (auto it = doc.find("mayor_weight_override"); it != doc.end()) {
        cfg.mayor_weight_override = read_vector(*it, "mayor_weight_override");
    }
    if (auto it = doc.find("initial_links"); it != doc.end()) {
        cfg.initial_links = links_from_json(*it, "initial_links");
    }

    // A category count change invalidates the built-in S=2 defaults.
    const auto S = static_cast<std::size_t>(std::max(cfg.categories, 0));
    if (!doc.contains("m") && cfg.m.rows() != S) cfg.m = Matrix(S, S);
    if (!doc.contains("m_prime") && cfg.m_prime.rows() != S) cfg.m_prime = Matrix(S, S);
    for (auto& c : cfg.centers) {
        const bool fill = c.category_mix.empty() || (!doc.contains("centers") && c.category_mix.size() != S);
        if (fill) c.category_mix.assign(S, S ? 1.0 / static_cast<double>(S) : 0.0);
    }

    validate(cfg);
    return cfg;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::ios_base::failure("cannot open config file " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return config_from_json_text(buffer.str());
}

std::string config_to_json_text(const ScenarioConfig& c) {
    json centers = json::array();
    for (const auto& ctr : c.centers) {
        centers.push_back({{"position", {{"row", ctr.position.row}, {"col", ctr.position.col}}},
                           {"amplitude", ctr.amplitude},
                           {"gradient", ctr.gradient},
                           {"job_share", ctr.job_share},
                           {"category_mix", ctr.category_mix}});
    }
    json links = links_to_json(c.initial_links);
    json doc = {{"grid_rows", c.grid_rows},
                {"grid_cols", c.grid_cols},
                {"cell_size_km", c.cell_size_km},
                {"categories", c.categories},
                {"centers", centers},
                {"lambda", c.lambda},
                {"nu", c.nu},
                {"gamma", c.gamma},
                {"mu", c.mu},
                {"xi", c.xi},
                {"m", write_matrix(c.m)},
                {"m_prime", write_matrix(c.m_prime)},
                {"relocation_fraction", c.relocation_fraction},
                {"landuse_enabled", c.landuse_enabled},
                {"steps", c.steps},
                {"v_local", c.v_local},
                {"v_link", c.v_link},
                {"capacity", c.capacity},
                {"bpr_alpha", c.bpr_alpha},
                {"bpr_beta", c.bpr_beta},
                {"furness", {{"tolerance", c.furness.tolerance}, {"max_iter", c.furness.max_iter}}},
                {"assignment_iterations", c.assignment_iterations},
                {"total_workers", c.total_workers},
                {"total_jobs", c.total_jobs},
                {"network_extension_radius", c.network_extension_radius},
                {"congestion_in_evaluation", c.congestion_in_evaluation},
                {"mayor_weight_override", c.mayor_weight_override},
                {"initial_links", links}};
    return doc.dump(2);
}

} // namespace mcr::world
