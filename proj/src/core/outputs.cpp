#include "outputs.hpp"
#include "svg.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <fstream>
#include <sstream>
#include <system_error>

namespace mcr::outputs {

using nlohmann::json;

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << text;
    out.flush();
    if (!out) throw IoError("write failed: " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void ensure_directory(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) {
        throw IoError("cannot create directory " + dir.string() + (ec ? ": " + ec.message() : ""));
    }
}

std::string history_csv(const engine::SimState& state) {
    std::string out = "step,total_accessibility,total_travel_time,link_count";
    const int mayors = state.metropolis.mayor_count();
    for (int i = 0; i < mayors; ++i) out += fmt::format(",mayor_{}_accessibility", i);
    out += '\n';
    for (const auto& row : state.history) {
        out += fmt::format("{},{},{},{}", row.step, row.total_accessibility, row.total_travel_time, row.link_count);
        for (double v : row.mayor_objectives) out += fmt::format(",{}", v);
        out += '\n';
    }
    return out;
}

std::string decisions_csv(const engine::SimState& state) {
    std::string out = "step,level,mayor_id,chosen_a,chosen_b,obj_before,obj_after,n_candidates\n";
    for (const auto& d : state.decisions) {
        const bool local = d.who.is_mayor();
        out += fmt::format("{},{},{},{},{},{},{},{}\n", d.step, local ? "local" : "governor", local ? d.who.mayor : -1,
                           d.chosen ? d.chosen->a : -1, d.chosen ? d.chosen->b : -1, d.objective_before,
                           d.objective_after, d.candidate_count);
    }
    return out;
}

std::string cells_csv(const engine::SimState& state) {
    std::string out = "step,cell_id,row,col,territory,workers\n";
    const auto& grid = state.metropolis.grid();
    for (std::size_t h = 0; h < state.history.size() && h < state.worker_snapshots.size(); ++h) {
        const Matrix& w = state.worker_snapshots[h];
        for (std::size_t c = 0; c < w.rows(); ++c) {
            double total = 0.0;
            for (double v : w.row(c)) total += v;
            const int id = static_cast<int>(c);
            out += fmt::format("{},{},{},{},{},{}\n", state.history[h].step, id, grid.row_of(id), grid.col_of(id),
                               state.metropolis.territory(id), total);
        }
    }
    return out;
}

std::string links_csv(const engine::SimState& state) {
    std::string out = "from,to,built_step\n";
    const auto& links = state.network.links();
    for (std::size_t k = 0; k < links.size(); ++k) {
        const int built = k < state.link_built_step.size() ? state.link_built_step[k] : 0;
        out += fmt::format("{},{},{}\n", links[k].from, links[k].to, built);
    }
    return out;
}

namespace {

json matrix_json(const Matrix& m) {
    json rows = json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
        auto row = m.row(r);
        rows.push_back(json(std::vector<double>(row.begin(), row.end())));
    }
    return rows;
}

} // namespace

std::string final_state_json(const engine::RunResult& run) {
    const auto& st = run.state;
    const auto& metro = st.metropolis;
    const auto& grid = metro.grid();

    json links = json::array();
    for (std::size_t k = 0; k < st.network.links().size(); ++k) {
        const auto& l = st.network.links()[k];
        links.push_back({{"from", l.from},
                         {"to", l.to},
                         {"length_km", l.length_km},
                         {"v_link", l.v_link},
                         {"capacity", l.capacity},
                         {"flow", l.flow},
                         {"congested_time", l.congested_time},
                         {"built_step", k < st.link_built_step.size() ? st.link_built_step[k] : 0}});
    }

    json indicators = json::object();
    if (!st.history.empty()) {
        const auto& h = st.history.back();
        indicators = {{"step", h.step},
                      {"total_accessibility", h.total_accessibility},
                      {"total_travel_time", h.total_travel_time},
                      {"link_count", h.link_count},
                      {"mayor_accessibility", h.mayor_objectives},
                      {"furness_residual", h.furness_residual}};
    }

    json doc = {
        {"seed", run.seed},
        {"step", st.step},
        {"config", json::parse(world::config_to_json_text(run.config))},
        {"metropolis",
         {{"rows", grid.rows},
          {"cols", grid.cols},
          {"cell_size_km", grid.cell_size_km},
          {"categories", metro.categories()},
          {"mayors", metro.mayor_count()},
          {"territory", metro.territories()},
          {"workers", matrix_json(metro.workers())},
          {"jobs", matrix_json(metro.jobs())}}},
        {"network", {{"v_local", st.network.v_local()}, {"links", links}}},
        {"travel_times_hours", matrix_json(st.times.hours)},
        {"indicators", indicators},
    };
    return doc.dump(1) + "\n";
}

void write_run_outputs(const engine::RunResult& run, const std::filesystem::path& dir) {
    ensure_directory(dir);
    const auto& st = run.state;
    write_text(dir / "history.csv", history_csv(st));
    write_text(dir / "decisions.csv", decisions_csv(st));
    const std::string cells = cells_csv(st);
    const std::string links = links_csv(st);
    write_text(dir / "cells.csv", cells);
    write_text(dir / "links.csv", links);
    write_text(dir / "final_state.json", final_state_json(run));

    const auto cell_rows = parse_cells_csv(cells);
    const auto link_rows = parse_links_csv(links);
    for (const auto& h : st.history) {
        std::vector<svg::MapCell> map_cells;
        for (const auto& c : cell_rows) {
            if (c.step == h.step) map_cells.push_back({c.cell_id, c.row, c.col, c.territory, c.workers});
        }
        std::vector<svg::MapLink> map_links;
        for (const auto& l : link_rows) {
            if (l.built_step <= h.step) map_links.push_back({l.from, l.to});
        }
        write_text(dir / fmt::format("map_step_{}.svg", h.step),
                   svg::render_map(map_cells, map_links, fmt::format("step {}", h.step)));
    }
}

std::vector<std::vector<std::string>> split_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (header) {
            header = false;
            continue;
        }
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::size_t start = 0;
        for (;;) {
            const auto pos = line.find(',', start);
            fields.push_back(line.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
            if (pos == std::string::npos) break;
            start = pos + 1;
        }
        rows.push_back(std::move(fields));
    }
    return rows;
}

namespace {

void need(const std::vector<std::string>& row, std::size_t n, const char* what) {
    if (row.size() < n) throw std::runtime_error(fmt::format("{}: expected {} fields, got {}", what, n, row.size()));
}

} // namespace

std::vector<CellRow> parse_cells_csv(const std::string& text) {
    std::vector<CellRow> out;
    for (const auto& r : split_csv(text)) {
        need(r, 6, "cells.csv");
        out.push_back({std::stoi(r[0]), std::stoi(r[1]), std::stoi(r[2]), std::stoi(r[3]), std::stoi(r[4]),
                       std::stod(r[5])});
    }
    return out;
}

std::vector<LinkRow> parse_links_csv(const std::string& text) {
    std::vector<LinkRow> out;
    for (const auto& r : split_csv(text)) {
        need(r, 3, "links.csv");
        out.push_back({std::stoi(r[0]), std::stoi(r[1]), std::stoi(r[2])});
    }
    return out;
}

std::vector<HistoryRow> parse_history_csv(const std::string& text) {
    std::vector<HistoryRow> out;
    for (const auto& r : split_csv(text)) {
        need(r, 4, "history.csv");
        out.push_back({std::stoi(r[0]), std::stod(r[1]), std::stod(r[2]), std::stoul(r[3])});
    }
    return out;
}

} // namespace mcr::outputs
