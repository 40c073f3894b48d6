#pragma once

#include "engine.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace mcr::outputs {

/// File system failure while writing or reading run artifacts.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);
void ensure_directory(const std::filesystem::path& dir);

/// step,total_accessibility,total_travel_time,link_count,mayor_0_accessibility,...
std::string history_csv(const engine::SimState& state);
/// step,level,mayor_id,chosen_a,chosen_b,obj_before,obj_after,n_candidates
std::string decisions_csv(const engine::SimState& state);
/// step,cell_id,row,col,territory,workers (one block per history row)
std::string cells_csv(const engine::SimState& state);
/// from,to,built_step
std::string links_csv(const engine::SimState& state);
/// Full metropolis + network dump with the last indicator row.
std::string final_state_json(const engine::RunResult& run);

/// Writes history.csv, decisions.csv, cells.csv, links.csv, final_state.json
/// and map_step_{k}.svg for every recorded step.
void write_run_outputs(const engine::RunResult& run, const std::filesystem::path& dir);

// Parsed CSV rows, enough to regenerate the plots.
struct CellRow {
    int step = 0;
    int cell_id = 0;
    int row = 0;
    int col = 0;
    int territory = 0;
    double workers = 0.0;
};
struct LinkRow {
    int from = 0;
    int to = 0;
    int built_step = 0;
};
struct HistoryRow {
    int step = 0;
    double total_accessibility = 0.0;
    double total_travel_time = 0.0;
    std::size_t link_count = 0;
};

std::vector<CellRow> parse_cells_csv(const std::string& text);
std::vector<LinkRow> parse_links_csv(const std::string& text);
std::vector<HistoryRow> parse_history_csv(const std::string& text);

/// Splits simple comma-separated text (no quoting) into rows, skipping the header.
std::vector<std::vector<std::string>> split_csv(const std::string& text);

} // namespace mcr::outputs
