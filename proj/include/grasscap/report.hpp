#pragma once

#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "grasscap/empirical.hpp"
#include "grasscap/experiments.hpp"

namespace grasscap {

// Shortest round-trip decimal form; byte-stable across runs.
std::string format_double(double value);

// Flat key=value file. Blank lines and '#' comment lines are ignored;
// parse failures name the line number.
std::map<std::string, std::string> parse_config_file(
    const std::filesystem::path& path);

std::vector<double> parse_double_list(const std::string& text);
std::vector<Index> parse_index_list(const std::string& text);

// Closed-form table request: capacity bounds over a sigma2 grid plus DDT
// curves over an r grid.
struct BoundsReport {
  double kappa = 0.5;
  std::vector<double> sigma2_grid;
  Index m = 0;
  Index k = 0;
  std::vector<double> r_grid;
};

// Every writer emits '#'-prefixed key=value metadata naming all parameters
// and the master seed, then plain CSV rows. Identical inputs give identical
// bytes.
void write_bounds_csv(std::ostream& out, const BoundsReport& report);
void write_ddt_csv(std::ostream& out, const SweepConfig& config,
                   const std::vector<SweepRow>& rows);
void write_capacity_csv(std::ostream& out, const SweepConfig& config,
                        const std::vector<SweepRow>& rows);
void write_faces_csv(std::ostream& out, const FaceExperimentConfig& config,
                     const FaceExperimentResult& result,
                     const std::string& source);

}  // namespace grasscap
