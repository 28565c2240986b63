#pragma once

#include <string>
#include <vector>

#include "ellm/agent.hpp"
#include "ellm/harness.hpp"

namespace ellm {

std::string run_dir(const RunConfig& config, std::uint64_t seed);

// Per-seed artifact directory: config.json, episodes.csv, events.jsonl,
// suggestions.jsonl, metrics.json and checkpoint.bin. Returns the checkpoint
// path.
std::string write_run_artifacts(const RunConfig& config, const RunArtifacts& artifacts,
                                const DqnAgent& agent);

// Combined per-episode CSV across seeds (step, episode, unique_achievements,
// intrinsic_return, extrinsic_return) plus the mean +/- std SVG chart.
void write_combined_reports(const RunConfig& config, const std::vector<RunArtifacts>& runs);

void write_episode_csv(const std::string& path, const std::vector<RunArtifacts>& runs);

struct ChartSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> mean;
  std::vector<double> std_dev;
};

// Mean +/- std of unique achievements (or success rate) per episode index
// across a method's seeds.
ChartSeries episode_series(const std::string& label, const std::vector<RunArtifacts>& runs,
                           bool use_success_rate);

// Self-contained SVG line chart with shaded +/- std bands.
void write_svg_chart(const std::string& path, const std::string& title,
                     const std::string& x_label, const std::string& y_label,
                     const std::vector<ChartSeries>& series);

}  // namespace ellm
