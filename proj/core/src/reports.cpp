#include "ellm/reports.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "ellm/env.hpp"
#include "ellm/errors.hpp"

namespace ellm {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string format_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.9g", value);
  return buffer;
}

json metric_to_json(const MetricSummary& m) {
  return json{
      {"mean", m.mean}, {"median", m.median}, {"iqm", m.iqm}, {"trial_means", m.trial_means}};
}

}  // namespace

std::string run_dir(const RunConfig& config, std::uint64_t seed) {
  return config.out_dir + "/" + to_string(config.method) +
         (config.transfer_mode != "none" ? "_" + config.transfer_mode + "_" + config.task : "") +
         "_seed" + std::to_string(seed);
}

void write_episode_csv(const std::string& path, const std::vector<RunArtifacts>& runs) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ConfigError("cannot write episode csv: " + path);
  out << "step,episode,unique_achievements,intrinsic_return,extrinsic_return\n";
  for (const auto& run : runs) {
    for (const auto& row : run.episodes) {
      out << row.step << ',' << row.episode << ',' << row.unique_achievements << ','
          << format_double(row.intrinsic_return) << ',' << format_double(row.extrinsic_return)
          << '\n';
    }
  }
}

std::string write_run_artifacts(const RunConfig& config, const RunArtifacts& artifacts,
                                const DqnAgent& agent) {
  const std::string dir = run_dir(config, artifacts.seed);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create run directory " + dir + ": " + ec.message());

  {
    std::ofstream out(dir + "/config.json", std::ios::trunc);
    out << config.to_json() << "\n";
  }
  write_episode_csv(dir + "/episodes.csv", {artifacts});
  {
    std::ofstream out(dir + "/events.jsonl", std::ios::trunc);
    for (const auto& event : artifacts.rewards) {
      json j{
          {"type", "reward"},
          {"t", event.t},
          {"episode", event.episode},
          {"caption", event.caption},
          {"delta_max", event.delta_max},
          {"matched_goal", event.matched_goal},
          {"threshold", event.threshold},
          {"reward", event.reward},
          {"context", json::parse(observation_to_json_text(event.context))},
      };
      out << j.dump() << "\n";
    }
  }
  {
    std::ofstream out(dir + "/suggestions.jsonl", std::ios::trunc);
    for (const auto& event : artifacts.suggestions) {
      char hash_hex[32];
      std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                    static_cast<unsigned long long>(event.caption_hash));
      json j{
          {"type", "suggestion"},
          {"t", event.t},
          {"episode", event.episode},
          {"source", event.source},
          {"prompt_hash", hash_hex},
          {"goals", event.goals},
          {"context", json::parse(observation_to_json_text(event.context))},
      };
      out << j.dump() << "\n";
    }
  }
  {
    std::ofstream out(dir + "/metrics.json", std::ios::trunc);
    json j{
        {"seed", artifacts.seed},
        {"episodes", artifacts.episodes.size()},
        {"final_eval", metric_to_json(artifacts.final_eval)},
        {"llm_network_calls", artifacts.llm_network_calls},
    };
    out << j.dump(2) << "\n";
  }
  const std::string checkpoint = dir + "/checkpoint.bin";
  agent.save_checkpoint(checkpoint);
  return checkpoint;
}

ChartSeries episode_series(const std::string& label, const std::vector<RunArtifacts>& runs,
                           bool use_success_rate) {
  ChartSeries series;
  series.label = label;
  std::size_t min_episodes = SIZE_MAX;
  for (const auto& run : runs) min_episodes = std::min(min_episodes, run.episodes.size());
  if (min_episodes == SIZE_MAX || min_episodes == 0) return series;

  for (std::size_t e = 0; e < min_episodes; ++e) {
    double total = 0.0;
    for (const auto& run : runs) {
      total += use_success_rate ? run.episodes[e].success_rate
                                : static_cast<double>(run.episodes[e].unique_achievements);
    }
    const double mean = total / static_cast<double>(runs.size());
    double var = 0.0;
    for (const auto& run : runs) {
      const double v = use_success_rate
                           ? run.episodes[e].success_rate
                           : static_cast<double>(run.episodes[e].unique_achievements);
      var += (v - mean) * (v - mean);
    }
    series.x.push_back(static_cast<double>(e));
    series.mean.push_back(mean);
    series.std_dev.push_back(std::sqrt(var / static_cast<double>(runs.size())));
  }
  return series;
}

namespace {

struct Bounds {
  double x_min = 0.0, x_max = 1.0, y_min = 0.0, y_max = 1.0;
};

Bounds series_bounds(const std::vector<ChartSeries>& series) {
  Bounds b;
  bool first = true;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const double lo = s.mean[i] - s.std_dev[i];
      const double hi = s.mean[i] + s.std_dev[i];
      if (first) {
        b.x_min = b.x_max = s.x[i];
        b.y_min = lo;
        b.y_max = hi;
        first = false;
      } else {
        b.x_min = std::min(b.x_min, s.x[i]);
        b.x_max = std::max(b.x_max, s.x[i]);
        b.y_min = std::min(b.y_min, lo);
        b.y_max = std::max(b.y_max, hi);
      }
    }
  }
  if (b.x_max == b.x_min) b.x_max = b.x_min + 1.0;
  if (b.y_max == b.y_min) b.y_max = b.y_min + 1.0;
  return b;
}

const char* kSeriesColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                               "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};

}  // namespace

void write_svg_chart(const std::string& path, const std::string& title,
                     const std::string& x_label, const std::string& y_label,
                     const std::vector<ChartSeries>& series) {
  const int width = 720, height = 440;
  const double margin_left = 70, margin_right = 20, margin_top = 40, margin_bottom = 50;
  const Bounds b = series_bounds(series);
  auto sx = [&](double x) {
    return margin_left +
           (x - b.x_min) / (b.x_max - b.x_min) * (width - margin_left - margin_right);
  };
  auto sy = [&](double y) {
    return height - margin_bottom -
           (y - b.y_min) / (b.y_max - b.y_min) * (height - margin_top - margin_bottom);
  };

  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ConfigError("cannot write chart: " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
      << title << "</text>\n";

  out << "<line x1=\"" << margin_left << "\" y1=\"" << height - margin_bottom << "\" x2=\""
      << width - margin_right << "\" y2=\"" << height - margin_bottom << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << margin_left << "\" y1=\"" << margin_top << "\" x2=\"" << margin_left
      << "\" y2=\"" << height - margin_bottom << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << margin_left << "\" y=\"" << height - margin_bottom + 18
      << "\" font-size=\"11\">" << format_double(b.x_min) << "</text>\n";
  out << "<text x=\"" << width - margin_right << "\" y=\"" << height - margin_bottom + 18
      << "\" text-anchor=\"end\" font-size=\"11\">" << format_double(b.x_max) << "</text>\n";
  out << "<text x=\"" << margin_left - 6 << "\" y=\"" << height - margin_bottom
      << "\" text-anchor=\"end\" font-size=\"11\">" << format_double(b.y_min) << "</text>\n";
  out << "<text x=\"" << margin_left - 6 << "\" y=\"" << margin_top + 4
      << "\" text-anchor=\"end\" font-size=\"11\">" << format_double(b.y_max) << "</text>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"" << height - 12
      << "\" text-anchor=\"middle\" font-size=\"12\">" << x_label << "</text>\n";
  out << "<text x=\"16\" y=\"" << height / 2
      << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 " << height / 2
      << ")\">" << y_label << "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const ChartSeries& s = series[si];
    if (s.x.empty()) continue;
    const char* color = kSeriesColors[si % (sizeof(kSeriesColors) / sizeof(char*))];

    // Shaded band: forward along the upper edge, back along the lower.
    out << "<path d=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      out << (i == 0 ? "M" : "L") << format_double(sx(s.x[i])) << " "
          << format_double(sy(s.mean[i] + s.std_dev[i]));
    }
    for (std::size_t i = s.x.size(); i-- > 0;) {
      out << "L" << format_double(sx(s.x[i])) << " "
          << format_double(sy(s.mean[i] - s.std_dev[i]));
    }
    out << "Z\" fill=\"" << color << "\" fill-opacity=\"0.15\" stroke=\"none\"/>\n";

    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      out << format_double(sx(s.x[i])) << "," << format_double(sy(s.mean[i])) << " ";
    }
    out << "\"/>\n";

    out << "<text x=\"" << width - margin_right - 8 << "\" y=\"" << margin_top + 16 * (si + 1)
        << "\" text-anchor=\"end\" font-size=\"12\" fill=\"" << color << "\">" << s.label
        << "</text>\n";
  }
  out << "</svg>\n";
}

void write_combined_reports(const RunConfig& config, const std::vector<RunArtifacts>& runs) {
  std::error_code ec;
  fs::create_directories(config.out_dir, ec);
  if (ec) throw ConfigError("cannot create output directory: " + config.out_dir);
  write_episode_csv(config.out_dir + "/episodes.csv", runs);
  const bool success = config.env_id == "housegrid";
  const ChartSeries series = episode_series(to_string(config.method), runs, success);
  write_svg_chart(config.out_dir + "/pretraining.svg",
                  config.env_id + " " + to_string(config.method), "episode",
                  success ? "success rate" : "unique achievements", {series});
}

}  // namespace ellm
