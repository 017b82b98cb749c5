#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sixport/estimator.hpp"
#include "sixport/monte_carlo.hpp"

namespace sixport {

/// Artifact emission. Data files are deterministic for a given dataset:
/// fixed column order, '.' decimal separator, no timestamps. Nested
/// metadata goes to JSON sidecars.

void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

/// CSV "k,count,expected" plus "<stem>.meta.json" sidecar carrying params,
/// model, seed, run, and the sampler/rng identifiers.
void write_series_csv(const std::filesystem::path& path, const DetectionSeries& series);

/// CSV "m,omega_hat,deviation,n_post,degenerate".
void write_trace_csv(const std::filesystem::path& path, const EstimationTrace& trace);

/// CSV "m,mean_deviation,mean_n_post".
void write_ensemble_csv(const std::filesystem::path& path, const EnsembleStats& stats);

std::string series_sidecar_json(const DetectionSeries& series);

/// Minimal deterministic SVG line/scatter charts.
struct PlotSeries {
    std::string label;
    std::string color = "#d62728";
    bool line = true;              // false -> scatter markers
    std::vector<double> x;
    std::vector<double> y;
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_y = false;
    std::vector<PlotSeries> series;
};

std::string render_svg(const PlotSpec& spec);
void write_svg(const std::filesystem::path& path, const PlotSpec& spec);

}  // namespace sixport
