#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>

#include "semdrift/indices.hpp"
#include "semdrift/stats.hpp"

namespace semdrift {

// Single-series SVG: one <circle class="point"> per data point, the data
// polyline split at gaps (class="series"), the fitted curve (class="trend")
// and one <text class="coef"> per fitted coefficient. The y-axis label
// carries the index's declared scale.
std::string render_plot_svg(const IndexSeries& series,
                            const std::optional<stats::TrendFit>& fit,
                            const std::string& title = {});

// Throws IoError on write failure. Requires a non-empty series.
void emit_plot(const IndexSeries& series,
               const std::optional<stats::TrendFit>& fit,
               const std::filesystem::path& path,
               const std::string& title = {});

// Several series of one index on shared axes, one color and legend entry
// per series (e.g. one per corpus). Empty series are left out.
std::string render_overlay_svg(std::span<const IndexSeries> series,
                               std::span<const std::string> labels,
                               const std::string& title = {});

void emit_overlay_plot(std::span<const IndexSeries> series,
                       std::span<const std::string> labels,
                       const std::filesystem::path& path,
                       const std::string& title = {});

}  // namespace semdrift
