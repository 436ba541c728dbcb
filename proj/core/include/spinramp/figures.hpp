#pragma once

// Batch figure artifacts: one sub-directory per figure holding the data CSV,
// a gnuplot script, and a rendered SVG. Deterministic for a fixed config.

#include <string>
#include <vector>

#include "spinramp/config.hpp"

namespace spinramp {

struct FigureStatus {
    std::string name;
    bool ok = false;
    std::string error;  // empty on success
};

/// Writes fig2, fig4, fig5, fig7, fig8, fig9, fig10 under out_dir plus a
/// manifest.csv. Failures are recorded per figure; the rest still render.
std::vector<FigureStatus> write_figures(const std::string& out_dir, int jobs,
                                        const std::vector<std::string>& overrides = {});

}  // namespace spinramp
