#pragma once

#include <string>
#include <vector>

namespace msvar {

struct ChartPanel {
    std::string title;
    std::vector<double> values;  ///< plotted against 0, 1, 2, ...
};

/// Grid of small line charts sharing the x axis; each panel has its own y
/// range and a dashed zero line. Self-contained SVG text.
[[nodiscard]] std::string small_multiples_svg(const std::string& title, const std::vector<ChartPanel>& panels,
                                              int columns = 4);

}  // namespace msvar
