#ifndef SCBENCH_SVG_HPP
#define SCBENCH_SVG_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

/**
 * @file svg.hpp
 * @brief Standalone SVG charts. Output is a pure function of the inputs (jitter is seeded).
 */

namespace scbench::svg {

struct BoxSeries {
    std::string label;
    std::vector<double> values;
};

/** Box (quartiles, median, 1.5 IQR whiskers) plus jittered points, one box per series. */
std::string boxplot(const std::string& title, const std::string& y_label, const std::vector<BoxSeries>& series, std::uint64_t seed);

struct LineSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

std::string line_chart(const std::string& title, const std::string& x_label, const std::string& y_label, const std::vector<LineSeries>& series);

struct Bar {
    std::string label;
    double value;
};

/** Bars start at zero, so negative values (silhouettes) extend downward. */
std::string bar_chart(const std::string& title, const std::string& y_label, const std::vector<Bar>& bars);

struct ScatterPanel {
    std::string title;
    /** First two columns are plotted. */
    Eigen::MatrixXd points;
    std::vector<std::size_t> labels;
};

/**
 * One panel per entry with every point drawn as a `<circle>` coloured by label.
 * Throws `std::invalid_argument` if there are no panels or a panel has no labels for its points.
 */
std::string scatter(const std::string& title, const std::vector<ScatterPanel>& panels, const std::string& metadata = "");

/** Insert a `<metadata>` element (escaped text) right after the opening `<svg>` tag. */
std::string with_metadata(const std::string& document, const std::string& metadata);

std::string escape(const std::string& text);

}

#endif
