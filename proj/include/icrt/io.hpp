#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "icrt/contour.hpp"

namespace icrt::io {

// 17 significant digits; round-trips every double.
std::string fmt(double v);

// Header "id,0,1,...", then one row per point in the given order.
void write_distance_matrix(std::ostream& os, const std::vector<LoopPoint>& points,
                           const std::function<double(const LoopPoint&, const LoopPoint&)>& dist);
// Columns id, position, angle, tree_field, fennec.
void write_field_trace(std::ostream& os, const FieldRealization& r, const std::vector<LoopPoint>& points);
// Columns t, height, lukasiewicz, snake.
void write_processes(std::ostream& os, const std::vector<ProcessRow>& rows);

struct Series {
    std::string name;
    std::vector<double> x, y;
};
// One polyline per series, stacked in separate panels.
void write_svg_polylines(std::ostream& os, const std::vector<Series>& series, double width = 960,
                         double panel_height = 200);
// Scatter plot of (x, y) pairs with a title.
void write_svg_scatter(std::ostream& os, const std::vector<double>& x, const std::vector<double>& y,
                       const std::string& title, double width = 600, double height = 600);

// Weights from a file: a JSON array, or numbers separated by whitespace or commas.
std::vector<double> read_weights(const std::string& path);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace icrt::io
