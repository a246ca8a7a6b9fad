#include "icrt/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "icrt/error.hpp"

namespace icrt::io {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_distance_matrix(std::ostream& os, const std::vector<LoopPoint>& points,
                           const std::function<double(const LoopPoint&, const LoopPoint&)>& dist) {
    os << "id";
    for (std::size_t j = 0; j < points.size(); ++j) os << ',' << j;
    os << '\n';
    for (std::size_t i = 0; i < points.size(); ++i) {
        os << i;
        for (std::size_t j = 0; j < points.size(); ++j) os << ',' << fmt(i == j ? 0.0 : dist(points[i], points[j]));
        os << '\n';
    }
}

void write_field_trace(std::ostream& os, const FieldRealization& r, const std::vector<LoopPoint>& points) {
    os << "id,position,angle,tree_field,fennec\n";
    for (std::size_t i = 0; i < points.size(); ++i) {
        const LoopPoint& p = points[i];
        os << i << ',' << fmt(p.x) << ',' << fmt(p.u) << ',' << fmt(r.tree_field(p.x)) << ','
           << fmt(r.fennec(p)) << '\n';
    }
}

void write_processes(std::ostream& os, const std::vector<ProcessRow>& rows) {
    os << "t,height,lukasiewicz,snake\n";
    for (const ProcessRow& r : rows)
        os << fmt(r.t) << ',' << fmt(r.height) << ',' << fmt(r.lukasiewicz) << ',' << fmt(r.snake) << '\n';
}

namespace {

std::pair<double, double> range_of(const std::vector<double>& v) {
    if (v.empty()) return {0.0, 1.0};
    auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    if (*hi > *lo) return {*lo, *hi};
    return {*lo - 0.5, *hi + 0.5};
}

std::string coord(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

}  // namespace

void write_svg_polylines(std::ostream& os, const std::vector<Series>& series, double width,
                         double panel_height) {
    const double margin = 30.0;
    const double height = panel_height * static_cast<double>(series.size());
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << coord(width) << "\" height=\""
       << coord(height) << "\">\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const Series& s = series[k];
        if (s.x.size() != s.y.size()) throw InvalidInput("series x/y size mismatch", k);
        const auto [x0, x1] = range_of(s.x);
        const auto [y0, y1] = range_of(s.y);
        const double top = panel_height * static_cast<double>(k);
        os << "<text x=\"" << coord(margin) << "\" y=\"" << coord(top + 18.0) << "\" font-size=\"14\">"
           << s.name << "</text>\n<polyline fill=\"none\" stroke=\"black\" stroke-width=\"1\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            const double px = margin + (width - 2.0 * margin) * (s.x[i] - x0) / (x1 - x0);
            const double py = top + panel_height - margin - (panel_height - 2.0 * margin) * (s.y[i] - y0) / (y1 - y0);
            os << (i ? " " : "") << coord(px) << ',' << coord(py);
        }
        os << "\"/>\n";
    }
    os << "</svg>\n";
}

void write_svg_scatter(std::ostream& os, const std::vector<double>& x, const std::vector<double>& y,
                       const std::string& title, double width, double height) {
    if (x.size() != y.size()) throw InvalidInput("scatter x/y size mismatch");
    const double margin = 30.0;
    const auto [x0, x1] = range_of(x);
    const auto [y0, y1] = range_of(y);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << coord(width) << "\" height=\""
       << coord(height) << "\">\n<text x=\"" << coord(margin) << "\" y=\"18\" font-size=\"14\">" << title
       << "</text>\n";
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double px = margin + (width - 2.0 * margin) * (x[i] - x0) / (x1 - x0);
        const double py = height - margin - (height - 2.0 * margin) * (y[i] - y0) / (y1 - y0);
        os << "<circle cx=\"" << coord(px) << "\" cy=\"" << coord(py) << "\" r=\"1.5\"/>\n";
    }
    os << "</svg>\n";
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInput("cannot write '" + path + "'");
    out << content;
}

std::vector<double> read_weights(const std::string& path) {
    std::string text = read_file(path);
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '[') {
        const auto j = nlohmann::json::parse(text);
        return j.get<std::vector<double>>();
    }
    std::replace(text.begin(), text.end(), ',', ' ');
    std::istringstream ss(text);
    std::vector<double> w;
    std::string tok;
    while (ss >> tok) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(tok, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != tok.size()) throw InvalidInput("weights file: bad number '" + tok + "'", w.size());
        w.push_back(v);
    }
    return w;
}

}  // namespace icrt::io
