#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "duplexsim/engine.hpp"

namespace duplexsim {

namespace {

std::optional<double> measure_value(const ResultRow& row, const std::string& measure) {
    if (measure == "pref_similarity") return row.pref_similarity;
    if (measure == "pref_congruence") return row.pref_congruence;
    if (measure == "assoc_similarity") return row.assoc_similarity;
    if (measure == "mean_mutual_info") return row.mean_mutual_info;
    if (measure == "optimal_clusters") {
        if (row.optimal_clusters) return static_cast<double>(*row.optimal_clusters);
        return std::nullopt;
    }
    throw std::invalid_argument("unknown measure '" + measure + "'");
}

constexpr const char* kPalette[] = {
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
};

struct Series {
    std::string label;
    std::vector<std::pair<double, double>> points;  // (t, replicate mean)
};

}  // namespace

std::string render_plot_svg(const std::vector<ResultRow>& table, const std::string& measure,
                            const std::string& topology_filter) {
    measure_value(ResultRow{}, measure);  // validate the name up front

    std::vector<const ResultRow*> rows;
    for (const auto& row : table)
        if (topology_filter.empty() || row.topology == topology_filter) rows.push_back(&row);
    if (rows.empty())
        throw std::invalid_argument(topology_filter.empty()
                                        ? "plot: empty table"
                                        : "plot: no rows for topology '" + topology_filter + "'");

    bool multi_topology = false;
    for (const auto* row : rows)
        if (row->topology != rows.front()->topology) multi_topology = true;

    // replicate-averaged curves keyed by (topology, alpha)
    std::map<std::pair<std::string, double>, std::map<std::uint64_t, std::pair<double, int>>> acc;
    for (const auto* row : rows) {
        const auto v = measure_value(*row, measure);
        if (!v) continue;
        auto& cell = acc[{row->topology, row->alpha}][row->t];
        cell.first += *v;
        cell.second += 1;
    }
    if (acc.empty()) throw std::invalid_argument("plot: no defined values for '" + measure + "'");

    std::vector<Series> series;
    double t_min = 0, t_max = 0, y_min = 0, y_max = 0;
    bool first_point = true;
    for (const auto& [key, by_t] : acc) {
        Series s;
        s.label = (multi_topology ? key.first + " " : std::string{}) +
                  "\xce\xb1 = " + format_double(key.second);
        for (const auto& [t, sum_count] : by_t) {
            const double y = sum_count.first / sum_count.second;
            const double x = static_cast<double>(t);
            if (first_point) {
                t_min = t_max = x;
                y_min = y_max = y;
                first_point = false;
            }
            t_min = std::min(t_min, x);
            t_max = std::max(t_max, x);
            y_min = std::min(y_min, y);
            y_max = std::max(y_max, y);
            s.points.emplace_back(x, y);
        }
        if (!s.points.empty()) series.push_back(std::move(s));
    }

    if (t_max == t_min) t_max = t_min + 1;
    if (y_max == y_min) {
        y_min -= 0.5;
        y_max += 0.5;
    }
    const double y_pad = 0.05 * (y_max - y_min);
    y_min -= y_pad;
    y_max += y_pad;

    const double width = 880, height = 560;
    const double left = 80, right = width - 190, top = 50, bottom = height - 70;
    const auto sx = [&](double t) {
        return left + (t - t_min) / (t_max - t_min) * (right - left);
    };
    const auto sy = [&](double y) {
        return bottom - (y - y_min) / (y_max - y_min) * (bottom - top);
    };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    svg << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    svg << "<text x=\"" << (left + right) / 2 << "\" y=\"28\" font-family=\"sans-serif\""
        << " font-size=\"18\" text-anchor=\"middle\">" << measure << "</text>\n";

    // axes
    svg << "<line x1=\"" << left << "\" y1=\"" << bottom << "\" x2=\"" << right << "\" y2=\""
        << bottom << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
        << bottom << "\" stroke=\"black\"/>\n";

    constexpr int kTicks = 5;
    for (int i = 0; i <= kTicks; ++i) {
        const double frac = static_cast<double>(i) / kTicks;
        const double tx = t_min + frac * (t_max - t_min);
        const double px = sx(tx);
        svg << "<line x1=\"" << format_double(px) << "\" y1=\"" << bottom << "\" x2=\""
            << format_double(px) << "\" y2=\"" << bottom + 6 << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << format_double(px) << "\" y=\"" << bottom + 22
            << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">"
            << format_double(tx) << "</text>\n";
        const double yv = y_min + frac * (y_max - y_min);
        const double py = sy(yv);
        svg << "<line x1=\"" << left - 6 << "\" y1=\"" << format_double(py) << "\" x2=\"" << left
            << "\" y2=\"" << format_double(py) << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << left - 10 << "\" y=\"" << format_double(py + 4)
            << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"end\">"
            << format_double(yv) << "</text>\n";
    }
    svg << "<text x=\"" << (left + right) / 2 << "\" y=\"" << height - 20
        << "\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">t</text>\n";
    svg << "<text x=\"22\" y=\"" << (top + bottom) / 2
        << "\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\""
        << " transform=\"rotate(-90 22 " << (top + bottom) / 2 << ")\">" << measure
        << "</text>\n";

    for (std::size_t idx = 0; idx < series.size(); ++idx) {
        const char* color = kPalette[idx % (sizeof kPalette / sizeof kPalette[0])];
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (const auto& [x, y] : series[idx].points)
            svg << format_double(sx(x)) << "," << format_double(sy(y)) << " ";
        svg << "\"/>\n";
        const double ly = top + 18 * static_cast<double>(idx);
        svg << "<line x1=\"" << right + 12 << "\" y1=\"" << format_double(ly + 4) << "\" x2=\""
            << right + 36 << "\" y2=\"" << format_double(ly + 4) << "\" stroke=\"" << color
            << "\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"" << right + 42 << "\" y=\"" << format_double(ly + 8)
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << series[idx].label
            << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

void emit_plot(const std::vector<ResultRow>& table, const std::string& measure,
               const std::string& out_path, const std::string& topology_filter) {
    const std::string svg = render_plot_svg(table, measure, topology_filter);
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + out_path + " for writing");
    out << svg;
    if (!out) throw std::runtime_error("write failed for " + out_path);
}

}  // namespace duplexsim
