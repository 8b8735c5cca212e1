#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

// CSV emission (comma separated, header row, '.' decimal separator), run
// manifests, and a minimal SVG line plot derived from the same tables.
namespace anytime::io {

inline std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header)
        : out_(path) {
        if (!out_) throw std::runtime_error("cannot open " + path);
        write_row(header);
    }

    void write_row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }
    void write_row(const std::vector<double>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << fmt_double(cells[i]);
        }
        out_ << '\n';
    }

private:
    std::ofstream out_;
};

struct Manifest {
    std::string command;
    std::vector<std::pair<std::string, std::string>> config;
    std::vector<std::string> outputs;
    std::string version = "0.1.0";

    // Emitted before a long run starts; lists exactly the files the run writes.
    void write(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot open " + path);
        out << "command: " << command << '\n';
        out << "version: " << version << '\n';
        for (const auto& [k, v] : config) out << k << ": " << v << '\n';
        out << "outputs:\n";
        for (const auto& f : outputs) out << "  " << f << '\n';
    }
};

struct Series {
    std::string name;
    std::vector<std::pair<double, double>> points;
};

// Minimal SVG polyline plot. Plots are always derivable from the CSVs; this
// is a convenience view, never the source of truth.
inline void svg_line_plot(const std::string& path,
                          const std::vector<Series>& series,
                          const std::string& title) {
    const double w = 640, h = 420, ml = 70, mr = 20, mt = 40, mb = 50;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& s : series)
        for (const auto& [x, y] : s.points) {
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    if (xmin > xmax) { xmin = 0; xmax = 1; ymin = 0; ymax = 1; }
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;
    auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (w - ml - mr); };
    auto py = [&](double y) { return h - mb - (y - ymin) / (ymax - ymin) * (h - mt - mb); };

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w
        << "' height='" << h << "'>\n";
    out << "<rect width='100%' height='100%' fill='white'/>\n";
    out << "<text x='" << w / 2 << "' y='24' text-anchor='middle' "
        << "font-family='sans-serif' font-size='15'>" << title << "</text>\n";
    out << "<line x1='" << ml << "' y1='" << h - mb << "' x2='" << w - mr
        << "' y2='" << h - mb << "' stroke='black'/>\n";
    out << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='"
        << h - mb << "' stroke='black'/>\n";
    out << "<text x='" << ml - 8 << "' y='" << py(ymin)
        << "' text-anchor='end' font-family='sans-serif' font-size='11'>"
        << fmt_double(ymin) << "</text>\n";
    out << "<text x='" << ml - 8 << "' y='" << py(ymax)
        << "' text-anchor='end' font-family='sans-serif' font-size='11'>"
        << fmt_double(ymax) << "</text>\n";
    out << "<text x='" << px(xmin) << "' y='" << h - mb + 16
        << "' text-anchor='middle' font-family='sans-serif' font-size='11'>"
        << fmt_double(xmin) << "</text>\n";
    out << "<text x='" << px(xmax) << "' y='" << h - mb + 16
        << "' text-anchor='middle' font-family='sans-serif' font-size='11'>"
        << fmt_double(xmax) << "</text>\n";
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c",
                                   "#9467bd", "#ff7f0e", "#8c564b"};
    for (std::size_t si = 0; si < series.size(); ++si) {
        out << "<polyline fill='none' stroke='" << colors[si % 6]
            << "' stroke-width='1.5' points='";
        for (const auto& [x, y] : series[si].points)
            out << px(x) << ',' << py(y) << ' ';
        out << "'/>\n";
        out << "<text x='" << w - mr - 6 << "' y='" << mt + 16.0 * (si + 1)
            << "' text-anchor='end' font-family='sans-serif' font-size='12' "
            << "fill='" << colors[si % 6] << "'>" << series[si].name
            << "</text>\n";
    }
    out << "</svg>\n";
}

}  // namespace anytime::io
