#include "gravac/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace gravac {

std::string fmt_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& columns)
    : out_(path), ncol_(columns.size()) {
    if (!out_) throw NumericalError("IoError", "cannot open " + path);
    for (size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
    out_ << "\n";
}

void CsvWriter::row(const std::vector<double>& values) {
    if (values.size() != ncol_) throw PreconditionError("IoError", "CSV row arity mismatch");
    for (size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << fmt_num(values[i]);
    out_ << "\n";
}

void CsvWriter::raw_row(const std::vector<std::string>& cells) {
    if (cells.size() != ncol_) throw PreconditionError("IoError", "CSV row arity mismatch");
    for (size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << "\n";
}

JsonlWriter::JsonlWriter(const std::string& path) : out_(path) {
    if (!out_) throw NumericalError("IoError", "cannot open " + path);
}

void JsonlWriter::line(const std::string& json_object) { out_ << json_object << "\n"; }

void svg_plot(const std::string& path, const std::vector<PlotSeries>& series,
              const std::string& title, const std::string& xlabel, const std::string& ylabel,
              const std::vector<PlotMarker>& markers) {
    const int W = 720, H = 480, ML = 70, MR = 20, MT = 40, MB = 50;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& s : series)
        for (size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    if (!(xmax > xmin)) {
        xmin -= 1;
        xmax += 1;
    }
    if (!(ymax > ymin)) {
        ymin -= 1;
        ymax += 1;
    }
    const double padY = 0.05 * (ymax - ymin);
    ymin -= padY;
    ymax += padY;

    auto px = [&](double x) { return ML + (x - xmin) / (xmax - xmin) * (W - ML - MR); };
    auto py = [&](double y) { return H - MB - (y - ymin) / (ymax - ymin) * (H - MT - MB); };

    std::ofstream out(path);
    if (!out) throw NumericalError("IoError", "cannot open " + path);
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H << "'>\n";
    out << "<rect width='100%' height='100%' fill='white'/>\n";
    out << "<text x='" << W / 2 << "' y='24' text-anchor='middle' font-size='16'>" << title
        << "</text>\n";
    out << "<text x='" << W / 2 << "' y='" << H - 12 << "' text-anchor='middle' font-size='12'>"
        << xlabel << "</text>\n";
    out << "<text x='16' y='" << H / 2
        << "' text-anchor='middle' font-size='12' transform='rotate(-90 16 " << H / 2 << ")'>"
        << ylabel << "</text>\n";
    out << "<line x1='" << ML << "' y1='" << H - MB << "' x2='" << W - MR << "' y2='" << H - MB
        << "' stroke='black'/>\n";
    out << "<line x1='" << ML << "' y1='" << MT << "' x2='" << ML << "' y2='" << H - MB
        << "' stroke='black'/>\n";
    for (int t = 0; t <= 4; ++t) {
        const double xv = xmin + t * (xmax - xmin) / 4;
        const double yv = ymin + t * (ymax - ymin) / 4;
        out << "<text x='" << px(xv) << "' y='" << H - MB + 16
            << "' text-anchor='middle' font-size='10'>" << fmt_num(xv) << "</text>\n";
        out << "<text x='" << ML - 6 << "' y='" << py(yv) + 4
            << "' text-anchor='end' font-size='10'>" << fmt_num(yv) << "</text>\n";
    }
    const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    int ci = 0;
    for (const auto& s : series) {
        out << "<polyline fill='none' stroke='" << colors[ci % 6] << "' stroke-width='1.5' points='";
        for (size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            out << px(s.x[i]) << "," << py(s.y[i]) << " ";
        }
        out << "'/>\n";
        out << "<text x='" << W - MR - 4 << "' y='" << MT + 14 * (ci + 1)
            << "' text-anchor='end' font-size='11' fill='" << colors[ci % 6] << "'>" << s.name
            << "</text>\n";
        ++ci;
    }
    for (const auto& mk : markers) {
        out << "<line x1='" << px(mk.x) << "' y1='" << MT << "' x2='" << px(mk.x) << "' y2='"
            << H - MB << "' stroke='gray' stroke-dasharray='4 3'/>\n";
        out << "<text x='" << px(mk.x) + 3 << "' y='" << MT + 12 << "' font-size='10' fill='gray'>"
            << mk.label << "</text>\n";
    }
    out << "</svg>\n";
}

}  // namespace gravac
