#include "pphi/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace pphi {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

struct Frame {
    double x0, x1, y0, y1;       // data range, padded
    double width = 640, height = 480;
    double ml = 56, mr = 16, mt = 28, mb = 44;

    double px(double x) const {
        return ml + (x - x0) / (x1 - x0) * (width - ml - mr);
    }
    double py(double y) const {
        return height - mb - (y - y0) / (y1 - y0) * (height - mt - mb);
    }
};

Frame make_frame(const PlotSeries& d) {
    Frame f{};
    const auto [xmin_it, xmax_it] = std::minmax_element(d.x.begin(), d.x.end());
    const auto [ymin_it, ymax_it] = std::minmax_element(d.y.begin(), d.y.end());
    double xmin = *xmin_it, xmax = *xmax_it, ymin = *ymin_it, ymax = *ymax_it;
    if (xmax == xmin) {
        xmin -= 1.0;
        xmax += 1.0;
    }
    if (ymax == ymin) {
        ymin -= 1.0;
        ymax += 1.0;
    }
    const double padx = 0.05 * (xmax - xmin), pady = 0.05 * (ymax - ymin);
    f.x0 = xmin - padx;
    f.x1 = xmax + padx;
    f.y0 = ymin - pady;
    f.y1 = ymax + pady;
    return f;
}

void axes(std::string& out, const Frame& f, const PlotSeries& d) {
    out += "<rect x=\"" + fmt(f.ml) + "\" y=\"" + fmt(f.mt) + "\" width=\"" +
           fmt(f.width - f.ml - f.mr) + "\" height=\"" + fmt(f.height - f.mt - f.mb) +
           "\" fill=\"none\" stroke=\"#444\" stroke-width=\"1\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double x = f.x0 + (f.x1 - f.x0) * i / 4.0;
        const double y = f.y0 + (f.y1 - f.y0) * i / 4.0;
        out += "<text x=\"" + fmt(f.px(x)) + "\" y=\"" + fmt(f.height - f.mb + 16) +
               "\" font-size=\"10\" text-anchor=\"middle\">" + fmt(x) + "</text>\n";
        out += "<text x=\"" + fmt(f.ml - 6) + "\" y=\"" + fmt(f.py(y) + 3) +
               "\" font-size=\"10\" text-anchor=\"end\">" + fmt(y) + "</text>\n";
    }
    if (!d.title.empty())
        out += "<text x=\"" + fmt(f.width / 2) +
               "\" y=\"18\" font-size=\"12\" text-anchor=\"middle\">" + d.title +
               "</text>\n";
    if (!d.x_label.empty())
        out += "<text x=\"" + fmt(f.width / 2) + "\" y=\"" + fmt(f.height - 8) +
               "\" font-size=\"11\" text-anchor=\"middle\">" + d.x_label + "</text>\n";
    if (!d.y_label.empty())
        out += "<text x=\"14\" y=\"" + fmt(f.height / 2) +
               "\" font-size=\"11\" text-anchor=\"middle\" transform=\"rotate(-90 14 " +
               fmt(f.height / 2) + ")\">" + d.y_label + "</text>\n";
}

} // namespace

void emit_plot(const PlotSeries& data, PlotKind kind, const std::string& path) {
    if (data.x.empty() || data.x.size() != data.y.size())
        throw std::invalid_argument("emit_plot: empty or mismatched data");

    Frame f = make_frame(data);
    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " + fmt(f.width) +
           " " + fmt(f.height) + "\" width=\"" + fmt(f.width) + "\" height=\"" +
           fmt(f.height) + "\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    axes(out, f, data);

    switch (kind) {
    case PlotKind::Scatter:
        for (std::size_t i = 0; i < data.x.size(); ++i)
            out += "<circle cx=\"" + fmt(f.px(data.x[i])) + "\" cy=\"" +
                   fmt(f.py(data.y[i])) + "\" r=\"1.6\" fill=\"#1f6fb2\" fill-opacity=\"0.6\"/>\n";
        break;
    case PlotKind::Histogram: {
        const double bw = (data.x.size() > 1)
                              ? (f.px(data.x[1]) - f.px(data.x[0])) * 0.9
                              : 20.0;
        for (std::size_t i = 0; i < data.x.size(); ++i) {
            const double top = f.py(data.y[i]);
            const double base = f.py(std::max(f.y0, 0.0));
            out += "<rect x=\"" + fmt(f.px(data.x[i]) - bw / 2) + "\" y=\"" + fmt(top) +
                   "\" width=\"" + fmt(bw) + "\" height=\"" + fmt(std::max(0.0, base - top)) +
                   "\" fill=\"#2a9d8f\"/>\n";
        }
        break;
    }
    case PlotKind::Line: {
        out += "<polyline fill=\"none\" stroke=\"#c1440e\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < data.x.size(); ++i) {
            if (i) out += " ";
            out += fmt(f.px(data.x[i])) + "," + fmt(f.py(data.y[i]));
        }
        out += "\"/>\n";
        for (std::size_t i = 0; i < data.x.size(); ++i)
            out += "<circle cx=\"" + fmt(f.px(data.x[i])) + "\" cy=\"" +
                   fmt(f.py(data.y[i])) + "\" r=\"2.4\" fill=\"#c1440e\"/>\n";
        break;
    }
    }
    out += "</svg>\n";

    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("emit_plot: cannot write " + path);
    file << out;
}

} // namespace pphi
