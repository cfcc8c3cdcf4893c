#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace cli {

namespace {

constexpr double kWidth = 640, kHeight = 480;
constexpr double kLeft = 62, kRight = 16, kTop = 34, kBottom = 48;

struct AxisMap {
    double lo, hi; /* plot range, already in log10 space when log */
    bool log_scale;
    double px0, px1; /* pixel range */

    double to_px(double v) const {
        double t = log_scale ? std::log10(v) : v;
        return px0 + (t - lo) / (hi - lo) * (px1 - px0);
    }
};

std::string fmt_px(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string fmt_tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

void expand(double v, bool log_scale, double& lo, double& hi) {
    if (!std::isfinite(v)) return;
    if (log_scale && !(v > 0)) return;
    double t = log_scale ? std::log10(v) : v;
    lo = std::min(lo, t);
    hi = std::max(hi, t);
}

void finalize_range(double& lo, double& hi) {
    if (lo > hi) {
        lo = 0;
        hi = 1;
    }
    if (hi - lo < 1e-300) {
        lo -= 0.5;
        hi += 0.5;
    }
    double pad = 0.04 * (hi - lo);
    lo -= pad;
    hi += pad;
}

class SvgFile {
  public:
    explicit SvgFile(const std::string& path) : f_(std::fopen(path.c_str(), "wb")) {
        if (!f_) throw std::runtime_error("cannot open " + path + " for writing");
        put("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        put("<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" "
            "width=\"640\" height=\"480\" viewBox=\"0 0 640 480\">\n");
        put("<rect x=\"0\" y=\"0\" width=\"640\" height=\"480\" fill=\"white\"/>\n");
    }
    ~SvgFile() {
        if (f_) {
            put("</svg>\n");
            std::fclose(f_);
        }
    }
    SvgFile(const SvgFile&) = delete;
    SvgFile& operator=(const SvgFile&) = delete;

    void put(const std::string& s) { std::fwrite(s.data(), 1, s.size(), f_); }

    void frame_and_axes(const AxisMap& xm, const AxisMap& ym, const std::string& title,
                        const std::string& xlabel, const std::string& ylabel) {
        put("<rect x=\"" + fmt_px(kLeft) + "\" y=\"" + fmt_px(kTop) + "\" width=\"" +
            fmt_px(kWidth - kLeft - kRight) + "\" height=\"" +
            fmt_px(kHeight - kTop - kBottom) +
            "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n");
        for (int k = 0; k < 5; ++k) {
            double t = k / 4.0;
            double xv = xm.lo + t * (xm.hi - xm.lo);
            double yv = ym.lo + t * (ym.hi - ym.lo);
            double xl = xm.log_scale ? std::pow(10.0, xv) : xv;
            double yl = ym.log_scale ? std::pow(10.0, yv) : yv;
            double px = kLeft + t * (kWidth - kLeft - kRight);
            double py = kHeight - kBottom - t * (kHeight - kTop - kBottom);
            put("<line x1=\"" + fmt_px(px) + "\" y1=\"" + fmt_px(kHeight - kBottom) +
                "\" x2=\"" + fmt_px(px) + "\" y2=\"" +
                fmt_px(kHeight - kBottom + 5) + "\" stroke=\"black\"/>\n");
            put("<text x=\"" + fmt_px(px) + "\" y=\"" + fmt_px(kHeight - kBottom + 18) +
                "\" font-family=\"sans-serif\" font-size=\"11\" "
                "text-anchor=\"middle\">" +
                fmt_tick(xl) + "</text>\n");
            put("<line x1=\"" + fmt_px(kLeft - 5) + "\" y1=\"" + fmt_px(py) +
                "\" x2=\"" + fmt_px(kLeft) + "\" y2=\"" + fmt_px(py) +
                "\" stroke=\"black\"/>\n");
            put("<text x=\"" + fmt_px(kLeft - 8) + "\" y=\"" + fmt_px(py + 4) +
                "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" +
                fmt_tick(yl) + "</text>\n");
        }
        put("<text x=\"" + fmt_px((kLeft + kWidth - kRight) / 2) + "\" y=\"20\" "
            "font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">" +
            title + "</text>\n");
        put("<text x=\"" + fmt_px((kLeft + kWidth - kRight) / 2) + "\" y=\"" +
            fmt_px(kHeight - 10) +
            "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">" +
            xlabel + "</text>\n");
        put("<text x=\"16\" y=\"" + fmt_px((kTop + kHeight - kBottom) / 2) +
            "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" "
            "transform=\"rotate(-90 16 " +
            fmt_px((kTop + kHeight - kBottom) / 2) + ")\">" + ylabel + "</text>\n");
    }

  private:
    FILE* f_;
};

AxisMap make_x(double lo, double hi, bool log_scale) {
    return {lo, hi, log_scale, kLeft, kWidth - kRight};
}
AxisMap make_y(double lo, double hi, bool log_scale) {
    return {lo, hi, log_scale, kHeight - kBottom, kTop};
}

bool plottable(double v, bool log_scale) {
    return std::isfinite(v) && (!log_scale || v > 0);
}

} // namespace

void write_line_plot(const std::string& path, const std::string& title,
                     const std::string& xlabel, const std::string& ylabel,
                     const std::vector<Series>& series, bool xlog, bool ylog) {
    double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo;
    double ylo = xlo, yhi = -xlo;
    for (const Series& s : series)
        for (size_t i = 0; i < s.x.size(); ++i) {
            expand(s.x[i], xlog, xlo, xhi);
            expand(s.y[i], ylog, ylo, yhi);
        }
    finalize_range(xlo, xhi);
    finalize_range(ylo, yhi);
    AxisMap xm = make_x(xlo, xhi, xlog), ym = make_y(ylo, yhi, ylog);

    SvgFile svg(path);
    svg.frame_and_axes(xm, ym, title, xlabel, ylabel);
    int legend_row = 0;
    for (const Series& s : series) {
        std::string d;
        bool pen_down = false;
        for (size_t i = 0; i < s.x.size(); ++i) {
            if (!plottable(s.x[i], xlog) || !plottable(s.y[i], ylog)) {
                pen_down = false;
                continue;
            }
            d += (pen_down ? "L" : "M");
            d += fmt_px(xm.to_px(s.x[i])) + " " + fmt_px(ym.to_px(s.y[i]));
            pen_down = true;
        }
        if (!d.empty())
            svg.put("<path d=\"" + d + "\" fill=\"none\" stroke=\"" + s.color +
                    "\" stroke-width=\"1.5\"/>\n");
        if (!s.label.empty()) {
            double ly = kTop + 14 + 14 * legend_row++;
            svg.put("<line x1=\"" + fmt_px(kWidth - kRight - 120) + "\" y1=\"" +
                    fmt_px(ly - 4) + "\" x2=\"" + fmt_px(kWidth - kRight - 100) +
                    "\" y2=\"" + fmt_px(ly - 4) + "\" stroke=\"" + s.color +
                    "\" stroke-width=\"2\"/>\n");
            svg.put("<text x=\"" + fmt_px(kWidth - kRight - 96) + "\" y=\"" +
                    fmt_px(ly) +
                    "\" font-family=\"sans-serif\" font-size=\"11\">" + s.label +
                    "</text>\n");
        }
    }
}

void write_contour_plot(const std::string& path, const std::string& title,
                        const std::string& xlabel, const std::string& ylabel,
                        const std::vector<double>& xs, const std::vector<double>& ys,
                        const std::vector<double>& field,
                        const std::vector<ContourSet>& levels, bool xlog, bool ylog) {
    size_t n1 = xs.size(), n2 = ys.size();
    if (field.size() != n1 * n2)
        throw std::runtime_error("contour field size does not match the grid");
    double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo;
    double ylo = xlo, yhi = -xlo;
    for (double x : xs) expand(x, xlog, xlo, xhi);
    for (double y : ys) expand(y, ylog, ylo, yhi);
    finalize_range(xlo, xhi);
    finalize_range(ylo, yhi);
    AxisMap xm = make_x(xlo, xhi, xlog), ym = make_y(ylo, yhi, ylog);

    SvgFile svg(path);
    svg.frame_and_axes(xm, ym, title, xlabel, ylabel);

    auto at = [&](size_t i, size_t j) { return field[i * n2 + j]; };
    int legend_row = 0;
    for (const ContourSet& lv : levels) {
        std::string d;
        auto cross = [&](double f0, double f1) { return (lv.level - f0) / (f1 - f0); };
        for (size_t i = 0; i + 1 < n1; ++i) {
            for (size_t j = 0; j + 1 < n2; ++j) {
                double f00 = at(i, j), f10 = at(i + 1, j);
                double f01 = at(i, j + 1), f11 = at(i + 1, j + 1);
                if (!std::isfinite(f00) || !std::isfinite(f10) || !std::isfinite(f01) ||
                    !std::isfinite(f11))
                    continue;
                int mask = (f00 > lv.level ? 1 : 0) | (f10 > lv.level ? 2 : 0) |
                           (f11 > lv.level ? 4 : 0) | (f01 > lv.level ? 8 : 0);
                if (mask == 0 || mask == 15) continue;
                double x0 = xm.to_px(xs[i]), x1 = xm.to_px(xs[i + 1]);
                double y0 = ym.to_px(ys[j]), y1 = ym.to_px(ys[j + 1]);
                /* edge points: bottom (between 00 and 10), right (10-11),
                 * top (01-11), left (00-01) */
                double bx = x0 + cross(f00, f10) * (x1 - x0), by = y0;
                double rx = x1, ry = y0 + cross(f10, f11) * (y1 - y0);
                double tx = x0 + cross(f01, f11) * (x1 - x0), ty = y1;
                double lx = x0, ly = y0 + cross(f00, f01) * (y1 - y0);
                auto seg = [&](double ax, double ay, double bx2, double by2) {
                    d += "M" + fmt_px(ax) + " " + fmt_px(ay) + "L" + fmt_px(bx2) + " " +
                         fmt_px(by2);
                };
                switch (mask) {
                    case 1: case 14: seg(lx, ly, bx, by); break;
                    case 2: case 13: seg(bx, by, rx, ry); break;
                    case 3: case 12: seg(lx, ly, rx, ry); break;
                    case 4: case 11: seg(tx, ty, rx, ry); break;
                    case 6: case 9: seg(bx, by, tx, ty); break;
                    case 7: case 8: seg(lx, ly, tx, ty); break;
                    case 5:
                        seg(lx, ly, bx, by);
                        seg(tx, ty, rx, ry);
                        break;
                    case 10:
                        seg(lx, ly, tx, ty);
                        seg(bx, by, rx, ry);
                        break;
                }
            }
        }
        if (!d.empty())
            svg.put("<path d=\"" + d + "\" fill=\"none\" stroke=\"" + lv.color +
                    "\" stroke-width=\"1.5\"/>\n");
        double lyy = kTop + 14 + 14 * legend_row++;
        svg.put("<line x1=\"" + fmt_px(kWidth - kRight - 120) + "\" y1=\"" +
                fmt_px(lyy - 4) + "\" x2=\"" + fmt_px(kWidth - kRight - 100) +
                "\" y2=\"" + fmt_px(lyy - 4) + "\" stroke=\"" + lv.color +
                "\" stroke-width=\"2\"/>\n");
        svg.put("<text x=\"" + fmt_px(kWidth - kRight - 96) + "\" y=\"" + fmt_px(lyy) +
                "\" font-family=\"sans-serif\" font-size=\"11\">level " +
                fmt_tick(lv.level) + "</text>\n");
    }
}

} // namespace cli
