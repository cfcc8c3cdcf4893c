#ifndef VAXSIR_TOOLS_SVG_HPP
#define VAXSIR_TOOLS_SVG_HPP

#include <string>
#include <vector>

namespace cli {

struct Series {
    std::string label;
    std::string color;
    std::vector<double> x, y;
};

struct ContourSet {
    double level;
    std::string color;
};

/* Polyline plot onto a 640x480 canvas with linear or log10 axes. */
void write_line_plot(const std::string& path, const std::string& title,
                     const std::string& xlabel, const std::string& ylabel,
                     const std::vector<Series>& series, bool xlog = false,
                     bool ylog = false);

/* Marching-squares contours of a grid field. xs has n1 entries, ys has n2,
 * field is x-major with n1*n2 entries. */
void write_contour_plot(const std::string& path, const std::string& title,
                        const std::string& xlabel, const std::string& ylabel,
                        const std::vector<double>& xs, const std::vector<double>& ys,
                        const std::vector<double>& field,
                        const std::vector<ContourSet>& levels, bool xlog = false,
                        bool ylog = false);

} // namespace cli

#endif
