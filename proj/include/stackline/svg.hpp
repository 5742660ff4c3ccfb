#pragma once

#include <sstream>
#include <string>

namespace stackline {

/// Fixed-precision number text for SVG attributes, so output is byte-stable.
std::string svg_num(double v, int decimals = 2);

/// Minimal SVG document builder used by the report plots.
class SvgWriter {
public:
    SvgWriter(double width, double height);

    void rect(double x, double y, double w, double h, const std::string& fill,
              const std::string& stroke = "none");
    void line(double x1, double y1, double x2, double y2, const std::string& stroke, double width,
              const std::string& dash = "");
    void polyline(const std::string& points, const std::string& stroke, double width);
    void text(double x, double y, const std::string& content, const std::string& anchor = "start",
              int size = 12, bool bold = false, const std::string& fill = "#000000");

    std::string str() const;

private:
    std::ostringstream body_;
    double width_;
    double height_;
};

std::string xml_escape(const std::string& s);

}  // namespace stackline
