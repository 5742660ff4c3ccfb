#include "stackline/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace stackline {

std::string svg_num(double v, int decimals) {
    if (std::abs(v) < 0.5 * std::pow(10.0, -decimals)) v = 0.0;  // no "-0.00"
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += ch;
        }
    }
    return out;
}

SvgWriter::SvgWriter(double width, double height) : width_(width), height_(height) {}

void SvgWriter::rect(double x, double y, double w, double h, const std::string& fill,
                     const std::string& stroke) {
    body_ << "  <rect x=\"" << svg_num(x) << "\" y=\"" << svg_num(y) << "\" width=\""
          << svg_num(std::max(w, 0.0)) << "\" height=\"" << svg_num(std::max(h, 0.0))
          << "\" fill=\"" << fill << "\" stroke=\"" << stroke << "\"/>\n";
}

void SvgWriter::line(double x1, double y1, double x2, double y2, const std::string& stroke,
                     double width, const std::string& dash) {
    body_ << "  <line x1=\"" << svg_num(x1) << "\" y1=\"" << svg_num(y1) << "\" x2=\""
          << svg_num(x2) << "\" y2=\"" << svg_num(y2) << "\" stroke=\"" << stroke
          << "\" stroke-width=\"" << svg_num(width, 1) << "\"";
    if (!dash.empty()) body_ << " stroke-dasharray=\"" << dash << "\"";
    body_ << "/>\n";
}

void SvgWriter::polyline(const std::string& points, const std::string& stroke, double width) {
    body_ << "  <polyline points=\"" << points << "\" fill=\"none\" stroke=\"" << stroke
          << "\" stroke-width=\"" << svg_num(width, 1) << "\"/>\n";
}

void SvgWriter::text(double x, double y, const std::string& content, const std::string& anchor,
                     int size, bool bold, const std::string& fill) {
    body_ << "  <text x=\"" << svg_num(x) << "\" y=\"" << svg_num(y) << "\" text-anchor=\""
          << anchor << "\" font-family=\"sans-serif\" font-size=\"" << size << "\"";
    if (bold) body_ << " font-weight=\"bold\"";
    if (fill != "#000000") body_ << " fill=\"" << fill << "\"";
    body_ << ">" << xml_escape(content) << "</text>\n";
}

std::string SvgWriter::str() const {
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << svg_num(width_, 0)
        << "\" height=\"" << svg_num(height_, 0) << "\" viewBox=\"0 0 " << svg_num(width_, 0) << ' '
        << svg_num(height_, 0) << "\">\n";
    out << "  <rect x=\"0\" y=\"0\" width=\"" << svg_num(width_, 0) << "\" height=\""
        << svg_num(height_, 0) << "\" fill=\"#ffffff\"/>\n";
    out << body_.str();
    out << "</svg>\n";
    return out.str();
}

}  // namespace stackline
