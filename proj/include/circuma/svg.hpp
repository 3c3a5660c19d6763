#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "circuma/curve.hpp"
#include "circuma/domain.hpp"

namespace circuma {

struct SvgOverlay {
  enum class Kind { curve, circle, disc_union };
  Kind kind = Kind::curve;
  std::vector<cpx> points;       // curve vertices, or disc centers
  std::vector<double> radii;     // circle/disc radii (one per center)
  std::string color = "#1f6feb";
  bool dashed = false;

  static SvgOverlay curve(const Curve& c, std::string color = "#1f6feb") {
    SvgOverlay o;
    o.kind = Kind::curve;
    o.points = c.vertices();
    o.color = std::move(color);
    return o;
  }
  static SvgOverlay circle(cpx center, double r, std::string color = "#8957e5") {
    SvgOverlay o;
    o.kind = Kind::circle;
    o.points = {center};
    o.radii = {r};
    o.color = std::move(color);
    o.dashed = true;
    return o;
  }
  static SvgOverlay disc_union(std::vector<cpx> centers, std::vector<double> radii,
                               std::string color = "#2da44e") {
    SvgOverlay o;
    o.kind = Kind::disc_union;
    o.points = std::move(centers);
    o.radii = std::move(radii);
    o.color = std::move(color);
    return o;
  }
};

namespace detail {

inline std::string svg_num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace detail

/// Deterministic minimal SVG: components filled dark, curves stroked,
/// control circles dashed, cigars as translucent disc unions. The y axis is
/// flipped so the picture matches plane coordinates.
inline std::string render_svg(const DomainSpec& dom, const std::vector<SvgOverlay>& overlays) {
  BBox bb = dom.components_bbox();
  for (const auto& o : overlays) {
    for (size_t i = 0; i < o.points.size(); ++i) {
      double r = i < o.radii.size() ? o.radii[i] : 0.0;
      bb.expand(o.points[i] + cpx(r, r));
      bb.expand(o.points[i] - cpx(r, r));
    }
  }
  double pad = 0.08 * std::max(bb.diam(), 1e-6);
  bb.pad(pad);
  if (!(bb.diam() > 0) || !std::isfinite(bb.diam()))
    throw error(errc::io_error, "svg needs a finite bounding window");

  using detail::svg_num;
  std::ostringstream os;
  double w = bb.xmax - bb.xmin, hgt = bb.ymax - bb.ymin;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << svg_num(bb.xmin) << " "
     << svg_num(-bb.ymax) << " " << svg_num(w) << " " << svg_num(hgt) << "\" width=\"640\">\n";
  os << "<rect x=\"" << svg_num(bb.xmin) << "\" y=\"" << svg_num(-bb.ymax) << "\" width=\""
     << svg_num(w) << "\" height=\"" << svg_num(hgt) << "\" fill=\"#ffffff\"/>\n";
  double stroke = 0.004 * std::max(w, hgt);

  for (const auto& c : dom.components()) {
    switch (c.kind()) {
      case ComponentKind::disc:
        os << "<circle cx=\"" << svg_num(c.disc_center().real()) << "\" cy=\""
           << svg_num(-c.disc_center().imag()) << "\" r=\"" << svg_num(c.disc_radius())
           << "\" fill=\"#24292f\"/>\n";
        break;
      case ComponentKind::segment:
        os << "<line x1=\"" << svg_num(c.seg_p().real()) << "\" y1=\"" << svg_num(-c.seg_p().imag())
           << "\" x2=\"" << svg_num(c.seg_q().real()) << "\" y2=\"" << svg_num(-c.seg_q().imag())
           << "\" stroke=\"#24292f\" stroke-width=\"" << svg_num(stroke) << "\"/>\n";
        break;
      case ComponentKind::polyline: {
        os << "<polygon points=\"";
        for (cpx p : c.polyline_vertices())
          os << svg_num(p.real()) << "," << svg_num(-p.imag()) << " ";
        os << "\" fill=\"#24292f\"/>\n";
        break;
      }
      case ComponentKind::point:
        os << "<circle cx=\"" << svg_num(c.point_pos().real()) << "\" cy=\""
           << svg_num(-c.point_pos().imag()) << "\" r=\"" << svg_num(1.5 * stroke)
           << "\" fill=\"#24292f\"/>\n";
        break;
    }
  }

  for (const auto& o : overlays) {
    switch (o.kind) {
      case SvgOverlay::Kind::curve:
        os << "<polyline points=\"";
        for (cpx p : o.points) os << svg_num(p.real()) << "," << svg_num(-p.imag()) << " ";
        os << "\" fill=\"none\" stroke=\"" << o.color << "\" stroke-width=\"" << svg_num(stroke)
           << "\"/>\n";
        break;
      case SvgOverlay::Kind::circle:
        for (size_t i = 0; i < o.points.size() && i < o.radii.size(); ++i)
          os << "<circle cx=\"" << svg_num(o.points[i].real()) << "\" cy=\""
             << svg_num(-o.points[i].imag()) << "\" r=\"" << svg_num(o.radii[i])
             << "\" fill=\"none\" stroke=\"" << o.color << "\" stroke-width=\"" << svg_num(stroke)
             << "\"" << (o.dashed ? " stroke-dasharray=\"4 3\"" : "") << "/>\n";
        break;
      case SvgOverlay::Kind::disc_union:
        for (size_t i = 0; i < o.points.size() && i < o.radii.size(); ++i)
          os << "<circle cx=\"" << svg_num(o.points[i].real()) << "\" cy=\""
             << svg_num(-o.points[i].imag()) << "\" r=\"" << svg_num(o.radii[i]) << "\" fill=\""
             << o.color << "\" fill-opacity=\"0.25\"/>\n";
        break;
    }
  }
  os << "</svg>\n";
  return os.str();
}

inline void write_svg(const DomainSpec& dom, const std::vector<SvgOverlay>& overlays,
                      const std::string& path) {
  std::ofstream f(path);
  if (!f) throw error(errc::io_error, "cannot write svg file " + path);
  f << render_svg(dom, overlays);
}

}  // namespace circuma
