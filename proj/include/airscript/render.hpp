#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "airscript/difviz.hpp"

namespace airscript {

struct SvgStyle {
  int canvas_px = 512;             // width/height attributes
  double stroke_ratio = 0.02;      // stroke width as a fraction of the content extent
  std::string stroke = "black";
  std::string background = "white";
};

namespace detail {

inline std::string fmt2(double v) {
  if (v == 0.0) v = 0.0;  // canonicalize -0.0
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

struct Pt {
  double x, y;
};

}  // namespace detail

// Single smoothed path (Catmull-Rom spline expressed as cubic Beziers).
// Canvas mapping: yaw runs left to right, pitch runs bottom to top, so the
// SVG y axis is flipped relative to the accumulated pitch.
inline std::string render_svg(const CoordinateSequence& coords, const SvgStyle& style = {}) {
  const auto& pts = coords.points;
  if (pts.size() < 2) throw std::domain_error("render_svg: need at least 2 points");

  std::vector<detail::Pt> p(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    p[i] = {static_cast<double>(pts[i].y), -static_cast<double>(pts[i].x)};
  }
  double min_x = p[0].x, max_x = p[0].x, min_y = p[0].y, max_y = p[0].y;
  for (const auto& q : p) {
    min_x = std::min(min_x, q.x);
    max_x = std::max(max_x, q.x);
    min_y = std::min(min_y, q.y);
    max_y = std::max(max_y, q.y);
  }
  const double extent = std::max({max_x - min_x, max_y - min_y, 1.0});
  const double margin = 0.05 * extent;
  const double view_w = (max_x - min_x) + 2.0 * margin;
  const double view_h = (max_y - min_y) + 2.0 * margin;

  std::string d;
  d += "M " + detail::fmt2(p[0].x) + " " + detail::fmt2(p[0].y);
  const auto at = [&p](std::ptrdiff_t i) {
    i = std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(p.size()) - 1);
    return p[static_cast<std::size_t>(i)];
  };
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    const auto p0 = at(static_cast<std::ptrdiff_t>(i) - 1);
    const auto p1 = at(static_cast<std::ptrdiff_t>(i));
    const auto p2 = at(static_cast<std::ptrdiff_t>(i) + 1);
    const auto p3 = at(static_cast<std::ptrdiff_t>(i) + 2);
    const detail::Pt c1{p1.x + (p2.x - p0.x) / 6.0, p1.y + (p2.y - p0.y) / 6.0};
    const detail::Pt c2{p2.x - (p3.x - p1.x) / 6.0, p2.y - (p3.y - p1.y) / 6.0};
    d += " C " + detail::fmt2(c1.x) + " " + detail::fmt2(c1.y) + " " + detail::fmt2(c2.x) +
         " " + detail::fmt2(c2.y) + " " + detail::fmt2(p2.x) + " " + detail::fmt2(p2.y);
  }

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
         std::to_string(style.canvas_px) + "\" height=\"" + std::to_string(style.canvas_px) +
         "\" viewBox=\"" + detail::fmt2(min_x - margin) + " " + detail::fmt2(min_y - margin) +
         " " + detail::fmt2(view_w) + " " + detail::fmt2(view_h) + "\">\n";
  svg += "<rect x=\"" + detail::fmt2(min_x - margin) + "\" y=\"" + detail::fmt2(min_y - margin) +
         "\" width=\"" + detail::fmt2(view_w) + "\" height=\"" + detail::fmt2(view_h) +
         "\" fill=\"" + style.background + "\"/>\n";
  svg += "<path d=\"" + d + "\" fill=\"none\" stroke=\"" + style.stroke +
         "\" stroke-width=\"" + detail::fmt2(style.stroke_ratio * extent) +
         "\" stroke-linecap=\"round\" stroke-linejoin=\"round\"/>\n";
  svg += "</svg>\n";
  return svg;
}

// Square grayscale raster, values in [0, 1], row 0 at the top of the image.
struct GrayImage {
  int size = 0;
  std::vector<double> pix;  // row-major, size*size

  double at(int row, int col) const { return pix[static_cast<std::size_t>(row) * size + col]; }
  friend bool operator==(const GrayImage& a, const GrayImage& b) {
    return a.size == b.size && a.pix == b.pix;
  }
};

namespace detail {

inline void stamp_capsule(GrayImage& img, Pt a, Pt b, double radius) {
  const double pad = radius + 1.0;
  const int x_lo = std::max(0, static_cast<int>(std::floor(std::min(a.x, b.x) - pad)));
  const int x_hi = std::min(img.size - 1, static_cast<int>(std::ceil(std::max(a.x, b.x) + pad)));
  const int y_lo = std::max(0, static_cast<int>(std::floor(std::min(a.y, b.y) - pad)));
  const int y_hi = std::min(img.size - 1, static_cast<int>(std::ceil(std::max(a.y, b.y) + pad)));
  const double seg_x = b.x - a.x, seg_y = b.y - a.y;
  const double seg_len2 = seg_x * seg_x + seg_y * seg_y;
  for (int y = y_lo; y <= y_hi; ++y) {
    for (int x = x_lo; x <= x_hi; ++x) {
      const double rel_x = x - a.x, rel_y = y - a.y;
      double t = 0.0;
      if (seg_len2 > 0.0) t = std::clamp((rel_x * seg_x + rel_y * seg_y) / seg_len2, 0.0, 1.0);
      const double dx = rel_x - t * seg_x, dy = rel_y - t * seg_y;
      const double dist = std::sqrt(dx * dx + dy * dy);
      const double alpha = std::clamp(radius + 0.5 - dist, 0.0, 1.0);
      double& px = img.pix[static_cast<std::size_t>(y) * img.size + x];
      px = std::max(px, alpha);
    }
  }
}

}  // namespace detail

// White stroke on black, 2 px anti-aliased line, trajectory scaled to fill
// 80% of the canvas with aspect ratio preserved. The division of integer
// extents below is correctly rounded, so scaling every input coordinate by a
// common integer factor produces a bit-identical image.
inline GrayImage render_raster(const CoordinateSequence& coords, int size) {
  const auto& pts = coords.points;
  if (pts.size() < 2) throw std::domain_error("render_raster: need at least 2 points");
  if (size < 16) throw std::domain_error("render_raster: size must be >= 16");

  GrayImage img;
  img.size = size;
  img.pix.assign(static_cast<std::size_t>(size) * size, 0.0);

  int min_u = pts[0].y, max_u = pts[0].y;  // yaw, horizontal
  int min_v = pts[0].x, max_v = pts[0].x;  // pitch, vertical up
  for (const auto& p : pts) {
    min_u = std::min(min_u, p.y);
    max_u = std::max(max_u, p.y);
    min_v = std::min(min_v, p.x);
    max_v = std::max(max_v, p.x);
  }
  const long long ext_u = static_cast<long long>(max_u) - min_u;
  const long long ext_v = static_cast<long long>(max_v) - min_v;
  const long long ext = std::max(ext_u, ext_v);

  if (ext == 0) {
    // Degenerate trajectory: a single centered dot.
    const double c = (size - 1) / 2.0;
    detail::stamp_capsule(img, {c, c}, {c, c}, 1.5);
    return img;
  }

  const double usable = 0.8 * size;
  const double span_u = usable * (static_cast<double>(ext_u) / static_cast<double>(ext));
  const double span_v = usable * (static_cast<double>(ext_v) / static_cast<double>(ext));
  const double off_u = (size - span_u) / 2.0;
  const double off_v = (size - span_v) / 2.0;

  auto to_canvas = [&](const PixelPoint& p) -> detail::Pt {
    const double fu = static_cast<double>(p.y - static_cast<long long>(min_u)) /
                      static_cast<double>(ext);
    const double fv = static_cast<double>(p.x - static_cast<long long>(min_v)) /
                      static_cast<double>(ext);
    const double cx = off_u + fu * usable;
    const double cy_up = off_v + fv * usable;
    return {cx, (size - 1) - cy_up};
  };

  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    detail::stamp_capsule(img, to_canvas(pts[i]), to_canvas(pts[i + 1]), 1.0);
  }
  return img;
}

namespace detail {

inline std::uint32_t crc32(const std::uint8_t* data, std::size_t len, std::uint32_t crc = 0) {
  static const auto table = [] {
    std::array<std::uint32_t, 256> t{};
    for (std::uint32_t i = 0; i < 256; ++i) {
      std::uint32_t c = i;
      for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xedb88320u ^ (c >> 1) : c >> 1;
      t[i] = c;
    }
    return t;
  }();
  crc ^= 0xffffffffu;
  for (std::size_t i = 0; i < len; ++i) crc = table[(crc ^ data[i]) & 0xff] ^ (crc >> 8);
  return crc ^ 0xffffffffu;
}

inline void push_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

inline void push_chunk(std::vector<std::uint8_t>& out, const char type[4],
                       const std::vector<std::uint8_t>& data) {
  push_u32(out, static_cast<std::uint32_t>(data.size()));
  std::vector<std::uint8_t> body(type, type + 4);
  body.insert(body.end(), data.begin(), data.end());
  out.insert(out.end(), body.begin(), body.end());
  push_u32(out, crc32(body.data(), body.size()));
}

}  // namespace detail

// 8-bit grayscale PNG, zlib stream with stored deflate blocks. Small files,
// no compression library needed.
inline std::vector<std::uint8_t> encode_png_gray(const GrayImage& img) {
  const int n = img.size;
  std::vector<std::uint8_t> raw;
  raw.reserve(static_cast<std::size_t>(n) * (n + 1));
  for (int y = 0; y < n; ++y) {
    raw.push_back(0);  // filter: none
    for (int x = 0; x < n; ++x) {
      const double v = std::clamp(img.at(y, x), 0.0, 1.0);
      raw.push_back(static_cast<std::uint8_t>(std::lround(v * 255.0)));
    }
  }

  // zlib wrapper around stored blocks
  std::vector<std::uint8_t> z{0x78, 0x01};
  std::size_t pos = 0;
  while (pos < raw.size()) {
    const std::size_t block = std::min<std::size_t>(65535, raw.size() - pos);
    const bool last = pos + block == raw.size();
    z.push_back(last ? 1 : 0);
    z.push_back(static_cast<std::uint8_t>(block & 0xff));
    z.push_back(static_cast<std::uint8_t>(block >> 8));
    z.push_back(static_cast<std::uint8_t>(~block & 0xff));
    z.push_back(static_cast<std::uint8_t>((~block >> 8) & 0xff));
    z.insert(z.end(), raw.begin() + pos, raw.begin() + pos + block);
    pos += block;
  }
  std::uint32_t s1 = 1, s2 = 0;
  for (std::uint8_t b : raw) {
    s1 = (s1 + b) % 65521;
    s2 = (s2 + s1) % 65521;
  }
  detail::push_u32(z, (s2 << 16) | s1);

  std::vector<std::uint8_t> png{0x89, 'P', 'N', 'G', 0x0d, 0x0a, 0x1a, 0x0a};
  std::vector<std::uint8_t> ihdr;
  detail::push_u32(ihdr, static_cast<std::uint32_t>(n));
  detail::push_u32(ihdr, static_cast<std::uint32_t>(n));
  ihdr.push_back(8);  // bit depth
  ihdr.push_back(0);  // grayscale
  ihdr.push_back(0);
  ihdr.push_back(0);
  ihdr.push_back(0);
  detail::push_chunk(png, "IHDR", ihdr);
  detail::push_chunk(png, "IDAT", z);
  detail::push_chunk(png, "IEND", {});
  return png;
}

inline void write_png_gray(const std::string& path, const GrayImage& img) {
  const auto bytes = encode_png_gray(img);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_png_gray: cannot open '" + path + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write_png_gray: write failed for '" + path + "'");
}

}  // namespace airscript
