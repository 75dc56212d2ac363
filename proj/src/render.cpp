#include "ctxslam/render.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <nlohmann/json.hpp>
#include <sstream>

#include "ctxslam/error.hpp"
#include "ctxslam/io.hpp"

namespace ctxslam {

std::uint8_t Color::gray() const {
  return static_cast<std::uint8_t>(std::lround(0.299 * r + 0.587 * g + 0.114 * b));
}

std::string Color::hex() const {
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

Palette default_palette(std::span<const std::string> environments) {
  static constexpr std::array<Color, 10> kColors{{{31, 119, 180},
                                                 {255, 127, 14},
                                                 {44, 160, 44},
                                                 {214, 39, 40},
                                                 {148, 103, 189},
                                                 {140, 86, 75},
                                                 {227, 119, 194},
                                                 {127, 127, 127},
                                                 {188, 189, 34},
                                                 {23, 190, 207}}};
  Palette p;
  for (std::size_t i = 0; i < environments.size(); ++i) {
    Color c = kColors[i % kColors.size()];
    // Past the base set, colours repeat darkened.
    const int round = static_cast<int>(i / kColors.size());
    c.r = static_cast<std::uint8_t>(c.r / (1 + round));
    c.g = static_cast<std::uint8_t>(c.g / (1 + round));
    c.b = static_cast<std::uint8_t>(c.b / (1 + round));
    p[environments[i]] = c;
  }
  p[std::string(kUnknown)] = Color{255, 255, 255};
  return p;
}

Palette parse_palette(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("palette: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("palette must be an object");
  Palette p;
  for (const auto& [label, value] : doc.items()) {
    const std::string s = value.is_string() ? value.get<std::string>() : "";
    unsigned r = 0, g = 0, b = 0;
    if (s.size() != 7 || std::sscanf(s.c_str(), "#%2x%2x%2x", &r, &g, &b) != 3)
      throw ParseError("palette colour for '" + label + "' must be #rrggbb");
    p[label] = Color{static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g),
                     static_cast<std::uint8_t>(b)};
  }
  return p;
}

void RenderSpec::validate() const {
  if (!(scale > 0.0)) throw InvalidArgument("render scale must be positive");
  if (cell_pixels < 1) throw InvalidArgument("cell size must be at least one pixel");
  if (gap < 0) throw InvalidArgument("panel gap must be non-negative");
}

namespace {

const Color& colour_of(const Palette& palette, const std::string& label) {
  const auto it = palette.find(label);
  if (it == palette.end()) throw InvalidArgument("palette has no colour for '" + label + "'");
  return it->second;
}

}  // namespace

std::string render_pgm(std::span<const LabelGrid> panels, const RenderSpec& spec) {
  spec.validate();
  if (panels.empty()) throw InvalidArgument("nothing to render");
  const int px = spec.cell_pixels;
  const int height = panels.front().rows() * px;
  int width = 0;
  for (const auto& g : panels) {
    if (g.rows() * px != height) throw InvalidArgument("panels differ in height");
    width += g.cols() * px;
  }
  width += spec.gap * static_cast<int>(panels.size() - 1);

  std::string pixels(static_cast<std::size_t>(width) * height, static_cast<char>(255));
  int x0 = 0;
  for (const auto& g : panels) {
    for (int r = 0; r < g.rows(); ++r)
      for (int c = 0; c < g.cols(); ++c) {
        const char v = static_cast<char>(colour_of(spec.palette, g.label(r, c)).gray());
        // Row 0 is the southern strip, drawn at the bottom.
        const int top = (g.rows() - 1 - r) * px;
        for (int y = top; y < top + px; ++y)
          for (int x = x0 + c * px; x < x0 + (c + 1) * px; ++x)
            pixels[static_cast<std::size_t>(y) * width + x] = v;
      }
    x0 += g.cols() * px + spec.gap;
  }
  return "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n" + pixels;
}

std::string render_svg(const VectorScene& scene, const RenderSpec& spec) {
  spec.validate();
  const Rect& b = scene.bounds;
  const double s = spec.scale;
  const auto fx = [&](double x) { return format_double(std::round((x - b.min.x) * s * 100) / 100); };
  const auto fy = [&](double y) { return format_double(std::round((b.max.y - y) * s * 100) / 100); };
  const auto points = [&](const Polygon& poly) {
    std::string out;
    for (const Vec2 p : poly) out += (out.empty() ? "" : " ") + fx(p.x) + "," + fy(p.y);
    return out;
  };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fx(b.max.x) << "\" height=\""
     << fy(b.min.y) << "\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << fx(b.max.x) << "\" height=\"" << fy(b.min.y)
     << "\" fill=\"" << colour_of(spec.palette, std::string(kUnknown)).hex() << "\"/>\n";

  if (spec.layers.truth_zones) {
    os << "<g id=\"zones\" fill-opacity=\"0.35\">\n";
    for (const auto& z : scene.zones)
      os << "<polygon points=\"" << points(z.polygon) << "\" fill=\""
         << colour_of(spec.palette, z.environment).hex() << "\"/>\n";
    os << "</g>\n";
  }
  if (spec.layers.grid_leaves) {
    os << "<g id=\"leaves\" fill-opacity=\"0.5\" stroke=\"#000000\" stroke-width=\"0.5\">\n";
    for (const auto& l : scene.leaves)
      os << "<rect x=\"" << fx(l.rect.min.x) << "\" y=\"" << fy(l.rect.max.y) << "\" width=\""
         << format_double(std::round(l.rect.width() * s * 100) / 100) << "\" height=\""
         << format_double(std::round(l.rect.height() * s * 100) / 100) << "\" fill=\""
         << colour_of(spec.palette, l.label).hex() << "\"/>\n";
    os << "</g>\n";
  }
  if (spec.layers.fragments) {
    os << "<g id=\"fragments\" fill-opacity=\"0.5\" stroke=\"#000000\" stroke-width=\"1\">\n";
    for (const auto& f : scene.fragments) {
      if (f.hull.size() < 3) continue;
      os << "<polygon points=\"" << points(f.hull) << "\" fill=\""
         << colour_of(spec.palette, f.label).hex() << "\"/>\n";
    }
    os << "</g>\n";
  }
  if (spec.layers.overlay) {
    os << "<g id=\"overlay\" stroke=\"#808080\" stroke-width=\"0.25\">\n";
    for (int i = 0; i <= kEvalGridSize; ++i) {
      const double x = b.min.x + b.width() * i / kEvalGridSize;
      const double y = b.min.y + b.height() * i / kEvalGridSize;
      os << "<line x1=\"" << fx(x) << "\" y1=\"" << fy(b.min.y) << "\" x2=\"" << fx(x)
         << "\" y2=\"" << fy(b.max.y) << "\"/>\n";
      os << "<line x1=\"" << fx(b.min.x) << "\" y1=\"" << fy(y) << "\" x2=\"" << fx(b.max.x)
         << "\" y2=\"" << fy(y) << "\"/>\n";
    }
    os << "</g>\n";
  }
  if (spec.layers.landmarks) {
    os << "<g id=\"landmarks\">\n";
    for (const auto& l : scene.landmarks) {
      if (spec.layers.true_positions)
        os << "<circle cx=\"" << fx(l.true_position.x) << "\" cy=\"" << fy(l.true_position.y)
           << "\" r=\"2\" fill=\"none\" stroke=\"#000000\"/>\n";
      os << "<circle cx=\"" << fx(l.position.x) << "\" cy=\"" << fy(l.position.y)
         << "\" r=\"1.5\" fill=\"#000000\"/>\n";
    }
    os << "</g>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace ctxslam
