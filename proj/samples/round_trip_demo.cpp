// Generates one noise-free air-written "7", runs it back through 2-DifViz
// and writes the reconstruction next to the executable as SVG and PNG.

#include <fstream>
#include <iostream>

#include "airscript/airscript.hpp"

int main() {
  using namespace airscript;

  const auto templates = load_templates(default_template_dir());
  ParticipantStyle style;
  style.scale = 240.0;

  DifVizConfig config;
  config.rounding = RoundingMode::RemainderCarry;

  const Recording rec = generate_recording(templates[7], style, config, 7, "demo");
  const CoordinateSequence coords = trajectory(rec, config);

  std::ofstream("demo_seven.svg") << render_svg(coords);
  write_png_gray("demo_seven.png", render_raster(coords, 128));

  std::cout << "generated " << rec.samples.size() << " IMU samples, reconstructed "
            << coords.points.size() << " trajectory points\n"
            << "wrote demo_seven.svg and demo_seven.png\n";
  return 0;
}
