// Generates a small corpus of deterministic synthetic grayscale test images,
// handy for trying out profiles without shipping real imagery.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wmbench/image_io.hpp"
#include "wmbench/synthetic.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Synthetic test image generator"};
  std::string out_dir;
  int count = 10;
  int width = 256;
  int height = 256;
  uint64_t seed = 1;
  bool png = false;
  app.add_option("outdir", out_dir, "Output directory")->required();
  app.add_option("--count", count, "Number of images")
      ->check(CLI::PositiveNumber);
  app.add_option("--width", width, "Image width")->check(CLI::PositiveNumber);
  app.add_option("--height", height, "Image height")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "Base seed");
  app.add_flag("--png", png, "Write PNG instead of PGM");
  CLI11_PARSE(app, argc, argv);

  try {
    std::filesystem::create_directories(out_dir);
    for (int i = 0; i < count; ++i) {
      const wmbench::Work work =
          wmbench::synthesize_image(width, height, seed + uint64_t(i));
      char name[64];
      std::snprintf(name, sizeof(name), "synthetic%03d.%s", i,
                    png ? "png" : "pgm");
      const std::filesystem::path file =
          std::filesystem::path(out_dir) / name;
      if (png) {
        wmbench::ImageBuffer buffer;
        buffer.width = work.width();
        buffer.height = work.height();
        buffer.channels = 1;
        buffer.samples.assign(work.pixels().begin(), work.pixels().end());
        wmbench::write_png(file, buffer);
      } else {
        wmbench::write_pgm(file, work);
      }
      std::cout << file.string() << '\n';
    }
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 1;
  }
  return 0;
}
