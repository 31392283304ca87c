// Generates the synthetic pixel tables under data/fixtures.
//
// Each class is a Gaussian blob in the four-band space with a shared
// brightness term, so the bands are correlated the way real reflectances are.

#include <cmath>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qsvm/data.hpp"
#include "qsvm/rng.hpp"

namespace {

struct Blob {
  double mean[4];
  double brightness_sd;
  double band_sd;
};

// Landsat-like digital numbers for clear ground and cloud.
constexpr Blob kClear{{9000, 8600, 8200, 12500}, 0, 1000};
constexpr Blob kCloud{{19000, 18500, 18700, 21000}, 0, 1000};

qsvm::PixelRecord draw(qsvm::Rng& rng, const std::string& patch, int label, bool margin) {
  qsvm::PixelRecord p;
  p.patch_id = patch;
  p.label = label;
  p.is_margin = margin;
  if (margin) return p;  // scene margins carry zero intensity
  const Blob& b = label == 1 ? kCloud : kClear;
  const double shared = b.brightness_sd * rng.normal();
  double v[4];
  for (int k = 0; k < 4; ++k) v[k] = std::max(0.0, std::round(b.mean[k] + shared + b.band_sd * rng.normal()));
  p.blue = v[0], p.green = v[1], p.red = v[2], p.nir = v[3];
  return p;
}

void add_patch(std::vector<qsvm::PixelRecord>& out, qsvm::Rng& rng, const std::string& id, int size, int cloud,
               int margin) {
  for (int i = 0; i < size; ++i) {
    const bool is_margin = i < margin;
    const int label = (!is_margin && i - margin < cloud) ? 1 : -1;
    out.push_back(draw(rng, id, label, is_margin));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Write a synthetic pixel table"};
  std::string kind = "blobs";
  std::string out_path;
  std::uint64_t seed = 20230501;
  app.add_option("--kind", kind, "blobs | tiny")->check(CLI::IsMember({"blobs", "tiny"}));
  app.add_option("--out", out_path, "output CSV")->required();
  app.add_option("--seed", seed);
  CLI11_PARSE(app, argc, argv);

  qsvm::Rng rng(seed);
  std::vector<qsvm::PixelRecord> pixels;
  if (kind == "blobs") {
    for (int p = 0; p < 6; ++p) add_patch(pixels, rng, "blob_p" + std::to_string(p), 400, 200, 0);
    add_patch(pixels, rng, "blob_margin", 400, 150, 100);  // fill 0.75
    add_patch(pixels, rng, "blob_clear", 400, 40, 0);      // cloudiness 0.10
    add_patch(pixels, rng, "blob_cloudy", 400, 320, 0);    // cloudiness 0.80
  } else {
    add_patch(pixels, rng, "tiny_a", 100, 50, 0);
    add_patch(pixels, rng, "tiny_b", 100, 50, 0);
  }

  std::ofstream out(out_path);
  if (!out) {
    std::cerr << "cannot write " << out_path << '\n';
    return 1;
  }
  qsvm::write_pixels(out, pixels);
  return 0;
}
