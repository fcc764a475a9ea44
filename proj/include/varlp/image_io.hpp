#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "varlp/grid.hpp"

namespace varlp {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ImageReadOptions {
  /// Convert color PNG input to Rec.601 luma. Without this flag color
  /// input is rejected.
  bool color_to_luma = false;
  /// Physical extent of the image; defaults to unit cells [0,cols]x[0,rows].
  std::optional<GridSpec> extent;  // rows/cols fields are ignored, only the extent is used
};

/// Reads a grayscale PNG (8/16 bit) or PGM (P2/P5) image. Sample values
/// are mapped linearly onto [0,1] by dividing by the max code.
/// The format is detected from the file's magic bytes.
ScalarField read_image(const std::string& path, const ImageReadOptions& opts = {});

struct ImageWriteInfo {
  /// Set when the field is constant: every pixel maps to code 0.
  bool degenerate_range = false;
};

struct ImageWriteOptions {
  int bit_depth = 16;  // 8 or 16
  /// Fixed value range mapped onto [0, max code] (values are clamped).
  /// Without it the field's own [min, max] is stretched to full depth.
  std::optional<std::pair<double, double>> fixed_range;
};

/// Writes a grayscale PNG (.png) or binary PGM (.pgm), chosen by the
/// file extension. min maps to code 0 and max to the max code.
ImageWriteInfo write_image(const ScalarField& f, const std::string& path,
                           const ImageWriteOptions& opts = {});

/// One grid row per line, comma-separated, full double precision (%.17g).
void write_csv(const ScalarField& f, const std::string& path);

/// Reads a CSV written by write_csv; all rows must have equal length.
ScalarField read_csv(const std::string& path, const std::optional<GridSpec>& extent = {});

}  // namespace varlp
