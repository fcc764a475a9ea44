#include "varlp/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

namespace varlp {

namespace {

struct FileHandle {
  FILE* fp = nullptr;
  explicit FileHandle(const std::string& path, const char* mode) : fp(std::fopen(path.c_str(), mode)) {}
  ~FileHandle() {
    if (fp) std::fclose(fp);
  }
  FileHandle(const FileHandle&) = delete;
  FileHandle& operator=(const FileHandle&) = delete;
};

GridSpec spec_for(std::int64_t rows, std::int64_t cols, const std::optional<GridSpec>& extent) {
  if (extent) return GridSpec(rows, cols, extent->x0, extent->x1, extent->y0, extent->y1);
  return GridSpec::unit_cells(rows, cols);
}

ScalarField read_png(const std::string& path, const ImageReadOptions& opts) {
  FileHandle fh(path, "rb");
  if (!fh.fp) throw IoError("read_image: cannot open " + path);

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("read_image: libpng initialization failed");
  }

  std::vector<png_byte> pixels;
  std::vector<png_bytep> rows;
  bool is_color = false;

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    if (is_color)
      throw IoError("read_image: color image " + path + " (enable luma conversion to accept it)");
    throw IoError("read_image: failed to decode " + path);
  }

  png_init_io(png, fh.fp);
  png_read_info(png, info);

  const png_uint_32 w = png_get_image_width(png, info);
  const png_uint_32 h = png_get_image_height(png, info);
  int depth = png_get_bit_depth(png, info);
  int color_type = png_get_color_type(png, info);

  if (color_type == PNG_COLOR_TYPE_PALETTE) {
    png_set_palette_to_rgb(png);
    color_type = PNG_COLOR_TYPE_RGB;
  }
  if (color_type == PNG_COLOR_TYPE_RGB || color_type == PNG_COLOR_TYPE_RGB_ALPHA) {
    is_color = true;
    if (!opts.color_to_luma) longjmp(png_jmpbuf(png), 1);
    // Rec.601 luma weights
    png_set_rgb_to_gray_fixed(png, 1, 29900, 58700);
  }
  if (depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (color_type == PNG_COLOR_TYPE_GRAY_ALPHA || color_type == PNG_COLOR_TYPE_RGB_ALPHA)
    png_set_strip_alpha(png);
  png_read_update_info(png, info);

  depth = png_get_bit_depth(png, info);
  if (png_get_channels(png, info) != 1 || (depth != 8 && depth != 16)) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("read_image: unsupported PNG layout in " + path);
  }

  const std::size_t rowbytes = png_get_rowbytes(png, info);
  pixels.resize(rowbytes * h);
  rows.resize(h);
  for (png_uint_32 i = 0; i < h; ++i) rows[i] = pixels.data() + i * rowbytes;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  const double maxcode = depth == 16 ? 65535.0 : 255.0;
  std::vector<double> v(static_cast<std::size_t>(w) * h);
  for (png_uint_32 i = 0; i < h; ++i) {
    const png_byte* row = pixels.data() + i * rowbytes;
    for (png_uint_32 j = 0; j < w; ++j) {
      const unsigned code = depth == 16 ? (static_cast<unsigned>(row[2 * j]) << 8) | row[2 * j + 1]
                                        : row[j];
      v[static_cast<std::size_t>(i) * w + j] = static_cast<double>(code) / maxcode;
    }
  }
  return ScalarField(spec_for(h, w, opts.extent), std::move(v));
}

// Next whitespace-delimited token, skipping '#' comment lines.
bool next_pnm_token(std::istream& in, std::string& tok) {
  tok.clear();
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) return true;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  return !tok.empty();
}

long parse_pnm_int(std::istream& in, const std::string& path) {
  std::string tok;
  if (!next_pnm_token(in, tok)) throw IoError("read_image: truncated PGM header in " + path);
  try {
    return std::stol(tok);
  } catch (const std::exception&) {
    throw IoError("read_image: bad PGM header token '" + tok + "' in " + path);
  }
}

ScalarField read_pgm(const std::string& path, const ImageReadOptions& opts) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("read_image: cannot open " + path);

  std::string magic;
  if (!next_pnm_token(in, magic) || (magic != "P2" && magic != "P5"))
    throw IoError("read_image: not a PGM file: " + path);
  const long w = parse_pnm_int(in, path);
  const long h = parse_pnm_int(in, path);
  const long maxval = parse_pnm_int(in, path);
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 65535)
    throw IoError("read_image: bad PGM dimensions in " + path);

  std::vector<double> v(static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
  if (magic == "P2") {
    for (auto& x : v) x = static_cast<double>(parse_pnm_int(in, path)) / static_cast<double>(maxval);
  } else {
    // single whitespace byte separates header from raster
    const int bytes = maxval > 255 ? 2 : 1;
    std::vector<char> raw(v.size() * static_cast<std::size_t>(bytes));
    in.read(raw.data(), static_cast<std::streamsize>(raw.size()));
    if (in.gcount() != static_cast<std::streamsize>(raw.size()))
      throw IoError("read_image: truncated PGM raster in " + path);
    for (std::size_t k = 0; k < v.size(); ++k) {
      const auto* b = reinterpret_cast<const unsigned char*>(raw.data()) + k * bytes;
      const unsigned code = bytes == 2 ? (static_cast<unsigned>(b[0]) << 8) | b[1] : b[0];
      v[k] = static_cast<double>(code) / static_cast<double>(maxval);
    }
  }
  return ScalarField(spec_for(h, w, opts.extent), std::move(v));
}

std::string lower_ext(const std::string& path) {
  const auto pos = path.find_last_of('.');
  if (pos == std::string::npos) return {};
  std::string ext = path.substr(pos + 1);
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext;
}

std::vector<unsigned> quantize(const ScalarField& f, const ImageWriteOptions& opts, bool& degenerate) {
  if (opts.bit_depth != 8 && opts.bit_depth != 16)
    throw std::invalid_argument("write_image: bit depth must be 8 or 16");
  const double maxcode = opts.bit_depth == 16 ? 65535.0 : 255.0;
  double lo, hi;
  if (opts.fixed_range) {
    lo = opts.fixed_range->first;
    hi = opts.fixed_range->second;
    if (!(hi > lo)) throw std::invalid_argument("write_image: fixed range must have hi > lo");
  } else {
    lo = f.minimum();
    hi = f.maximum();
  }
  degenerate = !(hi > lo);
  std::vector<unsigned> codes(static_cast<std::size_t>(f.size()));
  for (std::int64_t k = 0; k < f.size(); ++k) {
    double t = degenerate ? 0.0 : (f[k] - lo) / (hi - lo);
    t = std::clamp(t, 0.0, 1.0);
    codes[static_cast<std::size_t>(k)] = static_cast<unsigned>(std::lround(t * maxcode));
  }
  return codes;
}

void write_png(const ScalarField& f, const std::string& path, const std::vector<unsigned>& codes,
               int depth) {
  FileHandle fh(path, "wb");
  if (!fh.fp) throw IoError("write_image: cannot open " + path);

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw IoError("write_image: libpng initialization failed");
  }

  const std::size_t w = static_cast<std::size_t>(f.cols());
  const std::size_t h = static_cast<std::size_t>(f.rows());
  const std::size_t bpp = depth == 16 ? 2 : 1;
  std::vector<png_byte> pixels(w * h * bpp);
  std::vector<png_bytep> rows(h);
  for (std::size_t i = 0; i < h; ++i) rows[i] = pixels.data() + i * w * bpp;
  for (std::size_t k = 0; k < w * h; ++k) {
    if (depth == 16) {
      pixels[2 * k] = static_cast<png_byte>(codes[k] >> 8);  // big-endian samples
      pixels[2 * k + 1] = static_cast<png_byte>(codes[k] & 0xff);
    } else {
      pixels[k] = static_cast<png_byte>(codes[k]);
    }
  }

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("write_image: failed to encode " + path);
  }
  png_init_io(png, fh.fp);
  png_set_IHDR(png, info, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), depth,
               PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

void write_pgm(const ScalarField& f, const std::string& path, const std::vector<unsigned>& codes,
               int depth) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("write_image: cannot open " + path);
  const unsigned maxval = depth == 16 ? 65535u : 255u;
  out << "P5\n" << f.cols() << " " << f.rows() << "\n" << maxval << "\n";
  for (unsigned code : codes) {
    if (depth == 16) {
      const char b[2] = {static_cast<char>(code >> 8), static_cast<char>(code & 0xff)};
      out.write(b, 2);
    } else {
      const char b = static_cast<char>(code);
      out.write(&b, 1);
    }
  }
  if (!out) throw IoError("write_image: failed writing " + path);
}

}  // namespace

ScalarField read_image(const std::string& path, const ImageReadOptions& opts) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe) throw IoError("read_image: cannot open " + path);
  unsigned char magic[2] = {0, 0};
  probe.read(reinterpret_cast<char*>(magic), 2);
  probe.close();
  if (magic[0] == 0x89 && magic[1] == 'P') return read_png(path, opts);
  if (magic[0] == 'P' && (magic[1] == '2' || magic[1] == '5')) return read_pgm(path, opts);
  throw IoError("read_image: unsupported format (expected PNG or PGM): " + path);
}

ImageWriteInfo write_image(const ScalarField& f, const std::string& path,
                           const ImageWriteOptions& opts) {
  bool degenerate = false;
  const std::vector<unsigned> codes = quantize(f, opts, degenerate);
  const std::string ext = lower_ext(path);
  if (ext == "png")
    write_png(f, path, codes, opts.bit_depth);
  else if (ext == "pgm")
    write_pgm(f, path, codes, opts.bit_depth);
  else
    throw IoError("write_image: unsupported extension ." + ext + " (expected .png or .pgm)");
  return {degenerate};
}

void write_csv(const ScalarField& f, const std::string& path) {
  FileHandle fh(path, "wb");
  if (!fh.fp) throw IoError("write_csv: cannot open " + path);
  for (std::int64_t i = 0; i < f.rows(); ++i) {
    for (std::int64_t j = 0; j < f.cols(); ++j) {
      if (std::fprintf(fh.fp, j + 1 < f.cols() ? "%.17g," : "%.17g\n", f.at(i, j)) < 0)
        throw IoError("write_csv: failed writing " + path);
    }
  }
}

ScalarField read_csv(const std::string& path, const std::optional<GridSpec>& extent) {
  std::ifstream in(path);
  if (!in) throw IoError("read_csv: cannot open " + path);
  std::vector<double> v;
  std::string line;
  std::int64_t rows = 0, cols = -1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::int64_t n = 0;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        v.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw IoError("read_csv: bad value '" + cell + "' in " + path);
      }
      ++n;
    }
    if (cols < 0) cols = n;
    if (n != cols) throw IoError("read_csv: ragged rows in " + path);
    ++rows;
  }
  if (rows == 0 || cols <= 0) throw IoError("read_csv: empty file " + path);
  return ScalarField(spec_for(rows, cols, extent), std::move(v));
}

}  // namespace varlp
