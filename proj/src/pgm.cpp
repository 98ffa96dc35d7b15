#include "grasscap/pgm.hpp"

#include <fstream>
#include <string>

#include "grasscap/errors.hpp"

namespace grasscap {

namespace {

bool is_pgm_space(int c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n';
}

// Reads a decimal token preceded by at least one whitespace byte.
long read_header_int(std::istream& in, const std::string& path,
                     const char* what) {
  int c = in.get();
  if (!is_pgm_space(c))
    throw ParseError(path + ": expected whitespace before " + what);
  while (is_pgm_space(in.peek())) in.get();
  long value = 0;
  bool any = false;
  while (in.peek() >= '0' && in.peek() <= '9') {
    value = value * 10 + (in.get() - '0');
    any = true;
    if (value > 1 << 30) throw ParseError(path + ": absurd " + std::string(what));
  }
  if (!any)
    throw ParseError(path + ": missing or non-numeric " + what);
  return value;
}

}  // namespace

PgmImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  const std::string name = path.string();
  if (!in) throw ParseError(name + ": cannot open");

  if (in.get() != 'P' || in.get() != '5')
    throw ParseError(name + ": not a P5 PGM (bad magic)");

  PgmImage img;
  img.width = read_header_int(in, name, "width");
  img.height = read_header_int(in, name, "height");
  const long maxval = read_header_int(in, name, "maxval");
  if (img.width < 1 || img.height < 1)
    throw ParseError(name + ": non-positive dimensions");
  if (maxval != 255)
    throw ParseError(name + ": maxval " + std::to_string(maxval) +
                     " unsupported (need 255)");

  // Exactly one whitespace byte separates the header from the raster.
  if (!is_pgm_space(in.get()))
    throw ParseError(name + ": missing whitespace before pixel data");

  const std::size_t count =
      static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height);
  img.pixels.resize(count);
  in.read(reinterpret_cast<char*>(img.pixels.data()),
          static_cast<std::streamsize>(count));
  if (static_cast<std::size_t>(in.gcount()) != count)
    throw ParseError(name + ": truncated pixel data (" +
                     std::to_string(in.gcount()) + " of " +
                     std::to_string(count) + " bytes)");
  return img;
}

void write_pgm(const std::filesystem::path& path, const PgmImage& image) {
  if (image.width < 1 || image.height < 1 ||
      image.pixels.size() != static_cast<std::size_t>(image.width) *
                                 static_cast<std::size_t>(image.height))
    throw DomainError("write_pgm: inconsistent image dimensions");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(path.string() + ": cannot open for writing");
  out << "P5\n" << image.width << " " << image.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.pixels.data()),
            static_cast<std::streamsize>(image.pixels.size()));
  if (!out) throw ParseError(path.string() + ": write failed");
}

}  // namespace grasscap
