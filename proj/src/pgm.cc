#include "halftone/pgm.h"

#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string>

#include "halftone/error.h"

namespace halftone {
namespace {

class HeaderReader {
 public:
  explicit HeaderReader(std::span<const uint8_t> bytes) : bytes_(bytes) {}

  std::size_t pos() const { return pos_; }
  bool AtEnd() const { return pos_ >= bytes_.size(); }

  void SkipSpaceAndComments() {
    while (!AtEnd()) {
      const uint8_t c = bytes_[pos_];
      if (c == '#') {
        while (!AtEnd() && bytes_[pos_] != '\n' && bytes_[pos_] != '\r') {
          ++pos_;
        }
      } else if (std::isspace(c)) {
        ++pos_;
      } else {
        return;
      }
    }
  }

  // Unsigned decimal integer preceded by optional whitespace/comments.
  unsigned long ReadUnsigned(const char* what) {
    SkipSpaceAndComments();
    const std::size_t start = pos_;
    if (AtEnd()) throw ParseError(std::string("missing ") + what, pos_);
    if (!std::isdigit(bytes_[pos_])) {
      throw ParseError(std::string("expected digits for ") + what, pos_);
    }
    unsigned long value = 0;
    while (!AtEnd() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > 0xFFFFFFFFul) throw ParseError(std::string(what) + " overflows", start);
      ++pos_;
    }
    return value;
  }

  void Expect(uint8_t c, const char* what) {
    if (AtEnd() || bytes_[pos_] != c) throw ParseError(what, pos_);
    ++pos_;
  }

  void Advance(std::size_t n) { pos_ += n; }

 private:
  std::span<const uint8_t> bytes_;
  std::size_t pos_ = 0;
};

std::vector<uint8_t> ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failure on " + path.string());
  return bytes;
}

void WriteFile(const std::filesystem::path& path,
               const std::vector<uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failure on " + path.string());
}

std::vector<uint8_t> Header(int width, int height) {
  const std::string h = "P5\n" + std::to_string(width) + " " +
                        std::to_string(height) + "\n255\n";
  return std::vector<uint8_t>(h.begin(), h.end());
}

}  // namespace

GrayImage ParsePgm(std::span<const uint8_t> bytes) {
  HeaderReader r(bytes);
  r.Expect('P', "missing PGM magic");
  if (r.AtEnd()) throw ParseError("truncated magic", r.pos());
  const uint8_t kind = bytes[r.pos()];
  if (kind != '2' && kind != '5') {
    throw ParseError("unsupported magic P" + std::string(1, static_cast<char>(kind)),
                     r.pos());
  }
  r.Advance(1);
  if (r.AtEnd() || !std::isspace(bytes[r.pos()])) {
    throw ParseError("expected whitespace after magic", r.pos());
  }

  const std::size_t width_at = r.pos();
  const unsigned long width = r.ReadUnsigned("width");
  const unsigned long height = r.ReadUnsigned("height");
  if (width == 0 || height == 0 || width > 1u << 20 || height > 1u << 20) {
    throw ParseError("invalid dimensions " + std::to_string(width) + "x" +
                         std::to_string(height),
                     width_at);
  }
  r.SkipSpaceAndComments();
  const std::size_t maxval_at = r.pos();
  const unsigned long maxval = r.ReadUnsigned("maxval");
  if (maxval == 0 || maxval > 65535) {
    throw ParseError("maxval must be in [1,65535], got " + std::to_string(maxval),
                     maxval_at);
  }

  const std::size_t count = static_cast<std::size_t>(width) * height;
  std::vector<double> values(count);
  const double scale = static_cast<double>(maxval);

  if (kind == '2') {
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t at = r.pos();
      r.SkipSpaceAndComments();
      if (r.AtEnd()) {
        throw ParseError("truncated payload: got " + std::to_string(i) +
                             " of " + std::to_string(count) + " samples",
                         r.pos());
      }
      const unsigned long s = r.ReadUnsigned("sample");
      if (s > maxval) throw ParseError("sample exceeds maxval", at);
      values[i] = static_cast<double>(s) / scale;
    }
  } else {
    if (r.AtEnd() || !std::isspace(bytes[r.pos()])) {
      throw ParseError("expected single whitespace before raster", r.pos());
    }
    r.Advance(1);
    const std::size_t bps = maxval < 256 ? 1 : 2;
    const std::size_t start = r.pos();
    if (bytes.size() - start < count * bps) {
      throw ParseError("truncated payload: need " + std::to_string(count * bps) +
                           " raster bytes, have " +
                           std::to_string(bytes.size() - start),
                       bytes.size());
    }
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t at = start + i * bps;
      unsigned long s = bytes[at];
      if (bps == 2) s = (s << 8) | bytes[at + 1];
      if (s > maxval) throw ParseError("sample exceeds maxval", at);
      values[i] = static_cast<double>(s) / scale;
    }
  }
  return GrayImage(static_cast<int>(width), static_cast<int>(height),
                   std::move(values));
}

GrayImage LoadPgm(const std::filesystem::path& path) {
  const std::vector<uint8_t> bytes = ReadFile(path);
  return ParsePgm(bytes);
}

std::vector<uint8_t> EncodePgm(const GrayImage& image) {
  std::vector<uint8_t> out = Header(image.width(), image.height());
  out.reserve(out.size() + image.size());
  for (double u : image.values()) {
    out.push_back(static_cast<uint8_t>(std::floor(255.0 * u + 0.5)));
  }
  return out;
}

std::vector<uint8_t> EncodePgm(const BinaryImage& image) {
  std::vector<uint8_t> out = Header(image.width(), image.height());
  out.reserve(out.size() + image.size());
  for (int8_t q : image.values()) out.push_back(q > 0 ? 255 : 0);
  return out;
}

void SavePgm(const GrayImage& image, const std::filesystem::path& path) {
  WriteFile(path, EncodePgm(image));
}

void SavePgm(const BinaryImage& image, const std::filesystem::path& path) {
  WriteFile(path, EncodePgm(image));
}

BinaryImage ToBinary(const GrayImage& image) {
  std::vector<int8_t> q(image.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double u = image.values()[i];
    if (u == 0.0) {
      q[i] = -1;
    } else if (u == 1.0) {
      q[i] = 1;
    } else {
      throw ValidationError("pixel " + std::to_string(i) + " has gray value " +
                            std::to_string(u) + ", image is not binary");
    }
  }
  return BinaryImage(image.width(), image.height(), std::move(q));
}

}  // namespace halftone
