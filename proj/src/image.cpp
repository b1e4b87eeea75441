#include "mlog/image.hpp"

#include <fstream>
#include <stdexcept>

namespace mlog {

namespace {

// Reads the next header token, skipping whitespace and '#' comments.
std::string next_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) continue;
    tok.push_back(char(c));
    while ((c = in.peek()) != EOF && !std::isspace(c) && c != '#')
      tok.push_back(char(in.get()));
    return tok;
  }
  throw std::runtime_error("pgm: truncated header");
}

int parse_int(const std::string& tok, const char* what) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error(std::string("pgm: bad ") + what + " '" + tok + "'");
  }
}

} // namespace

GrayImage read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("pgm: cannot open " + path);
  if (next_token(in) != "P5") throw std::runtime_error("pgm: not a binary PGM (P5)");
  const int w = parse_int(next_token(in), "width");
  const int h = parse_int(next_token(in), "height");
  const int maxval = parse_int(next_token(in), "maxval");
  if (w <= 0 || h <= 0) throw std::runtime_error("pgm: bad dimensions");
  if (maxval <= 0 || maxval > 255)
    throw std::runtime_error("pgm: only maxval <= 255 is supported");
  in.get(); // single whitespace after maxval
  GrayImage img(w, h);
  in.read(reinterpret_cast<char*>(img.pixels.data()), std::streamsize(img.pixels.size()));
  if (in.gcount() != std::streamsize(img.pixels.size()))
    throw std::runtime_error("pgm: truncated pixel data");
  return img;
}

void write_pgm(const GrayImage& img, const std::string& path) {
  if (!img.valid()) throw std::runtime_error("pgm: invalid image");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("pgm: cannot write " + path);
  out << "P5\n" << img.width << " " << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.pixels.data()),
            std::streamsize(img.pixels.size()));
  if (!out) throw std::runtime_error("pgm: write failed for " + path);
}

} // namespace mlog
