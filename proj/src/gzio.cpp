#include "sepmark/gzio.hpp"

#include <zlib.h>

#include <cstdio>
#include <fstream>

#include "sepmark/error.hpp"

namespace sepmark {

namespace {

bool ends_with_gz(const std::string& path) {
  return path.size() >= 3 && path.compare(path.size() - 3, 3, ".gz") == 0;
}

}  // namespace

std::string read_file(const std::string& path) {
  // gzread passes non-gzip data through untouched, so one code path covers
  // both plain and compressed files.
  gzFile file = gzopen(path.c_str(), "rb");
  if (file == nullptr) throw DataError("cannot open file: " + path);
  std::string out;
  char buffer[1 << 16];
  int n;
  while ((n = gzread(file, buffer, sizeof(buffer))) > 0) {
    out.append(buffer, static_cast<std::size_t>(n));
  }
  if (n < 0) {
    int err = 0;
    std::string msg = gzerror(file, &err);
    gzclose(file);
    throw DataError("error reading " + path + ": " + msg);
  }
  gzclose(file);
  return out;
}

void write_file(const std::string& path, std::string_view bytes) {
  if (ends_with_gz(path)) {
    gzFile file = gzopen(path.c_str(), "wb");
    if (file == nullptr) throw DataError("cannot open file for writing: " + path);
    if (!bytes.empty() &&
        gzwrite(file, bytes.data(), static_cast<unsigned>(bytes.size())) == 0) {
      gzclose(file);
      throw DataError("error writing " + path);
    }
    gzclose(file);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open file for writing: " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("error writing " + path);
}

}  // namespace sepmark
