#pragma once

#include <string>
#include <string_view>

namespace sepmark {

// Reads a whole file into memory. Gzip streams are decompressed
// transparently, so plain files and .gz files both work.
std::string read_file(const std::string& path);

// Writes bytes to a file; when the path ends in ".gz" the output is
// gzip-compressed.
void write_file(const std::string& path, std::string_view bytes);

}  // namespace sepmark
