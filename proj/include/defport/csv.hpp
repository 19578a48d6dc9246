#pragma once
// CSV emission with a fixed header per command and locale-independent
// 9-significant-digit numeric formatting.

#include <string>
#include <vector>

namespace defport::csv {

std::string format_number(double v);  // shortest %.9g-style, via to_chars

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

std::string render(const Table& t);
void write_file(const std::string& path, const Table& t);

}  // namespace defport::csv
