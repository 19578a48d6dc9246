#pragma once
// Minimal line-plot rendering of a CSV table.  Pure presentation: scales and
// draws the columns, computes nothing.

#include <string>
#include <vector>

#include "defport/csv.hpp"

namespace defport::svg {

struct LinePlot {
  std::string title;
  std::string x_label;
  std::vector<std::string> series_names;  // names of the y columns
};

// column 0 is x; remaining series are drawn against it
std::string render(const csv::Table& table, const LinePlot& spec);
void write_file(const std::string& path, const csv::Table& table, const LinePlot& spec);

}  // namespace defport::svg
