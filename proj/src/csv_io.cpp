#include "spectraph/csv_io.hpp"

#include "text_util.hpp"

#include <fstream>
#include <stdexcept>
#include <vector>

namespace spectraph {

PointCloud read_point_cloud_csv(std::istream& in) {
  std::vector<double> values;
  std::size_t cols = 0, rows = 0, line_no = 0;
  bool first_content_line = true;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    auto t = detail::trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto cells = detail::split(t, ',');
    std::vector<double> row;
    row.reserve(cells.size());
    bool numeric = true;
    for (auto c : cells) {
      auto v = detail::parse_double(c);
      if (!v) {
        numeric = false;
        break;
      }
      row.push_back(*v);
    }
    if (!numeric) {
      if (first_content_line) {
        first_content_line = false;
        cols = cells.size();
        continue;
      }
      throw std::runtime_error("CSV line " + std::to_string(line_no) + ": non-numeric cell");
    }
    if (cols == 0) cols = row.size();
    if (row.size() != cols)
      throw std::runtime_error("CSV line " + std::to_string(line_no) + ": ragged row (" +
                               std::to_string(row.size()) + " cells, expected " + std::to_string(cols) + ")");
    first_content_line = false;
    values.insert(values.end(), row.begin(), row.end());
    ++rows;
  }
  if (rows == 0) throw std::runtime_error("CSV contains no data rows");
  Matrix m(rows, cols);
  std::copy(values.begin(), values.end(), m.data());
  return PointCloud(std::move(m));
}

PointCloud load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_point_cloud_csv(in);
}

void write_point_cloud_csv(std::ostream& out, const PointCloud& pc) {
  out << "# spectraph-points v1\n";
  for (std::size_t i = 0; i < pc.size(); ++i) {
    for (std::size_t j = 0; j < pc.dim(); ++j) {
      if (j) out << ',';
      out << detail::format_double(pc.points()(i, j));
    }
    out << '\n';
  }
}

void save_point_cloud_csv(const std::string& path, const PointCloud& pc) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_point_cloud_csv(out, pc);
}

}  // namespace spectraph
