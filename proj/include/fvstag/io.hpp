#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "fvstag/bench.hpp"
#include "fvstag/mesh.hpp"
#include "fvstag/models.hpp"

namespace fvstag {

class IOError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// "FVSTAG-MESH 1" text format: header line, `N_p N_c N_pairs`, node
// coordinates, 0-based triangles, periodic pairs. `#` starts a comment.
void write_mesh(const Mesh& mesh, const std::filesystem::path& path);
RawMesh read_mesh_raw(const std::filesystem::path& path);
Mesh read_mesh(const std::filesystem::path& path);
RawMesh parse_mesh(const std::string& text);
std::string format_mesh(const Mesh& mesh);

// Legacy ASCII VTK unstructured grid with POINT_DATA p (and rho) and
// CELL_DATA u (and B, A rows) at 16 significant digits.
void write_vtk(const Mesh& mesh, const ModelState& s, const std::filesystem::path& path,
               const std::string& title = "fvstag");
std::string format_vtk(const Mesh& mesh, const ModelState& s, const std::string& title = "fvstag");

// Which optional columns of the time series carry data.
struct SeriesColumns {
  bool emag = false;
  bool div_b = false;
  bool curl_a = false;
};
SeriesColumns series_columns(const ModelParams& prm);

std::string timeseries_header(const SeriesColumns& cols);
std::string timeseries_line(const TimeSeriesRow& row);

// Streams rows to timeseries.csv as the run progresses.
class TimeSeriesWriter {
 public:
  TimeSeriesWriter(const std::filesystem::path& path, const SeriesColumns& cols);
  void append(const TimeSeriesRow& row);

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

void write_timeseries(const std::filesystem::path& path, const std::vector<TimeSeriesRow>& rows,
                      const SeriesColumns& cols);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace fvstag
