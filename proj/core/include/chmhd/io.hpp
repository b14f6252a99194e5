// Plain-text output: legacy VTK snapshots of a state and deterministic CSV
// tables. All numbers are written with full round-trip precision so repeated
// runs produce byte-identical files.
#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "chmhd/mesh.hpp"
#include "chmhd/scheme.hpp"

namespace chmhd {

// Creates the directory (and parents) if needed; errors on failure.
void ensure_directory(const std::string& path);

// Round-trip decimal formatting used by every writer.
std::string format_double(double v);

// Legacy ASCII VTK unstructured grid with nodal phi, omega, p scalars and
// velocity/magnetic vectors (z = 0). Bubble velocity components are omitted;
// the nodal values are what the plot shows.
void write_vtk(const std::string& path, const Mesh& mesh, const State& s);

// Column-checked CSV writer.
class CsvFile {
  public:
    CsvFile(const std::string& path, const std::vector<std::string>& columns);
    void row(const std::vector<double>& values);

  private:
    std::ofstream out_;
    size_t ncols_;
};

}  // namespace chmhd
