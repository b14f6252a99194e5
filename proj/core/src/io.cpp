#include "chmhd/io.hpp"

#include <cstdio>
#include <filesystem>

namespace chmhd {

void ensure_directory(const std::string& path) {
    if (path.empty()) return;
    std::error_code ec;
    std::filesystem::create_directories(path, ec);
    CHMHD_REQUIRE(!ec, "cannot create directory '" + path + "': " + ec.message());
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path);
    CHMHD_REQUIRE(f.good(), "cannot open '" + path + "' for writing");
    return f;
}

void write_scalar(std::ofstream& f, const char* name, const Mesh& mesh, const FieldVec& field) {
    f << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (int n = 0; n < mesh.n_nodes(); ++n) f << format_double(field.coeffs[size_t(n)]) << "\n";
}

void write_vector(std::ofstream& f, const char* name, const Mesh& mesh, const FieldVec& field) {
    f << "VECTORS " << name << " double\n";
    for (int n = 0; n < mesh.n_nodes(); ++n)
        f << format_double(field.coeffs[size_t(2 * n)]) << " "
          << format_double(field.coeffs[size_t(2 * n + 1)]) << " 0\n";
}

}  // namespace

void write_vtk(const std::string& path, const Mesh& mesh, const State& s) {
    std::ofstream f = open_out(path);
    f << "# vtk DataFile Version 3.0\n";
    f << "chmhd fields t=" << format_double(s.time) << "\n";
    f << "ASCII\nDATASET UNSTRUCTURED_GRID\n";
    f << "POINTS " << mesh.n_nodes() << " double\n";
    for (const Vec2& p : mesh.nodes)
        f << format_double(p.x) << " " << format_double(p.y) << " 0\n";
    f << "CELLS " << mesh.n_tris() << " " << 4 * mesh.n_tris() << "\n";
    for (const auto& t : mesh.tris) f << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
    f << "CELL_TYPES " << mesh.n_tris() << "\n";
    for (int t = 0; t < mesh.n_tris(); ++t) f << "5\n";
    f << "POINT_DATA " << mesh.n_nodes() << "\n";
    write_scalar(f, "phi", mesh, s.phi);
    write_scalar(f, "omega", mesh, s.omega);
    write_scalar(f, "p", mesh, s.pres);
    write_vector(f, "velocity", mesh, s.vel);
    write_vector(f, "magnetic", mesh, s.mag);
    CHMHD_REQUIRE(f.good(), "write failed for '" + path + "'");
}

CsvFile::CsvFile(const std::string& path, const std::vector<std::string>& columns)
    : out_(path), ncols_(columns.size()) {
    CHMHD_REQUIRE(out_.good(), "cannot open '" + path + "' for writing");
    CHMHD_REQUIRE(!columns.empty(), "CSV needs at least one column");
    for (size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
    out_ << "\n";
}

void CsvFile::row(const std::vector<double>& values) {
    CHMHD_REQUIRE(values.size() == ncols_, "CSV row width does not match the header");
    for (size_t i = 0; i < values.size(); ++i)
        out_ << (i ? "," : "") << format_double(values[i]);
    out_ << "\n";
    out_.flush();
    CHMHD_REQUIRE(out_.good(), "CSV write failed");
}

}  // namespace chmhd
