// Output writers: round-trip decimal formatting, the column-checked CSV
// writer, and the legacy VTK layout (structure plus byte-identical rewrite).
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "chmhd/io.hpp"
#include "chmhd/mesh.hpp"
#include "chmhd/scheme.hpp"
#include "chmhd/util.hpp"

using namespace chmhd;

namespace {

const std::string kDir = "/tmp/chmhd_test_io";

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream f(path);
    REQUIRE(f.good());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(f, line)) lines.push_back(line);
    return lines;
}

std::string read_all(const std::string& path) {
    std::ifstream f(path);
    REQUIRE(f.good());
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

}  // namespace

TEST_CASE("format_double round-trips through strtod") {
    const double vals[] = {1.0 / 3.0, 0.1,   1e-300, 0.0,  1.0,  -2.5e-17,
                           6.62607015e-34,   1e308,  std::acos(-1.0), -7.0,
                           0.46654306137369556};
    for (const double v : vals) {
        const std::string s = format_double(v);
        char* end = nullptr;
        const double back = std::strtod(s.c_str(), &end);
        CHECK(end == s.c_str() + s.size());
        CHECK(back == v);
    }
    CHECK(format_double(0.0) == "0");
    // negative zero keeps its sign through the text form
    const double nz = std::strtod(format_double(-0.0).c_str(), nullptr);
    CHECK(std::signbit(nz));
}

TEST_CASE("ensure_directory creates nested paths and is idempotent") {
    const std::string deep = kDir + "/a/b/c";
    ensure_directory(deep);
    CHECK(std::filesystem::is_directory(deep));
    ensure_directory(deep);
    ensure_directory("");  // no-op
}

TEST_CASE("csv writer emits header and formatted rows") {
    ensure_directory(kDir);
    const std::string path = kDir + "/table.csv";
    {
        CsvFile csv(path, {"step", "time", "energy"});
        csv.row({1, 0.1, 1.0 / 3.0});
        csv.row({2, 0.2, -0.5});
    }
    const std::vector<std::string> lines = read_lines(path);
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] == "step,time,energy");
    CHECK(lines[1] == "1,0.10000000000000001,0.33333333333333331");
    CHECK(lines[2] == "2,0.20000000000000001,-0.5");
}

TEST_CASE("csv writer rejects bad shapes") {
    ensure_directory(kDir);
    CsvFile csv(kDir + "/bad.csv", {"a", "b"});
    CHECK_THROWS_AS(csv.row({1.0}), Error);
    CHECK_THROWS_AS(csv.row({1.0, 2.0, 3.0}), Error);
    CHECK_THROWS_AS(CsvFile(kDir + "/none.csv", {}), Error);
    CHECK_THROWS_AS(CsvFile("/nonexistent_dir/x.csv", {"a"}), Error);
}

TEST_CASE("vtk snapshot has the legacy layout") {
    ensure_directory(kDir);
    const Mesh m = build_mesh({0, 1, 0, 1}, 1, 1);
    State s = make_state(m);
    s.time = 0.25;
    s.phi.coeffs = {0.5, -0.25, 1.0 / 3.0, 0.0};
    s.vel.coeffs[0] = 1.0;
    s.vel.coeffs[1] = 2.0;

    const std::string path = kDir + "/snap.vtk";
    write_vtk(path, m, s);
    const std::vector<std::string> L = read_lines(path);

    size_t i = 0;
    CHECK(L[i++] == "# vtk DataFile Version 3.0");
    CHECK(L[i++] == "chmhd fields t=0.25");
    CHECK(L[i++] == "ASCII");
    CHECK(L[i++] == "DATASET UNSTRUCTURED_GRID");
    CHECK(L[i++] == "POINTS 4 double");
    for (int n = 0; n < 4; ++n) {
        CHECK(L[i].size() > 2);
        CHECK(L[i].substr(L[i].size() - 2) == " 0");  // planar grid, z = 0
        ++i;
    }
    CHECK(L[i++] == "CELLS 2 8");
    for (int t = 0; t < 2; ++t) CHECK(L[i++].substr(0, 2) == "3 ");
    CHECK(L[i++] == "CELL_TYPES 2");
    for (int t = 0; t < 2; ++t) CHECK(L[i++] == "5");
    CHECK(L[i++] == "POINT_DATA 4");
    CHECK(L[i++] == "SCALARS phi double 1");
    CHECK(L[i++] == "LOOKUP_TABLE default");
    CHECK(L[i++] == "0.5");
    CHECK(L[i++] == "-0.25");
    CHECK(L[i++] == "0.33333333333333331");
    CHECK(L[i++] == "0");
    CHECK(L[i++] == "SCALARS omega double 1");
    i += 5;  // lookup table line + 4 zeros
    CHECK(L[i++] == "SCALARS p double 1");
    i += 5;
    CHECK(L[i++] == "VECTORS velocity double");
    CHECK(L[i++] == "1 2 0");  // vertex dofs are the interleaved head of the vector
    i += 3;
    CHECK(L[i++] == "VECTORS magnetic double");
    for (int n = 0; n < 4; ++n) CHECK(L[i++] == "0 0 0");
    CHECK(i == L.size());
}

TEST_CASE("vtk rewrite is byte-identical") {
    ensure_directory(kDir);
    const Mesh m = build_mesh({0, 2, -1, 1}, 3, 2);
    State s = make_state(m);
    s.time = 1.0 / 7.0;
    for (size_t k = 0; k < s.phi.coeffs.size(); ++k)
        s.phi.coeffs[k] = std::sin(double(k) * 0.37);
    write_vtk(kDir + "/one.vtk", m, s);
    write_vtk(kDir + "/two.vtk", m, s);
    CHECK(read_all(kDir + "/one.vtk") == read_all(kDir + "/two.vtk"));
    CHECK(!read_all(kDir + "/one.vtk").empty());
}
