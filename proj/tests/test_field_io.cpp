#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "nldiff/field_io.hpp"

using namespace nldiff;

namespace {

ScalarField3 random_field(const Grid3& g) {
    std::mt19937 rng(42);
    std::normal_distribution<double> n(0.0, 1e3);
    ScalarField3 f(g);
    for (auto& v : f.values()) v = n(rng) / 7.0;
    return f;
}

Grid3 odd_grid() {
    Grid3 g;
    g.nx = 3;
    g.ny = 4;
    g.nz = 5;
    g.h = 0.1;
    g.origin = {-0.3, 1.0 / 3.0, 2.0};
    g.boundary = Boundary::FreeDecay;
    return g;
}

}  // namespace

TEST(FieldIo, CsvRoundTripIsBitExact) {
    const auto f = random_field(odd_grid());
    std::stringstream ss;
    io::write_csv(ss, f);
    const auto back = io::read_csv(ss, f.grid());
    for (std::size_t n = 0; n < f.size(); ++n) EXPECT_EQ(back[n], f[n]);
}

TEST(FieldIo, CsvLayout) {
    const ScalarField3 f(odd_grid(), 1.5);
    std::stringstream ss;
    io::write_csv(ss, f);
    std::string header, first, second;
    std::getline(ss, header);
    std::getline(ss, first);
    std::getline(ss, second);
    EXPECT_EQ(header, "i,j,k,x,y,z,value");
    EXPECT_EQ(first.substr(0, 6), "0,0,0,");
    EXPECT_EQ(second.substr(0, 6), "1,0,0,");
}

TEST(FieldIo, CsvRejectsMissingCells) {
    std::stringstream ss("i,j,k,x,y,z,value\n0,0,0,0,0,0,1\n");
    EXPECT_THROW(io::read_csv(ss, odd_grid()), std::runtime_error);
    std::stringstream bad("x,y\n");
    EXPECT_THROW(io::read_csv(bad, odd_grid()), std::runtime_error);
}

TEST(FieldIo, VtkRoundTripKeepsGridAndValues) {
    const auto f = random_field(odd_grid());
    std::stringstream ss;
    io::write_vtk(ss, f);
    const auto text = ss.str();
    EXPECT_NE(text.find("DATASET STRUCTURED_POINTS"), std::string::npos);
    EXPECT_NE(text.find("DIMENSIONS 3 4 5"), std::string::npos);
    EXPECT_NE(text.find("POINT_DATA 60"), std::string::npos);
    EXPECT_NE(text.find("SCALARS value double"), std::string::npos);
    EXPECT_NE(text.find("LOOKUP_TABLE default"), std::string::npos);

    const auto back = io::read_vtk(ss, Boundary::FreeDecay);
    EXPECT_TRUE(back.grid() == f.grid());
    for (std::size_t n = 0; n < f.size(); ++n) EXPECT_EQ(back[n], f[n]);
}

TEST(FieldIo, VtkTruncatedDataThrows) {
    std::stringstream ss;
    io::write_vtk(ss, ScalarField3(odd_grid(), 1.0));
    std::string text = ss.str();
    text.resize(text.size() - 8);
    std::stringstream cut(text);
    EXPECT_THROW(io::read_vtk(cut, Boundary::FreeDecay), std::runtime_error);
}
