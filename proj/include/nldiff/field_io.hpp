#pragma once

#include <fstream>
#include <iomanip>
#include <ios>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "nldiff/grid.hpp"

namespace nldiff::io {

inline constexpr int kDigits = 17;

/// Rows `i,j,k,x,y,z,value`, x index fastest.
inline void write_csv(std::ostream& os, const ScalarField3& f) {
    const Grid3& g = f.grid();
    os << "i,j,k,x,y,z,value\n";
    os << std::setprecision(kDigits);
    for (int k = 0; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                os << i << ',' << j << ',' << k << ',' << g.x(i) << ',' << g.y(j) << ',' << g.z(k) << ','
                   << f(i, j, k) << '\n';
            }
}

/// Reads values written by write_csv onto a known grid. Rows may come in any
/// order; every cell must appear.
inline ScalarField3 read_csv(std::istream& is, const Grid3& g) {
    ScalarField3 f(g);
    std::vector<char> seen(g.size(), 0);
    std::string line;
    if (!std::getline(is, line) || line.rfind("i,j,k", 0) != 0) {
        throw std::runtime_error("field CSV: missing header 'i,j,k,x,y,z,value'");
    }
    std::size_t count = 0;
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell[7];
        for (auto& c : cell) {
            if (!std::getline(row, c, ',')) {
                throw std::runtime_error("field CSV: line " + std::to_string(lineno) + " has fewer than 7 columns");
            }
        }
        const int i = std::stoi(cell[0]);
        const int j = std::stoi(cell[1]);
        const int k = std::stoi(cell[2]);
        if (i < 0 || j < 0 || k < 0 || i >= g.nx || j >= g.ny || k >= g.nz) {
            throw std::runtime_error("field CSV: line " + std::to_string(lineno) + " index outside grid");
        }
        f(i, j, k) = std::stod(cell[6]);
        if (!seen[g.index(i, j, k)]) {
            seen[g.index(i, j, k)] = 1;
            ++count;
        }
    }
    if (count != g.size()) {
        throw std::runtime_error("field CSV: " + std::to_string(count) + " of " + std::to_string(g.size()) +
                                 " cells present");
    }
    return f;
}

/// Legacy VTK STRUCTURED_POINTS, ASCII.
inline void write_vtk(std::ostream& os, const ScalarField3& f, const std::string& title = "nldiff field") {
    const Grid3& g = f.grid();
    os << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET STRUCTURED_POINTS\n";
    os << std::setprecision(kDigits);
    os << "DIMENSIONS " << g.nx << ' ' << g.ny << ' ' << g.nz << '\n';
    os << "ORIGIN " << g.origin[0] << ' ' << g.origin[1] << ' ' << g.origin[2] << '\n';
    os << "SPACING " << g.h << ' ' << g.h << ' ' << g.h << '\n';
    os << "POINT_DATA " << g.size() << '\n';
    os << "SCALARS value double\nLOOKUP_TABLE default\n";
    for (std::size_t n = 0; n < f.size(); ++n) {
        os << f[n] << '\n';
    }
}

inline ScalarField3 read_vtk(std::istream& is, Boundary boundary) {
    std::string line;
    Grid3 g;
    g.boundary = boundary;
    bool dims = false, origin = false, spacing = false;
    while (std::getline(is, line)) {
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "DIMENSIONS") {
            ls >> g.nx >> g.ny >> g.nz;
            dims = true;
        } else if (key == "ORIGIN") {
            ls >> g.origin[0] >> g.origin[1] >> g.origin[2];
            origin = true;
        } else if (key == "SPACING") {
            double sx, sy, sz;
            ls >> sx >> sy >> sz;
            if (sx != sy || sy != sz) {
                throw std::runtime_error("VTK: anisotropic spacing is not supported");
            }
            g.h = sx;
            spacing = true;
        } else if (key == "LOOKUP_TABLE") {
            break;
        }
    }
    if (!dims || !origin || !spacing) {
        throw std::runtime_error("VTK: missing DIMENSIONS/ORIGIN/SPACING header");
    }
    ScalarField3 f(g);
    for (std::size_t n = 0; n < f.size(); ++n) {
        if (!(is >> f[n])) {
            throw std::runtime_error("VTK: expected " + std::to_string(f.size()) + " values, got " + std::to_string(n));
        }
    }
    return f;
}

inline void write_csv_file(const std::string& path, const ScalarField3& f) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    write_csv(os, f);
}

inline void write_vtk_file(const std::string& path, const ScalarField3& f, const std::string& title = "nldiff field") {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    write_vtk(os, f, title);
}

}  // namespace nldiff::io
