#include "torusflow/grid_field.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <stdexcept>

namespace torusflow {

static_assert(std::endian::native == std::endian::little, "binary grid I/O assumes a little-endian host");

double GridField::mean() const {
    if (values.empty()) return 0.0;
    return std::accumulate(values.begin(), values.end(), 0.0) / double(values.size());
}

double GridField::max_abs() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

void write_grid_binary(const GridField& g, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path);
    std::uint64_t header[2] = {g.n, g.zero_mean ? 1u : 0u};
    out.write(reinterpret_cast<const char*>(header), sizeof header);
    out.write(reinterpret_cast<const char*>(g.values.data()), std::streamsize(g.values.size() * sizeof(double)));
    if (!out) throw std::runtime_error("write failed: " + path);
}

GridField read_grid_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::uint64_t header[2];
    in.read(reinterpret_cast<char*>(header), sizeof header);
    if (!in || header[0] == 0 || header[0] > (1u << 16)) throw std::runtime_error("bad grid header in " + path);
    GridField g(header[0], 0.0, header[1] != 0);
    in.read(reinterpret_cast<char*>(g.values.data()), std::streamsize(g.values.size() * sizeof(double)));
    if (!in) throw std::runtime_error("truncated grid file " + path);
    return g;
}

void write_grid_csv(const GridField& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "i,j,x,y,value\n" << std::setprecision(17);
    for (std::size_t j = 0; j < g.n; ++j)
        for (std::size_t i = 0; i < g.n; ++i) {
            Vec2 p = g.node(i, j);
            out << i << ',' << j << ',' << p.x << ',' << p.y << ',' << g.at(i, j) << '\n';
        }
}

}  // namespace torusflow
