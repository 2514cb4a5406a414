#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "torusflow/vec2.hpp"

namespace torusflow {

/// n x n doubly periodic samples at nodes (i/n, j/n), stored row-major as values[j*n + i].
struct GridField {
    std::size_t n = 0;
    std::vector<double> values;
    bool zero_mean = false;

    GridField() = default;
    explicit GridField(std::size_t size, double fill = 0.0, bool zm = false)
        : n(size), values(size * size, fill), zero_mean(zm) {}

    double& at(std::size_t i, std::size_t j) { return values[j * n + i]; }
    double at(std::size_t i, std::size_t j) const { return values[j * n + i]; }
    Vec2 node(std::size_t i, std::size_t j) const { return {double(i) / double(n), double(j) / double(n)}; }
    double mean() const;
    double max_abs() const;
};

/// 16-byte header (n, zero_mean as little-endian u64) followed by n*n little-endian f64.
void write_grid_binary(const GridField& g, const std::string& path);
GridField read_grid_binary(const std::string& path);
/// Columns i,j,x,y,value.
void write_grid_csv(const GridField& g, const std::string& path);

}  // namespace torusflow
