#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace torusflow {

struct TraceRecord {
    double t = 0.0;
    double J = 0.0;
    double perimeter = 0.0;
    double nonlocal = 0.0;
    double area = 0.0;
    double dissipation = 0.0;
    double volume_correction = 0.0;
    double psi_c1 = std::numeric_limits<double>::quiet_NaN();
    double identity1_residual = std::numeric_limits<double>::quiet_NaN();
    std::string event;
};

struct ExponentialFit {
    double c0 = 0.0;
    double r2 = 0.0;
    double t_begin = 0.0;
    double t_end = 0.0;
};

struct EnergyTrace {
    std::vector<TraceRecord> records;
    std::optional<ExponentialFit> fitted;

    /// Columns t,J,perimeter,nonlocal,area,dissipation,volume_correction,psi_c1,event.
    void write_csv(const std::string& path) const;
    std::string csv() const;
    static EnergyTrace read_csv(const std::string& path);
};

}  // namespace torusflow
