#include "torusflow/trace.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "torusflow/errors.hpp"

namespace torusflow {

namespace {
constexpr const char* kHeader = "t,J,perimeter,nonlocal,area,dissipation,volume_correction,psi_c1,event";
}

std::string EnergyTrace::csv() const {
    std::ostringstream out;
    out << kHeader << '\n' << std::setprecision(17);
    for (const auto& r : records)
        out << r.t << ',' << r.J << ',' << r.perimeter << ',' << r.nonlocal << ',' << r.area << ',' << r.dissipation
            << ',' << r.volume_correction << ',' << r.psi_c1 << ',' << r.event << '\n';
    return out.str();
}

void EnergyTrace::write_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << csv();
}

EnergyTrace EnergyTrace::read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open trace " + path);
    std::string line;
    if (!std::getline(in, line) || line != kHeader) throw ConfigError(path + ": not an energy trace");
    EnergyTrace tr;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::istringstream ls(line);
        std::string field;
        while (std::getline(ls, field, ',')) f.push_back(field);
        if (f.size() == 8) f.emplace_back();
        if (f.size() != 9) throw ConfigError(path + ":" + std::to_string(lineno) + ": expected 9 fields");
        TraceRecord r;
        try {
            double* cols[] = {&r.t, &r.J, &r.perimeter, &r.nonlocal, &r.area, &r.dissipation, &r.volume_correction, &r.psi_c1};
            for (std::size_t i = 0; i < 8; ++i) *cols[i] = std::stod(f[i]);
        } catch (const std::logic_error&) {
            throw ConfigError(path + ":" + std::to_string(lineno) + ": malformed number");
        }
        r.event = f[8];
        tr.records.push_back(std::move(r));
    }
    return tr;
}

}  // namespace torusflow
