#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "torusflow/curve.hpp"
#include "torusflow/flow.hpp"

namespace torusflow::cli {

/// Effective configuration: section -> key -> raw value. Only keys present in the
/// defaults table are accepted.
class Config {
public:
    /// The documented defaults.
    static Config defaults();
    /// INI text of the defaults with one comment per key.
    static std::string defaults_ini();

    /// Merge an INI file over this config. Throws ConfigError with "path(line): message".
    void merge_file(const std::string& path);
    void merge_string(const std::string& ini_text, const std::string& origin = "<string>");
    /// TORUSFLOW_<SECTION>_<KEY> for every known key.
    void merge_env();
    /// "--section.key=value" arguments; anything else is returned untouched.
    std::vector<std::string> merge_flags(const std::vector<std::string>& args);
    void set(const std::string& dotted, const std::string& value);

    std::string get(const std::string& dotted) const;
    double number(const std::string& dotted) const;
    long integer(const std::string& dotted) const;
    bool boolean(const std::string& dotted) const;
    std::vector<double> numbers(const std::string& dotted) const;

    /// Sorted "section.key=value" lines without output.dir and sweep.jobs; the hash input.
    std::string canonical() const;
    /// FNV-1a 64 of canonical(), as 16 hex digits.
    std::string hash() const;

    /// Range and consistency checks for every section.
    void validate() const;

private:
    std::map<std::string, std::map<std::string, std::string>> values_;
};

std::uint64_t fnv1a64(const std::string& data);

struct Scenario {
    PeriodicCurve initial;
    std::optional<PeriodicCurve> reference;  // unperturbed base shape, when there is one
    FlowKind kind = FlowKind::sd;
    double gamma = 0.0;
    FlowParams params;
    StoppingMonitor monitor;
    double t_end = 0.0;
};

/// Build the geometry and flow settings from a validated config.
Scenario build_scenario(const Config& c);

}  // namespace torusflow::cli
