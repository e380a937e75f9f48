#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "depmix/mixing.hpp"
#include "depmix/physdep.hpp"
#include "depmix/transport.hpp"

namespace depmix {

// Declarative experiment description: a filter, per-module estimation
// policies, and the list of checks to run. Parsed from an INI-style file
// with [section] headers and key = value lines ('#' comments); every field
// has a default, and the canonical serialization round-trips.
struct ExperimentConfig {
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    std::vector<std::string> checks; // subset of the known check names

    FilterSpec filter = FilterSpec::iid_passthrough(InnovationLaw::rademacher());

    // physdep
    double physdep_p = 1.0;
    std::int64_t physdep_max_lag = 30;
    std::int64_t physdep_replicas = 100000;
    std::vector<double> physdep_t_grid; // empty = filter default
    int physdep_bootstrap = 200;

    // mixing
    MixingPolicy mixing;
    std::vector<std::int64_t> mixing_k{1, 2, 4, 8};

    // theorem
    std::vector<std::int64_t> theorem_k{1,  2,  3,  4,  5,  6,  7,  8,  9,  10,
                                        11, 12, 13, 14, 15, 16, 17, 18, 19, 20};

    // transport
    std::int64_t transport_instances = 100;
    int transport_probes = 30;

    // mollify
    std::vector<double> mollify_eps{0.02, 0.05, 0.1, 0.2, 0.5};
    std::vector<double> gaussian_shifts{0.1, 0.2, 0.5};

    Exec exec = Exec::Parallel;

    static ExperimentConfig from_file(const std::filesystem::path& path);
    static ExperimentConfig from_ini_text(const std::string& text);
    std::string to_ini_text() const;

    void validate() const;
};

// Bare INI document, order-preserving within sections.
using IniSection = std::vector<std::pair<std::string, std::string>>;
using IniDoc = std::map<std::string, IniSection>;

IniDoc parse_ini(const std::string& text);

std::vector<std::string> split_list(const std::string& value);
std::vector<double> parse_doubles(const std::string& value);
std::vector<std::int64_t> parse_ints(const std::string& value);

} // namespace depmix
