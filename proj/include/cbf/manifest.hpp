#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "cbf/config.hpp"
#include "cbf/params.hpp"

namespace cbf {

#ifndef CBF_BUILD_ID
#define CBF_BUILD_ID "unknown"
#endif

/// run manifest: the config verbatim, the parsed key quantities, derived
/// constants and a build identifier; every output directory carries one
inline nlohmann::json make_manifest(const ExperimentConfig& c, const std::string& scenario,
                                    const DerivedConstants& derived, double M0_used) {
    nlohmann::json m;
    m["scenario"] = scenario;
    m["config_text"] = c.raw_text;
    m["build"] = {{"id", CBF_BUILD_ID}, {"compiler", __VERSION__}};
    m["grid"] = {{"d", c.d}, {"L", c.L}, {"N", c.N}};
    m["params"] = {{"mu", c.params.mu},
                   {"alpha", c.params.alpha},
                   {"beta", c.params.beta},
                   {"r", c.params.r},
                   {"sigma", c.params.sigma}};
    m["time"] = {{"t0", c.t0}, {"T", c.T}, {"dt", c.dt}};
    m["seed"] = c.seed;
    m["snapshot_stride"] = c.snapshot_stride;
    m["derived"] = {{"lambda1", derived.lambda1}, {"vartheta", derived.vartheta}};
    if (M0_used > 0.0) m["derived"]["M0_used"] = M0_used;
    return m;
}

inline void write_json(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path + " for writing");
    out << j.dump(2) << "\n";
}

}  // namespace cbf
