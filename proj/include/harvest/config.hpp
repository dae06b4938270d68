#pragma once

// Run configuration: a flat sectioned key=value text format with
// unit-suffixed keys. Unknown keys are rejected with their line number,
// emission is canonical, and every emitted file re-parses to an identical
// RunConfig.

#include <optional>
#include <string>

#include "harvest/design_rules.hpp"
#include "harvest/model.hpp"
#include "harvest/transient.hpp"

namespace harvest {

struct RunConfig {
    // [mechanical]
    std::optional<double> mass_kg;
    std::optional<double> stiffness_n_per_m;
    std::optional<double> damping_ns_per_m;
    std::optional<double> z_max_m;
    std::optional<double> restitution;

    // [capacitor]
    std::optional<std::string> profile;  // cosine | triangular | table | geometry
    std::optional<double> c_par_f;
    std::optional<double> c_mid_f;
    std::optional<double> delta_c_f;
    std::optional<double> pitch_m;
    std::optional<double> z_offset_m;
    std::optional<double> smoothing_m;
    std::optional<std::string> table_csv;
    std::optional<double> footprint_width_m;
    std::optional<double> finger_fill;
    std::optional<double> finger_length_m;
    std::optional<double> gap_m;
    std::optional<double> permittivity_f_per_m;
    std::optional<double> fringe_floor;

    // [electrical]
    std::optional<std::string> source;  // external | electret
    std::optional<double> v_pol_v;
    std::optional<double> v_pullin_v;
    std::optional<double> load_ohm;

    // [excitation]
    std::optional<std::string> mode;   // base | prescribed
    std::optional<std::string> shape;  // sine | csv
    std::optional<double> accel_g;     // base amplitude, in g
    std::optional<double> amp_m;       // prescribed amplitude, in meters
    std::optional<double> freq_hz;
    std::optional<double> phase_rad;
    std::optional<std::string> waveform_csv;

    // [sim]
    std::optional<double> dt_s;
    std::optional<double> t_end_s;
    std::optional<double> t_settle_s;
    std::optional<double> q0_c;
    std::optional<double> z0_m;
    std::optional<double> v0_mps;

    bool operator==(const RunConfig&) const = default;
};

/// Parse config text; ConfigError messages carry the offending key and line.
RunConfig parse_config(const std::string& text);

/// Read and parse a config file.
RunConfig load_config(const std::string& path);

/// Canonical emission: fixed section and key order, only the keys present.
std::string emit_config(const RunConfig& cfg);

/// Build the device from a config. Relative CSV paths resolve against
/// base_dir. Throws ConfigError on missing or inconsistent keys.
HarvesterDesign design_from_config(const RunConfig& cfg, const std::string& base_dir);

Excitation excitation_from_config(const RunConfig& cfg, const std::string& base_dir);

/// The comb geometry when capacitor.profile = geometry, nullopt otherwise.
std::optional<CombGeometry> geometry_from_config(const RunConfig& cfg);

/// Resolve simulation parameters, filling documented defaults: dt at its
/// stability bound, the settle window from the mechanical (or electrical)
/// time constants, q0 at the electrical equilibrium of the start position.
SimParams sim_from_config(const RunConfig& cfg, const HarvesterDesign& design,
                          const Excitation& exc);

/// Numeric access by dotted key ("electrical.load_ohm") for sweeps.
bool is_numeric_key(const std::string& dotted_key);
void set_numeric_key(RunConfig& cfg, const std::string& dotted_key, double value);

/// Constraints file for the optimizer: a [constraints] section with keys
/// mass_max_kg, z_max_m, footprint_width_m, v_pol_max_v, load_min_ohm,
/// load_max_ohm.
DesignConstraints load_constraints(const std::string& path);

}  // namespace harvest
