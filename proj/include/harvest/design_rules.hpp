#pragma once

// Executable design rules: resonance tuning, load sweeps against the
// matched-load rule, the pitch-scaling study, and a deterministic
// grid-search optimizer over (load, polarization voltage) with the mass
// maximized and the suspension tuned to the excitation frequency.

#include <optional>
#include <string>
#include <vector>

#include "harvest/model.hpp"
#include "harvest/transient.hpp"

namespace harvest {

/// Application envelope for optimize_design.
struct DesignConstraints {
    double mass_max_kg = 0.0;
    double z_max_m = 0.0;
    double footprint_width_m = 0.0;
    double v_pol_max_v = 0.0;
    double load_min_ohms = 0.0;
    double load_max_ohms = 0.0;
};

/// Suspension stiffness that puts the resonance at f_target: k = m (2 pi f)^2.
double tune_resonance(double mass_kg, double f_target_hz);

struct LoadSweepRow {
    double r_ohms = 0.0;
    double p_avg_w = 0.0;
    double v_rms_v = 0.0;
    std::string error;  ///< empty when the row simulated cleanly
};

/// One transient simulation per grid resistance, with the design's load
/// replaced. Row order follows the grid; per-row failures are recorded in
/// the error column and the sweep continues. `threads` caps concurrent
/// evaluations (rows are independent; output does not depend on it).
std::vector<LoadSweepRow> sweep_load(const HarvesterDesign& design, const Excitation& exc,
                                     const SimParams& sim, const std::vector<double>& r_grid_ohms,
                                     int threads = 1);

struct PitchScalingRow {
    int divisor = 1;
    double pitch_m = 0.0;
    double c_mid_f = 0.0;
    double delta_c_f = 0.0;
    double n_peak_c_per_m = 0.0;  ///< peak transformer ratio at 1 V polarization
    std::string error;
};

/// Rebuild the comb profile with pitch/s for each divisor s. Finer pitch
/// raises the peak transformer ratio in proportion while the total
/// capacitance (c_mid, delta_c) stays put.
std::vector<PitchScalingRow> pitch_scaling_study(const CombGeometry& geom,
                                                 const std::vector<int>& divisors);

struct RankedDesign {
    HarvesterDesign design;
    double predicted_p_avg_w = 0.0;
    bool stroke_clipped = false;  ///< velocity capped at omega * z_max
    std::string note;             ///< e.g. flag when only v_pol = 0 is feasible
};

/// Deterministic grid search maximizing the linearized harvested power under
/// the constraints. The mass is pinned at mass_max and the stiffness tuned to
/// the (sinusoidal, base-acceleration) excitation; the grid runs over a
/// 25-point log spacing of the load within its bounds and 1 V steps of the
/// polarization voltage up to v_pol_max. When the unclamped displacement
/// exceeds z_max the velocity is capped at omega * z_max. Returns every
/// feasible candidate sorted by descending predicted power, ties broken
/// toward smaller v_pol then smaller load. When the base capacitor comes
/// from a comb geometry, pass it so the footprint constraint can be checked.
std::vector<RankedDesign> optimize_design(const DesignConstraints& constraints,
                                          const Excitation& exc, const HarvesterDesign& base,
                                          const std::optional<CombGeometry>& geom = std::nullopt);

}  // namespace harvest
