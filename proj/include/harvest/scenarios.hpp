#pragma once

// Preset characterisation scenarios. The probe and vibration-tool presets
// are calibrated replications: the underlying device parameters are
// back-computed from the reported electrical quantities (polarization,
// load, peak velocity, output level), not independent predictions. The
// capacitance-fit preset uses a seeded synthetic measurement.

#include <string>
#include <vector>

#include "harvest/config.hpp"
#include "harvest/fit.hpp"
#include "harvest/transient.hpp"

namespace harvest {

enum class ScenarioKind { transient, capfit };

/// Closed interval a summary metric must land in.
struct Expectation {
    std::string key;
    double lo = 0.0;
    double hi = 0.0;
};

struct ScenarioBundle {
    std::string name;
    ScenarioKind kind = ScenarioKind::transient;
    RunConfig config;            ///< transient scenarios
    CapMeasurement measurement;  ///< capfit scenario input
    ProfileKind fit_kind = ProfileKind::cosine;
    std::vector<Expectation> expectations;
};

/// Names accepted by scenario().
std::vector<std::string> scenario_names();

/// Look up a preset; throws DomainError for unknown names.
ScenarioBundle scenario(const std::string& name);

/// Metric evaluation for expectation checks on a finished transient run.
/// Keys: p_avg_w, v_load_rms_v, peak_abs_v_load_v, dominant_freq_hz,
/// residual_rel, p_vrms_identity_rel.
double scenario_metric(const TransientResult& result, const HarvesterDesign& design,
                       const std::string& key);

/// Metric evaluation on a fit result. Keys: delta_c_f, pitch_m, rmse_f.
double scenario_fit_metric(const FitResult& fit, const std::string& key);

}  // namespace harvest
