#pragma once

// Nonlinear time-domain simulation of the coupled electromechanical system:
//
//   m z" = -k z - b z' - m a(t) + F_es(z, q)      (base-excited mass)
//   q'   = (V_pol - q/C(z)) / R                   (polarized RC branch)
//
// integrated with the classical fixed-step 4th-order Runge-Kutta method.
// End stops reset the velocity with a restitution factor; runs are refused
// when the design fails validation (pull-in guard included). Results are
// bit-identical for identical inputs.

#include <cstdint>
#include <variant>
#include <vector>

#include "harvest/model.hpp"

namespace harvest {

// ---------------------------------------------------------------------------
// Excitation
// ---------------------------------------------------------------------------

enum class ExcitationMode {
    base_accel,        ///< package acceleration a(t), enters as -m*a(t)
    prescribed_motion  ///< mass position z(t) imposed (probe test)
};

struct SineWave {
    double amplitude = 0.0;  ///< m/s^2 for base_accel, meters for prescribed
    double frequency_hz = 0.0;
    double phase_rad = 0.0;
};

/// Sampled waveform; evaluated by linear interpolation, differentiated by
/// centered finite differences at the sample points.
struct SampledWave {
    std::vector<double> t_s;
    std::vector<double> value;
};

struct Excitation {
    ExcitationMode mode = ExcitationMode::base_accel;
    std::variant<SineWave, SampledWave> waveform;
};

// ---------------------------------------------------------------------------
// Simulation parameters and result
// ---------------------------------------------------------------------------

struct SimParams {
    double dt_s = 0.0;       ///< fixed step; must satisfy the run-time bound
    double t_end_s = 0.0;
    double t_settle_s = 0.0; ///< excluded from the summary statistics
    double q0_c = 0.0;
    double z0_m = 0.0;
    double v0_mps = 0.0;
};

enum class EventKind { impact, clip_warning };

struct Event {
    double time_s = 0.0;
    EventKind kind = EventKind::impact;
    /// Total state energy removed by the end-stop reset (impacts only).
    double energy_loss_j = 0.0;
};

/// Time series columns, one entry per step (fixed column order for CSV).
struct Series {
    std::vector<double> t_s;
    std::vector<double> z_m;
    std::vector<double> v_mps;
    std::vector<double> q_c;
    std::vector<double> c_f;
    std::vector<double> v_cap_v;
    std::vector<double> i_a;
    std::vector<double> v_load_v;
    std::vector<double> p_load_w;
};

struct Summary {
    double p_avg_w = 0.0;
    double v_load_peak_pos_v = 0.0;
    double v_load_peak_neg_v = 0.0;
    double v_load_rms_v = 0.0;
    double dominant_freq_hz = 0.0;
    std::int64_t impact_count = 0;
    /// Set when the window is shorter than 5 dominant periods.
    bool dominant_freq_low_confidence = false;
};

/// Work and energy bookkeeping over the whole run. The balance residual is
/// normalized by the dissipated energy (or a small floor for idle runs).
struct EnergyLedger {
    double w_base_j = 0.0;        ///< work of the external drive on the mass
    double w_source_j = 0.0;      ///< work delivered by the polarization source
    double de_kin_j = 0.0;
    double de_spring_j = 0.0;
    double de_cap_j = 0.0;
    double e_load_j = 0.0;
    double e_damper_j = 0.0;
    double e_impact_loss_j = 0.0;
    double residual_rel = 0.0;
};

struct TransientResult {
    Series series;
    std::vector<Event> events;
    Summary summary;
    EnergyLedger ledger;
    // Echo of the inputs so summaries and ledgers can be recomputed from the
    // result alone.
    ExcitationMode mode = ExcitationMode::base_accel;
    Excitation excitation;
    SimParams sim;
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Largest admissible step for this design/excitation combination:
/// min(1/(50 f), R*C_min/20); the frequency term applies to sine waveforms.
double dt_bound(const HarvesterDesign& design, const Excitation& exc);

/// Waveform value/slope at one time point (sine evaluated analytically,
/// sampled waveforms interpolated linearly and clamped outside their range).
double waveform_value(const Excitation& exc, double t_s);
double waveform_deriv(const Excitation& exc, double t_s);

/// Integrate the full coupled system under base acceleration.
TransientResult simulate_base_excitation(const HarvesterDesign& design, const Excitation& exc,
                                         const SimParams& sim);

/// Integrate the electrical equation only; z(t) and z'(t) are imposed by the
/// waveform and echoed into the mechanical columns. Excursions beyond z_max
/// produce clip_warning events instead of impacts.
TransientResult simulate_prescribed_motion(const HarvesterDesign& design, const Excitation& exc,
                                           const SimParams& sim);

/// Recompute the energy ledger of a finished run.
EnergyLedger energy_ledger(const TransientResult& result, const HarvesterDesign& design);

/// Recompute the summary statistics over [t_settle, t_end]. The dominant
/// frequency is the zero-crossing count of v_load over twice the window.
Summary summarize(const TransientResult& result);

}  // namespace harvest
