#pragma once

// Lumped-element device model of an electrostatic vibration harvester:
// seismic mass on a suspension, a displacement-dependent capacitor C(z),
// a DC polarization source and a resistive load. All types are immutable
// values after construction; all operations are pure functions.

#include <string>
#include <vector>

#include "harvest/errors.hpp"

namespace harvest {

/// Acceleration of 1 g, used wherever excitation levels are given in g.
inline constexpr double kStandardGravity = 9.81;  // m/s^2

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

/// Seismic mass, suspension and end stops.
struct MechanicalParams {
    double mass_kg = 0.0;
    double stiffness_n_per_m = 0.0;
    double damping_ns_per_m = 0.0;
    double z_max_m = 0.0;     ///< end-stop half-travel
    double restitution = 0.0; ///< velocity fraction kept after impact, in [0,1]
};

enum class ProfileKind { cosine, triangular, tabulated };

struct CapSample {
    double z_m = 0.0;
    double c_f = 0.0;
};

/// Capacitance as a function of in-plane displacement, C(z).
///
/// The periodic kinds model a variable-overlap comb: c_par is the
/// displacement-independent parasitic shunting the transducer, c_mid the mean
/// of the periodic part and delta_c its half peak-to-peak swing. z_offset
/// shifts the pattern along z and models electrode misalignment. The
/// triangular kind rounds its corners over +/- smoothing_m so the derivative
/// stays continuous; the tabulated kind interpolates measured samples with a
/// monotone-preserving cubic and clamps to the end values outside the range.
struct CapProfile {
    ProfileKind kind = ProfileKind::cosine;
    double c_par_f = 0.0;
    double c_mid_f = 0.0;
    double delta_c_f = 0.0;
    double pitch_m = 0.0;
    double z_offset_m = 0.0;
    double smoothing_m = 0.0;            ///< triangular kind only
    std::vector<CapSample> samples;      ///< tabulated kind only
};

/// Parallel-plate comb geometry: N = floor(W/pitch) identical overlap cells
/// electrically in parallel, each a plate of width finger_fill*pitch and
/// length finger_length at vertical gap `gap_m` from the fixed electrode.
struct CombGeometry {
    double footprint_width_m = 0.0;  ///< total extent along the motion axis
    double pitch_m = 0.0;
    double finger_fill = 0.5;        ///< electrode width / pitch, in (0, 0.5]
    double finger_length_m = 0.0;
    double gap_m = 0.0;              ///< vertical electrode separation
    double permittivity_f_per_m = 8.854e-12;
    double fringe_floor = 0.0;       ///< C_min/C_max per cell, in [0,1)
    double c_par_f = 0.0;
};

enum class PolarizationSource { external, electret };

/// DC polarization of the transducer. An electret is modeled as an effective
/// DC source of v_pol_v; v_pullin_v is the static pull-in threshold above
/// which the suspension can no longer hold the moving electrode.
struct Polarization {
    PolarizationSource source = PolarizationSource::external;
    double v_pol_v = 0.0;
    double v_pullin_v = 0.0;
};

/// Complete device plus its resistive load.
struct HarvesterDesign {
    MechanicalParams mech;
    CapProfile cap;
    Polarization pol;
    double load_ohms = 0.0;
};

/// One failed check from validate_design. Violations are data, not errors.
struct Violation {
    std::string field;
    std::string message;
};

// ---------------------------------------------------------------------------
// Capacitor operations
// ---------------------------------------------------------------------------

/// C(z) in farads. Strictly positive for any valid profile.
double cap_at(const CapProfile& profile, double z_m);

/// dC/dz in farads per meter; the exact analytic derivative of cap_at for
/// the periodic kinds, the interpolant derivative for the tabulated kind
/// (zero in the clamped regions outside the sample range).
double dcap_dz(const CapProfile& profile, double z_m);

/// Smallest value of C(z) over all z. Used by the integrator's step bound.
double cap_min(const CapProfile& profile);

/// Transformer ratio n = dC/dz * V_pol in coulombs per meter: the ratio of
/// generated current to mass velocity.
double transformer_ratio(const CapProfile& profile, double z_m, double v_pol_v);

/// Constant-charge electrostatic force 0.5*(q/C)^2 * dC/dz in newtons;
/// equals -d/dz of stored_energy at fixed charge.
double electrostatic_force(const CapProfile& profile, double z_m, double q_c);

/// Energy held by the capacitor at charge q: q^2 / (2 C(z)).
double stored_energy(const CapProfile& profile, double z_m, double q_c);

/// Build the cosine profile equivalent to a comb geometry: N parallel cells,
/// per-cell C_max from the parallel-plate formula and C_min = fringe_floor *
/// C_max. Throws InvalidGeometryError when the footprint holds no full cell.
CapProfile profile_from_geometry(const CombGeometry& geom);

/// Full invariant check; throws InvalidProfileError on the first failure.
void validate_profile(const CapProfile& profile);

/// Collect every invariant violation of the design, including the static
/// pull-in guard v_pol >= v_pullin. An empty report means simulatable.
std::vector<Violation> validate_design(const HarvesterDesign& design);

/// Throw on the first validation failure: PullInError for the pull-in guard,
/// InvalidDesignError otherwise.
void require_valid_design(const HarvesterDesign& design);

}  // namespace harvest
