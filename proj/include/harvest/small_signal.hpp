#pragma once

// Linearized equivalent-circuit analysis. The transducer is frozen at an
// operating point (C0, n): a transformer of ratio n loaded by C0 in parallel
// with the load resistor, reflected into the mechanical side as a complex
// impedance. Valid for strokes small against the electrode pitch; large-
// stroke behavior is the transient simulator's job.

#include <complex>
#include <vector>

#include "harvest/model.hpp"

namespace harvest {

/// Transducer linearization point.
struct OperatingPoint {
    double z_eq_m = 0.0;
    double c0_f = 0.0;       ///< capacitance at equilibrium
    double n_c_per_m = 0.0;  ///< transformer ratio dC/dz * V_pol
};

/// One-frequency harmonic solution of the linearized circuit.
struct SmallSignalReport {
    OperatingPoint op;
    double omega_rad_per_s = 0.0;
    std::complex<double> z_e;          ///< reflected electromechanical impedance, N*s/m
    double z_em_magnitude = 0.0;       ///< |z_e|
    double r_matched_ohms = 0.0;       ///< 1/(omega*C0)
    double displacement_amp_m = 0.0;
    double velocity_amp_mps = 0.0;
    double load_power_w = 0.0;
    double load_voltage_amp_v = 0.0;
};

/// Frequency band around resonance where the unclamped displacement
/// amplitude exceeds the end-stop travel.
struct BandReport {
    double f_lo_hz = 0.0;
    double f_hi_hz = 0.0;
    double width_hz = 0.0;
};

/// Evaluate (C0, n) at z_eq. Throws InvalidDesignError if the design fails
/// validation (PullInError for the pull-in case).
OperatingPoint operating_point(const HarvesterDesign& design, double z_eq_m);

/// Electrical branch reflected into the mechanical side:
/// z_e = n^2 R / (1 + j*omega*R*C0). Its real part is the power-extracting
/// damping; its magnitude is n^2 R / sqrt(1 + (omega R C0)^2).
std::complex<double> reflected_impedance(const OperatingPoint& op, double r_load_ohms,
                                         double omega_rad_per_s);

/// Load resistance equal to the capacitor impedance magnitude, 1/(omega*C0).
double matched_load(double c0_f, double omega_rad_per_s);

/// |z_e| at the matched load: n^2 / (sqrt(2)*omega*C0).
double zem_matched(const OperatingPoint& op, double omega_rad_per_s);

/// Natural frequency sqrt(k/m)/(2*pi) in hertz.
double resonance_frequency(const MechanicalParams& mech);

/// Solve the one-frequency steady state under base acceleration of the given
/// amplitude. Linearizes about z = 0.
SmallSignalReport harmonic_response(const HarvesterDesign& design, double omega_rad_per_s,
                                    double accel_amp_mps2);

/// Width of the contiguous interval around resonance where the unclamped
/// harmonic displacement exceeds mech.z_max, evaluated on the given grid.
/// The grid must be strictly increasing and bracket the resonance.
BandReport clipped_band(const HarvesterDesign& design, double accel_amp_mps2,
                        const std::vector<double>& freq_grid_hz);

}  // namespace harvest
