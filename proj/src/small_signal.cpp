#include "harvest/small_signal.hpp"

#include <cmath>
#include <numbers>

namespace harvest {

OperatingPoint operating_point(const HarvesterDesign& design, double z_eq_m) {
    require_valid_design(design);
    OperatingPoint op;
    op.z_eq_m = z_eq_m;
    op.c0_f = cap_at(design.cap, z_eq_m);
    op.n_c_per_m = transformer_ratio(design.cap, z_eq_m, design.pol.v_pol_v);
    return op;
}

std::complex<double> reflected_impedance(const OperatingPoint& op, double r_load_ohms,
                                         double omega_rad_per_s) {
    const std::complex<double> den(1.0, omega_rad_per_s * r_load_ohms * op.c0_f);
    return op.n_c_per_m * op.n_c_per_m * r_load_ohms / den;
}

double matched_load(double c0_f, double omega_rad_per_s) {
    return 1.0 / (omega_rad_per_s * c0_f);
}

double zem_matched(const OperatingPoint& op, double omega_rad_per_s) {
    return op.n_c_per_m * op.n_c_per_m /
           (std::sqrt(2.0) * omega_rad_per_s * op.c0_f);
}

double resonance_frequency(const MechanicalParams& mech) {
    return std::sqrt(mech.stiffness_n_per_m / mech.mass_kg) / (2.0 * std::numbers::pi);
}

SmallSignalReport harmonic_response(const HarvesterDesign& design, double omega_rad_per_s,
                                    double accel_amp_mps2) {
    SmallSignalReport r;
    r.op = operating_point(design, 0.0);
    r.omega_rad_per_s = omega_rad_per_s;
    r.z_e = reflected_impedance(r.op, design.load_ohms, omega_rad_per_s);
    r.z_em_magnitude = std::abs(r.z_e);
    r.r_matched_ohms = matched_load(r.op.c0_f, omega_rad_per_s);

    // m*a drives the series mechanical branch b + z_e + j(w*m - k/w).
    const std::complex<double> mech_reactance(
        0.0, omega_rad_per_s * design.mech.mass_kg -
                 design.mech.stiffness_n_per_m / omega_rad_per_s);
    const std::complex<double> denom =
        design.mech.damping_ns_per_m + r.z_e + mech_reactance;
    const double v_amp = design.mech.mass_kg * accel_amp_mps2 / std::abs(denom);

    r.velocity_amp_mps = v_amp;
    r.displacement_amp_m = v_amp / omega_rad_per_s;
    // C0 is lossless, so all real power crossing the transformer lands in R.
    r.load_power_w = 0.5 * v_amp * v_amp * r.z_e.real();
    const double wrc = omega_rad_per_s * design.load_ohms * r.op.c0_f;
    r.load_voltage_amp_v = v_amp * std::abs(r.op.n_c_per_m) * design.load_ohms /
                           std::sqrt(1.0 + wrc * wrc);
    return r;
}

BandReport clipped_band(const HarvesterDesign& design, double accel_amp_mps2,
                        const std::vector<double>& freq_grid_hz) {
    if (freq_grid_hz.size() < 2)
        throw DomainError("frequency grid needs at least 2 points");
    for (std::size_t i = 1; i < freq_grid_hz.size(); ++i)
        if (!(freq_grid_hz[i] > freq_grid_hz[i - 1]))
            throw DomainError("frequency grid must be strictly increasing");

    const double f_res = resonance_frequency(design.mech);
    if (!(freq_grid_hz.front() < f_res && f_res < freq_grid_hz.back()))
        throw DomainError("frequency grid does not bracket the resonance");

    std::vector<char> exceeds(freq_grid_hz.size());
    std::size_t anchor = 0;
    double best = std::abs(freq_grid_hz[0] - f_res);
    for (std::size_t i = 0; i < freq_grid_hz.size(); ++i) {
        const double w = 2.0 * std::numbers::pi * freq_grid_hz[i];
        exceeds[i] = harmonic_response(design, w, accel_amp_mps2).displacement_amp_m >
                     design.mech.z_max_m;
        const double dist = std::abs(freq_grid_hz[i] - f_res);
        if (dist < best) {
            best = dist;
            anchor = i;
        }
    }

    BandReport band;
    if (!exceeds[anchor]) {
        band.f_lo_hz = band.f_hi_hz = f_res;
        band.width_hz = 0.0;
        return band;
    }
    std::size_t lo = anchor, hi = anchor;
    while (lo > 0 && exceeds[lo - 1]) --lo;
    while (hi + 1 < freq_grid_hz.size() && exceeds[hi + 1]) ++hi;
    band.f_lo_hz = freq_grid_hz[lo];
    band.f_hi_hz = freq_grid_hz[hi];
    band.width_hz = band.f_hi_hz - band.f_lo_hz;
    return band;
}

}  // namespace harvest
