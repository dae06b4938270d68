#include "harvest/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace harvest {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Wrap x into [0, period).
double wrap(double x, double period) {
    double u = x - period * std::floor(x / period);
    if (u >= period) u -= period;  // guards the floor rounding edge
    return u;
}

void check_periodic(const CapProfile& p) {
    if (!(p.pitch_m > 0.0))
        throw InvalidProfileError("capacitor pitch must be > 0");
    if (!(p.c_par_f + p.c_mid_f - p.delta_c_f > 0.0))
        throw InvalidProfileError("capacitance not strictly positive: c_par + c_mid - delta_c <= 0");
    if (p.kind == ProfileKind::triangular) {
        if (!(p.smoothing_m > 0.0))
            throw InvalidProfileError("triangular profile requires smoothing > 0");
        if (!(p.smoothing_m < p.pitch_m / 4.0))
            throw InvalidProfileError("triangular smoothing must be < pitch/4");
    }
}

void check_tabulated(const CapProfile& p) {
    if (p.samples.size() < 4)
        throw InvalidProfileError("tabulated profile needs at least 4 samples");
}

// Triangle shape with unit amplitude, period `p`, peak +1 at u = 0 and
// trough -1 at u = p/2, corners replaced by parabolic caps of half-width w.
// The cap matches value and slope of the straight segments at |d| = w, so
// the result is C^1; the peaks sit 2w/p inside the ideal +/-1 extremes.
double tri_shape(double u, double p, double w) {
    const double slope = 4.0 / p;
    double d_peak = u < p / 2.0 ? u : u - p;      // signed distance to nearest peak
    if (std::abs(d_peak) <= w)
        return 1.0 - slope * (d_peak * d_peak / (2.0 * w) + w / 2.0);
    double d_tr = u - p / 2.0;                    // signed distance to the trough
    if (std::abs(d_tr) <= w)
        return -1.0 + slope * (d_tr * d_tr / (2.0 * w) + w / 2.0);
    if (u < p / 2.0)
        return 1.0 - slope * u;
    return -1.0 + slope * (u - p / 2.0);
}

double tri_shape_deriv(double u, double p, double w) {
    const double slope = 4.0 / p;
    double d_peak = u < p / 2.0 ? u : u - p;
    if (std::abs(d_peak) <= w)
        return -slope * d_peak / w;
    double d_tr = u - p / 2.0;
    if (std::abs(d_tr) <= w)
        return slope * d_tr / w;
    return u < p / 2.0 ? -slope : slope;
}

// Fritsch-Carlson slope at an interior node from the two neighboring secants.
double pchip_interior_slope(double h0, double h1, double s0, double s1) {
    if (s0 == 0.0 || s1 == 0.0 || (s0 > 0.0) != (s1 > 0.0)) return 0.0;
    const double w1 = 2.0 * h1 + h0;
    const double w2 = h1 + 2.0 * h0;
    return (w1 + w2) / (w1 / s0 + w2 / s1);
}

// One-sided endpoint slope, clipped so the end segment stays shape-preserving.
double pchip_end_slope(double h0, double h1, double s0, double s1) {
    double d = ((2.0 * h0 + h1) * s0 - h0 * s1) / (h0 + h1);
    if (d * s0 <= 0.0) return 0.0;
    if ((s0 > 0.0) != (s1 > 0.0) && std::abs(d) > 3.0 * std::abs(s0)) return 3.0 * s0;
    return d;
}

struct HermitePiece {
    double c0, c1, d0, d1, h, z0;
};

// Locate the cubic piece containing z and assemble its node values and
// PCHIP slopes. Slopes depend only on the immediate neighbors, so each
// evaluation stays O(log n) without a precomputed table.
HermitePiece tabulated_piece(const CapProfile& p, double z) {
    const auto& s = p.samples;
    const std::size_t n = s.size();
    std::size_t i = 0;
    {
        std::size_t lo = 0, hi = n - 1;
        while (hi - lo > 1) {
            std::size_t mid = (lo + hi) / 2;
            if (s[mid].z_m <= z) lo = mid; else hi = mid;
        }
        i = lo;
    }
    auto secant = [&](std::size_t k) {
        return (s[k + 1].c_f - s[k].c_f) / (s[k + 1].z_m - s[k].z_m);
    };
    auto spacing = [&](std::size_t k) { return s[k + 1].z_m - s[k].z_m; };
    auto node_slope = [&](std::size_t k) {
        if (k == 0)
            return pchip_end_slope(spacing(0), spacing(1), secant(0), secant(1));
        if (k == n - 1)
            return pchip_end_slope(spacing(n - 2), spacing(n - 3), secant(n - 2), secant(n - 3));
        return pchip_interior_slope(spacing(k - 1), spacing(k), secant(k - 1), secant(k));
    };
    HermitePiece piece;
    piece.z0 = s[i].z_m;
    piece.h = spacing(i);
    piece.c0 = s[i].c_f;
    piece.c1 = s[i + 1].c_f;
    piece.d0 = node_slope(i);
    piece.d1 = node_slope(i + 1);
    return piece;
}

double tabulated_value(const CapProfile& p, double z) {
    const auto& s = p.samples;
    if (z <= s.front().z_m) return s.front().c_f;
    if (z >= s.back().z_m) return s.back().c_f;
    const HermitePiece pc = tabulated_piece(p, z);
    const double t = (z - pc.z0) / pc.h;
    const double t2 = t * t, t3 = t2 * t;
    return (2.0 * t3 - 3.0 * t2 + 1.0) * pc.c0 + (t3 - 2.0 * t2 + t) * pc.h * pc.d0 +
           (-2.0 * t3 + 3.0 * t2) * pc.c1 + (t3 - t2) * pc.h * pc.d1;
}

double tabulated_deriv(const CapProfile& p, double z) {
    const auto& s = p.samples;
    if (z <= s.front().z_m || z >= s.back().z_m) return 0.0;  // clamped outside
    const HermitePiece pc = tabulated_piece(p, z);
    const double t = (z - pc.z0) / pc.h;
    const double t2 = t * t;
    return ((6.0 * t2 - 6.0 * t) * (pc.c0 - pc.c1) / pc.h) +
           (3.0 * t2 - 4.0 * t + 1.0) * pc.d0 + (3.0 * t2 - 2.0 * t) * pc.d1;
}

}  // namespace

double cap_at(const CapProfile& profile, double z_m) {
    switch (profile.kind) {
        case ProfileKind::cosine:
            check_periodic(profile);
            return profile.c_par_f + profile.c_mid_f +
                   profile.delta_c_f * std::cos(kTwoPi * (z_m - profile.z_offset_m) / profile.pitch_m);
        case ProfileKind::triangular:
            check_periodic(profile);
            return profile.c_par_f + profile.c_mid_f +
                   profile.delta_c_f *
                       tri_shape(wrap(z_m - profile.z_offset_m, profile.pitch_m),
                                 profile.pitch_m, profile.smoothing_m);
        case ProfileKind::tabulated:
            check_tabulated(profile);
            return tabulated_value(profile, z_m);
    }
    throw InvalidProfileError("unknown profile kind");
}

double dcap_dz(const CapProfile& profile, double z_m) {
    switch (profile.kind) {
        case ProfileKind::cosine:
            check_periodic(profile);
            return -profile.delta_c_f * (kTwoPi / profile.pitch_m) *
                   std::sin(kTwoPi * (z_m - profile.z_offset_m) / profile.pitch_m);
        case ProfileKind::triangular:
            check_periodic(profile);
            return profile.delta_c_f *
                   tri_shape_deriv(wrap(z_m - profile.z_offset_m, profile.pitch_m),
                                   profile.pitch_m, profile.smoothing_m);
        case ProfileKind::tabulated:
            check_tabulated(profile);
            return tabulated_deriv(profile, z_m);
    }
    throw InvalidProfileError("unknown profile kind");
}

double cap_min(const CapProfile& profile) {
    switch (profile.kind) {
        case ProfileKind::cosine:
            check_periodic(profile);
            return profile.c_par_f + profile.c_mid_f - profile.delta_c_f;
        case ProfileKind::triangular: {
            check_periodic(profile);
            // smoothed trough sits 2w/p above the ideal -delta_c
            const double trough =
                -1.0 + 2.0 * profile.smoothing_m / profile.pitch_m;
            return profile.c_par_f + profile.c_mid_f + profile.delta_c_f * trough;
        }
        case ProfileKind::tabulated: {
            check_tabulated(profile);
            // The shape-preserving interpolant never undershoots the data.
            double m = profile.samples.front().c_f;
            for (const auto& s : profile.samples) m = std::min(m, s.c_f);
            return m;
        }
    }
    throw InvalidProfileError("unknown profile kind");
}

double transformer_ratio(const CapProfile& profile, double z_m, double v_pol_v) {
    return dcap_dz(profile, z_m) * v_pol_v;
}

double electrostatic_force(const CapProfile& profile, double z_m, double q_c) {
    const double c = cap_at(profile, z_m);
    const double v = q_c / c;
    return 0.5 * v * v * dcap_dz(profile, z_m);
}

double stored_energy(const CapProfile& profile, double z_m, double q_c) {
    return q_c * q_c / (2.0 * cap_at(profile, z_m));
}

CapProfile profile_from_geometry(const CombGeometry& g) {
    if (!(g.pitch_m > 0.0 && g.footprint_width_m > 0.0 && g.finger_length_m > 0.0))
        throw InvalidGeometryError("comb lengths must be > 0");
    if (!(g.gap_m > 0.0))
        throw InvalidGeometryError("electrode gap must be > 0");
    if (!(g.finger_fill > 0.0 && g.finger_fill <= 0.5))
        throw InvalidGeometryError("finger_fill must be in (0, 0.5]");
    if (!(g.permittivity_f_per_m > 0.0))
        throw InvalidGeometryError("permittivity must be > 0");
    if (!(g.fringe_floor >= 0.0 && g.fringe_floor < 1.0))
        throw InvalidGeometryError("fringe_floor must be in [0, 1)");

    // Nudge before flooring so an exact integer ratio is not lost to rounding.
    const double cells = std::floor(g.footprint_width_m / g.pitch_m * (1.0 + 1e-12));
    if (cells < 1.0)
        throw InvalidGeometryError("footprint narrower than one electrode pitch: zero cells");

    const double c_max_cell =
        g.permittivity_f_per_m * (g.finger_fill * g.pitch_m) * g.finger_length_m / g.gap_m;
    const double c_min_cell = g.fringe_floor * c_max_cell;

    CapProfile p;
    p.kind = ProfileKind::cosine;
    p.c_par_f = g.c_par_f;
    p.c_mid_f = cells * (c_max_cell + c_min_cell) / 2.0;
    p.delta_c_f = cells * (c_max_cell - c_min_cell) / 2.0;
    p.pitch_m = g.pitch_m;
    p.z_offset_m = 0.0;
    return p;
}

void validate_profile(const CapProfile& profile) {
    if (profile.kind == ProfileKind::tabulated) {
        check_tabulated(profile);
        const auto& s = profile.samples;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (!(s[i].c_f > 0.0))
                throw InvalidProfileError("tabulated capacitance must be > 0 everywhere");
            if (i > 0 && !(s[i].z_m > s[i - 1].z_m))
                throw InvalidProfileError("tabulated samples must be strictly increasing in z");
        }
        return;
    }
    check_periodic(profile);
}

std::vector<Violation> validate_design(const HarvesterDesign& d) {
    std::vector<Violation> v;
    auto fail = [&v](const char* field, std::string msg) {
        v.push_back({field, std::move(msg)});
    };

    if (!(d.mech.mass_kg > 0.0)) fail("mechanical.mass_kg", "mass must be > 0");
    if (!(d.mech.stiffness_n_per_m > 0.0)) fail("mechanical.stiffness_n_per_m", "stiffness must be > 0");
    if (!(d.mech.damping_ns_per_m >= 0.0)) fail("mechanical.damping_ns_per_m", "damping must be >= 0");
    if (!(d.mech.z_max_m > 0.0)) fail("mechanical.z_max_m", "end-stop travel must be > 0");
    if (!(d.mech.restitution >= 0.0 && d.mech.restitution <= 1.0))
        fail("mechanical.restitution", "restitution must be in [0,1]");

    try {
        validate_profile(d.cap);
    } catch (const InvalidProfileError& e) {
        fail("capacitor", e.what());
    }

    if (!(d.pol.v_pol_v >= 0.0)) fail("electrical.v_pol_v", "polarization voltage must be >= 0");
    if (!(d.pol.v_pullin_v > 0.0)) fail("electrical.v_pullin_v", "pull-in threshold must be > 0");
    if (d.pol.v_pol_v >= d.pol.v_pullin_v && d.pol.v_pullin_v > 0.0)
        fail("electrical.v_pol_v", "polarization voltage reaches the pull-in threshold");

    if (!(d.load_ohms > 0.0)) fail("electrical.load_ohm", "load resistance must be > 0");
    return v;
}

void require_valid_design(const HarvesterDesign& design) {
    const auto violations = validate_design(design);
    if (violations.empty()) return;
    for (const auto& v : violations)
        if (v.message.find("pull-in") != std::string::npos)
            throw PullInError(v.field + ": " + v.message);
    throw InvalidDesignError(violations.front().field + ": " + violations.front().message);
}

}  // namespace harvest
