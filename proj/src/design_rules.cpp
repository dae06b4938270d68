#include "harvest/design_rules.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>

#include "harvest/small_signal.hpp"

namespace harvest {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

double tune_resonance(double mass_kg, double f_target_hz) {
    if (!(mass_kg > 0.0)) throw DomainError("mass must be > 0");
    if (!(f_target_hz > 0.0)) throw DomainError("target frequency must be > 0");
    const double w = kTwoPi * f_target_hz;
    return mass_kg * w * w;
}

std::vector<LoadSweepRow> sweep_load(const HarvesterDesign& design, const Excitation& exc,
                                     const SimParams& sim, const std::vector<double>& r_grid_ohms,
                                     int threads) {
    for (std::size_t i = 0; i < r_grid_ohms.size(); ++i) {
        if (!(r_grid_ohms[i] > 0.0)) throw DomainError("load grid values must be > 0");
        if (i > 0 && !(r_grid_ohms[i] > r_grid_ohms[i - 1]))
            throw DomainError("load grid must be strictly increasing");
    }

    std::vector<LoadSweepRow> rows(r_grid_ohms.size());
    auto run_row = [&](std::size_t i) {
        LoadSweepRow& row = rows[i];
        row.r_ohms = r_grid_ohms[i];
        try {
            HarvesterDesign d = design;
            d.load_ohms = r_grid_ohms[i];
            const TransientResult res = exc.mode == ExcitationMode::base_accel
                                            ? simulate_base_excitation(d, exc, sim)
                                            : simulate_prescribed_motion(d, exc, sim);
            row.p_avg_w = res.summary.p_avg_w;
            row.v_rms_v = res.summary.v_load_rms_v;
        } catch (const Error& e) {
            row.error = e.what();
        }
    };

    const int n_threads = std::max(1, threads);
    if (n_threads == 1 || rows.size() <= 1) {
        for (std::size_t i = 0; i < rows.size(); ++i) run_row(i);
        return rows;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    const auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < rows.size(); i = next.fetch_add(1))
            run_row(i);
    };
    const auto count = std::min<std::size_t>(static_cast<std::size_t>(n_threads), rows.size());
    pool.reserve(count);
    for (std::size_t t = 0; t < count; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    return rows;
}

std::vector<PitchScalingRow> pitch_scaling_study(const CombGeometry& geom,
                                                 const std::vector<int>& divisors) {
    std::vector<PitchScalingRow> rows;
    rows.reserve(divisors.size());
    for (int s : divisors) {
        PitchScalingRow row;
        row.divisor = s;
        if (s < 1) {
            row.error = "divisor must be >= 1";
            rows.push_back(row);
            continue;
        }
        try {
            CombGeometry g = geom;
            g.pitch_m = geom.pitch_m / static_cast<double>(s);
            const CapProfile p = profile_from_geometry(g);
            row.pitch_m = p.pitch_m;
            row.c_mid_f = p.c_mid_f;
            row.delta_c_f = p.delta_c_f;
            // cosine profile: peak |dC/dz| = 2 pi delta_c / pitch
            row.n_peak_c_per_m = kTwoPi * p.delta_c_f / p.pitch_m;
        } catch (const Error& e) {
            row.error = e.what();
        }
        rows.push_back(row);
    }
    return rows;
}

std::vector<RankedDesign> optimize_design(const DesignConstraints& c, const Excitation& exc,
                                          const HarvesterDesign& base,
                                          const std::optional<CombGeometry>& geom) {
    if (!(c.mass_max_kg > 0.0 && c.z_max_m > 0.0 && c.footprint_width_m > 0.0 &&
          c.v_pol_max_v >= 0.0))
        throw DomainError("constraints must be positive");
    if (!(c.load_min_ohms > 0.0 && c.load_min_ohms <= c.load_max_ohms))
        throw DomainError("load bounds must be positive and ordered");
    if (exc.mode != ExcitationMode::base_accel || !std::holds_alternative<SineWave>(exc.waveform))
        throw DomainError("optimizer requires a sinusoidal base-acceleration excitation");
    const SineWave& wave = std::get<SineWave>(exc.waveform);
    if (!(wave.frequency_hz > 0.0)) throw DomainError("excitation frequency must be > 0");
    if (geom && geom->footprint_width_m > c.footprint_width_m)
        throw InfeasibleError("comb footprint exceeds the footprint constraint");

    const double omega = kTwoPi * wave.frequency_hz;

    // load grid: 25 log-spaced points (single point when the bounds collapse)
    std::vector<double> r_grid;
    if (c.load_min_ohms == c.load_max_ohms) {
        r_grid.push_back(c.load_min_ohms);
    } else {
        constexpr int kPoints = 25;
        const double lmin = std::log(c.load_min_ohms), lmax = std::log(c.load_max_ohms);
        for (int i = 0; i < kPoints; ++i)
            r_grid.push_back(std::exp(lmin + (lmax - lmin) * i / double(kPoints - 1)));
    }

    // polarization grid: 1 V steps plus the cap itself
    std::vector<double> v_grid;
    for (double v = 0.0; v < c.v_pol_max_v; v += 1.0) v_grid.push_back(v);
    v_grid.push_back(c.v_pol_max_v);

    std::vector<RankedDesign> out;
    for (double v_pol : v_grid) {
        for (double r : r_grid) {
            HarvesterDesign d = base;
            d.mech.mass_kg = c.mass_max_kg;
            d.mech.stiffness_n_per_m = tune_resonance(c.mass_max_kg, wave.frequency_hz);
            d.mech.z_max_m = c.z_max_m;
            d.pol.v_pol_v = v_pol;
            d.load_ohms = r;
            if (!validate_design(d).empty()) continue;

            const SmallSignalReport hr = harmonic_response(d, omega, wave.amplitude);
            RankedDesign cand;
            cand.design = d;
            if (hr.displacement_amp_m > c.z_max_m) {
                const double v_capped = omega * c.z_max_m;
                cand.predicted_p_avg_w = 0.5 * v_capped * v_capped * hr.z_e.real();
                cand.stroke_clipped = true;
            } else {
                cand.predicted_p_avg_w = hr.load_power_w;
            }
            out.push_back(std::move(cand));
        }
    }
    if (out.empty()) throw InfeasibleError("no feasible (load, v_pol) candidate");

    std::sort(out.begin(), out.end(), [](const RankedDesign& a, const RankedDesign& b) {
        if (a.predicted_p_avg_w != b.predicted_p_avg_w)
            return a.predicted_p_avg_w > b.predicted_p_avg_w;
        if (a.design.pol.v_pol_v != b.design.pol.v_pol_v)
            return a.design.pol.v_pol_v < b.design.pol.v_pol_v;
        return a.design.load_ohms < b.design.load_ohms;
    });
    if (out.front().predicted_p_avg_w == 0.0)
        out.front().note = "zero-power optimum: no feasible polarization above 0 V";
    return out;
}

}  // namespace harvest
