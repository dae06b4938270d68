#include "harvest/transient.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace harvest {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kLedgerEnergyFloor = 1e-15;  // J, keeps idle runs finite

// -------------------------------------------------------------------------
// Waveform evaluation
// -------------------------------------------------------------------------

// Uniform access to value / first / second derivative of a waveform.
// Sampled waveforms interpolate linearly and differentiate by centered
// finite differences at the nodes; outside the sample range the value is
// clamped and the derivatives are zero.
class WaveEval {
public:
    explicit WaveEval(const Excitation& exc) {
        if (const auto* s = std::get_if<SineWave>(&exc.waveform)) {
            sine_ = *s;
            is_sine_ = true;
            if (!(sine_.frequency_hz > 0.0))
                throw ConfigError("excitation.freq_hz must be > 0");
            return;
        }
        const auto& w = std::get<SampledWave>(exc.waveform);
        if (w.t_s.size() < 2 || w.t_s.size() != w.value.size())
            throw ConfigError("excitation waveform needs at least 2 (t, value) samples");
        for (std::size_t i = 1; i < w.t_s.size(); ++i)
            if (!(w.t_s[i] > w.t_s[i - 1]))
                throw ConfigError("excitation waveform times must be strictly increasing");
        t_ = w.t_s;
        v_ = w.value;
        const std::size_t n = t_.size();
        d1_.resize(n);
        d2_.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t a = i == 0 ? 0 : i - 1;
            const std::size_t b = i == n - 1 ? n - 1 : i + 1;
            d1_[i] = (v_[b] - v_[a]) / (t_[b] - t_[a]);
        }
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t a = i == 0 ? 0 : i - 1;
            const std::size_t b = i == n - 1 ? n - 1 : i + 1;
            d2_[i] = (d1_[b] - d1_[a]) / (t_[b] - t_[a]);
        }
    }

    double value(double t) const {
        if (is_sine_)
            return sine_.amplitude * std::sin(kTwoPi * sine_.frequency_hz * t + sine_.phase_rad);
        return interp(v_, t, /*clamp_value=*/true);
    }

    double deriv(double t) const {
        if (is_sine_) {
            const double w = kTwoPi * sine_.frequency_hz;
            return sine_.amplitude * w * std::cos(w * t + sine_.phase_rad);
        }
        return interp(d1_, t, /*clamp_value=*/false);
    }

    double second_deriv(double t) const {
        if (is_sine_) {
            const double w = kTwoPi * sine_.frequency_hz;
            return -sine_.amplitude * w * w * std::sin(w * t + sine_.phase_rad);
        }
        return interp(d2_, t, /*clamp_value=*/false);
    }

private:
    double interp(const std::vector<double>& y, double t, bool clamp_value) const {
        if (t <= t_.front()) return clamp_value ? y.front() : 0.0;
        if (t >= t_.back()) return clamp_value ? y.back() : 0.0;
        const auto it = std::upper_bound(t_.begin(), t_.end(), t);
        const std::size_t i = static_cast<std::size_t>(it - t_.begin()) - 1;
        const double f = (t - t_[i]) / (t_[i + 1] - t_[i]);
        return y[i] + f * (y[i + 1] - y[i]);
    }

    bool is_sine_ = false;
    SineWave sine_;
    std::vector<double> t_, v_, d1_, d2_;
};

void check_sim_params(const HarvesterDesign& design, const Excitation& exc, const SimParams& sim) {
    if (!(sim.dt_s > 0.0)) throw ConfigError("sim.dt_s must be > 0");
    if (!(sim.t_end_s > 0.0)) throw ConfigError("sim.t_end_s must be > 0");
    if (!(sim.t_settle_s >= 0.0 && sim.t_settle_s < sim.t_end_s))
        throw ConfigError("sim.t_settle_s must lie in [0, t_end)");
    const double bound = dt_bound(design, exc);
    if (sim.dt_s > bound * (1.0 + 1e-12))
        throw ConfigError("sim.dt_s exceeds the stability bound min(1/(50 f), R*C_min/20)");
}

void append_row(Series& s, const HarvesterDesign& d, double t, double z, double v, double q) {
    const double c = cap_at(d.cap, z);
    const double v_cap = q / c;
    const double i = (d.pol.v_pol_v - v_cap) / d.load_ohms;
    const double v_load = i * d.load_ohms;
    s.t_s.push_back(t);
    s.z_m.push_back(z);
    s.v_mps.push_back(v);
    s.q_c.push_back(q);
    s.c_f.push_back(c);
    s.v_cap_v.push_back(v_cap);
    s.i_a.push_back(i);
    s.v_load_v.push_back(v_load);
    s.p_load_w.push_back(v_load * v_load / d.load_ohms);
}

void reserve_series(Series& s, std::size_t n) {
    s.t_s.reserve(n);
    s.z_m.reserve(n);
    s.v_mps.reserve(n);
    s.q_c.reserve(n);
    s.c_f.reserve(n);
    s.v_cap_v.reserve(n);
    s.i_a.reserve(n);
    s.v_load_v.reserve(n);
    s.p_load_w.reserve(n);
}

double state_energy(const HarvesterDesign& d, double z, double v, double q) {
    return 0.5 * d.mech.mass_kg * v * v + 0.5 * d.mech.stiffness_n_per_m * z * z +
           stored_energy(d.cap, z, q);
}

}  // namespace

double dt_bound(const HarvesterDesign& design, const Excitation& exc) {
    double bound = design.load_ohms * cap_min(design.cap) / 20.0;
    if (const auto* s = std::get_if<SineWave>(&exc.waveform)) {
        if (s->frequency_hz > 0.0)
            bound = std::min(bound, 1.0 / (50.0 * s->frequency_hz));
    }
    return bound;
}

double waveform_value(const Excitation& exc, double t_s) { return WaveEval(exc).value(t_s); }

double waveform_deriv(const Excitation& exc, double t_s) { return WaveEval(exc).deriv(t_s); }

TransientResult simulate_base_excitation(const HarvesterDesign& design, const Excitation& exc,
                                         const SimParams& sim) {
    if (exc.mode != ExcitationMode::base_accel)
        throw ConfigError("excitation.mode must be base for simulate_base_excitation");
    require_valid_design(design);
    check_sim_params(design, exc, sim);
    const WaveEval wave(exc);

    const double dt = sim.dt_s;
    const auto n_steps = static_cast<std::size_t>(std::llround(sim.t_end_s / dt));

    const double m = design.mech.mass_kg;
    const double k = design.mech.stiffness_n_per_m;
    const double b = design.mech.damping_ns_per_m;
    const double z_max = design.mech.z_max_m;
    const double e_rest = design.mech.restitution;
    const double v_pol = design.pol.v_pol_v;
    const double r = design.load_ohms;
    const CapProfile& cap = design.cap;

    TransientResult out;
    out.mode = ExcitationMode::base_accel;
    out.excitation = exc;
    out.sim = sim;
    reserve_series(out.series, n_steps + 1);

    double z = sim.z0_m, v = sim.v0_mps, q = sim.q0_c;
    append_row(out.series, design, 0.0, z, v, q);

    struct Deriv {
        double dz, dv, dq;
    };
    auto rhs = [&](double t, double zz, double vv, double qq) -> Deriv {
        const double c = cap_at(cap, zz);
        const double vc = qq / c;
        const double f_es = 0.5 * vc * vc * dcap_dz(cap, zz);
        return {vv, (-k * zz - b * vv + f_es) / m - wave.value(t), (v_pol - vc) / r};
    };

    for (std::size_t i = 0; i < n_steps; ++i) {
        const double t = static_cast<double>(i) * dt;
        const Deriv k1 = rhs(t, z, v, q);
        const Deriv k2 = rhs(t + 0.5 * dt, z + 0.5 * dt * k1.dz, v + 0.5 * dt * k1.dv,
                             q + 0.5 * dt * k1.dq);
        const Deriv k3 = rhs(t + 0.5 * dt, z + 0.5 * dt * k2.dz, v + 0.5 * dt * k2.dv,
                             q + 0.5 * dt * k2.dq);
        const Deriv k4 = rhs(t + dt, z + dt * k3.dz, v + dt * k3.dv, q + dt * k3.dq);
        z += dt / 6.0 * (k1.dz + 2.0 * k2.dz + 2.0 * k3.dz + k4.dz);
        v += dt / 6.0 * (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv);
        q += dt / 6.0 * (k1.dq + 2.0 * k2.dq + 2.0 * k3.dq + k4.dq);
        const double t_new = static_cast<double>(i + 1) * dt;

        if (!(std::isfinite(z) && std::isfinite(v) && std::isfinite(q)))
            throw NumericalError("integration produced a non-finite state", t_new);

        if (std::abs(z) >= z_max) {
            const double pre = state_energy(design, z, v, q);
            const double sign = z > 0.0 ? 1.0 : -1.0;
            z = sign * z_max;
            if (v * sign > 0.0) v = -e_rest * v;
            Event ev;
            ev.time_s = t_new;
            ev.kind = EventKind::impact;
            ev.energy_loss_j = pre - state_energy(design, z, v, q);
            out.events.push_back(ev);
        }

        append_row(out.series, design, t_new, z, v, q);
    }

    out.summary = summarize(out);
    out.ledger = energy_ledger(out, design);
    return out;
}

TransientResult simulate_prescribed_motion(const HarvesterDesign& design, const Excitation& exc,
                                           const SimParams& sim) {
    if (exc.mode != ExcitationMode::prescribed_motion)
        throw ConfigError("excitation.mode must be prescribed for simulate_prescribed_motion");
    require_valid_design(design);
    check_sim_params(design, exc, sim);
    const WaveEval wave(exc);

    const double dt = sim.dt_s;
    const auto n_steps = static_cast<std::size_t>(std::llround(sim.t_end_s / dt));
    const double v_pol = design.pol.v_pol_v;
    const double r = design.load_ohms;
    const CapProfile& cap = design.cap;

    TransientResult out;
    out.mode = ExcitationMode::prescribed_motion;
    out.excitation = exc;
    out.sim = sim;
    reserve_series(out.series, n_steps + 1);

    double q = sim.q0_c;
    bool outside = std::abs(wave.value(0.0)) > design.mech.z_max_m;
    if (outside) out.events.push_back({0.0, EventKind::clip_warning, 0.0});
    append_row(out.series, design, 0.0, wave.value(0.0), wave.deriv(0.0), q);

    auto dq = [&](double t, double qq) {
        return (v_pol - qq / cap_at(cap, wave.value(t))) / r;
    };

    for (std::size_t i = 0; i < n_steps; ++i) {
        const double t = static_cast<double>(i) * dt;
        const double k1 = dq(t, q);
        const double k2 = dq(t + 0.5 * dt, q + 0.5 * dt * k1);
        const double k3 = dq(t + 0.5 * dt, q + 0.5 * dt * k2);
        const double k4 = dq(t + dt, q + dt * k3);
        q += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        const double t_new = static_cast<double>(i + 1) * dt;

        if (!std::isfinite(q))
            throw NumericalError("integration produced a non-finite state", t_new);

        const double z = wave.value(t_new);
        const bool now_outside = std::abs(z) > design.mech.z_max_m;
        if (now_outside && !outside)
            out.events.push_back({t_new, EventKind::clip_warning, 0.0});
        outside = now_outside;

        append_row(out.series, design, t_new, z, wave.deriv(t_new), q);
    }

    out.summary = summarize(out);
    out.ledger = energy_ledger(out, design);
    return out;
}

EnergyLedger energy_ledger(const TransientResult& result, const HarvesterDesign& design) {
    const Series& s = result.series;
    const std::size_t n = s.t_s.size();
    EnergyLedger led;
    if (n < 2) return led;

    const WaveEval wave(result.excitation);
    const double m = design.mech.mass_kg;
    const double k = design.mech.stiffness_n_per_m;
    const double b = design.mech.damping_ns_per_m;
    const double v_pol = design.pol.v_pol_v;

    // Instantaneous power delivered by the external drive. Under base
    // excitation that is the inertial force -m*a; under prescribed motion it
    // is the probe force needed to impose the motion.
    auto drive_power = [&](std::size_t i) {
        if (result.mode == ExcitationMode::base_accel)
            return -m * wave.value(s.t_s[i]) * s.v_mps[i];
        const double f_probe = m * wave.second_deriv(s.t_s[i]) + k * s.z_m[i] +
                               b * s.v_mps[i] -
                               electrostatic_force(design.cap, s.z_m[i], s.q_c[i]);
        return f_probe * s.v_mps[i];
    };

    double w_base = 0.0, w_source = 0.0, e_load = 0.0, e_damper = 0.0;
    double prev_drive = drive_power(0);
    double prev_damp = b * s.v_mps[0] * s.v_mps[0];
    double prev_src = v_pol * s.i_a[0];
    for (std::size_t i = 1; i < n; ++i) {
        const double h = s.t_s[i] - s.t_s[i - 1];
        const double cur_drive = drive_power(i);
        const double cur_damp = b * s.v_mps[i] * s.v_mps[i];
        const double cur_src = v_pol * s.i_a[i];
        w_base += 0.5 * (prev_drive + cur_drive) * h;
        e_damper += 0.5 * (prev_damp + cur_damp) * h;
        w_source += 0.5 * (prev_src + cur_src) * h;
        e_load += 0.5 * (s.p_load_w[i - 1] + s.p_load_w[i]) * h;
        prev_drive = cur_drive;
        prev_damp = cur_damp;
        prev_src = cur_src;
    }

    led.w_base_j = w_base;
    led.w_source_j = w_source;
    led.e_load_j = e_load;
    led.e_damper_j = e_damper;
    led.de_kin_j = 0.5 * m * (s.v_mps[n - 1] * s.v_mps[n - 1] - s.v_mps[0] * s.v_mps[0]);
    led.de_spring_j = 0.5 * k * (s.z_m[n - 1] * s.z_m[n - 1] - s.z_m[0] * s.z_m[0]);
    led.de_cap_j = stored_energy(design.cap, s.z_m[n - 1], s.q_c[n - 1]) -
                   stored_energy(design.cap, s.z_m[0], s.q_c[0]);
    for (const auto& ev : result.events)
        if (ev.kind == EventKind::impact) led.e_impact_loss_j += ev.energy_loss_j;

    const double balance = led.w_base_j + led.w_source_j - led.de_kin_j - led.de_spring_j -
                           led.de_cap_j - led.e_load_j - led.e_damper_j - led.e_impact_loss_j;
    led.residual_rel =
        std::abs(balance) / std::max(led.e_load_j + led.e_damper_j, kLedgerEnergyFloor);
    return led;
}

Summary summarize(const TransientResult& result) {
    const Series& s = result.series;
    Summary sum;
    if (s.t_s.size() < 2) return sum;

    const double dt = result.sim.dt_s;
    std::size_t i0 = static_cast<std::size_t>(std::ceil(result.sim.t_settle_s / dt - 1e-9));
    i0 = std::min(i0, s.t_s.size() - 1);

    double p_acc = 0.0, v2_acc = 0.0;
    double peak_pos = 0.0, peak_neg = 0.0;
    int last_sign = 0;
    std::int64_t crossings = 0;
    for (std::size_t i = i0; i < s.t_s.size(); ++i) {
        p_acc += s.p_load_w[i];
        v2_acc += s.v_load_v[i] * s.v_load_v[i];
        peak_pos = std::max(peak_pos, s.v_load_v[i]);
        peak_neg = std::min(peak_neg, s.v_load_v[i]);
        const int sign = s.v_load_v[i] > 0.0 ? 1 : (s.v_load_v[i] < 0.0 ? -1 : 0);
        if (sign != 0) {
            if (last_sign != 0 && sign != last_sign) ++crossings;
            last_sign = sign;
        }
    }
    const auto count = static_cast<double>(s.t_s.size() - i0);
    const double window = s.t_s.back() - s.t_s[i0];

    sum.p_avg_w = p_acc / count;
    sum.v_load_rms_v = std::sqrt(v2_acc / count);
    sum.v_load_peak_pos_v = peak_pos;
    sum.v_load_peak_neg_v = peak_neg;
    sum.dominant_freq_hz = window > 0.0 ? static_cast<double>(crossings) / (2.0 * window) : 0.0;
    sum.dominant_freq_low_confidence = crossings < 10;
    for (const auto& ev : result.events)
        if (ev.kind == EventKind::impact && ev.time_s >= result.sim.t_settle_s)
            ++sum.impact_count;
    return sum;
}

}  // namespace harvest
