#include "harvest/config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <sstream>

#include "harvest/io.hpp"
#include "harvest/small_signal.hpp"

namespace harvest {

namespace {

struct KeyDef {
    const char* section;
    const char* key;
    std::optional<double> RunConfig::* dval;
    std::optional<std::string> RunConfig::* sval;
};

// Single source of truth for the schema: parsing, emission and sweep-key
// lookup all walk this table, in this order.
constexpr std::array<KeyDef, 36> kSchema{{
    {"mechanical", "mass_kg", &RunConfig::mass_kg, nullptr},
    {"mechanical", "stiffness_n_per_m", &RunConfig::stiffness_n_per_m, nullptr},
    {"mechanical", "damping_ns_per_m", &RunConfig::damping_ns_per_m, nullptr},
    {"mechanical", "z_max_m", &RunConfig::z_max_m, nullptr},
    {"mechanical", "restitution", &RunConfig::restitution, nullptr},
    {"capacitor", "profile", nullptr, &RunConfig::profile},
    {"capacitor", "c_par_f", &RunConfig::c_par_f, nullptr},
    {"capacitor", "c_mid_f", &RunConfig::c_mid_f, nullptr},
    {"capacitor", "delta_c_f", &RunConfig::delta_c_f, nullptr},
    {"capacitor", "pitch_m", &RunConfig::pitch_m, nullptr},
    {"capacitor", "z_offset_m", &RunConfig::z_offset_m, nullptr},
    {"capacitor", "smoothing_m", &RunConfig::smoothing_m, nullptr},
    {"capacitor", "table_csv", nullptr, &RunConfig::table_csv},
    {"capacitor", "footprint_width_m", &RunConfig::footprint_width_m, nullptr},
    {"capacitor", "finger_fill", &RunConfig::finger_fill, nullptr},
    {"capacitor", "finger_length_m", &RunConfig::finger_length_m, nullptr},
    {"capacitor", "gap_m", &RunConfig::gap_m, nullptr},
    {"capacitor", "permittivity_f_per_m", &RunConfig::permittivity_f_per_m, nullptr},
    {"capacitor", "fringe_floor", &RunConfig::fringe_floor, nullptr},
    {"electrical", "source", nullptr, &RunConfig::source},
    {"electrical", "v_pol_v", &RunConfig::v_pol_v, nullptr},
    {"electrical", "v_pullin_v", &RunConfig::v_pullin_v, nullptr},
    {"electrical", "load_ohm", &RunConfig::load_ohm, nullptr},
    {"excitation", "mode", nullptr, &RunConfig::mode},
    {"excitation", "shape", nullptr, &RunConfig::shape},
    {"excitation", "accel_g", &RunConfig::accel_g, nullptr},
    {"excitation", "amp_m", &RunConfig::amp_m, nullptr},
    {"excitation", "freq_hz", &RunConfig::freq_hz, nullptr},
    {"excitation", "phase_rad", &RunConfig::phase_rad, nullptr},
    {"excitation", "waveform_csv", nullptr, &RunConfig::waveform_csv},
    {"sim", "dt_s", &RunConfig::dt_s, nullptr},
    {"sim", "t_end_s", &RunConfig::t_end_s, nullptr},
    {"sim", "t_settle_s", &RunConfig::t_settle_s, nullptr},
    {"sim", "q0_c", &RunConfig::q0_c, nullptr},
    {"sim", "z0_m", &RunConfig::z0_m, nullptr},
    {"sim", "v0_mps", &RunConfig::v0_mps, nullptr},
}};

template <typename F>
void for_each_key(F&& f) {
    for (const auto& def : kSchema) f(def);
}

const KeyDef* find_key(const std::string& section, const std::string& key) {
    for (const auto& def : kSchema)
        if (section == def.section && key == def.key) return &def;
    return nullptr;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_double_cfg(const std::string& raw, const std::string& where) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
    if (ec != std::errc() || ptr != raw.data() + raw.size() || !std::isfinite(v))
        throw ConfigError(where + ": malformed number '" + raw + "'");
    return v;
}

// Shortest representation that parses back to the identical double.
std::string format_roundtrip(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string resolve_path(const std::string& path, const std::string& base_dir) {
    std::filesystem::path p(path);
    if (p.is_absolute() || base_dir.empty()) return path;
    return (std::filesystem::path(base_dir) / p).string();
}

double required(const std::optional<double>& v, const char* name) {
    if (!v) throw ConfigError(std::string("missing key ") + name);
    return *v;
}

void reject(const std::optional<double>& v, const char* name, const std::string& why) {
    if (v) throw ConfigError(std::string(name) + " is not allowed " + why);
}

void reject(const std::optional<std::string>& v, const char* name, const std::string& why) {
    if (v) throw ConfigError(std::string(name) + " is not allowed " + why);
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::string section;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const std::string where = "line " + std::to_string(line_no);
        if (t.front() == '[') {
            if (t.back() != ']') throw ConfigError(where + ": malformed section header");
            section = trim(t.substr(1, t.size() - 2));
            bool known = false;
            for_each_key([&](const KeyDef& def) { known = known || section == def.section; });
            if (!known) throw ConfigError(where + ": unknown section [" + section + "]");
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (section.empty()) throw ConfigError(where + ": key '" + key + "' outside any section");
        const KeyDef* def = find_key(section, key);
        if (!def)
            throw ConfigError(where + ": unknown key '" + section + "." + key + "'");
        if (def->dval) {
            if ((cfg.*(def->dval)).has_value())
                throw ConfigError(where + ": duplicate key '" + section + "." + key + "'");
            cfg.*(def->dval) = parse_double_cfg(value, where);
        } else {
            if ((cfg.*(def->sval)).has_value())
                throw ConfigError(where + ": duplicate key '" + section + "." + key + "'");
            cfg.*(def->sval) = value;
        }
    }
    return cfg;
}

RunConfig load_config(const std::string& path) { return parse_config(read_file(path)); }

std::string emit_config(const RunConfig& cfg) {
    std::ostringstream out;
    std::string open_section;
    for_each_key([&](const KeyDef& def) {
        const bool present = def.dval ? (cfg.*(def.dval)).has_value()
                                      : (cfg.*(def.sval)).has_value();
        if (!present) return;
        if (open_section != def.section) {
            if (!open_section.empty()) out << '\n';
            out << '[' << def.section << "]\n";
            open_section = def.section;
        }
        out << def.key << " = ";
        if (def.dval)
            out << format_roundtrip(*(cfg.*(def.dval)));
        else
            out << *(cfg.*(def.sval));
        out << '\n';
    });
    return out.str();
}

HarvesterDesign design_from_config(const RunConfig& cfg, const std::string& base_dir) {
    HarvesterDesign d;
    d.mech.mass_kg = required(cfg.mass_kg, "mechanical.mass_kg");
    d.mech.stiffness_n_per_m = required(cfg.stiffness_n_per_m, "mechanical.stiffness_n_per_m");
    d.mech.damping_ns_per_m = required(cfg.damping_ns_per_m, "mechanical.damping_ns_per_m");
    d.mech.z_max_m = required(cfg.z_max_m, "mechanical.z_max_m");
    d.mech.restitution = required(cfg.restitution, "mechanical.restitution");

    if (!cfg.profile) throw ConfigError("missing key capacitor.profile");
    const std::string& kind = *cfg.profile;
    const std::string ctx = "with capacitor.profile = " + kind;
    if (kind == "cosine" || kind == "triangular") {
        d.cap.kind = kind == "cosine" ? ProfileKind::cosine : ProfileKind::triangular;
        d.cap.c_par_f = cfg.c_par_f.value_or(0.0);
        d.cap.c_mid_f = required(cfg.c_mid_f, "capacitor.c_mid_f");
        d.cap.delta_c_f = required(cfg.delta_c_f, "capacitor.delta_c_f");
        d.cap.pitch_m = required(cfg.pitch_m, "capacitor.pitch_m");
        d.cap.z_offset_m = cfg.z_offset_m.value_or(0.0);
        if (kind == "triangular")
            d.cap.smoothing_m = required(cfg.smoothing_m, "capacitor.smoothing_m");
        else
            reject(cfg.smoothing_m, "capacitor.smoothing_m", ctx);
        reject(cfg.table_csv, "capacitor.table_csv", ctx);
        reject(cfg.footprint_width_m, "capacitor.footprint_width_m", ctx);
        reject(cfg.finger_fill, "capacitor.finger_fill", ctx);
        reject(cfg.finger_length_m, "capacitor.finger_length_m", ctx);
        reject(cfg.gap_m, "capacitor.gap_m", ctx);
        reject(cfg.permittivity_f_per_m, "capacitor.permittivity_f_per_m", ctx);
        reject(cfg.fringe_floor, "capacitor.fringe_floor", ctx);
    } else if (kind == "table") {
        if (!cfg.table_csv) throw ConfigError("missing key capacitor.table_csv");
        d.cap.kind = ProfileKind::tabulated;
        const CapMeasurement meas = read_measurement_csv(resolve_path(*cfg.table_csv, base_dir));
        d.cap.samples = meas.samples;
        reject(cfg.c_mid_f, "capacitor.c_mid_f", ctx);
        reject(cfg.delta_c_f, "capacitor.delta_c_f", ctx);
        reject(cfg.pitch_m, "capacitor.pitch_m", ctx);
        reject(cfg.z_offset_m, "capacitor.z_offset_m", ctx);
        reject(cfg.smoothing_m, "capacitor.smoothing_m", ctx);
        reject(cfg.footprint_width_m, "capacitor.footprint_width_m", ctx);
    } else if (kind == "geometry") {
        d.cap = profile_from_geometry(*geometry_from_config(cfg));
        reject(cfg.c_mid_f, "capacitor.c_mid_f", ctx);
        reject(cfg.delta_c_f, "capacitor.delta_c_f", ctx);
        reject(cfg.table_csv, "capacitor.table_csv", ctx);
        reject(cfg.smoothing_m, "capacitor.smoothing_m", ctx);
    } else {
        throw ConfigError("capacitor.profile must be cosine, triangular, table or geometry");
    }

    const std::string source = cfg.source.value_or("external");
    if (source == "external")
        d.pol.source = PolarizationSource::external;
    else if (source == "electret")
        d.pol.source = PolarizationSource::electret;
    else
        throw ConfigError("electrical.source must be external or electret");
    d.pol.v_pol_v = required(cfg.v_pol_v, "electrical.v_pol_v");
    d.pol.v_pullin_v = required(cfg.v_pullin_v, "electrical.v_pullin_v");
    d.load_ohms = required(cfg.load_ohm, "electrical.load_ohm");
    return d;
}

std::optional<CombGeometry> geometry_from_config(const RunConfig& cfg) {
    if (!cfg.profile || *cfg.profile != "geometry") return std::nullopt;
    CombGeometry g;
    g.footprint_width_m = required(cfg.footprint_width_m, "capacitor.footprint_width_m");
    g.pitch_m = required(cfg.pitch_m, "capacitor.pitch_m");
    g.finger_fill = required(cfg.finger_fill, "capacitor.finger_fill");
    g.finger_length_m = required(cfg.finger_length_m, "capacitor.finger_length_m");
    g.gap_m = required(cfg.gap_m, "capacitor.gap_m");
    g.permittivity_f_per_m = cfg.permittivity_f_per_m.value_or(8.854e-12);
    g.fringe_floor = cfg.fringe_floor.value_or(0.0);
    g.c_par_f = cfg.c_par_f.value_or(0.0);
    return g;
}

Excitation excitation_from_config(const RunConfig& cfg, const std::string& base_dir) {
    Excitation exc;
    if (!cfg.mode) throw ConfigError("missing key excitation.mode");
    if (*cfg.mode == "base")
        exc.mode = ExcitationMode::base_accel;
    else if (*cfg.mode == "prescribed")
        exc.mode = ExcitationMode::prescribed_motion;
    else
        throw ConfigError("excitation.mode must be base or prescribed");

    if (!cfg.shape) throw ConfigError("missing key excitation.shape");
    if (*cfg.shape == "sine") {
        SineWave w;
        w.frequency_hz = required(cfg.freq_hz, "excitation.freq_hz");
        w.phase_rad = cfg.phase_rad.value_or(0.0);
        if (exc.mode == ExcitationMode::base_accel) {
            w.amplitude = required(cfg.accel_g, "excitation.accel_g") * kStandardGravity;
            reject(cfg.amp_m, "excitation.amp_m", "with excitation.mode = base");
        } else {
            w.amplitude = required(cfg.amp_m, "excitation.amp_m");
            reject(cfg.accel_g, "excitation.accel_g", "with excitation.mode = prescribed");
        }
        reject(cfg.waveform_csv, "excitation.waveform_csv", "with excitation.shape = sine");
        exc.waveform = w;
    } else if (*cfg.shape == "csv") {
        if (!cfg.waveform_csv) throw ConfigError("missing key excitation.waveform_csv");
        exc.waveform = read_waveform_csv(resolve_path(*cfg.waveform_csv, base_dir));
        reject(cfg.accel_g, "excitation.accel_g", "with excitation.shape = csv");
        reject(cfg.amp_m, "excitation.amp_m", "with excitation.shape = csv");
        reject(cfg.freq_hz, "excitation.freq_hz", "with excitation.shape = csv");
        reject(cfg.phase_rad, "excitation.phase_rad", "with excitation.shape = csv");
    } else {
        throw ConfigError("excitation.shape must be sine or csv");
    }
    return exc;
}

SimParams sim_from_config(const RunConfig& cfg, const HarvesterDesign& design,
                          const Excitation& exc) {
    SimParams sim;
    sim.dt_s = cfg.dt_s.value_or(dt_bound(design, exc));
    sim.z0_m = cfg.z0_m.value_or(0.0);
    sim.v0_mps = cfg.v0_mps.value_or(0.0);

    const double z_start = exc.mode == ExcitationMode::prescribed_motion
                               ? waveform_value(exc, 0.0)
                               : sim.z0_m;
    sim.q0_c = cfg.q0_c.value_or(cap_at(design.cap, z_start) * design.pol.v_pol_v);

    const double rc = design.load_ohms * cap_at(design.cap, z_start);
    double settle = 5.0 * rc;
    double horizon = 10.0 * rc;
    if (exc.mode == ExcitationMode::base_accel) {
        const double f_res = resonance_frequency(design.mech);
        settle = std::max(settle, 10.0 / f_res);
        if (design.mech.damping_ns_per_m > 0.0)
            settle = std::max(settle, 10.0 * design.mech.mass_kg / design.mech.damping_ns_per_m);
        horizon = settle + 10.0 / f_res;
    } else if (const auto* s = std::get_if<SineWave>(&exc.waveform)) {
        settle = std::max(settle, 3.0 / s->frequency_hz);
        horizon = settle + 10.0 / s->frequency_hz;
    } else {
        const auto& w = std::get<SampledWave>(exc.waveform);
        horizon = w.t_s.back();
        settle = std::min(settle, horizon / 2.0);
    }
    sim.t_settle_s = cfg.t_settle_s.value_or(settle);
    sim.t_end_s = cfg.t_end_s.value_or(std::max(horizon, sim.t_settle_s * 1.5));
    return sim;
}

bool is_numeric_key(const std::string& dotted_key) {
    const auto dot = dotted_key.find('.');
    if (dot == std::string::npos) return false;
    const KeyDef* def = find_key(dotted_key.substr(0, dot), dotted_key.substr(dot + 1));
    return def != nullptr && def->dval != nullptr;
}

void set_numeric_key(RunConfig& cfg, const std::string& dotted_key, double value) {
    const auto dot = dotted_key.find('.');
    const KeyDef* def = dot == std::string::npos
                            ? nullptr
                            : find_key(dotted_key.substr(0, dot), dotted_key.substr(dot + 1));
    if (!def) throw ConfigError("unknown config key '" + dotted_key + "'");
    if (!def->dval) throw ConfigError("config key '" + dotted_key + "' is not numeric");
    cfg.*(def->dval) = value;
}

DesignConstraints load_constraints(const std::string& path) {
    DesignConstraints c;
    std::istringstream in(read_file(path));
    std::string line, section;
    std::size_t line_no = 0;
    bool seen[6] = {};
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const std::string where = path + ":" + std::to_string(line_no);
        if (t.front() == '[') {
            if (t.back() != ']') throw ConfigError(where + ": malformed section header");
            section = trim(t.substr(1, t.size() - 2));
            if (section != "constraints")
                throw ConfigError(where + ": unknown section [" + section + "]");
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
        const std::string key = trim(t.substr(0, eq));
        const double value = parse_double_cfg(trim(t.substr(eq + 1)), where);
        if (section != "constraints")
            throw ConfigError(where + ": key '" + key + "' outside [constraints]");
        if (key == "mass_max_kg") {
            c.mass_max_kg = value;
            seen[0] = true;
        } else if (key == "z_max_m") {
            c.z_max_m = value;
            seen[1] = true;
        } else if (key == "footprint_width_m") {
            c.footprint_width_m = value;
            seen[2] = true;
        } else if (key == "v_pol_max_v") {
            c.v_pol_max_v = value;
            seen[3] = true;
        } else if (key == "load_min_ohm") {
            c.load_min_ohms = value;
            seen[4] = true;
        } else if (key == "load_max_ohm") {
            c.load_max_ohms = value;
            seen[5] = true;
        } else {
            throw ConfigError(where + ": unknown key 'constraints." + key + "'");
        }
    }
    const char* names[6] = {"mass_max_kg", "z_max_m",     "footprint_width_m",
                            "v_pol_max_v", "load_min_ohm", "load_max_ohm"};
    for (int i = 0; i < 6; ++i)
        if (!seen[i]) throw ConfigError("missing key constraints." + std::string(names[i]));
    return c;
}

}  // namespace harvest
