#include "harvest/io.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace harvest {

namespace {

// Split one CSV line on commas; no quoting, the formats here never need it.
std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& raw, const std::string& where) {
    const std::string s = trim(raw);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw ConfigError("malformed number '" + s + "' in " + where);
    return v;
}

std::vector<std::array<double, 2>> read_two_columns(const std::string& path,
                                                    const std::string& col_a,
                                                    const std::string& col_b) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open CSV file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("empty CSV file: " + path);
    const auto header = split_csv(trim(line));
    if (header.size() != 2 || trim(header[0]) != col_a || trim(header[1]) != col_b)
        throw ConfigError("CSV header must be '" + col_a + "," + col_b + "' in " + path);
    std::vector<std::array<double, 2>> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty()) continue;
        const auto cells = split_csv(t);
        if (cells.size() != 2)
            throw ConfigError(path + ":" + std::to_string(line_no) + ": expected 2 columns");
        const std::string where = path + ":" + std::to_string(line_no);
        rows.push_back({parse_double(cells[0], where), parse_double(cells[1], where)});
    }
    return rows;
}

}  // namespace

std::string format_sci(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12e", v);
    return buf;
}

std::string series_csv_text(const Series& s) {
    std::string out = "t_s,z_m,v_mps,q_c,c_f,v_cap_v,i_a,v_load_v,p_load_w\n";
    out.reserve(out.size() + s.t_s.size() * 9 * 21);
    for (std::size_t i = 0; i < s.t_s.size(); ++i) {
        out += format_sci(s.t_s[i]);
        out += ',';
        out += format_sci(s.z_m[i]);
        out += ',';
        out += format_sci(s.v_mps[i]);
        out += ',';
        out += format_sci(s.q_c[i]);
        out += ',';
        out += format_sci(s.c_f[i]);
        out += ',';
        out += format_sci(s.v_cap_v[i]);
        out += ',';
        out += format_sci(s.i_a[i]);
        out += ',';
        out += format_sci(s.v_load_v[i]);
        out += ',';
        out += format_sci(s.p_load_w[i]);
        out += '\n';
    }
    return out;
}

std::string summary_text(const TransientResult& r) {
    std::ostringstream out;
    out << "p_avg_w=" << format_sci(r.summary.p_avg_w) << '\n';
    out << "v_load_peak_pos_v=" << format_sci(r.summary.v_load_peak_pos_v) << '\n';
    out << "v_load_peak_neg_v=" << format_sci(r.summary.v_load_peak_neg_v) << '\n';
    out << "v_load_rms_v=" << format_sci(r.summary.v_load_rms_v) << '\n';
    out << "dominant_freq_hz=" << format_sci(r.summary.dominant_freq_hz) << '\n';
    out << "dominant_freq_low_confidence=" << (r.summary.dominant_freq_low_confidence ? 1 : 0)
        << '\n';
    out << "impact_count=" << r.summary.impact_count << '\n';
    out << "event_count=" << r.events.size() << '\n';
    out << "w_base_j=" << format_sci(r.ledger.w_base_j) << '\n';
    out << "w_source_j=" << format_sci(r.ledger.w_source_j) << '\n';
    out << "de_kin_j=" << format_sci(r.ledger.de_kin_j) << '\n';
    out << "de_spring_j=" << format_sci(r.ledger.de_spring_j) << '\n';
    out << "de_cap_j=" << format_sci(r.ledger.de_cap_j) << '\n';
    out << "e_load_j=" << format_sci(r.ledger.e_load_j) << '\n';
    out << "e_damper_j=" << format_sci(r.ledger.e_damper_j) << '\n';
    out << "e_impact_loss_j=" << format_sci(r.ledger.e_impact_loss_j) << '\n';
    out << "residual_rel=" << format_sci(r.ledger.residual_rel) << '\n';
    return out.str();
}

std::string fit_text(const FitResult& fit) {
    std::ostringstream out;
    out << "kind=" << (fit.profile.kind == ProfileKind::cosine ? "cosine" : "triangular") << '\n';
    out << "offset_f=" << format_sci(fit.profile.c_mid_f) << '\n';
    out << "delta_c_f=" << format_sci(fit.profile.delta_c_f) << '\n';
    out << "pitch_m=" << format_sci(fit.profile.pitch_m) << '\n';
    out << "z_offset_m=" << format_sci(fit.profile.z_offset_m) << '\n';
    out << "rmse_f=" << format_sci(fit.rmse_f) << '\n';
    out << "max_abs_err_f=" << format_sci(fit.max_abs_err_f) << '\n';
    out << "iterations=" << fit.iterations << '\n';
    out << "converged=" << (fit.converged ? 1 : 0) << '\n';
    return out.str();
}

CapMeasurement read_measurement_csv(const std::string& path) {
    CapMeasurement meas;
    for (const auto& row : read_two_columns(path, "z_m", "c_f"))
        meas.samples.push_back({row[0], row[1]});
    return meas;
}

SampledWave read_waveform_csv(const std::string& path) {
    SampledWave wave;
    for (const auto& row : read_two_columns(path, "t_s", "value")) {
        wave.t_s.push_back(row[0]);
        wave.value.push_back(row[1]);
    }
    return wave;
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".partial";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot write file: " + tmp);
        out << content;
        if (!out) throw ConfigError("write failed: " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace harvest
