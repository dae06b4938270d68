#include "harvest/cli.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <thread>
#include <vector>

#include "harvest/config.hpp"
#include "harvest/io.hpp"
#include "harvest/scenarios.hpp"

namespace harvest::cli {

namespace {

namespace fs = std::filesystem;

std::string parent_dir(const std::string& path) {
    return fs::path(path).parent_path().string();
}

TransientResult run_config(const RunConfig& cfg, const std::string& base_dir,
                           HarvesterDesign* design_out = nullptr) {
    const HarvesterDesign design = design_from_config(cfg, base_dir);
    const Excitation exc = excitation_from_config(cfg, base_dir);
    const SimParams sim = sim_from_config(cfg, design, exc);
    if (design_out) *design_out = design;
    return exc.mode == ExcitationMode::base_accel
               ? simulate_base_excitation(design, exc, sim)
               : simulate_prescribed_motion(design, exc, sim);
}

// Map a thrown error to the documented exit codes, printing the message.
int report(const Error& e, int code) {
    std::cerr << "error: " << e.what() << '\n';
    return code;
}

// Commas inside error messages would break the table layout.
std::string csv_safe(std::string s) {
    for (auto& ch : s)
        if (ch == ',' || ch == '\n') ch = ';';
    return s;
}

struct GridSpec {
    bool log = false;
    double min = 0.0, max = 0.0;
    int count = 0;
};

GridSpec parse_grid(const std::string& spec) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = spec.find(':', start);
        if (pos == std::string::npos) {
            parts.push_back(spec.substr(start));
            break;
        }
        parts.push_back(spec.substr(start, pos - start));
        start = pos + 1;
    }
    if (parts.size() != 4) throw ConfigError("grid spec must be lin|log:min:max:count");
    GridSpec g;
    if (parts[0] == "log")
        g.log = true;
    else if (parts[0] != "lin")
        throw ConfigError("grid spec must start with lin or log");
    auto num = [](const std::string& s, const char* what) {
        double v = 0.0;
        const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || p != s.data() + s.size())
            throw ConfigError(std::string("malformed grid ") + what + " '" + s + "'");
        return v;
    };
    g.min = num(parts[1], "min");
    g.max = num(parts[2], "max");
    g.count = static_cast<int>(num(parts[3], "count"));
    if (g.count < 1) throw ConfigError("grid count must be >= 1");
    if (g.count > 1 && !(g.max > g.min)) throw ConfigError("grid needs max > min");
    if (g.log && !(g.min > 0.0)) throw ConfigError("log grid needs min > 0");
    return g;
}

std::vector<double> grid_values(const GridSpec& g) {
    std::vector<double> v;
    if (g.count == 1) {
        v.push_back(g.min);
        return v;
    }
    for (int i = 0; i < g.count; ++i) {
        const double f = static_cast<double>(i) / (g.count - 1);
        v.push_back(g.log ? std::exp(std::log(g.min) + f * (std::log(g.max) - std::log(g.min)))
                          : g.min + f * (g.max - g.min));
    }
    return v;
}

}  // namespace

int cmd_simulate(const std::string& config_path, const std::string& out_path) {
    try {
        const RunConfig cfg = load_config(config_path);
        const TransientResult res = run_config(cfg, parent_dir(config_path));
        write_file_atomic(out_path, series_csv_text(res.series));
        write_file_atomic(out_path + ".summary", summary_text(res));
        return exit_code::ok;
    } catch (const PullInError& e) {
        return report(e, exit_code::pull_in);
    } catch (const NumericalError& e) {
        return report(e, exit_code::numerical);
    } catch (const Error& e) {
        return report(e, exit_code::config);
    }
}

int cmd_scenario(const std::string& name, const std::string& out_dir) {
    try {
        const ScenarioBundle bundle = scenario(name);
        fs::create_directories(out_dir);
        const fs::path dir(out_dir);

        std::ostringstream checks;
        bool all_pass = true;
        auto check = [&](const Expectation& e, double value) {
            const bool ok = value >= e.lo && value <= e.hi;
            all_pass = all_pass && ok;
            checks << (ok ? "PASS" : "FAIL") << ' ' << e.key << '=' << format_sci(value)
                   << " expected [" << format_sci(e.lo) << ", " << format_sci(e.hi) << "]\n";
        };

        if (bundle.kind == ScenarioKind::transient) {
            const std::string cfg_path = (dir / "scenario.cfg").string();
            write_file_atomic(cfg_path, emit_config(bundle.config));
            const RunConfig cfg = load_config(cfg_path);
            HarvesterDesign design;
            const TransientResult res = run_config(cfg, out_dir, &design);
            write_file_atomic((dir / "series.csv").string(), series_csv_text(res.series));
            write_file_atomic((dir / "series.csv.summary").string(), summary_text(res));
            for (const auto& e : bundle.expectations)
                check(e, scenario_metric(res, design, e.key));
        } else {
            const std::string meas_path = (dir / "measurement.csv").string();
            std::string csv = "z_m,c_f\n";
            for (const auto& s : bundle.measurement.samples)
                csv += format_sci(s.z_m) + "," + format_sci(s.c_f) + "\n";
            write_file_atomic(meas_path, csv);
            const FitResult fit = fit_cap_profile(bundle.measurement, bundle.fit_kind);
            write_file_atomic((dir / "fit.txt").string(), fit_text(fit));
            for (const auto& e : bundle.expectations)
                check(e, scenario_fit_metric(fit, e.key));
        }

        write_file_atomic((dir / "checks.txt").string(), checks.str());
        std::cout << checks.str();
        return all_pass ? exit_code::ok : exit_code::expectation;
    } catch (const PullInError& e) {
        return report(e, exit_code::pull_in);
    } catch (const NumericalError& e) {
        return report(e, exit_code::numerical);
    } catch (const FitError& e) {
        return report(e, exit_code::fit);
    } catch (const Error& e) {
        return report(e, exit_code::config);
    }
}

int cmd_sweep(const std::string& config_path, const std::string& sweep_key,
              const std::string& grid_spec, const std::string& out_path, int threads) {
    try {
        const RunConfig base = load_config(config_path);
        if (!is_numeric_key(sweep_key))
            throw ConfigError("sweep key '" + sweep_key + "' is not a numeric config key");
        const std::vector<double> values = grid_values(parse_grid(grid_spec));
        const std::string base_dir = parent_dir(config_path);

        struct Row {
            double value = 0.0;
            Summary summary;
            double residual = 0.0;
            std::string error;
        };
        std::vector<Row> rows(values.size());

        auto run_row = [&](std::size_t i) {
            rows[i].value = values[i];
            try {
                RunConfig cfg = base;
                set_numeric_key(cfg, sweep_key, values[i]);
                const TransientResult res = run_config(cfg, base_dir);
                rows[i].summary = res.summary;
                rows[i].residual = res.ledger.residual_rel;
            } catch (const Error& e) {
                rows[i].error = csv_safe(e.what());
            }
        };

        const int n_threads = std::max(1, threads);
        if (n_threads == 1) {
            for (std::size_t i = 0; i < rows.size(); ++i) run_row(i);
        } else {
            std::atomic<std::size_t> next{0};
            std::vector<std::thread> pool;
            const auto n = std::min<std::size_t>(n_threads, rows.size());
            for (std::size_t t = 0; t < n; ++t)
                pool.emplace_back([&] {
                    for (std::size_t i = next.fetch_add(1); i < rows.size();
                         i = next.fetch_add(1))
                        run_row(i);
                });
            for (auto& th : pool) th.join();
        }

        std::string csv = sweep_key +
                          ",p_avg_w,v_load_rms_v,v_load_peak_pos_v,v_load_peak_neg_v,"
                          "dominant_freq_hz,impact_count,residual_rel,error\n";
        std::size_t ok_rows = 0;
        for (const auto& r : rows) {
            csv += format_sci(r.value) + ",";
            if (r.error.empty()) {
                ++ok_rows;
                csv += format_sci(r.summary.p_avg_w) + "," + format_sci(r.summary.v_load_rms_v) +
                       "," + format_sci(r.summary.v_load_peak_pos_v) + "," +
                       format_sci(r.summary.v_load_peak_neg_v) + "," +
                       format_sci(r.summary.dominant_freq_hz) + "," +
                       std::to_string(r.summary.impact_count) + "," + format_sci(r.residual) +
                       ",\n";
            } else {
                csv += ",,,,,,," + r.error + "\n";
            }
        }
        write_file_atomic(out_path, csv);
        if (ok_rows == 0) {
            std::cerr << "error: every sweep row failed\n";
            return exit_code::config;
        }
        return exit_code::ok;
    } catch (const Error& e) {
        return report(e, exit_code::config);
    }
}

int cmd_capfit(const std::string& measurement_csv, const std::string& kind,
               const std::string& out_path) {
    ProfileKind pk;
    if (kind == "cosine")
        pk = ProfileKind::cosine;
    else if (kind == "triangular")
        pk = ProfileKind::triangular;
    else {
        std::cerr << "error: fit kind must be cosine or triangular\n";
        return exit_code::config;
    }

    auto write_outputs = [&](const FitResult& fit, const CapMeasurement& meas) {
        write_file_atomic(out_path, fit_text(fit));
        std::string curve = "z_m,c_fit_f,dcdz_fit_f_per_m\n";
        const double z0 = meas.samples.front().z_m;
        const double z1 = meas.samples.back().z_m;
        for (int i = 0; i < 1000; ++i) {
            const double z = z0 + (z1 - z0) * static_cast<double>(i) / 999.0;
            curve += format_sci(z) + "," + format_sci(cap_at(fit.profile, z)) + "," +
                     format_sci(dcap_dz(fit.profile, z)) + "\n";
        }
        write_file_atomic(out_path + ".curve.csv", curve);
    };

    try {
        const CapMeasurement meas = read_measurement_csv(measurement_csv);
        try {
            const FitResult fit = fit_cap_profile(meas, pk);
            write_outputs(fit, meas);
            return exit_code::ok;
        } catch (const FitError& e) {
            write_outputs(e.best_so_far, meas);
            return report(e, exit_code::fit);
        }
    } catch (const Error& e) {
        return report(e, exit_code::config);
    }
}

int cmd_optimize(const std::string& config_path, const std::string& constraints_path,
                 const std::string& out_path) {
    try {
        const RunConfig cfg = load_config(config_path);
        const std::string base_dir = parent_dir(config_path);
        const HarvesterDesign base = design_from_config(cfg, base_dir);
        const Excitation exc = excitation_from_config(cfg, base_dir);
        const DesignConstraints constraints = load_constraints(constraints_path);

        const auto ranked = optimize_design(constraints, exc, base, geometry_from_config(cfg));

        std::string csv = "rank,load_ohm,v_pol_v,predicted_p_avg_w,stroke_clipped,note\n";
        for (std::size_t i = 0; i < ranked.size(); ++i) {
            const auto& r = ranked[i];
            csv += std::to_string(i + 1) + "," + format_sci(r.design.load_ohms) + "," +
                   format_sci(r.design.pol.v_pol_v) + "," + format_sci(r.predicted_p_avg_w) +
                   "," + (r.stroke_clipped ? "1" : "0") + "," + csv_safe(r.note) + "\n";
        }
        write_file_atomic(out_path, csv);

        RunConfig best_cfg = cfg;
        const HarvesterDesign& best = ranked.front().design;
        best_cfg.mass_kg = best.mech.mass_kg;
        best_cfg.stiffness_n_per_m = best.mech.stiffness_n_per_m;
        best_cfg.z_max_m = best.mech.z_max_m;
        best_cfg.v_pol_v = best.pol.v_pol_v;
        best_cfg.load_ohm = best.load_ohms;
        write_file_atomic(out_path + ".best.cfg", emit_config(best_cfg));
        return exit_code::ok;
    } catch (const InfeasibleError& e) {
        return report(e, exit_code::infeasible);
    } catch (const Error& e) {
        return report(e, exit_code::config);
    }
}

}  // namespace harvest::cli
