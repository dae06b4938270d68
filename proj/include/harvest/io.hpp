#pragma once

// File formats: fixed-column CSV for time series and tables, key=value text
// for summaries. All numeric output is locale-independent scientific
// notation with 13 significant digits, so repeated runs are byte-identical.

#include <string>
#include <vector>

#include "harvest/fit.hpp"
#include "harvest/transient.hpp"

namespace harvest {

/// Locale-independent "%.12e" rendering.
std::string format_sci(double v);

/// Time series as CSV, header
/// t_s,z_m,v_mps,q_c,c_f,v_cap_v,i_a,v_load_v,p_load_w.
std::string series_csv_text(const Series& series);

/// Summary, events and energy ledger as key=value lines.
std::string summary_text(const TransientResult& result);

/// Fitted profile parameters and error statistics as key=value lines.
std::string fit_text(const FitResult& fit);

/// Strict CSV readers; headers are mandatory and checked.
CapMeasurement read_measurement_csv(const std::string& path);  // z_m,c_f
SampledWave read_waveform_csv(const std::string& path);        // t_s,value

/// Write through a ".partial" temp file and rename into place, so an
/// interrupted command never leaves a clean-looking half-written file.
void write_file_atomic(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

}  // namespace harvest
