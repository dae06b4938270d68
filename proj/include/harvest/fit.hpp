#pragma once

// Least-squares calibration of a periodic capacitance profile against
// measured C(z) samples. The spatial period is seeded from the
// autocorrelation of the detrended data, the remaining parameters from a
// quadrature projection, and everything is polished with a damped
// Gauss-Newton iteration. Fits are fully deterministic.

#include <cstdint>
#include <vector>

#include "harvest/model.hpp"

namespace harvest {

/// Measured capacitance-versus-displacement curve.
struct CapMeasurement {
    std::vector<CapSample> samples;  ///< strictly increasing in z, >= 8 points
};

struct FitResult {
    /// Fitted profile. The displacement-independent offset is not separable
    /// from the mean of the periodic part, so it is reported entirely in
    /// c_mid_f (c_par_f = 0).
    CapProfile profile;
    double rmse_f = 0.0;
    double max_abs_err_f = 0.0;
    std::int64_t iterations = 0;
    bool converged = false;
};

/// Thrown when the iteration cap is hit before the parameter change drops
/// below tolerance; carries the best parameters found so far.
class FitError : public Error {
public:
    FitError(const std::string& what, FitResult best)
        : Error(what), best_so_far(std::move(best)) {}
    FitResult best_so_far;
};

/// Fit (offset, delta_c, pitch, z_offset) of the given periodic kind to the
/// measurement. Throws DomainError when the measurement is malformed or its
/// span is shorter than one period (no usable autocorrelation peak), and
/// FitError when the iteration cap is reached without convergence.
FitResult fit_cap_profile(const CapMeasurement& meas, ProfileKind kind);

}  // namespace harvest
