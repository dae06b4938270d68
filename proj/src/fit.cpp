#include "harvest/fit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

namespace harvest {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kMaxIterations = 200;
constexpr double kParamTol = 1e-9;

struct FitData {
    std::vector<double> z;  // scaled by 1/z_scale
    std::vector<double> c;  // scaled by 1/c_scale
    double z_scale = 1.0;
    double c_scale = 1.0;
};

// Parameters in scaled space: offset, delta_c, pitch, z_offset.
using Params = std::array<double, 4>;

double eval_model(ProfileKind kind, const Params& x, double z) {
    CapProfile p;
    p.kind = kind;
    p.c_par_f = 0.0;
    p.c_mid_f = x[0];
    p.delta_c_f = x[1];
    p.pitch_m = x[2];
    p.z_offset_m = x[3];
    p.smoothing_m = x[2] / 20.0;  // fixed fraction of the period
    return cap_at(p, z);
}

bool params_valid(const Params& x) {
    return x[2] > 0.0 && x[1] >= 0.0 && x[0] - x[1] > 0.0 && std::isfinite(x[0]) &&
           std::isfinite(x[1]) && std::isfinite(x[2]) && std::isfinite(x[3]);
}

double sse(ProfileKind kind, const Params& x, const FitData& d) {
    double acc = 0.0;
    for (std::size_t i = 0; i < d.z.size(); ++i) {
        const double r = eval_model(kind, x, d.z[i]) - d.c[i];
        acc += r * r;
    }
    return acc;
}

// Solve a 4x4 system by Gaussian elimination with partial pivoting.
bool solve4(std::array<std::array<double, 4>, 4> a, std::array<double, 4>& b) {
    for (int col = 0; col < 4; ++col) {
        int piv = col;
        for (int r = col + 1; r < 4; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        if (std::abs(a[piv][col]) < 1e-300) return false;
        std::swap(a[col], a[piv]);
        std::swap(b[col], b[piv]);
        for (int r = col + 1; r < 4; ++r) {
            const double f = a[r][col] / a[col][col];
            for (int c = col; c < 4; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    for (int col = 3; col >= 0; --col) {
        for (int r = col + 1; r < 4; ++r) b[col] -= a[col][r] * b[r];
        b[col] /= a[col][col];
    }
    return true;
}

// Spatial period estimate from the autocorrelation of the detrended data,
// resampled onto a uniform grid. Returns 0 when no interior peak exists,
// which is how a sub-period data span manifests.
double estimate_period(const CapMeasurement& meas) {
    constexpr std::size_t kGrid = 1024;
    const double z0 = meas.samples.front().z_m;
    const double z1 = meas.samples.back().z_m;
    const double dz = (z1 - z0) / static_cast<double>(kGrid - 1);

    std::vector<double> y(kGrid);
    std::size_t seg = 0;
    double mean = 0.0;
    for (std::size_t i = 0; i < kGrid; ++i) {
        const double z = z0 + static_cast<double>(i) * dz;
        while (seg + 2 < meas.samples.size() && meas.samples[seg + 1].z_m < z) ++seg;
        const auto& a = meas.samples[seg];
        const auto& b = meas.samples[seg + 1];
        const double f = (z - a.z_m) / (b.z_m - a.z_m);
        y[i] = a.c_f + f * (b.c_f - a.c_f);
        mean += y[i];
    }
    mean /= static_cast<double>(kGrid);
    for (auto& v : y) v -= mean;

    std::vector<double> r(kGrid / 2 + 1, 0.0);
    for (std::size_t lag = 0; lag < r.size(); ++lag)
        for (std::size_t i = 0; i + lag < kGrid; ++i) r[lag] += y[i] * y[i + lag];
    if (!(r[0] > 0.0)) return 0.0;

    for (std::size_t lag = 4; lag + 1 < r.size(); ++lag) {
        if (r[lag] > r[lag - 1] && r[lag] >= r[lag + 1] && r[lag] > 0.2 * r[0]) {
            // parabolic sub-bin refinement
            const double denom = r[lag - 1] - 2.0 * r[lag] + r[lag + 1];
            double frac = 0.0;
            if (denom < 0.0) frac = 0.5 * (r[lag - 1] - r[lag + 1]) / denom;
            return (static_cast<double>(lag) + frac) * dz;
        }
    }
    return 0.0;
}

// Linear least squares of c ~ offset + A cos(2 pi z / p) + B sin(2 pi z / p)
// at fixed period; used to pick the best period on a bracket around the
// autocorrelation estimate and to seed amplitude and phase.
struct Quadrature {
    double offset = 0.0, amp = 0.0, phase = 0.0, sse = 0.0;
};

Quadrature quadrature_fit(const FitData& d, double period) {
    double s1 = 0, sc = 0, ss = 0, scc = 0, sss = 0, scs = 0, sy = 0, syc = 0, sys = 0;
    const auto n = static_cast<double>(d.z.size());
    for (std::size_t i = 0; i < d.z.size(); ++i) {
        const double th = kTwoPi * d.z[i] / period;
        const double c = std::cos(th), s = std::sin(th);
        sc += c;
        ss += s;
        scc += c * c;
        sss += s * s;
        scs += c * s;
        sy += d.c[i];
        syc += d.c[i] * c;
        sys += d.c[i] * s;
    }
    s1 = n;
    // normal equations for (offset, A, B)
    std::array<std::array<double, 4>, 4> m{};
    std::array<double, 4> rhs{};
    m[0] = {s1, sc, ss, 0.0};
    m[1] = {sc, scc, scs, 0.0};
    m[2] = {ss, scs, sss, 0.0};
    m[3] = {0.0, 0.0, 0.0, 1.0};
    rhs = {sy, syc, sys, 0.0};
    Quadrature out;
    if (!solve4(m, rhs)) return out;
    const double off = rhs[0], a = rhs[1], b = rhs[2];
    out.offset = off;
    out.amp = std::hypot(a, b);
    out.phase = std::atan2(b, a);
    double acc = 0.0;
    for (std::size_t i = 0; i < d.z.size(); ++i) {
        const double th = kTwoPi * d.z[i] / period;
        const double r = off + a * std::cos(th) + b * std::sin(th) - d.c[i];
        acc += r * r;
    }
    out.sse = acc;
    return out;
}

}  // namespace

FitResult fit_cap_profile(const CapMeasurement& meas, ProfileKind kind) {
    if (kind != ProfileKind::cosine && kind != ProfileKind::triangular)
        throw DomainError("fit kind must be cosine or triangular");
    if (meas.samples.size() < 8)
        throw DomainError("capacitance measurement needs at least 8 samples");
    for (std::size_t i = 1; i < meas.samples.size(); ++i)
        if (!(meas.samples[i].z_m > meas.samples[i - 1].z_m))
            throw DomainError("measurement samples must be strictly increasing in z");

    const double span = meas.samples.back().z_m - meas.samples.front().z_m;
    const double period0 = estimate_period(meas);
    if (period0 <= 0.0 || period0 > span) {
        throw DomainError("measurement span (" + std::to_string(span) +
                          " m) covers less than one period; cannot fit a periodic profile");
    }

    FitData d;
    d.z_scale = span;
    double cmean = 0.0;
    for (const auto& s : meas.samples) cmean += s.c_f;
    cmean /= static_cast<double>(meas.samples.size());
    d.c_scale = std::abs(cmean) > 0.0 ? std::abs(cmean) : 1.0;
    d.z.reserve(meas.samples.size());
    d.c.reserve(meas.samples.size());
    for (const auto& s : meas.samples) {
        d.z.push_back(s.z_m / d.z_scale);
        d.c.push_back(s.c_f / d.c_scale);
    }

    // Seed: scan periods around the autocorrelation estimate with the
    // quadrature fit, which is exact for the cosine kind and lands close
    // enough for the triangular kind.
    const double p0 = period0 / d.z_scale;
    Quadrature best_q;
    double best_p = p0;
    bool first = true;
    for (int i = -20; i <= 20; ++i) {
        const double p = p0 * (1.0 + 0.005 * static_cast<double>(i));
        const Quadrature q = quadrature_fit(d, p);
        if (first || q.sse < best_q.sse) {
            best_q = q;
            best_p = p;
            first = false;
        }
    }

    double cmin = d.c[0], cmax = d.c[0];
    for (double v : d.c) {
        cmin = std::min(cmin, v);
        cmax = std::max(cmax, v);
    }

    Params x;
    x[0] = best_q.offset;
    x[1] = kind == ProfileKind::cosine ? best_q.amp : (cmax - cmin) / 2.0;
    x[2] = best_p;
    // model peak sits at z = z_offset; the quadrature phase gives it directly
    x[3] = best_q.phase * best_p / kTwoPi;
    if (!params_valid(x)) {
        x[0] = (cmax + cmin) / 2.0;
        x[1] = std::max((cmax - cmin) / 2.0, 1e-6);
        if (!params_valid(x)) x[1] = 0.5 * x[0];
    }

    // Damped Gauss-Newton with a numerical Jacobian.
    double current_sse = sse(kind, x, d);
    double lambda = 1e-3;
    std::int64_t iterations = 0;
    bool converged = false;
    const std::size_t n = d.z.size();

    for (int iter = 0; iter < kMaxIterations; ++iter) {
        ++iterations;
        std::vector<std::array<double, 4>> jac(n);
        std::vector<double> res(n);
        for (std::size_t i = 0; i < n; ++i)
            res[i] = eval_model(kind, x, d.z[i]) - d.c[i];
        for (int j = 0; j < 4; ++j) {
            const double h = 1e-6 * std::max(std::abs(x[j]), 1e-3);
            Params xp = x, xm = x;
            xp[j] += h;
            xm[j] -= h;
            if (!params_valid(xp) || !params_valid(xm)) {
                for (std::size_t i = 0; i < n; ++i) jac[i][j] = 0.0;
                continue;
            }
            for (std::size_t i = 0; i < n; ++i)
                jac[i][j] = (eval_model(kind, xp, d.z[i]) - eval_model(kind, xm, d.z[i])) /
                            (2.0 * h);
        }

        std::array<std::array<double, 4>, 4> jtj{};
        std::array<double, 4> jtr{};
        for (std::size_t i = 0; i < n; ++i)
            for (int a = 0; a < 4; ++a) {
                jtr[a] += jac[i][a] * res[i];
                for (int b = 0; b < 4; ++b) jtj[a][b] += jac[i][a] * jac[i][b];
            }

        bool accepted = false;
        double step_rel = 0.0;
        for (int attempt = 0; attempt < 25 && !accepted; ++attempt) {
            auto m = jtj;
            for (int a = 0; a < 4; ++a) m[a][a] += lambda * std::max(jtj[a][a], 1e-30);
            std::array<double, 4> delta = jtr;
            if (!solve4(m, delta)) {
                lambda *= 10.0;
                continue;
            }
            Params trial = x;
            for (int a = 0; a < 4; ++a) trial[a] -= delta[a];
            if (!params_valid(trial)) {
                lambda *= 10.0;
                continue;
            }
            const double trial_sse = sse(kind, trial, d);
            if (trial_sse <= current_sse) {
                step_rel = 0.0;
                for (int a = 0; a < 4; ++a)
                    step_rel = std::max(step_rel,
                                        std::abs(delta[a]) / std::max(std::abs(x[a]), 1e-12));
                x = trial;
                current_sse = trial_sse;
                lambda = std::max(lambda / 3.0, 1e-12);
                accepted = true;
            } else {
                lambda *= 10.0;
            }
        }
        if (!accepted) {
            // stuck at a damping wall; treat the current point as converged
            converged = true;
            break;
        }
        if (step_rel < kParamTol) {
            converged = true;
            break;
        }
    }

    // Canonical form: positive swing, z_offset wrapped into [-pitch/2, pitch/2).
    if (x[1] < 0.0) {
        x[1] = -x[1];
        x[3] += x[2] / 2.0;
    }
    x[3] -= x[2] * std::floor(x[3] / x[2] + 0.5);

    FitResult out;
    out.profile.kind = kind;
    out.profile.c_par_f = 0.0;
    out.profile.c_mid_f = x[0] * d.c_scale;
    out.profile.delta_c_f = x[1] * d.c_scale;
    out.profile.pitch_m = x[2] * d.z_scale;
    out.profile.z_offset_m = x[3] * d.z_scale;
    out.profile.smoothing_m = kind == ProfileKind::triangular ? out.profile.pitch_m / 20.0 : 0.0;
    out.iterations = iterations;
    out.converged = converged;

    double acc = 0.0, max_err = 0.0;
    for (const auto& s : meas.samples) {
        const double err = cap_at(out.profile, s.z_m) - s.c_f;
        acc += err * err;
        max_err = std::max(max_err, std::abs(err));
    }
    out.rmse_f = std::sqrt(acc / static_cast<double>(meas.samples.size()));
    out.max_abs_err_f = max_err;

    if (!converged)
        throw FitError("fit did not converge within " + std::to_string(kMaxIterations) +
                           " iterations; best rmse " + std::to_string(out.rmse_f),
                       out);
    return out;
}

}  // namespace harvest
