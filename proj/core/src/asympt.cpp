#include "hessex/asympt.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hessex/errors.hpp"
#include "hessex/linalg.hpp"
#include "hessex/parallel.hpp"
#include "hessex/sampling.hpp"

namespace hessex {

namespace {

struct Line {
    double slope = 0, intercept = 0, rms = 0;
};

Line regress(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    Line l;
    l.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    l.intercept = (sy - l.slope * sx) / n;
    double ss = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (l.intercept + l.slope * x[i]);
        ss += r * r;
    }
    l.rms = std::sqrt(ss / n);
    return l;
}

}  // namespace

DecayFit fit_decay(const std::vector<double>& s, const std::vector<double>& values, DecayHints hints) {
    if (s.size() != values.size() || s.size() < 3) throw FitError("fit_decay: need at least three points");
    DecayFit fit;
    fit.s_hi = s.back();
    // window: the last decade, widened down to the node at or below s_hi / 10
    const double lo = s.back() / 10.0;
    if (s.front() > lo) throw FitError("fit_decay: window spans less than a decade");
    std::size_t first = 0;
    while (first + 1 < s.size() && s[first + 1] <= lo) ++first;
    std::vector<double> lx, ly;
    for (std::size_t i = first; i < s.size(); ++i) {
        if (!(values[i] > 0.0)) {
            std::ostringstream os;
            os << "fit_decay: nonpositive value " << values[i] << " at s = " << s[i];
            throw FitError(os.str());
        }
        lx.push_back(std::log(s[i]));
        ly.push_back(std::log(values[i]));
    }
    if (lx.size() < 3) throw FitError("fit_decay: fewer than three points in the last decade");
    fit.s_lo = std::exp(lx.front());
    fit.points = lx.size();
    const Line plain = regress(lx, ly);
    fit.raw_slope = plain.slope;
    fit.exponent = plain.slope;
    fit.residual = plain.rms;
    if (std::isfinite(hints.alpha) && std::isfinite(hints.beta_half) &&
        std::abs(hints.alpha - hints.beta_half) < 0.05) {
        std::vector<double> lc(ly);
        for (std::size_t i = 0; i < lc.size(); ++i) lc[i] -= std::log(lx[i]);
        const Line corrected = regress(lx, lc);
        fit.exponent = corrected.slope;
        fit.residual = corrected.rms;
        fit.log_correction = true;
    }
    return fit;
}

DecayFit fit_profile_decay(const BarrierProfile& profile) {
    std::vector<double> v(profile.node_wm1());
    for (auto& x : v) x = std::abs(x);
    return fit_decay(profile.nodes(), v, {profile.exponents().alpha, profile.exponents().beta_half});
}

double alpha_delta(const SymmetricOperator& op, const std::vector<double>& a, double delta) {
    if (!(delta >= 0.0)) throw ArgumentError("alpha_delta: delta must be nonnegative");
    const auto g = op.gradient(a);
    double num = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) num += a[i] * g[i];
    return num / ((2.0 * a.back() + delta) * g.front());
}

SBarResult detect_s_bar(const SymmetricOperator& op, const std::vector<double>& a, double delta,
                        const BarrierProfile& profile, std::size_t directions) {
    if (!(delta > 0.0)) throw ArgumentError("detect_s_bar: delta must be positive");
    const std::size_t n = a.size();
    const double an = a.back();
    const auto grad_a = op.gradient(a);
    SBarResult res;
    res.epsilon = 0.5 * delta / (4.0 * an + delta) * grad_a.front();
    res.directions = directions;
    const auto dirs = sphere_points(n, directions);
    const auto& nodes = profile.nodes();

    // hypotheses of the threshold: u' -> 1 and s u'' -> 0 on the tail
    const double s_top = nodes.back();
    if (std::abs(profile.w(s_top) - 1.0) > 1e-3 || std::abs(s_top * profile.dw(s_top)) > 1e-3)
        throw AsymptoticsError("profile does not satisfy u' -> 1, s u'' -> 0 on its grid");

    struct Shell {
        bool pass = true;
        double gap = 0.0;
        double direct = std::numeric_limits<double>::infinity();
    };
    std::vector<Shell> shells(nodes.size());
    constexpr int kSegment = 5;
    parallel_for(nodes.size(), [&](std::size_t k) {
        const double s = nodes[k];
        const double u1 = profile.w(s), u2 = profile.dw(s);
        std::vector<double> cmp(a);
        for (auto& v : cmp) v *= u1;
        cmp[0] += (2.0 * an + delta) * s * u2;
        Shell sh;
        for (const auto& d : dirs) {
            const auto x = onto_level_set(d, a, s);
            const auto lam = eigenvalues_ascending(hessian_generalized(a, x, u1, u2));
            std::vector<double> p(n);
            for (int j = 0; j < kSegment; ++j) {
                const double th = static_cast<double>(j) / (kSegment - 1);
                for (std::size_t i = 0; i < n; ++i) p[i] = (1.0 - th) * lam[i] + th * cmp[i];
                if (!op.admissible(p)) {
                    sh.pass = false;
                    sh.gap = std::numeric_limits<double>::infinity();
                    continue;
                }
                const auto g = op.gradient(p);
                double d2 = 0.0;
                for (std::size_t i = 0; i < n; ++i) d2 += (g[i] - grad_a[i]) * (g[i] - grad_a[i]);
                const double gap = std::sqrt(d2);
                sh.gap = std::max(sh.gap, gap);
                if (!(gap < res.epsilon)) sh.pass = false;
            }
            if (op.admissible(lam) && op.admissible(cmp))
                sh.direct = std::min(sh.direct, op.eval(cmp) - op.eval(lam));
            else
                sh.direct = -std::numeric_limits<double>::infinity();
        }
        shells[k] = sh;
    });

    std::size_t first = nodes.size();
    while (first > 0 && shells[first - 1].pass) --first;
    if (first == nodes.size()) throw AsymptoticsError("threshold criterion fails on the outermost shell");
    res.s_bar = nodes[first];
    res.shells_checked = nodes.size() - first;
    for (std::size_t k = first; k < nodes.size(); ++k) {
        res.worst_gradient_gap = std::max(res.worst_gradient_gap, shells[k].gap);
        res.direct_margin = std::min(res.direct_margin, shells[k].direct);
        res.direct_samples += directions;
    }
    return res;
}

}  // namespace hessex
