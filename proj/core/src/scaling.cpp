#include "rcm/scaling.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rcm::scaling {

double kappa(double q) {
    if (!(q > 0.0 && q <= 4.0)) throw std::invalid_argument("q must lie in (0, 4]");
    return 4.0 * std::numbers::pi / std::acos(-std::sqrt(q) / 2.0);
}

ExponentSet predicted(double q) {
    const double k = kappa(q);
    ExponentSet e;
    e.q = q;
    e.kappa = k;
    e.alpha = 2.0 / 3.0 * (16.0 - 3.0 * k) / (8.0 - k);
    e.beta = (3.0 * k - 8.0) / (12.0 * k);
    e.gamma = (3.0 * k * k + 64.0) / (6.0 * k * (8.0 - k));
    e.delta = (8.0 + k) * (8.0 + 3.0 * k) / ((8.0 - k) * (3.0 * k - 8.0));
    e.eta = (8.0 - k) * (3.0 * k - 8.0) / (16.0 * k);
    e.nu = 8.0 / (3.0 * (8.0 - k));
    e.zeta = (8.0 - k) * (3.0 * k - 8.0) / ((8.0 + k) * (3.0 * k + 8.0));
    e.xi1 = (8.0 - k) * (3.0 * k - 8.0) / (32.0 * k);
    e.xi4 = -k / 8.0 + 1.0 + 6.0 / k;
    if (q > 1.0) e.iota = 3.0 * k / 8.0 - 1.0;
    return e;
}

std::optional<double> ExponentSet::get(const std::string& name) const {
    if (name == "kappa") return kappa;
    if (name == "alpha") return alpha;
    if (name == "beta") return beta;
    if (name == "gamma") return gamma;
    if (name == "delta") return delta;
    if (name == "eta") return eta;
    if (name == "nu") return nu;
    if (name == "zeta") return zeta;
    if (name == "xi1") return xi1;
    if (name == "xi4") return xi4;
    if (name == "iota") return iota;
    return std::nullopt;
}

std::vector<RelationResidual> check_relations(const ExponentSet& e) {
    std::vector<RelationResidual> out{
        {"R1", e.eta - 2.0 * e.xi1},
        {"R2", e.zeta - e.xi1 / (2.0 - e.xi1)},
        {"R3", e.delta - (2.0 - e.xi1) / e.xi1},
        {"R4", e.beta - e.nu * e.xi1},
        {"R5", e.gamma - (2.0 - 2.0 * e.xi1) * e.nu},
        {"R6", e.alpha - (2.0 - 2.0 * e.nu)},
    };
    if (e.iota) out.push_back({"R7", e.nu * (2.0 - *e.iota) - 1.0});
    return out;
}

FitResult fit_exponent(const std::vector<ScalePoint>& points, const FitOptions& options) {
    std::vector<double> x, y, w;
    bool all_errors = true;
    for (const auto& pt : points) {
        if (!(pt.estimate > 0.0)) throw std::invalid_argument("estimates must be positive for a log-log fit");
        if (!(pt.R > 0.0)) throw std::invalid_argument("scales must be positive");
        if (pt.R < options.min_scale) continue;
        x.push_back(std::log(pt.R));
        y.push_back(std::log(pt.estimate));
        const double rel = pt.std_error / pt.estimate;
        all_errors = all_errors && rel > 0.0;
        w.push_back(rel > 0.0 ? 1.0 / (rel * rel) : 1.0);
    }
    const int n = static_cast<int>(x.size());
    if (n < 3) throw std::invalid_argument("need at least 3 scales to fit an exponent");
    if (!all_errors) w.assign(n, 1.0);

    double sw = 0, sx = 0, sy = 0;
    for (int i = 0; i < n; ++i) {
        sw += w[i];
        sx += w[i] * x[i];
        sy += w[i] * y[i];
    }
    const double mx = sx / sw, my = sy / sw;
    double sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        sxx += w[i] * (x[i] - mx) * (x[i] - mx);
        sxy += w[i] * (x[i] - mx) * (y[i] - my);
    }
    if (sxx <= 0.0) throw std::invalid_argument("scales must not all coincide");
    const double b = sxy / sxx;

    FitResult fit;
    fit.slope = -b;
    fit.intercept = my - b * mx;
    fit.n_points = n;
    fit.weighted = all_errors;
    if (all_errors) {
        fit.slope_std_error = std::sqrt(1.0 / sxx);
    } else {
        double rss = 0;
        for (int i = 0; i < n; ++i) {
            const double r = y[i] - fit.intercept - b * x[i];
            rss += r * r;
        }
        fit.slope_std_error = std::sqrt(rss / (n - 2) / sxx);
    }
    return fit;
}

std::optional<std::string> exponent_of_observable(const std::string& obs) {
    if (obs == "pi1") return "xi1";
    if (obs == "pi4") return "xi4";
    if (obs == "delta") return "iota";
    return std::nullopt;
}

ComparisonRow compare(const std::string& exponent, double q, const FitResult& fit) {
    const auto value = predicted(q).get(exponent);
    if (!value) throw std::invalid_argument("no prediction for exponent " + exponent);
    return {exponent, q, *value, fit.slope, fit.slope_std_error, fit.n_points};
}

}  // namespace rcm::scaling
