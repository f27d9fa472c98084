#pragma once

#include <optional>
#include <string>
#include <vector>

namespace rcm::scaling {

// Predicted critical exponents as functions of the CLE parameter kappa.
struct ExponentSet {
    double q = 2.0;
    double kappa = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    double delta = 0.0;
    double eta = 0.0;
    double nu = 0.0;
    double zeta = 0.0;
    double xi1 = 0.0;
    double xi4 = 0.0;
    std::optional<double> iota;  // mixing-rate exponent; undefined for q <= 1

    // Value by name ("kappa", "alpha", ..., "xi1", "xi4", "iota"); nullopt for unknown names
    // and for an undefined iota.
    std::optional<double> get(const std::string& name) const;
};

double kappa(double q);

// Throws std::invalid_argument unless 0 < q <= 4.
ExponentSet predicted(double q);

struct RelationResidual {
    std::string id;    // "R1" ... "R7"
    double residual = 0.0;
};

// R1: eta - 2 xi1, R2: zeta - xi1/(2 - xi1), R3: delta - (2 - xi1)/xi1, R4: beta - nu xi1,
// R5: gamma - (2 - 2 xi1) nu, R6: alpha - (2 - 2 nu), R7: nu (2 - iota) - 1 (only with iota).
std::vector<RelationResidual> check_relations(const ExponentSet& e);

struct ScalePoint {
    double R = 0.0;
    double estimate = 0.0;
    double std_error = 0.0;
};

struct FitOptions {
    // Points with R below this are dropped before fitting.
    double min_scale = 5.0;
};

struct FitResult {
    double slope = 0.0;  // estimate ~ R^{-slope}
    double slope_std_error = 0.0;
    double intercept = 0.0;  // log prefactor
    int n_points = 0;
    bool weighted = false;
};

// Least squares of log(estimate) against log(R). Points are weighted by their relative errors
// when every point has one; otherwise the fit is unweighted and the slope error comes from the
// residuals. Throws std::invalid_argument for a nonpositive estimate or fewer than 3 points
// after the scale cut.
FitResult fit_exponent(const std::vector<ScalePoint>& points, const FitOptions& options = {});

// Exponent measured by the decay of an observable ("pi1" -> "xi1", "pi4" -> "xi4",
// "delta" -> "iota"); nullopt for observables without one.
std::optional<std::string> exponent_of_observable(const std::string& obs);

struct ComparisonRow {
    std::string exponent;
    double q = 0.0;
    double predicted = 0.0;
    double measured = 0.0;
    double std_error = 0.0;
    int n_scales = 0;
};

ComparisonRow compare(const std::string& exponent, double q, const FitResult& fit);

}  // namespace rcm::scaling
