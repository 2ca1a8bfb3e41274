// Copyright 2026 The deteqt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

namespace deteqt::qsp {

using Complex = std::complex<double>;

inline constexpr const char *kWxConvention = "Wx";

/// Phases phi_0..phi_d for U = e^{i phi_0 Z} prod_k [W(x) e^{i phi_k Z}],
/// W(x) = [[x, i sqrt(1-x^2)], [i sqrt(1-x^2), x]].
struct QspAngles {
    std::vector<double> phases;
    std::string convention = kWxConvention;

    uint32_t degree() const { return phases.empty() ? 0 : static_cast<uint32_t>(phases.size() - 1); }
};

Eigen::Matrix2cd qsp_unitary(const QspAngles &angles, double x);

/// P(x) = <0|U(phi, x)|0>.
Complex qsp_polynomial(const QspAngles &angles, double x);

struct AngleFit {
    QspAngles angles;
    double x_min = 0;
    /// Sup of |Re P(x) - sign(x)| over the dense check grid on x_min <= |x| <= 1.
    double epsilon = 0;
    bool converged = false;
    uint32_t iterations = 0;
};

struct OptimizationOptions {
    uint32_t degree = 29;
    double x_min = 0.2;
    /// Fit points on [x_min, 1]; 0 selects 2 * degree + 8.
    uint32_t grid = 0;
    double tolerance = 1e-4;
    uint64_t seed = 0;
    uint32_t restarts = 1;
    uint32_t max_iterations = 200;
};

/// Fits symmetric phases so that Re P approximates sign(x) on x_min <= |x| <= 1 by
/// Levenberg-Marquardt least squares with seeded restarts. Restarts stop early once one
/// fails to improve the best fit. Returns the best fit found; `converged` is false when
/// the reported epsilon exceeds the tolerance.
AngleFit find_angles_optimization(const OptimizationOptions &options);

/// Odd degree-5 base of the recursive approximant: (15x - 10x^3 + 3x^5) / 8.
double recursive_base(double x);

/// Odd polynomial approximation of sign(x), backed either by QSP phases (value Re P) or by
/// an iterated composition of the degree-5 base.
class SignApproximant {
   public:
    static SignApproximant from_angles(AngleFit fit);
    static SignApproximant recursive(int order, double x_min = 0.1);

    double operator()(double x) const;
    uint32_t degree() const { return degree_; }
    double x_min() const { return x_min_; }
    double epsilon() const { return epsilon_; }
    int order() const { return order_; }
    /// Null for the composed-polynomial backend.
    const AngleFit *fit() const { return has_fit_ ? &fit_ : nullptr; }

   private:
    AngleFit fit_;
    bool has_fit_ = false;
    int order_ = 0;
    uint32_t degree_ = 0;
    double x_min_ = 0;
    double epsilon_ = 0;
};

SignApproximant sign_poly_recursive(int order);

/// max |f(x) - sign(x)| over `points` evenly spaced x in [x_min, 1], using oddness for x < 0.
double sup_sign_error(const std::function<double(double)> &f, double x_min, size_t points = 4001);

nlohmann::json to_json(const AngleFit &fit);
AngleFit angle_fit_from_json(const nlohmann::json &j);

}  // namespace deteqt::qsp
