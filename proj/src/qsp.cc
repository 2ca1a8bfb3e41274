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

#include "deteqt/qsp.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace deteqt::qsp {

namespace {

using Row = Eigen::RowVector2cd;
using Col = Eigen::Vector2cd;

Eigen::Matrix2cd signal(double x) {
    const double s = std::sqrt(std::max(0.0, 1.0 - x * x));
    Eigen::Matrix2cd w;
    w << x, Complex(0, s), Complex(0, s), x;
    return w;
}

inline Complex expi(double phi) { return std::polar(1.0, phi); }

// Multiplies by e^{i phi Z} = diag(e^{i phi}, e^{-i phi}).
inline Row row_times_phase(const Row &r, double phi) {
    return Row(r[0] * expi(phi), r[1] * expi(-phi));
}
inline Col phase_times_col(double phi, const Col &c) {
    return Col(expi(phi) * c[0], expi(-phi) * c[1]);
}

std::vector<double> expand_symmetric(const Eigen::VectorXd &half, uint32_t degree) {
    std::vector<double> phases(degree + 1);
    for (uint32_t j = 0; j <= degree; j++) {
        phases[j] = half[std::min(j, degree - j)];
    }
    return phases;
}

// Re P(x) and its gradient with respect to the symmetric half-parameters.
double value_and_gradient(const std::vector<double> &phases, double x, Eigen::Ref<Eigen::RowVectorXd> grad) {
    const uint32_t d = static_cast<uint32_t>(phases.size() - 1);
    const Eigen::Matrix2cd w = signal(x);
    // prefix[j] = e0^T E_0 W E_1 W ... W (everything before E_j)
    std::vector<Row> prefix(d + 1);
    prefix[0] = Row(1, 0);
    for (uint32_t j = 1; j <= d; j++) {
        prefix[j] = row_times_phase(prefix[j - 1], phases[j - 1]) * w;
    }
    // suffix[j] = W E_{j+1} ... W E_d e0 (everything after E_j)
    std::vector<Col> suffix(d + 1);
    suffix[d] = Col(1, 0);
    for (int j = static_cast<int>(d) - 1; j >= 0; j--) {
        suffix[j] = w * phase_times_col(phases[j + 1], suffix[j + 1]);
    }
    grad.setZero();
    for (uint32_t j = 0; j <= d; j++) {
        // d/dphi_j of E_j is i Z E_j.
        Col dz = phase_times_col(phases[j], suffix[j]);
        dz[1] = -dz[1];
        Complex dp = Complex(0, 1) * (prefix[j] * dz)(0);
        grad[std::min(j, d - j)] += dp.real();
    }
    Complex p = (row_times_phase(prefix[d], phases[d]) * suffix[d])(0);
    return p.real();
}

std::vector<double> chebyshev_grid(double lo, double hi, uint32_t count) {
    std::vector<double> xs(count);
    for (uint32_t i = 0; i < count; i++) {
        double t = std::cos((2.0 * i + 1.0) * std::numbers::pi / (2.0 * count));
        xs[i] = lo + (hi - lo) * (t + 1.0) / 2.0;
    }
    return xs;
}

struct Candidate {
    Eigen::VectorXd half;
    double epsilon;
    uint32_t iterations;
};

Candidate levenberg_marquardt(Eigen::VectorXd half, uint32_t degree, const std::vector<double> &xs,
                              double x_min, const OptimizationOptions &opt) {
    const Eigen::Index params = half.size();
    const Eigen::Index points = static_cast<Eigen::Index>(xs.size());
    Eigen::MatrixXd jac(points, params);
    Eigen::VectorXd res(points);

    auto evaluate = [&](const Eigen::VectorXd &h, bool with_jacobian) {
        auto phases = expand_symmetric(h, degree);
        Eigen::RowVectorXd g(params);
        for (Eigen::Index i = 0; i < points; i++) {
            res[i] = value_and_gradient(phases, xs[i], g) - 1.0;
            if (with_jacobian) {
                jac.row(i) = g;
            }
        }
        return res.squaredNorm();
    };
    auto sup_error = [&](const Eigen::VectorXd &h) {
        QspAngles a{expand_symmetric(h, degree)};
        return sup_sign_error([&](double x) { return qsp_polynomial(a, x).real(); }, x_min, 8 * degree + 64);
    };

    double cost = evaluate(half, true);
    double mu = 1e-3;
    uint32_t it = 0;
    bool stalled = false;
    for (; it < opt.max_iterations && !stalled; it++) {
        if (res.cwiseAbs().maxCoeff() <= opt.tolerance * 0.5) {
            break;
        }
        Eigen::MatrixXd jtj = jac.transpose() * jac;
        Eigen::VectorXd g = jac.transpose() * res;
        bool improved = false;
        for (int tries = 0; tries < 12; tries++) {
            Eigen::MatrixXd a = jtj;
            a.diagonal().array() += mu * (jtj.diagonal().array() + 1e-12);
            Eigen::VectorXd step = a.ldlt().solve(-g);
            Eigen::VectorXd trial = half + step;
            Eigen::VectorXd saved_res = res;
            double next = evaluate(trial, false);
            if (next < cost) {
                half = trial;
                double rel = (cost - next) / std::max(cost, 1e-300);
                cost = evaluate(half, true);
                mu = std::max(mu / 3.0, 1e-12);
                improved = true;
                stalled = rel < 1e-12;
                break;
            }
            res = saved_res;
            mu *= 4.0;
        }
        if (!improved) {
            break;
        }
    }
    return {half, sup_error(half), it};
}

}  // namespace

Eigen::Matrix2cd qsp_unitary(const QspAngles &angles, double x) {
    if (angles.phases.empty()) {
        throw std::invalid_argument("QSP phase list is empty");
    }
    if (std::abs(x) > 1.0 + 1e-12) {
        throw std::invalid_argument("QSP signal must lie in [-1, 1]");
    }
    x = std::clamp(x, -1.0, 1.0);
    const Eigen::Matrix2cd w = signal(x);
    auto rot = [](double phi) {
        Eigen::Matrix2cd e = Eigen::Matrix2cd::Zero();
        e(0, 0) = expi(phi);
        e(1, 1) = expi(-phi);
        return e;
    };
    Eigen::Matrix2cd u = rot(angles.phases[0]);
    for (size_t k = 1; k < angles.phases.size(); k++) {
        u = u * w * rot(angles.phases[k]);
    }
    return u;
}

Complex qsp_polynomial(const QspAngles &angles, double x) {
    if (angles.phases.empty()) {
        throw std::invalid_argument("QSP phase list is empty");
    }
    x = std::clamp(x, -1.0, 1.0);
    const Eigen::Matrix2cd w = signal(x);
    Row r = row_times_phase(Row(1, 0), angles.phases[0]);
    for (size_t k = 1; k < angles.phases.size(); k++) {
        r = row_times_phase(r * w, angles.phases[k]);
    }
    return r[0];
}

double sup_sign_error(const std::function<double(double)> &f, double x_min, size_t points) {
    if (points < 2) {
        points = 2;
    }
    double worst = 0;
    for (size_t i = 0; i < points; i++) {
        double x = x_min + (1.0 - x_min) * static_cast<double>(i) / static_cast<double>(points - 1);
        worst = std::max(worst, std::abs(f(x) - 1.0));
    }
    return worst;
}

AngleFit find_angles_optimization(const OptimizationOptions &opt) {
    if (opt.degree % 2 == 0) {
        throw std::invalid_argument("sign approximation needs an odd degree");
    }
    if (!(opt.x_min > 0 && opt.x_min < 1)) {
        throw std::invalid_argument("x_min must lie in (0, 1)");
    }
    const uint32_t d = opt.degree;
    const uint32_t half_size = (d + 1) / 2;
    const uint32_t grid = opt.grid ? opt.grid : 2 * d + 8;
    const auto xs = chebyshev_grid(opt.x_min, 1.0, grid);

    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> jitter(0.0, 0.1);
    Candidate best{Eigen::VectorXd::Zero(half_size), std::numeric_limits<double>::infinity(), 0};
    uint32_t total_iterations = 0;
    for (uint32_t r = 0; r <= opt.restarts; r++) {
        Eigen::VectorXd start = Eigen::VectorXd::Zero(half_size);
        start[0] = std::numbers::pi / 4;
        if (r > 0) {
            for (Eigen::Index i = 0; i < start.size(); i++) {
                start[i] += jitter(rng);
            }
        }
        Candidate c = levenberg_marquardt(start, d, xs, opt.x_min, opt);
        total_iterations += c.iterations;
        bool improved = c.epsilon < 0.99 * best.epsilon;
        if (c.epsilon < best.epsilon) {
            best = c;
        }
        if (best.epsilon <= opt.tolerance || (r > 0 && !improved)) {
            break;
        }
    }

    AngleFit fit;
    fit.angles.phases = expand_symmetric(best.half, d);
    fit.x_min = opt.x_min;
    fit.epsilon = best.epsilon;
    fit.converged = best.epsilon <= opt.tolerance;
    fit.iterations = total_iterations;
    return fit;
}

double recursive_base(double x) {
    const double x2 = x * x;
    return x * (15.0 - 10.0 * x2 + 3.0 * x2 * x2) / 8.0;
}

SignApproximant SignApproximant::from_angles(AngleFit fit) {
    if (fit.angles.degree() % 2 == 0) {
        throw std::invalid_argument("sign approximant phases must have odd degree");
    }
    SignApproximant s;
    s.degree_ = fit.angles.degree();
    s.x_min_ = fit.x_min;
    s.epsilon_ = fit.epsilon;
    s.fit_ = std::move(fit);
    s.has_fit_ = true;
    return s;
}

SignApproximant SignApproximant::recursive(int order, double x_min) {
    if (order < 1 || order > 4) {
        throw std::invalid_argument("recursive order must be in [1, 4]");
    }
    SignApproximant s;
    s.order_ = order;
    s.degree_ = 1;
    for (int i = 0; i < order; i++) {
        s.degree_ *= 5;
    }
    s.x_min_ = x_min;
    s.epsilon_ = sup_sign_error(s, x_min);
    return s;
}

double SignApproximant::operator()(double x) const {
    if (has_fit_) {
        return qsp_polynomial(fit_.angles, x).real();
    }
    double y = std::clamp(x, -1.0, 1.0);
    for (int i = 0; i < order_; i++) {
        y = recursive_base(y);
    }
    return y;
}

SignApproximant sign_poly_recursive(int order) {
    return SignApproximant::recursive(order);
}

nlohmann::json to_json(const AngleFit &fit) {
    return {{"d", fit.angles.degree()},
            {"phases", fit.angles.phases},
            {"x_min", fit.x_min},
            {"epsilon", fit.epsilon},
            {"convention", fit.angles.convention}};
}

AngleFit angle_fit_from_json(const nlohmann::json &j) {
    AngleFit fit;
    fit.angles.phases = j.at("phases").get<std::vector<double>>();
    fit.angles.convention = j.value("convention", std::string(kWxConvention));
    if (fit.angles.convention != kWxConvention) {
        throw std::invalid_argument("unsupported QSP convention '" + fit.angles.convention + "'");
    }
    if (j.contains("d") && j.at("d").get<uint32_t>() != fit.angles.degree()) {
        throw std::invalid_argument("angle file degree does not match phase count");
    }
    fit.x_min = j.value("x_min", 0.0);
    fit.epsilon = j.value("epsilon", 0.0);
    fit.converged = true;
    return fit;
}

}  // namespace deteqt::qsp
