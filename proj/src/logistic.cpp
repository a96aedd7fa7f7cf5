#include <algorithm>
#include <cmath>

#include "rfqlab/discriminative.hpp"
#include "rfqlab/kernels.hpp"
#include "rfqlab/linalg.hpp"

namespace rfq {

std::vector<std::string> FeatureLayout::names() const {
    std::vector<std::string> out = {"spread",    "sigma",       "dv01",
                                    "maturity",  "freq_buy",    "freq_sell",
                                    "avg_dealers", "n_dealers", "dv01_exposure"};
    for (std::size_t j = 0; j < n_client; ++j) out.push_back("client_f" + std::to_string(j + 1));
    return out;
}

void FeatureLayout::fill(double delta, const FeatureBundle& f, double* out) const {
    if (f.bond.size() != kBondFeatureCount || f.rfq.size() != kRfqFeatureCount ||
        f.client.size() != n_client)
        throw DimensionMismatch("FeatureLayout: bundle does not match layout");
    out[0] = delta;
    out[1] = f.volatility;
    for (std::size_t j = 0; j < kBondFeatureCount; ++j) out[2 + j] = f.bond[j];
    out[7] = f.rfq[0];
    out[8] = f.rfq[1];
    for (std::size_t j = 0; j < n_client; ++j) out[9 + j] = f.client[j];
}

std::vector<double> FeatureLayout::row(double delta, const FeatureBundle& f) const {
    std::vector<double> out(size());
    fill(delta, f, out.data());
    return out;
}

FeatureLayout FeatureLayout::infer(const Dataset& records) {
    if (records.empty()) throw DegenerateData("FeatureLayout: empty dataset");
    return {records.front().features.client.size()};
}

DesignMatrix DesignMatrix::build(const Dataset& records) {
    DesignMatrix m;
    m.layout = FeatureLayout::infer(records);
    m.n = records.size();
    m.x.resize(m.n * m.layout.size());
    m.y.resize(m.n);
    for (std::size_t i = 0; i < m.n; ++i) {
        m.layout.fill(records[i].delta_norm, records[i].features,
                      m.x.data() + i * m.layout.size());
        m.y[i] = records[i].hit() ? 1 : 0;
    }
    return m;
}

Standardizer Standardizer::fit(const DesignMatrix& m) {
    const std::size_t d = m.layout.size();
    Standardizer s;
    s.mean.assign(d, 0.0);
    s.sd.assign(d, 1.0);
    for (std::size_t i = 0; i < m.n; ++i)
        for (std::size_t j = 0; j < d; ++j) s.mean[j] += m.row(i)[j];
    for (auto& v : s.mean) v /= static_cast<double>(m.n);
    std::vector<double> var(d, 0.0);
    for (std::size_t i = 0; i < m.n; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            const double c = m.row(i)[j] - s.mean[j];
            var[j] += c * c;
        }
    for (std::size_t j = 0; j < d; ++j) {
        const double v = var[j] / static_cast<double>(m.n);
        s.sd[j] = v > 1e-24 ? std::sqrt(v) : 1.0; // constant column stays untouched
    }
    return s;
}

void Standardizer::transform(double* row, std::size_t d) const {
    for (std::size_t j = 0; j < d; ++j) row[j] = (row[j] - mean[j]) / sd[j];
}

void Standardizer::inverse(double* row, std::size_t d) const {
    for (std::size_t j = 0; j < d; ++j) row[j] = row[j] * sd[j] + mean[j];
}

BinaryClassWeights BinaryClassWeights::balanced(const std::vector<int>& y) {
    std::size_t n1 = 0;
    for (int v : y) n1 += v;
    const std::size_t n0 = y.size() - n1;
    if (n0 == 0 || n1 == 0) throw DegenerateData("class weighting needs both classes");
    const double n = static_cast<double>(y.size());
    return {n / (2.0 * static_cast<double>(n0)), n / (2.0 * static_cast<double>(n1))};
}

double LogisticModel::predict(double delta, const FeatureBundle& ctx) const {
    std::vector<double> r = layout.row(delta, ctx);
    standardizer.transform(r.data(), r.size());
    double eta = intercept + kernels::dot(r.data(), weights.data(), r.size());
    eta = std::clamp(eta, -36.0, 36.0);
    return 1.0 / (1.0 + std::exp(-eta));
}

LogisticModel fit_logistic(const Dataset& train, const LogisticOptions& options) {
    if (!(options.c > 0.0)) throw InvalidHyperparams("fit_logistic: C must be positive");
    DesignMatrix m = DesignMatrix::build(train);
    const std::size_t d = m.layout.size();
    const std::size_t n = m.n;

    LogisticModel model;
    model.layout = m.layout;
    model.standardizer = Standardizer::fit(m);
    model.l2_penalty = 1.0 / options.c;
    model.class_weights =
        options.class_weight ? BinaryClassWeights::balanced(m.y) : BinaryClassWeights{};
    for (std::size_t i = 0; i < n; ++i)
        model.standardizer.transform(m.x.data() + i * d, d);

    std::vector<double> w(d, 0.0);
    double b = 0.0;
    std::vector<double> eta(n), p(n);

    auto compute_grad = [&](std::vector<double>& grad, double& gb) {
        for (std::size_t i = 0; i < n; ++i)
            eta[i] = b + kernels::dot(m.row(i), w.data(), d);
        kernels::sigmoid_batch(eta.data(), p.data(), n);
        std::fill(grad.begin(), grad.end(), 0.0);
        gb = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = model.class_weights(m.y[i]) * (p[i] - m.y[i]);
            kernels::axpy(r, m.row(i), grad.data(), d);
            gb += r;
        }
        for (std::size_t j = 0; j < d; ++j) grad[j] += model.l2_penalty * w[j];
    };

    std::vector<double> grad(d);
    double gb = 0.0;
    bool newton_ok = true;
    for (int iter = 0; iter < options.max_iterations; ++iter) {
        model.iterations = iter;
        compute_grad(grad, gb);
        double gmax = std::fabs(gb);
        for (double g : grad) gmax = std::max(gmax, std::fabs(g));
        if (gmax <= options.tol) {
            model.converged = true;
            break;
        }
        bool stepped = false;
        if (newton_ok) {
            // (X^T W X + lambda I) dx = -grad over [w, b]
            const std::size_t da = d + 1;
            std::vector<double> h(da * da, 0.0), rhs(da);
            for (std::size_t i = 0; i < n; ++i) {
                const double wi =
                    model.class_weights(m.y[i]) * std::max(p[i] * (1.0 - p[i]), 1e-12);
                const double* xi = m.row(i);
                for (std::size_t a = 0; a < d; ++a) {
                    const double wxa = wi * xi[a];
                    for (std::size_t c = a; c < d; ++c) h[a * da + c] += wxa * xi[c];
                    h[a * da + d] += wxa;
                }
                h[d * da + d] += wi;
            }
            for (std::size_t a = 0; a < da; ++a)
                for (std::size_t c = 0; c < a; ++c) h[a * da + c] = h[c * da + a];
            for (std::size_t a = 0; a < d; ++a) h[a * da + a] += model.l2_penalty;
            for (std::size_t a = 0; a < d; ++a) rhs[a] = -grad[a];
            rhs[d] = -gb;
            if (auto dx = cholesky_solve(h, rhs)) {
                for (std::size_t a = 0; a < d; ++a) w[a] += (*dx)[a];
                b += (*dx)[d];
                stepped = true;
            } else {
                newton_ok = false; // singular system: gradient fallback
            }
        }
        if (!stepped) {
            const double step = 1.0 / (0.25 * static_cast<double>(n) + model.l2_penalty);
            for (std::size_t a = 0; a < d; ++a) w[a] -= step * grad[a];
            b -= step * gb;
        }
    }
    if (!model.converged) {
        compute_grad(grad, gb);
        double gmax = std::fabs(gb);
        for (double g : grad) gmax = std::max(gmax, std::fabs(g));
        if (gmax <= options.tol) model.converged = true;
    }
    model.weights = std::move(w);
    model.intercept = b;
    return model;
}

} // namespace rfq
