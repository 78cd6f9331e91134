#include "perifide/trivial.hpp"

#include "perifide/error.hpp"

#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <numeric>

namespace perifide {

KOperator build_K(const Model& m)
{
    if (!m.newrhs_form())
        throw Error("unsupported-model", "the trivial-branch operator needs the multiplicative slot");
    const auto g = m.inner().eval(0.0);
    const auto G = m.outer().eval(0.0);
    KOperator K;
    K.weights = m.rule().weights;
    K.matrix = G[1] * g[1] * m.kernel_values() * K.weights.asDiagonal();
    const Mat& k = m.kernel_values();
    K.symmetric_core = (k - k.transpose()).cwiseAbs().maxCoeff() <= 1e-14 * k.cwiseAbs().maxCoeff();
    return K;
}

namespace {

void fix_sign(Vec& x)
{
    const double mx = x.cwiseAbs().maxCoeff();
    int j = 0;
    while (j < x.size() && std::abs(x[j]) < mx * (1 - 1e-9)) ++j;
    if (x[j] < 0) x = -x;
}

int parity_of(const QuadratureRule& r, const Vec& x)
{
    if (!r.symmetric()) return -1;
    const auto [odd, even] = parity_decompose(r, x);
    const double n = x.cwiseAbs().maxCoeff();
    if (odd.cwiseAbs().maxCoeff() < 1e-8 * n) return 0;
    if (even.cwiseAbs().maxCoeff() < 1e-8 * n) return 1;
    return -1;
}

} // namespace

TrivialSpectrum k_spectrum(const Model& m, const KOperator& K, int count)
{
    const int N = static_cast<int>(K.matrix.rows());
    if (count > N) throw std::invalid_argument("k_spectrum: count exceeds node count");
    const Vec sw = K.weights.cwiseSqrt();
    TrivialSpectrum s;
    std::vector<std::pair<double, Vec>> pairs;
    if (K.symmetric_core) {
        // D^{1/2} K D^{-1/2} is symmetric
        const Mat S = sw.asDiagonal() * K.matrix * sw.cwiseInverse().asDiagonal();
        Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (S + S.transpose()));
        if (es.info() != Eigen::Success) throw Error("eigensolver-failure", "symmetric eigensolve");
        for (int k = 0; k < N; ++k)
            pairs.emplace_back(es.eigenvalues()[k], es.eigenvectors().col(k).cwiseQuotient(sw));
    } else {
        Eigen::EigenSolver<Mat> es(K.matrix);
        if (es.info() != Eigen::Success) throw Error("eigensolver-failure", "dense eigensolve");
        for (int k = 0; k < N; ++k) {
            Vec v = es.eigenvectors().col(k).real();
            v /= std::sqrt(pairing(m.rule(), v, v));
            pairs.emplace_back(es.eigenvalues()[k].real(), v);
        }
    }
    std::stable_sort(pairs.begin(), pairs.end(),
                     [](const auto& x, const auto& y) { return x.first > y.first; });
    double prod = 1.0;
    for (int t = 0; t < m.period(); ++t) prod *= m.beta(t);
    const double bmean = std::pow(prod, 1.0 / m.period());
    for (int k = 0; k < count; ++k) {
        Vec v = pairs[k].second;
        fix_sign(v);
        s.lambda.push_back(pairs[k].first);
        s.alpha0.push_back(1.0 / (pairs[k].first * bmean));
        s.parity.push_back(parity_of(m.rule(), v));
        s.xi.push_back(std::move(v));
    }
    return s;
}

std::vector<double> trivial_weights(const Model& m, double lambda, double alpha, int theta)
{
    std::vector<double> a(static_cast<std::size_t>(theta));
    double v = 1.0;
    for (int t = 0; t < theta; ++t) {
        a[t] = v;
        v *= alpha * lambda * m.beta(t);
    }
    return a;
}

EigSequences trivial_eig_sequences(const Model& m, const TrivialSpectrum& s, int i, int theta)
{
    const auto a = trivial_weights(m, s.lambda[i], s.alpha0[i], theta);
    EigSequences e;
    for (int t = 0; t < theta; ++t) {
        e.xi.push_back(a[t] * s.xi[i]);
        e.eta.push_back(s.xi[i] / a[t]);
    }
    return e;
}

TrivialIndicators trivial_indicators(const Model& m, const TrivialSpectrum& s, int i, int theta)
{
    const auto c = m.trivial_coefficients();
    const double al = s.alpha0[i];
    const auto a = trivial_weights(m, s.lambda[i], al, theta);
    double sa = 0.0, sa2 = 0.0;
    for (double x : a) sa += x, sa2 += x * x;
    const Vec& x = s.xi[i];
    const QuadratureRule& r = m.rule();
    TrivialIndicators ti;
    ti.alpha = al;
    ti.g11 = theta / al * integrate(r, x.cwiseAbs2());
    ti.g20 = (c[0] + c[1]) * sa * integrate(r, x.array().cube().matrix());
    ti.g30 = (c[2] + c[3]) * sa2 * integrate(r, x.array().pow(4).matrix());
    return ti;
}

Vec solve_fredholm_wbar(const KOperator& K, const TrivialSpectrum& s, int i, int theta)
{
    const double lam = s.lambda[i];
    const Eigen::Index N = K.matrix.rows();
    if (theta % 2 == 0) {
        Eigen::EigenSolver<Mat> es(K.matrix, false);
        for (Eigen::Index k = 0; k < N; ++k)
            if (std::abs(es.eigenvalues()[k] + lam) < 1e-10 * std::abs(lam))
                throw Error("solvability-violated", "-lambda is an eigenvalue and theta is even");
    }
    Mat P = Mat::Identity(N, N);
    for (int t = 0; t < theta; ++t) P = K.matrix * P;
    const Mat A = Mat::Identity(N, N) - std::pow(lam, -theta) * P;
    const Vec& x = s.xi[i];
    double mu = 0.0;
    const Vec w = bordered_solve(A, x, K.weights.cwiseProduct(x), x.cwiseAbs2(), &mu);
    const double res = (A * w - x.cwiseAbs2() + mu * x).lpNorm<Eigen::Infinity>();
    if (!is_zero(mu, x.cwiseAbs2().lpNorm<Eigen::Infinity>()) || !(res < 1e-8))
        throw Error("solvability-violated", "squared eigenfunction not in the range");
    return w;
}

double trivial_gbar(const Model& m, const KOperator& K, const TrivialSpectrum& s, int i, int theta)
{
    const auto c = m.trivial_coefficients();
    const double cd = c[0] + c[1];
    const double lam = s.lambda[i];
    const double al = s.alpha0[i];
    const auto a = trivial_weights(m, lam, al, theta);
    const QuadratureRule& r = m.rule();
    const Vec& x0 = s.xi[i];
    const Vec wbar = solve_fredholm_wbar(K, s, i, theta);
    const TrivialIndicators ti = trivial_indicators(m, s, i, theta);
    auto at = [&](int t) { return a[static_cast<std::size_t>(((t % theta) + theta) % theta)]; };
    double sum = 0.0;
    Vec Kt = wbar; // 𝒦^t w̄
    for (int t = 0; t < theta; ++t) {
        double conv = 0.0;
        for (int q = 0; q < t; ++q) conv += at(theta + q - t) * at(q);
        for (int q = t; q < theta; ++q) conv += at(q) * at(q - t);
        const Vec xt = at(t) * x0, xt1 = at(t + 1) * x0;
        Vec term = cd * cd * std::pow(lam, -t) * conv * Kt - cd * cd * xt.cwiseAbs2();
        if (c[0] * c[1] != 0)
            term += c[0] * c[1] *
                    (xt1.cwiseAbs2() - al * m.beta(t) * K.matrix * xt.cwiseAbs2());
        sum += integrate(r, x0.cwiseAbs2().cwiseProduct(term));
        Kt = K.matrix * Kt;
    }
    return ti.g30 + 3.0 * sum;
}

std::vector<double> laplace_roots(double aL, int count)
{
    if (!(aL > 0)) throw std::invalid_argument("laplace_roots: aL must be positive");
    const double s = 0.5 * aL;
    std::vector<double> nu;
    for (int i = 0; i < count; ++i) {
        // root i lies in sν ∈ (iπ/2, (i+1)π/2)
        auto f = [s, i](double v) {
            return i % 2 == 0 ? v * std::sin(s * v) - std::cos(s * v)
                              : v * std::cos(s * v) + std::sin(s * v);
        };
        const double lo = i * M_PI / (2 * s), hi = (i + 1) * M_PI / (2 * s);
        auto tol = [](double x, double y) { return std::abs(x - y) < 1e-13 * std::max(1.0, x); };
        const auto [x, y] = boost::math::tools::bisect(f, lo + 1e-15 * hi, hi, tol);
        nu.push_back(0.5 * (x + y));
    }
    return nu;
}

double laplace_gbar_autonomous(double a, double L, int i, const std::array<double, 4>& c)
{
    if (i % 2 == 0) throw std::invalid_argument("laplace_gbar_autonomous: mode must be odd");
    if (c[0] * c[1] != 0) throw std::invalid_argument("laplace_gbar_autonomous: needs c2 d2 = 0");
    const double v = laplace_roots(a * L, i + 1)[static_cast<std::size_t>(i)];
    const double v2 = v * v, q = 1 + v2;
    const double cd = c[0] + c[1];
    return (c[2] + c[3]) * (3 * L / 8 + (3 + 5 * v2) / (4 * a * q * q)) -
           cd * cd * (15 * a * L * q * q * q + 30 + 80 * v2 + 66 * v2 * v2) /
               (24 * a * std::pow(v + v * v2, 2));
}

std::pair<double, double> gauss_radius_bounds(double a, double L)
{
    if (!(a > 0 && L > 0)) throw std::invalid_argument("gauss_radius_bounds: a, L must be positive");
    return {0.5 * std::erf(a * L), 2.0 * std::erf(0.5 * a * L)};
}

std::vector<TrivialMode> classify_trivial_branch(const Model& m, int count, int theta)
{
    if (theta <= 0) theta = m.period();
    const KOperator K = build_K(m);
    const TrivialSpectrum s = k_spectrum(m, K, count);
    std::vector<TrivialMode> out;
    for (int i = 0; i < count; ++i) {
        TrivialMode md;
        md.i = i;
        md.lambda = s.lambda[i];
        md.alpha0 = s.alpha0[i];
        md.parity = s.parity[i];
        PeriodicOrbit o{theta, zeros(theta, m.size()), md.alpha0, 0.0, 0};
        md.point = classify(m, o);
        out.push_back(std::move(md));
    }
    return out;
}

} // namespace perifide
