#include "perifide/nystrom.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace perifide {

Mat kernel_matrix(const KernelFn& k, const Vec& x)
{
    const Eigen::Index N = x.size();
    Mat K(N, N);
#pragma omp parallel for schedule(static)
    for (Eigen::Index i = 0; i < N; ++i)
        for (Eigen::Index j = 0; j < N; ++j) K(i, j) = k(x[i], x[j]);
    return K;
}

Vec nystrom_apply(const Mat& K, const Vec& w, const Vec& h)
{
    const Eigen::Index N = K.rows();
    const Vec wh = w.cwiseProduct(h);
    Vec out(N);
#pragma omp parallel for schedule(static)
    for (Eigen::Index i = 0; i < N; ++i) out[i] = K.row(i).dot(wh);
    return out;
}

Vec nystrom_apply_transpose(const Mat& K, const Vec& h)
{
    const Eigen::Index N = K.cols();
    Vec out(N);
#pragma omp parallel for schedule(static)
    for (Eigen::Index j = 0; j < N; ++j) out[j] = K.col(j).dot(h);
    return out;
}

Mat nystrom_jacobian(const Mat& K, const Vec& w, const Vec& outer, const Vec& inner)
{
    const Eigen::Index N = K.rows(), M = K.cols();
    const Vec wi = w.cwiseProduct(inner);
    Mat J(N, M);
#pragma omp parallel for schedule(static)
    for (Eigen::Index j = 0; j < M; ++j)
        for (Eigen::Index i = 0; i < N; ++i) J(i, j) = outer[i] * K(i, j) * wi[j];
    return J;
}

namespace serial {

Mat kernel_matrix(const KernelFn& k, const Vec& x)
{
    const Eigen::Index N = x.size();
    Mat K(N, N);
    for (Eigen::Index i = 0; i < N; ++i)
        for (Eigen::Index j = 0; j < N; ++j) K(i, j) = k(x[i], x[j]);
    return K;
}

Vec nystrom_apply(const Mat& K, const Vec& w, const Vec& h)
{
    const Eigen::Index N = K.rows(), M = K.cols();
    Vec out = Vec::Zero(N);
    for (Eigen::Index i = 0; i < N; ++i) {
        double s = 0.0;
        for (Eigen::Index j = 0; j < M; ++j) s += K(i, j) * (w[j] * h[j]);
        out[i] = s;
    }
    return out;
}

Vec nystrom_apply_transpose(const Mat& K, const Vec& h)
{
    const Eigen::Index N = K.rows(), M = K.cols();
    Vec out = Vec::Zero(M);
    for (Eigen::Index j = 0; j < M; ++j) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < N; ++i) s += K(i, j) * h[i];
        out[j] = s;
    }
    return out;
}

Mat nystrom_jacobian(const Mat& K, const Vec& w, const Vec& outer, const Vec& inner)
{
    const Eigen::Index N = K.rows(), M = K.cols();
    Mat J(N, M);
    for (Eigen::Index i = 0; i < N; ++i)
        for (Eigen::Index j = 0; j < M; ++j) J(i, j) = outer[i] * K(i, j) * (w[j] * inner[j]);
    return J;
}

} // namespace serial

void set_threads(int n)
{
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

int max_threads()
{
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

} // namespace perifide
