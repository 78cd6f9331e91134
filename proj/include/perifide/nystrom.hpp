#pragma once

#include "perifide/quad.hpp"

#include <functional>

namespace perifide {

// Data-parallel Nyström kernels. The `serial` namespace holds plain-loop
// reference versions used by tests and the benchmark.

using KernelFn = std::function<double(double, double)>;

// K_ij = k(x_i, x_j)
Mat kernel_matrix(const KernelFn& k, const Vec& x);
// (K (w .* h))_i
Vec nystrom_apply(const Mat& K, const Vec& w, const Vec& h);
// (K^T h)_j
Vec nystrom_apply_transpose(const Mat& K, const Vec& h);
// diag(outer) * K * diag(w .* inner)
Mat nystrom_jacobian(const Mat& K, const Vec& w, const Vec& outer, const Vec& inner);

namespace serial {
Mat kernel_matrix(const KernelFn& k, const Vec& x);
Vec nystrom_apply(const Mat& K, const Vec& w, const Vec& h);
Vec nystrom_apply_transpose(const Mat& K, const Vec& h);
Mat nystrom_jacobian(const Mat& K, const Vec& w, const Vec& outer, const Vec& inner);
} // namespace serial

// Caps the OpenMP team size; n <= 0 leaves the runtime default.
void set_threads(int n);
int max_threads();

} // namespace perifide
