#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

/// Periodic Fourier helpers on n equispaced samples t_j = 2*pi*j/n.
/// Coefficients c_k are normalized so that f_j = sum_k c_k e^{i k t_j}.
namespace torusflow::fourier {

using cplx = std::complex<double>;

/// Signed wavenumber stored at index j; the Nyquist index maps to +n/2.
int wavenumber(std::size_t j, std::size_t n);

std::vector<cplx> forward(std::span<const double> f);
std::vector<cplx> forward(std::span<const cplx> f);
/// Real part of the inverse transform at the n nodes.
std::vector<double> inverse_real(std::span<const cplx> c);
std::vector<cplx> inverse(std::span<const cplx> c);

/// Coefficients of the order-th t-derivative. The Nyquist mode is zeroed for odd orders.
std::vector<cplx> derivative_coeffs(std::span<const cplx> c, int order);
std::vector<double> derivative(std::span<const double> f, int order);

/// Symmetric real trigonometric interpolant evaluated at arbitrary t.
double evaluate(std::span<const cplx> c, double t);

/// Mean over [0, 2pi) of the product of two real interpolants, exact for the interpolants.
double mean_product(std::span<const cplx> a, std::span<const cplx> b);

/// Samples of the real interpolant on m >= n uniform points (zero padding).
std::vector<double> upsample(std::span<const cplx> c, std::size_t m);

/// Two-dimensional transforms on an n x n row-major array (index j*n + i, x index i fastest).
/// forward2 is unnormalized; inverse2 divides by n^2.
std::vector<cplx> forward2(std::span<const double> f, std::size_t n);
std::vector<cplx> inverse2(std::span<const cplx> c, std::size_t n);

}  // namespace torusflow::fourier
