#include "torusflow/fourier.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace torusflow::fourier {

namespace {

// FFTW planning is not thread safe; execution with new-array execute is.
fftw_plan cached_plan(int rank, int n, int sign) {
    static std::mutex mutex;
    static std::map<std::tuple<int, int, int>, fftw_plan> plans;
    std::lock_guard<std::mutex> lock(mutex);
    auto key = std::make_tuple(rank, n, sign);
    auto it = plans.find(key);
    if (it != plans.end()) return it->second;
    std::size_t len = rank == 1 ? std::size_t(n) : std::size_t(n) * std::size_t(n);
    auto* in = fftw_alloc_complex(len);
    auto* out = fftw_alloc_complex(len);
    unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan p = rank == 1 ? fftw_plan_dft_1d(n, in, out, sign, flags)
                            : fftw_plan_dft_2d(n, n, in, out, sign, flags);
    fftw_free(in);
    fftw_free(out);
    if (!p) throw std::runtime_error("fftw planning failed");
    plans.emplace(key, p);
    return p;
}

void execute(int rank, int n, int sign, const cplx* in, cplx* out) {
    fftw_plan p = cached_plan(rank, n, sign);
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
}

}  // namespace

int wavenumber(std::size_t j, std::size_t n) {
    return j <= n / 2 ? int(j) : int(j) - int(n);
}

std::vector<cplx> forward(std::span<const cplx> f) {
    const std::size_t n = f.size();
    std::vector<cplx> c(n);
    execute(1, int(n), FFTW_FORWARD, f.data(), c.data());
    const double inv = 1.0 / double(n);
    for (auto& v : c) v *= inv;
    return c;
}

std::vector<cplx> forward(std::span<const double> f) {
    std::vector<cplx> z(f.begin(), f.end());
    return forward(std::span<const cplx>(z));
}

std::vector<cplx> inverse(std::span<const cplx> c) {
    std::vector<cplx> f(c.size());
    execute(1, int(c.size()), FFTW_BACKWARD, c.data(), f.data());
    return f;
}

std::vector<double> inverse_real(std::span<const cplx> c) {
    auto z = inverse(c);
    std::vector<double> f(z.size());
    for (std::size_t j = 0; j < z.size(); ++j) f[j] = z[j].real();
    return f;
}

std::vector<cplx> derivative_coeffs(std::span<const cplx> c, int order) {
    const std::size_t n = c.size();
    std::vector<cplx> d(n);
    for (std::size_t j = 0; j < n; ++j) {
        int k = wavenumber(j, n);
        if (n % 2 == 0 && j == n / 2 && order % 2 == 1) {
            d[j] = 0.0;
            continue;
        }
        cplx ik(0.0, double(k));
        cplx factor = 1.0;
        for (int q = 0; q < order; ++q) factor *= ik;
        d[j] = c[j] * factor;
    }
    return d;
}

std::vector<double> derivative(std::span<const double> f, int order) {
    auto c = forward(f);
    return inverse_real(derivative_coeffs(c, order));
}

double evaluate(std::span<const cplx> c, double t) {
    const std::size_t n = c.size();
    const std::size_t kmax = (n % 2 == 0) ? n / 2 - 1 : (n - 1) / 2;
    double sum = c[0].real();
    const cplx step = std::polar(1.0, t);
    cplx e = 1.0;
    for (std::size_t k = 1; k <= kmax; ++k) {
        e *= step;
        sum += 2.0 * (c[k] * e).real();
    }
    if (n % 2 == 0) sum += c[n / 2].real() * std::cos(0.5 * double(n) * t);
    return sum;
}

double mean_product(std::span<const cplx> a, std::span<const cplx> b) {
    const std::size_t n = a.size();
    const std::size_t kmax = (n % 2 == 0) ? n / 2 - 1 : (n - 1) / 2;
    double sum = (a[0] * std::conj(b[0])).real();
    for (std::size_t k = 1; k <= kmax; ++k) sum += 2.0 * (a[k] * std::conj(b[k])).real();
    if (n % 2 == 0) sum += 0.5 * a[n / 2].real() * b[n / 2].real();
    return sum;
}

std::vector<double> upsample(std::span<const cplx> c, std::size_t m) {
    const std::size_t n = c.size();
    if (m < n) throw std::invalid_argument("upsample: target smaller than source");
    std::vector<cplx> p(m, 0.0);
    const std::size_t kmax = (n % 2 == 0) ? n / 2 - 1 : (n - 1) / 2;
    p[0] = c[0];
    for (std::size_t k = 1; k <= kmax; ++k) {
        p[k] = c[k];
        p[m - k] = c[n - k];
    }
    if (n % 2 == 0) {
        // split the Nyquist term symmetrically so the result stays real
        if (m == n) {
            p[n / 2] = c[n / 2];
        } else {
            p[n / 2] += 0.5 * c[n / 2];
            p[m - n / 2] += 0.5 * c[n / 2];
        }
    }
    return inverse_real(p);
}

std::vector<cplx> forward2(std::span<const double> f, std::size_t n) {
    std::vector<cplx> z(f.begin(), f.end()), c(n * n);
    execute(2, int(n), FFTW_FORWARD, z.data(), c.data());
    return c;
}

std::vector<cplx> inverse2(std::span<const cplx> c, std::size_t n) {
    std::vector<cplx> f(n * n);
    execute(2, int(n), FFTW_BACKWARD, c.data(), f.data());
    const double inv = 1.0 / double(n * n);
    for (auto& v : f) v *= inv;
    return f;
}

}  // namespace torusflow::fourier
