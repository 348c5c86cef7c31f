#pragma once

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <mutex>
#include <new>
#include <span>

namespace htopt {

namespace detail {
// The FFTW planner is not reentrant; plan execution is.
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace detail

/// Unnormalized complex-to-real inverse DFT of length n,
///   out[j] = sum_{k=0}^{n-1} c[k] exp(+2*pi*i*j*k/n),
/// for Hermitian input given by its first n/2+1 coefficients.
class InverseRealFft {
public:
    explicit InverseRealFft(std::size_t n) : n_(n) {
        in_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1)));
        out_ = static_cast<double*>(fftw_malloc(sizeof(double) * n));
        if (in_ == nullptr || out_ == nullptr) {
            release();
            throw std::bad_alloc();
        }
        std::lock_guard lock(detail::fftw_planner_mutex());
        plan_ = fftw_plan_dft_c2r_1d(static_cast<int>(n), in_, out_, FFTW_ESTIMATE);
    }

    InverseRealFft(const InverseRealFft&) = delete;
    InverseRealFft& operator=(const InverseRealFft&) = delete;

    ~InverseRealFft() { release(); }

    std::size_t size() const noexcept { return n_; }

    std::span<std::complex<double>> spectrum() noexcept {
        return {reinterpret_cast<std::complex<double>*>(in_), n_ / 2 + 1};
    }

    /// Runs the transform. The spectrum buffer is clobbered.
    std::span<const double> execute() {
        fftw_execute(plan_);
        return {out_, n_};
    }

private:
    void release() noexcept {
        if (plan_ != nullptr) {
            std::lock_guard lock(detail::fftw_planner_mutex());
            fftw_destroy_plan(plan_);
            plan_ = nullptr;
        }
        if (in_ != nullptr) fftw_free(in_);
        if (out_ != nullptr) fftw_free(out_);
        in_ = nullptr;
        out_ = nullptr;
    }

    std::size_t n_;
    fftw_complex* in_ = nullptr;
    double* out_ = nullptr;
    fftw_plan plan_ = nullptr;
};

}  // namespace htopt
