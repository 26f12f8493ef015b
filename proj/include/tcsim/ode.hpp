#pragma once

// Dormand-Prince 5(4) with PI step-size control and the standard
// fourth-order continuous extension. Autonomous systems on flat complex
// vectors; all vector arithmetic goes through the SIMD kernel table.
//
// The error norm is the max norm. Components that stay identically zero
// therefore never influence step selection, which keeps step sequences of
// embedded sub-problems (a block state inside a larger dense state) aligned.

#include "tcsim/simd/kernels.hpp"

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace tcsim {

using cplx = std::complex<double>;

class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& what, double last_good_time)
        : std::runtime_error(what), last_good_time_(last_good_time) {}
    /// Last accepted time, in whatever variable the caller integrates.
    double last_good_time() const { return last_good_time_; }

private:
    double last_good_time_;
};

struct OdeOptions {
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;
    double initial_step = 0.0;  // 0: pick automatically
    double max_step = 0.0;      // 0: unbounded
    std::size_t max_steps = 10'000'000;
};

class DormandPrince45 {
public:
    using Rhs = std::function<void(std::span<const cplx> y, std::span<cplx> dydt)>;

    DormandPrince45(std::size_t n, Rhs rhs, OdeOptions options,
                    const simd::KernelTable& kernels = simd::best_kernels());

    void reset(double t0, std::span<const cplx> y0);

    /// Advance by one accepted step, never past `t_limit`.
    /// Throws IntegrationError on step-size underflow or non-finite state.
    void step(double t_limit);

    double t() const { return t_; }
    double t_previous() const { return t_prev_; }
    std::span<const cplx> y() const { return y_; }

    /// State at t in [t_previous(), t()] from the continuous extension.
    void dense_output(double t, std::span<cplx> out) const;

    std::size_t accepted_steps() const { return n_accepted_; }
    std::size_t rejected_steps() const { return n_rejected_; }
    std::size_t rhs_evaluations() const { return n_eval_; }
    double last_step_size() const { return t_ - t_prev_; }

private:
    void eval(std::span<const cplx> y, std::vector<cplx>& out);
    double initial_step_guess();
    void combine(const std::vector<cplx>& base, std::initializer_list<double> coeff,
                 std::initializer_list<const std::vector<cplx>*> terms, std::vector<cplx>& out) const;

    std::size_t n_;
    Rhs rhs_;
    OdeOptions opt_;
    const simd::KernelTable* kernels_;

    double t_ = 0.0;
    double t_prev_ = 0.0;
    double h_ = 0.0;
    double fac_old_ = 1e-4;
    bool last_rejected_ = false;
    std::size_t n_accepted_ = 0;
    std::size_t n_rejected_ = 0;
    std::size_t n_eval_ = 0;

    std::vector<cplx> y_, y_prev_, y_stage_, y_new_, err_, zero_;
    std::vector<cplx> k1_, k2_, k3_, k4_, k5_, k6_, k7_;
};

}  // namespace tcsim
