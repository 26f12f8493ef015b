#include "tcsim/ode.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

namespace tcsim {
namespace {

// Dormand & Prince (1980) tableau, with the dense-output coefficients of
// Hairer, Norsett & Wanner.
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

constexpr double kSafety = 0.9;
constexpr double kBeta = 0.04;           // PI stabilization
constexpr double kMaxShrink = 1.0 / 0.2;  // h_new >= h / 5
constexpr double kMaxGrow = 1.0 / 10.0;   // h_new <= 10 h

}  // namespace

DormandPrince45::DormandPrince45(std::size_t n, Rhs rhs, OdeOptions options,
                                 const simd::KernelTable& kernels)
    : n_(n), rhs_(std::move(rhs)), opt_(options), kernels_(&kernels) {
    if (!(opt_.rel_tol > 0.0) || !(opt_.abs_tol > 0.0)) {
        throw std::invalid_argument("DormandPrince45: tolerances must be > 0");
    }
    for (auto* v : {&y_, &y_prev_, &y_stage_, &y_new_, &err_, &zero_, &k1_, &k2_, &k3_, &k4_,
                    &k5_, &k6_, &k7_}) {
        v->assign(n_, cplx(0.0, 0.0));
    }
}

void DormandPrince45::eval(std::span<const cplx> y, std::vector<cplx>& out) {
    rhs_(y, out);
    ++n_eval_;
}

void DormandPrince45::combine(const std::vector<cplx>& base, std::initializer_list<double> coeff,
                              std::initializer_list<const std::vector<cplx>*> terms,
                              std::vector<cplx>& out) const {
    std::array<const double*, 8> ptrs{};
    std::size_t i = 0;
    for (const auto* t : terms) {
        ptrs[i++] = reinterpret_cast<const double*>(t->data());
    }
    kernels_->linear_combination(2 * n_, reinterpret_cast<const double*>(base.data()), terms.size(),
                                 coeff.begin(), ptrs.data(), reinterpret_cast<double*>(out.data()));
}

void DormandPrince45::reset(double t0, std::span<const cplx> y0) {
    if (y0.size() != n_) {
        throw std::invalid_argument("DormandPrince45::reset: size mismatch");
    }
    std::copy(y0.begin(), y0.end(), y_.begin());
    y_prev_ = y_;
    t_ = t_prev_ = t0;
    fac_old_ = 1e-4;
    last_rejected_ = false;
    n_accepted_ = n_rejected_ = n_eval_ = 0;
    eval(y_, k1_);
    h_ = opt_.initial_step > 0.0 ? opt_.initial_step : initial_step_guess();
    if (opt_.max_step > 0.0) {
        h_ = std::min(h_, opt_.max_step);
    }
}

double DormandPrince45::initial_step_guess() {
    const double* y0 = reinterpret_cast<const double*>(y_.data());
    auto scaled = [&](const std::vector<cplx>& v) {
        return kernels_->max_error_ratio(2 * n_, reinterpret_cast<const double*>(v.data()), y0, y0,
                                         opt_.abs_tol, opt_.rel_tol);
    };
    const double dnf = scaled(k1_);
    const double dny = scaled(y_);
    double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : 0.01 * dny / dnf;
    if (opt_.max_step > 0.0) {
        h = std::min(h, opt_.max_step);
    }
    combine(y_, {h}, {&k1_}, y_stage_);
    eval(y_stage_, k2_);
    combine(k2_, {-1.0}, {&k1_}, err_);
    const double der2 = scaled(err_) / h;
    const double der12 = std::max(std::abs(der2), std::sqrt(dnf));
    const double h1 = der12 <= 1e-15 ? std::max(1e-6, std::abs(h) * 1e-3)
                                     : std::pow(0.01 / der12, 1.0 / 5.0);
    return std::min(100.0 * h, h1);
}

void DormandPrince45::step(double t_limit) {
    if (t_ >= t_limit) {
        return;
    }
    if (n_accepted_ > 0) {
        std::swap(k1_, k7_);  // first-same-as-last
    }
    const double eps = std::numeric_limits<double>::epsilon();
    for (;;) {
        if (n_accepted_ + n_rejected_ >= opt_.max_steps) {
            throw IntegrationError("step budget exhausted", t_);
        }
        double h = h_;
        if (opt_.max_step > 0.0) {
            h = std::min(h, opt_.max_step);
        }
        bool last = false;
        if (t_ + 1.01 * h >= t_limit) {
            h = t_limit - t_;
            last = true;
        }
        if (!(h > 16.0 * eps * std::abs(t_)) || !(h > 1e-300)) {
            std::ostringstream os;
            os << "step size underflow (h = " << h << ")";
            throw IntegrationError(os.str(), t_);
        }

        combine(y_, {h * a21}, {&k1_}, y_stage_);
        eval(y_stage_, k2_);
        combine(y_, {h * a31, h * a32}, {&k1_, &k2_}, y_stage_);
        eval(y_stage_, k3_);
        combine(y_, {h * a41, h * a42, h * a43}, {&k1_, &k2_, &k3_}, y_stage_);
        eval(y_stage_, k4_);
        combine(y_, {h * a51, h * a52, h * a53, h * a54}, {&k1_, &k2_, &k3_, &k4_}, y_stage_);
        eval(y_stage_, k5_);
        combine(y_, {h * a61, h * a62, h * a63, h * a64, h * a65}, {&k1_, &k2_, &k3_, &k4_, &k5_},
                y_stage_);
        eval(y_stage_, k6_);
        combine(y_, {h * a71, h * a73, h * a74, h * a75, h * a76}, {&k1_, &k3_, &k4_, &k5_, &k6_},
                y_new_);
        eval(y_new_, k7_);
        combine(zero_, {h * e1, h * e3, h * e4, h * e5, h * e6, h * e7},
                {&k1_, &k3_, &k4_, &k5_, &k6_, &k7_}, err_);

        double ratio = kernels_->max_error_ratio(
            2 * n_, reinterpret_cast<const double*>(err_.data()),
            reinterpret_cast<const double*>(y_.data()), reinterpret_cast<const double*>(y_new_.data()),
            opt_.abs_tol, opt_.rel_tol);
        if (!std::isfinite(ratio)) {
            ratio = std::numeric_limits<double>::infinity();
        }

        const double fac11 = std::pow(ratio, 0.2 - kBeta * 0.75);
        if (ratio <= 1.0) {
            double fac = fac11 / std::pow(fac_old_, kBeta);
            fac = std::max(kMaxGrow, std::min(kMaxShrink, fac / kSafety));
            double h_new = h / fac;
            if (last_rejected_) {
                h_new = std::min(h_new, h);
            }
            fac_old_ = std::max(ratio, 1e-4);
            last_rejected_ = false;
            ++n_accepted_;

            std::swap(y_prev_, y_);
            std::swap(y_, y_new_);
            t_prev_ = t_;
            t_ = last ? t_limit : t_ + h;
            // keep the controller's proposal when the step was clipped by t_limit
            h_ = last ? std::max(h_, h_new) : h_new;
            return;
        }
        ++n_rejected_;
        last_rejected_ = true;
        h_ = h / (std::isfinite(fac11) ? std::min(kMaxShrink, fac11 / kSafety) : kMaxShrink);
    }
}

void DormandPrince45::dense_output(double t, std::span<cplx> out) const {
    if (out.size() != n_) {
        throw std::invalid_argument("dense_output: size mismatch");
    }
    const double h = t_ - t_prev_;
    if (h <= 0.0 || t == t_) {
        std::copy(y_.begin(), y_.end(), out.begin());
        return;
    }
    const double th = (t - t_prev_) / h;
    const double th1 = 1.0 - th;
    const double poly = th * th * th1 * th1;

    const double c_new = th * (1.0 - th1 + 2.0 * th * th1);
    const std::array<double, 8> coeff{
        c_new,
        -c_new,
        h * (th * th1 - th * th * th1 + poly * d1),
        h * poly * d3,
        h * poly * d4,
        h * poly * d5,
        h * poly * d6,
        h * (-th * th * th1 + poly * d7),
    };
    const std::array<const double*, 8> terms{
        reinterpret_cast<const double*>(y_.data()),  reinterpret_cast<const double*>(y_prev_.data()),
        reinterpret_cast<const double*>(k1_.data()), reinterpret_cast<const double*>(k3_.data()),
        reinterpret_cast<const double*>(k4_.data()), reinterpret_cast<const double*>(k5_.data()),
        reinterpret_cast<const double*>(k6_.data()), reinterpret_cast<const double*>(k7_.data()),
    };
    kernels_->linear_combination(2 * n_, reinterpret_cast<const double*>(y_prev_.data()), 8,
                                 coeff.data(), terms.data(), reinterpret_cast<double*>(out.data()));
}

}  // namespace tcsim
