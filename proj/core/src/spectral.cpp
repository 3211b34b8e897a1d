#include "dflow/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

namespace dflow {

Grid::Grid(int n, double length) : n(n), length(length) {
    if (n < 16 || (n & (n - 1)) != 0)
        throw std::invalid_argument("grid size must be a power of two >= 16");
    if (!(length > 0.0))
        throw std::invalid_argument("grid length must be positive");
}

Eigen::VectorXd Grid::nodes() const {
    return Eigen::VectorXd::LinSpaced(n, 0.0, (n - 1) * dx());
}

namespace spectral {

namespace {

// One pair of estimate-mode plans per transform size, cached per thread.
// Estimate plans are chosen deterministically, which keeps runs bitwise
// reproducible; plan creation itself is serialised (FFTW requirement).
class PlanSet {
  public:
    explicit PlanSet(int n) : n_(n) {
        real_ = fftw_alloc_real(n);
        cplx_ = fftw_alloc_complex(n / 2 + 1);
        static std::mutex planner_mutex;
        std::lock_guard<std::mutex> lock(planner_mutex);
        fwd_ = fftw_plan_dft_r2c_1d(n, real_, cplx_, FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft_c2r_1d(n, cplx_, real_, FFTW_ESTIMATE);
        if (!fwd_ || !bwd_) throw std::runtime_error("fftw plan creation failed");
    }

    PlanSet(const PlanSet&) = delete;
    PlanSet& operator=(const PlanSet&) = delete;

    ~PlanSet() {
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
        fftw_free(real_);
        fftw_free(cplx_);
    }

    void forward(const double* in, std::complex<double>* out) {
        std::copy(in, in + n_, real_);
        fftw_execute(fwd_);
        std::copy(reinterpret_cast<std::complex<double>*>(cplx_),
                  reinterpret_cast<std::complex<double>*>(cplx_) + n_ / 2 + 1, out);
    }

    void inverse(const std::complex<double>* in, double* out) {
        std::copy(in, in + n_ / 2 + 1, reinterpret_cast<std::complex<double>*>(cplx_));
        fftw_execute(bwd_);
        const double scale = 1.0 / n_;
        for (int i = 0; i < n_; ++i) out[i] = real_[i] * scale;
    }

  private:
    int n_;
    double* real_;
    fftw_complex* cplx_;
    fftw_plan fwd_;
    fftw_plan bwd_;
};

PlanSet& plans_for(int n) {
    thread_local std::unordered_map<int, std::unique_ptr<PlanSet>> cache;
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, std::make_unique<PlanSet>(n)).first;
    return *it->second;
}

}  // namespace

Spectrum analyze(const Eigen::MatrixXd& values) {
    const int n = static_cast<int>(values.rows());
    Spectrum coeffs(n / 2 + 1, values.cols());
    PlanSet& plans = plans_for(n);
    for (Eigen::Index c = 0; c < values.cols(); ++c)
        plans.forward(values.col(c).data(), coeffs.col(c).data());
    return coeffs;
}

Eigen::MatrixXd synthesize(const Spectrum& coeffs, int n) {
    Eigen::MatrixXd values(n, coeffs.cols());
    PlanSet& plans = plans_for(n);
    for (Eigen::Index c = 0; c < coeffs.cols(); ++c)
        plans.inverse(coeffs.col(c).data(), values.col(c).data());
    return values;
}

Eigen::VectorXd wavenumbers(const Grid& grid) {
    Eigen::VectorXd xi(grid.n / 2 + 1);
    const double base = 2.0 * std::numbers::pi / grid.length;
    for (int k = 0; k <= grid.n / 2; ++k) xi(k) = base * k;
    return xi;
}

Eigen::MatrixXd derivative(const Eigen::MatrixXd& values, const Grid& grid, int order) {
    if (order < 0) throw std::invalid_argument("derivative order must be nonnegative");
    if (order == 0) return values;
    if (values.rows() != grid.n) throw std::invalid_argument("field size does not match grid");

    Spectrum coeffs = analyze(values);
    const Eigen::VectorXd xi = wavenumbers(grid);
    for (int k = 0; k <= grid.n / 2; ++k) {
        const double p = std::pow(xi(k), order);
        std::complex<double> mult;  // (i xi)^order with i^order cycled exactly
        switch (order % 4) {
            case 0: mult = {p, 0.0}; break;
            case 1: mult = {0.0, p}; break;
            case 2: mult = {-p, 0.0}; break;
            default: mult = {0.0, -p}; break;
        }
        if (k == grid.n / 2 && order % 2 == 1) mult = 0.0;
        coeffs.row(k) *= mult;
    }
    return synthesize(coeffs, grid.n);
}

Eigen::VectorXd derivative(const Eigen::VectorXd& values, const Grid& grid, int order) {
    return derivative(Eigen::MatrixXd(values), grid, order).col(0);
}

Eigen::MatrixXd apply_multiplier(const Eigen::MatrixXd& values, const Grid& grid,
                                 const Eigen::VectorXcd& multiplier) {
    if (multiplier.size() != grid.n / 2 + 1)
        throw std::invalid_argument("multiplier size must be n/2 + 1");
    Spectrum coeffs = analyze(values);
    coeffs.array().colwise() *= multiplier.array();
    return synthesize(coeffs, grid.n);
}

Eigen::MatrixXd dealias(const Eigen::MatrixXd& values, const Grid& grid) {
    Spectrum coeffs = analyze(values);
    const int cutoff = grid.n / 3;
    for (int k = cutoff + 1; k <= grid.n / 2; ++k) coeffs.row(k).setZero();
    return synthesize(coeffs, grid.n);
}

}  // namespace spectral
}  // namespace dflow
