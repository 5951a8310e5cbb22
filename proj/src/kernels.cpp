#include "enki/kernels.hpp"

#include "enki/error.hpp"

#include <exception>
#include <mutex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace enki::kernels {

namespace {

void require_same_members(const Matrix& a, const Matrix& b, const char* what) {
    if (a.cols() != b.cols()) {
        throw DimensionError(std::string(what) + ": member counts differ (" +
                             std::to_string(a.cols()) + " vs " + std::to_string(b.cols()) + ")");
    }
}

// Collects the first exception thrown inside a parallel loop so it can be
// rethrown on the calling thread.
class ExceptionSlot {
public:
    template <class F>
    void run(F&& f) noexcept {
        try {
            f();
        } catch (...) {
            std::lock_guard lock(mutex_);
            if (!error_) error_ = std::current_exception();
        }
    }
    void rethrow() const {
        if (error_) std::rethrow_exception(error_);
    }

private:
    std::mutex mutex_;
    std::exception_ptr error_;
};

}  // namespace

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

Vector column_mean(const Matrix& x) {
    const Index d = x.rows();
    const Index members = x.cols();
    const Matrix xt = x.transpose();  // member index contiguous per row
    Vector mean(d);
#pragma omp parallel for schedule(static)
    for (Index i = 0; i < d; ++i) {
        double s = 0.0;
        for (Index k = 0; k < members; ++k) s += xt(k, i);
        mean(i) = s / static_cast<double>(members);
    }
    return mean;
}

Matrix centered(const Matrix& x) {
    const Vector mean = column_mean(x);
    Matrix dev(x.rows(), x.cols());
#pragma omp parallel for schedule(static)
    for (Index j = 0; j < x.cols(); ++j) dev.col(j) = x.col(j) - mean;
    return dev;
}

Matrix centered_product(const Matrix& dev_a, const Matrix& dev_b) {
    require_same_members(dev_a, dev_b, "centered_product");
    const Index members = dev_a.cols();
    const Matrix at = dev_a.transpose();
    const Matrix bt = dev_b.transpose();
    Matrix out(dev_a.rows(), dev_b.rows());
#pragma omp parallel for schedule(static)
    for (Index i = 0; i < dev_a.rows(); ++i) {
        for (Index l = 0; l < dev_b.rows(); ++l) {
            out(i, l) = at.col(i).dot(bt.col(l)) / static_cast<double>(members);
        }
    }
    return out;
}

Matrix ensemble_apply(const Matrix& dev_a, const Matrix& dev_b, const Matrix& w) {
    require_same_members(dev_a, dev_b, "ensemble_apply");
    if (dev_b.rows() != w.rows()) {
        throw DimensionError("ensemble_apply: W has " + std::to_string(w.rows()) +
                             " rows, expected " + std::to_string(dev_b.rows()));
    }
    const double inv = 1.0 / static_cast<double>(dev_a.cols());
    const double members = static_cast<double>(dev_a.cols());
    const double rows_a = static_cast<double>(dev_a.rows());
    const double rows_b = static_cast<double>(dev_b.rows());
    Matrix out(dev_a.rows(), w.cols());
    // Either route through the J×n coefficients or through the small
    // covariance block, whichever is cheaper for these shapes.
    if (members * (rows_a + rows_b) <= 2.0 * rows_a * rows_b) {
#pragma omp parallel for schedule(static)
        for (Index j = 0; j < w.cols(); ++j) {
            const Vector coeff = dev_b.transpose() * w.col(j);
            out.col(j).noalias() = dev_a * (coeff * inv);
        }
        return out;
    }
    Matrix cov(dev_a.rows(), dev_b.rows());
#pragma omp parallel for schedule(static)
    for (Index i = 0; i < dev_a.rows(); ++i) {
        cov.row(i).noalias() = (dev_a.row(i) * dev_b.transpose()) * inv;
    }
#pragma omp parallel for schedule(static)
    for (Index j = 0; j < w.cols(); ++j) out.col(j).noalias() = cov * w.col(j);
    return out;
}

Matrix evaluate_columns(const ForwardModel& model, const Matrix& u) {
    Matrix out(model.output_dim(), u.cols());
    ExceptionSlot slot;
#pragma omp parallel for schedule(dynamic)
    for (Index j = 0; j < u.cols(); ++j) {
        slot.run([&] { out.col(j) = model.apply(u.col(j)); });
    }
    slot.rethrow();
    return out;
}

Matrix adjoint_columns(const ForwardModel& model, const Matrix& r) {
    Matrix out(model.input_dim(), r.cols());
    ExceptionSlot slot;
#pragma omp parallel for schedule(dynamic)
    for (Index j = 0; j < r.cols(); ++j) {
        slot.run([&] { out.col(j) = model.apply_adjoint(r.col(j)); });
    }
    slot.rethrow();
    return out;
}

namespace reference {

Vector column_mean(const Matrix& x) {
    Vector sum = Vector::Zero(x.rows());
    for (Index k = 0; k < x.cols(); ++k) {
        for (Index i = 0; i < x.rows(); ++i) sum(i) += x(i, k);
    }
    return sum / static_cast<double>(x.cols());
}

Matrix centered(const Matrix& x) {
    const Vector mean = column_mean(x);
    Matrix dev = x;
    for (Index k = 0; k < x.cols(); ++k) {
        for (Index i = 0; i < x.rows(); ++i) dev(i, k) -= mean(i);
    }
    return dev;
}

Matrix centered_product(const Matrix& dev_a, const Matrix& dev_b) {
    require_same_members(dev_a, dev_b, "centered_product");
    Matrix out = Matrix::Zero(dev_a.rows(), dev_b.rows());
    for (Index k = 0; k < dev_a.cols(); ++k) {
        for (Index l = 0; l < dev_b.rows(); ++l) {
            for (Index i = 0; i < dev_a.rows(); ++i) out(i, l) += dev_a(i, k) * dev_b(l, k);
        }
    }
    return out / static_cast<double>(dev_a.cols());
}

Matrix ensemble_apply(const Matrix& dev_a, const Matrix& dev_b, const Matrix& w) {
    require_same_members(dev_a, dev_b, "ensemble_apply");
    const Index members = dev_a.cols();
    Matrix coeff = Matrix::Zero(members, w.cols());
    for (Index j = 0; j < w.cols(); ++j) {
        for (Index k = 0; k < members; ++k) {
            for (Index i = 0; i < dev_b.rows(); ++i) coeff(k, j) += dev_b(i, k) * w(i, j);
        }
    }
    Matrix out = Matrix::Zero(dev_a.rows(), w.cols());
    for (Index j = 0; j < w.cols(); ++j) {
        for (Index k = 0; k < members; ++k) {
            for (Index i = 0; i < dev_a.rows(); ++i) out(i, j) += dev_a(i, k) * coeff(k, j);
        }
    }
    return out / static_cast<double>(members);
}

Matrix evaluate_columns(const ForwardModel& model, const Matrix& u) {
    Matrix out(model.output_dim(), u.cols());
    for (Index j = 0; j < u.cols(); ++j) out.col(j) = model.apply(u.col(j));
    return out;
}

}  // namespace reference

}  // namespace enki::kernels
