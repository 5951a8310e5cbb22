#include "enki/forward_model.hpp"

#include "enki/error.hpp"
#include "enki/models.hpp"

#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

namespace enki {

// ---------------------------------------------------------------------------
// ForwardModel

struct ForwardModel::MatrixCache {
    MatrixFn materialize;
    std::once_flag once;
    Matrix value;
};

ForwardModel::ForwardModel(Index input_dim, Index output_dim, ApplyFn apply, std::string name)
    : input_dim_(input_dim), output_dim_(output_dim), name_(std::move(name)),
      apply_(std::move(apply)) {
    if (input_dim_ < 1 || output_dim_ < 1) {
        throw ConfigError("forward model '" + name_ + "' needs positive dimensions");
    }
    if (!apply_) throw ConfigError("forward model '" + name_ + "' has no apply function");
}

ForwardModel ForwardModel::linear(Matrix g, std::string name) {
    auto shared = std::make_shared<const Matrix>(std::move(g));
    const Index k = shared->rows();
    const Index d = shared->cols();
    return linear_operator(
        d, k, [shared](const Vector& u) -> Vector { return *shared * u; },
        [shared](const Vector& r) -> Vector { return shared->transpose() * r; },
        [shared] { return *shared; }, std::move(name));
}

ForwardModel ForwardModel::linear_operator(Index input_dim, Index output_dim, ApplyFn apply,
                                           ApplyFn adjoint, MatrixFn materialize,
                                           std::string name) {
    ForwardModel m(input_dim, output_dim, std::move(apply), std::move(name));
    if (!adjoint || !materialize) {
        throw ConfigError("linear model '" + m.name_ + "' needs an adjoint and a matrix factory");
    }
    m.adjoint_ = std::move(adjoint);
    m.matrix_ = std::make_shared<MatrixCache>();
    m.matrix_->materialize = std::move(materialize);
    return m;
}

Vector ForwardModel::apply(const Vector& u) const {
    if (!apply_) throw ConfigError("forward model is empty");
    if (u.size() != input_dim_) {
        throw InputError("model '" + name_ + "' expects input of length " +
                         std::to_string(input_dim_) + ", got " + std::to_string(u.size()));
    }
    if (!u.allFinite()) throw InputError("model '" + name_ + "' received non-finite input");
    Vector out;
    try {
        out = apply_(u);
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw ModelError("model '" + name_ + "' failed: " + e.what());
    }
    if (out.size() != output_dim_) {
        throw ModelError("model '" + name_ + "' returned length " + std::to_string(out.size()) +
                         ", expected " + std::to_string(output_dim_));
    }
    if (!out.allFinite()) throw ModelError("model '" + name_ + "' produced non-finite output");
    return out;
}

Vector ForwardModel::apply_adjoint(const Vector& r) const {
    if (!adjoint_) throw ConfigError("model '" + name_ + "' is not linear; no adjoint available");
    if (r.size() != output_dim_) {
        throw InputError("adjoint of '" + name_ + "' expects length " +
                         std::to_string(output_dim_) + ", got " + std::to_string(r.size()));
    }
    if (!r.allFinite()) throw InputError("adjoint of '" + name_ + "' received non-finite input");
    return adjoint_(r);
}

const Matrix& ForwardModel::linear_matrix() const {
    if (!matrix_) throw ConfigError("model '" + name_ + "' has no linear matrix");
    std::call_once(matrix_->once, [this] { matrix_->value = matrix_->materialize(); });
    return matrix_->value;
}

// ---------------------------------------------------------------------------
// EllipticProblem

struct EllipticProblem::Factorization {
    double sub;            // a_i = c_i = −1/h²
    double diag;           // b = 2/h² + 1
    Vector upper_scaled;   // c'_i of the Thomas sweep
    Vector pivot;          // b − a·c'_{i−1}
};

EllipticProblem::EllipticProblem(Index d) : dim_(d), h_(0.0) {
    if (d < 2) throw ConfigError("elliptic problem needs d >= 2, got " + std::to_string(d));
    h_ = std::numbers::pi / static_cast<double>(d + 1);
    auto f = std::make_shared<Factorization>();
    f->sub = -1.0 / (h_ * h_);
    f->diag = 2.0 / (h_ * h_) + 1.0;
    f->upper_scaled.resize(d);
    f->pivot.resize(d);
    f->pivot(0) = f->diag;
    f->upper_scaled(0) = f->sub / f->pivot(0);
    for (Index i = 1; i < d; ++i) {
        f->pivot(i) = f->diag - f->sub * f->upper_scaled(i - 1);
        f->upper_scaled(i) = f->sub / f->pivot(i);
    }
    factor_ = std::move(f);
}

Vector EllipticProblem::grid() const {
    Vector x(dim_);
    for (Index i = 0; i < dim_; ++i) x(i) = static_cast<double>(i + 1) * h_;
    return x;
}

Matrix EllipticProblem::system_matrix() const {
    Matrix a = Matrix::Zero(dim_, dim_);
    for (Index i = 0; i < dim_; ++i) {
        a(i, i) = factor_->diag;
        if (i > 0) a(i, i - 1) = factor_->sub;
        if (i + 1 < dim_) a(i, i + 1) = factor_->sub;
    }
    return a;
}

Vector EllipticProblem::apply_operator(const Vector& p) const {
    if (p.size() != dim_) throw DimensionError("elliptic operator: wrong vector length");
    Vector out(dim_);
    for (Index i = 0; i < dim_; ++i) {
        double v = factor_->diag * p(i);
        if (i > 0) v += factor_->sub * p(i - 1);
        if (i + 1 < dim_) v += factor_->sub * p(i + 1);
        out(i) = v;
    }
    return out;
}

Vector EllipticProblem::solve(const Vector& rhs) const {
    if (rhs.size() != dim_) throw DimensionError("elliptic solve: wrong vector length");
    const Factorization& f = *factor_;
    Vector x(dim_);
    x(0) = rhs(0) / f.pivot(0);
    for (Index i = 1; i < dim_; ++i) x(i) = (rhs(i) - f.sub * x(i - 1)) / f.pivot(i);
    for (Index i = dim_ - 2; i >= 0; --i) x(i) -= f.upper_scaled(i) * x(i + 1);
    if (!x.allFinite()) throw ModelError("elliptic solve produced non-finite values");
    return x;
}

Matrix EllipticProblem::inverse() const {
    Matrix inv(dim_, dim_);
    for (Index j = 0; j < dim_; ++j) inv.col(j) = solve(Vector::Unit(dim_, j));
    return inv;
}

ForwardModel EllipticProblem::model() const {
    // Copies share the factorization; A is symmetric so A⁻¹ is self-adjoint.
    const EllipticProblem self = *this;
    return ForwardModel::linear_operator(
        dim_, dim_, [self](const Vector& u) { return self.solve(u); },
        [self](const Vector& r) { return self.solve(r); }, [self] { return self.inverse(); },
        "elliptic(d=" + std::to_string(dim_) + ")");
}

ForwardModel build_elliptic(Index d) {
    return EllipticProblem(d).model();
}

// ---------------------------------------------------------------------------
// Deb bumps

std::pair<ForwardModel, ForwardModel> deb_pair() {
    const double c = 1.0 / std::numbers::sqrt2;
    auto bump = [](double cx, double cy) {
        return [cx, cy](const Vector& u) -> Vector {
            const double r2 = (u(0) - cx) * (u(0) - cx) + (u(1) - cy) * (u(1) - cy);
            return Vector::Constant(1, 1.0 - std::exp(-r2));
        };
    };
    return {ForwardModel(2, 1, bump(c, c), "deb_g1"), ForwardModel(2, 1, bump(-c, -c), "deb_g2")};
}

// ---------------------------------------------------------------------------
// Data synthesis and sampling

Observation synthesize_observation(const ForwardModel& model, const Vector& truth, double gamma,
                                   std::uint64_t seed) {
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
        throw ConfigError("gamma must be finite and >= 0, got " + std::to_string(gamma));
    }
    Vector y = model.apply(truth);
    if (gamma > 0.0) {
        Rng rng(seed);
        std::normal_distribution<double> normal(0.0, gamma);
        for (Index i = 0; i < y.size(); ++i) y(i) += normal(rng);
    }
    Observation obs(std::move(y), NoiseModel::isotropic(model.output_dim(), gamma));
    obs.truth = truth;
    obs.seed = seed;
    obs.noise_free = gamma == 0.0;
    return obs;
}

Ensemble sample_normal_ensemble(Index d, Index members, Rng& rng, double mean, double stddev) {
    std::normal_distribution<double> normal(mean, stddev);
    Matrix m(d, members);
    for (Index j = 0; j < members; ++j) {
        for (Index i = 0; i < d; ++i) m(i, j) = normal(rng);
    }
    return Ensemble(std::move(m));
}

Ensemble sample_uniform_ensemble(Index d, Index members, Rng& rng, double lo, double hi) {
    std::uniform_real_distribution<double> uniform(lo, hi);
    Matrix m(d, members);
    for (Index j = 0; j < members; ++j) {
        for (Index i = 0; i < d; ++i) m(i, j) = uniform(rng);
    }
    return Ensemble(std::move(m));
}

}  // namespace enki
