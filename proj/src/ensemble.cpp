#include "enki/ensemble.hpp"

#include "enki/error.hpp"
#include "enki/kernels.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <string>

namespace enki {

namespace {

Matrix stack_columns(const std::vector<Vector>& cols, const char* what) {
    if (cols.empty()) throw DimensionError(std::string(what) + ": no members");
    const Index rows = cols.front().size();
    Matrix m(rows, static_cast<Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) {
        if (cols[j].size() != rows) {
            throw DimensionError(std::string(what) + ": member " + std::to_string(j) +
                                 " has length " + std::to_string(cols[j].size()) +
                                 ", expected " + std::to_string(rows));
        }
        m.col(static_cast<Index>(j)) = cols[j];
    }
    return m;
}

void require_same_size(const Ensemble& ens, const ResponseSet& resp) {
    if (ens.size() != resp.size()) {
        throw DimensionError("ensemble has " + std::to_string(ens.size()) +
                             " members but response set has " + std::to_string(resp.size()));
    }
}

}  // namespace

Ensemble::Ensemble(Matrix members) : members_(std::move(members)) {
    if (members_.cols() < 1 || members_.rows() < 1) {
        throw DimensionError("ensemble needs at least one member of positive dimension");
    }
    if (!members_.allFinite()) throw InputError("ensemble contains non-finite entries");
}

Ensemble Ensemble::from_members(const std::vector<Vector>& members) {
    return Ensemble(stack_columns(members, "ensemble"));
}

ResponseSet::ResponseSet(Matrix responses) : responses_(std::move(responses)) {
    if (responses_.cols() < 1 || responses_.rows() < 1) {
        throw DimensionError("response set needs at least one response of positive dimension");
    }
    if (!responses_.allFinite()) throw InputError("response set contains non-finite entries");
}

ResponseSet ResponseSet::from_responses(const std::vector<Vector>& responses) {
    return ResponseSet(stack_columns(responses, "response set"));
}

// ---------------------------------------------------------------------------
// NoiseModel

NoiseModel NoiseModel::isotropic(Index k, double gamma) {
    if (k < 1) throw DimensionError("noise model dimension must be positive");
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
        throw ConfigError("noise level gamma must be finite and >= 0, got " + std::to_string(gamma));
    }
    NoiseModel n;
    n.dim_ = k;
    n.isotropic_ = true;
    n.gamma_ = gamma;
    n.scale_ = gamma > 0.0 ? 1.0 / gamma : 1.0;
    return n;
}

NoiseModel NoiseModel::from_precision(const Matrix& precision) {
    if (precision.rows() != precision.cols() || precision.rows() < 1) {
        throw DimensionError("precision matrix must be square and non-empty");
    }
    if (!precision.allFinite()) throw InputError("precision matrix has non-finite entries");
    const double norm = precision.cwiseAbs().maxCoeff();
    if ((precision - precision.transpose()).cwiseAbs().maxCoeff() > 1e-12 * norm) {
        throw ConfigError("precision matrix is not symmetric");
    }
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrized(precision));
    if (eig.info() != Eigen::Success) throw NumericalError("eigendecomposition of precision failed");
    if (eig.eigenvalues().minCoeff() <= 0.0) {
        throw ConfigError("precision matrix is not positive definite");
    }
    NoiseModel n;
    n.dim_ = precision.rows();
    n.isotropic_ = false;
    n.precision_ = symmetrized(precision);
    const Matrix& v = eig.eigenvectors();
    const Vector root = eig.eigenvalues().cwiseSqrt();
    n.sqrt_precision_ = v * root.asDiagonal() * v.transpose();
    n.sqrt_covariance_ = v * root.cwiseInverse().asDiagonal() * v.transpose();
    return n;
}

Matrix NoiseModel::precision() const {
    if (isotropic_) return Matrix::Identity(dim_, dim_) * (scale_ * scale_);
    return precision_;
}

Matrix NoiseModel::covariance() const {
    if (isotropic_) return Matrix::Identity(dim_, dim_) / (scale_ * scale_);
    return sqrt_covariance_ * sqrt_covariance_;
}

Matrix NoiseModel::whiten(const Matrix& r) const {
    if (r.rows() != dim_) throw DimensionError("whiten: wrong observation dimension");
    if (isotropic_) return r * scale_;
    return sqrt_precision_ * r;
}

Vector NoiseModel::whiten(const Vector& r) const {
    return whiten(Matrix(r)).col(0);
}

Matrix NoiseModel::apply_precision(const Matrix& r) const {
    if (r.rows() != dim_) throw DimensionError("apply_precision: wrong observation dimension");
    if (isotropic_) return r * (scale_ * scale_);
    return precision_ * r;
}

Vector NoiseModel::apply_precision(const Vector& r) const {
    return apply_precision(Matrix(r)).col(0);
}

Vector NoiseModel::color(const Vector& z) const {
    if (z.size() != dim_) throw DimensionError("color: wrong observation dimension");
    if (isotropic_) return z / scale_;
    return sqrt_covariance_ * z;
}

Observation::Observation(Vector data, NoiseModel noise_model)
    : y(std::move(data)), noise(std::move(noise_model)) {
    if (y.size() != noise.dim()) {
        throw DimensionError("observation has length " + std::to_string(y.size()) +
                             " but noise model has dimension " + std::to_string(noise.dim()));
    }
    if (!y.allFinite()) throw InputError("observation contains non-finite entries");
}

// ---------------------------------------------------------------------------
// Statistics

Vector ensemble_mean(const Ensemble& ens) {
    return kernels::column_mean(ens.members());
}

Vector response_mean(const ResponseSet& resp) {
    return kernels::column_mean(resp.responses());
}

Matrix cross_covariance(const Ensemble& ens, const ResponseSet& resp) {
    require_same_size(ens, resp);
    return kernels::centered_product(kernels::centered(ens.members()),
                                     kernels::centered(resp.responses()));
}

Matrix response_covariance(const ResponseSet& resp) {
    const Matrix dev = kernels::centered(resp.responses());
    return kernels::centered_product(dev, dev);
}

Matrix state_covariance(const Ensemble& ens) {
    const Matrix dev = kernels::centered(ens.members());
    return kernels::centered_product(dev, dev);
}

double misfit_of_response(const Vector& response, const Observation& obs) {
    if (response.size() != obs.dim()) {
        throw DimensionError("misfit: response length " + std::to_string(response.size()) +
                             " differs from observation length " + std::to_string(obs.dim()));
    }
    return 0.5 * obs.noise.whiten(Vector(obs.y - response)).squaredNorm();
}

double misfit(const Vector& u, const Observation& obs, const ForwardModel& model) {
    return misfit_of_response(model.apply(u), obs);
}

Spread spread(const Ensemble& ens, const ResponseSet& resp, const NoiseModel& noise) {
    require_same_size(ens, resp);
    const Matrix dev_u = kernels::centered(ens.members());
    const Matrix dev_g = noise.whiten(kernels::centered(resp.responses()));
    return {dev_u.colwise().norm().maxCoeff(), dev_g.colwise().norm().maxCoeff()};
}

double subspace_distance(const Ensemble& ens, const Ensemble& initial, SpanKind kind) {
    if (ens.dim() != initial.dim()) {
        throw DimensionError("subspace_distance: state dimensions differ");
    }
    Vector origin = Vector::Zero(initial.dim());
    Matrix generators = initial.members();
    if (kind == SpanKind::affine) {
        origin = ensemble_mean(initial);
        generators = kernels::centered(initial.members());
    }

    // Orthonormal basis of the generators' column space.
    Eigen::ColPivHouseholderQR<Matrix> qr(generators);
    const double scale = generators.cwiseAbs().maxCoeff();
    qr.setThreshold(1e-12);
    const Index rank = scale > 0.0 ? qr.rank() : 0;
    const Matrix basis = Matrix(qr.householderQ()).leftCols(rank);

    double worst = 0.0;
    for (Index j = 0; j < ens.size(); ++j) {
        const Vector v = ens.members().col(j) - origin;
        const Vector residual = v - basis * (basis.transpose() * v);
        const double num = residual.norm();
        const double den = ens.members().col(j).norm();
        double rel = 0.0;
        if (den > 0.0) {
            rel = num / den;
        } else if (num > 0.0) {
            rel = std::numeric_limits<double>::infinity();
        }
        worst = std::max(worst, rel);
    }
    return worst;
}

ResponseSet evaluate(const ForwardModel& model, const Ensemble& ens) {
    if (ens.dim() != model.input_dim()) {
        throw DimensionError("model '" + model.name() + "' expects state dimension " +
                             std::to_string(model.input_dim()) + ", ensemble has " +
                             std::to_string(ens.dim()));
    }
    return ResponseSet(kernels::evaluate_columns(model, ens.members()));
}

}  // namespace enki
