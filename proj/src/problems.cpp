#include "sparsemoo/problems.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "sparsemoo/rng.hpp"

namespace sparsemoo {

QuadraticProblem::QuadraticProblem(std::vector<Matrix> Q, std::vector<Vector> c, Vector constants, Vector lipschitz)
    : Q_(std::move(Q)), c_(std::move(c)), r_(std::move(constants)), lipschitz_(std::move(lipschitz)) {
    if (Q_.empty() || Q_.size() != c_.size()) {
        throw UsageError("QuadraticProblem: need one linear term per Hessian");
    }
    const Eigen::Index n = c_.front().size();
    for (std::size_t j = 0; j < Q_.size(); ++j) {
        if (Q_[j].rows() != n || Q_[j].cols() != n || c_[j].size() != n) {
            throw UsageError("QuadraticProblem: inconsistent dimensions");
        }
    }
    const auto m = static_cast<Eigen::Index>(Q_.size());
    if (r_.size() == 0) {
        r_ = Vector::Zero(m);
    }
    if (r_.size() != m) {
        throw UsageError("QuadraticProblem: one constant per objective required");
    }
    if (lipschitz_.size() == 0) {
        lipschitz_.resize(m);
        for (Eigen::Index j = 0; j < m; ++j) {
            const Eigen::SelfAdjointEigenSolver<Matrix> eig(Q_[static_cast<std::size_t>(j)], Eigen::EigenvaluesOnly);
            lipschitz_(j) = eig.eigenvalues().cwiseAbs().maxCoeff();
        }
    }
    if (lipschitz_.size() != m || (lipschitz_.array() <= 0.0).any()) {
        throw UsageError("QuadraticProblem: Lipschitz constants must be positive");
    }
}

Vector QuadraticProblem::evaluate(const Eigen::Ref<const Vector>& x) const {
    Vector out(num_objectives());
    for (std::size_t j = 0; j < Q_.size(); ++j) {
        out(static_cast<Eigen::Index>(j)) = 0.5 * x.dot(Q_[j] * x) - c_[j].dot(x) + r_(static_cast<Eigen::Index>(j));
    }
    return out;
}

Matrix QuadraticProblem::gradients(const Eigen::Ref<const Vector>& x) const {
    Matrix out(x.size(), num_objectives());
    for (std::size_t j = 0; j < Q_.size(); ++j) {
        out.col(static_cast<Eigen::Index>(j)) = Q_[j] * x - c_[j];
    }
    return out;
}

QuadraticProblem QuadraticInstance::problem() const {
    return QuadraticProblem({Q1, Q2}, {c1, c2}, constants, Vector::Constant(2, kappa));
}

namespace {

Matrix random_orthogonal(int n, Rng& rng) {
    Matrix gaussian(n, n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            gaussian(i, j) = rng.normal();
        }
    }
    const Eigen::HouseholderQR<Matrix> qr(gaussian);
    Matrix Q = qr.householderQ() * Matrix::Identity(n, n);
    const Matrix R = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < n; ++j) {
        if (R(j, j) < 0.0) {
            Q.col(j) = -Q.col(j);
        }
    }
    return Q;
}

Matrix conditioned_psd(int n, double kappa, Rng rng) {
    if (kappa == 1.0) {
        return Matrix::Identity(n, n);
    }
    Vector eigenvalues(n);
    for (int i = 0; i < n; ++i) {
        eigenvalues(i) = std::pow(kappa, static_cast<double>(i) / static_cast<double>(n - 1));
    }
    eigenvalues(0) = 1.0;
    eigenvalues(n - 1) = kappa;
    const Matrix R = random_orthogonal(n, rng);
    Matrix Q = R * eigenvalues.asDiagonal() * R.transpose();
    const Matrix upper = Q.triangularView<Eigen::Upper>();
    Q = upper;
    Q.triangularView<Eigen::StrictlyLower>() = upper.transpose();
    return Q;
}

Vector uniform_signed(int n, Rng rng) {
    Vector c(n);
    for (int i = 0; i < n; ++i) {
        c(i) = 2.0 * rng.uniform() - 1.0;
    }
    return c;
}

}  // namespace

QuadraticInstance generate_quadratic(int n, double kappa, std::uint64_t seed, int s) {
    if (n < 2) {
        throw UsageError("generate_quadratic: n must be at least 2");
    }
    if (!(kappa >= 1.0) || !std::isfinite(kappa)) {
        throw UsageError("generate_quadratic: kappa must be >= 1");
    }
    if (s != 0) {
        SparseBudget check(s, n);
        (void)check;
    }
    const Rng root(seed);
    QuadraticInstance inst;
    inst.n = n;
    inst.kappa = kappa;
    inst.seed = seed;
    inst.s = s;
    inst.Q1 = conditioned_psd(n, kappa, root.split(1));
    inst.Q2 = conditioned_psd(n, kappa, root.split(2));
    inst.c1 = uniform_signed(n, root.split(3));
    inst.c2 = uniform_signed(n, root.split(4));
    inst.constants = Vector::Zero(2);
    return inst;
}

QuadraticInstance example_problem() {
    QuadraticInstance inst;
    inst.n = 2;
    inst.kappa = 1.0;
    inst.seed = 0;
    inst.s = 1;
    inst.Q1 = Matrix::Identity(2, 2);
    inst.Q2 = Matrix::Identity(2, 2);
    inst.c1 = Vector(2);
    inst.c1 << 3.0, 2.5;
    inst.c2 = Vector(2);
    inst.c2 << 1.0, 0.5;
    inst.constants = Vector(2);
    inst.constants << 0.5 * (9.0 + 6.25), 0.5 * (1.0 + 0.25);
    return inst;
}

double spectral_norm_psd(const Eigen::Ref<const Matrix>& A, double rel_tol, int max_iter) {
    if (A.rows() != A.cols()) {
        throw UsageError("spectral_norm_psd: matrix must be square");
    }
    if (A.size() == 0 || A.cwiseAbs().maxCoeff() == 0.0) {
        return 0.0;
    }
    Rng rng(0x5eed);
    Vector v(A.rows());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        v(i) = 1.0 + rng.uniform();
    }
    v.normalize();
    double estimate = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        Vector w = A * v;
        const double norm = w.norm();
        if (norm == 0.0) {
            return 0.0;
        }
        const double next = v.dot(w);
        v = w / norm;
        if (it > 0 && std::abs(next - estimate) <= rel_tol * std::abs(next)) {
            return next;
        }
        estimate = next;
    }
    return estimate;
}

LogisticProblem::LogisticProblem(Matrix samples, Vector labels) : R_(std::move(samples)), t_(std::move(labels)) {
    if (R_.rows() == 0 || R_.rows() != t_.size()) {
        throw UsageError("LogisticProblem: samples and labels must have matching nonzero length");
    }
    for (Eigen::Index i = 0; i < t_.size(); ++i) {
        if (t_(i) != 1.0 && t_(i) != -1.0) {
            throw DataError("LogisticProblem: label at row " + std::to_string(i + 1) + " is not -1 or +1");
        }
    }
    const double N = static_cast<double>(R_.rows());
    const Matrix gram = R_.transpose() * R_;
    lipschitz_.resize(2);
    lipschitz_(0) = std::max(spectral_norm_psd(gram) / N, 1e-12);
    lipschitz_(1) = 1.0;
}

namespace {

// log(1 + exp(u)) without overflow.
double softplus(double u) { return std::max(u, 0.0) + std::log1p(std::exp(-std::abs(u))); }

// 1 / (1 + exp(-u)) without overflow.
double logistic(double u) {
    if (u >= 0.0) {
        return 1.0 / (1.0 + std::exp(-u));
    }
    const double e = std::exp(u);
    return e / (1.0 + e);
}

}  // namespace

Vector LogisticProblem::evaluate(const Eigen::Ref<const Vector>& w) const {
    const Vector margins = (R_ * w).cwiseProduct(t_);
    double loss = 0.0;
    for (Eigen::Index i = 0; i < margins.size(); ++i) {
        loss += softplus(-margins(i));
    }
    Vector out(2);
    out << loss / static_cast<double>(R_.rows()), 0.5 * w.squaredNorm();
    return out;
}

Matrix LogisticProblem::gradients(const Eigen::Ref<const Vector>& w) const {
    const Vector margins = (R_ * w).cwiseProduct(t_);
    Vector weights(margins.size());
    for (Eigen::Index i = 0; i < margins.size(); ++i) {
        weights(i) = -t_(i) * logistic(-margins(i));
    }
    Matrix out(w.size(), 2);
    out.col(0) = R_.transpose() * weights / static_cast<double>(R_.rows());
    out.col(1) = w;
    return out;
}

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) {
        return "";
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        out.push_back(trim(cell));
    }
    if (!line.empty() && line.back() == ',') {
        out.emplace_back();
    }
    return out;
}

bool is_missing(const std::string& cell) { return cell.empty() || cell == "?" || cell == "NA"; }

}  // namespace

Dataset load_dataset(const std::string& path, const std::string& label_column) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open dataset '" + path + "'");
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw DataError(path + ": missing header row");
    }
    const std::vector<std::string> header = split_csv_line(line);
    const auto label_it = std::find(header.begin(), header.end(), label_column);
    if (label_it == header.end()) {
        throw DataError(path + ": label column '" + label_column + "' not found");
    }
    const auto label_index = static_cast<std::size_t>(label_it - header.begin());

    Dataset data;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (c != label_index) {
            data.feature_names.push_back(header[c]);
        }
    }
    std::vector<std::vector<double>> rows;
    std::vector<double> labels;
    std::size_t row_number = 1;
    while (std::getline(in, line)) {
        ++row_number;
        if (trim(line).empty()) {
            continue;
        }
        const std::vector<std::string> cells = split_csv_line(line);
        if (cells.size() != header.size()) {
            throw DataError(path + ": row " + std::to_string(row_number) + " has " + std::to_string(cells.size()) +
                            " cells, expected " + std::to_string(header.size()));
        }
        if (std::any_of(cells.begin(), cells.end(), is_missing)) {
            ++data.dropped_rows;
            continue;
        }
        std::vector<double> values;
        values.reserve(cells.size());
        for (std::size_t c = 0; c < cells.size(); ++c) {
            double v = 0.0;
            const char* begin = cells[c].data();
            const char* end = begin + cells[c].size();
            const auto [ptr, ec] = std::from_chars(begin, end, v);
            if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
                throw DataError(path + ": non-numeric cell '" + cells[c] + "' at row " + std::to_string(row_number) +
                                ", column " + std::to_string(c + 1) + " ('" + header[c] + "')");
            }
            values.push_back(v);
        }
        labels.push_back(values[label_index]);
        values.erase(values.begin() + static_cast<std::ptrdiff_t>(label_index));
        rows.push_back(std::move(values));
    }
    if (rows.empty()) {
        throw DataError(path + ": no complete rows");
    }

    const bool zero_one = std::all_of(labels.begin(), labels.end(), [](double v) { return v == 0.0 || v == 1.0; });
    const bool signed_one = std::all_of(labels.begin(), labels.end(), [](double v) { return v == -1.0 || v == 1.0; });
    if (!zero_one && !signed_one) {
        throw DataError(path + ": labels must be in {0,1} or {-1,1}");
    }

    const auto N = static_cast<Eigen::Index>(rows.size());
    const auto n = static_cast<Eigen::Index>(data.feature_names.size());
    data.samples.resize(N, n);
    data.labels.resize(N);
    for (Eigen::Index i = 0; i < N; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            data.samples(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        }
        data.labels(i) = labels[static_cast<std::size_t>(i)] == 0.0 ? -1.0 : labels[static_cast<std::size_t>(i)];
    }
    for (Eigen::Index j = 0; j < n; ++j) {
        const double mean = data.samples.col(j).mean();
        data.samples.col(j).array() -= mean;
        const double sd = std::sqrt(data.samples.col(j).squaredNorm() / static_cast<double>(N));
        if (sd == 0.0) {
            data.samples.col(j).setZero();
            data.warnings.push_back("column '" + data.feature_names[static_cast<std::size_t>(j)] +
                                    "' is constant; standardized to zeros");
        } else {
            data.samples.col(j) /= sd;
        }
    }
    return data;
}

}  // namespace sparsemoo
