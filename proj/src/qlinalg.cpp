#include "qcorr/qlinalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <unsupported/Eigen/KroneckerProduct>
#include <nlohmann/json.hpp>

namespace qcorr {

namespace {

int product(const std::vector<int>& dims) {
    return std::accumulate(dims.begin(), dims.end(), 1, std::multiplies<int>());
}

bool is_finite(const ComplexMatrix& m) {
    return m.allFinite();
}

}  // namespace

DensityMatrix::DensityMatrix(std::vector<int> dims, ComplexMatrix matrix)
    : dims_(std::move(dims)), matrix_(std::move(matrix)) {
    auto failures = validate(dims_, matrix_);
    if (!failures.empty()) {
        std::string msg = "invalid density matrix:";
        for (const auto& f : failures) msg += " [" + f + "]";
        throw QcorrError(msg);
    }
}

std::vector<std::string> DensityMatrix::validate(const std::vector<int>& dims,
                                                 const ComplexMatrix& matrix) {
    std::vector<std::string> failures;
    if (dims.empty()) failures.push_back("dims empty");
    for (int d : dims)
        if (d < 2) failures.push_back("subsystem dimension < 2");
    if (!failures.empty()) return failures;

    const int d = product(dims);
    if (matrix.rows() != d || matrix.cols() != d) {
        failures.push_back("matrix size does not match product of dims");
        return failures;
    }
    if (!is_finite(matrix)) {
        failures.push_back("non-finite entries");
        return failures;
    }
    const double herm_dev = (matrix - matrix.adjoint()).cwiseAbs().maxCoeff();
    if (herm_dev > kValidationTol)
        failures.push_back("not Hermitian (max deviation " + std::to_string(herm_dev) + ")");
    const double trace_dev = std::abs(matrix.trace() - Complex(1.0, 0.0));
    if (trace_dev > kValidationTol)
        failures.push_back("trace != 1 (deviation " + std::to_string(trace_dev) + ")");
    if (failures.empty()) {
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(matrix, Eigen::EigenvaluesOnly);
        const double min_eig = es.eigenvalues().minCoeff();
        if (min_eig < -kValidationTol)
            failures.push_back("not positive semidefinite (min eigenvalue " +
                               std::to_string(min_eig) + ")");
    }
    return failures;
}

ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
    return Eigen::kroneckerProduct(a, b);
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
    std::vector<int> dims = a.dims();
    dims.insert(dims.end(), b.dims().begin(), b.dims().end());
    return DensityMatrix(dims, tensor(a.matrix(), b.matrix()));
}

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep_in) {
    const auto& dims = rho.dims();
    const int n = rho.subsystems();
    std::vector<int> keep = keep_in;
    std::sort(keep.begin(), keep.end());
    if (keep.empty()) throw QcorrError("partial_trace: keep set empty");
    for (size_t i = 0; i < keep.size(); ++i) {
        if (keep[i] < 0 || keep[i] >= n) throw QcorrError("partial_trace: invalid subsystem index");
        if (i > 0 && keep[i] == keep[i - 1]) throw QcorrError("partial_trace: duplicate index");
    }

    std::vector<int> drop;
    for (int i = 0; i < n; ++i)
        if (!std::binary_search(keep.begin(), keep.end(), i)) drop.push_back(i);

    std::vector<int> kept_dims;
    for (int i : keep) kept_dims.push_back(dims[i]);
    const int dk = product(kept_dims);
    int dd = 1;
    for (int i : drop) dd *= dims[i];

    // Strides of each subsystem index in the row-major composite index.
    std::vector<int> stride(n, 1);
    for (int i = n - 2; i >= 0; --i) stride[i] = stride[i + 1] * dims[i + 1];

    auto composite = [&](const std::vector<int>& keep_idx, const std::vector<int>& drop_idx) {
        int x = 0;
        for (size_t i = 0; i < keep.size(); ++i) x += keep_idx[i] * stride[keep[i]];
        for (size_t i = 0; i < drop.size(); ++i) x += drop_idx[i] * stride[drop[i]];
        return x;
    };

    auto unrank = [](int r, const std::vector<int>& ds) {
        std::vector<int> idx(ds.size());
        for (int i = static_cast<int>(ds.size()) - 1; i >= 0; --i) {
            idx[i] = r % ds[i];
            r /= ds[i];
        }
        return idx;
    };

    std::vector<int> drop_dims;
    for (int i : drop) drop_dims.push_back(dims[i]);

    ComplexMatrix out = ComplexMatrix::Zero(dk, dk);
    for (int r = 0; r < dk; ++r) {
        auto ri = unrank(r, kept_dims);
        for (int c = 0; c < dk; ++c) {
            auto ci = unrank(c, kept_dims);
            Complex sum = 0;
            for (int t = 0; t < dd; ++t) {
                auto ti = unrank(t, drop_dims);
                sum += rho.matrix()(composite(ri, ti), composite(ci, ti));
            }
            out(r, c) = sum;
        }
    }
    return DensityMatrix(kept_dims, out);
}

DensityMatrix marginal_product(const DensityMatrix& rho) {
    ComplexMatrix acc = partial_trace(rho, {0}).matrix();
    for (int i = 1; i < rho.subsystems(); ++i)
        acc = tensor(acc, partial_trace(rho, {i}).matrix()).eval();
    return DensityMatrix(rho.dims(), acc);
}

DensityMatrix regroup_bipartite(const DensityMatrix& rho, int split) {
    if (split <= 0 || split >= rho.subsystems())
        throw QcorrError("regroup_bipartite: split out of range");
    int da = 1, db = 1;
    for (int i = 0; i < split; ++i) da *= rho.dims()[i];
    for (int i = split; i < rho.subsystems(); ++i) db *= rho.dims()[i];
    return DensityMatrix({da, db}, rho.matrix());
}

DensityMatrix permute_subsystems(const DensityMatrix& rho, const std::vector<int>& perm) {
    const auto& dims = rho.dims();
    const int n = rho.subsystems();
    if (static_cast<int>(perm.size()) != n)
        throw QcorrError("permute_subsystems: permutation size mismatch");

    std::vector<int> stride(n, 1);
    for (int i = n - 2; i >= 0; --i) stride[i] = stride[i + 1] * dims[i + 1];

    std::vector<int> new_dims(n);
    for (int i = 0; i < n; ++i) new_dims[i] = dims[perm[i]];
    std::vector<int> new_stride(n, 1);
    for (int i = n - 2; i >= 0; --i) new_stride[i] = new_stride[i + 1] * new_dims[i + 1];

    const int d = rho.dimension();
    // old composite index -> new composite index
    std::vector<int> map(d);
    for (int x = 0; x < d; ++x) {
        int y = 0;
        for (int slot = 0; slot < n; ++slot) {
            const int sub = perm[slot];
            const int idx = (x / stride[sub]) % dims[sub];
            y += idx * new_stride[slot];
        }
        map[x] = y;
    }
    ComplexMatrix out(d, d);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) out(map[r], map[c]) = rho.matrix()(r, c);
    return DensityMatrix(new_dims, out);
}

EigResult eig_hermitian(const ComplexMatrix& m) {
    if (m.rows() != m.cols()) throw QcorrError("eig_hermitian: non-square input");
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > kValidationTol)
        throw QcorrError("eig_hermitian: input not Hermitian");

    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es((m + m.adjoint()) / 2.0);
    const int d = static_cast<int>(m.rows());

    EigResult res;
    res.values = RealVector(d);
    res.vectors = ComplexMatrix(d, d);
    // Eigen sorts increasing; flip to nonincreasing.
    for (int i = 0; i < d; ++i) {
        res.values(i) = es.eigenvalues()(d - 1 - i);
        res.vectors.col(i) = es.eigenvectors().col(d - 1 - i);
    }

    // Deterministic basis inside each degenerate cluster: project standard
    // basis vectors onto the cluster subspace and Gram-Schmidt in index order.
    int start = 0;
    while (start < d) {
        int end = start + 1;
        while (end < d && res.values(start) - res.values(end) < kDegeneracyGap) ++end;
        if (end - start > 1) {
            const int k = end - start;
            ComplexMatrix block = res.vectors.middleCols(start, k);
            ComplexMatrix proj = block * block.adjoint();
            ComplexMatrix fixed(d, k);
            int got = 0;
            for (int e = 0; e < d && got < k; ++e) {
                ComplexVector v = proj.col(e);
                for (int j = 0; j < got; ++j) v -= fixed.col(j).dot(v) * fixed.col(j);
                const double nrm = v.norm();
                if (nrm > 1e-6) fixed.col(got++) = v / nrm;
            }
            if (got == k) res.vectors.middleCols(start, k) = fixed;
        }
        start = end;
    }

    // Phase convention: largest-magnitude component real positive.
    for (int i = 0; i < d; ++i) {
        int arg = 0;
        res.vectors.col(i).cwiseAbs().maxCoeff(&arg);
        const Complex z = res.vectors(arg, i);
        if (std::abs(z) > 0) res.vectors.col(i) *= std::conj(z) / std::abs(z);
    }
    return res;
}

SchmidtVector schmidt_decompose(const DensityMatrix& rho) {
    if (rho.subsystems() != 2) throw QcorrError("schmidt_decompose: state not bipartite");
    const double purity = rho.matrix().squaredNorm();
    if (std::abs(purity - 1.0) > 1e-8)
        throw QcorrError("schmidt_decompose: state not pure");

    // Leading eigenvector of rho is the state vector.
    EigResult es = eig_hermitian(rho.matrix());
    ComplexVector psi = es.vectors.col(0);

    const int da = rho.dims()[0], db = rho.dims()[1];
    ComplexMatrix amp(da, db);
    for (int i = 0; i < da; ++i)
        for (int j = 0; j < db; ++j) amp(i, j) = psi(i * db + j);

    Eigen::JacobiSVD<ComplexMatrix> svd(amp, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const int k = std::min(da, db);
    SchmidtVector sv;
    sv.coefficients = RealVector(k);
    for (int i = 0; i < k; ++i) {
        const double s = svd.singularValues()(i);
        sv.coefficients(i) = s * s;
    }
    sv.basis_a = svd.matrixU();
    sv.basis_b = svd.matrixV().conjugate();
    return sv;
}

DensityMatrix pure_from_schmidt(const SchmidtVector& sv) {
    const int da = static_cast<int>(sv.basis_a.rows());
    const int db = static_cast<int>(sv.basis_b.rows());
    ComplexVector psi = ComplexVector::Zero(da * db);
    for (int i = 0; i < sv.coefficients.size(); ++i) {
        const double c = std::sqrt(std::max(0.0, sv.coefficients(i)));
        for (int a = 0; a < da; ++a)
            for (int b = 0; b < db; ++b)
                psi(a * db + b) += c * sv.basis_a(a, i) * sv.basis_b(b, i);
    }
    psi /= psi.norm();
    return DensityMatrix({da, db}, psi * psi.adjoint());
}

const ComplexMatrix& pauli(int i) {
    static const std::vector<ComplexMatrix> sigma = [] {
        std::vector<ComplexMatrix> s(4, ComplexMatrix(2, 2));
        s[0] << 1, 0, 0, 1;
        s[1] << 0, 1, 1, 0;
        s[2] << 0, Complex(0, -1), Complex(0, 1), 0;
        s[3] << 1, 0, 0, -1;
        return s;
    }();
    return sigma.at(i);
}

ComplexMatrix identity(int d) { return ComplexMatrix::Identity(d, d); }

BlochForm2Q BlochForm2Q::from_density(const DensityMatrix& rho) {
    if (rho.dims() != std::vector<int>{2, 2})
        throw QcorrError("BlochForm2Q: state is not two qubits");
    BlochForm2Q f;
    for (int i = 1; i <= 3; ++i) {
        f.a(i - 1) = (rho.matrix() * tensor(pauli(i), pauli(0))).trace().real();
        f.b(i - 1) = (rho.matrix() * tensor(pauli(0), pauli(i))).trace().real();
        for (int j = 1; j <= 3; ++j)
            f.t(i - 1, j - 1) = (rho.matrix() * tensor(pauli(i), pauli(j))).trace().real();
    }
    return f;
}

DensityMatrix BlochForm2Q::to_density() const {
    ComplexMatrix m = tensor(pauli(0), pauli(0));
    for (int i = 1; i <= 3; ++i) {
        m += a(i - 1) * tensor(pauli(i), pauli(0));
        m += b(i - 1) * tensor(pauli(0), pauli(i));
        for (int j = 1; j <= 3; ++j) m += t(i - 1, j - 1) * tensor(pauli(i), pauli(j));
    }
    return DensityMatrix({2, 2}, m / 4.0);
}

ComplexMatrix ginibre(int rows, int cols, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    ComplexMatrix g(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) {
            const double re = normal(rng);
            const double im = normal(rng);
            g(i, j) = Complex(re, im);
        }
    return g;
}

ComplexMatrix haar_unitary(int d, std::mt19937_64& rng) {
    ComplexMatrix g = ginibre(d, d, rng);
    Eigen::HouseholderQR<ComplexMatrix> qr(g);
    ComplexMatrix q = qr.householderQ();
    ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    // Fix the phase ambiguity so the distribution is Haar.
    for (int i = 0; i < d; ++i) {
        Complex z = r(i, i);
        q.col(i) *= (std::abs(z) > 0) ? z / std::abs(z) : Complex(1, 0);
    }
    return q;
}

DensityMatrix random_density(const std::vector<int>& dims, int rank, std::uint64_t seed) {
    const int d = product(dims);
    if (rank < 1 || rank > d) throw QcorrError("random_density: rank out of range");
    std::mt19937_64 rng(seed);
    ComplexMatrix g = ginibre(d, rank, rng);
    ComplexMatrix m = g * g.adjoint();
    m /= m.trace().real();
    m = ((m + m.adjoint()) / 2.0).eval();
    return DensityMatrix(dims, m);
}

DensityMatrix random_pure(const std::vector<int>& dims, std::uint64_t seed) {
    const int d = product(dims);
    std::mt19937_64 rng(seed);
    ComplexVector psi = ginibre(d, 1, rng).col(0);
    psi /= psi.norm();
    return DensityMatrix(dims, psi * psi.adjoint());
}

ComplexMatrix random_local_unitary(const std::vector<int>& dims, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    ComplexMatrix u = haar_unitary(dims[0], rng);
    for (size_t i = 1; i < dims.size(); ++i) u = tensor(u, haar_unitary(dims[i], rng)).eval();
    return u;
}

std::string state_to_json(const DensityMatrix& rho) {
    nlohmann::json j;
    j["dims"] = rho.dims();
    nlohmann::json entries = nlohmann::json::array();
    const auto& m = rho.matrix();
    for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.cols(); ++c)
            entries.push_back({m(r, c).real(), m(r, c).imag()});
    j["matrix"] = entries;
    return j.dump();
}

DensityMatrix state_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    if (!j.contains("dims") || !j.contains("matrix"))
        throw QcorrError("state JSON: missing 'dims' or 'matrix'");
    std::vector<int> dims = j["dims"].get<std::vector<int>>();
    const int d = product(dims);
    const auto& entries = j["matrix"];
    if (static_cast<int>(entries.size()) != d * d)
        throw QcorrError("state JSON: matrix length != (prod dims)^2");
    ComplexMatrix m(d, d);
    int k = 0;
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) {
            m(r, c) = Complex(entries[k][0].get<double>(), entries[k][1].get<double>());
            ++k;
        }
    auto failures = DensityMatrix::validate(dims, m);
    if (!failures.empty()) {
        std::string msg = "state JSON failed validation:";
        for (const auto& f : failures) msg += " [" + f + "]";
        throw QcorrError(msg);
    }
    return DensityMatrix(dims, m);
}

}  // namespace qcorr
