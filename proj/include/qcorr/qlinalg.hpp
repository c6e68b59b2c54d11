#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qcorr {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

// Validation / reconstruction tolerances used across the library.
inline constexpr double kValidationTol = 1e-10;
inline constexpr double kReconstructTol = 1e-9;
inline constexpr double kRoundTripTol = 1e-12;
inline constexpr double kDegeneracyGap = 1e-9;

struct QcorrError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Finite-dimensional quantum state with an explicit subsystem split.
// Construction validates hermiticity, unit trace and positivity; instances
// are immutable values and safe to share across threads.
class DensityMatrix {
  public:
    DensityMatrix(std::vector<int> dims, ComplexMatrix matrix);

    const std::vector<int>& dims() const { return dims_; }
    const ComplexMatrix& matrix() const { return matrix_; }
    int dimension() const { return static_cast<int>(matrix_.rows()); }
    int subsystems() const { return static_cast<int>(dims_.size()); }

    // Validation failure messages for the given candidate; empty when valid.
    static std::vector<std::string> validate(const std::vector<int>& dims,
                                             const ComplexMatrix& matrix);

  private:
    std::vector<int> dims_;
    ComplexMatrix matrix_;
};

// Kronecker products. The DensityMatrix overload concatenates the dims.
ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b);
DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);

// Marginal on the kept subsystems (indices into dims, strictly increasing
// order is imposed internally). Trace is preserved.
DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep);

// Tensor product of all single-subsystem marginals, same dims as rho.
DensityMatrix marginal_product(const DensityMatrix& rho);

// Relabel a multipartite state as bipartite: dims [prod(first split), prod(rest)].
DensityMatrix regroup_bipartite(const DensityMatrix& rho, int split);

// Permute subsystems (perm[i] = index of the old subsystem placed at slot i).
DensityMatrix permute_subsystems(const DensityMatrix& rho, const std::vector<int>& perm);

struct EigResult {
    RealVector values;      // nonincreasing
    ComplexMatrix vectors;  // orthonormal columns, aligned with values
};

// Hermitian eigendecomposition with deterministic output: eigenvalues sorted
// nonincreasing, degenerate clusters (gap < kDegeneracyGap) re-orthogonalized
// against the standard basis in index order, phases fixed so the largest
// component of each vector is real positive. Throws on non-Hermitian input.
EigResult eig_hermitian(const ComplexMatrix& m);

// Schmidt decomposition of a bipartite pure state.
struct SchmidtVector {
    RealVector coefficients;  // nonincreasing, sums to 1
    ComplexMatrix basis_a;    // orthonormal columns
    ComplexMatrix basis_b;
};

SchmidtVector schmidt_decompose(const DensityMatrix& pure_state);

// Bipartite pure state sum_i sqrt(lambda_i) |a_i>|b_i| from Schmidt data.
DensityMatrix pure_from_schmidt(const SchmidtVector& sv);

// Pauli-basis form of a two-qubit state:
//   rho = 1/4 (I + a.sigma x I + I x b.sigma + sum_ij T_ij sigma_i x sigma_j)
struct BlochForm2Q {
    Eigen::Vector3d a;
    Eigen::Vector3d b;
    Eigen::Matrix3d t;

    static BlochForm2Q from_density(const DensityMatrix& rho);
    DensityMatrix to_density() const;
};

const ComplexMatrix& pauli(int i);  // 0:I 1:X 2:Y 3:Z
ComplexMatrix identity(int d);

// Deterministic random ensembles. All draw from a std::mt19937_64 seeded as
// given; equal seeds give bit-identical output within one build.
DensityMatrix random_density(const std::vector<int>& dims, int rank, std::uint64_t seed);
DensityMatrix random_pure(const std::vector<int>& dims, std::uint64_t seed);
// Tensor product of per-subsystem Haar unitaries.
ComplexMatrix random_local_unitary(const std::vector<int>& dims, std::uint64_t seed);
// Haar unitary on U(d) via QR of a Ginibre matrix.
ComplexMatrix haar_unitary(int d, std::mt19937_64& rng);
ComplexMatrix ginibre(int rows, int cols, std::mt19937_64& rng);

// State JSON: {"dims":[...], "matrix":[[re,im],...]} row-major of length
// (prod dims)^2. The loader reports every violated invariant.
std::string state_to_json(const DensityMatrix& rho);
DensityMatrix state_from_json(const std::string& text);

}  // namespace qcorr
