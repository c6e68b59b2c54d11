#include "qcorr/measurement.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

namespace qcorr {

namespace {

int side_dimension(const std::vector<int>& dims, const std::vector<int>& side) {
    int d = 1;
    for (int s : side) d *= dims.at(s);
    return d;
}

std::vector<int> unrank(int r, const std::vector<int>& ds) {
    std::vector<int> idx(ds.size());
    for (int i = static_cast<int>(ds.size()) - 1; i >= 0; --i) {
        idx[i] = r % ds[i];
        r /= ds[i];
    }
    return idx;
}

}  // namespace

void ProjectiveMeasurement::check_valid() const {
    if (side.empty()) throw QcorrError("measurement: empty side");
    if (side.size() != bases.size())
        throw QcorrError("measurement: one basis required per measured subsystem");
    for (size_t i = 0; i < side.size(); ++i) {
        const int s = side[i];
        if (s < 0 || s >= static_cast<int>(dims.size()))
            throw QcorrError("measurement: side index out of range");
        const int d = dims[s];
        if (bases[i].rows() != d || bases[i].cols() != d)
            throw QcorrError("measurement: basis size mismatch");
        const double dev =
            (bases[i].adjoint() * bases[i] - ComplexMatrix::Identity(d, d)).cwiseAbs().maxCoeff();
        if (dev > kValidationTol) throw QcorrError("measurement: basis not orthonormal");
    }
    for (size_t i = 1; i < side.size(); ++i)
        if (side[i] <= side[i - 1]) throw QcorrError("measurement: side must be strictly increasing");
}

ComplexMatrix ProjectiveMeasurement::projector(const std::vector<int>& outcome) const {
    ComplexMatrix p(1, 1);
    p(0, 0) = 1;
    size_t k = 0;
    for (size_t sub = 0; sub < dims.size(); ++sub) {
        if (k < side.size() && side[k] == static_cast<int>(sub)) {
            ComplexVector v = bases[k].col(outcome[k]);
            p = tensor(p, (v * v.adjoint()).eval()).eval();
            ++k;
        } else {
            p = tensor(p, identity(dims[sub])).eval();
        }
    }
    return p;
}

ProjectiveMeasurement computational_measurement(const std::vector<int>& dims,
                                                const std::vector<int>& side) {
    ProjectiveMeasurement m;
    m.dims = dims;
    m.side = side;
    std::sort(m.side.begin(), m.side.end());
    for (int s : m.side) m.bases.push_back(identity(dims.at(s)));
    m.check_valid();
    return m;
}

int chart_angle_count(int subsystem_dim) {
    if (subsystem_dim == 2) return 2;
    if (subsystem_dim == 3) return 8;
    throw QcorrError("measurement chart supports subsystem dimensions 2 and 3 only");
}

Eigen::Vector3d bloch_axis(double theta, double phi) {
    return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

namespace {

ComplexMatrix qubit_basis(double theta, double phi) {
    const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
    const Complex e = std::exp(Complex(0, phi));
    ComplexMatrix u(2, 2);
    u << c, s, e * s, -e * c;
    return u;
}

ComplexMatrix givens3(int i, int j, double theta, double phi) {
    ComplexMatrix g = identity(3);
    const Complex e = std::exp(Complex(0, phi));
    g(i, i) = std::cos(theta);
    g(j, j) = std::cos(theta);
    g(i, j) = std::sin(theta) * std::conj(e);
    g(j, i) = -std::sin(theta) * e;
    return g;
}

ComplexMatrix qutrit_basis(const double* a) {
    ComplexMatrix d = identity(3);
    d(1, 1) = std::exp(Complex(0, a[6]));
    d(2, 2) = std::exp(Complex(0, a[7]));
    return d * givens3(0, 1, a[0], a[1]) * givens3(1, 2, a[2], a[3]) * givens3(0, 1, a[4], a[5]);
}

}  // namespace

ComplexMatrix basis_from_angles(int subsystem_dim, const double* angles) {
    if (subsystem_dim == 2) return qubit_basis(angles[0], angles[1]);
    if (subsystem_dim == 3) return qutrit_basis(angles);
    throw QcorrError("basis_from_angles: unsupported dimension");
}

ProjectiveMeasurement measurement_from_params(const std::vector<int>& dims,
                                              const std::vector<int>& side,
                                              const MeasurementParams& params) {
    ProjectiveMeasurement m;
    m.dims = dims;
    m.side = side;
    size_t off = 0;
    for (int s : side) {
        const int n = chart_angle_count(dims.at(s));
        if (off + n > params.angles.size())
            throw QcorrError("measurement_from_params: not enough angles");
        m.bases.push_back(basis_from_angles(dims[s], params.angles.data() + off));
        off += n;
    }
    if (off != params.angles.size())
        throw QcorrError("measurement_from_params: too many angles");
    m.check_valid();
    return m;
}

Strategy Strategy::s1(ProjectiveMeasurement m) {
    Strategy s;
    s.tag = StrategyTag::S1;
    s.fixed = std::move(m);
    return s;
}
Strategy Strategy::s2q() { return Strategy{StrategyTag::S2q, std::nullopt, DegeneracyRule::canonical}; }
Strategy Strategy::s2c() { return Strategy{StrategyTag::S2c, std::nullopt, DegeneracyRule::canonical}; }
Strategy Strategy::s3(DegeneracyRule rule) {
    return Strategy{StrategyTag::S3, std::nullopt, rule};
}

std::string strategy_name(const Strategy& s) {
    switch (s.tag) {
        case StrategyTag::S1: return "S1";
        case StrategyTag::S2q: return "S2q";
        case StrategyTag::S2c: return "S2c";
        case StrategyTag::S3:
            return s.rule == DegeneracyRule::maximizeQ ? "S3/maximizeQ" : "S3";
    }
    return "?";
}

DensityMatrix apply(const ProjectiveMeasurement& m, const DensityMatrix& rho) {
    if (m.dims != rho.dims()) throw QcorrError("apply: dimension mismatch");
    std::vector<int> side_dims;
    for (int s : m.side) side_dims.push_back(m.dims[s]);
    const int outcomes = side_dimension(m.dims, m.side);

    ComplexMatrix out = ComplexMatrix::Zero(rho.dimension(), rho.dimension());
    for (int o = 0; o < outcomes; ++o) {
        ComplexMatrix p = m.projector(unrank(o, side_dims));
        out += p * rho.matrix() * p;
    }
    out = ((out + out.adjoint()) / 2.0).eval();
    return DensityMatrix(rho.dims(), out);
}

S3Result s3_measurement(const DensityMatrix& rho, const std::vector<int>& side,
                        DegeneracyRule) {
    S3Result res;
    res.measurement.dims = rho.dims();
    res.measurement.side = side;
    std::sort(res.measurement.side.begin(), res.measurement.side.end());
    for (int s : res.measurement.side) {
        DensityMatrix marg = partial_trace(rho, {s});
        EigResult es = eig_hermitian(marg.matrix());
        for (int i = 0; i + 1 < es.values.size(); ++i)
            if (es.values(i) - es.values(i + 1) < kDegeneracyGap) res.degenerate = true;
        res.measurement.bases.push_back(es.vectors);
    }
    res.measurement.check_valid();
    return res;
}

void LocalChannel::check_valid() const {
    if (kraus.size() != dims.size())
        throw QcorrError("channel: one Kraus list per subsystem required");
    for (size_t i = 0; i < kraus.size(); ++i) {
        if (kraus[i].empty()) throw QcorrError("channel: empty Kraus list");
        ComplexMatrix sum = ComplexMatrix::Zero(dims[i], dims[i]);
        for (const auto& k : kraus[i]) {
            if (k.rows() != dims[i] || k.cols() != dims[i])
                throw QcorrError("channel: Kraus size mismatch");
            sum += k.adjoint() * k;
        }
        if ((sum - identity(dims[i])).cwiseAbs().maxCoeff() > kValidationTol)
            throw QcorrError("channel: completeness violation (sum K'K != I)");
    }
}

LocalChannel identity_channel(const std::vector<int>& dims) {
    LocalChannel ch;
    ch.dims = dims;
    for (int d : dims) ch.kraus.push_back({identity(d)});
    return ch;
}

DensityMatrix apply_channel(const LocalChannel& ch, const DensityMatrix& rho) {
    ch.check_valid();
    if (ch.dims != rho.dims()) throw QcorrError("apply_channel: dimension mismatch");
    std::vector<int> counts;
    for (const auto& list : ch.kraus) counts.push_back(static_cast<int>(list.size()));
    int total = 1;
    for (int c : counts) total *= c;

    ComplexMatrix out = ComplexMatrix::Zero(rho.dimension(), rho.dimension());
    for (int t = 0; t < total; ++t) {
        auto idx = unrank(t, counts);
        ComplexMatrix k(1, 1);
        k(0, 0) = 1;
        for (size_t i = 0; i < ch.kraus.size(); ++i) k = tensor(k, ch.kraus[i][idx[i]]).eval();
        out += k * rho.matrix() * k.adjoint();
    }
    out = ((out + out.adjoint()) / 2.0).eval();
    return DensityMatrix(rho.dims(), out);
}

LocalChannel random_local_channel(const std::vector<int>& dims, int kraus_rank,
                                  std::uint64_t seed) {
    if (kraus_rank < 1) throw QcorrError("random_local_channel: kraus_rank < 1");
    std::mt19937_64 rng(seed);
    LocalChannel ch;
    ch.dims = dims;
    for (int d : dims) {
        // Isometry V: C^d -> C^d (x) C^r from the first d columns of a Haar
        // unitary; K_a = (I (x) <a|) V.
        ComplexMatrix u = haar_unitary(d * kraus_rank, rng);
        std::vector<ComplexMatrix> list;
        for (int a = 0; a < kraus_rank; ++a) {
            ComplexMatrix k(d, d);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) k(i, j) = u(i * kraus_rank + a, j);
            list.push_back(k);
        }
        ch.kraus.push_back(std::move(list));
    }
    ch.check_valid();
    return ch;
}

LocalChannel measurement_channel(const ProjectiveMeasurement& m) {
    LocalChannel ch;
    ch.dims = m.dims;
    size_t k = 0;
    for (size_t sub = 0; sub < m.dims.size(); ++sub) {
        if (k < m.side.size() && m.side[k] == static_cast<int>(sub)) {
            std::vector<ComplexMatrix> list;
            for (int a = 0; a < m.dims[sub]; ++a) {
                ComplexVector v = m.bases[k].col(a);
                list.push_back(v * v.adjoint());
            }
            ch.kraus.push_back(std::move(list));
            ++k;
        } else {
            ch.kraus.push_back({identity(m.dims[sub])});
        }
    }
    return ch;
}

namespace {

// Choi matrix of the measurement channel restricted to the measured side,
// with the normalized maximally entangled reference state.
ComplexMatrix side_choi(const ProjectiveMeasurement& m) {
    std::vector<int> side_dims;
    for (int s : m.side) side_dims.push_back(m.dims[s]);
    const int d = side_dimension(m.dims, m.side);

    ComplexVector omega = ComplexVector::Zero(d * d);
    for (int i = 0; i < d; ++i) omega(i * d + i) = 1.0 / std::sqrt(double(d));
    ComplexMatrix ref = omega * omega.adjoint();

    ComplexMatrix choi = ComplexMatrix::Zero(d * d, d * d);
    for (int o = 0; o < d; ++o) {
        auto idx = unrank(o, side_dims);
        ComplexMatrix p(1, 1);
        p(0, 0) = 1;
        for (size_t i = 0; i < side_dims.size(); ++i) {
            ComplexVector v = m.bases[i].col(idx[i]);
            p = tensor(p, (v * v.adjoint()).eval()).eval();
        }
        ComplexMatrix pfull = tensor(p, identity(d));
        choi += pfull * ref * pfull;
    }
    return choi;
}

}  // namespace

double choi_distance_squared(const ProjectiveMeasurement& m1, const ProjectiveMeasurement& m2) {
    ComplexMatrix diff = side_choi(m1) - side_choi(m2);
    return diff.squaredNorm();
}

double channel_distance(const ProjectiveMeasurement& m1, const ProjectiveMeasurement& m2) {
    if (m1.side != m2.side || m1.dims != m2.dims)
        throw QcorrError("channel_distance: side mismatch");
    const int d = side_dimension(m1.dims, m1.side);
    const double max_sq = 2.0 * (d - 1) / double(d * d);
    return choi_distance_squared(m1, m2) / max_sq;
}

std::string measurement_to_json(const ProjectiveMeasurement& m) {
    nlohmann::json j;
    nlohmann::json side = nlohmann::json::array();
    for (int s : m.side) side.push_back(std::string(1, char('A' + s)));
    j["side"] = side;
    nlohmann::json bases = nlohmann::json::array();
    for (const auto& b : m.bases) {
        nlohmann::json flat = nlohmann::json::array();
        for (int r = 0; r < b.rows(); ++r)
            for (int c = 0; c < b.cols(); ++c) flat.push_back({b(r, c).real(), b(r, c).imag()});
        bases.push_back(flat);
    }
    j["bases"] = bases;
    return j.dump();
}

ProjectiveMeasurement measurement_from_json(const std::string& text,
                                            const std::vector<int>& dims) {
    nlohmann::json j = nlohmann::json::parse(text);
    ProjectiveMeasurement m;
    m.dims = dims;
    for (const auto& s : j.at("side")) {
        const std::string name = s.get<std::string>();
        if (name.size() != 1 || name[0] < 'A')
            throw QcorrError("measurement JSON: bad side label");
        m.side.push_back(name[0] - 'A');
    }
    std::sort(m.side.begin(), m.side.end());
    for (size_t i = 0; i < m.side.size(); ++i) {
        const int d = dims.at(m.side[i]);
        const auto& flat = j.at("bases").at(i);
        if (static_cast<int>(flat.size()) != d * d)
            throw QcorrError("measurement JSON: basis length mismatch");
        ComplexMatrix b(d, d);
        int k = 0;
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c) {
                b(r, c) = Complex(flat[k][0].get<double>(), flat[k][1].get<double>());
                ++k;
            }
        m.bases.push_back(b);
    }
    m.check_valid();
    return m;
}

}  // namespace qcorr
