#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qcorr/qlinalg.hpp"

namespace qcorr {

// Rank-1 orthogonal local projective measurement. `side` lists the measured
// subsystems; `bases` holds one unitary per measured subsystem whose columns
// are the measurement basis. The induced channel dephases in those bases and
// is trace preserving and idempotent by construction.
struct ProjectiveMeasurement {
    std::vector<int> side;
    std::vector<ComplexMatrix> bases;
    std::vector<int> dims;  // dims of the full system it acts on

    void check_valid() const;
    // Full-system projector for one outcome tuple (identity off-side).
    ComplexMatrix projector(const std::vector<int>& outcome) const;
};

// Computational-basis measurement on the given side.
ProjectiveMeasurement computational_measurement(const std::vector<int>& dims,
                                                const std::vector<int>& side);

// Search coordinates for measured subsystems. A qubit uses (theta, phi) on
// the Bloch half-sphere; a qutrit uses 8 Euler-like angles (two row phases
// plus three phased Givens rotations).
struct MeasurementParams {
    std::vector<double> angles;
};

int chart_angle_count(int subsystem_dim);
ComplexMatrix basis_from_angles(int subsystem_dim, const double* angles);
ProjectiveMeasurement measurement_from_params(const std::vector<int>& dims,
                                              const std::vector<int>& side,
                                              const MeasurementParams& params);
// Bloch axis for a qubit chart point.
Eigen::Vector3d bloch_axis(double theta, double phi);

enum class StrategyTag { S1, S2q, S2c, S3 };
enum class DegeneracyRule { canonical, maximizeQ };

struct Strategy {
    StrategyTag tag = StrategyTag::S2q;
    std::optional<ProjectiveMeasurement> fixed;        // S1 only
    DegeneracyRule rule = DegeneracyRule::canonical;   // S3 only

    static Strategy s1(ProjectiveMeasurement m);
    static Strategy s2q();
    static Strategy s2c();
    static Strategy s3(DegeneracyRule rule = DegeneracyRule::canonical);
};

std::string strategy_name(const Strategy& s);

// sum_a P_a rho P_a with P_a the basis projectors on the measured side.
DensityMatrix apply(const ProjectiveMeasurement& m, const DensityMatrix& rho);

struct S3Result {
    ProjectiveMeasurement measurement;  // eigenbases of the measured marginals
    bool degenerate = false;            // some measured marginal has gap < 1e-9
};

// Measurement in the eigenbases of each measured marginal; preserves the
// marginal product. Under DegeneracyRule::canonical the deterministic
// eigenbasis is used; maximizeQ only flags the freedom for the optimizer.
S3Result s3_measurement(const DensityMatrix& rho, const std::vector<int>& side,
                        DegeneracyRule rule = DegeneracyRule::canonical);

// Local CPTP channel: one Kraus list per subsystem, applied as the tensor
// product of the per-subsystem maps.
struct LocalChannel {
    std::vector<std::vector<ComplexMatrix>> kraus;  // kraus[i] acts on subsystem i
    std::vector<int> dims;

    void check_valid() const;
};

LocalChannel identity_channel(const std::vector<int>& dims);
DensityMatrix apply_channel(const LocalChannel& ch, const DensityMatrix& rho);
// Stinespring dilation with a Haar unitary on subsystem x ancilla(kraus_rank).
LocalChannel random_local_channel(const std::vector<int>& dims, int kraus_rank,
                                  std::uint64_t seed);

// Channel induced by a measurement, as a LocalChannel (projector Kraus ops).
LocalChannel measurement_channel(const ProjectiveMeasurement& m);

// Squared Hilbert-Schmidt distance between the Choi matrices of the two
// measurement channels, normalized to [0,1] by the maximum over basis pairs
// for the measured dims (2(D-1)/D^2 with D the measured-side dimension).
double channel_distance(const ProjectiveMeasurement& m1, const ProjectiveMeasurement& m2);

// Unnormalized Choi-matrix HS distance used by channel_distance.
double choi_distance_squared(const ProjectiveMeasurement& m1, const ProjectiveMeasurement& m2);

// Measurement JSON: {"side":[...], "bases":[[[re,im],...],...]}.
std::string measurement_to_json(const ProjectiveMeasurement& m);
ProjectiveMeasurement measurement_from_json(const std::string& text,
                                            const std::vector<int>& dims);

}  // namespace qcorr
