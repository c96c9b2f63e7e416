#pragma once

// Projection matrices R* (m x p_gamma) for the three back-ends and the compression
// Z = X[:, gamma] R*'.

#include "tarp/data.hpp"
#include "tarp/rng.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace tarp {

enum class ProjectionKind { rp, sparseRp, pcr };

std::string_view to_string(ProjectionKind kind) noexcept;

struct ProjectionMatrix {
    ProjectionKind kind = ProjectionKind::rp;
    MatrixXd entries;              // m x pGamma, dense
    std::vector<Index> columnMap;  // column j of `entries` acts on X column columnMap[j]
    Index m = 0;                   // effective row count
    Index requestedM = 0;          // before rank truncation (pcr only differs)
    std::optional<double> psi;
    std::optional<double> kappa;
    double magnitude = 0.0;        // nonzero |entry| for ternary kinds

    Index p_gamma() const noexcept { return entries.cols(); }
    bool truncated() const noexcept { return m < requestedM; }
    bool ternary() const noexcept { return kind != ProjectionKind::pcr; }
};

/// Coordinate-list view of a ternary matrix: for each row, positions (into columnMap)
/// of the +magnitude and -magnitude entries.
struct TernaryRows {
    std::vector<std::vector<Index>> positive;
    std::vector<std::vector<Index>> negative;
    double magnitude = 0.0;

    std::size_t nonzeros() const noexcept;
};

TernaryRows ternary_rows(const ProjectionMatrix& proj);
double density(const ProjectionMatrix& proj) noexcept;

/// Entries +-1/sqrt(2 psi) with probability psi each, 0 otherwise. psi in (0, 0.5].
ProjectionMatrix gen_rp_matrix(Index pGamma, Index m, double psi, Rng& rng);

/// Entries +-n^(kappa/2)/sqrt(m) with probability 1/(2 n^kappa) each, 0 otherwise. kappa in (0, 1).
ProjectionMatrix gen_sparse_rp_matrix(Index pGamma, Index m, double kappa, Index n, Rng& rng);

/// Top right singular vectors of X_gamma as rows, ordered by decreasing singular value,
/// each signed so its largest-magnitude entry is positive. m is truncated to rank(X_gamma).
ProjectionMatrix gen_pcr_matrix(const MatrixXd& Xgamma, Index m);

/// Points the matrix at the screened columns of the full design.
void bind_columns(ProjectionMatrix& proj, std::span<const Index> columnMap);

/// Z = X[:, columnMap] * entries'. Columns outside the map are never read.
MatrixXd compress(const MatrixXd& X, const ProjectionMatrix& proj);

/// Numerical rank with tolerance max(n, p) * eps * sigma_max.
Index numerical_rank(const VectorXd& singularValues, Index rows, Index cols);

// Debug dump: "TARPPRJ1" magic, u32 kind, u64 m, u64 pGamma, f64 psi, f64 kappa (NaN when
// absent), u64 columnMap[pGamma], then m*pGamma row-major f64 entries. Little-endian host order.
void write_projection(const std::filesystem::path& path, const ProjectionMatrix& proj);
ProjectionMatrix read_projection(const std::filesystem::path& path);

}  // namespace tarp
