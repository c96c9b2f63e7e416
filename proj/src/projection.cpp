#include "tarp/projection.hpp"

#include "tarp/error.hpp"
#include "tarp/kernels.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>

namespace tarp {
namespace {

std::vector<Index> identity_map(Index p) {
    std::vector<Index> map(static_cast<std::size_t>(p));
    std::iota(map.begin(), map.end(), Index{0});
    return map;
}

// Fills an m x pGamma matrix with +-value w.p. `half` each, else 0. Row-major draw order.
MatrixXd ternary_fill(Index m, Index pGamma, double value, double half, Rng& rng) {
    MatrixXd R(m, pGamma);
    for (Index k = 0; k < m; ++k) {
        for (Index j = 0; j < pGamma; ++j) {
            const double u = rng.uniform();
            R(k, j) = u < half ? value : (u < 2.0 * half ? -value : 0.0);
        }
    }
    return R;
}

constexpr char kMagic[8] = {'T', 'A', 'R', 'P', 'P', 'R', 'J', '1'};

template <typename T>
void put(std::ofstream& out, T value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::ifstream& in) {
    T value{};
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    require(in.good(), ErrorKind::io, "truncated projection dump");
    return value;
}

}  // namespace

std::string_view to_string(ProjectionKind kind) noexcept {
    switch (kind) {
        case ProjectionKind::rp: return "rp";
        case ProjectionKind::sparseRp: return "sparse-rp";
        case ProjectionKind::pcr: return "pcr";
    }
    return "unknown";
}

std::size_t TernaryRows::nonzeros() const noexcept {
    std::size_t count = 0;
    for (std::size_t k = 0; k < positive.size(); ++k) count += positive[k].size() + negative[k].size();
    return count;
}

TernaryRows ternary_rows(const ProjectionMatrix& proj) {
    require(proj.ternary(), ErrorKind::parameter, "principal-component projections are not ternary");
    TernaryRows rows;
    rows.magnitude = proj.magnitude;
    rows.positive.resize(static_cast<std::size_t>(proj.m));
    rows.negative.resize(static_cast<std::size_t>(proj.m));
    for (Index k = 0; k < proj.m; ++k) {
        for (Index j = 0; j < proj.p_gamma(); ++j) {
            const double v = proj.entries(k, j);
            if (v > 0.0) rows.positive[k].push_back(j);
            else if (v < 0.0) rows.negative[k].push_back(j);
        }
    }
    return rows;
}

double density(const ProjectionMatrix& proj) noexcept {
    const double total = static_cast<double>(proj.entries.size());
    return total > 0 ? static_cast<double>((proj.entries.array() != 0.0).count()) / total : 0.0;
}

ProjectionMatrix gen_rp_matrix(Index pGamma, Index m, double psi, Rng& rng) {
    require(psi > 0.0 && psi <= 0.5, ErrorKind::parameter, "psi must lie in (0, 0.5], got " + std::to_string(psi));
    require(m >= 1 && pGamma >= 1, ErrorKind::dimension, "projection needs m >= 1 and pGamma >= 1");
    ProjectionMatrix proj;
    proj.kind = ProjectionKind::rp;
    proj.magnitude = 1.0 / std::sqrt(2.0 * psi);
    proj.entries = ternary_fill(m, pGamma, proj.magnitude, psi, rng);
    proj.columnMap = identity_map(pGamma);
    proj.m = proj.requestedM = m;
    proj.psi = psi;
    return proj;
}

ProjectionMatrix gen_sparse_rp_matrix(Index pGamma, Index m, double kappa, Index n, Rng& rng) {
    require(kappa > 0.0 && kappa < 1.0, ErrorKind::parameter, "kappa must lie in (0, 1), got " + std::to_string(kappa));
    require(n >= 2, ErrorKind::dimension, "sparse projection needs n >= 2");
    require(m >= 1 && pGamma >= 1, ErrorKind::dimension, "projection needs m >= 1 and pGamma >= 1");
    const double nk = std::pow(static_cast<double>(n), kappa);
    ProjectionMatrix proj;
    proj.kind = ProjectionKind::sparseRp;
    proj.magnitude = std::sqrt(nk) / std::sqrt(static_cast<double>(m));
    proj.entries = ternary_fill(m, pGamma, proj.magnitude, 0.5 / nk, rng);
    proj.columnMap = identity_map(pGamma);
    proj.m = proj.requestedM = m;
    proj.kappa = kappa;
    return proj;
}

Index numerical_rank(const VectorXd& singularValues, Index rows, Index cols) {
    if (singularValues.size() == 0) return 0;
    const double tol = static_cast<double>(std::max(rows, cols)) * std::numeric_limits<double>::epsilon() *
                       singularValues[0];
    return (singularValues.array() > tol).count();
}

ProjectionMatrix gen_pcr_matrix(const MatrixXd& Xgamma, Index m) {
    require(m >= 1, ErrorKind::dimension, "projection needs m >= 1");
    require(Xgamma.rows() >= 1 && Xgamma.cols() >= 1, ErrorKind::dimension, "empty screened matrix");
    Eigen::BDCSVD<MatrixXd> svd(Xgamma, Eigen::ComputeThinV);
    const Index rank = numerical_rank(svd.singularValues(), Xgamma.rows(), Xgamma.cols());
    require(rank >= 1, ErrorKind::degenerate, "screened design matrix is numerically zero");

    ProjectionMatrix proj;
    proj.kind = ProjectionKind::pcr;
    proj.requestedM = m;
    proj.m = std::min(m, rank);
    proj.entries = svd.matrixV().leftCols(proj.m).transpose();
    for (Index k = 0; k < proj.m; ++k) {
        Index pivot = 0;
        proj.entries.row(k).cwiseAbs().maxCoeff(&pivot);
        if (proj.entries(k, pivot) < 0.0) proj.entries.row(k) *= -1.0;
    }
    proj.columnMap = identity_map(Xgamma.cols());
    return proj;
}

void bind_columns(ProjectionMatrix& proj, std::span<const Index> columnMap) {
    require(static_cast<Index>(columnMap.size()) == proj.p_gamma(), ErrorKind::dimension,
            "column map length does not match projection width");
    proj.columnMap.assign(columnMap.begin(), columnMap.end());
}

MatrixXd compress(const MatrixXd& X, const ProjectionMatrix& proj) {
    require(static_cast<Index>(proj.columnMap.size()) == proj.p_gamma(), ErrorKind::dimension,
            "projection column map is inconsistent");
    for (Index c : proj.columnMap)
        require(c >= 0 && c < X.cols(), ErrorKind::dimension, "projection column " + std::to_string(c) + " out of range");

    const Index n = X.rows();
    MatrixXd Z = MatrixXd::Zero(n, proj.m);
    if (proj.ternary()) {
        const auto& k = kernels::active();
        const auto un = static_cast<std::size_t>(n);
        const TernaryRows rows = ternary_rows(proj);
        for (Index r = 0; r < proj.m; ++r) {
            double* z = Z.col(r).data();
            for (Index j : rows.positive[r]) k.add(z, X.col(proj.columnMap[j]).data(), un);
            for (Index j : rows.negative[r]) k.sub(z, X.col(proj.columnMap[j]).data(), un);
            k.scale(z, rows.magnitude, un);
        }
        return Z;
    }
    MatrixXd Xg(n, proj.p_gamma());
    for (Index c = 0; c < proj.p_gamma(); ++c) Xg.col(c) = X.col(proj.columnMap[c]);
    Z.noalias() = Xg * proj.entries.transpose();
    return Z;
}

void write_projection(const std::filesystem::path& path, const ProjectionMatrix& proj) {
    std::ofstream out(path, std::ios::binary);
    require(out.good(), ErrorKind::io, "cannot write " + path.string());
    out.write(kMagic, sizeof kMagic);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(proj.kind));
    put<std::uint64_t>(out, static_cast<std::uint64_t>(proj.m));
    put<std::uint64_t>(out, static_cast<std::uint64_t>(proj.p_gamma()));
    put<double>(out, proj.psi.value_or(std::numeric_limits<double>::quiet_NaN()));
    put<double>(out, proj.kappa.value_or(std::numeric_limits<double>::quiet_NaN()));
    for (Index c : proj.columnMap) put<std::uint64_t>(out, static_cast<std::uint64_t>(c));
    for (Index k = 0; k < proj.m; ++k)
        for (Index j = 0; j < proj.p_gamma(); ++j) put<double>(out, proj.entries(k, j));
    require(out.good(), ErrorKind::io, "write failed for " + path.string());
}

ProjectionMatrix read_projection(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), ErrorKind::io, "cannot open " + path.string());
    char magic[8];
    in.read(magic, sizeof magic);
    require(in.good() && std::memcmp(magic, kMagic, sizeof kMagic) == 0, ErrorKind::io, "not a projection dump");
    ProjectionMatrix proj;
    const auto kind = get<std::uint32_t>(in);
    require(kind <= 2, ErrorKind::io, "unknown projection kind");
    proj.kind = static_cast<ProjectionKind>(kind);
    proj.m = proj.requestedM = static_cast<Index>(get<std::uint64_t>(in));
    const auto pGamma = static_cast<Index>(get<std::uint64_t>(in));
    const double psi = get<double>(in);
    const double kappa = get<double>(in);
    if (!std::isnan(psi)) proj.psi = psi;
    if (!std::isnan(kappa)) proj.kappa = kappa;
    proj.columnMap.resize(static_cast<std::size_t>(pGamma));
    for (auto& c : proj.columnMap) c = static_cast<Index>(get<std::uint64_t>(in));
    proj.entries.resize(proj.m, pGamma);
    for (Index k = 0; k < proj.m; ++k)
        for (Index j = 0; j < pGamma; ++j) proj.entries(k, j) = get<double>(in);
    if (proj.ternary() && proj.entries.size() > 0) proj.magnitude = proj.entries.cwiseAbs().maxCoeff();
    return proj;
}

}  // namespace tarp
