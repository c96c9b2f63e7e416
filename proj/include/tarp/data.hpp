#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace tarp {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class ResponseKind { continuous, binary };

/// Design matrix, response and the column statistics used to standardize it.
/// Immutable once built; replicate workers share it read-only.
struct Dataset {
    MatrixXd X;  // n x p
    VectorXd y;  // n
    ResponseKind responseKind = ResponseKind::continuous;
    VectorXd colMeans;               // p; filled by standardize()
    VectorXd colScales;              // p; sample sd, 0 for constant columns
    std::vector<char> constantColumn;  // p; 1 where the column has no spread
    bool standardized = false;
    std::vector<std::string> columnNames;  // p; "x1".."xp" when no header
    std::string responseName = "y";

    Index rows() const noexcept { return X.rows(); }
    Index cols() const noexcept { return X.cols(); }
    bool is_constant(Index j) const { return !constantColumn.empty() && constantColumn[j] != 0; }
};

ResponseKind infer_response_kind(const VectorXd& y) noexcept;

/// Builds a raw (unstandardized) dataset and checks its invariants.
Dataset make_dataset(MatrixXd X, VectorXd y, std::vector<std::string> columnNames = {});

/// Throws unless X and y are finite and consistently shaped, and binary y is in {0,1}.
void validate(const Dataset& data);

/// Centers and scales every non-constant column by its own mean and sample sd
/// (divisor n-1). Constant columns become 0 and are flagged. y is left untouched.
Dataset standardize(const Dataset& raw);

/// (newX - colMeans) / colScales with the statistics stored in `trained`; constant columns map to 0.
MatrixXd apply_standardization(const Dataset& trained, const MatrixXd& newX);

struct SplitPlan {
    std::vector<Index> trainIdx;
    std::vector<Index> testIdx;
};

/// Seeded random split; `testCount` rows go to the test side.
SplitPlan random_split(Index n, Index testCount, std::uint64_t seed);
void validate(const SplitPlan& plan, Index n);
Dataset select_rows(const Dataset& data, std::span<const Index> rows);

// ---------------------------------------------------------------------------
// CSV

struct CsvTable {
    std::vector<std::string> header;  // empty when the file had none
    MatrixXd values;
};

struct CsvOptions {
    bool headerRow = true;
    /// Column name, or zero-based index. Negative index counts from the end (-1 = last).
    std::variant<std::string, long> responseColumn = -1L;
    /// When false a missing response column yields a dataset with an empty y.
    bool responseRequired = true;
};

CsvTable read_csv_table(const std::filesystem::path& path, bool headerRow);
Dataset read_csv(const std::filesystem::path& path, const CsvOptions& options = {});

/// Writes with 17 significant digits so values round-trip exactly.
void write_csv(const std::filesystem::path& path, std::span<const std::string> header, const MatrixXd& values);
void write_dataset_csv(const std::filesystem::path& path, const Dataset& data);

/// RFC-4180 field quoting.
std::string csv_escape(const std::string& field);
std::string format_double(double value);

}  // namespace tarp
