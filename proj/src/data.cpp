#include "tarp/data.hpp"

#include "tarp/error.hpp"
#include "tarp/kernels.hpp"
#include "tarp/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace tarp {
namespace {

constexpr double kConstantTolerance = 1e-12;

std::vector<std::string> default_names(Index p) {
    std::vector<std::string> names(static_cast<std::size_t>(p));
    for (Index j = 0; j < p; ++j) names[j] = "x" + std::to_string(j + 1);
    return names;
}

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

// Splits one CSV record, honouring double-quoted fields.
std::vector<std::string> split_record(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    current += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                current += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(trim(current));
            current.clear();
        } else {
            current += c;
        }
    }
    fields.push_back(trim(current));
    return fields;
}

double parse_cell(const std::string& cell, std::size_t row, std::size_t col) {
    double value = 0.0;
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    if (!cell.empty() && *begin == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (cell.empty() || ec != std::errc() || ptr != end || !std::isfinite(value)) {
        fail(ErrorKind::ingestion, "non-numeric cell '" + cell + "' at row " + std::to_string(row) +
                                       ", column " + std::to_string(col));
    }
    return value;
}

}  // namespace

ResponseKind infer_response_kind(const VectorXd& y) noexcept {
    if (y.size() == 0) return ResponseKind::continuous;
    const bool binary = std::all_of(y.data(), y.data() + y.size(), [](double v) { return v == 0.0 || v == 1.0; });
    return binary ? ResponseKind::binary : ResponseKind::continuous;
}

void validate(const Dataset& data) {
    require(data.y.size() == 0 || data.y.size() == data.X.rows(), ErrorKind::dimension,
            "response length " + std::to_string(data.y.size()) + " does not match " +
                std::to_string(data.X.rows()) + " rows");
    require(data.X.allFinite(), ErrorKind::ingestion, "design matrix contains non-finite entries");
    require(data.y.allFinite(), ErrorKind::ingestion, "response contains non-finite entries");
    require(data.columnNames.empty() || static_cast<Index>(data.columnNames.size()) == data.X.cols(),
            ErrorKind::dimension, "column name count does not match column count");
    if (data.responseKind == ResponseKind::binary) {
        require(infer_response_kind(data.y) == ResponseKind::binary || data.y.size() == 0, ErrorKind::ingestion,
                "binary response contains values outside {0,1}");
    }
}

Dataset make_dataset(MatrixXd X, VectorXd y, std::vector<std::string> columnNames) {
    Dataset data;
    if (columnNames.empty()) columnNames = default_names(X.cols());
    data.columnNames = std::move(columnNames);
    data.X = std::move(X);
    data.y = std::move(y);
    data.responseKind = infer_response_kind(data.y);
    validate(data);
    return data;
}

Dataset standardize(const Dataset& raw) {
    validate(raw);
    const Index n = raw.rows();
    const Index p = raw.cols();
    require(n >= 2, ErrorKind::dimension, "standardization needs at least 2 rows, got " + std::to_string(n));

    const auto& k = kernels::active();
    Dataset out = raw;
    out.colMeans.resize(p);
    out.colScales.resize(p);
    out.constantColumn.assign(static_cast<std::size_t>(p), 0);
    const auto un = static_cast<std::size_t>(n);
    for (Index j = 0; j < p; ++j) {
        const double* col = raw.X.col(j).data();
        const double mean = k.sum(col, un) / static_cast<double>(n);
        const double sd = std::sqrt(k.sum_sq_dev(col, mean, un) / static_cast<double>(n - 1));
        out.colMeans[j] = mean;
        if (sd <= kConstantTolerance * std::max(1.0, std::abs(mean))) {
            out.colScales[j] = 0.0;
            out.constantColumn[j] = 1;
            out.X.col(j).setZero();
        } else {
            out.colScales[j] = sd;
            k.standardize(out.X.col(j).data(), col, mean, sd, un);
        }
    }
    out.standardized = true;
    return out;
}

MatrixXd apply_standardization(const Dataset& trained, const MatrixXd& newX) {
    require(trained.standardized, ErrorKind::parameter, "dataset carries no standardization statistics");
    require(newX.cols() == trained.cols(), ErrorKind::dimension,
            "expected " + std::to_string(trained.cols()) + " columns, got " + std::to_string(newX.cols()));
    const auto& k = kernels::active();
    MatrixXd out(newX.rows(), newX.cols());
    const auto rows = static_cast<std::size_t>(newX.rows());
    for (Index j = 0; j < newX.cols(); ++j) {
        if (trained.is_constant(j)) {
            out.col(j).setZero();
        } else {
            k.standardize(out.col(j).data(), newX.col(j).data(), trained.colMeans[j], trained.colScales[j], rows);
        }
    }
    return out;
}

SplitPlan random_split(Index n, Index testCount, std::uint64_t seed) {
    require(testCount > 0 && testCount < n, ErrorKind::dimension, "test size must be in [1, n-1]");
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    Rng rng(seed, Stream::folds);
    std::shuffle(order.begin(), order.end(), rng.engine());
    SplitPlan plan;
    plan.testIdx.assign(order.begin(), order.begin() + testCount);
    plan.trainIdx.assign(order.begin() + testCount, order.end());
    std::sort(plan.testIdx.begin(), plan.testIdx.end());
    std::sort(plan.trainIdx.begin(), plan.trainIdx.end());
    return plan;
}

void validate(const SplitPlan& plan, Index n) {
    require(!plan.trainIdx.empty() && !plan.testIdx.empty(), ErrorKind::dimension, "split sides must be non-empty");
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    for (const auto* side : {&plan.trainIdx, &plan.testIdx}) {
        for (Index i : *side) {
            require(i >= 0 && i < n, ErrorKind::dimension, "split index out of range");
            require(seen[i] == 0, ErrorKind::dimension, "split sides overlap at row " + std::to_string(i));
            seen[i] = 1;
        }
    }
}

Dataset select_rows(const Dataset& data, std::span<const Index> rows) {
    Dataset out = data;
    out.X.resize(static_cast<Index>(rows.size()), data.cols());
    out.y.resize(data.y.size() == 0 ? 0 : static_cast<Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.X.row(static_cast<Index>(i)) = data.X.row(rows[i]);
        if (data.y.size() != 0) out.y[static_cast<Index>(i)] = data.y[rows[i]];
    }
    return out;
}

CsvTable read_csv_table(const std::filesystem::path& path, bool headerRow) {
    std::ifstream in(path);
    require(in.good(), ErrorKind::io, "cannot open " + path.string());

    CsvTable table;
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineNo = 0;
    std::size_t width = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++lineNo;
        if (first && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
        if (trim(line).empty()) continue;
        auto fields = split_record(line);
        if (first) {
            width = fields.size();
            first = false;
            if (headerRow) {
                table.header = std::move(fields);
                continue;
            }
        }
        require(fields.size() == width, ErrorKind::ingestion,
                "ragged row at line " + std::to_string(lineNo) + ": expected " + std::to_string(width) +
                    " fields, got " + std::to_string(fields.size()));
        std::vector<double> values(fields.size());
        const std::size_t dataRow = rows.size();
        for (std::size_t c = 0; c < fields.size(); ++c) values[c] = parse_cell(fields[c], dataRow, c);
        rows.push_back(std::move(values));
    }
    table.values.resize(static_cast<Index>(rows.size()), static_cast<Index>(width));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < width; ++c) table.values(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
    return table;
}

Dataset read_csv(const std::filesystem::path& path, const CsvOptions& options) {
    CsvTable table = read_csv_table(path, options.headerRow);
    const Index width = table.values.cols();
    require(width >= 1, ErrorKind::ingestion, path.string() + " has no columns");

    std::optional<Index> response;
    if (const auto* name = std::get_if<std::string>(&options.responseColumn)) {
        const auto it = std::find(table.header.begin(), table.header.end(), *name);
        if (it != table.header.end()) response = static_cast<Index>(it - table.header.begin());
    } else {
        const long idx = std::get<long>(options.responseColumn);
        const long resolved = idx < 0 ? static_cast<long>(width) + idx : idx;
        if (resolved >= 0 && resolved < width) response = static_cast<Index>(resolved);
    }
    if (!response && options.responseRequired) fail(ErrorKind::ingestion, "response column not found in " + path.string());

    std::vector<std::string> header = table.header;
    if (header.empty()) {
        header = default_names(width);
        if (response) header[*response] = "y";
    }

    const Index p = response ? width - 1 : width;
    MatrixXd X(table.values.rows(), p);
    std::vector<std::string> names;
    names.reserve(static_cast<std::size_t>(p));
    Index out = 0;
    for (Index c = 0; c < width; ++c) {
        if (response && c == *response) continue;
        X.col(out++) = table.values.col(c);
        names.push_back(header[c]);
    }
    VectorXd y = response ? VectorXd(table.values.col(*response)) : VectorXd();
    Dataset data = make_dataset(std::move(X), std::move(y), std::move(names));
    if (response) data.responseName = header[*response];
    return data;
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string format_double(double value) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
    return std::string(buf, ptr);
}

void write_csv(const std::filesystem::path& path, std::span<const std::string> header, const MatrixXd& values) {
    require(header.empty() || static_cast<Index>(header.size()) == values.cols(), ErrorKind::dimension,
            "header width does not match matrix");
    std::ofstream out(path);
    require(out.good(), ErrorKind::io, "cannot write " + path.string());
    for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << csv_escape(header[c]);
    if (!header.empty()) out << '\n';
    for (Index r = 0; r < values.rows(); ++r) {
        for (Index c = 0; c < values.cols(); ++c) out << (c ? "," : "") << format_double(values(r, c));
        out << '\n';
    }
    require(out.good(), ErrorKind::io, "write failed for " + path.string());
}

void write_dataset_csv(const std::filesystem::path& path, const Dataset& data) {
    std::vector<std::string> header = data.columnNames.empty() ? default_names(data.cols()) : data.columnNames;
    MatrixXd table(data.rows(), data.cols() + (data.y.size() ? 1 : 0));
    table.leftCols(data.cols()) = data.X;
    if (data.y.size()) {
        table.col(data.cols()) = data.y;
        header.push_back(data.responseName);
    }
    write_csv(path, header, table);
}

}  // namespace tarp
