#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hackint/types.hpp"

namespace hackint {

struct CsvBindings {
    std::string outcome;
    std::optional<std::string> treatment;
    std::vector<std::string> features;
};

struct IngestResult {
    Dataset data;
    int dropped_rows = 0; // rows with a missing value in a bound column
};

// UTF-8 CSV with a header row; numeric cells parse as decimal floats and an
// empty cell means missing. Rows missing a bound value are dropped (counted);
// the treatment column must be 0/1.
IngestResult ingest_csv(const std::string& path, const CsvBindings& bindings);

// Raw table access for query matrices and the PCA command.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};
CsvTable read_csv(const std::string& path);

MatrixXd numeric_columns(const CsvTable& table, const std::vector<std::string>& columns);

} // namespace hackint
