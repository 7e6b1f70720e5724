#include "hackint/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace hackint {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    cells.push_back(cur);
    return cells;
}

std::string trimmed(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

std::optional<double> parse_cell(const std::string& raw) {
    const std::string s = trimmed(raw);
    if (s.empty()) return std::nullopt; // missing
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return value;
}

size_t column_index(const CsvTable& table, const std::string& name) {
    for (size_t c = 0; c < table.header.size(); ++c)
        if (table.header[c] == name) return c;
    throw Error(errc::missing_column, "column '" + name + "' not found");
}

} // namespace

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(errc::missing_column, "cannot open '" + path + "'");
    CsvTable table;
    std::string line;
    if (!std::getline(in, line))
        throw Error(errc::empty_after_filtering, "file '" + path + "' is empty");
    table.header = split_line(line);
    for (auto& h : table.header) h = trimmed(h);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        table.rows.push_back(split_line(line));
    }
    return table;
}

MatrixXd numeric_columns(const CsvTable& table, const std::vector<std::string>& columns) {
    std::vector<size_t> idx;
    for (const auto& c : columns) idx.push_back(column_index(table, c));
    MatrixXd m(table.rows.size(), columns.size());
    for (size_t r = 0; r < table.rows.size(); ++r) {
        for (size_t c = 0; c < idx.size(); ++c) {
            if (idx[c] >= table.rows[r].size())
                throw Error(errc::non_numeric_cell,
                            "row " + std::to_string(r + 1) + " is short of column '" + columns[c] + "'");
            const auto v = parse_cell(table.rows[r][idx[c]]);
            if (!v)
                throw Error(errc::non_numeric_cell,
                            "row " + std::to_string(r + 1) + " column '" + columns[c] +
                                "' is not numeric");
            m(r, c) = *v;
        }
    }
    return m;
}

IngestResult ingest_csv(const std::string& path, const CsvBindings& bindings) {
    const CsvTable table = read_csv(path);
    if (bindings.features.empty())
        throw Error(errc::invalid_config, "no feature columns bound");

    std::vector<size_t> feat_idx;
    for (const auto& f : bindings.features) feat_idx.push_back(column_index(table, f));
    const size_t out_idx = column_index(table, bindings.outcome);
    std::optional<size_t> treat_idx;
    if (bindings.treatment) treat_idx = column_index(table, *bindings.treatment);

    std::vector<VectorXd> rows;
    std::vector<double> outcomes, treatments;
    int dropped = 0;

    for (size_t r = 0; r < table.rows.size(); ++r) {
        const auto& cells = table.rows[r];
        auto cell_at = [&](size_t c, const std::string& name) -> std::optional<double> {
            std::string raw = c < cells.size() ? cells[c] : "";
            const std::string s = trimmed(raw);
            if (s.empty()) return std::nullopt;
            const auto v = parse_cell(raw);
            if (!v)
                throw Error(errc::non_numeric_cell, "row " + std::to_string(r + 1) + " column '" +
                                                        name + "' value '" + s + "' is not numeric");
            return v;
        };

        bool missing = false;
        VectorXd x(feat_idx.size());
        for (size_t c = 0; c < feat_idx.size(); ++c) {
            const auto v = cell_at(feat_idx[c], bindings.features[c]);
            if (!v) { missing = true; break; }
            x(c) = *v;
        }
        const auto yv = missing ? std::nullopt : cell_at(out_idx, bindings.outcome);
        std::optional<double> wv;
        if (!missing && treat_idx) {
            wv = cell_at(*treat_idx, *bindings.treatment);
            if (wv && *wv != 0.0 && *wv != 1.0)
                throw Error(errc::non_numeric_cell,
                            "row " + std::to_string(r + 1) + " column '" + *bindings.treatment +
                                "' value '" + std::to_string(*wv) + "' is not a 0/1 treatment");
        }
        if (missing || !yv || (treat_idx && !wv)) {
            ++dropped;
            continue;
        }
        rows.push_back(x);
        outcomes.push_back(*yv);
        if (treat_idx) treatments.push_back(*wv);
    }

    if (rows.empty())
        throw Error(errc::empty_after_filtering, "no usable rows after dropping missing values");

    IngestResult out;
    out.dropped_rows = dropped;
    out.data.x.resize(rows.size(), feat_idx.size());
    out.data.y.resize(rows.size());
    for (size_t r = 0; r < rows.size(); ++r) {
        out.data.x.row(r) = rows[r].transpose();
        out.data.y(r) = outcomes[r];
    }
    if (treat_idx) {
        VectorXd w(rows.size());
        for (size_t r = 0; r < rows.size(); ++r) w(r) = treatments[r];
        out.data.w = w;
    }
    out.data.names = bindings.features;
    out.data.validate();
    return out;
}

} // namespace hackint
