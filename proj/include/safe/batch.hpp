#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "safe/closed_form.hpp"
#include "safe/engine.hpp"

namespace safe {

// A delimited text table: header plus string cells, row order preserved.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

Table read_table(const std::string& path, char delimiter = ',');
Table read_table(std::istream& in, const std::string& source_name, char delimiter);

// Column bindings for one effect-size kind, resolved against a header.
// Continuous kinds bind m1i,sd1i,n1i[,m2i,sd2i,n2i][,ri]; binary kinds bind
// ai,ci plus either bi,di or n1i,n2i; hwd binds nAA,nAa,naa. Unsuffixed
// aliases (m1, sd1, ...) are accepted.
struct DatasetSchema {
    EffectSizeKind kind;
    static DatasetSchema resolve(EffectSizeKind kind,
                                 const std::vector<std::string>& header);

    bool has_r_column() const { return r_col >= 0; }

    // -1 when unbound
    int m1 = -1, sd1 = -1, n1 = -1;
    int m2 = -1, sd2 = -1, n2 = -1;
    int a = -1, b = -1, c = -1, d = -1, bn1 = -1, bn2 = -1;
    int g1 = -1, g2 = -1, g3 = -1;
    int r_col = -1;
};

// One processed dataset row. Inputs are echoed verbatim; numeric outputs are
// NaN when the row failed (failure recorded in `warnings`).
struct ResultRow {
    std::size_t row_index = 0;
    std::vector<std::string> echo;
    double yi_safe = 0.0;
    double vi_safe = 0.0;
    double se_safe = 0.0;
    double bias = 0.0;
    std::uint64_t valid = 0;
    std::uint64_t cc_applied = 0;
    std::string warnings;  // semicolon-joined codes; error:<...> when failed
    std::optional<double> yi_ref;
    std::optional<double> vi_ref;
    bool failed = false;
    std::vector<double> values;  // retained replicates (histogram export)
};

struct BatchOptions {
    EffectSizeKind kind = EffectSizeKind::LnRoM;
    SafeConfig config;
    bool compare = false;           // add closed-form yi_ref/vi_ref columns
    int reference_order = 1;        // order of the lnrom/lncvr reference
    bool strict = false;            // abort on the first failing row
    std::optional<double> const_r;  // paired design with this r for every row
    int workers = 0;                // 0 = all available
};

// Row-wise SAFE dispatch: per-row stream (master_seed, row_index), workers
// over rows, output in input order; identical results at any worker count.
std::vector<ResultRow> run_batch(const Table& table, const BatchOptions& options);

// Stable column order: inputs, yi_safe, vi_safe, se_safe, bias, valid,
// cc_applied, warnings, then yi_ref/vi_ref when present. round_dp < 0 writes
// full precision.
void write_table(const std::vector<ResultRow>& rows,
                 const std::vector<std::string>& input_header,
                 const std::string& path, char delimiter = ',', int round_dp = -1);

// Histogram export: fixed equal-width bins per row over the retained
// replicates, columns (row_id, bin_left, bin_right, count).
void write_histograms(const std::vector<ResultRow>& rows, const std::string& path,
                      int bins = 50);

// Parses a full numeric cell; throws ParseError naming row/column on failure.
double parse_numeric_cell(const std::string& cell, std::size_t row,
                          const std::string& column);

}  // namespace safe
