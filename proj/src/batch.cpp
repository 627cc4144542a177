#include "safe/batch.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace safe {

namespace {

// Splits one line on the delimiter with minimal quote handling ("..." fields,
// doubled quotes inside).
std::vector<std::string> split_line(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::string cell;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cell.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cell.push_back(ch);
            }
        } else if (ch == '"' && cell.empty()) {
            quoted = true;
        } else if (ch == delim) {
            out.push_back(cell);
            cell.clear();
        } else {
            cell.push_back(ch);
        }
    }
    out.push_back(cell);
    return out;
}

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return s.substr(b, e - b);
}

int find_column(const std::vector<std::string>& header,
                std::initializer_list<const char*> candidates) {
    for (const char* name : candidates) {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == name) return static_cast<int>(i);
        }
    }
    return -1;
}

int require_column(const std::vector<std::string>& header,
                   std::initializer_list<const char*> candidates) {
    const int idx = find_column(header, candidates);
    if (idx < 0) {
        throw SchemaError("column " + std::string(*candidates.begin()) + " not found");
    }
    return idx;
}

long long parse_count_cell(const std::string& cell, std::size_t row,
                           const std::string& column) {
    const double v = parse_numeric_cell(cell, row, column);
    if (v != std::floor(v) || std::abs(v) > 9.0e15) {
        throw ParseError("row " + std::to_string(row + 1) + ", column " + column +
                         ": '" + cell + "' is not an integer count");
    }
    return static_cast<long long>(v);
}

std::string format_value(double v, int round_dp) {
    char buf[64];
    if (std::isnan(v)) return "nan";
    if (round_dp >= 0) {
        std::snprintf(buf, sizeof(buf), "%.*f", round_dp, v);
    } else {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
    }
    return buf;
}

}  // namespace

double parse_numeric_cell(const std::string& cell, std::size_t row,
                          const std::string& column) {
    const std::string t = trim(cell);
    if (!t.empty()) {
        char* end = nullptr;
        const double v = std::strtod(t.c_str(), &end);
        if (end == t.c_str() + t.size()) return v;
    }
    throw ParseError("row " + std::to_string(row + 1) + ", column " + column + ": '" +
                     cell + "' is not numeric");
}

Table read_table(std::istream& in, const std::string& source_name, char delimiter) {
    Table table;
    std::string line;
    if (!std::getline(in, line)) {
        throw ParseError(source_name + ": empty input, expected a header line");
    }
    table.header = split_line(line, delimiter);
    for (std::string& h : table.header) h = trim(h);
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        std::vector<std::string> cells = split_line(line, delimiter);
        for (std::string& c : cells) c = trim(c);
        if (cells.size() != table.header.size()) {
            throw ParseError(source_name + ": row " +
                             std::to_string(table.rows.size() + 1) + " has " +
                             std::to_string(cells.size()) + " cells, expected " +
                             std::to_string(table.header.size()));
        }
        table.rows.push_back(std::move(cells));
    }
    return table;
}

Table read_table(const std::string& path, char delimiter) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path + " for reading");
    return read_table(in, path, delimiter);
}

DatasetSchema DatasetSchema::resolve(EffectSizeKind kind,
                                     const std::vector<std::string>& header) {
    DatasetSchema s;
    s.kind = kind;
    switch (kind) {
        case EffectSizeKind::Reciprocal:
            s.m1 = require_column(header, {"m1i", "m1", "x1"});
            s.sd1 = require_column(header, {"sd1i", "sd1", "s1"});
            s.n1 = require_column(header, {"n1i", "n1"});
            break;
        case EffectSizeKind::LnRoM:
        case EffectSizeKind::Smd:
        case EffectSizeKind::LnCVR:
            s.m1 = require_column(header, {"m1i", "m1", "x1"});
            s.sd1 = require_column(header, {"sd1i", "sd1", "s1"});
            s.n1 = require_column(header, {"n1i", "n1"});
            s.m2 = require_column(header, {"m2i", "m2", "x2"});
            s.sd2 = require_column(header, {"sd2i", "sd2", "s2"});
            s.n2 = require_column(header, {"n2i", "n2"});
            s.r_col = find_column(header, {"ri", "r"});
            break;
        case EffectSizeKind::LnOR:
        case EffectSizeKind::LnRR:
            s.a = require_column(header, {"ai", "a"});
            s.c = require_column(header, {"ci", "c"});
            s.b = find_column(header, {"bi", "b"});
            s.d = find_column(header, {"di", "d"});
            if (s.b < 0 || s.d < 0) {
                s.bn1 = require_column(header, {"n1i", "n1"});
                s.bn2 = require_column(header, {"n2i", "n2"});
            }
            break;
        case EffectSizeKind::Hwd:
            s.g1 = require_column(header, {"nAA", "nAAi"});
            s.g2 = require_column(header, {"nAa", "nAai"});
            s.g3 = require_column(header, {"naa", "naai"});
            break;
    }
    return s;
}

namespace {

EffectInputs parse_inputs(const DatasetSchema& s, const std::vector<std::string>& cells,
                          std::size_t row, const std::vector<std::string>& header,
                          const std::optional<double>& const_r) {
    EffectInputs in;
    const auto num = [&](int col) {
        return parse_numeric_cell(cells[col], row, header[col]);
    };
    const auto count = [&](int col) {
        return parse_count_cell(cells[col], row, header[col]);
    };
    switch (s.kind) {
        case EffectSizeKind::Reciprocal:
            in.group1 = GroupSummary(num(s.m1), num(s.sd1), count(s.n1));
            break;
        case EffectSizeKind::LnRoM:
        case EffectSizeKind::Smd:
        case EffectSizeKind::LnCVR: {
            in.group1 = GroupSummary(num(s.m1), num(s.sd1), count(s.n1));
            in.group2 = GroupSummary(num(s.m2), num(s.sd2), count(s.n2));
            std::optional<double> r = const_r;
            if (s.has_r_column()) r = num(s.r_col);
            if (r) in.design = PairedDesign(*r, in.group1->n);
            break;
        }
        case EffectSizeKind::LnOR:
        case EffectSizeKind::LnRR: {
            const long long a = count(s.a);
            const long long c = count(s.c);
            long long b, d;
            if (s.b >= 0 && s.d >= 0) {
                b = count(s.b);
                d = count(s.d);
            } else {
                b = count(s.bn1) - a;
                d = count(s.bn2) - c;
            }
            in.table = ContingencyTable(a, b, c, d);
            break;
        }
        case EffectSizeKind::Hwd:
            in.genotypes = GenotypeCounts(count(s.g1), count(s.g2), count(s.g3));
            break;
    }
    return in;
}

void add_reference(ResultRow& out, EffectSizeKind kind, const EffectInputs& in,
                   const CcPolicy& cc, int order) {
    EstimatorResult ref;
    switch (kind) {
        case EffectSizeKind::Reciprocal:
            ref.point = plugin_reciprocal(*in.group1);
            ref.variance = reciprocal_delta_var(in.group1->mean, in.group1->sd,
                                                in.group1->n);
            break;
        case EffectSizeKind::LnRoM:
            ref = lnrom_estimate(*in.group1, *in.group2, order, in.design);
            break;
        case EffectSizeKind::Smd:
            ref = smd_estimate(*in.group1, *in.group2, SmdEstimator::CohenD).first;
            break;
        case EffectSizeKind::LnOR:
            ref = lnor_estimate(*in.table, cc);
            break;
        case EffectSizeKind::LnRR:
            ref = lnrr_estimate(*in.table, cc);
            break;
        case EffectSizeKind::LnCVR:
            ref = lncvr_estimate(*in.group1, *in.group2, order, in.design);
            break;
        case EffectSizeKind::Hwd:
            ref = hwd_estimate(*in.genotypes, cc);
            break;
    }
    out.yi_ref = ref.point;
    out.vi_ref = ref.variance;
}

std::string join_flags(const std::vector<std::string>& flags) {
    std::string out;
    for (const std::string& f : flags) {
        if (!out.empty()) out.push_back(';');
        out += f;
    }
    return out;
}

void process_row(const Table& table, const DatasetSchema& schema,
                 const BatchOptions& options, std::size_t i, ResultRow& out) {
    out.row_index = i;
    out.echo = table.rows[i];
    try {
        const EffectInputs in = parse_inputs(schema, table.rows[i], i, table.header,
                                             options.const_r);
        SafeConfig cfg = options.config;
        cfg.stream_id = i;
        cfg.threads = 1;  // workers parallelise over rows
        const BootstrapResult res = safe_estimate(options.kind, in, cfg);
        out.yi_safe = res.theta_bc;
        out.vi_safe = res.var_safe;
        out.se_safe = res.se_safe;
        out.bias = res.bias;
        out.valid = res.valid;
        out.cc_applied = res.cc_applied;
        out.warnings = join_flags(res.flags);
        out.values = res.values;
        if (options.compare) {
            add_reference(out, options.kind, in, options.config.cc,
                          options.reference_order);
        }
    } catch (const Error& e) {
        out.failed = true;
        const double nan = std::numeric_limits<double>::quiet_NaN();
        out.yi_safe = out.vi_safe = out.se_safe = out.bias = nan;
        out.warnings = std::string("error:") + e.what();
        if (options.strict) throw;
    }
}

}  // namespace

std::vector<ResultRow> run_batch(const Table& table, const BatchOptions& options) {
    DatasetSchema schema = DatasetSchema::resolve(options.kind, table.header);
    const std::size_t n = table.rows.size();
    std::vector<ResultRow> out(n);

    if (options.strict) {
        // Keep strict failures ordered: first bad row aborts.
        for (std::size_t i = 0; i < n; ++i) {
            process_row(table, schema, options, i, out[i]);
        }
        return out;
    }

#ifdef _OPENMP
    const int team = options.workers > 0 ? options.workers : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(team)
#endif
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
        process_row(table, schema, options, static_cast<std::size_t>(i),
                    out[static_cast<std::size_t>(i)]);
    }
    return out;
}

void write_table(const std::vector<ResultRow>& rows,
                 const std::vector<std::string>& input_header,
                 const std::string& path, char delimiter, int round_dp) {
    std::ofstream outf(path);
    if (!outf) throw IoError("cannot open " + path + " for writing");
    const bool compare = !rows.empty() && rows.front().yi_ref.has_value();

    for (const std::string& h : input_header) outf << h << delimiter;
    outf << "yi_safe" << delimiter << "vi_safe" << delimiter << "se_safe" << delimiter
         << "bias" << delimiter << "valid" << delimiter << "cc_applied" << delimiter
         << "warnings";
    if (compare) outf << delimiter << "yi_ref" << delimiter << "vi_ref";
    outf << "\n";

    for (const ResultRow& r : rows) {
        for (const std::string& cell : r.echo) outf << cell << delimiter;
        outf << format_value(r.yi_safe, round_dp) << delimiter
             << format_value(r.vi_safe, round_dp) << delimiter
             << format_value(r.se_safe, round_dp) << delimiter
             << format_value(r.bias, round_dp) << delimiter << r.valid << delimiter
             << r.cc_applied << delimiter << r.warnings;
        if (compare) {
            outf << delimiter << format_value(r.yi_ref.value_or(0.0), round_dp)
                 << delimiter << format_value(r.vi_ref.value_or(0.0), round_dp);
        }
        outf << "\n";
    }
    if (!outf) throw IoError("write to " + path + " failed");
}

void write_histograms(const std::vector<ResultRow>& rows, const std::string& path,
                      int bins) {
    std::ofstream outf(path);
    if (!outf) throw IoError("cannot open " + path + " for writing");
    outf << "row_id,bin_left,bin_right,count\n";
    for (const ResultRow& r : rows) {
        if (r.values.size() < 2) continue;
        const auto [mn_it, mx_it] = std::minmax_element(r.values.begin(), r.values.end());
        const double lo = *mn_it;
        const double hi = *mx_it;
        const double width = (hi - lo) / bins;
        if (!(width > 0.0)) continue;
        std::vector<std::uint64_t> counts(bins, 0);
        for (double v : r.values) {
            int idx = static_cast<int>((v - lo) / width);
            if (idx >= bins) idx = bins - 1;
            if (idx < 0) idx = 0;
            ++counts[idx];
        }
        for (int k = 0; k < bins; ++k) {
            outf << r.row_index << ',' << format_value(lo + k * width, -1) << ','
                 << format_value(lo + (k + 1) * width, -1) << ',' << counts[k] << "\n";
        }
    }
    if (!outf) throw IoError("write to " + path + " failed");
}

}  // namespace safe
