#include "flowsense/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "flowsense/error.hpp"
#include "flowsense/format.hpp"
#include "flowsense/rng.hpp"

namespace flowsense {

namespace {

const std::vector<std::string> kNslKddFields = {
    "duration", "protocol_type", "service", "flag", "src_bytes", "dst_bytes",
    "land", "wrong_fragment", "urgent", "hot", "num_failed_logins",
    "logged_in", "num_compromised", "root_shell", "su_attempted", "num_root",
    "num_file_creations", "num_shells", "num_access_files",
    "num_outbound_cmds", "is_host_login", "is_guest_login", "count",
    "srv_count", "serror_rate", "srv_serror_rate", "rerror_rate",
    "srv_rerror_rate", "same_srv_rate", "diff_srv_rate", "srv_diff_host_rate",
    "dst_host_count", "dst_host_srv_count", "dst_host_same_srv_rate",
    "dst_host_diff_srv_rate", "dst_host_same_src_port_rate",
    "dst_host_srv_diff_host_rate", "dst_host_serror_rate",
    "dst_host_srv_serror_rate", "dst_host_rerror_rate",
    "dst_host_srv_rerror_rate"};

// Published 45-column train/test split layout. Column 0 (id) and column 43
// (attack_cat) carry no detector signal and are dropped on load.
const std::vector<std::string> kUnswFields = {
    "id", "dur", "proto", "service", "state", "spkts", "dpkts", "sbytes",
    "dbytes", "rate", "sttl", "dttl", "sload", "dload", "sloss", "dloss",
    "sinpkt", "dinpkt", "sjit", "djit", "swin", "stcpb", "dtcpb", "dwin",
    "tcprtt", "synack", "ackdat", "smean", "dmean", "trans_depth",
    "response_body_len", "ct_srv_src", "ct_state_ttl", "ct_dst_ltm",
    "ct_src_dport_ltm", "ct_dst_sport_ltm", "ct_dst_src_ltm", "is_ftp_login",
    "ct_ftp_cmd", "ct_flw_http_mthd", "ct_src_ltm", "ct_srv_dst",
    "is_sm_ips_ports", "attack_cat", "label"};

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c != '\r') {
            field.push_back(c);
        }
    }
    fields.push_back(std::move(field));
    return fields;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open file: " + path.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        lines.push_back(line);
    }
    return lines;
}

bool parse_number(const std::string& s, double& out) {
    if (s.empty()) return false;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

bool is_numeric(const std::string& s) {
    double v;
    return parse_number(s, v);
}

} // namespace

std::string to_string(DatasetSource source) {
    switch (source) {
    case DatasetSource::NslKdd: return "nsl-kdd";
    case DatasetSource::UnswNb15: return "unsw-nb15";
    case DatasetSource::Synthetic: return "synthetic";
    case DatasetSource::Csv: return "csv";
    }
    return "unknown";
}

RawTable load_nsl_kdd(const std::filesystem::path& path) {
    const auto lines = read_lines(path);
    if (lines.empty())
        throw ParseError("empty dataset: " + path.string());

    RawTable table;
    table.source = DatasetSource::NslKdd;
    table.field_names = kNslKddFields;
    table.records.reserve(lines.size());

    const std::size_t n = kNslKddFields.size(); // 41
    for (std::size_t i = 0; i < lines.size(); ++i) {
        auto fields = split_csv_line(lines[i]);
        // n features + label, optionally + difficulty
        if (fields.size() != n + 1 && fields.size() != n + 2)
            throw ParseError("malformed row at line " + std::to_string(i + 1) +
                             ": expected " + std::to_string(n + 1) + " or " +
                             std::to_string(n + 2) + " fields, got " +
                             std::to_string(fields.size()));
        RawRecord rec;
        rec.label_text = fields[n];
        fields.resize(n);
        rec.values = std::move(fields);
        table.records.push_back(std::move(rec));
    }
    return table;
}

RawTable load_unsw_nb15(const std::filesystem::path& path) {
    const auto lines = read_lines(path);
    if (lines.empty())
        throw ParseError("empty dataset: " + path.string());

    RawTable table;
    table.source = DatasetSource::UnswNb15;

    const std::size_t total = kUnswFields.size(); // 45
    // Feature names: everything except id, attack_cat, label.
    for (std::size_t j = 1; j + 2 < total; ++j)
        table.field_names.push_back(kUnswFields[j]);

    std::size_t start = 0;
    {
        // Header detection: the id column is numeric in data rows.
        auto first = split_csv_line(lines[0]);
        if (!first.empty() && !is_numeric(first[0])) start = 1;
    }
    if (start == lines.size())
        throw ParseError("empty dataset (header only): " + path.string());

    for (std::size_t i = start; i < lines.size(); ++i) {
        auto fields = split_csv_line(lines[i]);
        if (fields.size() != total)
            throw ParseError("malformed row at line " + std::to_string(i + 1) +
                             ": expected " + std::to_string(total) +
                             " fields, got " + std::to_string(fields.size()));
        RawRecord rec;
        rec.label_text = fields[total - 1];
        if (rec.label_text != "0" && rec.label_text != "1")
            throw ParseError("malformed row at line " + std::to_string(i + 1) +
                             ": binary label expected, got '" + rec.label_text + "'");
        rec.values.assign(fields.begin() + 1, fields.end() - 2);
        table.records.push_back(std::move(rec));
    }
    return table;
}

LabeledDataset load_dataset_csv(const std::filesystem::path& path) {
    const auto lines = read_lines(path);
    if (lines.size() < 2)
        throw ParseError("empty dataset: " + path.string());

    auto header = split_csv_line(lines[0]);
    if (header.size() < 2 || header.back() != "label")
        throw ParseError("dataset csv must end with a label column: " + path.string());

    LabeledDataset ds;
    ds.source = DatasetSource::Csv;
    ds.feature_names.assign(header.begin(), header.end() - 1);

    const std::size_t n = ds.feature_names.size();
    const std::size_t m = lines.size() - 1;
    ds.matrix = Matrix(m, n);
    ds.labels.reserve(m);

    for (std::size_t i = 0; i < m; ++i) {
        auto fields = split_csv_line(lines[i + 1]);
        if (fields.size() != n + 1)
            throw ParseError("malformed row at line " + std::to_string(i + 2) +
                             ": expected " + std::to_string(n + 1) +
                             " fields, got " + std::to_string(fields.size()));
        for (std::size_t j = 0; j < n; ++j) {
            double v;
            if (!parse_number(fields[j], v))
                throw ParseError("non-numeric value '" + fields[j] + "' at line " +
                                 std::to_string(i + 2) + " column " + std::to_string(j + 1));
            ds.matrix(i, j) = v;
        }
        const std::string& lab = fields[n];
        ds.labels.push_back(lab == "normal" || lab == "0" ? Label::Normal
                                                          : Label::Anomaly);
    }
    return ds;
}

EncodingSpec infer_encoding(const RawTable& table) {
    EncodingSpec spec;
    if (table.records.empty())
        throw ParseError("cannot infer encoding from an empty table");

    const std::size_t n = table.records[0].values.size();
    spec.columns.resize(n);

    for (std::size_t j = 0; j < n; ++j) {
        bool numeric = true;
        for (const auto& rec : table.records) {
            if (!is_numeric(rec.values[j])) {
                numeric = false;
                break;
            }
        }
        if (numeric) {
            spec.columns[j].kind = ColumnRule::Kind::Numeric;
        } else {
            spec.columns[j].kind = ColumnRule::Kind::OneHot;
            std::set<std::string> uniq;
            for (const auto& rec : table.records) uniq.insert(rec.values[j]);
            spec.columns[j].categories.assign(uniq.begin(), uniq.end());
        }
    }

    switch (table.source) {
    case DatasetSource::UnswNb15: spec.normal_labels = {"0"}; break;
    default: spec.normal_labels = {"normal"}; break;
    }
    return spec;
}

LabeledDataset encode(const RawTable& table, const EncodingSpec& spec) {
    if (table.records.empty())
        throw ParseError("cannot encode an empty table");

    const std::size_t n_in = spec.columns.size();
    if (table.records[0].values.size() != n_in)
        throw DimensionError("encoding spec has " + std::to_string(n_in) +
                             " columns but records have " +
                             std::to_string(table.records[0].values.size()));

    LabeledDataset ds;
    ds.source = table.source;

    for (std::size_t j = 0; j < n_in; ++j) {
        const auto& rule = spec.columns[j];
        const std::string base =
            j < table.field_names.size() ? table.field_names[j] : "c" + std::to_string(j);
        if (rule.kind == ColumnRule::Kind::Numeric) {
            ds.feature_names.push_back(base);
        } else {
            if (rule.categories.empty())
                throw ConfigError("one-hot column '" + base + "' has no categories");
            for (const auto& cat : rule.categories)
                ds.feature_names.push_back(base + "=" + cat);
        }
    }

    const std::size_t m = table.records.size();
    const std::size_t n_out = ds.feature_names.size();
    ds.matrix = Matrix(m, n_out);
    ds.labels.reserve(m);

    for (std::size_t i = 0; i < m; ++i) {
        const auto& rec = table.records[i];
        if (rec.values.size() != n_in)
            throw DimensionError("record " + std::to_string(i) + " has " +
                                 std::to_string(rec.values.size()) + " fields, expected " +
                                 std::to_string(n_in));
        std::size_t out = 0;
        for (std::size_t j = 0; j < n_in; ++j) {
            const auto& rule = spec.columns[j];
            if (rule.kind == ColumnRule::Kind::Numeric) {
                double v;
                if (!parse_number(rec.values[j], v))
                    throw ParseError("non-numeric value '" + rec.values[j] +
                                     "' in numeric column " + std::to_string(j) +
                                     " at record " + std::to_string(i));
                ds.matrix(i, out++) = v;
            } else {
                auto it = std::find(rule.categories.begin(), rule.categories.end(),
                                    rec.values[j]);
                if (it == rule.categories.end() && !spec.open_categories)
                    throw ParseError("unknown category '" + rec.values[j] +
                                     "' in column " + std::to_string(j) +
                                     " at record " + std::to_string(i));
                for (std::size_t c = 0; c < rule.categories.size(); ++c, ++out)
                    ds.matrix(i, out) =
                        (it != rule.categories.end() &&
                         c == static_cast<std::size_t>(it - rule.categories.begin()))
                            ? 1.0
                            : 0.0;
            }
        }
        const bool normal = std::find(spec.normal_labels.begin(), spec.normal_labels.end(),
                                      rec.label_text) != spec.normal_labels.end();
        ds.labels.push_back(normal ? Label::Normal : Label::Anomaly);
    }
    return ds;
}

MinMaxScaler fit_minmax(const LabeledDataset& dataset) {
    if (dataset.size() == 0)
        throw DomainError("cannot fit a scaler on an empty dataset");
    const std::size_t n = dataset.dim();
    MinMaxScaler scaler;
    scaler.min.assign(n, 0.0);
    scaler.max.assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        double lo = dataset.matrix(0, j), hi = dataset.matrix(0, j);
        for (std::size_t i = 1; i < dataset.size(); ++i) {
            lo = std::min(lo, dataset.matrix(i, j));
            hi = std::max(hi, dataset.matrix(i, j));
        }
        scaler.min[j] = lo;
        scaler.max[j] = hi;
    }
    return scaler;
}

LabeledDataset apply_minmax(const MinMaxScaler& scaler, const LabeledDataset& dataset) {
    if (scaler.min.size() != dataset.dim())
        throw DimensionError("scaler has " + std::to_string(scaler.min.size()) +
                             " columns but dataset has " + std::to_string(dataset.dim()));
    LabeledDataset out = dataset;
    for (std::size_t j = 0; j < dataset.dim(); ++j) {
        const double range = scaler.max[j] - scaler.min[j];
        for (std::size_t i = 0; i < dataset.size(); ++i)
            out.matrix(i, j) =
                range == 0.0 ? 0.0 : (dataset.matrix(i, j) - scaler.min[j]) / range;
    }
    return out;
}

LabeledDataset generate_synthetic(const SynthConfig& config) {
    if (config.n_normal == 0)
        throw ConfigError("n_normal must be >= 1");
    if (config.n_anomaly > config.n_normal)
        throw ConfigError("n_anomaly must not exceed n_normal");
    if (config.dims == 0)
        throw ConfigError("dims must be >= 1");
    if (config.n_clusters == 0)
        throw ConfigError("n_clusters must be >= 1");
    if (!(config.cluster_spread > 0.0))
        throw ConfigError("cluster_spread must be > 0");
    if (!(config.outlier_low <= config.outlier_high))
        throw ConfigError("outlier_low must not exceed outlier_high");

    SeededRng rng(config.seed);
    auto centers_rng = rng.child("centers");
    auto normal_rng = rng.child("normal");
    auto outlier_rng = rng.child("outlier");

    Matrix centers(config.n_clusters, config.dims);
    for (std::size_t c = 0; c < config.n_clusters; ++c)
        for (std::size_t j = 0; j < config.dims; ++j)
            centers(c, j) = centers_rng.uniform01();

    LabeledDataset ds;
    ds.source = DatasetSource::Synthetic;
    const std::size_t m = config.n_normal + config.n_anomaly;
    ds.matrix = Matrix(m, config.dims);
    ds.labels.assign(m, Label::Normal);
    for (std::size_t j = 0; j < config.dims; ++j)
        ds.feature_names.push_back("x" + std::to_string(j));

    for (std::size_t i = 0; i < config.n_normal; ++i) {
        const std::size_t c = i % config.n_clusters;
        for (std::size_t j = 0; j < config.dims; ++j)
            ds.matrix(i, j) = centers(c, j) + config.cluster_spread * normal_rng.normal();
    }
    for (std::size_t i = config.n_normal; i < m; ++i) {
        ds.labels[i] = Label::Anomaly;
        for (std::size_t j = 0; j < config.dims; ++j)
            ds.matrix(i, j) = outlier_rng.uniform(config.outlier_low, config.outlier_high);
    }
    return ds;
}

void write_dataset_csv(const LabeledDataset& dataset, std::ostream& out) {
    for (const auto& name : dataset.feature_names) out << name << ',';
    out << "label\n";
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        for (std::size_t j = 0; j < dataset.dim(); ++j)
            out << format_double(dataset.matrix(i, j)) << ',';
        out << (dataset.labels[i] == Label::Normal ? "normal" : "anomaly") << '\n';
    }
}

void write_dataset_csv(const LabeledDataset& dataset, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write file: " + path.string());
    write_dataset_csv(dataset, out);
}

} // namespace flowsense
