#include "noiselab/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "noiselab/rng.hpp"

namespace noiselab {

namespace {

bool parses_as_number(const std::string& s) {
    if (s.empty()) return false;
    const char* begin = s.data();
    const char* end = begin + s.size();
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(begin, end, value);
    return ec == std::errc() && ptr == end;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

std::size_t Schema::encoded_width() const {
    std::size_t w = 0;
    for (const auto& f : features)
        w += (f.kind == FeatureKind::Numeric) ? 1 : f.levels.size();
    return w;
}

std::uint64_t Schema::fingerprint() const {
    std::string repr = label_column + "|" + positive_label + "|" + negative_label;
    for (const auto& f : features) {
        repr += "|" + f.name + ":" + (f.kind == FeatureKind::Numeric ? "num" : "cat");
        for (const auto& l : f.levels) repr += "," + l;
    }
    return fnv1a(repr.data(), repr.size());
}

Dataset::Dataset(Schema schema, std::vector<Instance> instances)
    : schema_(std::move(schema)), instances_(std::move(instances)) {
    std::sort(instances_.begin(), instances_.end(),
              [](const Instance& a, const Instance& b) { return a.id < b.id; });
    std::unordered_set<std::int64_t> seen;
    for (const auto& inst : instances_) {
        if (!seen.insert(inst.id).second)
            throw std::invalid_argument("duplicate instance id " + std::to_string(inst.id));
        if (inst.label != schema_.positive_label && inst.label != schema_.negative_label)
            throw std::invalid_argument("label '" + inst.label + "' not in schema");
        if (inst.values.size() != schema_.features.size())
            throw std::invalid_argument("instance width does not match schema");
    }
}

std::size_t Dataset::count_label(const std::string& label) const {
    return static_cast<std::size_t>(
        std::count_if(instances_.begin(), instances_.end(),
                      [&](const Instance& i) { return i.label == label; }));
}

const std::string& Dataset::minority_label() const {
    return positive_count() <= negative_count() ? schema_.positive_label
                                                : schema_.negative_label;
}

const std::string& Dataset::majority_label() const {
    return positive_count() <= negative_count() ? schema_.negative_label
                                                : schema_.positive_label;
}

std::vector<std::int64_t> Dataset::ids() const {
    std::vector<std::int64_t> out;
    out.reserve(instances_.size());
    for (const auto& i : instances_) out.push_back(i.id);
    return out;
}

bool Dataset::has_id(std::int64_t id) const {
    auto it = std::lower_bound(instances_.begin(), instances_.end(), id,
                               [](const Instance& a, std::int64_t v) { return a.id < v; });
    return it != instances_.end() && it->id == id;
}

const Instance& Dataset::by_id(std::int64_t id) const {
    auto it = std::lower_bound(instances_.begin(), instances_.end(), id,
                               [](const Instance& a, std::int64_t v) { return a.id < v; });
    if (it == instances_.end() || it->id != id)
        throw std::out_of_range("no instance with id " + std::to_string(id));
    return *it;
}

Dataset Dataset::subset(const std::vector<std::int64_t>& keep_ids) const {
    std::vector<Instance> kept;
    kept.reserve(keep_ids.size());
    for (auto id : keep_ids) kept.push_back(by_id(id));
    return Dataset(schema_, std::move(kept));
}

Dataset Dataset::with_labels(
    const std::vector<std::pair<std::int64_t, std::string>>& overrides) const {
    std::vector<Instance> rows = instances_;
    for (const auto& [id, label] : overrides) {
        auto it = std::lower_bound(rows.begin(), rows.end(), id,
                                   [](const Instance& a, std::int64_t v) { return a.id < v; });
        if (it == rows.end() || it->id != id)
            throw std::out_of_range("override for unknown id " + std::to_string(id));
        it->label = label;
    }
    return Dataset(schema_, std::move(rows));
}

ImbalanceRatio ImbalanceRatio::parse(const std::string& text) {
    auto pos = text.find(':');
    if (pos == std::string::npos)
        throw std::invalid_argument("imbalance ratio must look like '20:80'");
    ImbalanceRatio ir;
    ir.minority_share = std::stoi(text.substr(0, pos));
    ir.majority_share = std::stoi(text.substr(pos + 1));
    if (ir.minority_share <= 0 || ir.majority_share <= 0)
        throw std::invalid_argument("imbalance ratio shares must be positive");
    if (ir.minority_share > ir.majority_share)
        throw std::invalid_argument("minority share exceeds majority share");
    if (ir.minority_share + ir.majority_share != 100)
        throw std::invalid_argument("imbalance ratio shares must sum to 100");
    return ir;
}

std::string ImbalanceRatio::str() const {
    return std::to_string(minority_share) + ":" + std::to_string(majority_share);
}

LoadReport load_csv(const std::string& path, const CsvOptions& options) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty file: " + path);
    std::vector<std::string> header = split_csv_line(line);
    for (auto& h : header) h = trim(h);

    std::size_t label_idx = header.size();
    bool has_id_col = false;
    std::size_t id_idx = 0;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == options.label_column) label_idx = i;
        if (header[i] == "id") {
            has_id_col = true;
            id_idx = i;
        }
    }
    if (label_idx == header.size())
        throw std::runtime_error("missing label column '" + options.label_column + "'");

    std::vector<std::vector<std::string>> rows;
    std::size_t dropped = 0;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        auto cells = split_csv_line(line);
        if (cells.size() != header.size())
            throw std::runtime_error("row width mismatch in " + path);
        bool incomplete = false;
        for (auto& c : cells) {
            c = trim(c);
            if (c.empty()) incomplete = true;
        }
        if (incomplete) {
            ++dropped;
            continue;
        }
        rows.push_back(std::move(cells));
    }
    if (rows.empty()) throw std::runtime_error("no data rows in " + path);

    std::set<std::string> labels;
    for (const auto& r : rows) labels.insert(r[label_idx]);
    if (labels.size() < 2) throw std::runtime_error("fewer than 2 distinct labels");
    if (labels.size() > 2) throw std::runtime_error("more than 2 distinct labels (binary only)");

    Schema schema;
    schema.label_column = options.label_column;
    // First label in row order is positive unless counts decide otherwise;
    // convention: positive = lexicographically smaller label. Stable and
    // independent of row order.
    auto it = labels.begin();
    schema.positive_label = *it++;
    schema.negative_label = *it;

    std::vector<std::size_t> feature_cols;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i == label_idx) continue;
        if (has_id_col && i == id_idx) continue;
        feature_cols.push_back(i);
    }

    for (auto col : feature_cols) {
        FeatureDescriptor fd;
        fd.name = header[col];
        std::optional<FeatureKind> hinted;
        for (const auto& [name, kind] : options.kind_hints)
            if (name == fd.name) hinted = kind;
        bool all_numeric = true;
        for (const auto& r : rows)
            if (!parses_as_number(r[col])) {
                all_numeric = false;
                break;
            }
        fd.kind = hinted.value_or(all_numeric ? FeatureKind::Numeric : FeatureKind::Categorical);
        if (fd.kind == FeatureKind::Categorical) {
            std::set<std::string> levels;
            for (const auto& r : rows) levels.insert(r[col]);
            fd.levels.assign(levels.begin(), levels.end());
        }
        schema.features.push_back(std::move(fd));
    }

    std::vector<Instance> instances;
    instances.reserve(rows.size());
    std::int64_t next_id = 0;
    for (const auto& r : rows) {
        Instance inst;
        inst.id = has_id_col ? std::stoll(r[id_idx]) : next_id;
        ++next_id;
        for (auto col : feature_cols) inst.values.push_back(r[col]);
        inst.label = r[label_idx];
        instances.push_back(std::move(inst));
    }

    LoadReport report;
    report.dataset = Dataset(std::move(schema), std::move(instances));
    report.dropped_rows = dropped;
    return report;
}

void write_csv(const Dataset& data, const std::string& path, bool with_ids) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    if (with_ids) out << "id,";
    for (const auto& f : data.schema().features) out << f.name << ",";
    out << data.schema().label_column << "\n";
    for (const auto& inst : data.instances()) {
        if (with_ids) out << inst.id << ",";
        for (const auto& v : inst.values) out << v << ",";
        out << inst.label << "\n";
    }
}

SplitPair split(const Dataset& data, double train_fraction, std::uint64_t seed) {
    if (train_fraction <= 0.0 || train_fraction >= 1.0)
        throw std::invalid_argument("train fraction must lie in (0,1)");

    Rng rng(mix_seed(seed, 0x73706c6974ULL));  // "split"
    std::vector<std::int64_t> train_ids, test_ids;
    for (const std::string* label :
         {&data.schema().positive_label, &data.schema().negative_label}) {
        std::vector<std::int64_t> class_ids;
        for (const auto& inst : data.instances())
            if (inst.label == *label) class_ids.push_back(inst.id);
        if (class_ids.size() < 2)
            throw std::invalid_argument("class '" + *label + "' has fewer than 2 instances");
        rng.shuffle(class_ids);
        const std::size_t n_train =
            static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(class_ids.size())));
        if (n_train == 0 || n_train == class_ids.size())
            throw std::invalid_argument("class '" + *label + "' would have an empty split side");
        train_ids.insert(train_ids.end(), class_ids.begin(),
                         class_ids.begin() + static_cast<std::ptrdiff_t>(n_train));
        test_ids.insert(test_ids.end(), class_ids.begin() + static_cast<std::ptrdiff_t>(n_train),
                        class_ids.end());
    }

    SplitPair pair;
    pair.train = data.subset(train_ids);
    pair.test = data.subset(test_ids);
    pair.train_fraction = train_fraction;
    return pair;
}

Dataset undersample_to_ir(const Dataset& data, const ImbalanceRatio& target,
                          std::uint64_t seed) {
    const std::string& min_label = data.minority_label();
    const std::string& maj_label = data.majority_label();
    const std::size_t c_min = data.count_label(min_label);
    const std::size_t c_maj = data.count_label(maj_label);
    const auto a = static_cast<std::size_t>(target.minority_share);
    const auto b = static_cast<std::size_t>(target.majority_share);

    // Removal-only candidates, with the ratio condition min == floor(maj*a/b)
    // in both cases. Either the majority is kept whole and the minority is
    // trimmed to the floor, or the minority is kept whole and the majority is
    // trimmed to the largest count still satisfying the floor condition.
    std::size_t new_min = 0, new_maj = 0;

    const std::size_t trim_min = c_maj * a / b;  // keep majority whole
    const bool cand1_ok = trim_min >= 1 && trim_min <= c_min;

    // keep minority whole: largest y <= c_maj with floor(y*a/b) == c_min
    std::size_t trim_maj = ((c_min + 1) * b - 1) / a;
    trim_maj = std::min(trim_maj, c_maj);
    const bool cand2_ok = trim_maj >= 1 && trim_maj * a >= c_min * b;

    if (!cand1_ok && !cand2_ok)
        throw std::invalid_argument("target ratio unreachable by removal");
    if (!cand2_ok || (cand1_ok && trim_min + c_maj >= c_min + trim_maj)) {
        new_min = trim_min;
        new_maj = c_maj;
    } else {
        new_min = c_min;
        new_maj = trim_maj;
    }

    Rng rng(mix_seed(seed, 0x756e646572ULL));  // "under"
    auto pick = [&](const std::string& label, std::size_t keep) {
        std::vector<std::int64_t> class_ids;
        for (const auto& inst : data.instances())
            if (inst.label == label) class_ids.push_back(inst.id);
        rng.shuffle(class_ids);
        class_ids.resize(keep);
        return class_ids;
    };

    std::vector<std::int64_t> keep_ids = pick(min_label, new_min);
    auto maj_ids = pick(maj_label, new_maj);
    keep_ids.insert(keep_ids.end(), maj_ids.begin(), maj_ids.end());
    return data.subset(keep_ids);
}

Dataset generate_synthetic(std::size_t n_positive, std::size_t n_negative,
                           std::size_t dims, double separation, std::uint64_t seed) {
    if (dims < 1) throw std::invalid_argument("dims must be >= 1");
    if (n_positive < 2 || n_negative < 2)
        throw std::invalid_argument("each class needs at least 2 instances");

    Schema schema;
    schema.label_column = "label";
    schema.positive_label = "pos";
    schema.negative_label = "neg";
    for (std::size_t d = 0; d < dims; ++d) {
        FeatureDescriptor fd;
        fd.name = "f" + std::to_string(d);
        fd.kind = FeatureKind::Numeric;
        schema.features.push_back(std::move(fd));
    }

    Rng rng(mix_seed(seed, 0x73796e7468ULL));  // "synth"
    std::vector<Instance> instances;
    std::int64_t id = 0;
    auto emit = [&](std::size_t n, double center, const std::string& label) {
        for (std::size_t i = 0; i < n; ++i) {
            Instance inst;
            inst.id = id++;
            inst.label = label;
            for (std::size_t d = 0; d < dims; ++d) {
                double v = rng.next_normal() + (d == 0 ? center : 0.0);
                std::ostringstream os;
                os.precision(17);
                os << v;
                inst.values.push_back(os.str());
            }
            instances.push_back(std::move(inst));
        }
    };
    emit(n_positive, +separation / 2.0, schema.positive_label);
    emit(n_negative, -separation / 2.0, schema.negative_label);
    return Dataset(std::move(schema), std::move(instances));
}

}  // namespace noiselab
