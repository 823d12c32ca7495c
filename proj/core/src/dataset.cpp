#include "dube/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "dube/rng.hpp"

namespace dube {

Dataset::Dataset(std::vector<double> features, std::size_t dims, std::vector<ClassId> labels,
                 std::size_t num_classes, std::vector<std::string> class_names)
    : features_(std::move(features)), dims_(dims), labels_(std::move(labels)),
      class_names_(std::move(class_names))
{
    if (dims_ == 0 && !labels_.empty()) {
        throw std::invalid_argument("dataset must have at least one feature column");
    }
    if (features_.size() != labels_.size() * dims_) {
        throw std::invalid_argument("feature table size does not match rows x dims");
    }
    for (double v : features_) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("feature values must be finite");
        }
    }
    if (class_names_.empty()) {
        for (std::size_t c = 0; c < num_classes; ++c) {
            class_names_.push_back(std::to_string(c));
        }
    }
    if (class_names_.size() != num_classes) {
        throw std::invalid_argument("class name count does not match class count");
    }
    class_index_.assign(num_classes, {});
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (labels_[i] >= num_classes) {
            throw std::invalid_argument("label " + std::to_string(labels_[i]) + " out of range");
        }
        class_index_[labels_[i]].push_back(i);
    }
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const
{
    std::vector<double> features;
    features.reserve(rows.size() * dims_);
    std::vector<ClassId> labels;
    labels.reserve(rows.size());
    for (std::size_t r : rows) {
        if (r >= labels_.size()) {
            throw std::out_of_range("subset row out of range");
        }
        auto x = row(r);
        features.insert(features.end(), x.begin(), x.end());
        labels.push_back(labels_[r]);
    }
    return Dataset(std::move(features), dims_, std::move(labels), num_classes(), class_names_);
}

Dataset Dataset::relabeled(std::vector<ClassId> labels) const
{
    if (labels.size() != labels_.size()) {
        throw std::invalid_argument("relabel length mismatch");
    }
    return Dataset(features_, dims_, std::move(labels), num_classes(), class_names_);
}

namespace {

std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_cells(const std::string& line)
{
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        cells.push_back(trim(std::string_view(line).substr(start, comma - start)));
        if (comma == std::string::npos) {
            break;
        }
        start = comma + 1;
    }
    return cells;
}

bool parse_real(const std::string& cell, double& out)
{
    if (cell.empty()) {
        return false;
    }
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    if (*first == '+') {
        ++first;
    }
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

}  // namespace

Dataset read_csv(std::istream& in, const LabelColumn& label_column)
{
    std::vector<std::vector<std::string>> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) {
            continue;
        }
        lines.push_back(split_cells(line));
    }
    if (lines.empty()) {
        throw std::invalid_argument("CSV input is empty");
    }

    const std::size_t width = lines.front().size();
    bool has_header = false;
    for (const auto& cell : lines.front()) {
        double v = 0.0;
        if (!parse_real(cell, v)) {
            has_header = true;
        }
    }
    // A first line whose only non-numeric cell is the label is data, not a header.
    std::size_t label_idx = 0;
    if (const auto* name = std::get_if<std::string>(&label_column)) {
        const auto& first = lines.front();
        const auto it = std::find(first.begin(), first.end(), *name);
        if (it == first.end()) {
            throw std::invalid_argument("label column '" + *name + "' not found in header");
        }
        label_idx = static_cast<std::size_t>(it - first.begin());
        has_header = true;
    } else {
        label_idx = std::get<std::size_t>(label_column);
        if (label_idx >= width) {
            throw std::invalid_argument("label column index out of range");
        }
        if (has_header) {
            has_header = false;
            for (std::size_t j = 0; j < width; ++j) {
                double v = 0.0;
                if (j != label_idx && !parse_real(lines.front()[j], v)) {
                    has_header = true;
                }
            }
        }
    }
    if (width < 2) {
        throw std::invalid_argument("CSV needs a label column and at least one feature column");
    }

    const std::size_t first_data = has_header ? 1 : 0;
    if (lines.size() <= first_data) {
        throw std::invalid_argument("CSV contains no data rows");
    }

    std::vector<double> features;
    std::vector<ClassId> labels;
    std::vector<std::string> names;
    std::unordered_map<std::string, ClassId> ids;
    for (std::size_t r = first_data; r < lines.size(); ++r) {
        const auto& cells = lines[r];
        if (cells.size() != width) {
            throw std::invalid_argument("CSV line " + std::to_string(r + 1) + " has " +
                                        std::to_string(cells.size()) + " cells, expected " +
                                        std::to_string(width));
        }
        for (std::size_t j = 0; j < width; ++j) {
            if (j == label_idx) {
                continue;
            }
            double v = 0.0;
            if (!parse_real(cells[j], v) || !std::isfinite(v)) {
                throw std::invalid_argument("CSV line " + std::to_string(r + 1) + ", column " +
                                            std::to_string(j) + ": '" + cells[j] +
                                            "' is not a finite real");
            }
            features.push_back(v);
        }
        const auto& label = cells[label_idx];
        auto [it, inserted] = ids.try_emplace(label, static_cast<ClassId>(names.size()));
        if (inserted) {
            names.push_back(label);
        }
        labels.push_back(it->second);
    }
    if (names.size() < 2) {
        throw std::invalid_argument("dataset has a single class; at least two are required");
    }
    const std::size_t m = names.size();
    return Dataset(std::move(features), width - 1, std::move(labels), m, std::move(names));
}

Dataset load_csv(const std::filesystem::path& path, const LabelColumn& label_column)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open '" + path.string() + "'");
    }
    return read_csv(in, label_column);
}

void write_csv(std::ostream& out, const Dataset& ds)
{
    for (std::size_t j = 0; j < ds.dims(); ++j) {
        out << 'x' << j << ',';
    }
    out << "label\n";
    char buf[32];
    for (std::size_t i = 0; i < ds.rows(); ++i) {
        for (double v : ds.row(i)) {
            auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
            out.write(buf, ptr - buf);
            out << ',';
        }
        out << ds.class_names()[ds.label(i)] << '\n';
    }
}

std::vector<std::size_t> class_counts(const Dataset& ds)
{
    std::vector<std::size_t> counts;
    counts.reserve(ds.num_classes());
    for (const auto& rows : ds.class_index()) {
        counts.push_back(rows.size());
    }
    return counts;
}

ClassId minority_class(const Dataset& ds)
{
    const auto counts = class_counts(ds);
    return static_cast<ClassId>(std::min_element(counts.begin(), counts.end()) - counts.begin());
}

ClassId majority_class(const Dataset& ds)
{
    const auto counts = class_counts(ds);
    return static_cast<ClassId>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

std::vector<std::size_t> FoldPlan::test_rows(std::size_t fold) const
{
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < assignments.size(); ++i) {
        if (assignments[i] == fold) {
            rows.push_back(i);
        }
    }
    return rows;
}

std::vector<std::size_t> FoldPlan::train_rows(std::size_t fold) const
{
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < assignments.size(); ++i) {
        if (assignments[i] != fold) {
            rows.push_back(i);
        }
    }
    return rows;
}

namespace {

void shuffle(std::vector<std::size_t>& v, Rng& rng)
{
    for (std::size_t i = v.size(); i > 1; --i) {
        std::swap(v[i - 1], v[rng.index(i)]);
    }
}

}  // namespace

FoldPlan stratified_k_fold(const Dataset& ds, std::size_t k, std::uint64_t seed)
{
    if (k < 2) {
        throw std::invalid_argument("stratified_k_fold needs k >= 2");
    }
    for (std::size_t c = 0; c < ds.num_classes(); ++c) {
        if (ds.class_rows(static_cast<ClassId>(c)).size() < k) {
            throw std::invalid_argument("class '" + ds.class_names()[c] + "' has fewer than " +
                                        std::to_string(k) + " rows");
        }
    }
    FoldPlan plan{k, std::vector<std::size_t>(ds.rows(), 0)};
    const Rng root(seed);
    // The dealing position carries over between classes so fold totals stay
    // balanced too; within a class the round-robin keeps sizes within one.
    std::size_t next = 0;
    for (std::size_t c = 0; c < ds.num_classes(); ++c) {
        auto rows = ds.class_rows(static_cast<ClassId>(c));
        Rng rng = root.derive({c});
        shuffle(rows, rng);
        for (std::size_t r : rows) {
            plan.assignments[r] = next % k;
            ++next;
        }
    }
    return plan;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>>
stratified_holdout(const Dataset& ds, double fraction, std::uint64_t seed)
{
    if (!(fraction > 0.0 && fraction < 1.0)) {
        throw std::invalid_argument("holdout fraction must lie in (0, 1)");
    }
    std::vector<std::size_t> keep;
    std::vector<std::size_t> held;
    const Rng root(seed);
    for (std::size_t c = 0; c < ds.num_classes(); ++c) {
        auto rows = ds.class_rows(static_cast<ClassId>(c));
        Rng rng = root.derive({c});
        shuffle(rows, rng);
        std::size_t n_held = static_cast<std::size_t>(std::llround(fraction * rows.size()));
        if (rows.size() >= 2) {
            n_held = std::clamp<std::size_t>(n_held, 1, rows.size() - 1);
        } else {
            n_held = 0;
        }
        held.insert(held.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(n_held));
        keep.insert(keep.end(), rows.begin() + static_cast<std::ptrdiff_t>(n_held), rows.end());
    }
    std::sort(keep.begin(), keep.end());
    std::sort(held.begin(), held.end());
    return {std::move(keep), std::move(held)};
}

Dataset inject_flip_noise(const Dataset& ds, double ratio, std::uint64_t seed)
{
    if (ds.num_classes() != 2) {
        throw std::invalid_argument("flip noise is defined for binary datasets only");
    }
    if (!(ratio >= 0.0 && ratio <= 1.0)) {
        throw std::invalid_argument("flip noise ratio must lie in [0, 1]");
    }
    const ClassId minority = minority_class(ds);
    const ClassId majority = 1 - minority;
    const auto& min_rows = ds.class_rows(minority);
    const auto& maj_rows = ds.class_rows(majority);
    const auto n_flip = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(min_rows.size())));
    if (n_flip > maj_rows.size()) {
        throw std::invalid_argument("not enough majority rows to flip");
    }
    auto labels = ds.labels();
    const Rng root(seed);
    auto flip = [&](std::vector<std::size_t> rows, ClassId to, Rng rng) {
        // partial Fisher-Yates: the first n_flip positions are a uniform sample
        for (std::size_t i = 0; i < n_flip; ++i) {
            std::swap(rows[i], rows[i + rng.index(rows.size() - i)]);
            labels[rows[i]] = to;
        }
    };
    flip(min_rows, majority, root.derive({0}));
    flip(maj_rows, minority, root.derive({1}));
    return ds.relabeled(std::move(labels));
}

Dataset make_gaussian_1d(std::size_t n_min, std::size_t n_maj, double mu_min, double mu_maj,
                         double sigma, std::uint64_t seed)
{
    if (!(sigma > 0.0)) {
        throw std::invalid_argument("sigma must be positive");
    }
    if (n_min == 0 || n_maj == 0) {
        throw std::invalid_argument("both classes need at least one sample");
    }
    Rng rng(seed);
    std::vector<double> xs;
    std::vector<ClassId> ys;
    xs.reserve(n_min + n_maj);
    ys.reserve(n_min + n_maj);
    for (std::size_t i = 0; i < n_maj; ++i) {
        xs.push_back(rng.normal(mu_maj, sigma));
        ys.push_back(0);
    }
    for (std::size_t i = 0; i < n_min; ++i) {
        xs.push_back(rng.normal(mu_min, sigma));
        ys.push_back(1);
    }
    return Dataset(std::move(xs), 1, std::move(ys), 2, {"negative", "positive"});
}

double overlap_separation(Overlap level) noexcept
{
    switch (level) {
    case Overlap::Low: return 4.0;
    case Overlap::Mid: return 2.5;
    case Overlap::High: return 1.5;
    }
    return 2.5;
}

Dataset make_overlap_2d(std::size_t n_min, std::size_t n_maj, Overlap level, std::uint64_t seed)
{
    if (n_min == 0 || n_maj == 0) {
        throw std::invalid_argument("both classes need at least one sample");
    }
    const double s = overlap_separation(level);
    Rng rng(seed);
    std::vector<double> xs;
    std::vector<ClassId> ys;
    xs.reserve(2 * (n_min + n_maj));
    ys.reserve(n_min + n_maj);
    auto draw = [&](std::size_t n, double cx, ClassId label) {
        for (std::size_t i = 0; i < n; ++i) {
            const double cy = rng.index(2) == 0 ? 0.0 : 2.0 * s;
            xs.push_back(cx + rng.normal());
            xs.push_back(cy + rng.normal());
            ys.push_back(label);
        }
    };
    draw(n_maj, 0.0, 0);
    draw(n_min, s, 1);
    return Dataset(std::move(xs), 2, std::move(ys), 2, {"majority", "minority"});
}

}  // namespace dube
