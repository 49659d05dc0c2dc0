#pragma once

// Classification metrics kept as exact fractions; percentages are derived
// only for reporting.

#include <cstdint>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace nal {

/// Non-negative rational with a zero-denominator state for undefined ratios.
struct Fraction {
    std::int64_t num = 0;
    std::int64_t den = 0;

    static Fraction of(std::int64_t n, std::int64_t d) {
        if (d == 0) return {0, 0};
        auto g = std::gcd(n, d);
        return {n / g, d / g};
    }

    bool defined() const noexcept { return den != 0; }
    double value() const noexcept { return den ? static_cast<double>(num) / static_cast<double>(den) : 0.0; }
    double percent() const noexcept { return 100.0 * value(); }

    friend bool operator==(const Fraction&, const Fraction&) = default;
};

struct BinaryCounts {
    std::int64_t tp = 0, fp = 0, fn = 0, tn = 0;
    std::int64_t unclassifiable = 0;  // already folded into fn/tn as rejections

    std::int64_t total() const noexcept { return tp + fp + fn + tn; }

    void add(bool actual, bool predicted) {
        if (actual) (predicted ? tp : fn)++;
        else (predicted ? fp : tn)++;
    }
};

struct BinaryMetrics {
    BinaryCounts counts;
    Fraction accuracy, precision, recall, f1;
};

/// F1 is computed as 2TP/(2TP+FP+FN), which equals the harmonic mean of
/// precision and recall whenever both are defined and non-zero.
inline BinaryMetrics binary_metrics(const BinaryCounts& c) {
    BinaryMetrics m;
    m.counts = c;
    m.accuracy = Fraction::of(c.tp + c.tn, c.total());
    m.precision = Fraction::of(c.tp, c.tp + c.fp);
    m.recall = Fraction::of(c.tp, c.tp + c.fn);
    m.f1 = Fraction::of(2 * c.tp, 2 * c.tp + c.fp + c.fn);
    return m;
}

inline nlohmann::json to_json(const Fraction& f) {
    return {{"percent", f.percent()}, {"num", f.num}, {"den", f.den}, {"defined", f.defined()}};
}

inline nlohmann::json to_json(const BinaryMetrics& m) {
    return {{"accuracy", to_json(m.accuracy)},
            {"precision", to_json(m.precision)},
            {"recall", to_json(m.recall)},
            {"f1", to_json(m.f1)},
            {"tp", m.counts.tp},
            {"fp", m.counts.fp},
            {"fn", m.counts.fn},
            {"tn", m.counts.tn},
            {"support", m.counts.total()},
            {"unclassifiable", m.counts.unclassifiable}};
}

inline std::string percent_cell(const Fraction& f) {
    std::ostringstream ss;
    ss << std::fixed << std::setprecision(1) << f.percent();
    if (!f.defined()) ss << '*';
    return ss.str();
}

/// Aligned text table with the columns Accuracy, Precision, Recall, F1.
/// Undefined ratios print as 0.0*.
inline std::string metrics_table(const std::vector<std::pair<std::string, BinaryMetrics>>& rows) {
    std::ostringstream ss;
    ss << std::left << std::setw(10) << "class" << std::right << std::setw(10) << "Accuracy" << std::setw(11)
       << "Precision" << std::setw(8) << "Recall" << std::setw(10) << "F1-Score" << std::setw(9) << "support"
       << "\n";
    for (const auto& [name, m] : rows) {
        ss << std::left << std::setw(10) << name << std::right << std::setw(10) << percent_cell(m.accuracy)
           << std::setw(11) << percent_cell(m.precision) << std::setw(8) << percent_cell(m.recall) << std::setw(10)
           << percent_cell(m.f1) << std::setw(9) << m.counts.total() << "\n";
    }
    return ss.str();
}

class ConfusionMatrix {
public:
    explicit ConfusionMatrix(std::vector<std::string> classes)
        : classes_(std::move(classes)), counts_(classes_.size(), std::vector<std::int64_t>(classes_.size(), 0)) {}

    const std::vector<std::string>& classes() const noexcept { return classes_; }

    std::size_t index(const std::string& cls) const {
        for (std::size_t i = 0; i < classes_.size(); ++i)
            if (classes_[i] == cls) return i;
        throw std::invalid_argument("unknown class '" + cls + "'");
    }

    void add(const std::string& actual, const std::string& predicted) { ++counts_[index(actual)][index(predicted)]; }

    std::int64_t at(const std::string& actual, const std::string& predicted) const {
        return counts_[index(actual)][index(predicted)];
    }
    std::int64_t at(std::size_t actual, std::size_t predicted) const { return counts_[actual][predicted]; }

    std::int64_t total() const {
        std::int64_t t = 0;
        for (const auto& row : counts_) t = std::accumulate(row.begin(), row.end(), t);
        return t;
    }

    /// One-vs-rest counts for a class.
    BinaryCounts one_vs_rest(std::size_t k) const {
        BinaryCounts c;
        for (std::size_t a = 0; a < classes_.size(); ++a)
            for (std::size_t p = 0; p < classes_.size(); ++p) {
                auto n = counts_[a][p];
                if (a == k && p == k) c.tp += n;
                else if (a == k) c.fn += n;
                else if (p == k) c.fp += n;
                else c.tn += n;
            }
        return c;
    }

    Fraction accuracy() const {
        std::int64_t diag = 0;
        for (std::size_t i = 0; i < classes_.size(); ++i) diag += counts_[i][i];
        return Fraction::of(diag, total());
    }

    std::string to_csv() const {
        std::string out = "actual\\predicted";
        for (const auto& c : classes_) out += "," + c;
        out += "\n";
        for (std::size_t a = 0; a < classes_.size(); ++a) {
            out += classes_[a];
            for (std::size_t p = 0; p < classes_.size(); ++p) out += "," + std::to_string(counts_[a][p]);
            out += "\n";
        }
        return out;
    }

    nlohmann::json to_json() const {
        return {{"classes", classes_}, {"counts", counts_}};
    }

private:
    std::vector<std::string> classes_;
    std::vector<std::vector<std::int64_t>> counts_;
};

/// Support-weighted averages of per-class precision, recall and F1 (recall
/// then equals accuracy).
struct MulticlassSummary {
    Fraction accuracy;
    double weighted_precision = 0, weighted_recall = 0, weighted_f1 = 0;
    double macro_f1 = 0;
};

inline MulticlassSummary summarize(const ConfusionMatrix& cm) {
    MulticlassSummary s;
    s.accuracy = cm.accuracy();
    const double total = static_cast<double>(cm.total());
    const double n = static_cast<double>(cm.classes().size());
    for (std::size_t k = 0; k < cm.classes().size(); ++k) {
        auto m = binary_metrics(cm.one_vs_rest(k));
        const double w = total > 0 ? static_cast<double>(m.counts.tp + m.counts.fn) / total : 0.0;
        s.weighted_precision += w * m.precision.percent();
        s.weighted_recall += w * m.recall.percent();
        s.weighted_f1 += w * m.f1.percent();
        s.macro_f1 += m.f1.percent() / n;
    }
    return s;
}

}  // namespace nal
