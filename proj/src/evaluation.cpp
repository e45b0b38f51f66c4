#include "noiselab/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace noiselab {

ConfusionCounts score(const DetectionResult& result, const InjectionLedger& ledger,
                      const Dataset& noisy_test) {
    for (auto id : result.flagged)
        if (!noisy_test.has_id(id))
            throw std::invalid_argument("flagged id not in evaluated dataset");
    for (const auto& f : ledger.flips)
        if (!noisy_test.has_id(f.id))
            throw std::invalid_argument("ledger id not in evaluated dataset");

    const std::string min_label = noisy_test.minority_label();

    ConfusionCounts c;
    for (const auto& f : ledger.flips) {
        // f.original_label is the pre-flip class of the instance.
        const bool minority_origin = f.original_label == min_label;
        if (result.flagged.count(f.id)) {
            ++c.tp;
            if (minority_origin) ++c.tp_minority;
            else ++c.tp_majority;
        } else {
            ++c.fn;
            if (minority_origin) ++c.fn_minority;
            else ++c.fn_majority;
        }
    }
    for (auto id : result.flagged)
        if (!ledger.is_flipped(id)) ++c.fp;
    return c;
}

std::pair<double, double> precision_recall(const ConfusionCounts& counts) {
    const double precision =
        counts.tp + counts.fp == 0
            ? 1.0
            : static_cast<double>(counts.tp) / static_cast<double>(counts.tp + counts.fp);
    const double recall =
        counts.tp + counts.fn == 0
            ? 1.0
            : static_cast<double>(counts.tp) / static_cast<double>(counts.tp + counts.fn);
    return {precision, recall};
}

double f_score(double precision, double recall, double beta) {
    if (precision < 0.0 || precision > 1.0 || recall < 0.0 || recall > 1.0)
        throw std::invalid_argument("precision and recall must lie in [0,1]");
    if (beta < 0.0) throw std::invalid_argument("beta must be nonnegative");
    const double b2 = beta * beta;
    const double denom = b2 * precision + recall;
    if (denom == 0.0) return 0.0;
    return (1.0 + b2) * precision * recall / denom;
}

std::string ConfigKey::str() const {
    std::ostringstream os;
    os << dataset << "/" << ir.str() << "/" << model.str() << "/p=" << p
       << "/t=" << threshold_t;
    return os.str();
}

namespace {

std::pair<double, double> mean_sd(std::vector<double> v) {
    // Summation in sorted order makes the result independent of the
    // repetition order; identical values get an exactly zero sd.
    std::sort(v.begin(), v.end());
    const double n = static_cast<double>(v.size());
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= n;
    if (v.size() < 2 || v.front() == v.back()) return {mean, 0.0};
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / (n - 1.0))};
}

}  // namespace

EvalReport aggregate(const ConfigKey& key, const std::vector<RepetitionScores>& scores) {
    if (scores.empty()) throw std::invalid_argument("cannot aggregate zero repetitions");

    EvalReport report;
    report.key = key;
    report.repetitions = scores;
    report.repetition_count = scores.size();

    std::vector<double> p, r, f;
    for (const auto& s : scores) {
        p.push_back(s.precision);
        r.push_back(s.recall);
        f.push_back(s.fscore);
    }
    std::tie(report.precision_mean, report.precision_sd) = mean_sd(p);
    std::tie(report.recall_mean, report.recall_sd) = mean_sd(r);
    std::tie(report.fscore_mean, report.fscore_sd) = mean_sd(f);
    return report;
}

void write_report_csv(const std::vector<EvalReport>& reports, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "dataset,ir,model,m,p,threshold_t,pool_size,repetitions,"
           "precision_mean,precision_sd,recall_mean,recall_sd,fscore_mean,fscore_sd\n";
    out << std::setprecision(17);
    for (const auto& r : reports) {
        out << r.key.dataset << "," << r.key.ir.str() << ","
            << (r.key.model.variant == NoiseVariant::Ncar ? "NCAR" : "NAR") << ","
            << r.key.model.m_numerator << ":" << r.key.model.m_denominator << "," << r.key.p
            << "," << r.key.threshold_t << "," << r.key.pool_size << "," << r.repetition_count
            << "," << r.precision_mean << "," << r.precision_sd << "," << r.recall_mean << ","
            << r.recall_sd << "," << r.fscore_mean << "," << r.fscore_sd << "\n";
    }
}

std::vector<EvalReport> read_report_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty report file: " + path);

    std::vector<EvalReport> reports;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != 14)
            throw std::runtime_error("malformed report row in " + path);

        EvalReport r;
        r.key.dataset = cells[0];
        r.key.ir = ImbalanceRatio::parse(cells[1]);
        auto colon = cells[3].find(':');
        const int num = std::stoi(cells[3].substr(0, colon));
        const int den = std::stoi(cells[3].substr(colon + 1));
        r.key.model = cells[2] == "NCAR" ? NoiseModel::ncar() : NoiseModel::nar(num, den);
        r.key.p = std::stod(cells[4]);
        r.key.threshold_t = std::stoi(cells[5]);
        r.key.pool_size = std::stoul(cells[6]);
        r.repetition_count = std::stoul(cells[7]);
        r.precision_mean = std::stod(cells[8]);
        r.precision_sd = std::stod(cells[9]);
        r.recall_mean = std::stod(cells[10]);
        r.recall_sd = std::stod(cells[11]);
        r.fscore_mean = std::stod(cells[12]);
        r.fscore_sd = std::stod(cells[13]);
        reports.push_back(std::move(r));
    }
    return reports;
}

}  // namespace noiselab
