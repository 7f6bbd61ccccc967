#pragma once

// Plain 64-bit restatements of the evaluation metrics, used to cross-check
// the library versions.

#include <algorithm>
#include <cstddef>
#include <utility>
#include <vector>

namespace oracle {

// Piecewise-linear recall(fppi) through the sorted points, zero before the
// first and flat after the last, integrated over [0, fppi_max].
inline double auc(std::vector<std::pair<double, double>> pts, double fppi_max) {
    std::sort(pts.begin(), pts.end());
    auto value = [&](double f) {
        if (f < pts.front().first) return 0.0;
        if (f >= pts.back().first) return pts.back().second;
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
            if (f >= pts[i].first && f <= pts[i + 1].first) {
                const double t = (f - pts[i].first) / (pts[i + 1].first - pts[i].first);
                return pts[i].second + t * (pts[i + 1].second - pts[i].second);
            }
        }
        return 0.0;
    };
    std::vector<double> knots{fppi_max};
    for (const auto& p : pts)
        if (p.first < fppi_max) knots.push_back(p.first);
    std::sort(knots.begin(), knots.end());
    double area = 0.0;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        const double a = knots[i], b = knots[i + 1];
        area += 0.5 * (value(a) + value(b)) * (b - a);
    }
    return area / fppi_max;
}

// (1/T) sum of precision at each true positive, scores descending.
inline double average_precision(std::vector<std::pair<double, bool>> labels, std::size_t truths) {
    std::stable_sort(labels.begin(), labels.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    double sum = 0.0;
    std::size_t tp = 0;
    for (std::size_t k = 0; k < labels.size(); ++k) {
        if (!labels[k].second) continue;
        ++tp;
        sum += static_cast<double>(tp) / static_cast<double>(k + 1);
    }
    return sum / static_cast<double>(truths);
}

inline double f1(std::size_t tp, std::size_t fp, std::size_t fn) {
    const double p = tp + fp ? double(tp) / double(tp + fp) : 0.0;
    const double r = tp + fn ? double(tp) / double(tp + fn) : 0.0;
    return p + r > 0 ? 2 * p * r / (p + r) : 0.0;
}

}  // namespace oracle
