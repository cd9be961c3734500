#pragma once

#include <vector>

namespace kdiff {

/// Momentum moments <p^k>, k = 1..4, at one kick count.
struct MomentRecord {
    double m1 = 0.0;
    double m2 = 0.0;
    double m3 = 0.0;
    double m4 = 0.0;

    double operator[](int k) const {
        switch (k) {
        case 1: return m1;
        case 2: return m2;
        case 3: return m3;
        default: return m4;
        }
    }
};

/// Per-kick moment records, index 0..N. Monte Carlo series carry batch-means
/// standard errors; exact series (quadrature oracle, master equation) have
/// se = 0 and batches = 0.
struct MomentSeries {
    std::vector<MomentRecord> mean;
    std::vector<MomentRecord> se;
    int batches = 0;

    int kicks() const { return static_cast<int>(mean.size()) - 1; }
};

} // namespace kdiff
