#include "qotto/series.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qotto::series {

BivariateSeries BivariateSeries::truncated(std::size_t order) const {
    BivariateSeries out(order);
    const std::size_t n = std::min(order, order_);
    for (std::size_t i = 0; i <= n; ++i) {
        for (std::size_t j = 0; j <= n; ++j) {
            out.at(i, j) = at(i, j);
        }
    }
    return out;
}

BivariateSeries multiply(const BivariateSeries& a, const BivariateSeries& b,
                         std::size_t order, bool even_parity) {
    BivariateSeries out(order);
    const std::size_t na = a.order();
    const std::size_t nb = b.order();
    for (std::size_t i = 0; i <= order; ++i) {
        const std::size_t plo = (i > nb) ? i - nb : 0;
        const std::size_t phi = std::min(i, na);
        for (std::size_t j = 0; j <= order; ++j) {
            if (even_parity && ((i + j) & 1u)) continue;
            const std::size_t qlo = (j > nb) ? j - nb : 0;
            const std::size_t qhi = std::min(j, na);
            long double acc = 0.0L;
            for (std::size_t p = plo; p <= phi; ++p) {
                std::size_t q = qlo;
                std::size_t step = 1;
                if (even_parity) {
                    if ((p + q) & 1u) ++q;
                    step = 2;
                }
                for (; q <= qhi; q += step) {
                    acc += a.at(p, q) * b.at(i - p, j - q);
                }
            }
            out.at(i, j) = acc;
        }
    }
    return out;
}

BivariateSeries rsqrt(const BivariateSeries& r, std::size_t order, bool even_parity) {
    const long double r00 = r.at(0, 0);
    if (!(r00 > 0.0L)) {
        throw std::invalid_argument("series::rsqrt: constant term must be positive");
    }

    BivariateSeries y(0);
    y.at(0, 0) = 1.0L / std::sqrt(r00);

    // Truncation ramp 2, 4, 8, ... , order. Lifting a solution that is exact
    // on the s-rectangle needs two Newton steps to be exact on the
    // 2s-rectangle (the first step leaves only total degrees > 2s+1 wrong).
    std::size_t trunc = 2;
    for (;;) {
        trunc = std::min(trunc, order);
        const BivariateSeries rt = r.truncated(trunc);
        const int steps = (trunc <= 4) ? 4 : 2;
        for (int it = 0; it < steps; ++it) {
            BivariateSeries y2 = multiply(y, y, trunc, even_parity);
            BivariateSeries ry2 = multiply(rt, y2, trunc, even_parity);
            // y <- y*(3 - ry2)/2
            BivariateSeries three_minus(trunc);
            for (std::size_t i = 0; i <= trunc; ++i) {
                for (std::size_t j = 0; j <= trunc; ++j) {
                    three_minus.at(i, j) = -ry2.at(i, j);
                }
            }
            three_minus.at(0, 0) += 3.0L;
            BivariateSeries next = multiply(y, three_minus, trunc, even_parity);
            for (std::size_t i = 0; i <= trunc; ++i) {
                for (std::size_t j = 0; j <= trunc; ++j) {
                    next.at(i, j) *= 0.5L;
                }
            }
            y = std::move(next);
        }
        if (trunc == order) break;
        trunc *= 2;
    }
    return y;
}

}  // namespace qotto::series
