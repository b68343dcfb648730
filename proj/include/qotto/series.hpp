// series.hpp: truncated bivariate power series with the reciprocal square
// root needed to extract transition probabilities from their closed-form
// generating function. Coefficients are kept in extended precision.

#pragma once

#include <cstddef>
#include <vector>

namespace qotto::series {

// Dense series sum_{i,j <= order} c[i][j] u^i v^j, row-major storage.
class BivariateSeries {
public:
    BivariateSeries() = default;
    explicit BivariateSeries(std::size_t order) : order_(order), c_((order + 1) * (order + 1), 0.0L) {}

    std::size_t order() const noexcept { return order_; }

    long double& at(std::size_t i, std::size_t j) { return c_[i * (order_ + 1) + j]; }
    long double at(std::size_t i, std::size_t j) const { return c_[i * (order_ + 1) + j]; }

    // Copy of this series truncated (or zero-extended) to a new order.
    BivariateSeries truncated(std::size_t order) const;

    const std::vector<long double>& coefficients() const noexcept { return c_; }

private:
    std::size_t order_ = 0;
    std::vector<long double> c_;
};

// Truncated product. When even_parity is set both operands are assumed to
// contain only monomials with even i+j, which skips three quarters of the
// work; the result then has the same structure.
BivariateSeries multiply(const BivariateSeries& a, const BivariateSeries& b,
                         std::size_t order, bool even_parity);

// r^{-1/2} of a series with r(0,0) > 0, to the given rectangular truncation.
// Newton iteration y <- y(3 - r y^2)/2 on a doubling truncation ramp; two
// iterations per doubling keep the whole rectangle exact in the (u,v)-adic
// sense.
BivariateSeries rsqrt(const BivariateSeries& r, std::size_t order, bool even_parity);

}  // namespace qotto::series
