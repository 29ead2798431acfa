// upscan: upgradeable smart contract analysis toolkit
// Copyright 2026 The upscan Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <upscan/errors.hpp>

#include <cmath>
#include <cstddef>
#include <vector>

namespace upscan {

struct RegressionFit
{
    std::vector<double> coefficients;  // intercept first, then one per predictor
    std::vector<double> residuals;
    double r_squared = 0.0;
    std::size_t n = 0;

    friend bool operator==(const RegressionFit&, const RegressionFit&) = default;
};

namespace regression_detail
{
// Gaussian elimination with partial pivoting in extended precision. The
// matrices here are tiny (at most 3x3), so clarity beats cleverness.
inline std::vector<long double> solve_linear(std::vector<std::vector<long double>> a,
    std::vector<long double> b)
{
    const std::size_t p = b.size();
    long double scale = 0;
    for (const auto& row : a)
        for (const long double v : row)
            scale = std::max(scale, std::fabs(v));
    const long double tiny = scale * 1e-13L;

    for (std::size_t col = 0; col < p; ++col)
    {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < p; ++r)
            if (std::fabs(a[r][col]) > std::fabs(a[pivot][col]))
                pivot = r;
        if (std::fabs(a[pivot][col]) <= tiny)
            throw DegenerateDesignError{"predictor matrix is rank deficient"};
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (std::size_t r = 0; r < p; ++r)
        {
            if (r == col)
                continue;
            const long double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < p; ++c)
                a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<long double> x(p);
    for (std::size_t i = 0; i < p; ++i)
        x[i] = b[i] / a[i][i];
    return x;
}
}  // namespace regression_detail

// Ordinary least squares with an implicit intercept: y ~ 1 + x[0] + x[1] + ...
// Each element of `x` is one observation's predictor row. Solved through the
// normal equations; rank deficiency (including too few observations) raises
// DegenerateDesignError. When the response has zero variance, r_squared is
// reported as 0 by convention.
inline RegressionFit fit_ols_matrix(const std::vector<std::vector<double>>& x,
    const std::vector<double>& y)
{
    const std::size_t n = y.size();
    if (x.size() != n)
        throw ValidationError{"predictor rows and response length differ"};
    const std::size_t k = n == 0 ? 0 : x[0].size();
    const std::size_t p = k + 1;
    if (n < p)
        throw DegenerateDesignError{"need at least " + std::to_string(p) + " observations, got " +
                                    std::to_string(n)};
    for (const auto& row : x)
        if (row.size() != k)
            throw ValidationError{"ragged predictor matrix"};

    // Normal equations: (X'X) beta = X'y with X = [1 | predictors].
    std::vector<std::vector<long double>> xtx(p, std::vector<long double>(p, 0));
    std::vector<long double> xty(p, 0);
    for (std::size_t i = 0; i < n; ++i)
    {
        std::vector<long double> row(p);
        row[0] = 1;
        for (std::size_t j = 0; j < k; ++j)
            row[j + 1] = x[i][j];
        for (std::size_t a = 0; a < p; ++a)
        {
            xty[a] += row[a] * y[i];
            for (std::size_t b = 0; b < p; ++b)
                xtx[a][b] += row[a] * row[b];
        }
    }
    const std::vector<long double> beta = regression_detail::solve_linear(xtx, xty);

    RegressionFit fit;
    fit.n = n;
    fit.coefficients.reserve(p);
    for (const long double b : beta)
        fit.coefficients.push_back(static_cast<double>(b));

    long double mean = 0;
    for (const double v : y)
        mean += v;
    mean /= static_cast<long double>(n);

    long double sse = 0;
    long double sst = 0;
    fit.residuals.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        long double predicted = beta[0];
        for (std::size_t j = 0; j < k; ++j)
            predicted += beta[j + 1] * x[i][j];
        const long double e = y[i] - predicted;
        fit.residuals.push_back(static_cast<double>(e));
        sse += e * e;
        sst += (y[i] - mean) * (y[i] - mean);
    }
    if (sst > 0)
    {
        long double r2 = 1.0L - sse / sst;
        if (r2 < 0)
            r2 = 0;
        if (r2 > 1)
            r2 = 1;
        fit.r_squared = static_cast<double>(r2);
    }
    return fit;
}

inline double predict(const RegressionFit& fit, const std::vector<double>& predictors)
{
    if (predictors.size() + 1 != fit.coefficients.size())
        throw ValidationError{"predictor count does not match the fitted model"};
    double out = fit.coefficients[0];
    for (std::size_t j = 0; j < predictors.size(); ++j)
        out += fit.coefficients[j + 1] * predictors[j];
    return out;
}

}  // namespace upscan
