#include "icrt/stats.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/normal.hpp>

#include "icrt/error.hpp"

namespace icrt::stats {

Summary summarize(const std::vector<double>& v) {
    Summary s;
    s.n = v.size();
    if (v.empty()) return s;
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    s.mean = m;
    s.variance = v.size() > 1 ? ss / static_cast<double>(v.size() - 1) : 0.0;
    s.se = std::sqrt(s.variance / static_cast<double>(v.size()));
    return s;
}

double kolmogorov_pvalue(double d, double effective_n) {
    const double sn = std::sqrt(effective_n);
    const double lambda = (sn + 0.12 + 0.11 / sn) * d;
    if (lambda < 0.2) return 1.0;
    double sum = 0.0, sign = 1.0;
    for (int k = 1; k <= 200; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += sign * term;
        if (term < 1e-16) break;
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_one_sample(std::vector<double> data, const std::function<double(double)>& cdf) {
    if (data.empty()) throw InvalidInput("KS test needs data");
    std::sort(data.begin(), data.end());
    const double n = static_cast<double>(data.size());
    double d = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double f = cdf(data[i]);
        d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
    }
    return {d, kolmogorov_pvalue(d, n), data.size(), 0};
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw InvalidInput("KS test needs two nonempty samples");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == v) ++i;
        while (j < b.size() && b[j] == v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return {d, kolmogorov_pvalue(d, na * nb / (na + nb)), a.size(), b.size()};
}

NormalityResult shapiro_francia(std::vector<double> data) {
    const std::size_t n = data.size();
    if (n < 5 || n > 5000) throw InvalidInput("Shapiro-Francia needs 5 <= n <= 5000");
    std::sort(data.begin(), data.end());
    const boost::math::normal_distribution<double> z;
    std::vector<double> m(n);
    const double dn = static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i)
        m[i] = boost::math::quantile(z, (static_cast<double>(i + 1) - 0.375) / (dn + 0.25));
    double mx = 0.0;
    for (double x : data) mx += x;
    mx /= dn;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += m[i] * (data[i] - mx);
        sxx += m[i] * m[i];
        syy += (data[i] - mx) * (data[i] - mx);
    }
    NormalityResult r;
    r.n = n;
    if (!(syy > 0.0)) {
        r.statistic = 0.0;
        r.p_value = 0.0;
        return r;
    }
    r.statistic = sxy * sxy / (sxx * syy);
    const double u = std::log(dn);
    const double v = std::log(u);
    const double mu = -1.2725 + 1.0521 * (v - u);
    const double sigma = 1.0308 - 0.26758 * (v + 2.0 / u);
    const double zs = (std::log(1.0 - r.statistic) - mu) / sigma;
    r.p_value = boost::math::cdf(boost::math::complement(z, zs));
    return r;
}

double two_proportion_pvalue(std::size_t hits_a, std::size_t n_a, std::size_t hits_b, std::size_t n_b) {
    if (n_a == 0 || n_b == 0) throw InvalidInput("proportion test needs nonempty samples");
    const double pa = static_cast<double>(hits_a) / static_cast<double>(n_a);
    const double pb = static_cast<double>(hits_b) / static_cast<double>(n_b);
    const double p = static_cast<double>(hits_a + hits_b) / static_cast<double>(n_a + n_b);
    const double se = std::sqrt(p * (1.0 - p) * (1.0 / static_cast<double>(n_a) + 1.0 / static_cast<double>(n_b)));
    if (!(se > 0.0)) return pa == pb ? 1.0 : 0.0;
    const double zs = std::abs(pa - pb) / se;
    const boost::math::normal_distribution<double> z;
    return 2.0 * boost::math::cdf(boost::math::complement(z, zs));
}

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw InvalidInput("regression needs >= 2 points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw InvalidInput("regression needs distinct abscissae");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double rss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - f.intercept - f.slope * x[i];
        rss += r * r;
    }
    f.slope_se = x.size() > 2 ? std::sqrt(rss / (n - 2.0) / sxx) : 0.0;
    return f;
}

}  // namespace icrt::stats
