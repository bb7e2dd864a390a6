#include "oracles.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_dec_float.hpp>

namespace oracle {

namespace {
constexpr double kSlack = 1e-12;
}

std::vector<std::size_t> bh(const std::vector<double>& p, double q) {
    const std::size_t m = p.size();
    std::size_t k = 0;
    for (std::size_t j = 1; j <= m; ++j) {
        const double t = static_cast<double>(j) * q / static_cast<double>(m) * (1.0 + kSlack);
        std::size_t below = 0;
        for (double v : p) below += v <= t ? 1 : 0;
        if (below >= j) k = j;
    }
    std::vector<std::size_t> out;
    if (k == 0) return out;
    const double t = static_cast<double>(k) * q / static_cast<double>(m) * (1.0 + kSlack);
    for (std::size_t i = 0; i < m; ++i) {
        if (p[i] <= t) out.push_back(i);
    }
    return out;
}

long double harmonic(std::size_t m) {
    long double s = 0.0L;
    for (std::size_t i = 1; i <= m; ++i) s += 1.0L / static_cast<long double>(i);
    return s;
}

std::vector<std::size_t> by(const std::vector<double>& p, double q) {
    return bh(p, static_cast<double>(q / harmonic(p.size())));
}

double chi_square_survival(double x, unsigned df) { return boost::math::gamma_q(df / 2.0, x / 2.0); }

double normal_survival_hp(double x) {
    using big = boost::multiprecision::cpp_dec_float_50;
    const big z = big(x) / boost::multiprecision::sqrt(big(2));
    return static_cast<double>(big(0.5) * boost::math::erfc(z));
}

double ks_uniform_statistic(std::vector<double> sample) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double lo = static_cast<double>(i) / n;
        const double hi = static_cast<double>(i + 1) / n;
        d = std::max({d, hi - sample[i], sample[i] - lo});
    }
    return d;
}

double ks_critical(std::size_t n, double alpha) {
    return std::sqrt(-0.5 * std::log(alpha / 2.0)) / std::sqrt(static_cast<double>(n));
}

}  // namespace oracle
