#include "levycalc/quadrature.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <numbers>

namespace levycalc {

void QuadratureConfig::validate() const {
    if (nodes < 8) throw InvalidArgument("QuadratureConfig.nodes must be at least 8");
    if (!(truncationU > 0.0)) throw InvalidArgument("QuadratureConfig.truncationU must be positive");
    if (!(relTol > 0.0)) throw InvalidArgument("QuadratureConfig.relTol must be positive");
    if (!(absTol >= 0.0)) throw InvalidArgument("QuadratureConfig.absTol must be nonnegative");
}

GaussLegendreRule::GaussLegendreRule(int n) : x_(static_cast<std::size_t>(n)), w_(static_cast<std::size_t>(n)) {
    // Newton iteration on P_n from the Tricomi initial guesses.
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 1; j <= n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) <= 1e-16) break;
        }
        const double w = 2.0 / ((1.0 - z * z) * pp * pp);
        x_[static_cast<std::size_t>(i)] = -z;
        x_[static_cast<std::size_t>(n - 1 - i)] = z;
        w_[static_cast<std::size_t>(i)] = w;
        w_[static_cast<std::size_t>(n - 1 - i)] = w;
    }
}

const GaussLegendreRule& GaussLegendreRule::get(int n) {
    if (n < 1) throw InvalidArgument("Gauss-Legendre rule needs at least one node");
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<GaussLegendreRule>> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto& slot = cache[n];
    if (!slot) slot.reset(new GaussLegendreRule(n));
    return *slot;
}

}  // namespace levycalc
