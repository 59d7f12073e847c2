#include "oswald/gridfun.hpp"

#include <algorithm>
#include <cmath>

namespace oswald {

std::shared_ptr<std::vector<double>> layer_grid(double z_max, double fast_scale,
                                                double h_max, double ratio) {
    auto g = std::make_shared<std::vector<double>>();
    double h0 = std::min(h_max, 0.06 / std::max(fast_scale, 1.0));
    h0 = std::max(h0, z_max * 1e-7);
    double z = 0.0, h = h0;
    g->push_back(0.0);
    while (z < z_max) {
        z = std::min(z + h, z_max);
        g->push_back(z);
        h = std::min(h * ratio, h_max);
    }
    if (g->size() > 8000) {  // keep grids within the desk-scale budget
        // thin uniformly, keeping endpoints
        std::vector<double> thin;
        size_t stride = g->size() / 4000 + 1;
        for (size_t i = 0; i < g->size(); i += stride) thin.push_back((*g)[i]);
        if (thin.back() != z_max) thin.push_back(z_max);
        *g = std::move(thin);
    }
    return g;
}

double weighted_sup(const std::vector<double>& grid, const std::vector<Cplx>& f,
                    double eta) {
    double m = 0.0;
    for (size_t i = 0; i < grid.size(); ++i)
        m = std::max(m, std::abs(f[i]) * std::exp(eta * grid[i]));
    return m;
}

}  // namespace oswald
