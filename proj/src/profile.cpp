#include "oswald/profile.hpp"

#include <cmath>
#include <fstream>
#include <memory>

#include <json.hpp>

namespace oswald {

double Profile::deriv(int k, double z) const {
    switch (k) {
        case 0: return u(z);
        case 1: return du(z);
        case 2: return ddu(z);
        default:
            if (k <= 6 && hi_deriv) return hi_deriv(k, z);
            return 0.0;
    }
}

std::pair<double, double> Profile::range() const {
    double lo = u_plus, hi = u_plus;
    const int n = 2048;
    for (int i = 0; i <= n; ++i) {
        double v = u(z_max * i / n);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return {lo, hi};
}

ProfileTriple eval_profile(const Profile& p, double z) {
    if (z < 0.0) throw ParameterError("eval_profile: z must be nonnegative");
    return {p.u(z), p.du(z), p.ddu(z)};
}

double range_distance(const Profile& p, Cplx c) {
    auto [lo, hi] = p.range();
    // Profiles here have connected real range, so project onto [lo, hi].
    double re = std::clamp(c.real(), lo, hi);
    return std::abs(c - Cplx(re, 0.0));
}

bool admissible(const Profile& p, double alpha, Cplx c, double eps0) {
    if (alpha <= 0.0) throw ParameterError("admissible: alpha must be positive");
    return range_distance(p, c) >= eps0 / (1.0 + alpha);
}

// ---------------------------------------------------------------------------
// Built-ins
// ---------------------------------------------------------------------------

Profile make_exp_profile(double u_plus) {
    Profile p;
    p.name = "exp";
    p.u_plus = u_plus;
    p.eta0 = 1.0;
    p.z_max = default_z_max(p.eta0);
    p.u = [u_plus](double z) { return u_plus * (1.0 - std::exp(-z)); };
    p.du = [u_plus](double z) { return u_plus * std::exp(-z); };
    p.ddu = [u_plus](double z) { return -u_plus * std::exp(-z); };
    p.hi_deriv = [u_plus](int k, double z) {
        double s = (k % 2 == 0) ? -1.0 : 1.0;
        return s * u_plus * std::exp(-z);
    };
    return p;
}

namespace {

// d^k/dx^k tanh(x) as a polynomial in T = tanh(x): P_1 = 1 - T^2,
// P_{k+1} = P_k'(T) (1 - T^2).
double tanh_deriv(int k, double x) {
    if (k == 0) return std::tanh(x);
    static const auto polys = [] {
        std::vector<std::vector<double>> ps;
        ps.push_back({1.0, 0.0, -1.0});  // 1 - T^2, coeffs by power of T
        for (int n = 1; n < 8; ++n) {
            const auto& p = ps.back();
            std::vector<double> dp(p.size() - 1, 0.0);
            for (size_t j = 1; j < p.size(); ++j) dp[j - 1] = p[j] * static_cast<double>(j);
            std::vector<double> q(dp.size() + 2, 0.0);
            for (size_t j = 0; j < dp.size(); ++j) {
                q[j] += dp[j];
                q[j + 2] -= dp[j];
            }
            ps.push_back(std::move(q));
        }
        return ps;
    }();
    const auto& poly = polys.at(k - 1);  // coefficients by ascending power of T
    double T = std::tanh(x);
    double v = 0.0;
    for (size_t j = poly.size(); j-- > 0;) v = v * T + poly[j];
    return v;
}

}  // namespace

Profile make_tanh_profile() {
    Profile p;
    p.name = "tanh";
    p.u_plus = 1.0;
    p.eta0 = 2.0;
    p.z_max = default_z_max(p.eta0);
    p.u = [](double z) { return std::tanh(z); };
    p.du = [](double z) { double c = std::cosh(z); return 1.0 / (c * c); };
    p.ddu = [](double z) {
        double c = std::cosh(z);
        return -2.0 * std::tanh(z) / (c * c);
    };
    p.hi_deriv = [](int k, double z) { return tanh_deriv(k, z); };
    return p;
}

Profile make_zero_profile() {
    Profile p;
    p.name = "zero";
    p.u_plus = 0.0;
    p.eta0 = 1.0;
    p.z_max = 30.0;
    p.u = [](double) { return 0.0; };
    p.du = [](double) { return 0.0; };
    p.ddu = [](double) { return 0.0; };
    p.hi_deriv = [](int, double) { return 0.0; };
    return p;
}

Profile make_unstable_tanh_profile(double z0, double delta) {
    Profile p;
    p.name = "unstable-tanh";
    double t0 = std::tanh(z0 / delta);
    double norm = 1.0 + t0;
    p.u_plus = 1.0;
    p.eta0 = 2.0 / delta;
    p.z_max = default_z_max(p.eta0);
    p.u = [=](double z) { return (std::tanh((z - z0) / delta) + t0) / norm; };
    p.du = [=](double z) {
        double c = std::cosh((z - z0) / delta);
        return 1.0 / (c * c * delta * norm);
    };
    p.ddu = [=](double z) {
        double x = (z - z0) / delta;
        double c = std::cosh(x);
        return -2.0 * std::tanh(x) / (c * c * delta * delta * norm);
    };
    p.hi_deriv = [=](int k, double z) {
        return tanh_deriv(k, (z - z0) / delta) / (std::pow(delta, k) * norm);
    };
    return p;
}

Profile make_table_profile(const std::string& name, std::vector<double> z,
                           std::vector<double> u, double u_plus, double eta0) {
    if (z.size() < 4 || z.size() != u.size())
        throw ParameterError("table profile needs >= 4 (z, U) samples");
    auto spl = std::make_shared<CubicSpline<double>>(std::move(z), std::move(u));
    // Spline of U'' smooths the third/fourth derivatives a little.
    const auto& knots = spl->knots();
    std::vector<double> d2(knots.size());
    for (size_t i = 0; i < knots.size(); ++i) d2[i] = spl->deriv2(knots[i]);
    auto spl2 = std::make_shared<CubicSpline<double>>(knots, std::move(d2));
    Profile p;
    p.name = name;
    p.u_plus = u_plus;
    p.eta0 = eta0;
    p.z_max = std::min(default_z_max(eta0), spl->knots().back());
    p.u = [spl](double zz) { return spl->eval(zz); };
    p.du = [spl](double zz) { return spl->deriv(zz); };
    p.ddu = [spl](double zz) { return spl->deriv2(zz); };
    p.hi_deriv = [spl2](int k, double zz) {
        switch (k) {
            case 3: return spl2->deriv(zz);
            case 4: return spl2->deriv2(zz);
            default: return 0.0;
        }
    };
    return p;
}

Profile make_constant_profile(double u_plus) {
    Profile p;
    p.name = "constant";
    p.u_plus = u_plus;
    p.eta0 = 1.0;
    p.z_max = 30.0;
    p.u = [u_plus](double) { return u_plus; };
    p.du = [](double) { return 0.0; };
    p.ddu = [](double) { return 0.0; };
    p.hi_deriv = [](int, double) { return 0.0; };
    return p;
}

Profile load_profile(const std::string& file_or_name) {
    if (file_or_name == "exp" || file_or_name == "exponential") return make_exp_profile();
    if (file_or_name == "tanh") return make_tanh_profile();
    if (file_or_name == "zero") return make_zero_profile();
    if (file_or_name == "unstable-tanh") return make_unstable_tanh_profile();

    std::ifstream in(file_or_name);
    if (!in) throw ParameterError("cannot open profile spec: " + file_or_name);
    nlohmann::json j;
    in >> j;
    std::string kind = j.value("kind", "exp");
    Profile p;
    if (kind == "exp") {
        p = make_exp_profile(j.value("u_plus", 1.0));
    } else if (kind == "tanh") {
        p = make_tanh_profile();
    } else if (kind == "zero") {
        p = make_zero_profile();
    } else if (kind == "unstable-tanh") {
        p = make_unstable_tanh_profile(j.value("z0", 1.8), j.value("delta", 0.6));
    } else if (kind == "table") {
        std::vector<double> z, u;
        for (const auto& row : j.at("table")) {
            z.push_back(row.at(0).get<double>());
            u.push_back(row.at(1).get<double>());
        }
        p = make_table_profile(j.value("name", "table"), std::move(z), std::move(u),
                               j.value("u_plus", 1.0), j.value("eta0", 1.0));
    } else {
        throw ParameterError("unknown profile kind: " + kind);
    }
    if (j.contains("name")) p.name = j["name"].get<std::string>();
    if (j.contains("eta0")) p.eta0 = j["eta0"].get<double>();
    if (j.contains("z_max")) p.z_max = j["z_max"].get<double>();
    return p;
}

}  // namespace oswald
