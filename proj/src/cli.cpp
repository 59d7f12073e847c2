#include "oswald/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "oswald/green.hpp"
#include "oswald/oracle.hpp"
#include "oswald/profile.hpp"
#include "oswald/rayleigh.hpp"
#include "oswald/semigroup.hpp"
#include "oswald/spectrum.hpp"

namespace oswald {

namespace {

using nlohmann::json;

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

Cplx parse_complex(const std::string& s) {
    double re = 0, im = 0;
    if (std::sscanf(s.c_str(), "%lf,%lf", &re, &im) < 1 &&
        std::sscanf(s.c_str(), "%lf+%lfi", &re, &im) < 1)
        throw ParameterError("cannot parse complex value: " + s);
    return {re, im};
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
    return out;
}

void apply_config_file(Config& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParameterError("cannot open config file: " + path);
    json j;
    in >> j;
    if (j.contains("eps0")) cfg.eps0 = j["eps0"];
    if (j.contains("iter_gate")) cfg.iter_gate = j["iter_gate"];
    if (j.contains("fast_gate")) cfg.fast_gate = j["fast_gate"];
    if (j.contains("ode_rtol")) cfg.ode_rtol = j["ode_rtol"];
    if (j.contains("ode_atol")) cfg.ode_atol = j["ode_atol"];
    if (j.contains("quad_abstol")) cfg.quad_abstol = j["quad_abstol"];
    if (j.contains("theta0_contour")) cfg.theta0_contour = j["theta0_contour"];
    if (j.contains("tau_margin")) cfg.tau_margin = j["tau_margin"];
    for (auto& kv : j.items())
        if (kv.key().rfind("_", 0) == 0)
            throw ParameterError("unknown config key: " + kv.key());
    if (cfg.eps0 <= 0 || cfg.ode_rtol <= 0 || cfg.quad_abstol <= 0)
        throw ParameterError("config tolerances must be positive");
}

std::ostream& open_out(std::ofstream& file, const std::string& path) {
    if (path.empty() || path == "-") return std::cout;
    file.open(path);
    if (!file) throw ParameterError("cannot open output file: " + path);
    return file;
}

ScalarField omega_from_file(const std::string& path) {
    if (path.empty()) {
        return ScalarField{[](double z) { return Cplx((1.0 + z) * std::exp(-z / 4.0), 0.0); },
                           nullptr, nullptr};
    }
    std::ifstream in(path);
    if (!in) throw ParameterError("cannot open omega file: " + path);
    json j;
    in >> j;
    std::vector<double> z = j.at("z").get<std::vector<double>>();
    std::vector<double> re = j.at("re").get<std::vector<double>>();
    std::vector<double> im = j.value("im", std::vector<double>(z.size(), 0.0));
    std::vector<Cplx> v(z.size());
    for (size_t i = 0; i < z.size(); ++i) v[i] = Cplx(re[i], im[i]);
    auto spl = std::make_shared<CubicSpline<Cplx>>(std::move(z), std::move(v));
    return ScalarField{[spl](double zz) { return spl->eval(zz); },
                       [spl](double zz) { return spl->deriv(zz); },
                       [spl](double zz) { return spl->deriv2(zz); }};
}

json record_json(const EigenRecord& r) {
    return json{{"alpha", r.alpha},
                {"c", {r.c.real(), r.c.imag()}},
                {"lambda", {r.lambda.real(), r.lambda.imag()}},
                {"residual", r.residual},
                {"winding", r.winding},
                {"bc_value", r.bc_value},
                {"bc_slope", r.bc_slope}};
}

int run_checked(int argc, char** argv) {
    CLI::App app{"oswald: Orr-Sommerfeld Green kernels, Evans functions, and "
                 "linearized Navier-Stokes semigroups on a boundary layer"};
    app.require_subcommand(1);

    std::string profile_arg = "exp", config_path, out_path;
    app.add_option("--profile", profile_arg, "built-in name or profile spec JSON");
    app.add_option("--config", config_path, "config JSON override");
    app.add_option("--out", out_path, "output path (default stdout)");

    double alpha = 1.0, reynolds = 1e4;

    auto* eig = app.add_subcommand("eig-find", "Evans-function root search in c");
    std::string box_arg = "-1,1,0.02,0.6";
    eig->add_option("--alpha", alpha)->required();
    eig->add_option("--reynolds", reynolds)->required();
    eig->add_option("--box", box_arg, "re0,re1,im0,im1");

    auto* emap = app.add_subcommand("evans-map", "grid of D(alpha, c) values");
    int nre = 41, nim = 21;
    emap->add_option("--alpha", alpha)->required();
    emap->add_option("--reynolds", reynolds)->required();
    emap->add_option("--box", box_arg, "re0,re1,im0,im1");
    emap->add_option("--nre", nre);
    emap->add_option("--nim", nim);

    auto* cont = app.add_subcommand("continue-nu", "viscous continuation of an inviscid root");
    std::string c0_arg = "0.4,0.1", nus_arg;
    double nu0 = 1e-3, nu1 = 1e-5;
    int nnu = 9;
    cont->add_option("--alpha", alpha)->required();
    cont->add_option("--c0", c0_arg, "inviscid root re,im")->required();
    cont->add_option("--nus", nus_arg, "explicit decreasing list nu1,nu2,...");
    cont->add_option("--nu0", nu0);
    cont->add_option("--nu1", nu1);
    cont->add_option("--n", nnu);

    auto* gsl = app.add_subcommand("green-slice", "CSV slice of the OS Green kernel");
    std::string c_arg = "2,0";
    double x_slice = 1.0;
    int nz = 200;
    gsl->add_option("--alpha", alpha)->required();
    gsl->add_option("--c", c_arg, "re,im")->required();
    gsl->add_option("--reynolds", reynolds)->required();
    gsl->add_option("--x", x_slice);
    gsl->add_option("--nz", nz);

    auto* sgn = app.add_subcommand("semigroup-norm", "weighted norms of e^{L_a t} omega");
    double t0 = 0.5, t1 = 10.0, eta = 0.125, lambda0 = -1e300;
    int nt = 8;
    std::string omega_path, snapshots_path;
    sgn->add_option("--alpha", alpha)->required();
    sgn->add_option("--reynolds", reynolds)->required();
    sgn->add_option("--t0", t0);
    sgn->add_option("--t1", t1);
    sgn->add_option("--nt", nt);
    sgn->add_option("--eta", eta);
    sgn->add_option("--omega", omega_path, "JSON {z:[],re:[],im:[]}");
    sgn->add_option("--snapshots", snapshots_path, "write omega(t,z) snapshots JSON");
    sgn->add_option("--lambda0", lambda0, "known Re lambda_alpha (skips the eigensearch)");

    auto* orc = app.add_subcommand("oracle-check", "collocation cross-checks");
    int Ncheb = 256;
    std::string orc_box;
    orc->add_option("--alpha", alpha)->required();
    orc->add_option("--reynolds", reynolds)->required();
    orc->add_option("--n", Ncheb);
    orc->add_option("--box", orc_box, "also run eig-find on this box and compare");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    Config cfg;
    if (!config_path.empty()) apply_config_file(cfg, config_path);
    Profile prof = load_profile(profile_arg);
    std::ofstream file;
    std::ostream& os = open_out(file, out_path);

    if (*eig) {
        auto b = parse_list(box_arg);
        if (b.size() != 4) throw ParameterError("--box needs re0,re1,im0,im1");
        FindResult fr = find_eigenvalues(prof, alpha, reynolds,
                                         ComplexBox{b[0], b[1], b[2], b[3]}, cfg);
        json out = json::array();
        for (auto& r : fr.records) out.push_back(record_json(r));
        os << out.dump(2) << "\n";
        for (auto& w : fr.warnings) std::cerr << "{\"warning\":\"" << w << "\"}\n";
    } else if (*emap) {
        auto b = parse_list(box_arg);
        if (b.size() != 4) throw ParameterError("--box needs re0,re1,im0,im1");
        os << "re_c,im_c,re_d,im_d,abs_d\n";
        for (int i = 0; i < nre; ++i)
            for (int j = 0; j < nim; ++j) {
                double cr = b[0] + (b[1] - b[0]) * (nre == 1 ? 0.5 : double(i) / (nre - 1));
                double ci = b[2] + (b[3] - b[2]) * (nim == 1 ? 0.5 : double(j) / (nim - 1));
                Cplx d = evans_at(prof, alpha, Cplx(cr, ci), reynolds, cfg);
                os << num(cr) << "," << num(ci) << "," << num(d.real()) << ","
                   << num(d.imag()) << "," << num(std::abs(d)) << "\n";
            }
    } else if (*cont) {
        std::vector<double> nus;
        if (!nus_arg.empty()) {
            nus = parse_list(nus_arg);
        } else {
            for (int i = 0; i < nnu; ++i)
                nus.push_back(nu0 * std::pow(nu1 / nu0, double(i) / (nnu - 1)));
        }
        auto path = continue_from_inviscid(prof, alpha, parse_complex(c0_arg), nus, cfg);
        json out = json::array();
        for (auto& [nu, c] : path)
            out.push_back(json{{"nu", nu}, {"c", {c.real(), c.imag()}}});
        os << out.dump(2) << "\n";
    } else if (*gsl) {
        GreenKernel K = halfline_green(prof, alpha, parse_complex(c_arg), reynolds, cfg);
        os << "x,z,re_g,im_g,re_dzg,im_dzg\n";
        for (int i = 0; i < nz; ++i) {
            double z = prof.z_max * (i + 0.5) / nz;
            Cplx g = K.eval(x_slice, z, 0, 0);
            Cplx dg = K.eval(x_slice, z, 0, 1);
            os << num(x_slice) << "," << num(z) << "," << num(g.real()) << ","
               << num(g.imag()) << "," << num(dg.real()) << "," << num(dg.imag()) << "\n";
        }
    } else if (*sgn) {
        ScalarField om = omega_from_file(omega_path);
        SemigroupOptions opt;
        opt.theta0 = cfg.theta0_contour;
        opt.tau = cfg.tau_margin;
        if (lambda0 > -1e299) opt.lambda0_real = lambda0;
        SemigroupEvaluator ev(prof, alpha, reynolds, opt, cfg);
        ev.prepare(std::max(t0, 1e-4));
        os << "t,norm_eta,fitted_rate\n";
        json snaps = json::array();
        std::vector<double> ts, logs;
        for (int i = 0; i < nt; ++i) {
            double t = (nt == 1) ? t0 : t0 + (t1 - t0) * i / (nt - 1);
            EvolutionResult r = ev.evolve(t, om, eta);
            ts.push_back(t);
            logs.push_back(std::log(std::max(r.norm_eta, 1e-300)));
            double rate = 0.0;
            if (ts.size() >= 2) {
                double n = ts.size(), st = 0, sl = 0, stt = 0, stl = 0;
                for (size_t k = 0; k < ts.size(); ++k) {
                    st += ts[k];
                    sl += logs[k];
                    stt += ts[k] * ts[k];
                    stl += ts[k] * logs[k];
                }
                rate = (n * stl - st * sl) / (n * stt - st * st);
            }
            os << num(t) << "," << num(r.norm_eta) << "," << num(rate) << "\n";
            if (!snapshots_path.empty()) {
                json snap{{"t", t}};
                json zs = json::array(), re = json::array(), im = json::array();
                for (size_t k = 0; k < r.grid->size(); ++k) {
                    zs.push_back((*r.grid)[k]);
                    re.push_back(r.omega[k].real());
                    im.push_back(r.omega[k].imag());
                }
                snap["z"] = zs;
                snap["re"] = re;
                snap["im"] = im;
                snaps.push_back(snap);
            }
        }
        if (!snapshots_path.empty()) {
            std::ofstream sf(snapshots_path);
            sf << snaps.dump() << "\n";
        }
    } else if (*orc) {
        auto eigs = collocation_eigs(prof, alpha, reynolds, Ncheb);
        json out;
        json ce = json::array();
        for (Cplx c : eigs) ce.push_back({c.real(), c.imag()});
        out["collocation"] = ce;
        if (!orc_box.empty()) {
            auto b = parse_list(orc_box);
            FindResult fr = find_eigenvalues(prof, alpha, reynolds,
                                             ComplexBox{b[0], b[1], b[2], b[3]}, cfg);
            json ev = json::array();
            double worst = 0.0;
            for (auto& r : fr.records) {
                ev.push_back(record_json(r));
                double best = 1e300;
                for (Cplx c : eigs) best = std::min(best, std::abs(c - r.c));
                worst = std::max(worst, best);
            }
            out["evans"] = ev;
            out["max_mismatch"] = worst;
        }
        os << out.dump(2) << "\n";
    }
    return 0;
}

}  // namespace

int run(int argc, char** argv) {
    try {
        return run_checked(argc, argv);
    } catch (const ParameterError& e) {
        std::cerr << json{{"error", e.kind()}, {"message", e.what()}}.dump() << "\n";
        return 2;
    } catch (const NumericalGateError& e) {
        std::cerr << json{{"error", e.kind()},
                          {"message", e.what()},
                          {"detail", json::parse(e.detail_json())}}
                         .dump()
                  << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << json{{"error", "internal"}, {"message", e.what()}}.dump() << "\n";
        return 2;
    }
}

}  // namespace oswald
