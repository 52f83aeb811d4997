// Command-line front end: boundary/dataset generation, direct solves,
// training, evaluation and field reconstruction.  Every command is a pure
// function of (config, input files, seed); wall-clock timings go to stderr
// so the stdout/file outputs of a rerun are bit-identical.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "bie/assembly.hpp"
#include "bie/checkpoint.hpp"
#include "bie/datagen.hpp"
#include "bie/dataset_io.hpp"
#include "bie/errors.hpp"
#include "bie/fields.hpp"
#include "bie/image.hpp"
#include "bie/nn.hpp"
#include "bie/train.hpp"
#include "bie/trig.hpp"

using nlohmann::json;

namespace {

json load_json_file(const std::string& path) {
    std::ifstream f(path);
    bie::require(f.good(), bie::errc::io_error, "cannot open " + path);
    try {
        json j;
        f >> j;
        return j;
    } catch (const std::exception& e) {
        bie::fail(bie::errc::io_error,
                  "config parse failed (" + path + "): " + e.what());
    }
}

// --preset name resolves configs/<name>.json next to the working directory
// or the executable; a path with a slash is loaded as-is.
json load_preset(const std::string& name, const std::string& argv0) {
    namespace fs = std::filesystem;
    if (name.find('/') != std::string::npos) return load_json_file(name);
    std::vector<fs::path> roots = {fs::path("."), fs::path("..")};
    const fs::path exe = fs::path(argv0).parent_path();
    if (!exe.empty()) {
        roots.push_back(exe);
        roots.push_back(exe / "..");
    }
    for (const fs::path& r : roots) {
        const fs::path c = r / "configs" / (name + ".json");
        if (std::ifstream(c).good()) return load_json_file(c.string());
    }
    bie::fail(bie::errc::io_error, "preset not found: " + name);
}

// Flag > config file > built-in default.
class settings {
  public:
    explicit settings(json cfg) : cfg_(std::move(cfg)) {}

    template <class T>
    T pick(const CLI::Option* opt, const T& flag_value, const char* section,
           const char* key, const T& fallback) const {
        if (opt && opt->count() > 0) return flag_value;
        try {
            const json* node = &cfg_;
            if (section) {
                if (!cfg_.contains(section)) return fallback;
                node = &cfg_.at(section);
            }
            if (node->contains(key)) return node->at(key).get<T>();
        } catch (const std::exception& e) {
            bie::fail(bie::errc::invalid_argument,
                      std::string("config field ") + (section ? section : "") +
                          "." + key + ": " + e.what());
        }
        return fallback;
    }

    std::vector<std::size_t> pick_widths(const CLI::Option* opt,
                                         const std::string& flag_value,
                                         const char* key,
                                         std::vector<std::size_t> fallback) const;

    const json& raw() const { return cfg_; }

  private:
    json cfg_;
};

std::vector<double> parse_doubles(const std::string& s) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos < s.size()) {
        std::size_t next = s.find(',', pos);
        if (next == std::string::npos) next = s.size();
        const std::string tok = s.substr(pos, next - pos);
        try {
            if (!tok.empty()) out.push_back(std::stod(tok));
        } catch (const std::exception&) {
            bie::fail(bie::errc::invalid_argument,
                      "cannot parse number: " + tok);
        }
        pos = next + 1;
    }
    return out;
}

std::vector<std::size_t> parse_sizes(const std::string& s) {
    std::vector<std::size_t> out;
    for (double v : parse_doubles(s)) {
        bie::require(v >= 1.0, bie::errc::invalid_argument,
                     "widths must be positive integers");
        out.push_back(std::size_t(v));
    }
    return out;
}

std::vector<std::size_t> settings::pick_widths(
    const CLI::Option* opt, const std::string& flag_value, const char* key,
    std::vector<std::size_t> fallback) const {
    if (opt && opt->count() > 0) return parse_sizes(flag_value);
    if (cfg_.contains("train") && cfg_.at("train").contains(key)) {
        std::vector<std::size_t> v;
        for (const json& x : cfg_.at("train").at(key))
            v.push_back(x.get<std::size_t>());
        return v;
    }
    return fallback;
}

// Coefficient list "c0,a1..an,b1..bn"; padded with one zero if the length is
// even so short inputs like "0,1" (= cos t) stay convenient.
bie::coeff_vec parse_coeffs(const std::string& s) {
    bie::coeff_vec c = parse_doubles(s);
    bie::require(!c.empty(), bie::errc::invalid_argument,
                 "empty coefficient list");
    if (c.size() % 2 == 0) c.push_back(0.0);
    return c;
}

bie::boundary unit_circle() {
    bie::boundary b;
    b.x = {0.0, 1.0, 0.0};
    b.y = {0.0, 0.0, 1.0};
    return b;
}

void make_out_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    bie::require(!ec, bie::errc::io_error,
                 "cannot create output directory " + dir);
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double rel_l2(const std::vector<double>& got, const std::vector<double>& want) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < got.size(); ++i) {
        num += (got[i] - want[i]) * (got[i] - want[i]);
        den += want[i] * want[i];
    }
    return std::sqrt(num) / std::max(std::sqrt(den), 1e-300);
}

// ---------------------------------------------------------------- commands

struct global_flags {
    std::string config, preset, out = ".";
    std::uint64_t seed = 1;
    CLI::Option *o_config = nullptr, *o_preset = nullptr, *o_out = nullptr,
                *o_seed = nullptr;
};

settings make_settings(const global_flags& g, const std::string& argv0) {
    json cfg = json::object();
    if (g.o_preset->count()) cfg = load_preset(g.preset, argv0);
    if (g.o_config->count()) {
        // config file entries override preset entries key by key
        cfg.merge_patch(load_json_file(g.config));
    }
    return settings(std::move(cfg));
}

std::uint64_t pick_seed(const settings& s, const global_flags& g) {
    return s.pick<std::uint64_t>(g.o_seed, g.seed, nullptr, "seed", 1);
}

std::string pick_out(const settings& s, const global_flags& g,
                     const std::string& fallback) {
    return s.pick<std::string>(g.o_out, g.out, nullptr, "out", fallback);
}

int cmd_gen_boundaries(const settings& s, const global_flags& g,
                       const CLI::Option* o_count, std::size_t count,
                       const CLI::Option* o_order, std::size_t order,
                       const CLI::Option* o_rho, double rho,
                       const CLI::Option* o_cap, double cap) {
    bie::sampler_params sp;
    sp.n = s.pick<std::size_t>(o_order, order, "boundaries", "order", 20);
    sp.rho = s.pick<double>(o_rho, rho, "boundaries", "rho", 0.3);
    sp.max_curvature =
        s.pick<double>(o_cap, cap, "boundaries", "max_curvature", 10.0);
    const std::size_t n =
        s.pick<std::size_t>(o_count, count, "boundaries", "count", 300);
    const std::uint64_t seed = pick_seed(s, g);
    const std::string out = pick_out(s, g, "boundaries.bieb");

    bie::sampler_stats st;
    const bie::boundary_set bs = bie::generate_boundaries(n, sp, seed, &st);
    bie::write_boundaries(out, bs);

    const double rate =
        st.attempts ? double(st.accepted) / double(st.attempts) : 1.0;
    std::printf("boundaries: %zu -> %s\n", bs.items.size(), out.c_str());
    std::printf("acceptance rate: %.6f (%llu of %llu raw draws)\n", rate,
                (unsigned long long)st.accepted,
                (unsigned long long)st.attempts);

    // Histogram of per-boundary curvature maxima, ten bins up to the cap.
    std::size_t bins[10] = {};
    for (const bie::boundary& b : bs.items) {
        const bie::boundary_grid bg = bie::sample_grid(b, 1024);
        double m = 0.0;
        for (double c : bg.cur) m = std::max(m, std::fabs(c));
        const double w = sp.max_curvature / 10.0;
        bins[std::min<std::size_t>(9, std::size_t(m / w))] += 1;
    }
    std::printf("max-curvature histogram (bin width %g):\n",
                sp.max_curvature / 10.0);
    for (int i = 0; i < 10; ++i)
        std::printf("  [%4.1f,%4.1f): %zu\n", i * sp.max_curvature / 10.0,
                    (i + 1) * sp.max_curvature / 10.0, bins[i]);
    return 0;
}

int cmd_gen_dataset(const settings& s, const global_flags& g,
                    const std::string& boundaries_file,
                    const CLI::Option* o_kind, const std::string& kind,
                    const CLI::Option* o_per, std::size_t per,
                    const CLI::Option* o_nf, std::size_t nf,
                    const CLI::Option* o_decay, double decay,
                    const CLI::Option* o_quad, std::size_t quad) {
    const bie::boundary_set bs = bie::read_boundaries(boundaries_file);
    bie::require(!bs.items.empty(), bie::errc::invalid_argument,
                 "empty boundary file: " + boundaries_file);

    bie::datagen_config cfg;
    cfg.kind = bie::bvp_kind_from_name(
        s.pick<std::string>(o_kind, kind, "dataset", "kind",
                            "interior_dirichlet"));
    cfg.per_boundary =
        s.pick<std::size_t>(o_per, per, "dataset", "per_boundary", 20);
    cfg.n_f = s.pick<std::size_t>(o_nf, nf, "dataset", "n_f", 20);
    cfg.density_decay =
        s.pick<double>(o_decay, decay, "dataset", "density_decay", 5.0);
    cfg.quad = s.pick<std::size_t>(o_quad, quad, "dataset", "quad", 0);
    cfg.seed = pick_seed(s, g);
    cfg.v0_min = s.pick<double>(nullptr, 0.0, "dataset", "v0_min", 0.5);
    cfg.v0_max = s.pick<double>(nullptr, 0.0, "dataset", "v0_max", 3.0);
    cfg.k_min = s.pick<double>(nullptr, 0.0, "dataset", "k_min", 40.0);
    cfg.k_max = s.pick<double>(nullptr, 0.0, "dataset", "k_max", 50.0);
    cfg.strain_scale =
        s.pick<double>(nullptr, 0.0, "dataset", "strain_scale", 1.0);
    const std::string out = pick_out(s, g, "dataset.bied");

    bie::datagen_stats st;
    const bie::dataset ds = bie::generate_dataset(cfg, bs.items, &st);
    bie::write_dataset(out, ds);
    std::printf("records: %zu -> %s\n", ds.records.size(), out.c_str());
    std::printf("worst round-trip residual: %s\n", fmt(st.max_residual).c_str());
    return 0;
}

// Shared by cmd_solve and the field command: problem parameters from flags
// and config.
struct problem_flags {
    std::string kind = "interior_dirichlet";
    double wavenumber = 5.0, coupling = 0.0, shear = 1.0, poisson = 0.3,
           flow_speed = 1.0;
    std::string direction = "1,0";
    CLI::Option *o_kind = nullptr, *o_wavenumber = nullptr,
                *o_coupling = nullptr, *o_shear = nullptr,
                *o_poisson = nullptr, *o_flow = nullptr, *o_dir = nullptr;

    void add(CLI::App* c) {
        o_kind = c->add_option("--kind", kind, "problem family");
        o_wavenumber = c->add_option("--wavenumber", wavenumber, "helmholtz k");
        o_coupling =
            c->add_option("--coupling", coupling, "helmholtz eta (0: eta=k)");
        o_shear = c->add_option("--shear", shear, "elastic shear modulus");
        o_poisson = c->add_option("--poisson", poisson, "elastic Poisson ratio");
        o_flow = c->add_option("--flow-speed", flow_speed, "stream speed v0");
        o_dir = c->add_option("--direction", direction,
                              "incident direction dx,dy");
    }

    bie::problem build(const settings& s, const bie::boundary& bnd) const {
        bie::problem p;
        p.kind = bie::bvp_kind_from_name(s.pick<std::string>(
            o_kind, kind, "problem", "kind", "interior_dirichlet"));
        p.bnd = bnd;
        p.wavenumber = s.pick<double>(o_wavenumber, wavenumber, "problem",
                                      "wavenumber", 5.0);
        p.coupling =
            s.pick<double>(o_coupling, coupling, "problem", "coupling", 0.0);
        p.shear = s.pick<double>(o_shear, shear, "problem", "shear", 1.0);
        p.poisson =
            s.pick<double>(o_poisson, poisson, "problem", "poisson", 0.3);
        p.flow_speed =
            s.pick<double>(o_flow, flow_speed, "problem", "flow_speed", 1.0);
        const std::vector<double> d = parse_doubles(s.pick<std::string>(
            o_dir, direction, "problem", "direction", "1,0"));
        bie::require(d.size() == 2, bie::errc::invalid_argument,
                     "direction needs two components");
        const double dn = std::sqrt(d[0] * d[0] + d[1] * d[1]);
        bie::require(dn > 0, bie::errc::invalid_argument,
                     "direction must be nonzero");
        p.direction = {d[0] / dn, d[1] / dn};
        return p;
    }
};

// Nystrom nodal solution projected to coefficients of order n; the route is
// entirely independent of the Galerkin assembly.
std::vector<double> nystrom_coeffs(const bie::problem& p,
                                   const bie::coeff_vec& f,
                                   const bie::coeff_vec& v1,
                                   const bie::coeff_vec& v2, std::size_t n,
                                   std::size_t Q) {
    std::size_t Qn = 256;
    while (Qn < Q) Qn *= 2;
    switch (p.kind) {
        case bie::bvp_kind::potential_flow: {
            const auto nodal = bie::solve_nystrom_potential_flow(p, Qn);
            return bie::trig_project(nodal, n);
        }
        case bie::bvp_kind::elastostatic: {
            const auto nodal = bie::solve_nystrom_elastostatic(p, v1, v2, Qn);
            const std::vector<double> c1(nodal.begin(), nodal.begin() + Qn);
            const std::vector<double> c2(nodal.begin() + Qn, nodal.end());
            auto out = bie::trig_project(c1, n);
            const auto o2 = bie::trig_project(c2, n);
            out.insert(out.end(), o2.begin(), o2.end());
            return out;
        }
        case bie::bvp_kind::helmholtz: {
            const auto nodal = bie::solve_nystrom_helmholtz(p, Qn);
            std::vector<double> re(Qn), im(Qn);
            for (std::size_t i = 0; i < Qn; ++i) {
                re[i] = nodal[i].real();
                im[i] = nodal[i].imag();
            }
            auto out = bie::trig_project(re, n);
            const auto oi = bie::trig_project(im, n);
            out.insert(out.end(), oi.begin(), oi.end());
            return out;
        }
        default: {
            const auto nodal = bie::solve_nystrom_scalar(p, f, Qn);
            return bie::trig_project(nodal, n);
        }
    }
}

int cmd_solve(const settings& s, const global_flags& g,
              const problem_flags& pf, const std::string& boundaries_file,
              std::size_t index, const CLI::Option* o_n, std::size_t n,
              const CLI::Option* o_quad, std::size_t quad,
              const CLI::Option* o_rhs, const std::string& rhs_str,
              const CLI::Option* o_v1, const std::string& v1_str,
              const CLI::Option* o_v2, const std::string& v2_str,
              bool cross_check) {
    bie::boundary bnd = unit_circle();
    if (!boundaries_file.empty()) {
        const bie::boundary_set bs = bie::read_boundaries(boundaries_file);
        bie::require(index < bs.items.size(), bie::errc::invalid_argument,
                     "boundary index out of range");
        bnd = bs.items[index];
    }
    const bie::problem p = pf.build(s, bnd);
    const std::size_t order = s.pick<std::size_t>(o_n, n, "problem", "n", 20);
    const std::size_t Q =
        s.pick<std::size_t>(o_quad, quad, "problem", "quad", 512);

    const bie::coeff_vec f = parse_coeffs(
        s.pick<std::string>(o_rhs, rhs_str, "problem", "rhs", "0,1"));
    bie::coeff_vec v1 = p.bnd.x, v2(p.bnd.y.size(), 0.0);
    if (o_v1->count() || s.raw().contains("/problem/v1"_json_pointer))
        v1 = parse_coeffs(
            s.pick<std::string>(o_v1, v1_str, "problem", "v1", "0"));
    if (o_v2->count() || s.raw().contains("/problem/v2"_json_pointer))
        v2 = parse_coeffs(
            s.pick<std::string>(o_v2, v2_str, "problem", "v2", "0"));

    const bie::galerkin_system sys = bie::assemble_galerkin(p, order, Q);

    std::vector<double> rhs, phi;
    if (p.kind == bie::bvp_kind::helmholtz) {
        const std::vector<bie::cplx> rc = bie::rhs_helmholtz(p, order, Q);
        const std::vector<bie::cplx> pc = bie::solve_galerkin(sys, rc);
        std::vector<bie::cplx> res = bie::matvec(sys.Ac, pc);
        for (std::size_t i = 0; i < res.size(); ++i) res[i] -= rc[i];
        const double rr = bie::norm2(res) / std::max(bie::norm2(rc), 1e-300);
        phi.resize(2 * pc.size());
        for (std::size_t i = 0; i < pc.size(); ++i) {
            phi[i] = pc[i].real();
            phi[pc.size() + i] = pc[i].imag();
        }
        std::printf("galerkin residual: %s\n", fmt(rr).c_str());
    } else {
        switch (p.kind) {
            case bie::bvp_kind::potential_flow:
                rhs = bie::rhs_potential_flow(p, order, Q);
                break;
            case bie::bvp_kind::elastostatic:
                rhs = bie::rhs_elastostatic(p, v1, v2, order, Q);
                break;
            default:
                rhs = bie::rhs_scalar(p, f, order);
        }
        phi = bie::solve_galerkin(sys, rhs);
        const std::vector<double> back = bie::matvec(sys.A, phi);
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < rhs.size(); ++i) {
            num += (back[i] - rhs[i]) * (back[i] - rhs[i]);
            den += rhs[i] * rhs[i];
        }
        const double rr = den > 0 ? std::sqrt(num / den) : std::sqrt(num);
        std::printf("galerkin residual: %s\n", fmt(rr).c_str());
    }

    std::string line = "density:";
    for (double c : phi) line += " " + fmt(c);
    std::printf("%s\n", line.c_str());

    if (cross_check) {
        const std::vector<double> other = nystrom_coeffs(p, f, v1, v2, order, Q);
        std::printf("cross-check relative l2: %s\n",
                    fmt(rel_l2(other, phi)).c_str());
    }

    if (g.o_out->count() || s.raw().contains("out")) {
        const std::string out = pick_out(s, g, "density.csv");
        std::ofstream fo(out);
        bie::require(fo.good(), bie::errc::io_error, "cannot open " + out);
        fo << "index,coefficient\n";
        for (std::size_t i = 0; i < phi.size(); ++i)
            fo << i << "," << fmt(phi[i]) << "\n";
        std::printf("density -> %s\n", out.c_str());
    }
    return 0;
}

struct train_flags {
    std::string model = "tdonet", schedule, hidden, trunk_hidden;
    std::size_t epochs = 800, batch = 512, latent = 0, q = 64, p = 128,
                period = 0, patience = 0;
    double lr0 = 1e-3, factor = 0.0, split = 0.8, scale = 0.0;
    CLI::Option *o_model = nullptr, *o_schedule = nullptr, *o_hidden = nullptr,
                *o_trunk_hidden = nullptr, *o_epochs = nullptr,
                *o_batch = nullptr, *o_latent = nullptr, *o_q = nullptr,
                *o_p = nullptr, *o_period = nullptr, *o_patience = nullptr,
                *o_lr0 = nullptr, *o_factor = nullptr, *o_split = nullptr,
                *o_scale = nullptr;

    void add(CLI::App* c) {
        o_model = c->add_option("--model", model, "tdonet or deeponet");
        o_schedule = c->add_option("--schedule", schedule,
                                   "staircase or plateau (default per model)");
        o_hidden = c->add_option("--hidden", hidden, "hidden widths, e.g. 128,128");
        o_trunk_hidden =
            c->add_option("--trunk-hidden", trunk_hidden, "trunk hidden widths");
        o_epochs = c->add_option("--epochs", epochs, "training epochs");
        o_batch = c->add_option("--batch", batch, "mini-batch size");
        o_latent = c->add_option("--latent", latent,
                                 "tdonet latent width (0: output width)");
        o_q = c->add_option("--q", q, "deeponet latent width");
        o_p = c->add_option("--p", p, "deeponet sample points");
        o_period = c->add_option("--period", period,
                                 "staircase decay period in steps (0: auto)");
        o_patience =
            c->add_option("--patience", patience, "plateau patience (0: auto)");
        o_lr0 = c->add_option("--lr0", lr0, "initial learning rate");
        o_factor = c->add_option("--factor", factor, "lr decay factor");
        o_split = c->add_option("--split", split, "train fraction");
        o_scale = c->add_option("--scale", scale,
                                "tdonet output scale (0: family default)");
    }
};

struct prepared_model {
    std::unique_ptr<bie::operator_model> model;
    bie::model_tensors train, test;
};

prepared_model prepare(const settings& s, const train_flags& tf,
                       const bie::dataset& tr, const bie::dataset& te,
                       const std::string& model_name) {
    prepared_model pm;
    const std::size_t ga = tr.gamma_len(), fl = tr.field_len();
    const std::vector<std::size_t> hidden =
        s.pick_widths(tf.o_hidden, tf.hidden, "hidden", {128, 128});

    if (model_name == "tdonet") {
        const std::size_t r =
            s.pick<std::size_t>(tf.o_latent, tf.latent, "train", "latent", 0);
        const std::size_t rr = r ? r : fl;
        double scale =
            s.pick<double>(tf.o_scale, tf.scale, "train", "scale", 0.0);
        if (scale == 0.0)
            scale = tr.kind == bie::bvp_kind::helmholtz ? 0.1 : 1.0;
        bie::tdonet_spec spec;
        spec.v_net.widths.push_back(ga + fl);
        spec.sigma_net.widths.push_back(ga);
        spec.u_net.widths.push_back(ga + rr);
        for (std::size_t h : hidden) {
            spec.v_net.widths.push_back(h);
            spec.sigma_net.widths.push_back(h);
            spec.u_net.widths.push_back(h);
        }
        spec.v_net.widths.push_back(rr);
        spec.sigma_net.widths.push_back(rr);
        spec.u_net.widths.push_back(fl);
        spec.output_scale = scale;
        pm.model = bie::make_tdonet(spec);
        pm.train = bie::coefficient_tensors(tr);
        pm.test = bie::coefficient_tensors(te);
        return pm;
    }
    if (model_name == "deeponet") {
        const std::size_t p =
            s.pick<std::size_t>(tf.o_p, tf.p, "train", "p", 128);
        const std::size_t q =
            s.pick<std::size_t>(tf.o_q, tf.q, "train", "q", 64);
        const std::vector<std::size_t> trunk_hidden = s.pick_widths(
            tf.o_trunk_hidden, tf.trunk_hidden, "trunk_hidden", hidden);
        bie::deeponet_spec spec;
        spec.branch_gamma.widths.push_back(2 * p);
        spec.branch_f.widths.push_back(p);
        for (std::size_t h : hidden) {
            spec.branch_gamma.widths.push_back(h);
            spec.branch_f.widths.push_back(h);
        }
        spec.trunk.widths.push_back(1);
        for (std::size_t h : trunk_hidden) spec.trunk.widths.push_back(h);
        spec.branch_gamma.widths.push_back(q);
        spec.branch_f.widths.push_back(q);
        spec.trunk.widths.push_back(q);
        pm.model = bie::make_deeponet(spec, p);
        pm.train = bie::sampled_tensors(tr, p);
        pm.test = bie::sampled_tensors(te, p);
        return pm;
    }
    bie::fail(bie::errc::invalid_argument,
              "unknown model (want tdonet or deeponet): " + model_name);
}

bie::train_config make_train_config(const settings& s, const train_flags& tf,
                                    const std::string& model_name,
                                    bie::bvp_kind kind, std::uint64_t seed) {
    bie::train_config tc;
    tc.epochs = s.pick<std::size_t>(tf.o_epochs, tf.epochs, "train", "epochs", 800);
    tc.batch_size =
        s.pick<std::size_t>(tf.o_batch, tf.batch, "train", "batch", 512);
    tc.lr0 = s.pick<double>(tf.o_lr0, tf.lr0, "train", "lr0", 1e-3);
    std::string sched = s.pick<std::string>(tf.o_schedule, tf.schedule, "train",
                                            "schedule", "");
    if (sched.empty())
        sched = model_name == "deeponet" ? "staircase" : "plateau";
    if (sched == "staircase" || sched == "inverse_time_staircase")
        tc.schedule = bie::lr_schedule_kind::inverse_time_staircase;
    else if (sched == "plateau" || sched == "plateau_halve")
        tc.schedule = bie::lr_schedule_kind::plateau_halve;
    else
        bie::fail(bie::errc::invalid_argument, "unknown schedule: " + sched);
    double factor =
        s.pick<double>(tf.o_factor, tf.factor, "train", "factor", 0.0);
    if (factor == 0.0)
        factor = (kind == bie::bvp_kind::helmholtz &&
                  tc.schedule == bie::lr_schedule_kind::plateau_halve)
                     ? 0.1
                     : 0.5;
    tc.factor = factor;
    tc.period =
        s.pick<std::size_t>(tf.o_period, tf.period, "train", "period", 0);
    tc.patience =
        s.pick<std::size_t>(tf.o_patience, tf.patience, "train", "patience", 0);
    tc.seed = seed;
    return tc;
}

int cmd_train(const settings& s, const global_flags& g, const train_flags& tf,
              const std::string& dataset_file) {
    const bie::dataset ds = bie::read_dataset(dataset_file);
    const double split =
        s.pick<double>(tf.o_split, tf.split, "train", "split", 0.8);
    const std::uint64_t seed = pick_seed(s, g);
    const std::string model_name =
        s.pick<std::string>(tf.o_model, tf.model, "train", "model", "tdonet");
    const std::string out = pick_out(s, g, ".");
    make_out_dir(out);

    bie::dataset tr, te;
    bie::split_dataset(ds, split, bie::mix_seed(seed, 2), tr, te);

    prepared_model pm = prepare(s, tf, tr, te, model_name);
    const bie::train_config tc =
        make_train_config(s, tf, model_name, ds.kind, seed);

    std::printf("model: %s\nparameters: %zu\ntrain samples: %zu\ntest samples: %zu\n",
                model_name.c_str(), pm.model->param_count(), tr.records.size(),
                te.records.size());

    const bie::train_result res =
        bie::train_model(*pm.model, pm.train, pm.test, tc);

    bie::write_training_log(out + "/training_log.csv", res.history);
    bie::checkpoint_meta meta;
    meta.epochs = tc.epochs;
    meta.best_epoch = res.best_epoch;
    meta.best_test_loss = res.best_test_loss;
    meta.final_lr = res.history.back().lr;
    meta.seed = seed;
    bie::save_checkpoint(out + "/checkpoint.biop", *pm.model, meta);

    std::printf("best test loss: %s (epoch %zu)\n",
                fmt(res.best_test_loss).c_str(), res.best_epoch);
    std::printf("final train loss: %s\n",
                fmt(res.history.back().train_loss).c_str());
    std::printf("checkpoint -> %s/checkpoint.biop\n", out.c_str());
    std::printf("training log -> %s/training_log.csv\n", out.c_str());
    return 0;
}

bie::model_tensors tensors_for(const bie::operator_model& model,
                               const bie::dataset& ds) {
    if (model.type() == bie::model_type::deeponet)
        return bie::sampled_tensors(ds, bie::describe(model).sample_points);
    return bie::coefficient_tensors(ds);
}

int cmd_eval(const settings& s, const global_flags& g, const train_flags& tf,
             const std::string& dataset_file, const std::string& ckpt_file,
             bool full) {
    const bie::dataset ds = bie::read_dataset(dataset_file);
    auto model = bie::load_checkpoint(ckpt_file);

    bie::model_tensors data;
    if (full) {
        data = tensors_for(*model, ds);
    } else {
        const double split =
            s.pick<double>(tf.o_split, tf.split, "train", "split", 0.8);
        const std::uint64_t seed = pick_seed(s, g);
        bie::dataset tr, te;
        bie::split_dataset(ds, split, bie::mix_seed(seed, 2), tr, te);
        data = tensors_for(*model, te);
    }
    const bie::eval_metrics m = bie::evaluate_model(*model, data);
    std::printf("%s\n%s\n", bie::metrics_header().c_str(),
                bie::metrics_row(m).c_str());
    return 0;
}

std::vector<double> magnitudes(const bie::field_result& f) {
    std::vector<double> m(f.points.size());
    for (std::size_t i = 0; i < f.points.size(); ++i) {
        if (f.components == 1) {
            m[i] = f.values[i];
        } else {
            double s = 0.0;
            for (std::size_t c = 0; c < f.components; ++c)
                s += f.values[i * f.components + c] *
                     f.values[i * f.components + c];
            m[i] = std::sqrt(s);
        }
    }
    return m;
}

std::vector<double> ref_magnitudes(const bie::field_result& f) {
    bie::field_result tmp = f;
    tmp.values = f.reference;
    return magnitudes(tmp);
}

int cmd_field(const settings& s, const global_flags& g, const train_flags& tf,
              const problem_flags& pf, const std::string& dataset_file,
              const std::string& ckpt_file, const CLI::Option* o_record,
              std::size_t record, const CLI::Option* o_nx, std::size_t nx,
              const CLI::Option* o_ny, std::size_t ny,
              const CLI::Option* o_margin, double margin,
              const CLI::Option* o_clear, double clearance,
              const CLI::Option* o_quad, std::size_t quad, bool total) {
    (void)tf;
    const bie::dataset ds = bie::read_dataset(dataset_file);
    const std::size_t rec =
        s.pick<std::size_t>(o_record, record, "field", "record", 0);
    bie::require(rec < ds.records.size(), bie::errc::invalid_argument,
                 "record index out of range");
    const bie::dataset_record& r = ds.records[rec];

    const std::size_t nb = bie::coeff_len(ds.n_b);
    bie::boundary bnd;
    bnd.x.assign(r.gamma.begin(), r.gamma.begin() + nb);
    bnd.y.assign(r.gamma.begin() + nb, r.gamma.end());

    bie::problem p = pf.build(s, bnd);
    p.kind = ds.kind;  // the dataset family wins over --kind here
    if (ds.kind == bie::bvp_kind::helmholtz) {
        p.wavenumber = r.meta[0];
        p.coupling = r.meta[1];
        p.direction = {r.meta[2], r.meta[3]};
    } else if (ds.kind == bie::bvp_kind::potential_flow) {
        p.flow_speed = r.meta[0];
    }

    // Predicted density coefficients for this record.
    auto model = bie::load_checkpoint(ckpt_file);
    std::vector<double> pred;
    if (model->type() == bie::model_type::deeponet) {
        const std::size_t sp = bie::describe(*model).sample_points;
        bie::mat Xa(1, 2 * sp), Xb(1, sp);
        const auto sx = bie::trig_synth(bnd.x, sp);
        const auto sy = bie::trig_synth(bnd.y, sp);
        const auto sf = bie::trig_synth(r.rhs, sp);
        std::copy(sx.begin(), sx.end(), Xa.row(0));
        std::copy(sy.begin(), sy.end(), Xa.row(0) + sp);
        std::copy(sf.begin(), sf.end(), Xb.row(0));
        const bie::mat out = model->forward(Xa, Xb);
        pred = bie::trig_project(
            std::vector<double>(out.a.begin(), out.a.end()), ds.n_f);
    } else {
        bie::mat Xa(1, r.gamma.size()), Xb(1, r.rhs.size());
        std::copy(r.gamma.begin(), r.gamma.end(), Xa.row(0));
        std::copy(r.rhs.begin(), r.rhs.end(), Xb.row(0));
        const bie::mat out = model->forward(Xa, Xb);
        pred.assign(out.a.begin(), out.a.end());
    }
    bie::require(pred.size() == r.density.size(), bie::errc::invalid_argument,
                 "model output width does not match the dataset density");

    // Evaluation grid on the appropriate side.
    const bool interior = ds.kind == bie::bvp_kind::interior_dirichlet ||
                          ds.kind == bie::bvp_kind::interior_neumann ||
                          ds.kind == bie::bvp_kind::elastostatic;
    const double mg = s.pick<double>(o_margin, margin, "field", "margin",
                                     interior ? 0.0 : 1.0);
    const double cl =
        s.pick<double>(o_clear, clearance, "field", "clearance", 0.1);
    const std::size_t gx = s.pick<std::size_t>(o_nx, nx, "field", "nx", 96);
    const std::size_t gy = s.pick<std::size_t>(o_ny, ny, "field", "ny", 96);
    const std::size_t Q =
        s.pick<std::size_t>(o_quad, quad, "field", "quad", 1024);
    const bie::lattice_spec ls = bie::bounding_lattice(bnd, mg, gx, gy);
    const bie::eval_grid grid = bie::make_grid(
        bnd, interior ? bie::domain_side::interior : bie::domain_side::exterior,
        ls, cl);
    bie::require(!grid.points.empty(), bie::errc::invalid_argument,
                 "evaluation grid is empty; widen the lattice");

    const std::size_t half = bie::coeff_len(ds.n_f);
    const auto halves = [&](const std::vector<double>& c) {
        return std::pair<bie::coeff_vec, bie::coeff_vec>(
            bie::coeff_vec(c.begin(), c.begin() + half),
            bie::coeff_vec(c.begin() + half, c.end()));
    };

    bie::field_result fp, fr;
    switch (ds.kind) {
        case bie::bvp_kind::potential_flow:
            fp = bie::velocity_field(p, pred, grid, Q);
            fr = bie::velocity_field(p, r.density, grid, Q);
            break;
        case bie::bvp_kind::elastostatic: {
            const auto [pt1, pt2] = halves(pred);
            const auto [rt1, rt2] = halves(r.density);
            const auto [v1, v2] = halves(r.rhs);
            fp = bie::elastic_field(p, pt1, pt2, v1, v2, grid, Q);
            fr = bie::elastic_field(p, rt1, rt2, v1, v2, grid, Q);
            break;
        }
        case bie::bvp_kind::helmholtz: {
            const auto [pre, pim] = halves(pred);
            const auto [rre, rim] = halves(r.density);
            fp = bie::scattered_field(p, pre, pim, grid, total, Q);
            fr = bie::scattered_field(p, rre, rim, grid, total, Q);
            break;
        }
        default:
            fp = bie::laplace_field(p, pred, grid, Q);
            fr = bie::laplace_field(p, r.density, grid, Q);
    }

    const bie::field_result em = bie::error_map(fp, fr);
    const std::string out = pick_out(s, g, ".");
    make_out_dir(out);
    bie::write_field_csv(out + "/field.csv", em);
    bie::write_png(out + "/u.png", bie::rasterize(magnitudes(em), grid.index,
                                                  grid.nx, grid.ny));
    bie::write_png(out + "/reference.png",
                   bie::rasterize(ref_magnitudes(em), grid.index, grid.nx,
                                  grid.ny));
    bie::write_png(out + "/abs_error.png",
                   bie::rasterize(em.abs_error, grid.index, grid.nx, grid.ny));

    double worst = 0.0;
    for (double e : em.abs_error) worst = std::max(worst, e);
    std::printf("field points: %zu\n", grid.points.size());
    std::printf("max abs error vs stored density: %s\n", fmt(worst).c_str());
    std::printf("outputs -> %s/field.csv, u.png, reference.png, abs_error.png\n",
                out.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"boundary-integral neural-operator workbench"};
    app.require_subcommand(1);

    global_flags g;
    g.o_config = app.add_option("--config", g.config, "JSON config file")
                     ->expected(1);
    g.o_preset = app.add_option("--preset", g.preset,
                                "named preset from configs/ (desk, paper, ...)");
    g.o_out = app.add_option("--out", g.out, "output file or directory");
    g.o_seed = app.add_option("--seed", g.seed, "master RNG seed");
    app.fallthrough();

    int rc = 0;
    const auto timed = [&](auto&& fn) {
        const auto t0 = std::chrono::steady_clock::now();
        rc = fn();
        const double ms = std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - t0)
                              .count();
        std::fprintf(stderr, "elapsed: %.1f ms\n", ms);
    };

    // gen-boundaries
    auto* cb = app.add_subcommand("gen-boundaries",
                                  "sample and file accepted boundaries");
    std::size_t b_count = 300, b_order = 20;
    double b_rho = 0.3, b_cap = 10.0;
    auto* o_count = cb->add_option("--count", b_count, "boundaries to accept");
    auto* o_order = cb->add_option("--order", b_order, "trig order");
    auto* o_rho = cb->add_option("--rho", b_rho, "harmonic decay base");
    auto* o_cap = cb->add_option("--max-curvature", b_cap, "acceptance cap");

    // gen-dataset
    auto* cd = app.add_subcommand("gen-dataset",
                                  "generate (boundary, rhs, density) records");
    std::string d_boundaries, d_kind = "interior_dirichlet";
    std::size_t d_per = 20, d_nf = 20, d_quad = 0;
    double d_decay = 5.0;
    cd->add_option("--boundaries", d_boundaries, "BIEB boundary file")
        ->required();
    auto* o_dkind = cd->add_option("--kind", d_kind, "problem family");
    auto* o_per = cd->add_option("--per-boundary", d_per, "records per boundary");
    auto* o_nf = cd->add_option("--n-f", d_nf, "field trig order");
    auto* o_decay = cd->add_option("--decay", d_decay, "density decay exponent");
    auto* o_dquad = cd->add_option("--quad", d_quad, "quadrature size (0: auto)");

    // solve
    auto* cs = app.add_subcommand("solve", "direct boundary-integral solve");
    problem_flags s_pf;
    s_pf.add(cs);
    std::string s_boundaries, s_rhs = "0,1", s_v1 = "0", s_v2 = "0";
    std::size_t s_index = 0, s_n = 20, s_quad = 512;
    bool s_cross = false;
    cs->add_option("--boundaries", s_boundaries,
                   "BIEB file (default: unit circle)");
    cs->add_option("--index", s_index, "boundary index within the file");
    auto* o_sn = cs->add_option("--n", s_n, "Galerkin trig order");
    auto* o_squad = cs->add_option("--quad", s_quad, "quadrature size");
    auto* o_srhs = cs->add_option("--rhs", s_rhs, "boundary data coefficients");
    auto* o_sv1 = cs->add_option("--v1", s_v1, "elastic displacement comp 1");
    auto* o_sv2 = cs->add_option("--v2", s_v2, "elastic displacement comp 2");
    cs->add_flag("--cross-check", s_cross, "compare with the Nystrom route");

    // train
    auto* ct = app.add_subcommand("train", "train a neural operator");
    train_flags t_tf;
    t_tf.add(ct);
    std::string t_dataset;
    ct->add_option("--dataset", t_dataset, "BIED dataset file")->required();

    // eval
    auto* ce = app.add_subcommand("eval", "test-split metrics (MNE, MRE, variances, timing)");
    train_flags e_tf;  // reuses --split
    e_tf.add(ce);
    std::string e_dataset, e_ckpt;
    bool e_full = false;
    ce->add_option("--dataset", e_dataset, "BIED dataset file")->required();
    ce->add_option("--checkpoint", e_ckpt, "BIOP checkpoint")->required();
    ce->add_flag("--full", e_full, "evaluate on every record, not the split");

    // field
    auto* cf = app.add_subcommand("field",
                                  "reconstruct fields from a test record");
    train_flags f_tf;
    problem_flags f_pf;
    f_pf.add(cf);
    std::string f_dataset, f_ckpt;
    std::size_t f_record = 0, f_nx = 96, f_ny = 96, f_quad = 1024;
    double f_margin = 0.0, f_clear = 0.1;
    bool f_total = false;
    cf->add_option("--dataset", f_dataset, "BIED dataset file")->required();
    cf->add_option("--checkpoint", f_ckpt, "BIOP checkpoint")->required();
    auto* o_frec = cf->add_option("--record", f_record, "record index");
    auto* o_fnx = cf->add_option("--nx", f_nx, "lattice width");
    auto* o_fny = cf->add_option("--ny", f_ny, "lattice height");
    auto* o_fmargin = cf->add_option("--margin", f_margin, "lattice margin");
    auto* o_fclear = cf->add_option("--clearance", f_clear,
                                    "minimum distance to the boundary");
    auto* o_fquad = cf->add_option("--quad", f_quad, "field quadrature size");
    cf->add_flag("--total", f_total, "add the incident wave (helmholtz)");

    CLI11_PARSE(app, argc, argv);

    try {
        const settings s = make_settings(g, argv[0]);
        if (cb->parsed())
            timed([&] {
                return cmd_gen_boundaries(s, g, o_count, b_count, o_order,
                                          b_order, o_rho, b_rho, o_cap, b_cap);
            });
        else if (cd->parsed())
            timed([&] {
                return cmd_gen_dataset(s, g, d_boundaries, o_dkind, d_kind,
                                       o_per, d_per, o_nf, d_nf, o_decay,
                                       d_decay, o_dquad, d_quad);
            });
        else if (cs->parsed())
            timed([&] {
                return cmd_solve(s, g, s_pf, s_boundaries, s_index, o_sn, s_n,
                                 o_squad, s_quad, o_srhs, s_rhs, o_sv1, s_v1,
                                 o_sv2, s_v2, s_cross);
            });
        else if (ct->parsed())
            timed([&] { return cmd_train(s, g, t_tf, t_dataset); });
        else if (ce->parsed())
            timed([&] { return cmd_eval(s, g, e_tf, e_dataset, e_ckpt, e_full); });
        else if (cf->parsed())
            timed([&] {
                return cmd_field(s, g, f_tf, f_pf, f_dataset, f_ckpt, o_frec,
                                 f_record, o_fnx, f_nx, o_fny, f_ny, o_fmargin,
                                 f_margin, o_fclear, f_clear, o_fquad, f_quad,
                                 f_total);
            });
        return rc;
    } catch (const bie::error& e) {
        std::fprintf(stderr, "error: %s: %s\n", e.code_name(), e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: internal: %s\n", e.what());
        return 3;
    }
}
