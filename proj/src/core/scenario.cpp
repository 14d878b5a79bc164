// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 spss-synth contributors

#include "scenario.hpp"

#include <set>

#include "error.hpp"
#include "io.hpp"

namespace spss {

namespace {

using nlohmann::json;

class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path))
    {
        if (!j_.is_object()) fail("", "must be an object");
    }

    [[noreturn]] void fail(const std::string& key, const std::string& msg) const
    {
        throw Error(Errc::config, "config " + where(key) + ": " + msg);
    }

    std::string where(const std::string& key) const
    {
        if (key.empty()) return path_.empty() ? "<root>" : path_;
        return path_.empty() ? key : path_ + "." + key;
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    const json& raw(const std::string& key)
    {
        seen_.insert(key);
        if (!j_.contains(key)) fail(key, "missing");
        return j_.at(key);
    }

    double num(const std::string& key, std::optional<double> fallback = std::nullopt)
    {
        if (!has(key)) {
            seen_.insert(key);
            if (fallback) return *fallback;
            fail(key, "missing");
        }
        const json& v = raw(key);
        if (!v.is_number()) fail(key, "must be a number");
        return v.get<double>();
    }

    long long integer(const std::string& key, std::optional<long long> fallback = std::nullopt)
    {
        if (!has(key)) {
            seen_.insert(key);
            if (fallback) return *fallback;
            fail(key, "missing");
        }
        const json& v = raw(key);
        if (!v.is_number_integer()) fail(key, "must be an integer");
        return v.get<long long>();
    }

    std::uint64_t seed(const std::string& key)
    {
        if (!has(key)) fail(key, "missing (all seeds are mandatory)");
        const json& v = raw(key);
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
            fail(key, "must be a non-negative integer");
        return v.get<std::uint64_t>();
    }

    bool flag(const std::string& key, bool fallback)
    {
        if (!has(key)) {
            seen_.insert(key);
            return fallback;
        }
        const json& v = raw(key);
        if (!v.is_boolean()) fail(key, "must be true or false");
        return v.get<bool>();
    }

    std::string str(const std::string& key, const std::set<std::string>& allowed, std::optional<std::string> fallback)
    {
        std::string s;
        if (!has(key)) {
            seen_.insert(key);
            if (!fallback) fail(key, "missing");
            s = *fallback;
        } else {
            const json& v = raw(key);
            if (!v.is_string()) fail(key, "must be a string");
            s = v.get<std::string>();
        }
        if (!allowed.count(s)) {
            std::string list;
            for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
            fail(key, "'" + s + "' is not one of {" + list + "}");
        }
        return s;
    }

    std::vector<double> numbers(const std::string& key)
    {
        const json& v = raw(key);
        if (!v.is_array()) fail(key, "must be an array of numbers");
        std::vector<double> out;
        for (const json& x : v) {
            if (!x.is_number()) fail(key, "must be an array of numbers");
            out.push_back(x.get<double>());
        }
        return out;
    }

    cplx complex(const std::string& key, cplx fallback)
    {
        if (!has(key)) {
            seen_.insert(key);
            return fallback;
        }
        const json& v = raw(key);
        if (v.is_number()) return {v.get<double>(), 0.0};
        if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
            fail(key, "must be a number or a [re, im] pair");
        return {v[0].get<double>(), v[1].get<double>()};
    }

    Section sub(const std::string& key)
    {
        if (!has(key)) fail(key, "missing section");
        return Section(raw(key), where(key));
    }

    std::optional<Section> optional_sub(const std::string& key)
    {
        if (!has(key)) {
            seen_.insert(key);
            return std::nullopt;
        }
        return Section(raw(key), where(key));
    }

    void finish() const
    {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key())) fail(it.key(), "unknown key");
    }

    const json& value() const { return j_; }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

void positive(Section& s, const std::string& key, double v)
{
    if (!(v > 0.0)) s.fail(key, "must be positive");
}

} // namespace

void Scenario::override_seeds(std::uint64_t seed)
{
    surrogate_seed = seed;
    kriging.seed = seed;
    ipt.seed = seed;
    sbd.seed = seed;
    document["surrogate"]["seed"] = seed;
    document["ipt"]["seed"] = seed;
    document["sbd"]["seed"] = seed;
    hash = io::hex64(io::fnv1a(document.dump()));
}

Scenario parse_scenario(const nlohmann::json& doc)
{
    Scenario s;
    Section root(doc, "");

    {
        Section w = root.sub("wave");
        s.wave.frequency = w.num("frequency");
        positive(w, "frequency", s.wave.frequency);
        s.wave.incidence = em::Direction::from_degrees(w.num("theta_deg", 0.0), w.num("phi_deg", 0.0));
        if (s.wave.incidence.theta < 0.0 || s.wave.incidence.theta > kPi / 2) w.fail("theta_deg", "must lie in [0, 90]");
        s.wave.e_te = w.complex("e_te", {1.0, 0.0});
        s.wave.e_tm = w.complex("e_tm", {0.0, 0.0});
        if (std::norm(s.wave.e_te) + std::norm(s.wave.e_tm) <= 0.0) w.fail("e_te", "both amplitudes are zero");
        w.finish();
    }
    {
        Section l = root.sub("lattice");
        const long long P = l.integer("P"), Q = l.integer("Q");
        if (P < 1 || P > 100000) l.fail("P", "must be a positive integer");
        if (Q < 1 || Q > 100000) l.fail("Q", "must be a positive integer");
        s.lattice.P = static_cast<int>(P);
        s.lattice.Q = static_cast<int>(Q);
        s.lattice.dx = l.num("dx");
        s.lattice.dy = l.num("dy");
        positive(l, "dx", s.lattice.dx);
        positive(l, "dy", s.lattice.dy);
        l.finish();
    }
    {
        Section m = root.sub("mounting");
        s.mount.height = m.num("H");
        positive(m, "H", s.mount.height);
        m.str("convention", {"wall"}, std::string("wall"));
        m.finish();
    }
    {
        Section uc = root.sub("uc");
        const long long D = uc.integer("D", 1);
        if (D < 1) uc.fail("D", "must be at least 1");
        s.bounds.lo = uc.numbers("lo");
        s.bounds.hi = uc.numbers("hi");
        if (static_cast<long long>(s.bounds.lo.size()) != D || static_cast<long long>(s.bounds.hi.size()) != D)
            uc.fail("lo", "lo and hi need D entries");
        for (int d = 0; d < D; ++d)
            if (!(s.bounds.hi[d] > s.bounds.lo[d])) uc.fail("hi", "every hi must exceed its lo");
        if (auto o = uc.optional_sub("oracle")) {
            s.oracle.l_res = o->num("l_res", s.oracle.l_res);
            s.oracle.kappa = o->num("kappa", s.oracle.kappa);
            s.oracle.rho_c = o->num("rho_c", s.oracle.rho_c);
            s.oracle.q_factor = o->num("q_factor", s.oracle.q_factor);
            s.oracle.loss = o->num("loss", s.oracle.loss);
            o->finish();
        }
        s.oracle.validate();
        uc.finish();
    }
    {
        Section g = root.sub("surrogate");
        const long long Pp = g.integer("Pp", 5), Qp = g.integer("Qp", 5);
        if (Pp < 1 || Pp % 2 == 0) g.fail("Pp", "must be a positive odd integer");
        if (Qp < 1 || Qp % 2 == 0) g.fail("Qp", "must be a positive odd integer");
        s.Pp = static_cast<int>(Pp);
        s.Qp = static_cast<int>(Qp);
        const long long B = g.integer("B");
        if (B < 2) g.fail("B", "must be at least 2");
        if (B > 1000000) g.fail("B", "is unreasonably large");
        s.B = static_cast<int>(B);
        s.surrogate_seed = g.seed("seed");
        s.kriging.seed = s.surrogate_seed;
        s.twin = g.str("twin", {"kriging", "oracle"}, std::string("kriging")) == "oracle" ? TwinKind::oracle
                                                                                         : TwinKind::kriging;
        if (auto t = g.optional_sub("tuning")) {
            s.kriging.tying =
                surrogate::tying_from_name(t->str("tying", {"per_descriptor", "self_neighbor", "full"}, "per_descriptor"));
            s.kriging.multistarts = static_cast<int>(t->integer("multistarts", 8));
            s.kriging.max_steps = static_cast<int>(t->integer("max_steps", 200));
            s.kriging.tuning_subsample = static_cast<int>(t->integer("subsample", 128));
            s.kriging.nugget = t->num("nugget", 1e-10);
            t->finish();
        }
        s.kriging.validate();
        g.finish();
    }
    if (s.lattice.P < s.Pp || s.lattice.Q < s.Qp)
        throw Error(Errc::config, "config lattice: P x Q must be at least the small-scale Pp x Qp");
    {
        Section i = root.sub("ipt");
        s.ipt.gamma = i.num("gamma", 1e-4);
        s.ipt.max_iterations = static_cast<int>(i.integer("I", 1000));
        s.ipt.magnitude = i.num("C", 1.0);
        s.ipt.svd_cutoff = i.num("svd_cutoff", 1e-3);
        s.ipt.seed = i.seed("seed");
        s.ipt.projection = i.str("mode", {"per_point_phase", "global_normalize"}, std::string("per_point_phase")) ==
                                   "global_normalize"
                               ? ipt::ProjectionMode::global_normalize
                               : ipt::ProjectionMode::per_point_phase;
        s.ipt.rule = i.str("rule", {"keep_phase", "literal"}, std::string("keep_phase")) == "literal"
                         ? ipt::PatternRule::literal
                         : ipt::PatternRule::keep_phase;
        s.mask_db = i.num("mask_db", 0.0);
        s.ipt.validate();
        i.finish();
    }
    {
        Section b = root.sub("sbd");
        s.sbd.swarm = static_cast<int>(b.integer("A", 10));
        s.sbd.iterations = static_cast<int>(b.integer("N", 10000));
        s.sbd.seed = b.seed("seed");
        s.sbd.inertia = b.num("inertia", s.sbd.inertia);
        s.sbd.c1 = b.num("c1", s.sbd.c1);
        s.sbd.c2 = b.num("c2", s.sbd.c2);
        s.sbd.v_clamp = b.num("v_clamp", s.sbd.v_clamp);
        s.pso_init = b.str("init", {"random", "lookup"}, std::string("random")) == "lookup" ? PsoInit::lookup
                                                                                          : PsoInit::random;
        s.sbd.validate();
        b.finish();
    }
    {
        Section o = root.sub("objective");
        const std::string kind = o.str("type", {"pencil", "shaped"}, std::nullopt);
        if (kind == "pencil") {
            s.objective.kind = Objective::Kind::pencil;
            const double th = o.num("theta_deg"), ph = o.num("phi_deg");
            if (th < 0.0 || th >= 90.0) o.fail("theta_deg", "must lie in [0, 90)");
            s.objective.target = em::Direction::from_degrees(th, ph);
        } else {
            s.objective.kind = Objective::Kind::shaped;
            const json& polys = o.raw("polygons");
            if (!polys.is_array() || polys.empty()) o.fail("polygons", "must be a non-empty array of polygons");
            for (const json& poly : polys) {
                radiation::Polygon pg;
                if (!poly.is_array() || poly.size() < 3) o.fail("polygons", "each polygon needs at least 3 vertices");
                for (const json& v : poly) {
                    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
                        o.fail("polygons", "vertices must be [x, y] pairs in metres");
                    pg.push_back({v[0].get<double>(), v[1].get<double>()});
                }
                s.objective.polygons.push_back(std::move(pg));
            }
        }
        o.finish();
    }
    if (auto out = root.optional_sub("output")) {
        s.output.oversampling = out->num("oversampling", 4.0);
        positive(*out, "oversampling", s.output.oversampling);
        s.output.strict_nyquist = out->flag("strict_nyquist", false);
        s.output.spreading = out->str("spreading", {"inverse_square", "none"}, std::string("none")) == "inverse_square"
                                 ? radiation::Spreading::inverse_square
                                 : radiation::Spreading::none;
        if (auto fw = out->optional_sub("footprint")) {
            radiation::GroundWindow& w = s.output.window;
            w.x_min = fw->num("x_min", w.x_min);
            w.x_max = fw->num("x_max", w.x_max);
            w.y_min = fw->num("y_min", w.y_min);
            w.y_max = fw->num("y_max", w.y_max);
            w.nx = static_cast<int>(fw->integer("nx", w.nx));
            w.ny = static_cast<int>(fw->integer("ny", w.ny));
            if (w.nx < 2 || w.ny < 2) fw->fail("nx", "window needs at least 2 points per axis");
            if (!(w.x_max > w.x_min)) fw->fail("x_max", "must exceed x_min");
            if (!(w.y_max > w.y_min)) fw->fail("y_max", "must exceed y_min");
            fw->finish();
        }
        out->finish();
    }
    root.finish();

    s.document = doc;
    s.hash = io::hex64(io::fnv1a(s.document.dump()));
    return s;
}

Scenario load_scenario(const std::filesystem::path& file)
{
    if (!std::filesystem::exists(file)) throw Error(Errc::config, "config file not found: " + file.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(io::read_file(file));
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(Errc::config, "config " + file.string() + " is not valid JSON: " + e.what());
    }
    return parse_scenario(doc);
}

} // namespace spss
