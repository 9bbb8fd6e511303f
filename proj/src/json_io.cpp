#include "qhsub/json_io.hpp"

namespace qhsub {

ordered_json to_json(const Rational& r) {
    return ordered_json{{"num", r.num}, {"den", r.den}, {"value", r.value()}};
}

ordered_json to_json(const CirclePoint& c) {
    return ordered_json{{"theta", c.theta}, {"a", c.a}, {"b", c.b}};
}

ordered_json to_json(const Sector& s) {
    return ordered_json{{"start", to_json(s.start)}, {"end", to_json(s.end)}, {"full", s.full}};
}

ordered_json to_json(const GridSpec& g) {
    return ordered_json{{"radial_points", g.radial_points},
                        {"angular_points", g.angular_points},
                        {"tau_points", g.tau_points},
                        {"boundary_margin", g.boundary_margin}};
}

GridSpec grid_from_json(const ordered_json& j) {
    GridSpec g;
    g.radial_points = j.value("radial_points", g.radial_points);
    g.angular_points = j.value("angular_points", g.angular_points);
    g.tau_points = j.value("tau_points", g.tau_points);
    g.boundary_margin = j.value("boundary_margin", g.boundary_margin);
    return g;
}

namespace {

const char* kind_name(SignComponent::Kind k) {
    return k == SignComponent::Kind::Positive ? "positive" : "negative";
}

const char* kind_name(SectorPlan::Kind k) {
    switch (k) {
        case SectorPlan::Kind::Positive:
            return "positive";
        case SectorPlan::Kind::NegativeMain:
            return "negative-main";
        default:
            return "negative-general";
    }
}

SectorPlan::Kind plan_kind_from_name(const std::string& s) {
    if (s == "positive") return SectorPlan::Kind::Positive;
    if (s == "negative-main") return SectorPlan::Kind::NegativeMain;
    return SectorPlan::Kind::NegativeGeneral;
}

ordered_json circle_points_json(const std::vector<CirclePoint>& pts) {
    ordered_json arr = ordered_json::array();
    for (const auto& p : pts) arr.push_back(to_json(p));
    return arr;
}

std::vector<CirclePoint> circle_points_from(const ordered_json& arr, double ell) {
    std::vector<CirclePoint> out;
    for (const auto& e : arr) out.push_back(circle_point(e.at("theta").get<double>(), ell));
    return out;
}

Sector sector_from(const ordered_json& j, double ell) {
    Sector s;
    s.start = circle_point(j.at("start").at("theta").get<double>(), ell);
    s.end = circle_point(j.at("end").at("theta").get<double>(), ell);
    s.full = j.value("full", false);
    return s;
}

}  // namespace

ordered_json to_json(const H2Verdict& v) {
    static const char* names[5] = {"not-strictly-negative", "no-zero-local-max", "property-one-splitting",
                                   "unique-negative-minimum", "holder-order-at-zeros"};
    ordered_json items = ordered_json::array();
    for (int i = 0; i < 5; ++i) {
        items.push_back(ordered_json{
            {"id", i + 1}, {"name", names[i]}, {"pass", v.items[i].pass}, {"detail", v.items[i].detail}});
    }
    ordered_json comps = ordered_json::array();
    for (const auto& c : v.components) {
        ordered_json jc{{"kind", kind_name(c.kind)}, {"arc", to_json(c.arc)}, {"extremum", to_json(c.extremum)}};
        ordered_json subs = ordered_json::array();
        for (const auto& sa : c.sub_arcs) subs.push_back(ordered_json{{"arc", to_json(sa.arc)}, {"hat", to_json(sa.hat)}});
        jc["sub_arcs"] = subs;
        for (int side = 0; side < 2; ++side)
            if (c.endpoint_zero_orders[side])
                jc[side == 0 ? "start_zero_order" : "end_zero_order"] = to_json(*c.endpoint_zero_orders[side]);
        comps.push_back(jc);
    }
    ordered_json zeros = ordered_json::array();
    for (const auto& z : v.zeros)
        zeros.push_back(ordered_json{{"theta", z.location.theta}, {"sign_change", z.sign_change}});
    return ordered_json{{"pass", v.pass},          {"items", items},       {"p_global", to_json(v.p_global)},
                        {"components", comps},     {"zeros", zeros},       {"resolution", v.resolution},
                        {"n_samples", v.n_samples}};
}

ordered_json to_json(const SectorPlan& p) {
    ordered_json j{{"kind", kind_name(p.kind)},
                   {"sector", to_json(p.sector)},
                   {"n_segments", p.n_segments},
                   {"omega_radius", p.omega_radius},
                   {"ell", p.ell},
                   {"dirs", circle_points_json(p.dirs)},
                   {"rays", circle_points_json(p.rays)}};
    if (!p.halves.empty()) {
        ordered_json halves = ordered_json::array();
        for (const auto& h : p.halves) {
            halves.push_back(ordered_json{{"cover", to_json(h.cover)},
                                          {"clockwise", h.ladder.clockwise},
                                          {"rays", circle_points_json(h.ladder.rays)},
                                          {"dirs", circle_points_json(h.ladder.dirs)}});
        }
        j["halves"] = halves;
    }
    return j;
}

SectorPlan plan_from_json(const ordered_json& j) {
    SectorPlan p;
    p.kind = plan_kind_from_name(j.at("kind").get<std::string>());
    p.ell = j.at("ell").get<double>();
    p.sector = sector_from(j.at("sector"), p.ell);
    p.n_segments = j.at("n_segments").get<int>();
    p.omega_radius = j.at("omega_radius").get<double>();
    p.dirs = circle_points_from(j.at("dirs"), p.ell);
    p.rays = circle_points_from(j.at("rays"), p.ell);
    if (j.contains("halves")) {
        for (const auto& hj : j["halves"]) {
            HalfLadder h;
            h.cover = sector_from(hj.at("cover"), p.ell);
            h.ladder.clockwise = hj.at("clockwise").get<bool>();
            h.ladder.rays = circle_points_from(hj.at("rays"), p.ell);
            h.ladder.dirs = circle_points_from(hj.at("dirs"), p.ell);
            p.halves.push_back(h);
        }
    }
    return p;
}

ordered_json to_json(const Certificate& c) {
    ordered_json conditions{{"escape", ordered_json{{"pass", c.escape.pass}, {"witness", c.escape.witness}}},
                            {"dtau_bound", ordered_json{{"pass", c.dtau_bound.pass}, {"witness", c.dtau_bound.witness}}},
                            {"jacobian_bound",
                             ordered_json{{"pass", c.jacobian_bound.pass}, {"witness", c.jacobian_bound.witness}}},
                            {"growth_bound",
                             ordered_json{{"pass", c.growth_bound.pass}, {"witness", c.growth_bound.witness}}}};
    ordered_json plans = ordered_json::array();
    for (const auto& p : c.plans) plans.push_back(to_json(p));
    return ordered_json{{"symbol", c.symbol_digest},
                        {"direction", c.direction == Certificate::Direction::XiPositive ? "xi_positive" : "xi_negative"},
                        {"pass", c.pass},
                        {"a", to_json(c.a)},
                        {"s_order", to_json(c.s_order)},
                        {"C1", c.C1},
                        {"C2", c.C2},
                        {"C3", c.C3},
                        {"C_phi", c.C_phi},
                        {"omega_radius", c.omega_radius},
                        {"min_escape_rho", c.min_escape_rho},
                        {"grid", to_json(c.grid)},
                        {"conditions", conditions},
                        {"seed", c.seed},
                        {"plans", plans}};
}

Certificate certificate_from_json(const ordered_json& j) {
    Certificate c;
    c.symbol_digest = j.at("symbol").get<std::string>();
    c.direction = j.at("direction").get<std::string>() == "xi_negative" ? Certificate::Direction::XiNegative
                                                                        : Certificate::Direction::XiPositive;
    c.pass = j.at("pass").get<bool>();
    c.a = Rational(j.at("a").at("num").get<std::int64_t>(), j.at("a").at("den").get<std::int64_t>());
    c.s_order = Rational(j.at("s_order").at("num").get<std::int64_t>(), j.at("s_order").at("den").get<std::int64_t>());
    c.C1 = j.at("C1").get<double>();
    c.C2 = j.at("C2").get<double>();
    c.C3 = j.at("C3").get<double>();
    c.C_phi = j.value("C_phi", 0.0);
    c.omega_radius = j.at("omega_radius").get<double>();
    c.min_escape_rho = j.value("min_escape_rho", 0.0);
    c.grid = grid_from_json(j.at("grid"));
    c.seed = j.at("seed").get<std::uint64_t>();
    auto cond = [&](const char* name) {
        ConditionResult r;
        r.pass = j.at("conditions").at(name).at("pass").get<bool>();
        r.witness = j.at("conditions").at(name).at("witness").get<std::string>();
        return r;
    };
    c.escape = cond("escape");
    c.dtau_bound = cond("dtau_bound");
    c.jacobian_bound = cond("jacobian_bound");
    c.growth_bound = cond("growth_bound");
    for (const auto& pj : j.at("plans")) c.plans.push_back(plan_from_json(pj));
    return c;
}

ordered_json to_json(const DecayReport& r) {
    ordered_json j{{"fitted_slope", r.fitted_slope},
                   {"predicted_slope", r.predicted_slope},
                   {"fit_residual", r.fit_residual},
                   {"xi_grid", r.xi_grid},
                   {"kernel_norm", r.kernel_norm}};
    if (!r.operator_ratio.empty()) j["operator_ratio"] = r.operator_ratio;
    return j;
}

}  // namespace qhsub
