#include "gravac/scenario.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

namespace gravac {

namespace {

using nlohmann::json;

FieldPtr parse_field(const json& j) {
    const std::string kind = j.value("kind", "constant");
    if (kind == "constant") return std::make_shared<ConstantField>(j.at("value").get<double>());
    if (kind == "polynomial") {
        std::vector<PolynomialField::Term> terms;
        for (const auto& t : j.at("terms"))
            terms.push_back({t.at("i").get<int>(), t.at("j").get<int>(), t.at("k").get<int>(),
                             t.at("c").get<double>()});
        return std::make_shared<PolynomialField>(std::move(terms));
    }
    if (kind == "radial") {
        const std::string profile = j.at("profile").get<std::string>();
        if (profile == "linear")
            return std::make_shared<RadialField>(
                radial_linear(j.at("a").get<double>(), j.at("b").get<double>()));
        if (profile == "rational")
            return std::make_shared<RadialField>(radial_rational(
                j.at("a").get<double>(), j.at("b").get<double>(), j.at("c").get<double>()));
        if (profile == "poly")
            return std::make_shared<RadialField>(
                radial_poly(j.at("coeffs").get<std::vector<double>>()));
        if (profile == "gaussian")
            return std::make_shared<RadialField>(radial_gaussian(
                j.at("a").get<double>(), j.at("r0").get<double>(), j.at("w").get<double>()));
        if (profile == "spline")
            return std::make_shared<RadialField>(
                radial_spline(j.at("knots_r").get<std::vector<double>>(),
                              j.at("knots_f").get<std::vector<double>>()));
        throw ParseError("unknown radial profile '" + profile + "'");
    }
    throw ParseError("unknown field kind '" + kind + "'");
}

Vec3 parse_vec3(const json& j) {
    if (!j.is_array() || j.size() != 3) throw ParseError("expected a 3-vector");
    return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

Medium parse_medium(const json& j) {
    std::vector<Region> regions;
    for (const auto& r : j.at("regions"))
        regions.push_back({parse_field(r.at("rho")), parse_field(r.at("c")),
                           r.value("name", std::string{})});
    std::vector<Interface> interfaces;
    for (const auto& g : j.value("interfaces", json::array())) {
        const std::string kind = g.value("kind", "sphere");
        if (kind == "sphere")
            interfaces.push_back(
                sphere_interface(g.at("radius").get<double>(), g.value("name", std::string{})));
        else if (kind == "plane")
            interfaces.push_back(plane_interface(parse_vec3(g.at("normal")),
                                                 g.value("offset", 0.0),
                                                 g.value("name", std::string{})));
        else
            throw ParseError("unknown interface kind '" + kind + "'");
    }
    Medium m(std::move(regions), std::move(interfaces), j.value("domain_radius", 2.0));
    m.set_radial(j.value("radial", false));
    return m;
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw ParseError(std::string("scenario is not valid JSON: ") + e.what());
    }
    Scenario s;
    try {
        s.name = j.value("name", std::string("scenario"));
        s.seed = j.value("seed", 1ULL);
        s.k0 = j.value("k0", 1.0);
        if (j.contains("medium")) s.medium = parse_medium(j.at("medium"));
        if (j.contains("gravity")) {
            s.gravity.solver = j["gravity"].value("solver", std::string("radial"));
            if (j["gravity"].contains("grid")) {
                s.gravity.grid.n = j["gravity"]["grid"].value("n", 64);
                s.gravity.grid.extent = j["gravity"]["grid"].value("extent", 2.0);
            }
        }
        for (const auto& r : j.value("rays", json::array())) {
            RayFan f;
            f.x = parse_vec3(r.at("x"));
            f.dir = parse_vec3(r.at("dir"));
            f.tau = r.value("tau", 1.0);
            f.max_s = r.value("max_s", 6.0);
            f.transport = r.value("transport", std::string("none"));
            f.selfgrav = r.value("selfgrav", true);
            s.rays.push_back(f);
        }
        if (j.contains("reflectivity")) {
            const auto& r = j["reflectivity"];
            s.reflectivity.interface_index = r.value("interface", 0);
            s.reflectivity.tau = r.value("tau", 1.0);
            s.reflectivity.slowness_max = r.value("slowness_max", 0.95);
            s.reflectivity.count = r.value("count", 256);
        }
        if (j.contains("synthesize")) {
            const auto& r = j["synthesize"];
            s.synthesize.tau = r.value("tau", 1.0);
            if (r.contains("slownesses"))
                s.synthesize.slownesses = r["slownesses"].get<std::vector<double>>();
            s.synthesize.noise = r.value("noise", 0.0);
        }
        if (j.contains("invert")) {
            const auto& r = j["invert"];
            s.invert.noise = r.value("noise", 0.0);
            s.invert.seeds = r.value("seeds", 100);
            if (r.contains("slownesses"))
                s.invert.slownesses = r["slownesses"].get<std::vector<double>>();
        }
        if (j.contains("carleman")) {
            const auto& r = j["carleman"];
            s.carleman.a = r.value("a", 0.35);
            s.carleman.b = r.value("b", 0.8);
            s.carleman.beta0 = r.value("beta0", 4.0);
            s.carleman.sweep = r.value("sweep", 8);
            s.carleman.s0 = r.value("s0", 0.0);
            s.carleman.c_tilde = r.value("c_tilde", 1.0);
            s.carleman.r0 = r.value("r0", 0.9);
        }
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw ParseError(std::string("bad scenario structure: ") + e.what());
    }
    // Referenced interfaces must exist.
    if (s.medium && s.reflectivity.interface_index >= 0 &&
        static_cast<size_t>(s.reflectivity.interface_index) > s.medium->interfaces().size())
        throw ParseError("reflectivity.interface references a missing interface");
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open scenario file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str());
}

}  // namespace gravac
