#include "levycalc/json_io.hpp"

#include <fstream>

namespace levycalc {

using json = nlohmann::json;

namespace {

json vec_json(const Vec& v) {
    json a = json::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

Vec vec_from(const json& j, int dim, const char* what) {
    if (j.is_number()) {
        if (dim != 1) throw InvalidArgument(std::string(what) + " must be an array in dimension " + std::to_string(dim));
        return Vec::Constant(1, j.get<double>());
    }
    const auto v = j.get<std::vector<double>>();
    if (static_cast<int>(v.size()) != dim) throw InvalidArgument(std::string(what) + " has the wrong dimension");
    return Eigen::Map<const Vec>(v.data(), dim);
}

const char* type_name(LevyMeasure::Representation r) {
    switch (r) {
        case LevyMeasure::Representation::Zero:
            return "zero";
        case LevyMeasure::Representation::Discrete:
            return "discrete";
        case LevyMeasure::Representation::Radial:
            return "radial";
        case LevyMeasure::Representation::Family:
            return "family";
        case LevyMeasure::Representation::Mixed:
            return "mixed";
    }
    return "mixed";
}

int first_dim(const json& m) {
    auto size_of = [](const json& v) { return v.is_number() ? 1 : static_cast<int>(v.size()); };
    if (m.contains("atoms") && !m["atoms"].empty()) return size_of(m["atoms"][0].at("x"));
    if (m.contains("rays") && !m["rays"].empty()) return size_of(m["rays"][0].at("u"));
    if (m.contains("families") && !m["families"].empty()) {
        const auto& f = m["families"][0];
        if (f.contains("direction")) return size_of(f["direction"]);
        if (f.contains("spectral") && !f["spectral"].empty()) return size_of(f["spectral"][0].at("u"));
    }
    return 1;
}

}  // namespace

json to_json(const LevyMeasure& m) {
    json j;
    j["type"] = type_name(m.representation());
    j["atoms"] = json::array();
    for (const auto& a : m.atoms()) j["atoms"].push_back({{"x", vec_json(a.x)}, {"mass", a.mass}});
    j["rays"] = json::array();
    for (const auto& r : m.rays()) {
        j["rays"].push_back({{"u", vec_json(r.u)}, {"weight", r.weight}, {"density", r.density.to_json()}});
    }
    j["families"] = json::array();
    for (const auto& f : m.families()) {
        std::visit(
            [&](const auto& fam) {
                using T = std::decay_t<decltype(fam)>;
                if constexpr (std::is_same_v<T, StableFamily>) {
                    json sp = json::array();
                    for (const auto& s : fam.spectral) sp.push_back({{"u", vec_json(s.u)}, {"w", s.w}});
                    j["families"].push_back({{"type", "stable"}, {"p", fam.p}, {"spectral", sp}});
                } else if constexpr (std::is_same_v<T, GammaFamily>) {
                    j["families"].push_back({{"type", "gamma"},
                                             {"shape", fam.shape},
                                             {"rate", fam.rate},
                                             {"direction", vec_json(fam.direction)}});
                } else {
                    j["families"].push_back({{"type", "laplace"}, {"direction", vec_json(fam.direction)}});
                }
            },
            f);
    }
    return j;
}

json to_json(const LevyTriplet& t) {
    json cov = json::array();
    for (int i = 0; i < t.dim(); ++i) cov.push_back(vec_json(t.cov().row(i).transpose()));
    return {{"shift", vec_json(t.shift())}, {"cov", cov}, {"measure", to_json(t.measure())}};
}

LevyMeasure measure_from_json(const json& j, int dim) {
    LevyMeasure m(dim);
    if (j.contains("atoms")) {
        for (const auto& a : j["atoms"]) m.add_atom({vec_from(a.at("x"), dim, "atom"), a.at("mass").get<double>()});
    }
    if (j.contains("rays")) {
        for (const auto& r : j["rays"]) {
            m.add_ray({vec_from(r.at("u"), dim, "ray direction"), r.value("weight", 1.0),
                       RadialDensity::from_json(r.at("density"))});
        }
    }
    if (j.contains("families")) {
        for (const auto& f : j["families"]) {
            const auto type = f.at("type").get<std::string>();
            if (type == "stable") {
                StableFamily s{f.at("p").get<double>(), {}};
                for (const auto& sp : f.at("spectral")) {
                    s.spectral.push_back({vec_from(sp.at("u"), dim, "spectral point"), sp.at("w").get<double>()});
                }
                m.add_family(s);
            } else if (type == "gamma") {
                m.add_family(GammaFamily{f.at("shape").get<double>(), f.at("rate").get<double>(),
                                         vec_from(f.at("direction"), dim, "gamma direction")});
            } else if (type == "laplace") {
                m.add_family(LaplaceFamily{vec_from(f.at("direction"), dim, "Laplace direction")});
            } else {
                throw InvalidArgument("unknown measure family \"" + type + "\"");
            }
        }
    }
    m.validate();
    return m;
}

LevyTriplet triplet_from_json(const json& j) {
    try {
        int dim = 1;
        if (j.contains("shift")) dim = j["shift"].is_number() ? 1 : static_cast<int>(j["shift"].size());
        else if (j.contains("cov")) dim = j["cov"].is_number() ? 1 : static_cast<int>(j["cov"].size());
        else if (j.contains("measure")) dim = first_dim(j["measure"]);
        if (dim < 1) throw InvalidArgument("triplet dimension must be at least 1");

        const Vec shift = j.contains("shift") ? vec_from(j["shift"], dim, "shift") : Vec::Zero(dim);
        Mat cov = Mat::Zero(dim, dim);
        if (j.contains("cov")) {
            const auto& c = j["cov"];
            if (c.is_number()) {
                if (dim != 1) throw InvalidArgument("cov must be a matrix in dimension " + std::to_string(dim));
                cov(0, 0) = c.get<double>();
            } else {
                if (static_cast<int>(c.size()) != dim) throw InvalidArgument("cov has the wrong dimension");
                for (int i = 0; i < dim; ++i) cov.row(i) = vec_from(c[i], dim, "cov row").transpose();
            }
        }
        LevyMeasure m = j.contains("measure") ? measure_from_json(j["measure"], dim) : LevyMeasure(dim);
        return LevyTriplet(shift, cov, std::move(m));
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("malformed triplet JSON: ") + e.what());
    }
}

LevyTriplet load_triplet(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open triplet file " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw InvalidArgument("cannot parse " + path + ": " + e.what());
    }
    return triplet_from_json(j);
}

}  // namespace levycalc
