#pragma once

#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "ert/geometry.hpp"

namespace ert {

/// Constant disk: amplitude on ||x - center|| < radius, 0 outside.
/// Forward transform available in closed form; not in H(beta, L) for beta > 1/2,
/// so disks serve as forward oracles only.
struct DiskComponent {
    Vec2 center;
    double radius = 0.0;
    double amplitude = 0.0;
};

/// Smooth bump: amplitude * exp(1 - 1/(1 - r^2)) for r = ||x - center||/scale < 1,
/// 0 outside. Infinitely smooth, hence in H(beta, L) for every beta.
struct BumpComponent {
    Vec2 center;
    double scale = 0.0;
    double amplitude = 0.0;
};

using PhantomComponent = std::variant<DiskComponent, BumpComponent>;

namespace detail {

inline void validate_component(const PhantomComponent& comp) {
    if (const auto* d = std::get_if<DiskComponent>(&comp)) {
        if (!(d->radius > 0.0)) throw std::invalid_argument("phantom: disk radius must be > 0");
        if (d->center.norm() + d->radius > 1.0)
            throw std::invalid_argument("phantom: disk support must lie inside the unit ball");
    } else {
        const auto& b = std::get<BumpComponent>(comp);
        if (!(b.scale > 0.0)) throw std::invalid_argument("phantom: bump scale must be > 0");
        if (b.center.norm() + b.scale > 1.0)
            throw std::invalid_argument("phantom: bump support must lie inside the unit ball");
    }
}

}  // namespace detail

/// Analytic test function supported in the closed unit ball: a sum of disks
/// and smooth bumps. Immutable after construction; construction validates the
/// support and positivity invariants.
class Phantom {
  public:
    Phantom() = default;
    explicit Phantom(std::vector<PhantomComponent> components)
        : components_(std::move(components)) {
        for (const auto& c : components_) detail::validate_component(c);
    }

    const std::vector<PhantomComponent>& components() const { return components_; }
    bool empty() const { return components_.empty(); }

  private:
    std::vector<PhantomComponent> components_;
};

inline double eval_component(const PhantomComponent& comp, Vec2 x) {
    if (const auto* d = std::get_if<DiskComponent>(&comp)) {
        return (x - d->center).norm_sq() < d->radius * d->radius ? d->amplitude : 0.0;
    }
    const auto& b = std::get<BumpComponent>(comp);
    const double r2 = (x - b.center).norm_sq() / (b.scale * b.scale);
    if (r2 >= 1.0) return 0.0;
    return b.amplitude * std::exp(1.0 - 1.0 / (1.0 - r2));
}

/// Pointwise value f(x); exactly 0 outside the unit ball by the support invariant.
inline double eval_phantom(const Phantom& phantom, Vec2 x) {
    double v = 0.0;
    for (const auto& c : phantom.components()) v += eval_component(c, x);
    return v;
}

// ---- JSON representation ----
// {"components":[{"kind":"disk"|"bump","center":[x,y],"radius"|"scale":r,"amplitude":a}]}

inline Phantom phantom_from_json(const nlohmann::json& j) {
    std::vector<PhantomComponent> comps;
    if (!j.contains("components") || !j["components"].is_array())
        throw std::invalid_argument("phantom json: missing \"components\" array");
    for (const auto& c : j["components"]) {
        const std::string kind = c.at("kind").get<std::string>();
        const auto ctr = c.at("center");
        const Vec2 center{ctr.at(0).get<double>(), ctr.at(1).get<double>()};
        const double amplitude = c.at("amplitude").get<double>();
        if (kind == "disk") {
            comps.push_back(DiskComponent{center, c.at("radius").get<double>(), amplitude});
        } else if (kind == "bump") {
            comps.push_back(BumpComponent{center, c.at("scale").get<double>(), amplitude});
        } else {
            throw std::invalid_argument("phantom json: unknown component kind \"" + kind + "\"");
        }
    }
    return Phantom(std::move(comps));
}

inline nlohmann::json phantom_to_json(const Phantom& phantom) {
    nlohmann::json comps = nlohmann::json::array();
    for (const auto& c : phantom.components()) {
        nlohmann::json jc;
        if (const auto* d = std::get_if<DiskComponent>(&c)) {
            jc["kind"] = "disk";
            jc["center"] = {d->center.x, d->center.y};
            jc["radius"] = d->radius;
            jc["amplitude"] = d->amplitude;
        } else {
            const auto& b = std::get<BumpComponent>(c);
            jc["kind"] = "bump";
            jc["center"] = {b.center.x, b.center.y};
            jc["scale"] = b.scale;
            jc["amplitude"] = b.amplitude;
        }
        comps.push_back(jc);
    }
    return nlohmann::json{{"components", comps}};
}

inline Phantom load_phantom(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("phantom: cannot open " + path);
    nlohmann::json j;
    in >> j;
    return phantom_from_json(j);
}

inline void save_phantom(const Phantom& phantom, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("phantom: cannot write " + path);
    out << phantom_to_json(phantom).dump(2) << '\n';
}

}  // namespace ert
