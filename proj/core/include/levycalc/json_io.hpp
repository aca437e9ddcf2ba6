#pragma once

// JSON form of Levy triplets:
//
//   {"shift": [..], "cov": [[..], ..],
//    "measure": {"type": "discrete" | "radial" | "family" | "mixed" | "zero",
//                "atoms": [{"x": [..], "mass": m}],
//                "rays": [{"u": [..], "weight": w, "density": {...}}],
//                "families": [{"type": "stable", "p": p, "spectral": [{"u": [..], "w": w}]},
//                             {"type": "gamma", "shape": a, "rate": b, "direction": [..]},
//                             {"type": "laplace", "direction": [..]}]}}
//
// In dimension one vectors may be plain numbers and "cov" a number. "type" is
// informational on input; every present component list is read.

#include <string>

#include <json.hpp>

#include "levycalc/triplet.hpp"

namespace levycalc {

nlohmann::json to_json(const LevyMeasure& m);
nlohmann::json to_json(const LevyTriplet& t);
LevyMeasure measure_from_json(const nlohmann::json& j, int dim);
/// Infers the dimension from "shift", "cov" or the first measure component.
LevyTriplet triplet_from_json(const nlohmann::json& j);
LevyTriplet load_triplet(const std::string& path);

}  // namespace levycalc
