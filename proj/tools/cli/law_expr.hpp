#pragma once

// Law expressions for the command line:
//
//   stable(p, scale[, d])       -scale * sum_k |y_k|^p
//   laplace()                   -log(1 + y^2)
//   gaussian(sigma2)            -sigma2 y^2 / 2
//   gamma(shape, rate)          -shape log(1 - i y / rate)
//   cpoisson(lambda, [(x, w), ...])
//                               lambda * sum_k w_k (e^{i<y,x_k>} - 1); x may be [x1, x2, ...]
//   triplet(file=path)          JSON triplet

#include <optional>
#include <string>
#include <string_view>

#include <levycalc/exponent.hpp>

namespace levycalc::cli {

struct Law {
    std::string text;
    Exponent exponent;
    std::optional<LevyTriplet> triplet;

    int dim() const { return exponent.dim(); }
};

/// Throws ParseError for malformed input and InvalidArgument for parameters
/// outside their ranges.
Law parse_law(std::string_view text, const QuadratureConfig& cfg = {});

}  // namespace levycalc::cli
