#pragma once

#include <gvf/singular.hpp>

#include <string>

namespace gvf {

/// "3,0.1" -> (3, 0.1); "@rx(a)ry(b)" -> vectorised rotation product.
Vec parse_point(const std::string& text);

/// "lo:hi:n,lo:hi:n,..." -> grid axes.
std::vector<GridAxis> parse_box(const std::string& text);

/// "n1,n2,..." -> positive integer counts.
std::vector<int> parse_counts(const std::string& text);

}  // namespace gvf
