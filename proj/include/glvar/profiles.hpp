#pragma once

#include <string>

#include "glvar/grid.hpp"

namespace glvar {

/// Built-in applied-field catalog. Descriptors:
///   constant(c)          B0 = c
///   linear(a,b)          B0 = a*x1 + b
///   radial(a,b[,cx,cy])  B0 = a + b*|x - (cx,cy)|^2, center defaults to (0.5, 0.5)
///   bilinear(a,b)        B0 = a + b*x1*x2
/// Gradients are analytic; validity against |B0| + |grad B0| > 0 is checked
/// on the target grid at use sites.
MagneticProfile make_profile(const std::string& descriptor);

}  // namespace glvar
