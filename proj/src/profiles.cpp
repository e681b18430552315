#include "glvar/profiles.hpp"

#include <cstdlib>
#include <sstream>
#include <vector>

namespace glvar {

namespace {

std::vector<double> parse_args(const std::string& inside, const std::string& descriptor) {
    std::vector<double> args;
    std::stringstream ss(inside);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        char* end = nullptr;
        const double v = std::strtod(cell.c_str(), &end);
        if (end == cell.c_str()) {
            throw ConfigError("profile '" + descriptor + "': bad numeric argument '" +
                              cell + "'");
        }
        args.push_back(v);
    }
    return args;
}

}  // namespace

MagneticProfile make_profile(const std::string& descriptor) {
    const std::size_t open = descriptor.find('(');
    const std::size_t close = descriptor.rfind(')');
    if (open == std::string::npos || close == std::string::npos || close < open) {
        throw ConfigError("profile descriptor must look like name(args): '" + descriptor +
                          "'");
    }
    const std::string name = descriptor.substr(0, open);
    const std::vector<double> args =
        parse_args(descriptor.substr(open + 1, close - open - 1), descriptor);

    MagneticProfile p;
    p.name = descriptor;
    if (name == "constant") {
        if (args.size() != 1) throw ConfigError("constant(c) takes one argument");
        const double c = args[0];
        p.value = [c](Point) { return c; };
        p.grad = [](Point) { return Point{0.0, 0.0}; };
    } else if (name == "linear") {
        if (args.size() != 2) throw ConfigError("linear(a,b) takes two arguments");
        const double a = args[0], b = args[1];
        p.value = [a, b](Point q) { return a * q.x + b; };
        p.grad = [a](Point) { return Point{a, 0.0}; };
    } else if (name == "radial") {
        if (args.size() != 2 && args.size() != 4) {
            throw ConfigError("radial(a,b[,cx,cy]) takes two or four arguments");
        }
        const double a = args[0], b = args[1];
        const double cx = args.size() == 4 ? args[2] : 0.5;
        const double cy = args.size() == 4 ? args[3] : 0.5;
        p.value = [a, b, cx, cy](Point q) {
            const double dx = q.x - cx, dy = q.y - cy;
            return a + b * (dx * dx + dy * dy);
        };
        p.grad = [b, cx, cy](Point q) {
            return Point{2.0 * b * (q.x - cx), 2.0 * b * (q.y - cy)};
        };
    } else if (name == "bilinear") {
        if (args.size() != 2) throw ConfigError("bilinear(a,b) takes two arguments");
        const double a = args[0], b = args[1];
        p.value = [a, b](Point q) { return a + b * q.x * q.y; };
        p.grad = [b](Point q) { return Point{b * q.y, b * q.x}; };
    } else {
        throw ConfigError("unknown profile '" + name +
                          "' (catalog: constant, linear, radial, bilinear)");
    }
    return p;
}

}  // namespace glvar
