#include "ocstab/catalog.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace ocstab {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

struct Atom {
    std::string name;
    std::vector<double> args;
};

std::string strip(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

Atom parse_atom(const std::string& text) {
    const std::string t = strip(text);
    const size_t open = t.find('(');
    if (open == std::string::npos || t.back() != ')')
        throw std::invalid_argument("field expression atom '" + t +
                                    "' is not of the form name(args); " + field_catalog_help());
    Atom a;
    a.name = strip(t.substr(0, open));
    const std::string inner = t.substr(open + 1, t.size() - open - 2);
    std::string cur;
    for (char ch : inner + ",") {
        if (ch == ',') {
            const std::string v = strip(cur);
            if (!v.empty()) {
                size_t pos = 0;
                double x;
                try {
                    x = std::stod(v, &pos);
                } catch (const std::exception&) {
                    throw std::invalid_argument("malformed number '" + v + "' in field atom '" +
                                                t + "'");
                }
                if (pos != v.size())
                    throw std::invalid_argument("malformed number '" + v + "' in field atom '" +
                                                t + "'");
                a.args.push_back(x);
            }
            cur.clear();
        } else {
            cur += ch;
        }
    }
    return a;
}

GridField eval_atom(const Atom& a, const GridDomain& d) {
    auto need = [&](size_t lo, size_t hi) {
        if (a.args.size() < lo || a.args.size() > hi)
            throw std::invalid_argument("field atom '" + a.name + "' got " +
                                        std::to_string(a.args.size()) + " arguments; " +
                                        field_catalog_help());
    };
    if (a.name == "constant") {
        need(1, 1);
        return GridField(d, a.args[0]);
    }
    if (a.name == "linear") {
        need(3, 3);
        const int axis = static_cast<int>(a.args[0]);
        if (axis < 0 || axis >= d.dim)
            throw std::invalid_argument("linear(axis,...): axis out of range for this grid");
        const double slope = a.args[1], offset = a.args[2];
        return sample(d, [&](double x, double y) {
            return offset + slope * (axis == 0 ? x : y);
        });
    }
    if (a.name == "sinpi") {
        need(static_cast<size_t>(1 + d.dim), static_cast<size_t>(1 + d.dim));
        const double amp = a.args[0];
        return sample(d, [&](double x, double y) {
            double v = amp;
            const double xh = (x - d.lo[0]) / (d.hi[0] - d.lo[0]);
            v *= std::sin(a.args[1] * kPi * xh);
            if (d.dim == 2) {
                const double yh = (y - d.lo[1]) / (d.hi[1] - d.lo[1]);
                v *= std::sin(a.args[2] * kPi * yh);
            }
            return v;
        });
    }
    if (a.name == "bump") {
        need(3, 3);
        const double center = a.args[0], width = a.args[1], height = a.args[2];
        if (!(width > 0.0)) throw std::invalid_argument("bump(center,width,height): width <= 0");
        return sample(d, [&](double x, double y) {
            auto b1 = [&](double t) {
                const double r = (t - center) / width;
                const double q = std::max(0.0, 1.0 - r * r);
                return q * q;
            };
            double v = height * b1(x);
            if (d.dim == 2) v *= b1(y);
            return v;
        });
    }
    if (a.name == "indicator") {
        need(3, 3);
        const double lo = a.args[0], hi = a.args[1], value = a.args[2];
        return sample(d, [&](double x, double y) {
            bool in = x >= lo && x <= hi;
            if (d.dim == 2) in = in && y >= lo && y <= hi;
            return in ? value : 0.0;
        });
    }
    throw std::invalid_argument("unknown field atom '" + a.name + "'; " + field_catalog_help());
}

}  // namespace

GridField parse_field(const std::string& expr, const GridDomain& d) {
    // Split the product at '*' tokens that sit outside parentheses.
    std::vector<std::string> parts;
    int depth = 0;
    std::string cur;
    for (char ch : expr) {
        if (ch == '(') ++depth;
        if (ch == ')') --depth;
        if (ch == '*' && depth == 0) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    parts.push_back(cur);
    if (parts.empty() || strip(expr).empty())
        throw std::invalid_argument("empty field expression; " + std::string(field_catalog_help()));

    GridField out = eval_atom(parse_atom(parts[0]), d);
    for (size_t i = 1; i < parts.size(); ++i)
        out = hadamard(out, eval_atom(parse_atom(parts[i]), d));
    return out;
}

const char* field_catalog_help() {
    return "catalog: constant(c), linear(axis,slope,offset), sinpi(amplitude,modes per axis), "
           "bump(center,width,height), indicator(a,b,value); atoms may be multiplied with '*'";
}

}  // namespace ocstab
