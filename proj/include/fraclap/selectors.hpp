#pragma once

#include <charconv>
#include <string>
#include <string_view>
#include <vector>

#include "dirichlet.hpp"
#include "errors.hpp"
#include "field.hpp"

// Tiny grammar naming data fields on the command line:
//   zero | const:c | affine:a,b | bump:c,r | quartic:c,r[,amp] | pbump:c,r,m | chi:a,b[,amp]
//   poly:c0,c1,... | gauss:c,w[,amp] | dpow:beta[,amp] | pm:a,b (boundary data only)
// Centres are points on the first axis.

namespace fraclap::selectors {

inline constexpr const char* kGrammar =
    "zero | const:c | affine:a,b | bump:c,r | quartic:c,r[,amp] | pbump:c,r,m | chi:a,b[,amp] | "
    "poly:c0,c1,... | gauss:c,w[,amp] | dpow:beta[,amp] | pm:a,b (boundary data)";

namespace detail {

inline std::vector<double> numbers(std::string_view text, std::string_view spec) {
    std::vector<double> out;
    if (text.empty()) return out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = std::min(text.find(',', pos), text.size());
        const std::string item(text.substr(pos, comma - pos));
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw DomainError("selector '" + std::string(spec) + "': '" + item + "' is not a number");
        }
        pos = comma + 1;
    }
    return out;
}

inline void arity(const std::vector<double>& a, std::size_t lo, std::size_t hi, std::string_view spec) {
    if (a.size() < lo || a.size() > hi)
        throw DomainError("selector '" + std::string(spec) + "': wrong number of arguments (grammar: " + kGrammar + ")");
}

template <int N>
Vec<N> on_axis(double c) {
    Vec<N> v{};
    v[0] = c;
    return v;
}

} // namespace detail

template <int N>
ScalarField<N> parse_field(std::string_view spec) {
    const auto colon = spec.find(':');
    const std::string_view head = spec.substr(0, colon);
    const auto a = detail::numbers(colon == std::string_view::npos ? std::string_view{} : spec.substr(colon + 1), spec);
    ScalarField<N> u;
    if (head == "zero") {
        detail::arity(a, 0, 0, spec);
        u = field::constant<N>(0.0);
    } else if (head == "const") {
        detail::arity(a, 1, 1, spec);
        u = field::constant<N>(a[0]);
    } else if (head == "affine") {
        detail::arity(a, 2, 2, spec);
        u = field::affine<N>(a[0], detail::on_axis<N>(a[1]));
    } else if (head == "bump") {
        detail::arity(a, 2, 2, spec);
        u = field::smooth_bump<N>(detail::on_axis<N>(a[0]), a[1]);
    } else if (head == "quartic") {
        detail::arity(a, 2, 3, spec);
        u = field::quartic_bump<N>(detail::on_axis<N>(a[0]), a[1], a.size() > 2 ? a[2] : 1.0);
    } else if (head == "pbump") {
        detail::arity(a, 3, 3, spec);
        u = field::power_bump<N>(detail::on_axis<N>(a[0]), a[1], static_cast<int>(a[2]));
    } else if (head == "chi") {
        detail::arity(a, 2, 3, spec);
        u = field::indicator<N>(a[0], a[1], a.size() > 2 ? a[2] : 1.0);
    } else if (head == "poly") {
        detail::arity(a, 1, 64, spec);
        u = field::poly_in_ball<N>(a);
    } else if (head == "gauss") {
        detail::arity(a, 2, 3, spec);
        u = field::gaussian<N>(detail::on_axis<N>(a[0]), a[1], a.size() > 2 ? a[2] : 1.0);
    } else if (head == "dpow") {
        detail::arity(a, 1, 2, spec);
        u = field::delta_power<N>(a[0], a.size() > 1 ? a[1] : 1.0);
    } else {
        throw DomainError("unknown selector '" + std::string(spec) + "' (grammar: " + kGrammar + ")");
    }
    u.name = std::string(spec);
    return u;
}

/// Boundary data: any field selector restricted to the sphere, or pm:a,b for the values
/// at z = -1 and z = +1 when N = 1.
template <int N>
BoundaryFunction<N> parse_boundary(std::string_view spec) {
    if (spec.starts_with("pm:")) {
        const auto a = detail::numbers(spec.substr(3), spec);
        detail::arity(a, 2, 2, spec);
        if constexpr (N != 1) throw DomainError("selector 'pm' needs N = 1");
        return [lo = a[0], hi = a[1]](const Vec<N>& z) { return z[0] < 0.0 ? lo : hi; };
    }
    const auto u = parse_field<N>(spec);
    // closed-ball fields vanish on the sphere by construction; use the interior limit
    return [u](const Vec<N>& z) {
        Vec<N> x = z;
        for (auto& c : x) c *= 1.0 - 1e-12;
        const double inner = u(x);
        const double at = u(z);
        return at == 0.0 ? inner : at;
    };
}

} // namespace fraclap::selectors
