#include "susyode/poly.hpp"

#include <algorithm>

namespace susyode::sym {

namespace {

std::string render_monomial(const Monomial& m, const SymbolTable& table) {
    // even factors alphabetically, odd factors in canonical (ascending) order
    std::vector<std::pair<std::string, int>> evens;
    evens.reserve(m.even.size());
    for (const auto& [s, e] : m.even) evens.push_back({table.name(s), e});
    std::sort(evens.begin(), evens.end());

    std::string out;
    for (const auto& [name, e] : evens) {
        if (!out.empty()) out += "*";
        out += name;
        if (e > 1) out += "^" + std::to_string(e);
    }
    std::string odd;
    for (SymbolId s : m.odd) {
        if (!odd.empty()) odd += ".";
        odd += table.name(s);
    }
    if (!odd.empty()) {
        if (!out.empty()) out += "*";
        out += odd;
    }
    return out;
}

} // namespace

std::string GradedPoly::to_string(const SymbolTable& table) const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [m, c] : terms_) {
        bool negative = sgn(c) < 0;
        Rational mag = negative ? Rational(-c) : c;
        if (first) {
            if (negative) out += "-";
            first = false;
        } else {
            out += negative ? " - " : " + ";
        }
        std::string body = render_monomial(m, table);
        if (body.empty()) {
            out += mag.get_str();
        } else if (mag == 1) {
            out += body;
        } else {
            out += mag.get_str() + "*" + body;
        }
    }
    return out;
}

} // namespace susyode::sym
