#include "susyode/algebra.hpp"

#include <cstdio>

namespace susyode::grassmann {

std::string word_label(Word w) {
    if (w == 0) return "1";
    std::string out;
    for (int k = 1; k <= kMaxGenerators; ++k)
        if (w & (Word(1) << (k - 1))) out += "e" + std::to_string(k);
    return out;
}

std::string word_wedge(Word w) {
    std::string out;
    for (int k = 1; k <= kMaxGenerators; ++k) {
        if (w & (Word(1) << (k - 1))) {
            if (!out.empty()) out += "^";
            out += "e" + std::to_string(k);
        }
    }
    return out;
}

std::string format_coefficient(const Rational& c) { return c.get_str(); }

std::string format_coefficient(double c) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", c);
    return buf;
}

} // namespace susyode::grassmann
