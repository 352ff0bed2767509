#pragma once

namespace susyode {

/// Grading of an element of a Grassmann algebra or graded polynomial ring.
/// Zero counts as Even everywhere.
enum class Parity { Even, Odd, Mixed };

inline Parity flip(Parity p) {
    if (p == Parity::Even) return Parity::Odd;
    if (p == Parity::Odd) return Parity::Even;
    return Parity::Mixed;
}

inline const char* parity_name(Parity p) {
    switch (p) {
        case Parity::Even: return "even";
        case Parity::Odd: return "odd";
        default: return "mixed";
    }
}

} // namespace susyode
