#include "susyode/superfield.hpp"

#include <algorithm>
#include <cctype>

namespace susyode::superspace {

std::string component_name(const std::string& field, Parity field_parity, int n_theta, Word subset) {
    int level = word_length(subset);
    Parity comp = (level & 1) ? flip(field_parity) : field_parity;
    std::string stem = comp == Parity::Even ? (level <= 1 ? "x" : "chi")
                                            : (level <= 1 ? "xi" : "psi");
    std::string digits;
    if (level > 0 && level < n_theta)
        for (int i = 1; i <= n_theta; ++i)
            if (subset & (Word(1) << (i - 1))) digits += std::to_string(i);

    // trailing tag of the field name: "X12" -> "12", "X" -> ""
    size_t pos = 0;
    while (pos < field.size() && std::isalpha(static_cast<unsigned char>(field[pos]))) ++pos;
    std::string tag = field.substr(pos);

    std::string out = stem + digits;
    if (!tag.empty()) out += digits.empty() ? tag : "_" + tag;
    return out;
}

SuperfieldDecl declare_superfield(SymbolTable& table, const std::string& name, Parity parity,
                                  int n_theta) {
    if (n_theta < 1 || n_theta > grassmann::kMaxGenerators)
        throw Error("superfield " + name + ": N must be between 1 and 16");
    if (parity == Parity::Mixed)
        throw ParityError("superfield " + name + " must be even or odd");
    SuperfieldDecl f;
    f.name = name;
    f.parity = parity;
    f.n_theta = n_theta;
    f.comp.resize(Word(1) << n_theta);

    // declare components in graded subset order so symbol ids follow it
    std::vector<Word> subsets;
    for (Word s = 0; s < f.comp.size(); ++s) subsets.push_back(s);
    std::sort(subsets.begin(), subsets.end(), grassmann::word_less);
    for (Word s : subsets)
        f.comp[s] = table.declare(component_name(name, parity, n_theta, s),
                                  f.component_parity(s), sym::SymbolKind::Dynamic);
    return f;
}

} // namespace susyode::superspace
