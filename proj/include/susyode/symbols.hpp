#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "susyode/errors.hpp"
#include "susyode/parity.hpp"

namespace susyode::sym {

enum class SymbolKind { Dynamic, Constant };

/// Identifier of a symbol, possibly a time derivative of a declared one.
/// Layout: (base_index << 6) | derivative_order. Derivative ids are formed
/// arithmetically, so the canonical ordering (base first, then order) never
/// depends on creation order.
struct SymbolId {
    std::int32_t v = -1;

    bool valid() const { return v >= 0; }
    auto operator<=>(const SymbolId&) const = default;
};

constexpr int kMaxDerivativeOrder = 63;

inline int base_index(SymbolId s) { return s.v >> 6; }
inline int derivative_order(SymbolId s) { return s.v & 63; }
inline SymbolId base_symbol(SymbolId s) { return {s.v & ~63}; }

/// d^extra/dt^extra applied to s, as an identifier.
inline SymbolId derivative(SymbolId s, int extra = 1) {
    int order = derivative_order(s) + extra;
    if (order > kMaxDerivativeOrder) throw Error("derivative order limit exceeded");
    return {static_cast<std::int32_t>((s.v & ~63) | order)};
}

/// Registry of declared symbols. Derivative symbols are implicit: they share
/// the base record's parity and kind and render as dt(name), dt^2(name), ...
class SymbolTable {
public:
    SymbolId declare(const std::string& name, Parity parity, SymbolKind kind) {
        if (parity == Parity::Mixed) throw ParityError("a symbol must be even or odd");
        if (name.empty()) throw Error("empty symbol name");
        if (by_name_.count(name)) throw Error("duplicate symbol name: " + name);
        recs_.push_back({name, parity, kind});
        int idx = static_cast<int>(recs_.size()) - 1;
        by_name_[name] = idx;
        return {static_cast<std::int32_t>(idx << 6)};
    }

    bool has(const std::string& name) const { return by_name_.count(name) != 0; }

    SymbolId find(const std::string& name) const {
        auto it = by_name_.find(name);
        if (it == by_name_.end()) throw Error("undeclared symbol: " + name);
        return {static_cast<std::int32_t>(it->second << 6)};
    }

    Parity parity(SymbolId s) const { return rec(s).parity; }
    SymbolKind kind(SymbolId s) const { return rec(s).kind; }
    const std::string& base_name(SymbolId s) const { return rec(s).name; }

    std::string name(SymbolId s) const {
        int k = derivative_order(s);
        if (k == 0) return rec(s).name;
        if (k == 1) return "dt(" + rec(s).name + ")";
        return "dt^" + std::to_string(k) + "(" + rec(s).name + ")";
    }

    int size() const { return static_cast<int>(recs_.size()); }
    SymbolId at(int base) const { return {static_cast<std::int32_t>(base << 6)}; }

private:
    struct Rec {
        std::string name;
        Parity parity;
        SymbolKind kind;
    };

    const Rec& rec(SymbolId s) const {
        int b = base_index(s);
        if (b < 0 || b >= static_cast<int>(recs_.size()))
            throw Error("symbol id out of range");
        return recs_[b];
    }

    std::vector<Rec> recs_;
    std::map<std::string, int> by_name_;
};

} // namespace susyode::sym
