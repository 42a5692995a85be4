#include "opsim/core/multiset.hpp"

#include <limits>

#include "opsim/core/error.hpp"

namespace opsim {

Count checked_add(Count a, Count b) {
    Count out = 0;
    if (__builtin_add_overflow(a, b, &out)) throw OverflowError("multiset count overflow");
    return out;
}

Multiset::Multiset(std::initializer_list<std::pair<std::string_view, Count>> entries) {
    for (const auto& [name, n] : entries) add(Symbol(name), n);
}

Multiset Multiset::of(Symbol s, Count n) {
    Multiset m;
    m.add(s, n);
    return m;
}

Count Multiset::count(Symbol s) const noexcept {
    auto it = entries_.find(s);
    return it == entries_.end() ? 0 : it->second;
}

Count Multiset::total() const noexcept {
    Count sum = 0;
    for (const auto& [s, n] : entries_) sum += n;
    return sum;
}

void Multiset::add(Symbol s, Count n) {
    if (n < 0) throw UnderflowError("negative multiplicity for '" + s.name() + "'");
    if (n == 0) return;
    auto [it, inserted] = entries_.try_emplace(s, 0);
    it->second = checked_add(it->second, n);
}

void Multiset::add(const Multiset& other) {
    for (const auto& [s, n] : other.entries_) add(s, n);
}

void Multiset::remove(Symbol s, Count n) {
    if (n < 0) throw UnderflowError("negative multiplicity for '" + s.name() + "'");
    if (n == 0) return;
    auto it = entries_.find(s);
    Count have = it == entries_.end() ? 0 : it->second;
    if (have < n) {
        throw UnderflowError("cannot remove " + std::to_string(n) + " of '" + s.name() +
                             "', only " + std::to_string(have) + " present");
    }
    if (have == n) {
        entries_.erase(it);
    } else {
        it->second -= n;
    }
}

void Multiset::remove(const Multiset& other) {
    if (!contains(other)) {
        throw UnderflowError("cannot subtract " + other.to_string() + " from " + to_string());
    }
    for (const auto& [s, n] : other.entries_) remove(s, n);
}

bool Multiset::contains(const Multiset& needle) const noexcept {
    for (const auto& [s, n] : needle.entries_) {
        if (count(s) < n) return false;
    }
    return true;
}

std::string Multiset::to_string() const {
    std::string out = "{";
    bool first = true;
    for (const auto& [s, n] : entries_) {
        if (!first) out += ", ";
        first = false;
        out += s.name();
        out += ':';
        out += std::to_string(n);
    }
    out += '}';
    return out;
}

bool multiset_contains(const Multiset& haystack, const Multiset& needle) noexcept {
    return haystack.contains(needle);
}

Multiset multiset_add(const Multiset& a, const Multiset& b) {
    Multiset out = a;
    out.add(b);
    return out;
}

Multiset multiset_subtract(const Multiset& a, const Multiset& b) {
    Multiset out = a;
    out.remove(b);
    return out;
}

}  // namespace opsim
