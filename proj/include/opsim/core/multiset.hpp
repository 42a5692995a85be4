#pragma once

#include <cstdint>
#include <initializer_list>
#include <map>
#include <string>
#include <string_view>
#include <utility>

#include "opsim/core/symbol.hpp"

namespace opsim {

using Count = std::int64_t;

/// Finite bag of symbols. Absent symbols have count zero; stored counts are
/// always positive.
class Multiset {
   public:
    using Storage = std::map<Symbol, Count>;
    using const_iterator = Storage::const_iterator;

    Multiset() = default;
    Multiset(std::initializer_list<std::pair<std::string_view, Count>> entries);

    static Multiset of(Symbol s, Count n = 1);

    Count count(Symbol s) const noexcept;
    /// Sum of all multiplicities.
    Count total() const noexcept;
    bool empty() const noexcept { return entries_.empty(); }
    std::size_t distinct() const noexcept { return entries_.size(); }

    /// Throws OverflowError when a count would exceed the machine bound.
    void add(Symbol s, Count n = 1);
    void add(const Multiset& other);
    /// Throws UnderflowError when fewer than `n` copies are present.
    void remove(Symbol s, Count n = 1);
    void remove(const Multiset& other);

    bool contains(const Multiset& needle) const noexcept;

    const_iterator begin() const noexcept { return entries_.begin(); }
    const_iterator end() const noexcept { return entries_.end(); }

    /// `{a:2, b:1}`; empty multiset is `{}`.
    std::string to_string() const;

    friend bool operator==(const Multiset&, const Multiset&) = default;

   private:
    Storage entries_;
};

bool multiset_contains(const Multiset& haystack, const Multiset& needle) noexcept;
Multiset multiset_add(const Multiset& a, const Multiset& b);
Multiset multiset_subtract(const Multiset& a, const Multiset& b);

/// Checked addition of counts.
Count checked_add(Count a, Count b);

}  // namespace opsim
