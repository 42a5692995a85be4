#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <string>
#include <string_view>

namespace opsim {

/// Interned object symbol. Equality is pointer identity; ordering follows the
/// display name so that every ordered container iterates the same way no
/// matter in which order symbols were first interned.
class Symbol {
   public:
    Symbol();
    explicit Symbol(std::string_view name);

    const std::string& name() const noexcept { return *name_; }
    bool empty() const noexcept { return name_->empty(); }

    friend bool operator==(Symbol a, Symbol b) noexcept { return a.name_ == b.name_; }
    friend std::strong_ordering operator<=>(Symbol a, Symbol b) noexcept {
        if (a.name_ == b.name_) return std::strong_ordering::equal;
        return a.name_->compare(*b.name_) < 0 ? std::strong_ordering::less
                                               : std::strong_ordering::greater;
    }

    std::size_t hash() const noexcept { return std::hash<const void*>{}(name_); }

   private:
    const std::string* name_;
};

}  // namespace opsim

template <>
struct std::hash<opsim::Symbol> {
    std::size_t operator()(opsim::Symbol s) const noexcept { return s.hash(); }
};
