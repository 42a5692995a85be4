#include "opsim/core/symbol.hpp"

#include <mutex>
#include <unordered_set>

namespace opsim {
namespace {

struct Interner {
    std::mutex mutex;
    std::unordered_set<std::string> names;  // node-based: element addresses are stable

    const std::string* intern(std::string_view name) {
        std::lock_guard lock(mutex);
        return &*names.emplace(name).first;
    }
};

Interner& interner() {
    static Interner instance;
    return instance;
}

}  // namespace

Symbol::Symbol() : name_(interner().intern("")) {}

Symbol::Symbol(std::string_view name) : name_(interner().intern(name)) {}

}  // namespace opsim
