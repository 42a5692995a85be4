#include "opsim/models/models.hpp"

#include <charconv>

namespace opsim::models {

namespace {

Symbol level(char prefix, int age) { return Symbol(std::string(1, prefix) + std::to_string(age)); }

// Offspring line: divide while young, then age, then die.
void add_lineage(pps::Model& m, Symbol type, char prefix, int maturity, int death) {
    for (int k = 0; k <= death; ++k) m.alphabet.insert(level(prefix, k));
    for (int k = 0; k < death; ++k) {
        if (k < maturity) {
            m.rules.push_back(pps::Divide{level(prefix, k), level(prefix, k + 1), level(prefix, k + 1), type, {}});
        } else {
            m.rules.push_back(pps::Transform{level(prefix, k), Multiset::of(level(prefix, k + 1)), type});
        }
    }
    m.rules.push_back(pps::Die{level(prefix, death), type});
}

}  // namespace

pps::Model build_tumour(const TumourParams& p) {
    if (p.grid_width < 1 || p.grid_height < 1) throw ParameterError("grid must be at least 1x1");
    if (p.maturity_age < 0) throw ParameterError("maturity age must be non-negative");
    if (p.metatransitory_death_age < 1) throw ParameterError("metatransitory death age must be positive");
    if (p.metatransitory_death_age >= p.transitory_death_age) {
        throw ParameterError("metatransitory death age (" + std::to_string(p.metatransitory_death_age) +
                             ") must be below the transitory death age (" + std::to_string(p.transitory_death_age) +
                             ")");
    }

    const Symbol stem(kStem);
    const Symbol transitory(kTransitory);
    const Symbol meta(kMetatransitory);
    const Symbol s("s");
    const Symbol ms("ms");

    pps::Model m;
    m.types = {stem, transitory, meta};
    m.alphabet = {s, ms};
    m.cells.push_back({stem, Multiset::of(s)});

    m.rules.push_back(pps::Divide{s, s, level('a', 0), stem, transitory});
    m.rules.push_back(pps::Divide{s, s, ms, stem, {}});
    m.rules.push_back(pps::Divide{ms, ms, level('m', 0), stem, meta});
    m.rules.push_back(pps::Divide{ms, ms, ms, stem, {}});

    add_lineage(m, transitory, 'a', p.maturity_age, p.transitory_death_age);
    add_lineage(m, meta, 'm', std::min(p.maturity_age, p.metatransitory_death_age), p.metatransitory_death_age);

    pps::validate(m);
    return m;
}

std::optional<int> tumour_age(const pps::Cell& cell) {
    static const Symbol stem(kStem);
    static const Symbol transitory(kTransitory);
    if (cell.type == stem) return 0;
    const char prefix = cell.type == transitory ? 'a' : 'm';
    for (const auto& [sym, n] : cell.contents) {
        const std::string& name = sym.name();
        if (name.size() < 2 || name[0] != prefix) continue;
        int age = 0;
        const auto [end, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), age);
        if (ec == std::errc{} && end == name.data() + name.size()) return age;
    }
    return std::nullopt;
}

}  // namespace opsim::models
