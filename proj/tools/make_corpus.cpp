// Writes the builder-backed corpus models as canonical .opml files.
#include <filesystem>
#include <fstream>
#include <iostream>

#include "opsim/dsl/parser.hpp"
#include "opsim/models/models.hpp"

namespace {

bool write(const std::filesystem::path& path, const opsim::dsl::ModelDocument& doc, const char* comment) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        std::cerr << path.string() << ": cannot write\n";
        return false;
    }
    out << "// " << comment << "\n" << opsim::dsl::print(doc);
    std::cout << "wrote " << path.string() << '\n';
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace opsim;
    const std::filesystem::path dir = argc > 1 ? argv[1] : "corpus";
    std::filesystem::create_directories(dir);
    bool ok = true;
    ok &= write(dir / "tumour.opml", dsl::make_document(models::build_tumour(), "tumour"),
                "Tumour growth, default parameters: T_mat=3, D_t=6, D_m=4.");
    ok &= write(dir / "ants.opml", dsl::make_document(models::build_ants(), "ants"),
                "Ant colony, 6 ants on a 10x10 grid, threshold 5, 3 food piles, seed 0.");
    ok &= write(dir / "food_exchange.opml", dsl::make_document(models::build_food_exchange(), "food_exchange"),
                "Two ants sharing food over one channel: donor 10, receiver 2, threshold 5.");
    return ok ? 0 : 1;
}
