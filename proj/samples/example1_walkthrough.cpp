// Parses a small framework, lists its stable extensions and explains why
// c_1(img_2) is not accepted.

#include <fstream>
#include <iostream>
#include <sstream>

#include "nal/arguments.hpp"
#include "nal/parser.hpp"

int main(int argc, char** argv) {
    std::string path = argc > 1 ? argv[1] : "samples/example1.aba";
    std::ifstream in(path);
    if (!in) {
        std::cerr << "cannot open " << path << "\n";
        return 1;
    }
    std::stringstream buf;
    buf << in.rdbuf();

    auto fw = nal::parse_framework(buf.str());
    auto g = nal::ground(fw);
    auto exts = nal::stable_extensions(g);
    std::cout << exts.size() << " stable extension(s)\n";
    for (const auto& e : exts) {
        std::cout << "  assumptions:";
        for (auto a : e.assumptions) std::cout << ' ' << g.text(a);
        std::cout << "\n  closure:";
        for (auto a : e.closure()) std::cout << ' ' << g.text(a);
        std::cout << '\n';
    }

    for (const char* claim : {"c_1(img_1)", "c_1(img_2)"}) {
        auto atom = nal::parse_atom(claim);
        std::cout << claim << (nal::is_cautious(g, exts, atom) ? " accepted\n" : " rejected\n");
        auto args = nal::construct_arguments(g, atom);
        for (const auto& a : args) {
            std::cout << "  " << a.to_string() << '\n';
            for (const auto& asm_atom : a.support_assumptions) {
                auto contrary = g.atoms[g.contrary(*g.atoms.find(asm_atom))];
                for (const auto& attacker : nal::construct_arguments(g, contrary))
                    std::cout << "    attacked by " << attacker.to_string() << '\n';
            }
        }
    }
}
