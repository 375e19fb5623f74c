#include <CLI11.hpp>
#include <iostream>

#include "acceptance.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Runs the acceptance criteria and prints one pass/fail line per criterion"};
    bsl::acceptance::Options opt;
    app.add_option("--seed", opt.seed, "seed for the randomized corpora");
    app.add_option("--only", opt.only, "criterion ids to run");
    CLI11_PARSE(app, argc, argv);
    const auto res = bsl::acceptance::run_all(opt, std::cout);
    int failed = 0;
    for (const auto& c : res) failed += c.passed ? 0 : 1;
    std::cout << (res.size() - failed) << "/" << res.size() << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 2;
}
