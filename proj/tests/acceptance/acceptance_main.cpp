#include <iostream>

#include <CLI11.hpp>

#include "ddslab/xcli.hpp"

using namespace ddslab::xcli;

int main(int argc, char** argv) {
    CLI::App app{"acceptance criteria"};
    std::vector<int> only;
    std::string cache;
    unsigned workers = 1;
    app.add_option("--only", only, "criterion numbers")->check(CLI::Range(1, criterion_count()));
    app.add_option("--coeff-cache", cache, "coefficient cache file");
    app.add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
    CLI11_PARSE(app, argc, argv);

    ExperimentConfig cfg;
    cfg.coeff_cache = cache;
    cfg.workers = workers;
    if (only.empty())
        for (int i = 1; i <= criterion_count(); ++i) only.push_back(i);

    int failed = 0;
    for (int id : only) {
        auto r = run_criterion(id, cfg);
        std::cout << format_criterion(r) << std::endl;
        failed += !r.pass;
    }
    std::cout << provenance() << ": " << only.size() - failed << "/" << only.size() << " passed" << std::endl;
    return failed ? 1 : 0;
}
