// nilflow-lab: batch front door for the nilflow shared library.

#include <CLI11.hpp>
#include <clocale>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "nilflow.h"

namespace {

std::string one_line(std::string s) {
    for (auto& c : s)
        if (c == '\n') c = ';';
    while (!s.empty() && (s.back() == ';' || s.back() == ' ')) s.pop_back();
    return s;
}

int fail(int code, const std::string& reason) {
    std::fprintf(stderr, "error: %s\n", one_line(reason).c_str());
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    std::setlocale(LC_ALL, "C");

    CLI::App app{"nilflow-lab: ergodic-average experiments on Heisenberg nilmanifolds"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    int threads = 1;
    std::uint64_t seed = 0;
    bool seed_given = false;

    auto* run_cmd = app.add_subcommand("run", "run an experiment configuration");
    run_cmd->add_option("config", config_path, "path to the config file")->required();
    run_cmd->add_option("--out", out_dir, "output directory (overrides [output] dir)");
    run_cmd->add_option("--threads", threads, "worker threads (default 1)")
        ->check(CLI::Range(1, 256));
    auto* seed_opt = run_cmd->add_option("--seed", seed, "seed override");

    auto* check_cmd = app.add_subcommand("check", "validate a configuration and exit");
    check_cmd->add_option("config", config_path, "path to the config file")->required();

    auto* presets_cmd = app.add_subcommand("presets", "list named alpha presets");

    CLI11_PARSE(app, argc, argv);
    seed_given = seed_opt->count() > 0;

    if (presets_cmd->parsed()) {
        char buf[256];
        if (nf_presets(buf, sizeof buf) != NF_OK) return fail(1, nf_last_error());
        std::fputs(buf, stdout);
        return 0;
    }

    char errbuf[8192];
    nf_config* cfg = nullptr;
    nf_status st = nf_config_parse_file(config_path.c_str(), &cfg, errbuf, sizeof errbuf);
    if (st == NF_ERR_IO) return fail(4, errbuf);
    if (st != NF_OK) return fail(2, std::string("config: ") + errbuf);

    if (check_cmd->parsed()) {
        std::printf("ok: %s\n", config_path.c_str());
        nf_config_free(cfg);
        return 0;
    }

    int exit_code = 0;
    char msgbuf[4096];
    st = nf_run(cfg, out_dir.empty() ? nullptr : out_dir.c_str(), threads, seed_given ? 1 : 0, seed,
                &exit_code, msgbuf, sizeof msgbuf);
    nf_config_free(cfg);
    if (st != NF_OK) return fail(1, nf_last_error());
    if (exit_code != 0) return fail(exit_code, msgbuf);
    std::printf("wrote %s\n", msgbuf);
    return 0;
}
