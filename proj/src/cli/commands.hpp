#ifndef FLAGDECOMP_CLI_COMMANDS_HPP
#define FLAGDECOMP_CLI_COMMANDS_HPP

#include <iosfwd>
#include <optional>
#include <string>

#include "common.hpp"

namespace flagdecomp::cli {

struct DecomposeOptions {
    fs::path data;
    fs::path hierarchy;
    std::string flag_type;
    bool robust = false;
    bool no_validate = false;
    std::optional<fs::path> truth;
    int max_iterations = 100;
    double tolerance = 1e-8;
};

struct ReconstructOptions {
    std::optional<fs::path> from;
    std::optional<fs::path> data;
    std::optional<fs::path> hierarchy;
    std::string flag_type;
    std::string method = "fd";
    int max_iterations = 100;
    double tolerance = 1e-8;
};

struct DistmatOptions {
    fs::path manifest;
    std::string method = "fd";
    std::string metric = "flag_chordal";
};

struct MdsOptions {
    fs::path dist;
    Index dim = 2;
};

struct KnnOptions {
    fs::path dist;
    fs::path labels;
    Index k_min = 6;
    Index k_max = 24;
    int trials = 20;
    double train_fraction = 0.7;
    std::string name = "knn";
};

struct FewshotOptionsCli {
    fs::path manifest;
    std::string method = "all";
    int trials = 1;
    std::string baseline_view = "stacked";
    bool normalize = false;
};

struct SimulateOptions {
    fs::path config;
};

void cmd_decompose(const DecomposeOptions& o, const CommonOptions& common, std::ostream& out);
void cmd_reconstruct(const ReconstructOptions& o, const CommonOptions& common, std::ostream& out);
void cmd_distmat(const DistmatOptions& o, const CommonOptions& common, std::ostream& out);
void cmd_mds(const MdsOptions& o, const CommonOptions& common, std::ostream& out);
void cmd_knn(const KnnOptions& o, const CommonOptions& common, std::ostream& out);
void cmd_fewshot(const FewshotOptionsCli& o, const CommonOptions& common, std::ostream& out);
void cmd_simulate(const SimulateOptions& o, const CommonOptions& common, std::ostream& out);

}  // namespace flagdecomp::cli

#endif
