#include "flagdecomp/cli.hpp"

#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"

namespace flagdecomp::cli {

namespace {

void add_common(CLI::App* cmd, CommonOptions& common) {
    cmd->add_option("--out", common.out, "Output directory (created if missing)")
        ->capture_default_str();
    cmd->add_option("--seed", common.seed, "Seed for every random choice of the run");
    cmd->add_option("--threads", common.threads, "Worker threads; results do not depend on it")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
}

int report(std::ostream& err, const std::string& kind, const std::string& what, int code) {
    err << "flagdecomp: " << kind << ": " << what << "\n";
    return code;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Flag decomposition: hierarchy-preserving factorization D = Q R P^T, flag "
                 "distances and experiment pipelines.",
                 "flagdecomp"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    CommonOptions common;

    DecomposeOptions dec;
    auto* decompose = app.add_subcommand("decompose", "Factor a matrix along a column hierarchy");
    decompose->add_option("--data", dec.data, "Data matrix CSV (n x p)")->required();
    decompose->add_option("--hierarchy", dec.hierarchy, "Column hierarchy JSON")->required();
    decompose->add_option("--flag-type", dec.flag_type, "Flag signature n1,...,nk")->required();
    decompose->add_flag("--robust", dec.robust, "Use IRLS-SVD blocks (robust flag decomposition)");
    decompose->add_flag("--no-validate", dec.no_validate,
                        "Skip the strict rank check of the hierarchy");
    decompose->add_option("--truth", dec.truth, "Planted flag coordinates CSV; reports the chordal distance");
    decompose->add_option("--max-iter", dec.max_iterations, "IRLS iteration cap")->capture_default_str();
    decompose->add_option("--tol", dec.tolerance, "IRLS relative tolerance")->capture_default_str();
    add_common(decompose, common);

    ReconstructOptions rec;
    auto* reconstruct = app.add_subcommand("reconstruct", "Write the low-rank reconstruction D_hat");
    reconstruct->add_option("--from", rec.from, "Directory holding Q.csv, R.csv, P.csv");
    reconstruct->add_option("--data", rec.data, "Data matrix CSV");
    reconstruct->add_option("--hierarchy", rec.hierarchy, "Column hierarchy JSON");
    reconstruct->add_option("--flag-type", rec.flag_type, "Flag signature n1,...,nk");
    reconstruct->add_option("--method", rec.method, "fd, rfd, svd or irls_svd")->capture_default_str();
    reconstruct->add_option("--max-iter", rec.max_iterations, "IRLS iteration cap")->capture_default_str();
    reconstruct->add_option("--tol", rec.tolerance, "IRLS relative tolerance")->capture_default_str();
    add_common(reconstruct, common);

    DistmatOptions dm;
    auto* distmat = app.add_subcommand("distmat", "Pairwise distances over a collection of matrices");
    distmat->add_option("--manifest", dm.manifest, "Collection manifest JSON")->required();
    distmat->add_option("--method", dm.method, "Flag recovery: fd, rfd, svd or irls_svd")
        ->capture_default_str();
    distmat->add_option("--metric", dm.metric,
                        "flag_chordal, grassmann_product_sum or euclidean_flat")
        ->capture_default_str();
    add_common(distmat, common);

    MdsOptions md;
    auto* mds = app.add_subcommand("mds", "Classical MDS embedding of a distance matrix");
    mds->add_option("--dist", md.dist, "Distance matrix CSV")->required();
    mds->add_option("--dim", md.dim, "Embedding dimension")->capture_default_str();
    add_common(mds, common);

    KnnOptions kn;
    auto* knn = app.add_subcommand("knn", "kNN accuracy over seeded stratified splits");
    knn->add_option("--dist", kn.dist, "Distance matrix CSV")->required();
    knn->add_option("--labels", kn.labels, "Labels CSV, one integer per line")->required();
    knn->add_option("--k-min", kn.k_min, "Smallest k")->capture_default_str();
    knn->add_option("--k-max", kn.k_max, "Largest k")->capture_default_str();
    knn->add_option("--trials", kn.trials, "Number of random splits")->capture_default_str();
    knn->add_option("--train-fraction", kn.train_fraction, "Training share per class")
        ->capture_default_str();
    knn->add_option("--name", kn.name, "Method name written to the output rows")
        ->capture_default_str();
    add_common(knn, common);

    FewshotOptionsCli fs;
    auto* fewshot = app.add_subcommand("fewshot", "Few-shot episode evaluation on feature files");
    fewshot->add_option("--manifest", fs.manifest, "Feature manifest JSON")->required();
    fewshot->add_option("--method", fs.method, "flag, euclidean, subspace or all")
        ->capture_default_str();
    fewshot->add_option("--trials", fs.trials, "Independent episode sets")->capture_default_str();
    fewshot->add_option("--baseline-view", fs.baseline_view,
                        "Baseline features: stacked or final")
        ->capture_default_str();
    fewshot->add_flag("--normalize", fs.normalize, "Scale query features to unit length");
    add_common(fewshot, common);

    SimulateOptions sim;
    auto* simulate = app.add_subcommand("simulate", "Run a synthetic experiment from a config");
    simulate->add_option("--config", sim.config, "Simulation config JSON")->required();
    add_common(simulate, common);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        // Help and version requests exit 0; every other parse failure is an input error.
        return app.exit(e, out, err) == 0 ? 0 : 1;
    }

    try {
        if (*decompose) cmd_decompose(dec, common, out);
        else if (*reconstruct) cmd_reconstruct(rec, common, out);
        else if (*distmat) cmd_distmat(dm, common, out);
        else if (*mds) cmd_mds(md, common, out);
        else if (*knn) cmd_knn(kn, common, out);
        else if (*fewshot) cmd_fewshot(fs, common, out);
        else if (*simulate) cmd_simulate(sim, common, out);
    } catch (const HierarchyViolation& e) {
        return report(err, "hierarchy violation at level " + std::to_string(e.level()), e.what(), 2);
    } catch (const DomainError& e) {
        return report(err, "domain error", e.what(), 2);
    } catch (const NumericalFailure& e) {
        return report(err, "numerical failure", e.what(), 3);
    } catch (const ParseError& e) {
        return report(err, "parse error", e.what(), 1);
    } catch (const InvalidArgument& e) {
        return report(err, "invalid input", e.what(), 1);
    } catch (const nlohmann::json::exception& e) {
        return report(err, "parse error", e.what(), 1);
    } catch (const std::filesystem::filesystem_error& e) {
        return report(err, "file error", e.what(), 1);
    } catch (const std::exception& e) {
        return report(err, "error", e.what(), 1);
    }
    return 0;
}

int run(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, std::cout, std::cerr);
}

}  // namespace flagdecomp::cli
