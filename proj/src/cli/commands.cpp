#include "commands.hpp"

#include <map>
#include <ostream>
#include <sstream>

#include "flagdecomp/analysis.hpp"
#include "flagdecomp/decompose.hpp"
#include "flagdecomp/experiments.hpp"
#include "flagdecomp/fewshot.hpp"
#include "flagdecomp/io.hpp"
#include "flagdecomp/metrics.hpp"
#include "flagdecomp/synthgen.hpp"

namespace flagdecomp::cli {

namespace {

std::string num(double v) { return io::format_number(v); }

/// Comma-separated table with a header line.
class CsvTable {
public:
    explicit CsvTable(const std::vector<std::string>& header) { add(header); }

    void add(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) body_ << (i ? "," : "") << cells[i];
        body_ << '\n';
        ++rows_;
    }
    void write(const fs::path& path) const { io::write_text(path, body_.str()); }
    std::size_t rows() const { return rows_ - 1; }

private:
    std::ostringstream body_;
    std::size_t rows_ = 0;
};

MatrixXd read_input_matrix(RunRecord& rec, const fs::path& path) {
    MatrixXd m = io::read_matrix_csv(path);
    rec.add_input(path);
    return m;
}

ColumnHierarchy read_input_hierarchy(RunRecord& rec, const fs::path& path) {
    ColumnHierarchy h = io::read_hierarchy_json(path);
    rec.add_input(path);
    return h;
}

void require_width(const ColumnHierarchy& h, const MatrixXd& data, const std::string& what) {
    if (h.width() != data.cols()) {
        throw InvalidArgument(what + ": hierarchy covers " + std::to_string(h.width()) +
                              " columns but the data has " + std::to_string(data.cols()));
    }
}

FlagType checked_type(const std::vector<Index>& signature, Index ambient) {
    std::string text;
    for (std::size_t i = 0; i < signature.size(); ++i) {
        text += (i ? "," : "") + std::to_string(signature[i]);
    }
    return flag_type_for(text, ambient);
}

SolverConfig solver_config(SolverMode mode, int max_iterations, double tolerance) {
    SolverConfig c;
    c.mode = mode;
    c.max_iterations = max_iterations;
    c.relative_tolerance = tolerance;
    c.validate();
    return c;
}

json hierarchy_json(const ColumnHierarchy& h) { return json::parse(io::hierarchy_to_json(h)); }

std::vector<std::string> path_strings(const std::vector<fs::path>& paths) {
    std::vector<std::string> out;
    for (const auto& p : paths) out.push_back(p.string());
    return out;
}

}  // namespace

void cmd_decompose(const DecomposeOptions& o, const CommonOptions& common, std::ostream& out) {
    RunRecord rec("decompose", common);
    const MatrixXd data = read_input_matrix(rec, o.data);
    const ColumnHierarchy hierarchy = read_input_hierarchy(rec, o.hierarchy);
    require_width(hierarchy, data, "decompose");
    const FlagType type = flag_type_for(o.flag_type, data.rows());
    SolverConfig solver = solver_config(o.robust ? SolverMode::irls_svd : SolverMode::svd,
                                        o.max_iterations, o.tolerance);
    solver.check_hierarchy = !o.no_validate;

    const auto fd = flag_bmgs(data, hierarchy, type, solver);
    io::write_matrix_csv(rec.output("Q.csv"), fd.flag.coordinates());
    io::write_matrix_csv(rec.output("R.csv"), fd.weights);
    io::write_matrix_csv(rec.output("P.csv"), fd.partition.permutation);

    const double norm = data.norm();
    json meta{{"flag_type", type.to_string()},
              {"signature", type.signature()},
              {"ambient", type.ambient()},
              {"hierarchy", hierarchy_json(hierarchy)},
              {"mode", to_string(fd.mode)},
              {"residual", fd.residual},
              {"relative_residual", norm > 0.0 ? fd.residual / norm : 0.0},
              {"iterations_per_block", fd.iterations_per_block},
              {"padded_blocks", fd.padded_blocks},
              {"column_order", fd.partition.column_order}};
    if (o.truth) {
        const Flag truth(read_input_matrix(rec, *o.truth), type);
        meta["chordal_to_truth"] = flag_chordal(truth, fd.flag);
    }
    io::write_text(rec.output("meta.json"), meta.dump(2) + "\n");

    rec.config() = {{"data", o.data.string()},
                    {"hierarchy", o.hierarchy.string()},
                    {"flag_type", o.flag_type},
                    {"robust", o.robust},
                    {"validate_hierarchy", !o.no_validate},
                    {"truth", o.truth ? json(o.truth->string()) : json(nullptr)},
                    {"max_iterations", o.max_iterations},
                    {"tolerance", o.tolerance}};
    rec.write_manifest();
    out << "decompose: flag type " << type.to_string() << ", residual " << num(fd.residual)
        << "\n";
}

void cmd_reconstruct(const ReconstructOptions& o, const CommonOptions& common, std::ostream& out) {
    RunRecord rec("reconstruct", common);
    if (!o.from && !o.data) {
        throw InvalidArgument("reconstruct: pass --from DIR or --data with --hierarchy and --flag-type");
    }
    std::optional<MatrixXd> data;
    if (o.data) data = read_input_matrix(rec, *o.data);

    MatrixXd estimate;
    if (o.from) {
        const MatrixXd q = read_input_matrix(rec, *o.from / "Q.csv");
        const MatrixXd r = read_input_matrix(rec, *o.from / "R.csv");
        const MatrixXd p = read_input_matrix(rec, *o.from / "P.csv");
        if (q.cols() != r.rows() || r.cols() != p.cols() || p.rows() != p.cols()) {
            throw InvalidArgument("reconstruct: Q, R, P shapes do not chain");
        }
        estimate = q * r * p.transpose();
    } else {
        if (!o.hierarchy || o.flag_type.empty()) {
            throw InvalidArgument("reconstruct: --data needs --hierarchy and --flag-type");
        }
        const ColumnHierarchy hierarchy = read_input_hierarchy(rec, *o.hierarchy);
        require_width(hierarchy, *data, "reconstruct");
        const FlagType type = flag_type_for(o.flag_type, data->rows());
        const RecoveryMethod method = parse_recovery_method(o.method);
        estimate = recover_flag(*data, hierarchy, type, method,
                                solver_config(SolverMode::svd, o.max_iterations, o.tolerance))
                       .reconstruction;
    }
    io::write_matrix_csv(rec.output("D_hat.csv"), estimate);

    json meta{{"rows", estimate.rows()}, {"cols", estimate.cols()}};
    if (data) {
        if (data->rows() != estimate.rows() || data->cols() != estimate.cols()) {
            throw InvalidArgument("reconstruct: data shape differs from the reconstruction");
        }
        const double residual = (*data - estimate).norm();
        meta["residual"] = residual;
        meta["relative_residual"] = data->norm() > 0.0 ? residual / data->norm() : 0.0;
    }
    io::write_text(rec.output("meta.json"), meta.dump(2) + "\n");

    rec.config() = {{"from", o.from ? json(o.from->string()) : json(nullptr)},
                    {"data", o.data ? json(o.data->string()) : json(nullptr)},
                    {"hierarchy", o.hierarchy ? json(o.hierarchy->string()) : json(nullptr)},
                    {"flag_type", o.flag_type},
                    {"method", o.method},
                    {"max_iterations", o.max_iterations},
                    {"tolerance", o.tolerance}};
    rec.write_manifest();
    out << "reconstruct: wrote " << estimate.rows() << "x" << estimate.cols() << " D_hat.csv\n";
}

void cmd_distmat(const DistmatOptions& o, const CommonOptions& common, std::ostream& out) {
    RunRecord rec("distmat", common);
    const std::string where = o.manifest.string();
    const json manifest = load_json(o.manifest);
    rec.add_input(o.manifest);
    require_keys(manifest, {"schema", "items", "labels", "hierarchy", "flag_type"}, where);
    if (get_field<int>(manifest, "schema", where) != 1) {
        throw ParseError(where + ": unsupported schema version");
    }
    const DistanceMetric metric = parse_distance_metric(o.metric);
    const RecoveryMethod method = parse_recovery_method(o.method);

    LabeledCollection collection;
    std::vector<fs::path> item_paths;
    for (const auto& entry : get_field<std::vector<std::string>>(manifest, "items", where)) {
        item_paths.push_back(resolve_relative(o.manifest, entry));
        collection.items.push_back(read_input_matrix(rec, item_paths.back()));
    }
    if (collection.items.empty()) {
        throw InvalidArgument(where + ": no items");
    }
    if (manifest.contains("labels")) {
        const json& labels = manifest.at("labels");
        if (labels.is_string()) {
            const fs::path path = resolve_relative(o.manifest, labels.get<std::string>());
            collection.labels = io::read_labels_csv(path);
            rec.add_input(path);
        } else {
            collection.labels = get_field<std::vector<int>>(manifest, "labels", where);
        }
        if (collection.labels.size() != collection.items.size()) {
            throw InvalidArgument(where + ": " + std::to_string(collection.labels.size()) +
                                  " labels for " + std::to_string(collection.items.size()) +
                                  " items");
        }
    }

    std::optional<FlagExtraction> extraction;
    if (metric != DistanceMetric::euclidean_flat) {
        if (!manifest.contains("hierarchy") || !manifest.contains("flag_type")) {
            throw ParseError(where + ": flag metrics need 'hierarchy' and 'flag_type'");
        }
        const json& h = manifest.at("hierarchy");
        ColumnHierarchy hierarchy = [&] {
            if (h.is_string()) {
                return read_input_hierarchy(rec, resolve_relative(o.manifest, h.get<std::string>()));
            }
            return io::parse_hierarchy_json(h.dump());
        }();
        const auto signature = signature_field(manifest.at("flag_type"), where);
        const MatrixXd& first = collection.items.front();
        require_width(hierarchy, first, "distmat");
        checked_type(signature, first.rows());
        extraction = FlagExtraction{std::move(hierarchy), signature, method, {}};
    }
    const DistanceMatrix dist = distance_matrix(
        collection, metric, extraction ? &*extraction : nullptr, common.threads);
    io::write_matrix_csv(rec.output("dist.csv"), dist.entries());
    if (!collection.labels.empty()) {
        io::write_labels_csv(rec.output("labels.csv"), collection.labels);
    }

    rec.config() = {{"manifest", o.manifest.string()},
                    {"items", path_strings(item_paths)},
                    {"method", to_string(method)},
                    {"metric", to_string(metric)},
                    {"threads", common.threads}};
    rec.write_manifest();
    out << "distmat: " << dist.size() << "x" << dist.size() << " " << to_string(metric) << "\n";
}

void cmd_mds(const MdsOptions& o, const CommonOptions& common, std::ostream& out) {
    RunRecord rec("mds", common);
    const DistanceMatrix dist(read_input_matrix(rec, o.dist), DistanceMetric::flag_chordal);
    const MatrixXd coords = classical_mds(dist, o.dim);
    io::write_matrix_csv(rec.output("coords.csv"), coords);
    rec.config() = {{"dist", o.dist.string()}, {"dim", o.dim}};
    rec.write_manifest();
    out << "mds: embedded " << coords.rows() << " points in " << coords.cols() << "-D\n";
}

void cmd_knn(const KnnOptions& o, const CommonOptions& common, std::ostream& out) {
    RunRecord rec("knn", common);
    const std::uint64_t seed = common.seed.value_or(0);
    rec.set_seed(seed);
    const DistanceMatrix dist(read_input_matrix(rec, o.dist), DistanceMetric::flag_chordal);
    const std::vector<int> labels = io::read_labels_csv(o.labels);
    rec.add_input(o.labels);
    if (static_cast<Index>(labels.size()) != dist.size()) {
        throw InvalidArgument("knn: " + std::to_string(labels.size()) + " labels for a " +
                              std::to_string(dist.size()) + "-point distance matrix");
    }
    if (o.k_min < 1 || o.k_max < o.k_min || o.trials < 1) {
        throw InvalidArgument("knn: need 1 <= k-min <= k-max and trials >= 1");
    }
    const auto rows = knn_sweep(dist, labels, o.k_min, o.k_max, o.trials, o.train_fraction, seed,
                                o.name);
    CsvTable table({"method", "k", "trial", "accuracy"});
    for (const auto& r : rows) {
        table.add({r.method, std::to_string(r.k), std::to_string(r.trial), num(r.accuracy)});
    }
    table.write(rec.output("accuracy.csv"));
    CsvTable summary({"method", "k", "mean_accuracy"});
    for (const auto& [key, mean] : mean_knn_accuracy(rows)) {
        summary.add({key.first, std::to_string(key.second), num(mean)});
    }
    summary.write(rec.output("accuracy_summary.csv"));

    rec.config() = {{"dist", o.dist.string()},         {"labels", o.labels.string()},
                    {"k_min", o.k_min},                {"k_max", o.k_max},
                    {"trials", o.trials},              {"train_fraction", o.train_fraction},
                    {"name", o.name}};
    rec.write_manifest();
    out << "knn: " << table.rows() << " rows\n";
}

void cmd_fewshot(const FewshotOptionsCli& o, const CommonOptions& common, std::ostream& out) {
    RunRecord rec("fewshot", common);
    const std::uint64_t seed = common.seed.value_or(0);
    rec.set_seed(seed);
    const std::string where = o.manifest.string();
    const json manifest = load_json(o.manifest);
    rec.add_input(o.manifest);
    require_keys(manifest, {"schema", "ways", "shots", "tasks", "queries", "classes", "query_set"},
                 where);
    if (get_field<int>(manifest, "schema", where) != 1) {
        throw ParseError(where + ": unsupported schema version");
    }
    const auto ways = get_field<Index>(manifest, "ways", where);
    const auto shots = get_field<Index>(manifest, "shots", where);
    const auto tasks = get_field<Index>(manifest, "tasks", where, Index{100});
    const auto queries = get_field<Index>(manifest, "queries", where, Index{10});
    if (o.trials < 1) {
        throw InvalidArgument("fewshot: trials must be positive");
    }

    FeaturePool pool;
    const json classes = manifest.value("classes", json::array());
    if (!classes.is_array() || classes.empty()) {
        throw ParseError(where + ": 'classes' must be a nonempty array");
    }
    Index dim = -1;
    for (const auto& cls : classes) {
        const std::string cw = where + " class entry";
        require_keys(cls, {"label", "level1", "final"}, cw);
        const MatrixXd l1 =
            read_input_matrix(rec, resolve_relative(o.manifest, get_field<std::string>(cls, "level1", cw)));
        const MatrixXd fin =
            read_input_matrix(rec, resolve_relative(o.manifest, get_field<std::string>(cls, "final", cw)));
        if (l1.rows() != fin.rows() || l1.cols() != fin.cols() || (dim >= 0 && l1.rows() != dim)) {
            throw InvalidArgument(where + ": feature files of class " +
                                  std::to_string(get_field<int>(cls, "label", cw)) +
                                  " disagree in shape");
        }
        dim = l1.rows();
        pool.labels.push_back(get_field<int>(cls, "label", cw));
        pool.level1.push_back(l1);
        pool.final.push_back(fin);
    }
    if (manifest.contains("query_set")) {
        const json& qs = manifest.at("query_set");
        const std::string qw = where + " query_set";
        require_keys(qs, {"level1", "final", "labels"}, qw);
        pool.query_level1 =
            read_input_matrix(rec, resolve_relative(o.manifest, get_field<std::string>(qs, "level1", qw)));
        pool.query_final =
            read_input_matrix(rec, resolve_relative(o.manifest, get_field<std::string>(qs, "final", qw)));
        const fs::path lp = resolve_relative(o.manifest, get_field<std::string>(qs, "labels", qw));
        pool.query_labels = io::read_labels_csv(lp);
        rec.add_input(lp);
        if (pool.query_level1.rows() != dim || pool.query_final.rows() != dim) {
            throw InvalidArgument(qw + ": query features have the wrong length");
        }
    }

    std::vector<FewShotMethod> methods;
    if (o.method == "all") {
        methods = {FewShotMethod::flag, FewShotMethod::euclidean, FewShotMethod::subspace};
    } else {
        methods = {parse_fewshot_method(o.method)};
    }
    FewShotOptions options;
    if (o.baseline_view == "stacked") {
        options.baseline_view = BaselineView::stacked;
    } else if (o.baseline_view == "final") {
        options.baseline_view = BaselineView::final_only;
    } else {
        throw InvalidArgument("fewshot: baseline view must be 'stacked' or 'final'");
    }
    options.normalize_queries = o.normalize;

    // One episode set per trial, shared by every method.
    std::vector<std::vector<FeatureEpisode>> trials;
    for (int t = 0; t < o.trials; ++t) {
        trials.push_back(sample_episodes(pool, ways, shots, tasks, queries,
                                         derive_seed(seed, static_cast<std::uint64_t>(t))));
    }
    CsvTable summary({"method", "mean", "std", "trials"});
    CsvTable per_trial({"method", "trial", "accuracy"});
    for (const FewShotMethod method : methods) {
        const AccuracyStats stats = evaluate_episodes(trials, method, options, common.threads);
        summary.add({to_string(method), num(stats.mean), num(stats.stddev),
                     std::to_string(o.trials)});
        for (std::size_t t = 0; t < stats.per_trial.size(); ++t) {
            per_trial.add({to_string(method), std::to_string(t), num(stats.per_trial[t])});
        }
        out << "fewshot: " << to_string(method) << " " << num(stats.mean) << " +- "
            << num(stats.stddev) << "\n";
    }
    summary.write(rec.output("accuracy.csv"));
    per_trial.write(rec.output("accuracy_trials.csv"));

    rec.config() = {{"manifest", o.manifest.string()},
                    {"ways", ways},
                    {"shots", shots},
                    {"tasks", tasks},
                    {"queries", queries},
                    {"method", o.method},
                    {"trials", o.trials},
                    {"baseline_view", o.baseline_view},
                    {"normalize_queries", o.normalize},
                    {"flag_type", json::array({shots - 1, 2 * (shots - 1)})}};
    rec.write_manifest();
}

namespace {

std::vector<RecoveryMethod> recovery_methods(const json& cfg, const std::string& where,
                                             std::vector<RecoveryMethod> fallback) {
    if (!cfg.contains("methods")) return fallback;
    std::vector<RecoveryMethod> out;
    for (const auto& m : get_field<std::vector<std::string>>(cfg, "methods", where)) {
        out.push_back(parse_recovery_method(m));
    }
    if (out.empty()) throw ParseError(where + ": 'methods' is empty");
    return out;
}

SolverConfig solver_field(const json& cfg, const std::string& where) {
    if (!cfg.contains("solver")) return {};
    const json& s = cfg.at("solver");
    require_keys(s, {"max_iterations", "tolerance"}, where + " solver");
    return solver_config(SolverMode::svd, get_field<int>(s, "max_iterations", where, 100),
                         get_field<double>(s, "tolerance", where, 1e-8));
}

void write_sweep(const std::vector<TrialRow>& rows, const RecoverySweepConfig& config,
                 RunRecord& rec) {
    CsvTable table({"trial", "method", "setting", "chordal", "lrse", "snr"});
    for (const auto& r : rows) {
        table.add({std::to_string(r.trial), to_string(r.method), num(r.setting), num(r.chordal),
                   num(r.lrse), num(r.snr)});
    }
    table.write(rec.output("trials.csv"));
    CsvTable summary({"method", "setting", "mean_chordal", "mean_lrse", "mean_snr"});
    for (const double setting : config.settings) {
        for (const RecoveryMethod m : config.methods) {
            summary.add({to_string(m), num(setting), num(mean_of(rows, m, setting, &TrialRow::chordal)),
                         num(mean_of(rows, m, setting, &TrialRow::lrse)),
                         num(mean_of(rows, m, setting, &TrialRow::snr))});
        }
    }
    summary.write(rec.output("summary.csv"));
}

void dump_instance(const PlantedInstance& inst, RunRecord& rec) {
    const fs::path dir = rec.output("instance");
    fs::create_directories(dir);
    io::write_matrix_csv(dir / "observed.csv", inst.observed);
    io::write_matrix_csv(dir / "clean.csv", inst.clean);
    io::write_matrix_csv(dir / "truth.csv", inst.truth.coordinates());
    io::write_hierarchy_json(dir / "hierarchy.json", inst.hierarchy);
}

json signature_json(const std::vector<Index>& sig) { return json(sig); }

}  // namespace

void cmd_simulate(const SimulateOptions& o, const CommonOptions& common, std::ostream& out) {
    RunRecord rec("simulate", common);
    const std::string where = o.config.string();
    const json cfg = load_json(o.config);
    rec.add_input(o.config);
    if (!cfg.is_object()) throw ParseError(where + ": expected a JSON object");
    if (get_field<int>(cfg, "schema", where) != 1) {
        throw ParseError(where + ": unsupported schema version");
    }
    const auto model = get_field<std::string>(cfg, "model", where);
    const std::uint64_t seed =
        common.seed ? *common.seed : get_field<std::uint64_t>(cfg, "seed", where, 0);
    rec.set_seed(seed);
    json resolved{{"schema", 1}, {"model", model}, {"seed", seed}};

    if (model == "noise" || model == "outliers") {
        const bool noise_model = model == "noise";
        std::vector<std::string> keys{"schema", "model", "seed", "flag_type", "ambient",
                                      "block_sizes", "trials", "methods", "solver", "dump"};
        keys.push_back(noise_model ? "noise" : "outliers");
        require_keys(cfg, keys, where);
        RecoverySweepConfig sweep;
        sweep.seed = seed;
        if (cfg.contains("flag_type")) sweep.signature = signature_field(cfg.at("flag_type"), where);
        sweep.ambient = get_field<Index>(cfg, "ambient", where, sweep.ambient);
        sweep.block_sizes = get_field<std::vector<Index>>(cfg, "block_sizes", where, sweep.block_sizes);
        sweep.trials = get_field<int>(cfg, "trials", where, sweep.trials);
        sweep.methods = recovery_methods(cfg, where, sweep.methods);
        sweep.solver = solver_field(cfg, where);
        checked_type(sweep.signature, sweep.ambient);
        if (noise_model) {
            const json noise = cfg.value("noise", json::object());
            require_keys(noise, {"dist", "scale", "scales"}, where + " noise");
            sweep.distribution =
                parse_noise_distribution(get_field<std::string>(noise, "dist", where, "gaussian"));
            if (noise.contains("scales")) {
                sweep.settings = get_field<std::vector<double>>(noise, "scales", where);
            } else if (noise.contains("scale")) {
                sweep.settings = {get_field<double>(noise, "scale", where)};
            }
        } else {
            const json& counts = cfg.contains("outliers") ? cfg.at("outliers") : json(json::array({0, 4, 8, 12, 16}));
            if (counts.is_number_integer()) {
                sweep.settings = {counts.get<double>()};
            } else {
                sweep.settings.clear();
                for (const auto c : get_field<std::vector<Index>>(json{{"outliers", counts}}, "outliers", where)) {
                    sweep.settings.push_back(static_cast<double>(c));
                }
            }
        }
        const auto rows = noise_model ? run_noise_sweep(sweep, common.threads)
                                      : run_outlier_sweep(sweep, common.threads);
        write_sweep(rows, sweep, rec);
        const bool dump = get_field<bool>(cfg, "dump", where, false);
        if (dump) {
            dump_instance(noise_model ? noise_sweep_instance(sweep, 0, 0)
                                      : outlier_sweep_instance(sweep, 0, 0),
                          rec);
        }
        std::vector<std::string> methods;
        for (const auto m : sweep.methods) methods.push_back(to_string(m));
        resolved.update({{"flag_type", signature_json(sweep.signature)},
                         {"ambient", sweep.ambient},
                         {"block_sizes", sweep.block_sizes},
                         {"trials", sweep.trials},
                         {"methods", methods},
                         {"settings", sweep.settings},
                         {"dump", dump}});
        if (noise_model) resolved["noise"] = {{"dist", to_string(sweep.distribution)}};
        out << "simulate: " << rows.size() << " trial rows\n";
    } else if (model == "cluster") {
        require_keys(cfg, {"schema", "model", "seed", "flag_type", "ambient", "block_sizes",
                           "centers", "per_cluster", "noise"},
                     where);
        ClusterSimConfig cluster;
        cluster.seed = seed;
        if (cfg.contains("flag_type")) cluster.signature = signature_field(cfg.at("flag_type"), where);
        cluster.ambient = get_field<Index>(cfg, "ambient", where, cluster.ambient);
        cluster.block_sizes = get_field<std::vector<Index>>(cfg, "block_sizes", where, cluster.block_sizes);
        cluster.centers = get_field<Index>(cfg, "centers", where, cluster.centers);
        cluster.per_cluster = get_field<Index>(cfg, "per_cluster", where, cluster.per_cluster);
        checked_type(cluster.signature, cluster.ambient);
        if (cfg.contains("noise")) {
            const json& noise = cfg.at("noise");
            require_keys(noise, {"dist", "scale"}, where + " noise");
            if (parse_noise_distribution(get_field<std::string>(noise, "dist", where, "gaussian")) !=
                NoiseDistribution::gaussian) {
                throw ParseError(where + ": the cluster model uses Gaussian noise");
            }
            cluster.noise_sigma = get_field<double>(noise, "scale", where, cluster.noise_sigma);
        }
        const ClusterRun run = run_cluster_experiment(cluster, common.threads);
        io::write_matrix_csv(rec.output("dist_fd.csv"), run.fd.entries());
        io::write_matrix_csv(rec.output("dist_svd.csv"), run.svd.entries());
        io::write_matrix_csv(rec.output("dist_euclidean.csv"), run.euclidean.entries());
        io::write_labels_csv(rec.output("labels.csv"), run.labels);
        CsvTable summary({"mean_snr", "silhouette_fd", "silhouette_svd", "silhouette_euclidean"});
        summary.add({num(run.mean_snr), num(run.silhouette(run.fd)), num(run.silhouette(run.svd)),
                     num(run.silhouette(run.euclidean))});
        summary.write(rec.output("summary.csv"));
        resolved.update({{"flag_type", signature_json(cluster.signature)},
                         {"ambient", cluster.ambient},
                         {"block_sizes", cluster.block_sizes},
                         {"centers", cluster.centers},
                         {"per_cluster", cluster.per_cluster},
                         {"noise", {{"dist", "gaussian"}, {"scale", cluster.noise_sigma}}}});
        out << "simulate: mean SNR " << num(run.mean_snr) << " dB\n";
    } else if (model == "patches") {
        require_keys(cfg, {"schema", "model", "seed", "class_sizes", "bands", "flag_type",
                           "patch_side", "class_spread", "patch_jitter", "noise", "k_min", "k_max",
                           "trials", "train_fraction", "metric", "methods"},
                     where);
        PatchKnnConfig knn;
        knn.seed = seed;
        knn.sim.seed = seed;
        PatchSimConfig& sim = knn.sim;
        sim.class_sizes = get_field<std::vector<Index>>(cfg, "class_sizes", where, sim.class_sizes);
        sim.bands = get_field<Index>(cfg, "bands", where, sim.bands);
        if (cfg.contains("flag_type")) sim.signature = signature_field(cfg.at("flag_type"), where);
        sim.patch_side = get_field<Index>(cfg, "patch_side", where, sim.patch_side);
        sim.class_spread = get_field<double>(cfg, "class_spread", where, sim.class_spread);
        sim.patch_jitter = get_field<double>(cfg, "patch_jitter", where, sim.patch_jitter);
        if (cfg.contains("noise")) {
            const json& noise = cfg.at("noise");
            require_keys(noise, {"dist", "scale"}, where + " noise");
            sim.noise_sigma = get_field<double>(noise, "scale", where, sim.noise_sigma);
        }
        checked_type(sim.signature, sim.bands);
        knn.k_min = get_field<Index>(cfg, "k_min", where, knn.k_min);
        knn.k_max = get_field<Index>(cfg, "k_max", where, knn.k_max);
        knn.trials = get_field<int>(cfg, "trials", where, knn.trials);
        knn.train_fraction = get_field<double>(cfg, "train_fraction", where, knn.train_fraction);
        if (cfg.contains("metric")) {
            knn.metric = parse_distance_metric(get_field<std::string>(cfg, "metric", where));
        }
        knn.methods = recovery_methods(cfg, where, knn.methods);
        const auto rows = run_patch_knn(knn, common.threads);
        CsvTable table({"method", "k", "trial", "accuracy"});
        for (const auto& r : rows) {
            table.add({r.method, std::to_string(r.k), std::to_string(r.trial), num(r.accuracy)});
        }
        table.write(rec.output("knn.csv"));
        CsvTable summary({"method", "k", "mean_accuracy"});
        for (const auto& [key, mean] : mean_knn_accuracy(rows)) {
            summary.add({key.first, std::to_string(key.second), num(mean)});
        }
        summary.write(rec.output("summary.csv"));
        std::vector<std::string> methods;
        for (const auto m : knn.methods) methods.push_back(to_string(m));
        resolved.update({{"class_sizes", sim.class_sizes},
                         {"bands", sim.bands},
                         {"flag_type", signature_json(sim.signature)},
                         {"patch_side", sim.patch_side},
                         {"class_spread", sim.class_spread},
                         {"patch_jitter", sim.patch_jitter},
                         {"noise", {{"dist", "gaussian"}, {"scale", sim.noise_sigma}}},
                         {"k_min", knn.k_min},
                         {"k_max", knn.k_max},
                         {"trials", knn.trials},
                         {"train_fraction", knn.train_fraction},
                         {"metric", to_string(knn.metric)},
                         {"methods", methods}});
        out << "simulate: " << rows.size() << " kNN rows\n";
    } else {
        throw ParseError(where + ": unknown model '" + model +
                         "' (expected noise, outliers, cluster or patches)");
    }
    resolved["threads"] = common.threads;
    rec.config() = resolved;
    rec.write_manifest();
}

}  // namespace flagdecomp::cli
