#include "flagdecomp/experiments.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "flagdecomp/metrics.hpp"
#include "flagdecomp/parallel.hpp"

namespace flagdecomp {

namespace {

std::uint64_t instance_seed(const RecoverySweepConfig& c, std::size_t s, int trial) {
    return derive_seed(derive_seed(c.seed, s), static_cast<std::uint64_t>(trial));
}

using SweepGenerator = PlantedInstance (*)(const RecoverySweepConfig&, std::size_t, int);

std::vector<TrialRow> run_sweep(const RecoverySweepConfig& config, int threads,
                                SweepGenerator generate, bool inliers_only) {
    if (config.trials < 1 || config.settings.empty() || config.methods.empty()) {
        throw InvalidArgument("sweep: need trials, settings and methods");
    }
    const std::size_t per_setting = static_cast<std::size_t>(config.trials);
    const std::size_t jobs = config.settings.size() * per_setting;
    std::vector<std::vector<TrialRow>> slots(jobs);

    parallel_for(jobs, threads, [&](std::size_t job) {
        const std::size_t s = job / per_setting;
        const int trial = static_cast<int>(job % per_setting);
        const double setting = config.settings[s];
        const PlantedInstance inst = generate(config, s, trial);
        const MatrixXd corruption = inst.observed - inst.clean;
        const double snr = corruption.squaredNorm() == 0.0
                               ? std::numeric_limits<double>::infinity()
                               : snr_db(inst.clean, corruption).value;
        const std::vector<Index> keep = inst.inliers();
        for (const RecoveryMethod method : config.methods) {
            const auto rec = recover_flag(inst.observed, inst.hierarchy, inst.truth.type(), method,
                                          config.solver);
            const double lrse = inliers_only
                                    ? lrse_db(inst.clean(Eigen::all, keep),
                                              rec.reconstruction(Eigen::all, keep))
                                          .value
                                    : lrse_db(inst.clean, rec.reconstruction).value;
            slots[job].push_back(TrialRow{trial, method, setting,
                                          flag_recovery_distance(inst.truth, rec.flag).value,
                                          lrse, snr});
        }
    });

    std::vector<TrialRow> rows;
    rows.reserve(jobs * config.methods.size());
    for (auto& slot : slots) rows.insert(rows.end(), slot.begin(), slot.end());
    return rows;
}

}  // namespace

PlantedInstance noise_sweep_instance(const RecoverySweepConfig& config, std::size_t setting,
                                     int trial) {
    return gen_noise_instance(FlagType(config.signature, config.ambient), config.block_sizes,
                              NoiseSpec{config.distribution, config.settings.at(setting),
                                        instance_seed(config, setting, trial)});
}

PlantedInstance outlier_sweep_instance(const RecoverySweepConfig& config, std::size_t setting,
                                       int trial) {
    const double count = config.settings.at(setting);
    if (count < 0.0 || count != std::floor(count)) {
        throw InvalidArgument("outlier sweep: outlier counts must be nonnegative integers");
    }
    return gen_outlier_instance(FlagType(config.signature, config.ambient), config.block_sizes,
                                static_cast<Index>(count), instance_seed(config, setting, trial));
}

std::vector<TrialRow> run_noise_sweep(const RecoverySweepConfig& config, int threads) {
    return run_sweep(config, threads, &noise_sweep_instance, false);
}

std::vector<TrialRow> run_outlier_sweep(const RecoverySweepConfig& config, int threads) {
    return run_sweep(config, threads, &outlier_sweep_instance, true);
}

double mean_of(const std::vector<TrialRow>& rows, RecoveryMethod method, double setting,
               double TrialRow::*field) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& r : rows) {
        if (r.method == method && r.setting == setting) {
            sum += r.*field;
            ++count;
        }
    }
    if (count == 0) {
        throw InvalidArgument("mean_of: no rows for " + to_string(method));
    }
    return sum / static_cast<double>(count);
}

ClusterRun run_cluster_experiment(const ClusterSimConfig& config, int threads) {
    const ClusterSim sim = gen_cluster_sim(config);
    LabeledCollection collection;
    double snr_sum = 0.0;
    for (const auto& inst : sim.instances) {
        collection.items.push_back(inst.observed);
        snr_sum += snr_db(inst.clean, inst.observed - inst.clean).value;
    }
    collection.labels = sim.labels;
    const ColumnHierarchy& hierarchy = sim.instances.front().hierarchy;
    const FlagExtraction fd{hierarchy, config.signature, RecoveryMethod::fd, {}};
    const FlagExtraction svd{hierarchy, config.signature, RecoveryMethod::svd, {}};
    return ClusterRun{snr_sum / static_cast<double>(sim.instances.size()),
                      distance_matrix(collection, DistanceMetric::flag_chordal, &fd, threads),
                      distance_matrix(collection, DistanceMetric::flag_chordal, &svd, threads),
                      distance_matrix(collection, DistanceMetric::euclidean_flat, nullptr, threads),
                      sim.labels};
}

std::vector<KnnRow> knn_sweep(const DistanceMatrix& dist, const std::vector<int>& labels,
                              Index k_min, Index k_max, int trials, double train_fraction,
                              std::uint64_t seed, const std::string& method) {
    if (k_min < 1 || k_max < k_min || trials < 1) {
        throw InvalidArgument("knn_sweep: need 1 <= k_min <= k_max and trials >= 1");
    }
    std::vector<KnnRow> rows;
    for (int t = 0; t < trials; ++t) {
        const auto mask =
            stratified_split(labels, train_fraction, derive_seed(seed, static_cast<std::uint64_t>(t)));
        for (Index k = k_min; k <= k_max; ++k) {
            rows.push_back({t, method, k, knn_classify(dist, labels, k, mask).accuracy});
        }
    }
    return rows;
}

std::vector<KnnRow> run_patch_knn(const PatchKnnConfig& config, int threads) {
    const PatchSim sim = gen_patch_collection(config.sim);
    LabeledCollection collection{sim.patches, sim.labels};
    std::vector<KnnRow> rows;
    for (const RecoveryMethod method : config.methods) {
        const FlagExtraction extraction{sim.hierarchy, config.sim.signature, method, {}};
        const DistanceMatrix dist = distance_matrix(collection, config.metric, &extraction, threads);
        auto part = knn_sweep(dist, sim.labels, config.k_min, config.k_max, config.trials,
                              config.train_fraction, config.seed, to_string(method));
        rows.insert(rows.end(), part.begin(), part.end());
    }
    return rows;
}

std::map<std::pair<std::string, Index>, double> mean_knn_accuracy(const std::vector<KnnRow>& rows) {
    std::map<std::pair<std::string, Index>, std::pair<double, int>> acc;
    for (const auto& r : rows) {
        auto& [sum, count] = acc[{r.method, r.k}];
        sum += r.accuracy;
        ++count;
    }
    std::map<std::pair<std::string, Index>, double> out;
    for (const auto& [key, v] : acc) out[key] = v.first / v.second;
    return out;
}

}  // namespace flagdecomp
