#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dwloa/graph.hpp"
#include "dwloa/kernels.hpp"
#include "dwloa/mkl.hpp"
#include "dwloa/refinement.hpp"
#include "dwloa/svm.hpp"

namespace dwloa {

enum class Method { kWL, kWLOA, kDWLOA1, kDWLOA2 };

std::string method_name(Method m);
/// Accepts WL, WL-OA, DWL-OA1, DWL-OA2 in any case, with or without dashes.
Method parse_method(const std::string& text);
bool learns_weights(Method m);

struct MethodConfig {
    Method method = Method::kWLOA;
    int h = 4;
    std::size_t k_clusters = 10;
    bool normalize = false;
    std::vector<double> c_grid{0.01, 0.1, 1.0, 10.0, 100.0};
    std::vector<double> lambda_grid{0.1, 0.3, 0.5, 0.7, 0.9};
    std::uint64_t seed = 0;
    std::size_t folds = 5;
    std::size_t repeats = 5;
    std::size_t inner_folds = 5;
    bool stratified = true;
    std::size_t memory_cap = 0;  // bytes; 0 disables the check
    bool use_node_labels = false;
    double svm_tol = 1e-3;
    SolverOptions mkl;

    /// Throws ConfigError on invalid settings.
    void validate() const;
};

/// Test-fold outcome of one (repeat, fold) pair.
struct FoldResult {
    std::size_t repeat = 0;
    std::size_t fold = 0;
    std::size_t test_size = 0;
    std::size_t correct = 0;
    double accuracy = 0.0;
    double C = 0.0;
    std::optional<double> lambda;
    double inner_accuracy = 0.0;
    std::vector<double> alpha;  // learned weights for the selected lambda
    std::size_t mkl_iterations = 0;
    double alpha_zero_fraction = 0.0;  // share of alpha components below 1e-6
};

struct StageTiming {
    double hierarchy_seconds = 0.0;
    double kernel_seconds = 0.0;
    double cv_seconds = 0.0;
};

struct CVReport {
    std::string dataset;
    MethodConfig config;
    std::string status = "ok";  // "ok" or "OOM"
    std::string message;
    std::vector<std::vector<double>> accuracy;  // [repeat][fold]
    std::vector<FoldResult> folds;
    double mean_accuracy = 0.0;  // over all folds
    double std_dev = 0.0;        // population std of the per-repeat mean accuracies
    std::size_t hierarchy_nodes = 0;
    std::size_t kernel_groups = 0;
    std::size_t required_bytes = 0;
    StageTiming timing;
    std::vector<std::string> notes;
};

/// Deterministic 64-bit seed derivation (splitmix64 over the parts).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

/// Splits example positions into `folds` groups. Stratified splits deal each
/// class's shuffled examples round-robin, so every fold is within one example
/// of the overall class ratio.
std::vector<std::vector<std::size_t>> make_folds(std::span<const int> labels, std::size_t folds,
                                                 std::uint64_t seed, bool stratified = true);

/// A method's kernel for one outer fold: fixed for WL / WL-OA, learned by MKL
/// on the training rows for the deep variants.
struct FoldKernel {
    KernelMatrix kernel;  // full dataset
    std::optional<MKLWeights> weights;
};

class KernelFamily {
public:
    virtual ~KernelFamily() = default;
    virtual bool learns_weights() const = 0;
    virtual std::size_t num_kernels() const = 0;
    /// `train` indexes the dataset; `train_labels` follows the same order.
    virtual FoldKernel kernel_for(std::span<const std::size_t> train, std::span<const int> train_labels,
                                  double lambda, unsigned jobs) const = 0;
};

class FixedKernelFamily final : public KernelFamily {
public:
    explicit FixedKernelFamily(KernelMatrix k, bool normalize = false);
    bool learns_weights() const override { return false; }
    std::size_t num_kernels() const override { return 1; }
    FoldKernel kernel_for(std::span<const std::size_t>, std::span<const int>, double,
                          unsigned) const override;

private:
    KernelMatrix k_;
};

/// DWL-OA2: one kernel per node cluster, combined with the learned alpha.
class GroupKernelFamily final : public KernelFamily {
public:
    GroupKernelFamily(std::vector<KernelMatrix> groups, bool normalize, SolverOptions options = {});
    bool learns_weights() const override { return true; }
    std::size_t num_kernels() const override { return groups_.size(); }
    FoldKernel kernel_for(std::span<const std::size_t> train, std::span<const int> train_labels,
                          double lambda, unsigned jobs) const override;
    const std::vector<KernelMatrix>& groups() const { return groups_; }

private:
    std::vector<KernelMatrix> groups_;
    bool normalize_;
    SolverOptions options_;
};

/// DWL-OA1: one kernel per hierarchy node, evaluated from the count table.
/// The learned alpha becomes the node weights of the WL-OA kernel.
class NodeKernelFamily final : public KernelFamily {
public:
    NodeKernelFamily(const ColorHierarchy& hier, bool normalize, SolverOptions options = {},
                     unsigned jobs = 0);
    bool learns_weights() const override { return true; }
    std::size_t num_kernels() const override { return hier_->num_nodes(); }
    FoldKernel kernel_for(std::span<const std::size_t> train, std::span<const int> train_labels,
                          double lambda, unsigned jobs) const override;
    const KernelMatrix& uniform_kernel() const { return uniform_; }

private:
    const ColorHierarchy* hier_;
    KernelMatrix uniform_;
    bool normalize_;
    SolverOptions options_;
};

/// Deep WL-OA kernel for one training split. With k_clusters the nodes are
/// grouped by k-means (seeded) first; without, every node gets its own weight.
std::pair<KernelMatrix, MKLWeights> pipeline_dwloa(const ColorHierarchy& hier,
                                                   std::span<const std::size_t> train_index,
                                                   std::span<const int> labels,
                                                   std::optional<std::size_t> k_clusters, double lambda,
                                                   std::uint64_t seed = 0, unsigned jobs = 0);

/// Inner model selection plus final training and testing for one outer fold.
FoldResult evaluate_fold(const KernelFamily& family, std::span<const int> labels,
                         std::span<const std::size_t> train, std::span<const std::size_t> test,
                         const MethodConfig& config, std::uint64_t seed, unsigned jobs = 1);

/// Peak memory the configured method needs on this dataset (bytes).
std::size_t estimate_memory(const MethodConfig& config, std::size_t num_graphs, std::size_t hierarchy_nodes);

/// Repeated (stratified) cross-validation with nested selection of C and
/// lambda. A memory-cap violation yields status "OOM" instead of throwing.
CVReport run_experiment(const GraphDataset& dataset, const MethodConfig& config, unsigned jobs = 0);

/// Recomputes mean and std from the accuracy table.
void finalize_statistics(CVReport& report);

/// Table of mean +- std (percent) with methods as rows and datasets as columns.
std::string summarize_text(std::span<const CVReport> reports);
std::string summarize_csv(std::span<const CVReport> reports);

std::string report_to_json(const CVReport& report, bool include_timing = false);
CVReport report_from_json(const std::string& text);
std::string report_to_csv(const CVReport& report);

/// Key-value run configuration ("key = value", '#' comments).
struct RunConfig {
    std::filesystem::path dataset_dir;
    std::string name;
    MethodConfig method;
};
RunConfig parse_run_config(std::istream& in);
/// "512M", "2G", "1024" (bytes), "64K".
std::size_t parse_memory_size(const std::string& text);
std::vector<double> parse_grid(const std::string& text);

}  // namespace dwloa
