#include "dwloa/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "json.hpp"

#include "dwloa/error.hpp"
#include "dwloa/grouping.hpp"
#include "dwloa/parallel.hpp"

namespace dwloa {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string normalize_token(const std::string& s) {
    std::string out;
    for (char c : s)
        if (c != '-' && c != '_' && c != ' ') out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    return out;
}

std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
    // rejection sampling keeps the draw unbiased and platform independent
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do x = rng();
    while (x >= limit);
    return x % n;
}

template <class T>
void shuffle(std::vector<T>& v, std::mt19937_64& rng) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[bounded(rng, i)]);
}

double alpha_zero_fraction(const std::vector<double>& alpha) {
    if (alpha.empty()) return 0.0;
    const auto zeros = std::count_if(alpha.begin(), alpha.end(), [](double a) { return a < 1e-6; });
    return static_cast<double>(zeros) / static_cast<double>(alpha.size());
}

// Trains on `tr` and counts correct predictions on `te`; positions index k.
std::size_t fit_and_score(const KernelMatrix& k, std::span<const int> labels, std::span<const std::size_t> tr,
                          std::span<const std::size_t> te, double C, double tol) {
    std::vector<int> ytr(tr.size());
    for (std::size_t t = 0; t < tr.size(); ++t) ytr[t] = labels[tr[t]];
    const bool one_class = std::all_of(ytr.begin(), ytr.end(), [&](int y) { return y == ytr.front(); });
    std::vector<int> pred;
    if (one_class) {
        pred.assign(te.size(), ytr.front());
    } else {
        SVMOptions opt;
        opt.tol = tol;
        const auto model = train_svm(k.principal_submatrix(tr), ytr, C, opt);
        pred = predict(model, k.cross(te, tr));
    }
    std::size_t correct = 0;
    for (std::size_t t = 0; t < te.size(); ++t) correct += pred[t] == labels[te[t]];
    return correct;
}

}  // namespace

std::string method_name(Method m) {
    switch (m) {
        case Method::kWL: return "WL";
        case Method::kWLOA: return "WL-OA";
        case Method::kDWLOA1: return "DWL-OA1";
        case Method::kDWLOA2: return "DWL-OA2";
    }
    return "?";
}

Method parse_method(const std::string& text) {
    const auto t = normalize_token(text);
    if (t == "wl") return Method::kWL;
    if (t == "wloa") return Method::kWLOA;
    if (t == "dwloa1") return Method::kDWLOA1;
    if (t == "dwloa2") return Method::kDWLOA2;
    throw ConfigError("unknown method '" + text + "' (expected WL, WL-OA, DWL-OA1 or DWL-OA2)");
}

bool learns_weights(Method m) { return m == Method::kDWLOA1 || m == Method::kDWLOA2; }

void MethodConfig::validate() const {
    if (h < 0) throw ConfigError("h must be non-negative");
    if (c_grid.empty()) throw ConfigError("C grid is empty");
    for (double c : c_grid)
        if (!(c > 0.0)) throw ConfigError("C values must be positive");
    if (learns_weights(method)) {
        if (lambda_grid.empty()) throw ConfigError("lambda grid is empty");
        for (double l : lambda_grid)
            if (!(l >= 0.0 && l <= 1.0)) throw ConfigError("lambda values must lie in [0, 1]");
    }
    if (method == Method::kDWLOA2 && k_clusters < 1) throw ConfigError("k must be at least 1");
    if (folds < 2 || inner_folds < 2) throw ConfigError("need at least 2 folds");
    if (repeats < 1) throw ConfigError("need at least 1 repeat");
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    };
    return mix(mix(mix(seed) ^ a) ^ b);
}

std::vector<std::vector<std::size_t>> make_folds(std::span<const int> labels, std::size_t folds,
                                                 std::uint64_t seed, bool stratified) {
    if (folds < 1) throw ConfigError("need at least one fold");
    std::mt19937_64 rng(seed);
    std::vector<std::vector<std::size_t>> out(folds);
    std::size_t next = 0;
    auto deal = [&](std::vector<std::size_t> idx) {
        shuffle(idx, rng);
        for (auto i : idx) {
            out[next].push_back(i);
            next = (next + 1) % folds;
        }
    };
    if (stratified) {
        for (int cls : {-1, 1}) {
            std::vector<std::size_t> idx;
            for (std::size_t i = 0; i < labels.size(); ++i)
                if (labels[i] == cls) idx.push_back(i);
            deal(std::move(idx));
        }
    } else {
        std::vector<std::size_t> idx(labels.size());
        std::iota(idx.begin(), idx.end(), 0);
        deal(std::move(idx));
    }
    for (auto& f : out) std::sort(f.begin(), f.end());
    return out;
}

FixedKernelFamily::FixedKernelFamily(KernelMatrix k, bool normalize)
    : k_(normalize ? normalize_unit_diagonal(k) : std::move(k)) {}

FoldKernel FixedKernelFamily::kernel_for(std::span<const std::size_t>, std::span<const int>, double,
                                         unsigned) const {
    return {k_, std::nullopt};
}

GroupKernelFamily::GroupKernelFamily(std::vector<KernelMatrix> groups, bool normalize, SolverOptions options)
    : groups_(std::move(groups)), normalize_(normalize), options_(options) {
    if (groups_.empty()) throw DimensionError("no group kernels");
}

FoldKernel GroupKernelFamily::kernel_for(std::span<const std::size_t> train, std::span<const int> train_labels,
                                         double lambda, unsigned) const {
    std::vector<KernelMatrix> subs;
    subs.reserve(groups_.size());
    for (const auto& g : groups_) subs.push_back(g.principal_submatrix(train));
    MatrixListForms forms(std::move(subs));
    auto w = learn_weights(forms, train_labels, lambda, options_);
    auto k = combine(groups_, w.alpha);
    k.provenance = "dwl-oa grouped k=" + std::to_string(groups_.size());
    if (normalize_) k = normalize_unit_diagonal(k);
    return {std::move(k), std::move(w)};
}

NodeKernelFamily::NodeKernelFamily(const ColorHierarchy& hier, bool normalize, SolverOptions options,
                                   unsigned jobs)
    : hier_(&hier),
      uniform_(wloa_matrix(hier, std::vector<double>(hier.num_nodes(), 1.0), 0.0, jobs)),
      normalize_(normalize),
      options_(options) {}

FoldKernel NodeKernelFamily::kernel_for(std::span<const std::size_t> train, std::span<const int> train_labels,
                                        double lambda, unsigned jobs) const {
    NodeCountForms forms(*hier_, train, uniform_);
    auto w = learn_weights(forms, train_labels, lambda, options_);
    auto k = wloa_matrix(*hier_, w.alpha, 0.0, jobs);
    k.provenance = "dwl-oa per-node h=" + std::to_string(hier_->h());
    if (normalize_) k = normalize_unit_diagonal(k);
    return {std::move(k), std::move(w)};
}

std::pair<KernelMatrix, MKLWeights> pipeline_dwloa(const ColorHierarchy& hier,
                                                   std::span<const std::size_t> train_index,
                                                   std::span<const int> labels,
                                                   std::optional<std::size_t> k_clusters, double lambda,
                                                   std::uint64_t seed, unsigned jobs) {
    if (train_index.empty()) throw ConfigError("empty training set");
    FoldKernel fk;
    if (k_clusters) {
        const auto assignment = kmeans(node_feature_vectors(hier), *k_clusters, seed, 300, jobs);
        GroupKernelFamily family(group_kernel_matrices(hier, assignment, jobs), false);
        fk = family.kernel_for(train_index, labels, lambda, jobs);
    } else {
        NodeKernelFamily family(hier, false, {}, jobs);
        fk = family.kernel_for(train_index, labels, lambda, jobs);
    }
    return {std::move(fk.kernel), std::move(*fk.weights)};
}

FoldResult evaluate_fold(const KernelFamily& family, std::span<const int> labels,
                         std::span<const std::size_t> train, std::span<const std::size_t> test,
                         const MethodConfig& config, std::uint64_t seed, unsigned jobs) {
    std::vector<int> ytrain(train.size());
    for (std::size_t t = 0; t < train.size(); ++t) ytrain[t] = labels[train[t]];
    const auto inner = make_folds(ytrain, config.inner_folds, derive_seed(seed, 0x1f), config.stratified);

    std::vector<double> lambdas = family.learns_weights() ? config.lambda_grid : std::vector<double>{0.0};
    std::sort(lambdas.begin(), lambdas.end());
    std::vector<double> cs = config.c_grid;
    std::sort(cs.begin(), cs.end());

    struct Choice {
        double acc = -1.0, C = 0.0, lambda = 0.0;
    } best;
    FoldKernel best_kernel;
    for (double lambda : lambdas) {
        auto fk = family.kernel_for(train, ytrain, lambda, jobs);
        const auto ktrain = fk.kernel.principal_submatrix(train);
        bool improved = false;
        for (double C : cs) {
            double acc = 0.0;
            for (std::size_t f = 0; f < inner.size(); ++f) {
                std::vector<std::size_t> tr;
                for (std::size_t g = 0; g < inner.size(); ++g)
                    if (g != f) tr.insert(tr.end(), inner[g].begin(), inner[g].end());
                std::sort(tr.begin(), tr.end());
                acc += static_cast<double>(fit_and_score(ktrain, ytrain, tr, inner[f], C, config.svm_tol)) /
                       static_cast<double>(inner[f].size());
            }
            acc /= static_cast<double>(inner.size());
            // strict improvement only: ties keep the smaller C, then the smaller lambda
            if (acc > best.acc) {
                best = {acc, C, lambda};
                improved = true;
            }
        }
        if (improved) best_kernel = std::move(fk);
    }

    FoldResult r;
    r.C = best.C;
    r.inner_accuracy = best.acc;
    if (family.learns_weights()) {
        r.lambda = best.lambda;
        r.alpha = best_kernel.weights->alpha;
        r.mkl_iterations = best_kernel.weights->iterations;
        r.alpha_zero_fraction = alpha_zero_fraction(r.alpha);
    }
    SVMOptions opt;
    opt.tol = config.svm_tol;
    const auto model = train_svm(best_kernel.kernel.principal_submatrix(train), ytrain, best.C, opt, train);
    const auto pred = predict(model, best_kernel.kernel.cross(test, train));
    r.test_size = test.size();
    for (std::size_t t = 0; t < test.size(); ++t) r.correct += pred[t] == labels[test[t]];
    r.accuracy = test.empty() ? 0.0 : static_cast<double>(r.correct) / static_cast<double>(test.size());
    return r;
}

std::size_t estimate_memory(const MethodConfig& config, std::size_t num_graphs, std::size_t hierarchy_nodes) {
    const double n2 = static_cast<double>(num_graphs) * static_cast<double>(num_graphs) * sizeof(double);
    const double train = std::ceil(static_cast<double>(num_graphs) * (config.folds - 1) /
                                   static_cast<double>(config.folds));
    double bytes = 0.0;
    switch (config.method) {
        case Method::kWL:
        case Method::kWLOA: bytes = 3.0 * n2; break;
        case Method::kDWLOA2: bytes = (static_cast<double>(config.k_clusters) + 3.0) * n2; break;
        case Method::kDWLOA1:
            // the MKL stage is defined over one l x l kernel per hierarchy node
            bytes = static_cast<double>(hierarchy_nodes) * train * train * sizeof(double) + 3.0 * n2;
            break;
    }
    return bytes >= static_cast<double>(std::numeric_limits<std::size_t>::max())
               ? std::numeric_limits<std::size_t>::max()
               : static_cast<std::size_t>(bytes);
}

void finalize_statistics(CVReport& report) {
    double total = 0.0;
    std::size_t count = 0;
    std::vector<double> repeat_means;
    for (const auto& row : report.accuracy) {
        if (row.empty()) continue;
        double s = 0.0;
        for (double a : row) s += a;
        total += s;
        count += row.size();
        repeat_means.push_back(s / static_cast<double>(row.size()));
    }
    report.mean_accuracy = count ? total / static_cast<double>(count) : 0.0;
    double m = 0.0;
    for (double x : repeat_means) m += x;
    m = repeat_means.empty() ? 0.0 : m / static_cast<double>(repeat_means.size());
    double var = 0.0;
    for (double x : repeat_means) var += (x - m) * (x - m);
    report.std_dev = repeat_means.empty() ? 0.0 : std::sqrt(var / static_cast<double>(repeat_means.size()));
}

CVReport run_experiment(const GraphDataset& dataset, const MethodConfig& config, unsigned jobs) {
    config.validate();
    validate(dataset);
    CVReport report;
    report.dataset = dataset.name;
    report.config = config;
    report.notes.push_back(config.stratified ? "folds stratified by class" : "folds not stratified");
    report.notes.push_back("hierarchy built on the full dataset; MKL and SVM see training rows only");
    if (config.normalize) report.notes.push_back("kernels normalized to unit diagonal");

    auto t0 = Clock::now();
    const auto hier = refine_colors(dataset, config.h, jobs);
    report.timing.hierarchy_seconds = seconds_since(t0);
    report.hierarchy_nodes = hier.num_nodes();

    report.required_bytes = estimate_memory(config, dataset.size(), hier.num_nodes());
    if (config.memory_cap && report.required_bytes > config.memory_cap) {
        report.status = "OOM";
        report.message = method_name(config.method) + " needs about " +
                         std::to_string(report.required_bytes >> 20) + " MiB, cap is " +
                         std::to_string(config.memory_cap >> 20) + " MiB";
        return report;
    }

    t0 = Clock::now();
    std::unique_ptr<KernelFamily> family;
    switch (config.method) {
        case Method::kWL:
            family = std::make_unique<FixedKernelFamily>(wl_subtree_matrix(hier, jobs), config.normalize);
            break;
        case Method::kWLOA:
            family = std::make_unique<FixedKernelFamily>(wloa_matrix(hier, jobs), config.normalize);
            break;
        case Method::kDWLOA1:
            family = std::make_unique<NodeKernelFamily>(hier, config.normalize, config.mkl, jobs);
            break;
        case Method::kDWLOA2: {
            const auto assignment = kmeans(node_feature_vectors(hier), config.k_clusters,
                                           derive_seed(config.seed, 0xc1), 300, jobs);
            if (assignment.k < config.k_clusters)
                report.notes.push_back("k reduced to " + std::to_string(assignment.k));
            report.notes.push_back("node clustering computed on the full dataset");
            family = std::make_unique<GroupKernelFamily>(group_kernel_matrices(hier, assignment, jobs),
                                                         config.normalize, config.mkl);
            break;
        }
    }
    report.kernel_groups = family->num_kernels();
    report.timing.kernel_seconds = seconds_since(t0);

    t0 = Clock::now();
    std::vector<std::vector<std::vector<std::size_t>>> splits(config.repeats);
    for (std::size_t r = 0; r < config.repeats; ++r)
        splits[r] = make_folds(dataset.labels, config.folds, derive_seed(config.seed, 0xf0, r), config.stratified);
    const std::size_t tasks = config.repeats * config.folds;
    std::vector<FoldResult> results(tasks);
    parallel::for_each_index(
        tasks,
        [&](std::size_t t) {
            const std::size_t r = t / config.folds, f = t % config.folds;
            const auto& test = splits[r][f];
            std::vector<std::size_t> train;
            for (std::size_t g = 0; g < config.folds; ++g)
                if (g != f) train.insert(train.end(), splits[r][g].begin(), splits[r][g].end());
            std::sort(train.begin(), train.end());
            results[t] = evaluate_fold(*family, dataset.labels, train, test, config, derive_seed(config.seed, r, f), 1);
            results[t].repeat = r;
            results[t].fold = f;
        },
        jobs);
    report.timing.cv_seconds = seconds_since(t0);

    report.accuracy.assign(config.repeats, std::vector<double>(config.folds, 0.0));
    for (const auto& fr : results) report.accuracy[fr.repeat][fr.fold] = fr.accuracy;
    report.folds = std::move(results);
    finalize_statistics(report);
    return report;
}

namespace {

std::string cell(const CVReport& r) {
    if (r.status != "ok") return r.status;
    std::ostringstream s;
    s << std::fixed << std::setprecision(1) << 100.0 * r.mean_accuracy << "±" << 100.0 * r.std_dev;
    return s.str();
}

// Display width, counting the two-byte '±' as one column.
std::size_t width(const std::string& s) {
    std::size_t w = 0;
    for (unsigned char c : s) w += (c & 0xc0) != 0x80;
    return w;
}

}  // namespace

std::string summarize_text(std::span<const CVReport> reports) {
    std::vector<std::string> datasets;
    std::vector<Method> methods;
    std::map<std::pair<std::string, int>, std::string> cells;
    for (const auto& r : reports) {
        if (std::find(datasets.begin(), datasets.end(), r.dataset) == datasets.end()) datasets.push_back(r.dataset);
        if (std::find(methods.begin(), methods.end(), r.config.method) == methods.end())
            methods.push_back(r.config.method);
        cells[{r.dataset, static_cast<int>(r.config.method)}] = cell(r);
    }
    std::sort(methods.begin(), methods.end());
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"Kernel"});
    for (const auto& d : datasets) rows[0].push_back(d);
    for (Method m : methods) {
        std::vector<std::string> row{method_name(m)};
        for (const auto& d : datasets) {
            auto it = cells.find({d, static_cast<int>(m)});
            row.push_back(it == cells.end() ? "-" : it->second);
        }
        rows.push_back(std::move(row));
    }
    std::vector<std::size_t> w(rows[0].size(), 0);
    for (const auto& row : rows)
        for (std::size_t c = 0; c < row.size(); ++c) w[c] = std::max(w[c], width(row[c]));
    std::ostringstream out;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t c = 0; c < rows[i].size(); ++c) {
            out << rows[i][c];
            if (c + 1 < rows[i].size()) out << std::string(w[c] - width(rows[i][c]) + 2, ' ');
        }
        out << '\n';
        if (i == 0) {
            std::size_t total = 0;
            for (auto x : w) total += x + 2;
            out << std::string(total - 2, '-') << '\n';
        }
    }
    return out.str();
}

std::string summarize_csv(std::span<const CVReport> reports) {
    std::ostringstream out;
    out << "dataset,method,status,mean_accuracy,std_dev\n";
    for (const auto& r : reports)
        out << r.dataset << ',' << method_name(r.config.method) << ',' << r.status << ','
            << format_double(r.mean_accuracy) << ',' << format_double(r.std_dev) << '\n';
    return out.str();
}

std::string report_to_json(const CVReport& r, bool include_timing) {
    using nlohmann::ordered_json;
    ordered_json j;
    j["dataset"] = r.dataset;
    j["method"] = method_name(r.config.method);
    j["status"] = r.status;
    if (!r.message.empty()) j["message"] = r.message;
    const auto& c = r.config;
    j["config"] = {{"h", c.h},
                   {"k_clusters", c.k_clusters},
                   {"normalize", c.normalize},
                   {"c_grid", c.c_grid},
                   {"lambda_grid", c.lambda_grid},
                   {"seed", c.seed},
                   {"folds", c.folds},
                   {"repeats", c.repeats},
                   {"inner_folds", c.inner_folds},
                   {"stratified", c.stratified},
                   {"memory_cap", c.memory_cap},
                   {"node_labels", c.use_node_labels},
                   {"svm_tol", c.svm_tol},
                   {"mkl_tol", c.mkl.tol},
                   {"mkl_max_iter", c.mkl.max_iter}};
    j["mean_accuracy"] = r.mean_accuracy;
    j["std_dev"] = r.std_dev;
    j["std_over"] = "per-repeat mean accuracies";
    j["accuracy"] = r.accuracy;
    j["hierarchy_nodes"] = r.hierarchy_nodes;
    j["kernel_groups"] = r.kernel_groups;
    j["required_bytes"] = r.required_bytes;
    if (learns_weights(c.method) && !r.folds.empty()) {
        double z = 0.0;
        for (const auto& f : r.folds) z += f.alpha_zero_fraction;
        j["alpha_zero_fraction"] = z / static_cast<double>(r.folds.size());
    }
    ordered_json folds = ordered_json::array();
    for (const auto& f : r.folds) {
        ordered_json jf;
        jf["repeat"] = f.repeat;
        jf["fold"] = f.fold;
        jf["test_size"] = f.test_size;
        jf["correct"] = f.correct;
        jf["accuracy"] = f.accuracy;
        jf["C"] = f.C;
        jf["inner_accuracy"] = f.inner_accuracy;
        if (f.lambda) {
            jf["lambda"] = *f.lambda;
            jf["mkl_iterations"] = f.mkl_iterations;
            jf["alpha_zero_fraction"] = f.alpha_zero_fraction;
            jf["alpha"] = f.alpha;
        }
        folds.push_back(std::move(jf));
    }
    j["folds"] = std::move(folds);
    j["notes"] = r.notes;
    if (include_timing)
        j["timing"] = {{"hierarchy_seconds", r.timing.hierarchy_seconds},
                       {"kernel_seconds", r.timing.kernel_seconds},
                       {"cv_seconds", r.timing.cv_seconds}};
    return j.dump(2) + "\n";
}

CVReport report_from_json(const std::string& text) {
    CVReport r;
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
        r.dataset = j.at("dataset").get<std::string>();
        r.config.method = parse_method(j.at("method").get<std::string>());
        r.status = j.at("status").get<std::string>();
        if (j.contains("message")) r.message = j["message"].get<std::string>();
        const auto& c = j.at("config");
        r.config.h = c.at("h").get<int>();
        r.config.k_clusters = c.at("k_clusters").get<std::size_t>();
        r.config.normalize = c.at("normalize").get<bool>();
        r.config.c_grid = c.at("c_grid").get<std::vector<double>>();
        r.config.lambda_grid = c.at("lambda_grid").get<std::vector<double>>();
        r.config.seed = c.at("seed").get<std::uint64_t>();
        r.config.folds = c.at("folds").get<std::size_t>();
        r.config.repeats = c.at("repeats").get<std::size_t>();
        r.accuracy = j.at("accuracy").get<std::vector<std::vector<double>>>();
        r.hierarchy_nodes = j.value("hierarchy_nodes", std::size_t{0});
        r.kernel_groups = j.value("kernel_groups", std::size_t{0});
        for (const auto& jf : j.at("folds")) {
            FoldResult f;
            f.repeat = jf.at("repeat").get<std::size_t>();
            f.fold = jf.at("fold").get<std::size_t>();
            f.test_size = jf.at("test_size").get<std::size_t>();
            f.correct = jf.at("correct").get<std::size_t>();
            f.accuracy = jf.at("accuracy").get<double>();
            f.C = jf.at("C").get<double>();
            f.inner_accuracy = jf.at("inner_accuracy").get<double>();
            if (jf.contains("lambda")) {
                f.lambda = jf["lambda"].get<double>();
                f.mkl_iterations = jf.at("mkl_iterations").get<std::size_t>();
                f.alpha_zero_fraction = jf.at("alpha_zero_fraction").get<double>();
                f.alpha = jf.at("alpha").get<std::vector<double>>();
            }
            r.folds.push_back(std::move(f));
        }
        r.notes = j.value("notes", std::vector<std::string>{});
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("report JSON: ") + e.what());
    }
    finalize_statistics(r);
    return r;
}

std::string report_to_csv(const CVReport& r) {
    std::ostringstream out;
    out << "dataset,method,status,repeat,fold,test_size,correct,accuracy,C,lambda,alpha_zero_fraction\n";
    for (const auto& f : r.folds) {
        out << r.dataset << ',' << method_name(r.config.method) << ',' << r.status << ',' << f.repeat << ','
            << f.fold << ',' << f.test_size << ',' << f.correct << ',' << format_double(f.accuracy) << ','
            << format_double(f.C) << ',' << (f.lambda ? format_double(*f.lambda) : "") << ','
            << (f.lambda ? format_double(f.alpha_zero_fraction) : "") << '\n';
    }
    if (r.folds.empty())
        out << r.dataset << ',' << method_name(r.config.method) << ',' << r.status << ",,,,,,,,\n";
    return out.str();
}

std::size_t parse_memory_size(const std::string& text) {
    if (text.empty()) throw ConfigError("empty memory size");
    std::size_t pos = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &pos);
    } catch (const std::exception&) {
        throw ConfigError("bad memory size '" + text + "'");
    }
    std::string unit = text.substr(pos);
    double mult = 1.0;
    if (unit.empty() || unit == "B") mult = 1.0;
    else if (unit == "K" || unit == "KB" || unit == "KiB") mult = 1024.0;
    else if (unit == "M" || unit == "MB" || unit == "MiB") mult = 1024.0 * 1024.0;
    else if (unit == "G" || unit == "GB" || unit == "GiB") mult = 1024.0 * 1024.0 * 1024.0;
    else throw ConfigError("bad memory size unit '" + unit + "'");
    if (!(value >= 0.0)) throw ConfigError("memory size must be non-negative");
    return static_cast<std::size_t>(value * mult);
}

std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(item, &pos));
            while (pos < item.size() && std::isspace(static_cast<unsigned char>(item[pos]))) ++pos;
            if (pos != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError("bad grid value '" + item + "'");
        }
    }
    if (out.empty()) throw ConfigError("empty grid");
    return out;
}

RunConfig parse_run_config(std::istream& in) {
    RunConfig rc;
    std::string line;
    std::size_t lineno = 0;
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    auto as_bool = [](const std::string& v) {
        if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
        if (v == "false" || v == "0" || v == "no" || v == "off") return false;
        throw ConfigError("bad boolean '" + v + "'");
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        auto& m = rc.method;
        try {
            if (key == "dataset") rc.dataset_dir = value;
            else if (key == "name") rc.name = value;
            else if (key == "method") m.method = parse_method(value);
            else if (key == "h") m.h = std::stoi(value);
            else if (key == "k") m.k_clusters = std::stoul(value);
            else if (key == "c_grid") m.c_grid = parse_grid(value);
            else if (key == "lambda_grid") m.lambda_grid = parse_grid(value);
            else if (key == "seed") m.seed = std::stoull(value);
            else if (key == "normalize") m.normalize = as_bool(value);
            else if (key == "folds") m.folds = std::stoul(value);
            else if (key == "repeats") m.repeats = std::stoul(value);
            else if (key == "inner_folds") m.inner_folds = std::stoul(value);
            else if (key == "stratified") m.stratified = as_bool(value);
            else if (key == "memory_cap") m.memory_cap = parse_memory_size(value);
            else if (key == "node_labels") m.use_node_labels = as_bool(value);
            else if (key == "svm_tol") m.svm_tol = std::stod(value);
            else if (key == "mkl_tol") m.mkl.tol = std::stod(value);
            else if (key == "mkl_max_iter") m.mkl.max_iter = std::stoul(value);
            else throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception&) {
            throw ConfigError("config line " + std::to_string(lineno) + ": bad value for '" + key + "'");
        }
    }
    if (rc.name.empty() && !rc.dataset_dir.empty()) rc.name = rc.dataset_dir.filename().string();
    return rc;
}

}  // namespace dwloa
