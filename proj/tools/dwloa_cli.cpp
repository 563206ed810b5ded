// dwloa_cli: dataset inspection, kernel export, weight learning and the
// cross-validation benchmark.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include "CLI11.hpp"

#include "dwloa/bench.hpp"
#include "dwloa/error.hpp"
#include "dwloa/grouping.hpp"
#include "dwloa/parallel.hpp"
#include "dwloa/simd.hpp"

namespace fs = std::filesystem;
using namespace dwloa;

namespace {

struct DatasetArgs {
    std::string dir;
    std::string name;
    bool node_labels = false;

    void attach(CLI::App* app) {
        app->add_option("--dataset", dir, "TUDataset directory")->required();
        app->add_option("--name", name, "dataset name (defaults to the directory name)");
        app->add_flag("--node-labels", node_labels, "start refinement from the node labels");
    }
    GraphDataset load() const {
        const fs::path p(dir);
        return load_tudataset(p, name.empty() ? p.filename().string() : name, node_labels);
    }
};

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw LoadError("cannot write " + path.string());
    return out;
}

// Runs `write` against the file at `path`, or stdout when the path is empty.
template <class F>
void emit(const std::string& path, F&& write) {
    if (path.empty() || path == "-") {
        write(std::cout);
    } else {
        auto out = open_out(path);
        write(out);
    }
}

std::vector<double> read_weight_file(const std::string& path, std::string* id_name) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open weights file " + path);
    std::vector<double> w;
    std::string line;
    bool header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw FormatError("weights file: expected id,alpha");
        if (!header) {
            header = true;
            *id_name = line.substr(0, comma);
            continue;
        }
        const auto id = std::stoul(line.substr(0, comma));
        if (id != w.size()) throw FormatError("weights file: ids must be 0..R-1 in order");
        w.push_back(std::stod(line.substr(comma + 1)));
    }
    return w;
}

void write_kernel(const std::string& path, const std::string& format, const KernelMatrix& k,
                  std::span<const int> labels) {
    emit(path, [&](std::ostream& out) {
        if (format == "csv") write_kernel_csv(out, k);
        else if (format == "precomputed") write_kernel_precomputed(out, k, labels);
        else write_kernel_json(out, k);
    });
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Deep WL optimal-assignment kernels"};
    app.set_help_flag("--help", "Print this help message and exit");
    app.require_subcommand(1);
    unsigned jobs = 0;
    std::string isa = "auto";
    app.add_option("--jobs", jobs, "worker threads (0 = all cores)");
    app.add_option("--isa", isa, "SIMD path")->check(CLI::IsMember({"auto", "scalar", "avx2"}));

    // inspect
    auto* inspect = app.add_subcommand("inspect", "dataset statistics and hierarchy summary");
    DatasetArgs inspect_ds;
    inspect_ds.attach(inspect);
    int inspect_h = -1;
    std::string hierarchy_out, clusters_out;
    std::size_t inspect_k = 0;
    std::uint64_t inspect_seed = 0;
    inspect->add_option("--h", inspect_h, "also refine for h iterations and summarize the hierarchy");
    inspect->add_option("--hierarchy-out", hierarchy_out, "write the hierarchy (node,level,parent,weight)");
    inspect->add_option("--k", inspect_k, "cluster hierarchy nodes into k groups");
    inspect->add_option("--seed", inspect_seed, "k-means seed");
    inspect->add_option("--clusters-out", clusters_out, "write node,level,cluster");

    // kernel
    auto* kernel = app.add_subcommand("kernel", "compute and export a kernel matrix");
    DatasetArgs kernel_ds;
    kernel_ds.attach(kernel);
    std::string kernel_method = "wloa", format = "csv", kernel_out, weights_path;
    int kernel_h = 4;
    bool kernel_normalize = false;
    double kernel_lambda = 0.5;
    std::size_t kernel_k = 0;
    std::uint64_t kernel_seed = 0;
    kernel->add_option("--method", kernel_method)->check(CLI::IsMember({"wl", "wloa", "dwloa"}));
    kernel->add_option("--h", kernel_h);
    kernel->add_flag("--normalize", kernel_normalize, "scale to unit diagonal");
    kernel->add_option("--format", format)->check(CLI::IsMember({"csv", "precomputed", "json"}));
    kernel->add_option("--out", kernel_out, "output file (default stdout)");
    kernel->add_option("--weights", weights_path, "dwloa: weights file written by `mkl`");
    kernel->add_option("--lambda", kernel_lambda, "dwloa: learn weights on all graphs with this lambda");
    kernel->add_option("--k", kernel_k, "dwloa: cluster nodes into k groups (0 = per-node weights)");
    kernel->add_option("--seed", kernel_seed, "dwloa: k-means seed");

    // mkl
    auto* mkl = app.add_subcommand("mkl", "learn hierarchy weights on the whole dataset");
    DatasetArgs mkl_ds;
    mkl_ds.attach(mkl);
    int mkl_h = 4;
    double mkl_lambda = 0.5;
    std::size_t mkl_k = 0;
    std::uint64_t mkl_seed = 0;
    std::string mkl_out;
    mkl->add_option("--h", mkl_h);
    mkl->add_option("--lambda", mkl_lambda);
    mkl->add_option("--k", mkl_k, "cluster nodes into k groups (0 = per-node weights)");
    mkl->add_option("--seed", mkl_seed);
    mkl->add_option("--out", mkl_out, "weights file (default stdout)");

    // run
    auto* run = app.add_subcommand("run", "repeated cross-validation benchmark");
    std::string config_path, run_out = "results", method_text = "WL-OA", c_grid, lambda_grid, memory_cap;
    DatasetArgs run_ds;
    run->add_option("--config", config_path, "key = value run configuration");
    run->add_option("--dataset", run_ds.dir, "TUDataset directory");
    run->add_option("--name", run_ds.name);
    run->add_flag("--node-labels", run_ds.node_labels);
    run->add_option("--method", method_text, "WL, WL-OA, DWL-OA1 or DWL-OA2");
    MethodConfig mc;
    run->add_option("--h", mc.h);
    run->add_option("--k", mc.k_clusters);
    run->add_option("--c-grid", c_grid, "comma separated C values");
    run->add_option("--lambda-grid", lambda_grid, "comma separated lambda values");
    run->add_option("--seed", mc.seed);
    run->add_option("--folds", mc.folds);
    run->add_option("--repeats", mc.repeats);
    run->add_option("--inner-folds", mc.inner_folds);
    run->add_flag("--normalize", mc.normalize);
    run->add_option("--memory-cap", memory_cap, "e.g. 512M, 2G");
    run->add_flag("--record-timing", "include stage timings in report.json");
    run->add_option("--out", run_out, "output directory");

    // report
    auto* report = app.add_subcommand("report", "summarize report.json files as a table");
    std::vector<std::string> report_files;
    std::string report_csv;
    report->add_option("reports", report_files, "report.json files")->required();
    report->add_option("--csv", report_csv, "also write a CSV summary");

    CLI11_PARSE(app, argc, argv);

    try {
        if (isa == "scalar") simd::force_isa(simd::Isa::kScalar);
        else if (isa == "avx2") simd::force_isa(simd::Isa::kAvx2);
        if (jobs) parallel::set_default_jobs(jobs);

        if (*inspect) {
            const auto ds = inspect_ds.load();
            std::cout << format_stats(ds.name, dataset_stats(ds));
            if (inspect_h >= 0) {
                const auto hier = refine_colors(ds, inspect_h);
                std::cout << "hierarchy: h=" << hier.h() << " nodes=" << hier.num_nodes() << '\n';
                for (int i = 0; i <= hier.h(); ++i)
                    std::cout << "  level " << i << ": " << hier.level_size(i) << " colors\n";
                if (!hierarchy_out.empty()) emit(hierarchy_out, [&](std::ostream& o) { write_hierarchy(o, hier); });
                if (inspect_k) {
                    const auto a = kmeans(node_feature_vectors(hier), inspect_k, inspect_seed);
                    std::cout << "clusters: k=" << a.k << " inertia=" << format_double(a.inertia())
                              << " iterations=" << a.iterations << '\n';
                    if (!clusters_out.empty()) emit(clusters_out, [&](std::ostream& o) { write_assignment(o, hier, a); });
                }
            }
            std::cout << "simd: " << simd::isa_name(simd::active_isa()) << '\n';
            return 0;
        }

        if (*kernel) {
            const auto ds = kernel_ds.load();
            const auto hier = refine_colors(ds, kernel_h);
            KernelMatrix k;
            if (kernel_method == "wl") {
                k = wl_subtree_matrix(hier);
            } else if (kernel_method == "wloa") {
                k = wloa_matrix(hier);
            } else if (!weights_path.empty()) {
                std::string id_name;
                const auto w = read_weight_file(weights_path, &id_name);
                if (id_name == "cluster") {
                    if (!kernel_k) throw ConfigError("cluster weights need --k and the --seed used to learn them");
                    const auto a = kmeans(node_feature_vectors(hier), kernel_k, kernel_seed);
                    k = combine(group_kernel_matrices(hier, a), w);
                } else {
                    k = wloa_matrix(hier, w, 0.0);
                }
                k.provenance = "dwl-oa h=" + std::to_string(kernel_h) + " weights=" + weights_path;
            } else {
                std::vector<std::size_t> all(ds.size());
                std::iota(all.begin(), all.end(), 0);
                std::optional<std::size_t> kk;
                if (kernel_k) kk = kernel_k;
                k = pipeline_dwloa(hier, all, ds.labels, kk, kernel_lambda, kernel_seed).first;
            }
            if (kernel_normalize) k = normalize_unit_diagonal(k);
            write_kernel(kernel_out, format, k, ds.labels);
            return 0;
        }

        if (*mkl) {
            const auto ds = mkl_ds.load();
            const auto hier = refine_colors(ds, mkl_h);
            std::vector<std::size_t> all(ds.size());
            std::iota(all.begin(), all.end(), 0);
            std::optional<std::size_t> kk;
            if (mkl_k) kk = mkl_k;
            const auto w = pipeline_dwloa(hier, all, ds.labels, kk, mkl_lambda, mkl_seed).second;
            emit(mkl_out, [&](std::ostream& o) { write_weights(o, w, kk ? "cluster" : "node"); });
            return 0;
        }

        if (*run) {
            RunConfig rc;
            if (!config_path.empty()) {
                std::ifstream in(config_path);
                if (!in) throw LoadError("cannot open config " + config_path);
                rc = parse_run_config(in);
            } else {
                rc.method = mc;
                rc.method.method = parse_method(method_text);
                if (!c_grid.empty()) rc.method.c_grid = parse_grid(c_grid);
                if (!lambda_grid.empty()) rc.method.lambda_grid = parse_grid(lambda_grid);
                if (!memory_cap.empty()) rc.method.memory_cap = parse_memory_size(memory_cap);
                rc.method.use_node_labels = run_ds.node_labels;
            }
            // explicit flags override the config file's dataset location
            if (!run_ds.dir.empty()) rc.dataset_dir = run_ds.dir;
            if (!run_ds.name.empty()) rc.name = run_ds.name;
            if (rc.dataset_dir.empty()) throw ConfigError("no dataset given (--dataset or config 'dataset')");
            if (rc.name.empty()) rc.name = rc.dataset_dir.filename().string();

            const auto ds = load_tudataset(rc.dataset_dir, rc.name, rc.method.use_node_labels);
            const auto rep = run_experiment(ds, rc.method);
            const fs::path out(run_out);
            fs::create_directories(out);
            const bool timing = run->count("--record-timing") > 0;
            open_out(out / "report.json") << report_to_json(rep, timing);
            open_out(out / "report.csv") << report_to_csv(rep);
            const std::vector<CVReport> one{rep};
            open_out(out / "table.txt") << summarize_text(one);
            std::cout << summarize_text(one);
            if (rep.status != "ok") {
                std::cerr << rep.status << ": " << rep.message << '\n';
                return 3;
            }
            return 0;
        }

        if (*report) {
            std::vector<CVReport> reps;
            for (const auto& f : report_files) {
                std::ifstream in(f);
                if (!in) throw LoadError("cannot open report " + f);
                std::stringstream ss;
                ss << in.rdbuf();
                reps.push_back(report_from_json(ss.str()));
            }
            std::cout << summarize_text(reps);
            if (!report_csv.empty()) open_out(report_csv) << summarize_csv(reps);
            return 0;
        }
    } catch (const ResourceError& e) {
        std::cerr << "resource error: " << e.what() << '\n';
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
