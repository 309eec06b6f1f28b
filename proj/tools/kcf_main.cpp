// Command-line front end: CSV ingestion, estimator invocation, penalty
// tuning, herded sampling, and simulation studies. Exit codes: 0 success,
// 2 configuration/schema, 3 numerical, 4 I/O.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "kcf/causal.hpp"
#include "kcf/csv.hpp"
#include "kcf/distributions.hpp"
#include "kcf/graphical.hpp"
#include "kcf/kernels.hpp"
#include "kcf/ridge.hpp"
#include "kcf/simulate.hpp"
#include "kcf/types.hpp"

namespace {

using json = nlohmann::ordered_json;
using kcf::ConfigError;
using kcf::Estimand;
using kcf::Mat;
using kcf::Vec;
using kcf::kernels::KernelConfig;

struct GridSpec {
    double min = 0.0;
    double max = 0.0;
    int count = 0;
};

GridSpec parse_grid_spec(const std::string& text) {
    GridSpec spec;
    std::istringstream in(text);
    char c1 = 0, c2 = 0;
    if (!(in >> spec.min >> c1 >> spec.max >> c2 >> spec.count) || c1 != ':' || c2 != ':' ||
        !in.eof())
        throw ConfigError("grid spec must be min:max:count, got '" + text + "'");
    if (spec.count < 1) throw ConfigError("grid count must be at least 1");
    if (spec.count > 1 && !(spec.max > spec.min))
        throw ConfigError("grid needs max > min when count > 1");
    return spec;
}

Vec linspace(const GridSpec& spec) {
    Vec grid(spec.count);
    if (spec.count == 1) {
        grid[0] = spec.min;
        return grid;
    }
    const double step = (spec.max - spec.min) / (spec.count - 1);
    for (int i = 0; i < spec.count; ++i) grid[i] = spec.min + step * i;
    return grid;
}

Estimand parse_estimand(const std::string& name) {
    static const std::map<std::string, Estimand> table = {
        {"ate", Estimand::Ate},        {"ds", Estimand::Ds},
        {"att", Estimand::Att},        {"cate", Estimand::Cate},
        {"inc-ate", Estimand::IncAte}, {"inc-att", Estimand::IncAtt},
        {"frontdoor", Estimand::FrontDoor}};
    const auto it = table.find(name);
    if (it == table.end()) throw ConfigError("unknown estimand '" + name + "'");
    return it->second;
}

// --kernel block=median|median-shared|exact|iota:v1[,v2,...]
// Default: per-dimension medians for scalar blocks, the shared Euclidean
// median for multi-dimensional ones.
struct KernelSpec {
    enum class Kind { Default, Median, MedianShared, Exact, Explicit } kind = Kind::Default;
    std::vector<double> lengthscales;
};

std::map<std::string, KernelSpec> parse_kernel_flags(const std::vector<std::string>& flags) {
    std::map<std::string, KernelSpec> specs;
    for (const std::string& flag : flags) {
        const auto eq = flag.find('=');
        if (eq == std::string::npos)
            throw ConfigError("kernel flag must be block=spec, got '" + flag + "'");
        const std::string block = flag.substr(0, eq);
        const std::string body = flag.substr(eq + 1);
        if (block != "d" && block != "v" && block != "x" && block != "y")
            throw ConfigError("kernel block must be one of d, v, x, y");
        KernelSpec spec;
        if (body == "median") {
            spec.kind = KernelSpec::Kind::Median;
        } else if (body == "median-shared") {
            spec.kind = KernelSpec::Kind::MedianShared;
        } else if (body == "exact") {
            spec.kind = KernelSpec::Kind::Exact;
        } else if (body.rfind("iota:", 0) == 0) {
            spec.kind = KernelSpec::Kind::Explicit;
            std::istringstream in(body.substr(5));
            std::string token;
            while (std::getline(in, token, ',')) {
                try {
                    spec.lengthscales.push_back(std::stod(token));
                } catch (const std::exception&) {
                    throw ConfigError("bad lengthscale '" + token + "' in '" + flag + "'");
                }
            }
            if (spec.lengthscales.empty())
                throw ConfigError("no lengthscales given in '" + flag + "'");
        } else {
            throw ConfigError("kernel spec must be median, median-shared, exact, or iota:..., "
                              "got '" + body + "'");
        }
        specs[block] = spec;
    }
    return specs;
}

KernelConfig resolve_kernel(const std::map<std::string, KernelSpec>& specs,
                            const std::string& block, const Mat& points) {
    const auto it = specs.find(block);
    const KernelSpec spec = it == specs.end() ? KernelSpec{} : it->second;
    switch (spec.kind) {
        case KernelSpec::Kind::Exact: return KernelConfig::exact_match();
        case KernelSpec::Kind::Explicit: {
            Vec iota(static_cast<kcf::Index>(spec.lengthscales.size()));
            for (std::size_t i = 0; i < spec.lengthscales.size(); ++i)
                iota[static_cast<kcf::Index>(i)] = spec.lengthscales[i];
            if (iota.size() != points.cols())
                throw ConfigError("kernel block '" + block + "' needs " +
                                  std::to_string(points.cols()) + " lengthscales");
            return KernelConfig::exp_quadratic(iota);
        }
        case KernelSpec::Kind::Median:
            return KernelConfig::exp_quadratic(kcf::kernels::median_heuristic(points));
        case KernelSpec::Kind::MedianShared:
            return KernelConfig::exp_quadratic(
                Vec::Constant(points.cols(), kcf::kernels::median_heuristic_shared(points)));
        case KernelSpec::Kind::Default:
        default: return kcf::kernels::default_block_kernel(points);
    }
}

KernelConfig resolve_kernel(const std::map<std::string, KernelSpec>& specs,
                            const std::string& block, const Vec& points) {
    return resolve_kernel(specs, block, Mat(points));
}

json kernel_to_json(const KernelConfig& config) {
    json j;
    j["family"] =
        config.family == kcf::kernels::Family::ExpQuadratic ? "exp-quadratic" : "exact-match";
    if (config.family == kcf::kernels::Family::ExpQuadratic) {
        std::vector<double> iota(config.lengthscales.data(),
                                 config.lengthscales.data() + config.lengthscales.size());
        j["lengthscales"] = iota;
    }
    return j;
}

// Shared penalty-policy flags.
struct PenaltyFlags {
    std::string policy = "loocv";
    double lambda = -1.0;
    double lambda1 = -1.0;
    double lambda2 = -1.0;
    double lambda3 = -1.0;
    double b = 1.0;
    double c = 2.0;
    std::string grid_spec;  // lo:hi:count, log-spaced

    void add_to(CLI::App& cmd) {
        cmd.add_option("--penalty", policy, "penalty policy: loocv, gcv, fixed, or theoretical")
            ->check(CLI::IsMember({"loocv", "gcv", "fixed", "theoretical"}));
        cmd.add_option("--lambda", lambda, "outcome-regression penalty (fixed policy)");
        cmd.add_option("--lambda1", lambda1, "treatment-embedding penalty (fixed policy)");
        cmd.add_option("--lambda2", lambda2, "v-embedding penalty (fixed policy)");
        cmd.add_option("--lambda3", lambda3, "distribution-embedding penalty (fixed policy)");
        cmd.add_option("--b", b, "spectral-decay exponent (theoretical policy)");
        cmd.add_option("--c", c, "smoothness exponent (theoretical policy)");
        cmd.add_option("--penalty-grid", grid_spec,
                       "log-spaced candidate grid lo:hi:count (cross-validated policies)");
    }

    [[nodiscard]] Vec candidate_grid() const {
        if (grid_spec.empty()) return kcf::ridge::default_penalty_grid();
        const GridSpec spec = parse_grid_spec(grid_spec);
        return kcf::ridge::log_spaced_grid(spec.min, spec.max, spec.count);
    }

    [[nodiscard]] kcf::causal::PenaltyPolicy to_policy() const {
        kcf::causal::PenaltyPolicy out;
        if (policy == "fixed") {
            if (lambda <= 0.0) throw ConfigError("fixed penalty policy requires --lambda > 0");
            out.kind = kcf::causal::PenaltyPolicy::Kind::Fixed;
            out.fixed.lambda = lambda;
            out.fixed.lambda1 = lambda1 > 0.0 ? lambda1 : lambda;
            out.fixed.lambda2 = lambda2 > 0.0 ? lambda2 : lambda;
            out.fixed.lambda3 = lambda3 > 0.0 ? lambda3 : lambda;
        } else if (policy == "theoretical") {
            out.kind = kcf::causal::PenaltyPolicy::Kind::Theoretical;
            out.b = b;
            out.c = c;
        } else {
            out.kind = policy == "loocv" ? kcf::causal::PenaltyPolicy::Kind::Loocv
                                         : kcf::causal::PenaltyPolicy::Kind::Gcv;
            out.grid = candidate_grid();
        }
        return out;
    }
};

json penalties_to_json(const kcf::Penalties& p) {
    json j;
    if (p.lambda > 0.0) j["lambda"] = p.lambda;
    if (p.lambda1 > 0.0) j["lambda1"] = p.lambda1;
    if (p.lambda2 > 0.0) j["lambda2"] = p.lambda2;
    if (p.lambda3 > 0.0) j["lambda3"] = p.lambda3;
    return j;
}

void write_sidecar(const std::string& out_path, const json& j) {
    kcf::csv::write_text(out_path + ".json", j.dump(2) + "\n");
}

std::map<std::string, GridSpec> parse_grid_flags(const std::vector<std::string>& flags) {
    std::map<std::string, GridSpec> grids;
    for (const std::string& flag : flags) {
        const auto eq = flag.find('=');
        if (eq == std::string::npos)
            throw ConfigError("grid flag must be var=min:max:count, got '" + flag + "'");
        const std::string var = flag.substr(0, eq);
        if (var != "d" && var != "dprime" && var != "v" && var != "y")
            throw ConfigError("grid variable must be one of d, dprime, v, y");
        grids[var] = parse_grid_spec(flag.substr(eq + 1));
    }
    return grids;
}

GridSpec require_grid(const std::map<std::string, GridSpec>& grids, const std::string& var) {
    const auto it = grids.find(var);
    if (it == grids.end()) throw ConfigError("estimand requires --grid " + var + "=min:max:count");
    return it->second;
}

json grid_flags_to_json(const std::map<std::string, GridSpec>& grids) {
    json j;
    for (const auto& [var, spec] : grids)
        j[var] = {{"min", spec.min}, {"max", spec.max}, {"count", spec.count}};
    return j;
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
    std::string design = "dose";
    std::int64_t n = 0;
    std::uint64_t seed = 0;
    std::string out;
};

void run_simulate(const SimulateArgs& args) {
    kcf::Dataset data;
    if (args.design == "dose")
        data = kcf::simulate::gen_dose_design({args.n, args.seed});
    else
        data = kcf::simulate::gen_hte_design({args.n, args.seed});
    kcf::csv::write_dataset(args.out, data);
}

struct EstimateArgs {
    std::string input;
    std::string alt_covariates;
    std::string estimand = "ate";
    std::vector<std::string> grid_flags;
    std::vector<std::string> kernel_flags;
    PenaltyFlags penalties;
    std::uint64_t seed = 0;
    std::string out;
};

void run_estimate(const EstimateArgs& args) {
    const Estimand estimand = parse_estimand(args.estimand);
    const kcf::Dataset data = kcf::csv::read_dataset(args.input);
    const auto kernel_specs = parse_kernel_flags(args.kernel_flags);
    const auto grid_specs = parse_grid_flags(args.grid_flags);

    kcf::causal::BlockKernels blocks{resolve_kernel(kernel_specs, "d", data.d),
                                     resolve_kernel(kernel_specs, "x", data.x), std::nullopt};
    if (estimand == Estimand::Cate) {
        if (!data.v) throw ConfigError("cate requires a v column in the input");
        blocks.v = resolve_kernel(kernel_specs, "v", *data.v);
    }

    std::optional<Mat> alt;
    if (estimand == Estimand::Ds) {
        if (args.alt_covariates.empty()) throw ConfigError("estimand=ds requires --alt-covariates");
        alt = kcf::csv::read_covariates(args.alt_covariates);
    } else if (!args.alt_covariates.empty()) {
        throw ConfigError("--alt-covariates is only valid with estimand=ds");
    }

    const kcf::causal::PenaltyPolicy policy = args.penalties.to_policy();
    const kcf::Penalties penalties = kcf::causal::resolve_penalties(data, estimand, blocks, policy);

    Mat eval_grid;
    if (kcf::grid_arity(estimand) == 1) {
        eval_grid = Mat(linspace(require_grid(grid_specs, "d")));
    } else {
        const Vec d_grid = linspace(require_grid(grid_specs, "d"));
        const std::string second = estimand == Estimand::Cate ? "v" : "dprime";
        const Vec s_grid = linspace(require_grid(grid_specs, second));
        eval_grid.resize(d_grid.size() * s_grid.size(), 2);
        kcf::Index row = 0;
        for (kcf::Index i = 0; i < d_grid.size(); ++i)
            for (kcf::Index j = 0; j < s_grid.size(); ++j, ++row) {
                eval_grid(row, 0) = d_grid[i];
                eval_grid(row, 1) = s_grid[j];
            }
    }

    kcf::CurveEstimate curve;
    if (estimand == Estimand::FrontDoor) {
        kcf::graphical::FrontDoorRequest request;
        request.data = data;
        request.lambda = penalties.lambda;
        request.lambda1 = penalties.lambda1;
        request.kernel_d = blocks.d;
        request.kernel_x = blocks.x;
        request.d_grid = eval_grid.col(0);
        curve = kcf::graphical::estimate_frontdoor(request);
    } else {
        kcf::causal::CausalRequest request;
        request.estimand = estimand;
        request.data = data;
        request.alt_covariates = alt;
        request.eval_grid = eval_grid;
        request.penalties = penalties;
        request.kernels = blocks;
        curve = kcf::causal::estimate(request);
    }

    kcf::csv::write_curve(args.out, curve);

    json sidecar;
    sidecar["subcommand"] = "estimate";
    sidecar["estimand"] = args.estimand;
    sidecar["input"] = args.input;
    if (!args.alt_covariates.empty()) sidecar["alt_covariates"] = args.alt_covariates;
    sidecar["seed"] = args.seed;
    sidecar["penalty_policy"] = args.penalties.policy;
    sidecar["penalties"] = penalties_to_json(curve.penalties);
    sidecar["kernels"]["d"] = kernel_to_json(blocks.d);
    sidecar["kernels"]["x"] = kernel_to_json(blocks.x);
    if (blocks.v) sidecar["kernels"]["v"] = kernel_to_json(*blocks.v);
    sidecar["grid"] = grid_flags_to_json(grid_specs);
    write_sidecar(args.out, sidecar);
}

struct StudyArgs {
    std::string design = "dose";
    std::vector<std::int64_t> sizes;
    int replications = 1;
    std::uint64_t seed = 0;
    std::string criterion = "loocv";
    PenaltyFlags penalties;
    std::vector<std::string> grid_flags;
    int threads = 1;
    std::string out;
};

void run_study(const StudyArgs& args) {
    kcf::simulate::StudyConfig config;
    config.design = args.design == "dose" ? kcf::simulate::Design::Dose
                                          : kcf::simulate::Design::Hte;
    for (std::int64_t n : args.sizes) config.sample_sizes.push_back(n);
    config.replications = args.replications;
    config.seed = args.seed;
    config.criterion =
        args.criterion == "loocv" ? kcf::ridge::Criterion::Loocv : kcf::ridge::Criterion::Gcv;
    config.penalty_grid = args.penalties.candidate_grid();
    config.threads = args.threads;
    const auto grid_specs = parse_grid_flags(args.grid_flags);
    const std::string var = config.design == kcf::simulate::Design::Dose ? "d" : "v";
    if (grid_specs.count(var)) config.eval_grid = linspace(grid_specs.at(var));

    const kcf::simulate::StudyResult result = kcf::simulate::run_study(config);
    kcf::csv::write_study(args.out, result, args.design);

    json summary;
    summary["subcommand"] = "study";
    summary["design"] = args.design;
    summary["replications"] = args.replications;
    summary["seed"] = args.seed;
    summary["criterion"] = args.criterion;
    summary["aggregates"] = json::array();
    for (const auto& agg : result.aggregates) {
        summary["aggregates"].push_back({{"n", agg.n},
                                         {"mean_mse", agg.mean_mse},
                                         {"median_mse", agg.median_mse},
                                         {"failures", agg.failures}});
    }
    write_sidecar(args.out, summary);
}

struct HerdArgs {
    std::string input;
    std::string alt_covariates;
    std::string estimand = "ate";
    double at_d = 0.0;
    double at_dprime = 0.0;
    double at_v = 0.0;
    bool has_dprime = false;
    bool has_v = false;
    int m = 0;
    std::vector<std::string> grid_flags;
    std::vector<std::string> kernel_flags;
    PenaltyFlags penalties;
    std::uint64_t seed = 0;
    std::string out;
};

void run_herd(const HerdArgs& args) {
    const kcf::Dataset data = kcf::csv::read_dataset(args.input);
    const auto kernel_specs = parse_kernel_flags(args.kernel_flags);
    const auto grid_specs = parse_grid_flags(args.grid_flags);

    const KernelConfig kernel_y = resolve_kernel(kernel_specs, "y", data.y);
    kcf::causal::BlockKernels blocks{resolve_kernel(kernel_specs, "d", data.d),
                                     resolve_kernel(kernel_specs, "x", data.x), std::nullopt};

    const Estimand causal_estimand = parse_estimand(args.estimand);
    if (causal_estimand == Estimand::IncAte || causal_estimand == Estimand::IncAtt)
        throw ConfigError("herd supports ate, ds, att, cate, frontdoor");
    if (causal_estimand == Estimand::Cate) {
        if (!data.v) throw ConfigError("cate requires a v column in the input");
        blocks.v = resolve_kernel(kernel_specs, "v", *data.v);
    }

    const kcf::causal::PenaltyPolicy policy = args.penalties.to_policy();
    const kcf::Penalties penalties =
        kcf::causal::resolve_penalties(data, causal_estimand, blocks, policy, kernel_y);

    kcf::distributions::EmbeddingEstimate embedding;
    if (causal_estimand == Estimand::FrontDoor) {
        kcf::graphical::FrontDoorRequest request;
        request.data = data;
        request.lambda1 = penalties.lambda1;
        request.lambda3 = penalties.lambda3;
        request.kernel_d = blocks.d;
        request.kernel_x = blocks.x;
        request.kernel_y = kernel_y;
        embedding = kcf::graphical::embed_frontdoor(request, args.at_d);
    } else {
        kcf::distributions::EmbeddingRequest request;
        switch (causal_estimand) {
            case Estimand::Ate: request.estimand = kcf::distributions::DistEstimand::DAte; break;
            case Estimand::Ds: {
                request.estimand = kcf::distributions::DistEstimand::DDs;
                if (args.alt_covariates.empty())
                    throw ConfigError("estimand=ds requires --alt-covariates");
                request.alt_covariates = kcf::csv::read_covariates(args.alt_covariates);
                break;
            }
            case Estimand::Att:
                request.estimand = kcf::distributions::DistEstimand::DAtt;
                if (!args.has_dprime) throw ConfigError("att herding requires --at-dprime");
                break;
            case Estimand::Cate:
                request.estimand = kcf::distributions::DistEstimand::DCate;
                if (!args.has_v) throw ConfigError("cate herding requires --at-v");
                break;
            default: throw ConfigError("herd supports ate, ds, att, cate, frontdoor");
        }
        request.penalties = penalties;
        request.kernel_d = blocks.d;
        request.kernel_x = blocks.x;
        request.kernel_y = kernel_y;
        request.kernel_v = blocks.v;
        request.d = args.at_d;
        request.d_prime = args.at_dprime;
        request.v = args.at_v;
        embedding = kcf::distributions::embed_counterfactual(data, request);
    }

    const Vec candidate_grid = grid_specs.count("y")
                                   ? linspace(grid_specs.at("y"))
                                   : kcf::distributions::default_candidate_grid(data.y);
    const kcf::distributions::HerdedSample sample =
        kcf::distributions::herd(embedding, args.m, candidate_grid);
    kcf::csv::write_samples(args.out, sample.points);

    json sidecar;
    sidecar["subcommand"] = "herd";
    sidecar["estimand"] = args.estimand;
    sidecar["input"] = args.input;
    sidecar["m"] = args.m;
    sidecar["at"]["d"] = args.at_d;
    if (args.has_dprime) sidecar["at"]["dprime"] = args.at_dprime;
    if (args.has_v) sidecar["at"]["v"] = args.at_v;
    sidecar["seed"] = args.seed;
    sidecar["penalty_policy"] = args.penalties.policy;
    sidecar["penalties"] = penalties_to_json(penalties);
    sidecar["kernels"]["d"] = kernel_to_json(blocks.d);
    sidecar["kernels"]["x"] = kernel_to_json(blocks.x);
    if (blocks.v) sidecar["kernels"]["v"] = kernel_to_json(*blocks.v);
    sidecar["kernels"]["y"] = kernel_to_json(kernel_y);
    sidecar["candidate_grid"] = {{"min", candidate_grid[0]},
                                 {"max", candidate_grid[candidate_grid.size() - 1]},
                                 {"count", candidate_grid.size()}};
    write_sidecar(args.out, sidecar);
}

struct TuneArgs {
    std::string input;
    std::string estimand = "ate";
    std::string criterion = "loocv";
    std::vector<std::string> kernel_flags;
    std::string grid_spec;
    std::string out;
};

void run_tune(const TuneArgs& args) {
    const kcf::Dataset data = kcf::csv::read_dataset(args.input);
    const Estimand estimand = parse_estimand(args.estimand);
    const auto kernel_specs = parse_kernel_flags(args.kernel_flags);
    const kcf::ridge::Criterion criterion =
        args.criterion == "loocv" ? kcf::ridge::Criterion::Loocv : kcf::ridge::Criterion::Gcv;
    Vec grid = kcf::ridge::default_penalty_grid();
    if (!args.grid_spec.empty()) {
        const GridSpec spec = parse_grid_spec(args.grid_spec);
        grid = kcf::ridge::log_spaced_grid(spec.min, spec.max, spec.count);
    }

    const KernelConfig kd = resolve_kernel(kernel_specs, "d", data.d);
    const KernelConfig kx = resolve_kernel(kernel_specs, "x", data.x);
    const Mat k_dd = kcf::kernels::gram(data.d, data.d, kd).entries;
    const Mat k_xx = kcf::kernels::gram(data.x, data.x, kx).entries;
    Mat joint = k_dd.cwiseProduct(k_xx);

    json stages;
    auto record = [&](const std::string& stage, const kcf::ridge::TuneResult& result) {
        std::vector<double> grid_out(grid.data(), grid.data() + grid.size());
        std::vector<double> losses(result.losses.data(),
                                   result.losses.data() + result.losses.size());
        stages[stage] = {
            {"best_lambda", result.best_lambda}, {"grid", grid_out}, {"losses", losses}};
    };

    if (estimand == Estimand::Cate) {
        if (!data.v) throw ConfigError("cate requires a v column in the input");
        const KernelConfig kv = resolve_kernel(kernel_specs, "v", *data.v);
        const Mat k_vv = kcf::kernels::gram(*data.v, *data.v, kv).entries;
        joint = joint.cwiseProduct(k_vv);
        record("lambda2", kcf::ridge::tune_lambda(k_vv, k_xx, grid, criterion));
    }
    if (estimand == Estimand::Att || estimand == Estimand::IncAtt ||
        estimand == Estimand::FrontDoor) {
        record("lambda1", kcf::ridge::tune_lambda(k_dd, k_xx, grid, criterion));
    }
    record("lambda", kcf::ridge::tune_lambda(joint, Mat(data.y), grid, criterion));

    json out;
    out["subcommand"] = "tune";
    out["estimand"] = args.estimand;
    out["input"] = args.input;
    out["criterion"] = args.criterion;
    out["stages"] = stages;
    kcf::csv::write_text(args.out, out.dump(2) + "\n");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Closed-form kernel ridge estimators for causal functions"};
    app.require_subcommand(1);

    SimulateArgs sim;
    CLI::App* sim_cmd = app.add_subcommand("simulate", "generate a synthetic design dataset");
    sim_cmd->add_option("--design", sim.design, "dose or hte")
        ->check(CLI::IsMember({"dose", "hte"}));
    sim_cmd->add_option("--n", sim.n, "sample size")->required();
    sim_cmd->add_option("--seed", sim.seed, "rng seed");
    sim_cmd->add_option("--out", sim.out, "output dataset CSV")->required();

    EstimateArgs est;
    CLI::App* est_cmd = app.add_subcommand("estimate", "estimate a causal function over a grid");
    est_cmd->add_option("--input", est.input, "dataset CSV (columns y,d[,v],x1..xp)")->required();
    est_cmd->add_option("--alt-covariates", est.alt_covariates,
                        "alternative covariate CSV (x1..xp), ds only");
    est_cmd->add_option("--estimand", est.estimand,
                        "ate, ds, att, cate, inc-ate, inc-att, or frontdoor");
    est_cmd->add_option("--grid", est.grid_flags, "evaluation grid var=min:max:count")
        ->take_all();
    est_cmd
        ->add_option("--kernel", est.kernel_flags, "kernel per block: block=median|median-shared|exact|iota:...")
        ->take_all();
    est.penalties.add_to(*est_cmd);
    est_cmd->add_option("--seed", est.seed, "recorded in the sidecar");
    est_cmd->add_option("--out", est.out, "output curve CSV")->required();

    StudyArgs study;
    CLI::App* study_cmd = app.add_subcommand("study", "Monte-Carlo MSE study for one design");
    study_cmd->add_option("--design", study.design, "dose or hte")
        ->check(CLI::IsMember({"dose", "hte"}));
    study_cmd->add_option("--sizes", study.sizes, "sample sizes")->required()->delimiter(',');
    study_cmd->add_option("--replications", study.replications, "replications per size");
    study_cmd->add_option("--seed", study.seed, "base seed; replication r uses seed+r");
    study_cmd->add_option("--criterion", study.criterion, "loocv or gcv")
        ->check(CLI::IsMember({"loocv", "gcv"}));
    study_cmd->add_option("--penalty-grid", study.penalties.grid_spec,
                          "log-spaced candidate grid lo:hi:count");
    study_cmd->add_option("--grid", study.grid_flags, "evaluation grid var=min:max:count")
        ->take_all();
    study_cmd->add_option("--threads", study.threads, "parallel replications");
    study_cmd->add_option("--out", study.out, "output study CSV")->required();

    HerdArgs herd;
    CLI::App* herd_cmd =
        app.add_subcommand("herd", "herded samples from a counterfactual distribution");
    herd_cmd->add_option("--input", herd.input, "dataset CSV")->required();
    herd_cmd->add_option("--alt-covariates", herd.alt_covariates,
                         "alternative covariate CSV (x1..xp), ds only");
    herd_cmd->add_option("--estimand", herd.estimand, "ate, ds, att, cate, or frontdoor");
    herd_cmd->add_option("--at-d", herd.at_d, "treatment level")->required();
    herd_cmd->add_option("--at-dprime", herd.at_dprime, "counterfactual treatment (att)")
        ->each([&herd](const std::string&) { herd.has_dprime = true; });
    herd_cmd->add_option("--at-v", herd.at_v, "covariate value (cate)")
        ->each([&herd](const std::string&) { herd.has_v = true; });
    herd_cmd->add_option("--m", herd.m, "number of herded samples")->required();
    herd_cmd->add_option("--grid", herd.grid_flags, "candidate grid y=min:max:count")->take_all();
    herd_cmd
        ->add_option("--kernel", herd.kernel_flags,
                     "kernel per block: block=median|median-shared|exact|iota:...")
        ->take_all();
    herd.penalties.add_to(*herd_cmd);
    herd_cmd->add_option("--seed", herd.seed, "recorded in the sidecar");
    herd_cmd->add_option("--out", herd.out, "output samples CSV")->required();

    TuneArgs tune;
    CLI::App* tune_cmd = app.add_subcommand("tune", "closed-form penalty tuning report");
    tune_cmd->add_option("--input", tune.input, "dataset CSV")->required();
    tune_cmd->add_option("--estimand", tune.estimand,
                         "ate, ds, att, cate, inc-ate, inc-att, or frontdoor");
    tune_cmd->add_option("--criterion", tune.criterion, "loocv or gcv")
        ->check(CLI::IsMember({"loocv", "gcv"}));
    tune_cmd
        ->add_option("--kernel", tune.kernel_flags,
                     "kernel per block: block=median|median-shared|exact|iota:...")
        ->take_all();
    tune_cmd->add_option("--penalty-grid", tune.grid_spec,
                         "log-spaced candidate grid lo:hi:count");
    tune_cmd->add_option("--out", tune.out, "output JSON")->required();

    try {
        app.parse(argc, argv);
        if (sim_cmd->parsed()) run_simulate(sim);
        if (est_cmd->parsed()) run_estimate(est);
        if (study_cmd->parsed()) run_study(study);
        if (herd_cmd->parsed()) run_herd(herd);
        if (tune_cmd->parsed()) run_tune(tune);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const kcf::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const kcf::NumericError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const kcf::IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
