#include "hinv/harness/config.hpp"

#include <sstream>

#include "hinv/core/error.hpp"
#include "hinv/core/matrix_io.hpp"
#include <toml++/toml.hpp>

namespace hinv {

namespace {

double as_number(const toml::node& node, const std::string& what) {
    if (auto v = node.value<double>()) return *v;
    throw InvalidArgument("config: '" + what + "' must be a number");
}

Eigen::VectorXd number_array(const toml::node& node, const std::string& what) {
    const auto* arr = node.as_array();
    if (!arr) throw InvalidArgument("config: '" + what + "' must be an array of numbers");
    Eigen::VectorXd v(static_cast<Eigen::Index>(arr->size()));
    for (std::size_t i = 0; i < arr->size(); ++i)
        v[static_cast<Eigen::Index>(i)] = as_number(*arr->get(i), what);
    return v;
}

LinearOp parse_operator(const toml::node& node, const BasisSpace& space, const std::string& what) {
    const auto* tbl = node.as_table();
    if (!tbl) throw InvalidArgument("config: " + what + " entries must be inline tables");
    const int d = space.dim();
    if (const auto* m = tbl->get("matrix")) {
        const auto* rows = m->as_array();
        if (!rows || static_cast<int>(rows->size()) != d)
            throw InvalidArgument("config: " + what + ".matrix must have dim rows");
        Eigen::MatrixXd mat(d, d);
        for (int i = 0; i < d; ++i) {
            const Eigen::VectorXd row = number_array(*rows->get(i), what + ".matrix");
            if (row.size() != d) throw InvalidArgument("config: " + what + ".matrix row length != dim");
            mat.row(i) = row.transpose();
        }
        return LinearOp(space, std::move(mat));
    }
    if (const auto* diag = tbl->get("diag")) {
        const Eigen::VectorXd v = number_array(*diag, what + ".diag");
        if (v.size() != d) throw InvalidArgument("config: " + what + ".diag length != dim");
        return LinearOp(space, v.asDiagonal().toDenseMatrix());
    }
    if (const auto* s = tbl->get("scalar")) {
        return as_number(*s, what + ".scalar") * LinearOp::identity(space);
    }
    if (const auto* hs = tbl->get("hs")) {
        const auto seed = tbl->get("seed") ? tbl->get("seed")->value<std::int64_t>() : std::nullopt;
        if (!seed) throw InvalidArgument("config: " + what + " with 'hs' needs an integer 'seed'");
        return random_hs_operator(space, as_number(*hs, what + ".hs"),
                                  static_cast<std::uint64_t>(*seed));
    }
    throw InvalidArgument("config: " + what + " needs one of matrix, diag, scalar, hs");
}

std::vector<LinearOp> parse_operator_list(const toml::table& model, const char* key,
                                          const BasisSpace& space) {
    std::vector<LinearOp> ops;
    const auto* node = model.get(key);
    if (!node) return ops;
    const auto* arr = node->as_array();
    if (!arr) throw InvalidArgument(std::string("config: model.") + key + " must be an array");
    for (std::size_t i = 0; i < arr->size(); ++i)
        ops.push_back(parse_operator(*arr->get(i), space,
                                     std::string("model.") + key + "[" + std::to_string(i) + "]"));
    return ops;
}

ModelSpec model_from_table(const toml::table& t) {
    const auto kind_name = t["kind"].value<std::string>();
    if (!kind_name) throw InvalidArgument("config: model.kind is required");
    const auto dim = t["dim"].value<std::int64_t>();
    if (!dim || *dim < 1) throw InvalidArgument("config: model.dim must be a positive integer");
    const BasisKind basis = parse_basis_kind(t["basis"].value_or<std::string>("fourier"));
    const BasisSpace space(static_cast<int>(*dim), basis);

    NoiseSpec noise;
    noise.space = space;
    const auto* noise_tbl = t["noise"].as_table();
    const double scale = noise_tbl ? (*noise_tbl)["scale"].value_or(1.0) : 1.0;
    noise.seed = noise_tbl ? static_cast<std::uint64_t>((*noise_tbl)["seed"].value_or<std::int64_t>(0)) : 0;
    const toml::node* eig = noise_tbl ? noise_tbl->get("eig") : nullptr;
    if (!eig || eig->value<std::string>() == std::optional<std::string>("inverse_square")) {
        noise = NoiseSpec::inverse_square(space, scale, noise.seed);
    } else if (eig->is_array()) {
        noise.eig = scale * number_array(*eig, "model.noise.eig");
    } else if (eig->value<std::string>() == std::optional<std::string>("identity")) {
        noise.eig = Eigen::VectorXd::Constant(space.dim(), scale);
    } else {
        throw InvalidArgument("config: model.noise.eig must be an array, 'inverse_square' or 'identity'");
    }

    ModelSpec m;
    m.noise = std::move(noise);
    m.ar = parse_operator_list(t, "ar", space);
    m.ma = parse_operator_list(t, "ma", space);
    m.lp = parse_operator_list(t, "lp", space);
    m.kind = *kind_name == "wn" ? ModelKind::CausalLP : parse_model_kind(*kind_name);
    m.validate();
    return m;
}

toml::table parse_toml(std::string_view text) {
    try {
        return toml::parse(text);
    } catch (const toml::parse_error& e) {
        std::ostringstream msg;
        msg << "config: TOML parse error: " << e.description() << " at line "
            << e.source().begin.line;
        throw InvalidArgument(msg.str());
    }
}

}  // namespace

std::string_view to_string(EstimatorKind kind) {
    switch (kind) {
        case EstimatorKind::Auto: return "auto";
        case EstimatorKind::Psi: return "psi";
        case EstimatorKind::FAR: return "far";
        case EstimatorKind::FMA: return "fma";
        case EstimatorKind::FARMA: return "farma";
    }
    return "unknown";
}

EstimatorKind parse_estimator_kind(std::string_view name) {
    if (name == "auto") return EstimatorKind::Auto;
    if (name == "psi") return EstimatorKind::Psi;
    if (name == "far") return EstimatorKind::FAR;
    if (name == "fma") return EstimatorKind::FMA;
    if (name == "farma") return EstimatorKind::FARMA;
    throw InvalidArgument("unknown estimator '" + std::string(name) + "'");
}

EstimatorKind resolve_estimator(EstimatorKind kind, const ModelSpec& model) {
    if (kind != EstimatorKind::Auto) return kind;
    switch (model.kind) {
        case ModelKind::FAR: return EstimatorKind::FAR;
        case ModelKind::FMA: return EstimatorKind::FMA;
        case ModelKind::FARMA: return EstimatorKind::FARMA;
        case ModelKind::CausalLP: return EstimatorKind::Psi;
    }
    return EstimatorKind::Psi;
}

void ExperimentConfig::validate() const {
    model.validate();
    if (reps < 1) throw InvalidArgument("experiment: reps must be >= 1");
    if (Ns.empty()) throw InvalidArgument("experiment: Ns must not be empty");
    for (std::size_t i = 0; i < Ns.size(); ++i) {
        if (Ns[i] < 2) throw InvalidArgument("experiment: sample sizes must be >= 2");
        if (i > 0 && Ns[i] <= Ns[i - 1])
            throw InvalidArgument("experiment: Ns must be strictly increasing");
    }
    if (report_lags < 1) throw InvalidArgument("experiment: report_lags must be >= 1");
    if (threads < 0) throw InvalidArgument("experiment: threads must be >= 0");
    const EstimatorKind est = resolve_estimator(estimator, model);
    if ((est == EstimatorKind::FAR && model.p() < 1) || (est == EstimatorKind::FMA && model.q() < 1) ||
        (est == EstimatorKind::FARMA && (model.p() < 1 || model.q() < 1)))
        throw InvalidArgument("experiment: estimator '" + std::string(to_string(est)) +
                              "' does not match the model orders");
}

ModelSpec parse_model_toml(std::string_view text) {
    const toml::table root = parse_toml(text);
    if (const auto* model = root["model"].as_table()) return model_from_table(*model);
    return model_from_table(root);
}

ModelSpec load_model_toml(const std::filesystem::path& path) {
    return parse_model_toml(io::read_text(path));
}

ExperimentConfig parse_experiment_toml(std::string_view text, const std::filesystem::path& workdir) {
    const toml::table root = parse_toml(text);
    const auto* model = root["model"].as_table();
    if (!model) throw InvalidArgument("config: missing [model] table");

    ExperimentConfig cfg;
    cfg.model = model_from_table(*model);

    const auto* exp = root["experiment"].as_table();
    if (!exp) throw InvalidArgument("config: missing [experiment] table");
    const auto* ns = exp->get("Ns");
    if (!ns || !ns->is_array()) throw InvalidArgument("config: experiment.Ns must be an array");
    for (const auto& n : *ns->as_array()) {
        const auto v = n.value<std::int64_t>();
        if (!v) throw InvalidArgument("config: experiment.Ns entries must be integers");
        cfg.Ns.push_back(static_cast<int>(*v));
    }
    cfg.reps = static_cast<int>((*exp)["reps"].value_or<std::int64_t>(1));
    cfg.seed_base = static_cast<std::uint64_t>((*exp)["seed_base"].value_or<std::int64_t>(0));
    cfg.estimator = parse_estimator_kind((*exp)["estimator"].value_or<std::string>("auto"));
    cfg.report_lags = static_cast<int>((*exp)["report_lags"].value_or<std::int64_t>(3));
    cfg.threads = static_cast<int>((*exp)["threads"].value_or<std::int64_t>(0));

    if (const auto* t = root["tuning"].as_table()) {
        if (auto v = (*t)["L"].value<std::int64_t>()) cfg.tuning.L = static_cast<int>(*v);
        if (auto v = (*t)["K"].value<std::int64_t>()) cfg.tuning.K = static_cast<int>(*v);
        if (auto v = (*t)["theta"].value<double>()) cfg.tuning.theta = *v;
        if (auto v = (*t)["M"].value<std::int64_t>()) cfg.tuning.M = static_cast<int>(*v);
        if (auto v = (*t)["gamma"].value<double>()) cfg.tuning.gamma = *v;
        cfg.tuning.center = (*t)["center"].value_or(false);
    }
    if (const auto* o = root["output"].as_table()) {
        cfg.out_dir = (*o)["dir"].value_or<std::string>("mc_out");
        cfg.prefix = (*o)["prefix"].value_or<std::string>("mc");
    }
    if (cfg.out_dir.is_relative() && !workdir.empty()) cfg.out_dir = workdir / cfg.out_dir;
    cfg.validate();
    return cfg;
}

ExperimentConfig load_experiment_toml(const std::filesystem::path& path,
                                      const std::filesystem::path& workdir) {
    return parse_experiment_toml(io::read_text(path), workdir);
}

}  // namespace hinv
