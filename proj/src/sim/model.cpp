#include "hinv/sim/model.hpp"

#include <cmath>
#include <cstring>
#include <iomanip>
#include <random>
#include <sstream>

#include "hinv/core/error.hpp"

namespace hinv {

namespace {

constexpr std::uint64_t kFnvOffset = 14695981039346656037ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

void fnv_bytes(std::uint64_t& h, const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= kFnvPrime;
    }
}

void fnv_matrix(std::uint64_t& h, const Eigen::MatrixXd& m) {
    const auto rows = static_cast<std::int64_t>(m.rows());
    const auto cols = static_cast<std::int64_t>(m.cols());
    fnv_bytes(h, &rows, sizeof rows);
    fnv_bytes(h, &cols, sizeof cols);
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            const double v = m(i, j);
            fnv_bytes(h, &v, sizeof v);
        }
}

double op_norm_sum(const std::vector<LinearOp>& ops) {
    double s = 0.0;
    for (const auto& op : ops) s += norms(op).op;
    return s;
}

void check_space(const std::vector<LinearOp>& ops, const BasisSpace& space, const char* what) {
    for (const auto& op : ops)
        if (!(op.space() == space))
            throw InvalidArgument(std::string("ModelSpec: ") + what +
                                  " operator dimension differs from the noise space");
}

}  // namespace

void NoiseSpec::validate() const {
    if (eig.size() != space.dim()) throw InvalidArgument("NoiseSpec: eig length != dim");
    for (Eigen::Index j = 0; j < eig.size(); ++j) {
        if (!(eig[j] > 0.0) || !std::isfinite(eig[j]))
            throw InvalidArgument("NoiseSpec: noise variances must be positive and finite");
        if (j > 0 && eig[j] > eig[j - 1])
            throw InvalidArgument("NoiseSpec: noise variances must be sorted descending");
    }
}

NoiseSpec NoiseSpec::inverse_square(BasisSpace space, double scale, std::uint64_t seed) {
    NoiseSpec n;
    n.space = space;
    n.seed = seed;
    n.eig.resize(space.dim());
    for (int j = 0; j < space.dim(); ++j) n.eig[j] = scale / ((j + 1.0) * (j + 1.0));
    return n;
}

LinearOp NoiseSpec::covariance() const {
    return LinearOp(space, eig.asDiagonal().toDenseMatrix());
}

std::string_view to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::FAR: return "far";
        case ModelKind::FMA: return "fma";
        case ModelKind::FARMA: return "farma";
        case ModelKind::CausalLP: return "causal_lp";
    }
    return "unknown";
}

ModelKind parse_model_kind(std::string_view name) {
    if (name == "far" || name == "fAR") return ModelKind::FAR;
    if (name == "fma" || name == "fMA") return ModelKind::FMA;
    if (name == "farma" || name == "fARMA") return ModelKind::FARMA;
    if (name == "causal_lp" || name == "causalLP" || name == "lp") return ModelKind::CausalLP;
    throw InvalidArgument("unknown model kind '" + std::string(name) + "'");
}

double ModelSpec::ar_norm_sum() const { return op_norm_sum(ar); }
double ModelSpec::ma_norm_sum() const { return op_norm_sum(ma); }

void ModelSpec::validate() const {
    noise.validate();
    check_space(ar, space(), "AR");
    check_space(ma, space(), "MA");
    check_space(lp, space(), "LP");
    switch (kind) {
        case ModelKind::FAR:
            if (!ma.empty() || !lp.empty()) throw InvalidArgument("fAR model with MA/LP operators");
            break;
        case ModelKind::FMA:
            if (!ar.empty() || !lp.empty()) throw InvalidArgument("fMA model with AR/LP operators");
            break;
        case ModelKind::FARMA:
            if (!lp.empty()) throw InvalidArgument("fARMA model with LP operators");
            break;
        case ModelKind::CausalLP:
            if (!ar.empty() || !ma.empty())
                throw InvalidArgument("causal LP model with AR/MA operators");
            break;
    }
    const double a = ar_norm_sum();
    if (!(a < 1.0)) {
        std::ostringstream msg;
        msg << "stationarity bound violated: sum of AR operator norms = " << std::setprecision(17)
            << a << " (must be < 1)";
        throw NumericalError(msg.str());
    }
    const double b = ma_norm_sum();
    if (!(b < 1.0)) {
        std::ostringstream msg;
        msg << "invertibility bound violated: sum of MA operator norms = " << std::setprecision(17)
            << b << " (must be < 1)";
        throw NumericalError(msg.str());
    }
}

std::string ModelSpec::hash() const {
    std::uint64_t h = kFnvOffset;
    const auto k = static_cast<int>(kind);
    fnv_bytes(h, &k, sizeof k);
    const int d = space().dim();
    fnv_bytes(h, &d, sizeof d);
    for (const auto* list : {&ar, &ma, &lp}) {
        const auto n = static_cast<std::int64_t>(list->size());
        fnv_bytes(h, &n, sizeof n);
        for (const auto& op : *list) fnv_matrix(h, op.mat());
    }
    fnv_matrix(h, noise.eig);
    std::ostringstream out;
    out << std::hex << std::setw(16) << std::setfill('0') << h;
    return out.str();
}

ModelSpec ModelSpec::far(std::vector<LinearOp> ar, NoiseSpec noise) {
    ModelSpec m;
    m.kind = ModelKind::FAR;
    m.ar = std::move(ar);
    m.noise = std::move(noise);
    return m;
}

ModelSpec ModelSpec::fma(std::vector<LinearOp> ma, NoiseSpec noise) {
    ModelSpec m;
    m.kind = ModelKind::FMA;
    m.ma = std::move(ma);
    m.noise = std::move(noise);
    return m;
}

ModelSpec ModelSpec::farma(std::vector<LinearOp> ar, std::vector<LinearOp> ma, NoiseSpec noise) {
    ModelSpec m;
    m.kind = ModelKind::FARMA;
    m.ar = std::move(ar);
    m.ma = std::move(ma);
    m.noise = std::move(noise);
    return m;
}

ModelSpec ModelSpec::causal_lp(std::vector<LinearOp> lp, NoiseSpec noise) {
    ModelSpec m;
    m.kind = ModelKind::CausalLP;
    m.lp = std::move(lp);
    m.noise = std::move(noise);
    return m;
}

LinearOp random_hs_operator(BasisSpace space, double target_hs_norm, std::uint64_t seed) {
    if (!(target_hs_norm > 0.0) || !std::isfinite(target_hs_norm))
        throw InvalidArgument("random_hs_operator: target norm must be positive");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const int d = space.dim();
    Eigen::MatrixXd m(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m(i, j) = normal(rng) / ((i + 1.0) * (j + 1.0));
    const double hs = m.norm();
    if (hs == 0.0) throw NumericalError("random_hs_operator: degenerate draw");
    m *= target_hs_norm / hs;
    return LinearOp(space, std::move(m));
}

std::vector<LinearOp> causal_operators(const ModelSpec& model, double tail_tol) {
    const BasisSpace space = model.space();
    std::vector<LinearOp> phi{LinearOp::identity(space)};
    if (model.kind == ModelKind::CausalLP) {
        phi.insert(phi.end(), model.lp.begin(), model.lp.end());
        return phi;
    }
    // phi_i = beta_i + sum_{j=1}^{min(i,p)} alpha_j phi_{i-j}
    const int p = model.p();
    const int q = model.q();
    const int window = std::max(p, 1);
    // Per-term threshold so the geometric tail after `window` quiet terms stays below tail_tol.
    const double term_tol = tail_tol * (1.0 - model.ar_norm_sum()) / window;
    constexpr int kMaxTerms = 1'000'000;
    int quiet = 0;
    for (int i = 1; i < kMaxTerms; ++i) {
        Eigen::MatrixXd next = i <= q ? model.ma[i - 1].mat()
                                      : Eigen::MatrixXd::Zero(space.dim(), space.dim());
        for (int j = 1; j <= std::min(i, p); ++j) next += model.ar[j - 1].mat() * phi[i - j].mat();
        const double hs = next.norm();
        phi.emplace_back(space, std::move(next));
        if (i >= q) {
            quiet = hs < term_tol ? quiet + 1 : 0;
            // Once `window` consecutive terms are negligible the recursion only contracts.
            if (quiet >= window) {
                while (phi.size() > 1 && phi.back().hs_norm() == 0.0) phi.pop_back();
                return phi;
            }
        }
    }
    throw NumericalError("causal_operators: representation did not decay");
}

}  // namespace hinv
