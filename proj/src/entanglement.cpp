#include "bec/entanglement.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>

#include "bec/sdp.hpp"

namespace bec {

using Eigen::MatrixXd;
using Eigen::VectorXd;

Bipartition Bipartition::of(std::vector<int> a, int n_modes) {
    std::sort(a.begin(), a.end());
    if (a.empty() || static_cast<int>(a.size()) >= n_modes)
        throw InvalidPartitionError("both parts must be nonempty");
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i] < 0 || a[i] >= n_modes)
            throw InvalidPartitionError("mode index out of range");
        if (i > 0 && a[i] == a[i - 1])
            throw InvalidPartitionError("duplicate mode index");
    }
    return Bipartition{std::move(a), n_modes};
}

Bipartition Bipartition::zigzag(int n_modes) {
    std::vector<int> a;
    for (int i = 0; i < n_modes; i += 2) a.push_back(i);
    return of(std::move(a), n_modes);
}

std::vector<int> Bipartition::part_b() const {
    std::vector<int> b;
    size_t ai = 0;
    for (int i = 0; i < n_modes; ++i) {
        if (ai < part_a.size() && part_a[ai] == i)
            ++ai;
        else
            b.push_back(i);
    }
    return b;
}

std::string Bipartition::label() const {
    std::string s(n_modes, 'B');
    for (int i : part_a) s[i] = 'A';
    return s;
}

namespace {

void require_physical(const CovarianceMatrix& gamma) {
    const double scale = std::max(1.0, gamma.entries().cwiseAbs().maxCoeff());
    if (!check_uncertainty(gamma, 1e-8 * scale))
        throw UnphysicalInputError("state violates the uncertainty relation");
}

VectorXd part_b_signs(const Bipartition& cut) {
    VectorXd s = VectorXd::Ones(cut.n_modes);
    for (int i : cut.part_b()) s(i) = -1.0;
    return s;
}

double negativity_from_nu(const VectorXd& nu_tilde, double eta, bool use_log2) {
    double e = 0.0;
    for (Eigen::Index j = 0; j < nu_tilde.size(); ++j) {
        const double r = nu_tilde(j) / eta;
        if (r < 1.0) e -= std::log2(r);
    }
    return use_log2 ? e : e * std::numbers::ln2;
}

}  // namespace

double log_negativity(const CovarianceMatrix& gamma, const Bipartition& cut,
                      bool use_log2) {
    if (cut.n_modes != gamma.n_modes())
        throw DimensionMismatchError("log_negativity: cut size mismatch");
    require_physical(gamma);
    const int n = gamma.n_modes();
    const VectorXd s = part_b_signs(cut);

    MatrixXd g = gamma.entries();
    for (int j = 0; j < n; ++j) {
        if (s(j) > 0) continue;
        g.row(n + j) *= -1.0;
        g.col(n + j) *= -1.0;
    }
    const auto se = symplectic_eigenvalues(
        CovarianceMatrix::trusted(std::move(g), gamma.eta()));
    return negativity_from_nu(se.values, gamma.eta(), use_log2);
}

double log_negativity_product_spectrum(const CovarianceMatrix& gamma,
                                       const Bipartition& cut, bool use_log2) {
    if (cut.n_modes != gamma.n_modes())
        throw DimensionMismatchError("log_negativity: cut size mismatch");
    require_physical(gamma);
    const int n = gamma.n_modes();
    const MatrixXd& g = gamma.entries();
    const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
    if (g.topRightCorner(n, n).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw Error("product-spectrum path needs a (rho,phi) block-diagonal state");

    const VectorXd s = part_b_signs(cut);
    const MatrixXd a = g.topLeftCorner(n, n);
    MatrixXd b = g.bottomRightCorner(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) b(i, j) *= s(i) * s(j);

    Eigen::LLT<MatrixXd> llt(a);
    if (llt.info() != Eigen::Success)
        throw NotPositiveDefiniteError("density block not positive definite");
    const MatrixXd l = llt.matrixL();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(l.transpose() * b * l);
    const VectorXd nu = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return negativity_from_nu(nu, gamma.eta(), use_log2);
}

namespace {

bool lex_less(const std::vector<int>& a, const std::vector<int>& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

std::pair<Bipartition, double> best_bipartition(const CovarianceMatrix& gamma,
                                                Quantifier quantifier,
                                                bool require_exhaustive) {
    const int n = gamma.n_modes();
    if (n < 2) throw InvalidPartitionError("need at least two modes");

    auto evaluate = [&](const Bipartition& cut) {
        if (quantifier == Quantifier::LogNeg) return log_negativity(gamma, cut);
        return cmc_witness(gamma, PartitionSpec::bipartition(cut.part_a, n))
            .witness_value;
    };

    std::vector<Bipartition> cuts;
    if (n <= 22) {
        // all cuts with mode 0 in part A (complement symmetry)
        const std::uint64_t full = (std::uint64_t(1) << n) - 1;
        for (std::uint64_t mask = 1; mask < full; mask += 2) {
            std::vector<int> a;
            for (int i = 0; i < n; ++i)
                if (mask & (std::uint64_t(1) << i)) a.push_back(i);
            cuts.push_back(Bipartition::of(std::move(a), n));
        }
    } else {
        if (require_exhaustive)
            throw TooManyModesForExhaustiveError(
                "exhaustive bipartition scan limited to 22 modes");
        // named families: contiguous prefixes, zig-zag, single-site cuts
        for (int k = 1; k < n; ++k) {
            std::vector<int> a(k);
            for (int i = 0; i < k; ++i) a[i] = i;
            cuts.push_back(Bipartition::of(std::move(a), n));
        }
        cuts.push_back(Bipartition::zigzag(n));
        for (int i = 1; i < n; ++i)
            cuts.push_back(Bipartition::of({i}, n));
    }

    std::optional<std::pair<Bipartition, double>> best;
    for (const auto& cut : cuts) {
        const double v = evaluate(cut);
        if (!best || v > best->second ||
            (v == best->second && lex_less(cut.part_a, best->first.part_a)))
            best = {cut, v};
    }
    return *best;
}

WitnessValue witness_thermal_analytic(const NormalModeBasis& basis,
                                      double temperature) {
    if (temperature <= 0)
        throw NonPositiveTemperatureError("temperature must be positive");
    const auto n = basis.frequencies.size();
    const double w1 = basis.frequencies(0), wn = basis.frequencies(n - 1);
    if (w1 <= 0) throw ZeroModeError("zero mode in spectrum");
    const double v = 1.0 - std::sqrt((w1 / wn) *
                                     coth(wn / (2.0 * temperature)) *
                                     coth(w1 / (2.0 * temperature)));
    return WitnessValue{v, WitnessKind::AnalyticThermal};
}

WitnessValue witness_adiabatic_analytic(const NormalModeBasis& basis0,
                                        const NormalModeBasis& basis_t,
                                        double temperature) {
    if (temperature <= 0)
        throw NonPositiveTemperatureError("temperature must be positive");
    if (basis0.frequencies.size() != basis_t.frequencies.size())
        throw DimensionMismatchError("basis size mismatch");
    const auto n = basis0.frequencies.size();
    const double w10 = basis0.frequencies(0), wn0 = basis0.frequencies(n - 1);
    const double w1t = basis_t.frequencies(0), wnt = basis_t.frequencies(n - 1);
    if (w10 <= 0 || w1t <= 0) throw ZeroModeError("zero mode in spectrum");
    const double v = 1.0 - std::sqrt((w1t / wnt) *
                                     coth(wn0 / (2.0 * temperature)) *
                                     coth(w10 / (2.0 * temperature)));
    return WitnessValue{v, WitnessKind::AnalyticAdiabatic};
}

SeparableAnsatz separable_ansatz_feasible(const VectorXd& alpha,
                                          const VectorXd& beta, double delta) {
    if (delta <= 0) throw NonPositiveInputError("delta must be positive");
    const auto n = alpha.size();
    if (beta.size() != n || n == 0)
        throw DimensionMismatchError("moment list size mismatch");
    if (alpha.minCoeff() <= 0 || beta.minCoeff() <= 0)
        throw NonPositiveInputError("moments must be positive");
    const double tol_a = 1e-12 * alpha.maxCoeff();
    const double tol_b = 1e-12 * beta.maxCoeff();
    for (Eigen::Index k = 0; k + 1 < n; ++k) {
        if (alpha(k + 1) < alpha(k) - tol_a || beta(k + 1) > beta(k) + tol_b)
            throw MonotonicityViolatedError(
                "moments not extremal-reducible; use the SDP witness instead");
    }
    const double lo = 1.0 / (2.0 * delta * alpha(0));
    const double hi = 2.0 * delta * beta(n - 1);
    if (lo <= hi)
        return SeparableAnsatz{true, 0.5 * (lo + hi)};
    return SeparableAnsatz{false, std::nullopt};
}

double bsa_lower_bound(const WitnessValue& witness) {
    return std::clamp(witness.value, 0.0, 1.0);
}

double witness_asymptotics(const PhysicalParams& params, double temperature,
                           AsymptoticRegime regime) {
    params.validate();
    constexpr double pi = std::numbers::pi;
    const double c0 = std::sqrt(params.coupling_g * params.mean_density / params.mass);
    const double delta = params.pixel_size();
    const double l = params.box_length;
    switch (regime) {
        case AsymptoticRegime::FixedSpacing: {
            if (temperature <= 0)
                throw NonPositiveInputError("temperature must be positive");
            const double a = c0 / delta;
            return 1.0 - std::sqrt((temperature / a) * coth(a / temperature));
        }
        case AsymptoticRegime::ContinuumFixedL: {
            if (temperature <= 0)
                throw NonPositiveInputError("temperature must be positive");
            const double xi_l = pi * c0 / (2.0 * l * temperature);
            return 1.0 - std::sqrt(pi * delta / (2.0 * l) * coth(xi_l));
        }
        case AsymptoticRegime::SmallL:
            return 1.0 - std::sqrt(pi * delta / (2.0 * l));
        case AsymptoticRegime::LargeL:
            if (temperature <= 0)
                throw NonPositiveInputError("temperature must be positive");
            return 1.0 - std::sqrt(temperature * delta / c0);
    }
    throw Error("unknown regime");
}

}  // namespace bec
