#include <algorithm>
#include <cmath>
#include <thread>

#include "ddslab/residues.hpp"
#include "ddslab/ringarith.hpp"
#include "ddslab/xcli.hpp"

namespace ddslab::xcli {

namespace {

// pinned throughput model (1 CPU): sym^2 Delta build per coefficient, central-value term
constexpr double kBuildSecondsPerCoeff = 6e-6;
constexpr double kSecondsPerTerm = 4.5e-9;

u64 next_prime_at_least(u64 n) {
    if (n <= 2) return 2;
    while (!is_prime_u64(n)) ++n;
    return n;
}

template <class F>
void parallel_blocks(std::size_t n, unsigned workers, F&& fn) {
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errs(workers);
    const std::size_t block = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w * block; i < std::min(n, (w + 1) * block); ++i) fn(i);
            } catch (...) {
                errs[w] = std::current_exception();
            }
        });
    for (auto& t : pool) t.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
}

u64 conductor_of(u64 D) { return static_cast<u64>(lseries::primitive_discriminant(D)); }

u64 terms_for(u64 d, double y_max) { return static_cast<u64>(std::floor(y_max * std::pow(static_cast<double>(d), 1.5))); }

}  // namespace

CoefficientSystem load_system(const ExperimentConfig& cfg, u64 max_prime) {
    const u64 need = next_prime_at_least(std::max<u64>(max_prime, 3));
    if (!cfg.coeff_cache.empty()) {
        auto sys = lseries::read_cache(cfg.coeff_cache);
        if (sys.max_prime() < need)
            throw ConfigError("coefficient cache " + cfg.coeff_cache + " stops at " + std::to_string(sys.max_prime()) +
                              ", need " + std::to_string(need));
        return sys;
    }
    if (cfg.system == "synthetic") return lseries::synthetic_system(need, cfg.seed);
    if (cfg.system == "sym2_delta") return lseries::sym2_delta(need);
    throw ConfigError("unknown system '" + cfg.system + "'");
}

std::vector<u64> odd_squarefree_up_to(u64 D_max) {
    std::vector<bool> sf(D_max + 1, true);
    for (u64 q = 3; q * q <= D_max; q += 2)
        for (u64 m = q * q; m <= D_max; m += q * q) sf[m] = false;
    std::vector<u64> out;
    for (u64 D = 1; D <= D_max; D += 2)
        if (sf[D]) out.push_back(D);
    return out;
}

CentralCost estimate_central_cost(u64 D_max, double y_max, bool include_build) {
    CentralCost c;
    c.D_max = D_max;
    for (u64 D : odd_squarefree_up_to(D_max)) {
        u64 t = terms_for(conductor_of(D), y_max);
        c.terms += static_cast<double>(t);
        c.n_max = std::max(c.n_max, t);
    }
    c.seconds = kSecondsPerTerm * c.terms + (include_build ? kBuildSecondsPerCoeff * static_cast<double>(c.n_max) : 0.0);
    return c;
}

std::vector<double> twisted_central_values(const CoefficientSystem& sys, const std::vector<u64>& Ds, double y_max,
                                           unsigned workers) {
    if (Ds.empty()) return {};
    u64 n_max = 1;
    for (u64 D : Ds) n_max = std::max(n_max, terms_for(conductor_of(D), y_max));
    lseries::CentralValueBatch B(sys, std::max<u64>(n_max, 2), y_max);
    std::vector<double> out(Ds.size());
    parallel_blocks(Ds.size(), workers, [&](std::size_t i) {
        const i64 d = lseries::primitive_discriminant(Ds[i]);
        const double L = B.central(d);
        out[i] = lseries::remove_two_factor(sys, kronecker(d, 2), 0.5, L).real();
    });
    return out;
}

NonvanishingCount count_nonvanishing(const CoefficientSystem& sys, u64 D_max, double y_max, double threshold,
                                     unsigned workers) {
    auto Ds = odd_squarefree_up_to(D_max);
    auto v = twisted_central_values(sys, Ds, y_max, workers);
    NonvanishingCount c;
    c.total = v.size();
    c.min_abs = INFINITY;
    for (double x : v) {
        c.nonzero += std::abs(x) > threshold;
        c.min_abs = std::min(c.min_abs, std::abs(x));
    }
    return c;
}

double loglog_slope(const std::vector<double>& Y, const std::vector<double>& v) {
    if (Y.size() != v.size() || Y.size() < 2) throw DomainError("loglog_slope: need two or more matching points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(Y.size());
    for (std::size_t i = 0; i < Y.size(); ++i) {
        if (!(Y[i] > 0) || !(v[i] > 0)) throw DomainError("loglog_slope: values must be positive");
        double x = std::log(Y[i]), y = std::log(v[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ResultTable exp_nonvanishing(const ExperimentConfig& cfg, const SymbolContext& ctx) {
    cfg.validate();
    auto xs = cfg.x_ladder;
    std::sort(xs.begin(), xs.end());
    const bool build = cfg.coeff_cache.empty();

    std::vector<CentralCost> cost;
    u64 D_feasible = 0;
    for (double x : xs) {
        cost.push_back(estimate_central_cost(static_cast<u64>(std::floor(cfg.d_trunc * x)), cfg.y_max, build));
        if (cost.back().seconds <= cfg.budget_seconds) D_feasible = cost.back().D_max;
    }
    const u64 D_count = 1000;
    const u64 pred_X = cfg.X_ladder.empty() ? 1000 : cfg.X_ladder.front();
    u64 n_max = std::max(estimate_central_cost(std::max(D_feasible, D_count), cfg.y_max, false).n_max, 2 * pred_X);
    auto sys = load_system(cfg, n_max);

    std::vector<u64> Ds;
    for (u64 D : odd_squarefree_up_to(D_feasible))
        if (cfg.cls < 0 || ctx.class_of(D).index() == cfg.cls) Ds.push_back(D);
    auto vals = twisted_central_values(sys, Ds, cfg.y_max, cfg.workers);

    // 2 R1(1/2, E) / L_S(1/2, pi x chi_E), summed over the selected classes
    cplx pred = 0.0;
    bool pred_flagged = false;
    for (int i = 0; i < ctx.h_C; ++i) {
        if (cfg.cls >= 0 && i != cfg.cls) continue;
        auto E = quadchar::RayClass::from_index(i, ctx.k());
        auto r1 = residues::R1(sys, E, 0.5, pred_X, ctx, cfg.tolerance("r1_stability", 1e-4));
        pred += 2.0 * r1.value / r1.L_S;
        pred_flagged = pred_flagged || r1.flagged;
    }

    ResultTable t("exp_nonvanishing",
                  {"x", "D_max", "I", "I_over_x", "predicted_slope", "predicted_flagged", "feasible", "est_seconds"});
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const double x = xs[k];
        const bool ok = cost[k].D_max <= D_feasible;
        double I = NAN;
        if (ok) {
            CompSum<double> acc;
            for (std::size_t i = 0; i < Ds.size() && Ds[i] <= cost[k].D_max; ++i)
                acc.add(vals[i] * std::exp(-static_cast<double>(Ds[i]) / x));
            I = acc.value();
        }
        t.add_row({x, double(cost[k].D_max), I, I / x, pred.real(), double(pred_flagged), double(ok), cost[k].seconds});
    }
    auto nz = count_nonvanishing(sys, D_count, cfg.y_max, cfg.tolerance("nonzero", 1e-3), cfg.workers);
    t.add_meta("system", sys.label);
    t.add_meta("class", cfg.cls < 0 ? "all" : std::to_string(cfg.cls));
    t.add_meta("nonzero_twists_D_le_1000", std::to_string(nz.nonzero) + "/" + std::to_string(nz.total));
    t.add_meta("config", cfg.echo());
    return t;
}

ResultTable exp_meansquare(const ExperimentConfig& cfg) {
    cfg.validate();
    auto Ys = cfg.Y_ladder;
    std::sort(Ys.begin(), Ys.end());
    const bool build = cfg.coeff_cache.empty();
    std::vector<CentralCost> cost;
    u64 Y_feasible = 0;
    for (u64 Y : Ys) {
        cost.push_back(estimate_central_cost(Y, cfg.y_max, build));
        if (cost.back().seconds <= cfg.budget_seconds) Y_feasible = Y;
    }
    auto Ds = odd_squarefree_up_to(Y_feasible);
    std::vector<double> vals;
    std::string label = cfg.system;
    if (!Ds.empty()) {
        auto sys = load_system(cfg, estimate_central_cost(Y_feasible, cfg.y_max, false).n_max);
        label = sys.label;
        vals = twisted_central_values(sys, Ds, cfg.y_max, cfg.workers);
    }
    // |L|^2 depends on D only through D0; D = D0 D1^2 with D1 odd
    std::vector<double> sq(Y_feasible + 1, 0.0);
    for (std::size_t i = 0; i < Ds.size(); ++i) sq[Ds[i]] = vals[i] * vals[i];

    ResultTable t("exp_meansquare", {"Y", "sum", "slope", "terms", "feasible", "est_seconds"});
    CompSum<double> acc;
    u64 D = 1, count = 0;
    double prev_sum = NAN, prev_Y = NAN;
    std::vector<double> fitY, fitV;
    for (std::size_t k = 0; k < Ys.size(); ++k) {
        const u64 Y = Ys[k];
        if (Y > Y_feasible) {
            t.add_row({double(Y), NAN, NAN, NAN, 0.0, cost[k].seconds});
            continue;
        }
        for (; D <= Y; D += 2) {
            acc.add(sq[ringarith::squarefree_split_u64(D).first]);
            ++count;
        }
        const double s = acc.value();
        const double slope = std::isnan(prev_sum) ? NAN : std::log(s / prev_sum) / std::log(double(Y) / prev_Y);
        t.add_row({double(Y), s, slope, double(count), 1.0, cost[k].seconds});
        prev_sum = s;
        prev_Y = double(Y);
        fitY.push_back(double(Y));
        fitV.push_back(s);
    }
    t.add_meta("system", label);
    t.add_meta("fitted_slope", fitY.size() >= 2 ? format_double(loglog_slope(fitY, fitV)) : "nan");
    t.add_meta("config", cfg.echo());
    return t;
}

ResultTable exp_determination(const CoefficientSystem& A, const CoefficientSystem& B, u64 r_lo, u64 r_hi,
                              const SymbolContext& ctx) {
    ResultTable t("exp_determination", {"r", "Rr_A", "Rr_B", "a_A", "a_B", "differs", "flag"});
    const auto E = quadchar::RayClass::from_index(0, ctx.k());
    u64 flags = 0;
    for (u64 r = std::max<u64>(r_lo, 3); r <= r_hi; ++r) {
        if (!is_prime_u64(r)) continue;
        if (!A.has_prime(r) || !B.has_prime(r)) throw DomainError("exp_determination: no Satake data at " + std::to_string(r));
        const double ra = residues::Rr(A, E, r, 0.5, ctx).value.real();
        const double rb = residues::Rr(B, E, r, 0.5, ctx).value.real();
        const double aa = A.coeff_prime_power(r, 1).real();
        const double ab = B.coeff_prime_power(r, 1).real();
        const bool differs = std::abs(ra - rb) > 1e-9;
        const bool flag = !differs && std::abs(aa - ab) > 1e-6;
        flags += flag;
        t.add_row({double(r), ra, rb, aa, ab, double(differs), double(flag)});
    }
    t.add_meta("system_A", A.label);
    t.add_meta("system_B", B.label);
    t.add_meta("flags", std::to_string(flags));
    return t;
}

}  // namespace ddslab::xcli
