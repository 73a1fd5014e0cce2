#include "isac/rd.hpp"

#include "isac/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace isac {

namespace {

constexpr double kRateTolerance = 1e-12;

struct TargetLaw {
    Eigen::VectorXd p;  // marginal of the target
    Eigen::MatrixXd d;  // distortion table
};

TargetLaw target_law(const RdProblem& prob) {
    prob.validate();
    const JointDist m = marginalize(prob.source, {prob.target});
    return {m.probs().matrix(), prob.d.table};
}

struct BaState {
    Eigen::VectorXd q;  // output marginal
    Eigen::MatrixXd Q;  // kernel rows per target symbol
    double rate = 0.0;
    double distortion = 0.0;
    int iterations = 0;
};

double kernel_rate(const Eigen::VectorXd& p, const Eigen::MatrixXd& Q, const Eigen::VectorXd& q) {
    double r = 0.0;
    for (Eigen::Index s = 0; s < p.size(); ++s) {
        if (!(p[s] > 0.0)) continue;
        for (Eigen::Index e = 0; e < q.size(); ++e) {
            const double k = Q(s, e);
            if (k > 0.0 && q[e] > 0.0) r += p[s] * k * std::log2(k / q[e]);
        }
    }
    return std::max(r, 0.0);
}

// Alternating minimization at a fixed slope. `restrict_to_min` replaces the
// exponential weights by indicators of the per-symbol minimum distortion.
void blahut_arimoto(const TargetLaw& law, double beta, bool restrict_to_min, BaState& st) {
    const Eigen::Index ns = law.p.size();
    const Eigen::Index ne = law.d.cols();
    Eigen::MatrixXd w(ns, ne);
    for (Eigen::Index s = 0; s < ns; ++s) {
        const double dmin = law.d.row(s).minCoeff();
        for (Eigen::Index e = 0; e < ne; ++e) {
            if (restrict_to_min) {
                w(s, e) = law.d(s, e) <= dmin ? 1.0 : 0.0;
            } else {
                w(s, e) = std::exp(-beta * (law.d(s, e) - dmin));
            }
        }
    }
    for (Eigen::Index e = 0; e < ne; ++e) st.q[e] = std::max(st.q[e], 1e-12);
    st.q /= st.q.sum();
    st.Q.resize(ns, ne);
    double prev = INFINITY;
    for (st.iterations = 1; st.iterations <= kRdMaxIterations; ++st.iterations) {
        for (Eigen::Index s = 0; s < ns; ++s) {
            double z = 0.0;
            for (Eigen::Index e = 0; e < ne; ++e) z += (st.Q(s, e) = st.q[e] * w(s, e));
            if (z > 0.0) {
                st.Q.row(s) /= z;
            } else {
                st.Q.row(s).setConstant(1.0 / static_cast<double>(ne));
            }
        }
        const Eigen::VectorXd q_new = st.Q.transpose() * law.p;
        const double rate = kernel_rate(law.p, st.Q, q_new);
        const double dq = (q_new - st.q).cwiseAbs().maxCoeff();
        st.q = q_new;
        st.rate = rate;
        if (std::abs(rate - prev) < kRateTolerance && dq < kRateTolerance) break;
        prev = rate;
    }
    st.distortion = 0.0;
    for (Eigen::Index s = 0; s < ns; ++s)
        for (Eigen::Index e = 0; e < ne; ++e) st.distortion += law.p[s] * st.Q(s, e) * law.d(s, e);
}

double dmin_of(const TargetLaw& law) {
    double v = 0.0;
    for (Eigen::Index s = 0; s < law.p.size(); ++s) v += law.p[s] * law.d.row(s).minCoeff();
    return v;
}

double dmax_of(const TargetLaw& law, Eigen::Index* arg = nullptr) {
    const Eigen::VectorXd per_estimate = law.d.transpose() * law.p;
    Eigen::Index best = 0;
    const double v = per_estimate.minCoeff(&best);
    if (arg) *arg = best;
    return v;
}

}  // namespace

RdProblem RdProblem::bernoulli(double p1) {
    RdProblem p;
    p.source = JointDist::bernoulli("ST", p1);
    p.cond_vars = {"ST"};
    p.target = "ST";
    p.d = DistortionFn::hamming(2);
    return p;
}

RdProblem RdProblem::from_joint(const JointDist& joint, const VarList& cond_vars, const std::string& target,
                                const DistortionFn& d) {
    RdProblem p;
    p.cond_vars = cond_vars;
    if (std::find(p.cond_vars.begin(), p.cond_vars.end(), target) == p.cond_vars.end()) p.cond_vars.push_back(target);
    p.source = marginalize(joint, p.cond_vars);
    p.target = target;
    p.d = d;
    p.validate();
    return p;
}

void RdProblem::validate() const {
    if (std::find(cond_vars.begin(), cond_vars.end(), target) == cond_vars.end())
        throw ArgumentError("rate-distortion conditioning set must include the target");
    for (const auto& n : cond_vars) source.axis(n);
    d.validate();
    if (d.true_size() != source.alphabet(target))
        throw SchemaError("distortion rows do not match the alphabet of '" + target + "'");
}

double rd_min_distortion(const RdProblem& p) { return dmin_of(target_law(p)); }
double rd_max_distortion(const RdProblem& p) { return dmax_of(target_law(p)); }

RdSolution rd_solve(const RdProblem& prob, double D) {
    if (!(D >= 0.0)) throw ArgumentError("distortion level must be nonnegative");
    const TargetLaw law = target_law(prob);
    const Eigen::Index ns = law.p.size();
    const Eigen::Index ne = law.d.cols();
    const double dmin = dmin_of(law);
    Eigen::Index best_const = 0;
    const double dmax = dmax_of(law, &best_const);

    RdSolution sol;
    if (D >= dmax) {
        sol.kernel = Eigen::MatrixXd::Zero(ns, ne);
        sol.kernel.col(best_const).setOnes();
        sol.distortion = dmax;
        return sol;
    }
    if (D < dmin - 1e-12) throw ArgumentError("distortion level below the smallest achievable value");

    BaState st;
    st.q = Eigen::VectorXd::Constant(ne, 1.0 / static_cast<double>(ne));
    if (D <= dmin + 1e-14) {
        blahut_arimoto(law, 0.0, true, st);
        sol.rate = st.rate;
        sol.distortion = st.distortion;
        sol.multiplier = INFINITY;
        sol.iterations = st.iterations;
        sol.kernel = st.Q;
        return sol;
    }

    // Bracket the slope, then bisect until the achieved distortion meets D.
    double lo = 0.0;
    double hi = 1.0;
    BaState hi_state = st;
    blahut_arimoto(law, hi, false, hi_state);
    while (hi_state.distortion > D && hi < 1e6) {
        lo = hi;
        hi *= 2.0;
        blahut_arimoto(law, hi, false, hi_state);
    }
    int total_iterations = hi_state.iterations;
    for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        BaState mid_state = hi_state;
        blahut_arimoto(law, mid, false, mid_state);
        total_iterations += mid_state.iterations;
        if (mid_state.distortion > D) {
            lo = mid;
        } else {
            hi = mid;
            hi_state = mid_state;
        }
        if (std::abs(hi_state.distortion - D) < 1e-15) break;
    }
    const double slope_bits = hi / std::log(2.0);
    sol.multiplier = slope_bits;
    sol.rate = std::max(hi_state.rate + slope_bits * (hi_state.distortion - D), 0.0);
    sol.distortion = D;
    sol.iterations = total_iterations;
    sol.kernel = hi_state.Q;
    return sol;
}

double rd_function(const RdProblem& p, double D) { return rd_solve(p, D).rate; }

std::vector<RdCurvePoint> rd_curve(const RdProblem& p, const std::vector<double>& grid) {
    if (!std::is_sorted(grid.begin(), grid.end())) throw ArgumentError("distortion grid must be sorted ascending");
    std::vector<RdCurvePoint> out;
    out.reserve(grid.size());
    for (double D : grid) {
        const RdSolution s = rd_solve(p, D);
        RdCurvePoint pt{D, s.rate, s.multiplier};
        if (!out.empty()) pt.R = std::min(pt.R, out.back().R);
        out.push_back(pt);
    }
    return out;
}

double brute_force_rd(const RdProblem& prob, double D, int resolution) {
    prob.validate();
    if (resolution < 1) throw ArgumentError("resolution must be positive");
    const JointDist c = marginalize(prob.source, prob.cond_vars);
    const int ne = prob.d.estimate_size();
    const int ns = c.alphabet(prob.target);
    const int taxis = c.axis(prob.target);

    struct Row {
        double w;
        int s;
    };
    std::vector<Row> rows;
    std::vector<int> sym(static_cast<std::size_t>(c.rank()));
    for (Eigen::Index i = 0; i < c.size(); ++i) {
        if (!(c.probs()[i] > 0.0)) continue;
        c.decode(i, sym);
        rows.push_back({c.probs()[i], sym[static_cast<std::size_t>(taxis)]});
    }
    const long params = static_cast<long>(rows.size()) * (ne - 1);
    if (params > kBruteForceMaxParams) throw TooLarge("brute-force oracle limited to 12 kernel parameters");

    // All distributions over the estimates with denominators `resolution`.
    std::vector<std::vector<double>> simplex;
    std::vector<int> parts(static_cast<std::size_t>(ne), 0);
    std::function<void(int, int)> compose = [&](int idx, int left) {
        if (idx == ne - 1) {
            parts[static_cast<std::size_t>(idx)] = left;
            std::vector<double> v;
            for (int k : parts) v.push_back(static_cast<double>(k) / resolution);
            simplex.push_back(std::move(v));
            return;
        }
        for (int k = 0; k <= left; ++k) {
            parts[static_cast<std::size_t>(idx)] = k;
            compose(idx + 1, left - k);
        }
    };
    compose(0, resolution);

    double best = INFINITY;
    std::vector<Eigen::MatrixXd> acc(rows.size() + 1, Eigen::MatrixXd::Zero(ns, ne));
    std::function<void(std::size_t)> walk = [&](std::size_t r) {
        if (r == rows.size()) {
            const Eigen::MatrixXd& P = acc[r];
            double dist = 0.0;
            for (int s = 0; s < ns; ++s)
                for (int e = 0; e < ne; ++e) dist += P(s, e) * prob.d(s, e);
            if (dist > D + 1e-12) return;
            const Eigen::VectorXd ps = P.rowwise().sum();
            const Eigen::VectorXd pe = P.colwise().sum().transpose();
            double info = 0.0;
            for (int s = 0; s < ns; ++s)
                for (int e = 0; e < ne; ++e)
                    if (P(s, e) > 0.0) info += P(s, e) * std::log2(P(s, e) / (ps[s] * pe[e]));
            best = std::min(best, std::max(info, 0.0));
            return;
        }
        for (const auto& q : simplex) {
            acc[r + 1] = acc[r];
            for (int e = 0; e < ne; ++e) acc[r + 1](rows[r].s, e) += rows[r].w * q[static_cast<std::size_t>(e)];
            walk(r + 1);
        }
    };
    walk(0);
    return best;
}

double rd_min_distortion_for_rate(const RdProblem& p, double budget, double tol) {
    const double dmin = rd_min_distortion(p);
    const double dmax = rd_max_distortion(p);
    if (budget <= 0.0) return dmax;
    if (rd_function(p, dmin) <= budget) return dmin;
    double lo = dmin;
    double hi = dmax;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (rd_function(p, mid) <= budget) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return hi;
}

}  // namespace isac
