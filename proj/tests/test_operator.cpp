#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <sstream>

#include "horseshoe/operator.hpp"
#include "oracles.hpp"
#include "property.hpp"

using namespace horseshoe;

namespace {
const Parameters P{};
const HyperbolicConstants HC = hyperbolic_constants(P);

/** Sample point of a word from the paper's branch formulas (anchor = rectangle centre). */
PlanePoint oracle_sample(const oracle::Word& w) {
    const int last = w.back();
    double x = last == 2 ? 0.75 - P.rho / 2.0 : P.rho / 2.0;
    double y = last == 2 ? P.sigma / 2.0 : 0.5;
    for (std::size_t j = w.size() - 1; j-- > 0;) {
        if (w[j] == 2) {
            x = 0.75 - P.rho * x;
            y = P.sigma * (1.0 - y);
        } else {
            x = P.rho * x;
            y = oracle::f_paper(y);
        }
    }
    return {w.front(), x, y};
}

/** Dense transfer matrix from the definition: M[a][(i,a_0..a_{d-2})] = e^{phi(sample(i a))}. */
Eigen::MatrixXd oracle_matrix(const Potential& phi, int d) {
    const auto ws = oracle::words(d);
    std::map<oracle::Word, int> pos;
    for (std::size_t i = 0; i < ws.size(); ++i) pos[ws[i]] = static_cast<int>(i);
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(static_cast<long>(ws.size()), static_cast<long>(ws.size()));
    for (std::size_t a = 0; a < ws.size(); ++a)
        for (int i = 1; i <= 3; ++i) {
            if (!oracle::A[i - 1][ws[a][0] - 1]) continue;
            oracle::Word ext{i};
            ext.insert(ext.end(), ws[a].begin(), ws[a].end());
            const oracle::Word colw(ext.begin(), ext.end() - 1);
            M(static_cast<long>(a), pos.at(colw)) = std::exp(phi(oracle_sample(ext)));
        }
    return M;
}

Eigen::MatrixXd to_dense(const TransferMatrix& tm) {
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(static_cast<long>(tm.size()), static_cast<long>(tm.size()));
    for (std::size_t a = 0; a < tm.size(); ++a)
        for (auto e = tm.row_ptr[a]; e < tm.row_ptr[a + 1]; ++e) M(static_cast<long>(a), tm.col[e]) = tm.val[e];
    return M;
}

double dominant_eigenvalue(const Eigen::MatrixXd& M) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(M);
    double best = 0.0;
    for (long i = 0; i < es.eigenvalues().size(); ++i) best = std::max(best, std::abs(es.eigenvalues()[i]));
    return best;
}

std::vector<Potential> admitted_potentials() {
    return {Potential::constant(0.0), Potential::constant(-0.7), Potential::affine_in_y(0.0, 0.2),
            Potential::affine_in_y(0.3, -0.15), Potential::center_log_derivative(0.05, P.sigma),
            Potential::center_log_derivative(-0.08, P.sigma)};
}
}  // namespace

TEST(Potential, GateAndBounds) {
    EXPECT_TRUE(check_variation(Potential::constant(0.0)));
    EXPECT_NEAR(variation_gate, 0.2406059, 1e-7);
    EXPECT_FALSE(check_variation(Potential::affine_in_y(0.0, 0.3)));
    EXPECT_DOUBLE_EQ(Potential::affine_in_y(0.0, 0.3).variation(), 0.3);
    EXPECT_THROW(require_admissible(Potential::affine_in_y(0.0, 0.3)), admissibility_error);
    EXPECT_THROW(build_matrix(Potential::affine_in_y(0.0, 0.3), 4, P), admissibility_error);
    // Certified bounds contain every sampled value.
    prop::Gen g(21);
    for (const auto& phi : admitted_potentials())
        for (int c = 0; c < 2000; ++c) {
            const int r = g.integer(1, 3);
            const Box b = rect_box(r, P);
            const double v = phi({r, g.uniform(b.x0, b.x1), g.uniform(b.y0, b.y1)});
            EXPECT_LE(v, phi.sup() + 1e-15);
            EXPECT_GE(v, phi.inf() - 1e-15);
        }
}

TEST(Potential, ShiftedAddsConstant) {
    for (const auto& phi : admitted_potentials()) {
        const auto q = phi.shifted(0.37);
        for (const Word& w : enumerate_words(5)) {
            const auto s = cylinder_sample(w, P);
            EXPECT_NEAR(q(s), phi(s) + 0.37, 1e-15);
        }
        EXPECT_NEAR(q.variation(), phi.variation(), 1e-15);
    }
}

TEST(ApplyL, PreimageCounts) {
    const auto one = [](const PlanePoint&) { return 1.0; };
    EXPECT_DOUBLE_EQ(apply_L_pointwise(Potential::constant(0.0), one, {1, 0.1, 0.5}, P), 2.0);
    EXPECT_DOUBLE_EQ(apply_L_pointwise(Potential::constant(0.0), one, {3, 0.1, 0.5}, P), 1.0);
    EXPECT_NEAR(apply_L_pointwise(Potential::constant(0.2), one, {2, 0.6, 0.1}, P), 2.0 * std::exp(0.2), 1e-15);
}

TEST(Matrix, StructureAtDepthTwo) {
    const auto tm = build_matrix(Potential::constant(0.0), 2, P);
    EXPECT_EQ(tm.size(), 5u);
    EXPECT_EQ(tm.nnz(), 8u);
    for (std::size_t a = 0; a < tm.size(); ++a)
        EXPECT_EQ(tm.row_ptr[a + 1] - tm.row_ptr[a], tm.words[a][0] == 3 ? 1u : 2u);
    for (double v : tm.val) EXPECT_EQ(v, 1.0);
}

TEST(Matrix, ColumnSumsAreOutDegrees) {
    for (int d = 2; d <= 10; ++d) {
        const auto tm = build_matrix(Potential::constant(0.0), d, P);
        std::vector<double> colsum(tm.size(), 0.0);
        for (std::size_t e = 0; e < tm.nnz(); ++e) colsum[tm.col[e]] += tm.val[e];
        for (std::size_t b = 0; b < tm.size(); ++b) {
            // Column b = (i, a_0..a_{d-2}) is hit once per admissible continuation of its last symbol.
            int deg = 0;
            for (int s = 1; s <= 3; ++s) deg += allowed(tm.words[b].back(), s);
            EXPECT_EQ(colsum[b], deg);
        }
    }
}

TEST(Matrix, MatchesDenseOracle) {
    for (const auto& phi : admitted_potentials())
        for (int d = 2; d <= 7; ++d) {
            const auto tm = build_matrix(phi, d, P);
            const Eigen::MatrixXd diff = to_dense(tm) - oracle_matrix(phi, d);
            EXPECT_LE(diff.cwiseAbs().maxCoeff(), 1e-14) << phi.describe() << " d=" << d;
        }
}

TEST(Matrix, ThreadCountDoesNotChangeEntries) {
    const auto phi = Potential::center_log_derivative(0.05, P.sigma);
    BuildOptions one, four;
    four.threads = 4;
    const auto a = build_matrix(phi, 12, P, one), b = build_matrix(phi, 12, P, four);
    EXPECT_EQ(a.val, b.val);
    EXPECT_EQ(a.col, b.col);
    EXPECT_EQ(a.entry_of, b.entry_of);
}

TEST(Matrix, Export) {
    const auto tm = build_matrix(Potential::constant(0.0), 2, P);
    std::ostringstream os;
    export_matrix(tm, os);
    std::istringstream is(os.str());
    std::string r, c;
    double v;
    int lines = 0;
    while (is >> r >> c >> v) {
        ++lines;
        EXPECT_TRUE(is_admissible(parse_word(r)));
        EXPECT_EQ(v, 1.0);
        // Column word = source symbol followed by the row word without its last symbol.
        EXPECT_EQ(c.substr(1), r.substr(0, r.size() - 1));
    }
    EXPECT_EQ(lines, 8);
}

TEST(Spectrum, GoldenRatioAtEveryDepth) {
    for (int d = 2; d <= 20; ++d) {
        const auto s = power_iteration(build_matrix(Potential::constant(0.0), d, P));
        EXPECT_NEAR(s.lambda, oracle::golden_root(), 1e-9) << d;
        EXPECT_NEAR(s.lambda_left, s.lambda, 1e-10);
        EXPECT_LE(s.residual_right, 1e-12);
        EXPECT_LE(s.residual_left, 1e-12);
        for (double v : s.h) ASSERT_GT(v, 0.0);
        for (double v : s.nu) ASSERT_GT(v, 0.0);
        double mass = 0.0;
        for (double v : s.nu) mass += v;
        EXPECT_NEAR(mass, 1.0, 1e-12);
    }
}

TEST(Spectrum, MatchesDenseEigenSolver) {
    for (const auto& phi : admitted_potentials())
        for (int d : {2, 4, 6, 8}) {
            const auto s = power_iteration(build_matrix(phi, d, P));
            EXPECT_NEAR(s.lambda, dominant_eigenvalue(oracle_matrix(phi, d)), 1e-10) << phi.describe() << " d=" << d;
        }
}

TEST(Spectrum, ScalingCovariance) {
    for (const auto& phi : admitted_potentials())
        for (double c : {-1.0, 0.1, 2.5}) {
            const auto a = power_iteration(build_matrix(phi, 10, P));
            const auto b = power_iteration(build_matrix(phi.shifted(c), 10, P));
            EXPECT_NEAR(b.lambda / (std::exp(c) * a.lambda), 1.0, 1e-12);
            for (std::size_t i = 0; i < a.h.size(); ++i) {
                ASSERT_NEAR(b.h[i], a.h[i], 1e-12 * a.h[i] + 1e-15);
                ASSERT_NEAR(b.nu[i], a.nu[i], 1e-12 * a.nu[i] + 1e-18);
            }
        }
    EXPECT_NEAR(power_iteration(build_matrix(Potential::constant(0.1), 12, P)).lambda, std::exp(0.1) * oracle::golden_root(), 1e-9);
}

TEST(Spectrum, LowerBound) {
    for (const auto& phi : admitted_potentials()) {
        const auto s = power_iteration(build_matrix(phi, 10, P));
        EXPECT_GE(s.lambda, std::exp(phi.inf() + log_golden) - 1e-9) << phi.describe();
    }
}

TEST(Spectrum, ConvergenceError) {
    const auto tm = build_matrix(Potential::affine_in_y(0.0, 0.2), 8, P);
    try {
        power_iteration(tm, 1e-12, 2);
        FAIL();
    } catch (const convergence_error& e) {
        EXPECT_GT(e.residual, 1e-12);
    }
}

TEST(Spectrum, DepthConsistencyOfNu) {
    // phi = 0: nu at depth d+1 marginalises exactly onto nu at depth d (Parry measure).
    for (int d : {8, 10, 12}) {
        const auto sd = power_iteration(build_matrix(Potential::constant(0.0), d, P));
        const auto tm1 = build_matrix(Potential::constant(0.0), d + 1, P);
        const auto s1 = power_iteration(tm1);
        const auto marg = prefix_marginal(tm1.words, s1.nu, d);
        for (std::size_t i = 0; i < marg.size(); ++i) EXPECT_NEAR(marg[i], sd.nu[i], 1e-12);
    }
}

TEST(Tn, NoHyperbolicCylinderGivesZero) {
    const auto T = tn_values(Potential::constant(0.0), {1, 0.1, 0.5}, 1, HC, P);
    EXPECT_EQ(T[0], 1.0);
    EXPECT_EQ(T[1], 0.0);  // preimage words "1", "3" have b = -1
}

TEST(Tn, CountsHyperbolicCompatibleWords) {
    prop::Gen g(31);
    for (int c = 0; c < 40; ++c) {
        const int r = g.integer(1, 3);
        const Box b = rect_box(r, P);
        const PlanePoint x{r, g.uniform(b.x0, b.x1), g.uniform(b.y0, b.y1)};
        const auto T = tn_values(Potential::constant(0.0), x, 12, HC, P);
        for (int n = 1; n <= 12; ++n) {
            std::size_t count = 0;
            for (const auto& ow : oracle::words(n)) {
                if (!oracle::A[ow.back() - 1][r - 1]) continue;
                const auto ref = oracle::hyperbolic_times(
                    [&] {
                        std::vector<double> a;
                        for (int s : ow) a.push_back(HC.b[s - 1]);
                        return a;
                    }(),
                    2 * HC.c);
                count += !ref.empty() && ref.back() == n;
            }
            ASSERT_EQ(T[static_cast<std::size_t>(n)], static_cast<double>(count)) << n;
        }
    }
}

TEST(Tn, BoundedByZn) {
    for (const auto& phi : admitted_potentials()) {
        const auto Z = zn_values(phi, 14, HC, P);
        for (const Word& w : enumerate_words(3)) {
            const auto T = tn_values(phi, cylinder_sample(w, P), 14, HC, P);
            for (int n = 1; n <= 14; ++n) EXPECT_LE(T[static_cast<std::size_t>(n)], Z[static_cast<std::size_t>(n - 1)].padded * (1 + 1e-12));
        }
    }
}

TEST(Zn, ConstantPotentialCountsHyperbolicWords) {
    const auto Z = zn_values(Potential::constant(0.0), 14, HC, P);
    for (int n = 1; n <= 14; ++n) {
        std::size_t count = 0;
        for (const Word& w : enumerate_words(n)) count += is_hyperbolic_cylinder(w, HC);
        EXPECT_EQ(Z[static_cast<std::size_t>(n - 1)].hyperbolic_count, count);
        EXPECT_EQ(Z[static_cast<std::size_t>(n - 1)].unpadded, static_cast<double>(count));
        EXPECT_EQ(hyperbolic_words(n, HC).size(), count);
    }
}

TEST(Hn, ConventionAndPositivity) {
    const double lam = oracle::golden_root();
    EXPECT_EQ(hn_value(Potential::constant(0.0), {1, 0.1, 0.5}, 1, lam, HC, P), 1.0);
    for (const Word& w : enumerate_words(4)) EXPECT_GT(hn_value(Potential::constant(0.0), cylinder_sample(w, P), 15, lam, HC, P), 0.0);
}

TEST(TnRecursion, ResidualMatchesDirectComputation) {
    const auto phi = Potential::affine_in_y(0.0, 0.2);
    const double lam = power_iteration(build_matrix(phi, 10, P)).lambda;
    std::vector<PlanePoint> pts;
    for (const Word& w : enumerate_words(3)) pts.push_back(cylinder_sample(w, P));
    const int kmax = 10;
    const auto rep = tn_recursion_residual(phi, lam, kmax, pts, HC, P);
    for (int k = 0; k <= kmax; ++k) {
        double r = 0.0;
        for (const auto& x : pts) {
            const auto Tk = [&](const PlanePoint& y) { return tn_values(phi, y, k, HC, P).back(); };
            r = std::max(r, std::abs(apply_L_pointwise(phi, Tk, x, P) - tn_values(phi, x, k + 1, HC, P).back()) / std::pow(lam, k));
        }
        EXPECT_NEAR(rep.rows[static_cast<std::size_t>(k)].residual, r, 1e-12 * (1 + r));
    }
    EXPECT_TRUE(rep.below_bound);
}

TEST(Distortion, ConstantIsZeroAndPlateau) {
    for (int n = 1; n <= 12; ++n) EXPECT_EQ(distortion_report(Potential::constant(0.3), n, HC, P).max_spread, 0.0);
    const auto phi = Potential::affine_in_y(0.0, 0.2);
    double m10 = 0.0, m15 = 0.0;
    for (int n = 1; n <= 15; ++n) {
        const auto r = distortion_report(phi, n, HC, P);
        EXPECT_LE(r.max_spread, r.bound);
        (n <= 10 ? m10 : m15) = std::max(n <= 10 ? m10 : m15, r.max_spread);
    }
    EXPECT_LE(m15, 1.05 * m10);
    auto doubled = phi;
    doubled.set_holder(2 * phi.holder_C(), phi.holder_delta());
    EXPECT_NEAR(distortion_constant(doubled, 12, HC), 2 * distortion_constant(phi, 12, HC), 1e-15);
}
