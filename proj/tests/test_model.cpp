#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "dtks/model.hpp"
#include "dtks/quadrature.hpp"
#include "dtks/rng.hpp"
#include "support/oracles.hpp"

using namespace dtks;

namespace {

ModelParams product(double theta) { return {Copula::product, theta, 0.0}; }
ModelParams fgm(double theta, double vartheta) { return {Copula::fgm, theta, vartheta}; }

ModelParams random_params(Rng& rng, Copula c) {
    ModelParams p;
    p.copula = c;
    p.theta = std::exp(rng.uniform() * 3.0 - 2.0);  // e^-2 .. e^1
    p.vartheta = c == Copula::fgm ? rng.uniform() * 1.8 - 0.9 : 0.0;
    return p;
}

}  // namespace

TEST_CASE("density closed forms") {
    const StudyWindow w{2.0, 1.0};
    CHECK(density(product(0.5), w, {1.0, 1.0}) ==
          doctest::Approx(0.25 * std::exp(-0.5)).epsilon(1e-14));
    // the dependence term vanishes at t = G/2
    for (double x : {0.1, 0.7, 2.5, 9.0}) {
        CHECK(density(fgm(0.5, 0.3), w, {x, 1.0}) ==
              doctest::Approx(density(product(0.5), w, {x, 1.0})).epsilon(1e-14));
    }
    CHECK(density(fgm(0.5, 0.3), w, {1.0, 2.5}) == 0.0);
    CHECK(density(fgm(0.5, 0.3), w, {-0.1, 1.0}) == 0.0);
}

TEST_CASE("density integrates to one") {
    Rng rng(11);
    for (int i = 0; i < 20; ++i) {
        const ModelParams p = random_params(rng, i % 2 ? Copula::fgm : Copula::product);
        const StudyWindow w{0.5 + rng.uniform() * 4.0, 0.2 + rng.uniform() * 2.0};
        const double xhi = 30.0 / p.theta;
        const std::vector<Slice> rect = {{0.0, xhi, 0.0, 0.0, w.G, 0.0}};
        const double mass = integrate2d(
            [&](double x, double t) { return density(p, w, {x, t}); }, rect, 1e-9);
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("selection probability reproduces the reported values") {
    const StudyWindow w{24.0, 3.0};
    CHECK(std::abs(alpha(product(0.08261), w) - 0.0955) < 5e-4);
    CHECK(std::abs(alpha(fgm(0.08172, 0.10256), w) - 0.09753) < 1e-4);
}

TEST_CASE("selection probability equals the density mass over the support") {
    {
        const StudyWindow w{2.0, 1.0};
        CHECK(std::abs(alpha(fgm(0.5, 0.3), w) - oracles::alpha_quad(fgm(0.5, 0.3), w)) < 1e-6);
    }
    Rng rng(12);
    for (int i = 0; i < 10; ++i) {
        const ModelParams p = random_params(rng, i % 2 ? Copula::fgm : Copula::product);
        const StudyWindow w{0.5 + rng.uniform() * 6.0, 0.2 + rng.uniform() * 2.5};
        const double a = alpha(p, w);
        CHECK(a > 0.0);
        CHECK(a < 1.0);
        CHECK(std::abs(a - oracles::alpha_quad(p, w)) < 1e-6);
    }
    // vartheta = 0 degenerates to the product value exactly
    const StudyWindow w{3.0, 1.0};
    CHECK(alpha(fgm(0.7, 0.0), w) == alpha(product(0.7), w));
}

TEST_CASE("alpha gradient") {
    const StudyWindow w{24.0, 3.0};
    SUBCASE("affine in vartheta") {
        const double v1 = -0.4, v2 = 0.65, th = 0.21;
        const double dv = alpha_grad(fgm(th, 0.1), w)(1);
        CHECK(alpha_grad(fgm(th, v1), w)(1) == dv);
        CHECK((alpha(fgm(th, v2), w) - alpha(fgm(th, v1), w)) ==
              doctest::Approx((v2 - v1) * dv).epsilon(1e-12));
    }
    SUBCASE("product theta derivative vs finite differences") {
        auto f = [&](const ModelParams& p) { return alpha(p, w); };
        const double fd = oracles::central_diff(f, product(0.1), 0, 1e-6);
        CHECK(alpha_grad(product(0.1), w)(0) == doctest::Approx(fd).epsilon(1e-6));
    }
    SUBCASE("fgm gradient vs finite differences") {
        const ModelParams p = fgm(0.08172, 0.10256);
        auto f = [&](const ModelParams& q) { return alpha(q, w); };
        const ParamVector g = alpha_grad(p, w);
        CHECK(g(0) == doctest::Approx(oracles::central_diff(f, p, 0, 1e-6)).epsilon(1e-5));
        CHECK(g(1) == doctest::Approx(oracles::central_diff(f, p, 1, 1e-6)).epsilon(1e-5));
    }
}

TEST_CASE("score") {
    const StudyWindow w{2.0, 1.0};
    const ModelParams p = fgm(0.5, 0.3);
    SUBCASE("zero outside the support") {
        CHECK(score(p, w, {1.5, 0.2}).norm() == 0.0);
        CHECK(score(product(0.5), w, {0.3, 0.7}).norm() == 0.0);
    }
    SUBCASE("second coordinate at t = G/2") {
        const double a = alpha(p, w);
        const ParamVector da = alpha_grad(p, w);
        const ParamVector psi = score(p, w, {1.2, 1.0});
        CHECK(psi(1) == doctest::Approx(-da(1) / a).epsilon(1e-13));
    }
    SUBCASE("zero mean over the support") {
        for (const ModelParams q : {fgm(0.5, 0.3), fgm(1.1, -0.7), product(0.8)}) {
            const ScoreFunction psi(q, w);
            for (int i = 0; i < param_dim(q.copula); ++i) {
                const double mean = integrate2d(
                    [&](double x, double t) {
                        return psi({x, t})(i) * density(q, w, {x, t});
                    },
                    support_slices(w), 1e-9);
                CHECK(std::abs(mean) < 1e-7);
            }
        }
    }
    SUBCASE("denominator bounded away from zero on D") {
        Rng rng(5);
        const ModelParams q = fgm(0.9, -0.85);
        for (int i = 0; i < 100000; ++i) {
            const double t = rng.uniform() * w.G;
            const double x = t + rng.uniform() * w.s;
            const double den = 1.0 + q.vartheta * (2.0 * std::exp(-q.theta * x) - 1.0) *
                                          (1.0 - 2.0 * t / w.G);
            CHECK(std::abs(den) >= 1.0 - std::abs(q.vartheta) - 1e-12);
        }
    }
}

TEST_CASE("fisher information") {
    SUBCASE("product closed form vs quadrature") {
        const StudyWindow w{24.0, 3.0};
        const ModelParams p = product(0.08261);
        const ScoreFunction psi(p, w);
        const double quad = integrate2d(
            [&](double x, double t) {
                const double v = psi({x, t})(0);
                return v * v * density(p, w, {x, t});
            },
            support_slices(w), 1e-10);
        const double closed = fisher_info(p, w)(0, 0);
        CHECK(closed == doctest::Approx(quad).epsilon(1e-4));
    }
    SUBCASE("fgm at vartheta=0 has the product theta block") {
        const StudyWindow w{2.0, 1.0};
        CHECK(fisher_info(fgm(0.6, 0.0), w)(0, 0) ==
              doctest::Approx(fisher_info(product(0.6), w)(0, 0)).epsilon(1e-6));
    }
    SUBCASE("fgm information is symmetric positive definite") {
        const StudyWindow w{2.0, 1.0};
        const ParamMatrix info = fisher_info(fgm(0.5, 0.3), w);
        CHECK(info(0, 1) == info(1, 0));
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es{Eigen::Matrix2d(info)};
        CHECK(es.eigenvalues().minCoeff() > 0.0);
    }
    SUBCASE("information-matrix equality vs a finite-difference Jacobian") {
        // E(psi psi^T) = -+ d/dtheta' E_theta0[psi_theta'] depending on the
        // family's score sign; the product score is the flipped one.
        const StudyWindow w{2.0, 1.0};
        {
            const ModelParams p = product(0.8);
            auto mean_score = [&](const ModelParams& q) {
                const ScoreFunction psi(q, w);
                return integrate2d(
                    [&](double x, double t) { return psi({x, t})(0) * density(p, w, {x, t}); },
                    support_slices(w), 1e-10);
            };
            const double jac = oracles::central_diff(mean_score, p, 0, 1e-5);
            CHECK(fisher_info(p, w)(0, 0) == doctest::Approx(jac).epsilon(1e-3));
        }
        {
            const ModelParams p = fgm(0.5, 0.3);
            Eigen::Matrix2d jac;
            for (int i = 0; i < 2; ++i) {
                for (int j = 0; j < 2; ++j) {
                    auto mean_score = [&](const ModelParams& q) {
                        const ScoreFunction psi(q, w);
                        return integrate2d(
                            [&](double x, double t) {
                                return psi({x, t})(i) * density(p, w, {x, t});
                            },
                            support_slices(w), 1e-10);
                    };
                    jac(i, j) = oracles::central_diff(mean_score, p, j, 1e-5);
                }
            }
            const ParamMatrix info = fisher_info(p, w);
            for (int i = 0; i < 2; ++i) {
                for (int j = 0; j < 2; ++j) {
                    CHECK(info(i, j) == doctest::Approx(-jac(i, j)).epsilon(1e-3));
                }
            }
        }
    }
}

TEST_CASE("influence second moment equals the inverse information") {
    const StudyWindow w{2.0, 1.0};
    const ModelParams p = fgm(0.5, 0.3);
    const ParamMatrix info = fisher_info(p, w);
    const Eigen::Matrix2d expected = Eigen::Matrix2d(info).inverse();
    const ScoreFunction psi(p, w);
    const Eigen::Matrix2d solve =
        Eigen::Matrix2d(info).llt().solve(Eigen::Matrix2d::Identity());
    for (int i = 0; i < 2; ++i) {
        for (int j = i; j < 2; ++j) {
            const double moment = integrate2d(
                [&](double x, double t) {
                    const Eigen::Vector2d phi = solve * Eigen::Vector2d(psi({x, t}));
                    return phi(i) * phi(j) * density(p, w, {x, t});
                },
                support_slices(w), 1e-9);
            CHECK(moment == doctest::Approx(expected(i, j)).epsilon(1e-4));
        }
    }
    // the sign flip between the families cannot reach the influence
    const ParamVector via_api = influence(p, w, {1.2, 0.8});
    const Eigen::Vector2d direct = solve * Eigen::Vector2d(psi({1.2, 0.8}));
    CHECK(via_api(0) == doctest::Approx(direct(0)).epsilon(1e-12));
    CHECK(via_api(1) == doctest::Approx(direct(1)).epsilon(1e-12));
}

TEST_CASE("kendall tau") {
    CHECK(kendall_tau(0.0) == 0.0);
    CHECK(kendall_tau(0.9) == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(std::round(kendall_tau(0.10256) * 1000.0) / 1000.0 == doctest::Approx(0.023));
    CHECK_THROWS_AS(kendall_tau(1.0), std::invalid_argument);
}

TEST_CASE("parameter validation") {
    CHECK(valid(product(0.5)));
    CHECK_FALSE(valid(product(0.0)));
    CHECK_FALSE(valid(fgm(0.5, 1.0)));
    CHECK_FALSE(valid(fgm(0.5, -1.0)));
    CHECK(valid(fgm(0.5, 0.999)));
    CHECK_FALSE(valid({Copula::product, 0.5, 0.2}));  // stray vartheta
    CHECK_THROWS_AS(alpha(product(-1.0), StudyWindow{2.0, 1.0}), std::invalid_argument);
}
