#pragma once

// Closed-form building blocks shared by the model and expectations modules:
// the truncated rectangle probability decomposes into a full-rectangle term
// (rect) minus a lower-triangle term (lower, right-truncation violated)
// minus an upper-triangle term (upper, left-truncation violated), each with
// a product-copula part plus vartheta times an FGM part. All theta
// derivatives are analytic.

#include <cmath>

#include "dtks/geometry.hpp"

namespace dtks::detail {

// ---- product-copula parts ----

inline double rect_pi(double th, const StudyWindow& w, double x, double t) {
    return t / w.G * (-std::expm1(-th * x));
}

inline double lower_pi(double th, const StudyWindow& w, double x) {
    const double ex = std::exp(-th * x), es = std::exp(-th * w.s);
    return (-(x - w.s) * ex + (es - ex) / th) / w.G;
}

inline double upper_pi(double th, const StudyWindow& w, double t) {
    return (t - (-std::expm1(-th * t)) / th) / w.G;
}

inline double drect_pi(double th, const StudyWindow& w, double x, double t) {
    return x * t / w.G * std::exp(-th * x);
}

inline double dlower_pi(double th, const StudyWindow& w, double x) {
    const double ex = std::exp(-th * x), es = std::exp(-th * w.s);
    return ex / w.G * (x * x - w.s * x + x / th + 1.0 / (th * th)) -
           es / (w.G * th) * (w.s + 1.0 / th);
}

inline double dupper_pi(double th, const StudyWindow& w, double t) {
    return (1.0 - std::exp(-th * t) * (1.0 + th * t)) / (w.G * th * th);
}

// ---- FGM parts (coefficients of vartheta) ----

inline double rect_fgm(double th, const StudyWindow& w, double x, double t) {
    const double ex = std::exp(-th * x);
    return (t / w.G) * (1.0 - ex) * ex * (1.0 - t / w.G);
}

inline double drect_fgm(double th, const StudyWindow& w, double x, double t) {
    const double ex = std::exp(-th * x);
    return (t * x / w.G) * (1.0 - t / w.G) * (2.0 * ex * ex - ex);
}

inline double lower_fgm(double th, const StudyWindow& w, double x) {
    const double G = w.G, s = w.s;
    const double ex = std::exp(-th * x), es = std::exp(-th * s);
    const double u = x - s;
    return -(u / G) * ex * (1.0 - u / G) * (ex - 1.0)
           - ex * (1.0 - 2.0 * u / G) * (0.5 * ex - 1.0) / (th * G)
           + es * (0.5 * es - 1.0) / (th * G)
           + 2.0 * ex * (0.25 * ex - 1.0) / (G * G * th * th)
           - 2.0 * es * (0.25 * es - 1.0) / (G * G * th * th);
}

inline double dlower_fgm(double th, const StudyWindow& w, double x) {
    const double G = w.G, s = w.s;
    const double ex = std::exp(-th * x), es = std::exp(-th * s);
    const double u = x - s;
    const double th2 = th * th, th3 = th2 * th;
    return (u * x / G) * (1.0 - u / G) * (2.0 * ex * ex - ex)
           - ((1.0 - 2.0 * u / G) / G) * ((x * ex - x * ex * ex) / th - (0.5 * ex * ex - ex) / th2)
           + ((s * es - s * es * es) / th - (0.5 * es * es - es) / th2) / G
           + (2.0 / (G * G)) * (-2.0 * (0.25 * ex * ex - ex) / th3 + (x * ex - 0.5 * x * ex * ex) / th2)
           - (2.0 / (G * G)) * (-2.0 * (0.25 * es * es - es) / th3 + (s * es - 0.5 * s * es * es) / th2);
}

inline double upper_fgm(double th, const StudyWindow& w, double t) {
    const double G = w.G;
    const double et = std::exp(-th * t);
    return et * (1.0 - 2.0 * t / G) * (0.5 * et - 1.0) / (th * G) + 0.5 / (th * G)
           - 2.0 * et * (0.25 * et - 1.0) / (G * G * th * th) - 1.5 / (G * G * th * th);
}

inline double dupper_fgm(double th, const StudyWindow& w, double t) {
    const double G = w.G;
    const double et = std::exp(-th * t);
    const double th2 = th * th, th3 = th2 * th;
    return ((1.0 - 2.0 * t / G) / G) * ((t * et - t * et * et) / th - (0.5 * et * et - et) / th2)
           - 0.5 / (th2 * G)
           - (2.0 / (G * G)) * (-2.0 * (0.25 * et * et - et) / th3 + (t * et - 0.5 * t * et * et) / th2)
           + 3.0 / (G * G * th3);
}

// ---- selection probability ----

inline double alpha_pi(double th, const StudyWindow& w) {
    return (-std::expm1(-th * w.s)) * (-std::expm1(-th * w.G)) / (w.G * th);
}

// d(log alpha)/d(theta) under the product copula; numerically tame.
inline double dlog_alpha_pi(double th, const StudyWindow& w) {
    const double es = std::exp(-th * w.s), eG = std::exp(-th * w.G);
    return w.s * es / (-std::expm1(-th * w.s)) + w.G * eG / (-std::expm1(-th * w.G)) - 1.0 / th;
}

inline double dalpha_pi(double th, const StudyWindow& w) {
    return alpha_pi(th, w) * dlog_alpha_pi(th, w);
}

// vartheta coefficient of the FGM selection probability (affine in vartheta).
inline double alpha_fgm_coef(double th, const StudyWindow& w) {
    const double G = w.G, s = w.s;
    const double es = std::exp(-th * s), eG = std::exp(-th * G);
    const double e2s = es * es, e2G = eG * eG;
    return (es - 1.0) * (eG + 1.0) / (th * G) - (e2s - 1.0) * (e2G + 1.0) / (2.0 * th * G)
           + 2.0 * (1.0 - es) * (1.0 - eG) / (G * G * th * th)
           - (1.0 - e2s) * (1.0 - e2G) / (2.0 * G * G * th * th);
}

inline double dalpha_fgm_coef(double th, const StudyWindow& w) {
    const double G = w.G, s = w.s;
    const double es = std::exp(-th * s), eG = std::exp(-th * G);
    const double e2s = es * es, e2G = eG * eG;
    const double th2 = th * th, th3 = th2 * th;
    auto dB = [&](double a, double eas, double eaG) {
        return (-a * s * eas * (eaG + 1.0) - a * G * eaG * (eas - 1.0)) / th -
               (eas - 1.0) * (eaG + 1.0) / th2;
    };
    auto dC = [&](double a, double eas, double eaG) {
        return (a * s * eas * (1.0 - eaG) + a * G * eaG * (1.0 - eas)) / th2 -
               2.0 * (1.0 - eas) * (1.0 - eaG) / th3;
    };
    return dB(1.0, es, eG) / G - dB(2.0, e2s, e2G) / (2.0 * G) + 2.0 * dC(1.0, es, eG) / (G * G) -
           dC(2.0, e2s, e2G) / (2.0 * G * G);
}

// Arguments of the case combination: the rectangle corner actually used by
// each branch, and whether the lower triangle enters.
struct CaseArgs {
    double x;
    double t;
    bool with_lower;
};

inline CaseArgs case_args(int region, const StudyWindow& w, const Point& p) {
    switch (region) {
        case 1: return {p.x, p.t, true};
        case 2: return {p.x, p.t, false};
        case 3: return {p.t + w.s, p.t, true};
        case 4: return {p.x, p.x, true};
        default: return {p.x, p.x, false};  // case 5
    }
}

}  // namespace dtks::detail
