#include "bht/classify.hpp"

#include <algorithm>
#include <cmath>

namespace bht {

Matrix2 Matrix2::inverse() const {
    const double dt = det();
    if (dt == 0) throw parameter_error("Matrix2::inverse: singular matrix");
    return {d / dt, -b / dt, -c / dt, a / dt};
}

double Matrix2::norm() const { return std::sqrt(a * a + b * b + c * c + d * d); }

Matrix2 operator*(const Matrix2& m1, const Matrix2& m2) {
    return {m1.a * m2.a + m1.b * m2.c, m1.a * m2.b + m1.b * m2.d,
            m1.c * m2.a + m1.d * m2.c, m1.c * m2.b + m1.d * m2.d};
}

Matrix2 operator-(const Matrix2& m1, const Matrix2& m2) {
    return {m1.a - m2.a, m1.b - m2.b, m1.c - m2.c, m1.d - m2.d};
}

std::string to_string(CaseId id) {
    switch (id) {
        case CaseId::c1: return "1";
        case CaseId::c2a: return "2a";
        case CaseId::c2b: return "2b";
        case CaseId::c3a: return "3a";
        case CaseId::c3b: return "3b";
        case CaseId::c4: return "4";
        case CaseId::c5: return "5";
        case CaseId::c6: return "6";
    }
    return "?";
}

namespace {

using cd = std::complex<double>;

std::array<cd, 2> eigenvalues(const Matrix2& B) {
    const double t = B.trace(), d = B.det();
    const cd disc = std::sqrt(cd(t * t - 4.0 * d, 0.0));
    return {(t + disc) / 2.0, (t - disc) / 2.0};
}

/// Columns v1, v2 as a matrix; returns (V, V^{-1}).
std::pair<Matrix2, Matrix2> column_frame(std::array<double, 2> v1, std::array<double, 2> v2) {
    auto nrm = [](std::array<double, 2>& v) {
        double m = std::hypot(v[0], v[1]);
        if (m > 0) { v[0] /= m; v[1] /= m; }
    };
    nrm(v1);
    nrm(v2);
    Matrix2 V{v1[0], v2[0], v1[1], v2[1]};
    return {V, V.inverse()};
}

std::array<double, 2> real_eigenvector(const Matrix2& B, double lam) {
    // kernel of B - lam I; pick the more independent row formulation
    const double a = B.a - lam, b = B.b, c = B.c, d = B.d - lam;
    if (std::abs(a) + std::abs(b) >= std::abs(c) + std::abs(d)) {
        if (std::abs(a) + std::abs(b) == 0) return {1, 0};
        return std::abs(a) >= std::abs(b) ? std::array<double, 2>{-b / a, 1.0}
                                          : std::array<double, 2>{1.0, -a / b};
    }
    if (std::abs(c) + std::abs(d) == 0) return {1, 0};
    return std::abs(c) >= std::abs(d) ? std::array<double, 2>{-d / c, 1.0}
                                      : std::array<double, 2>{1.0, -c / d};
}

} // namespace

CaseLabel classify_b(const Matrix2& B, double tol) {
    CaseLabel out;
    auto ev = eigenvalues(B);
    const double scale = std::max(1.0, B.norm());

    auto snap = [&](cd z) {
        if (std::abs(z) < tol * scale) { out.ambiguous |= std::abs(z) > 0; return cd(0, 0); }
        if (std::abs(z - 1.0) < tol * scale) { out.ambiguous |= std::abs(z - 1.0) > 0; return cd(1, 0); }
        return z;
    };
    ev[0] = snap(ev[0]);
    ev[1] = snap(ev[1]);
    out.spectrum = ev;

    const bool has0 = ev[0] == cd(0, 0) || ev[1] == cd(0, 0);
    const bool has1 = ev[0] == cd(1, 0) || ev[1] == cd(1, 0);
    const bool complex_pair = std::abs(ev[0].imag()) > tol * scale;

    auto finish = [&](CaseId id, const Matrix2& canonical, const Matrix2& Vinv, const Matrix2& V) {
        out.case_id = id;
        out.jordan_like = canonical;
        out.similarity_witness = Vinv;
        Matrix2 res = (Vinv * B) * V - canonical;
        out.witness_residual = res.norm();
    };

    if (complex_pair) {
        // real Jordan block [[alpha, beta], [-beta, alpha]] in the frame (u, v),
        // where w = u + iv is a complex eigenvector for alpha + i beta.
        const double al = ev[0].real(), be = ev[0].imag();
        std::array<double, 2> u{}, v{};
        if (std::abs(B.b) >= std::abs(B.c)) {
            u = {B.b, al - B.a};
            v = {0.0, be};
        } else {
            u = {al - B.d, B.c};
            v = {be, 0.0};
        }
        const double m = std::max({std::abs(u[0]), std::abs(u[1]), std::abs(v[0]), std::abs(v[1])});
        Matrix2 V{u[0] / m, v[0] / m, u[1] / m, v[1] / m};
        finish(CaseId::c1, {al, be, -be, al}, V.inverse(), V);
        return out;
    }

    const double l1 = ev[0].real(), l2 = ev[1].real();
    const bool repeated = std::abs(l1 - l2) <= tol * scale;

    if (!has0 && !has1) {
        if (!repeated) {
            auto [V, Vinv] = column_frame(real_eigenvector(B, l1), real_eigenvector(B, l2));
            finish(CaseId::c1, Matrix2::diag(l1, l2), Vinv, V);
        } else {
            Matrix2 Bl = B - Matrix2::diag(l1, l1);
            if (Bl.norm() <= tol * scale) {
                finish(CaseId::c1, Matrix2::diag(l1, l1), Matrix2::identity(), Matrix2::identity());
            } else {
                // Jordan block [[l,1],[0,l]]: v = (B-l)w, basis (v, w)
                std::array<double, 2> w = std::abs(Bl.a) + std::abs(Bl.c) > std::abs(Bl.b) + std::abs(Bl.d)
                                              ? std::array<double, 2>{1, 0}
                                              : std::array<double, 2>{0, 1};
                std::array<double, 2> v{Bl.a * w[0] + Bl.b * w[1], Bl.c * w[0] + Bl.d * w[1]};
                const double m = std::hypot(v[0], v[1]);
                Matrix2 V{v[0] / m, w[0] / m, v[1] / m, w[1] / m};
                finish(CaseId::c1, {l1, 1, 0, l1}, V.inverse(), V);
            }
        }
        return out;
    }

    if (has0 && has1) {
        auto [V, Vinv] = column_frame(real_eigenvector(B, 1.0), real_eigenvector(B, 0.0));
        finish(CaseId::c6, Matrix2::diag(1, 0), Vinv, V);
        return out;
    }

    if (has0 && !has1) {
        if (!repeated) { // case 5: Spec = {0, lambda}
            const double lam = std::abs(l1) > std::abs(l2) ? l1 : l2;
            auto [V, Vinv] = column_frame(real_eigenvector(B, lam), real_eigenvector(B, 0.0));
            finish(CaseId::c5, Matrix2::diag(lam, 0), Vinv, V);
            return out;
        }
        // case 2: nilpotent or zero
        if (B.norm() <= tol * scale) {
            finish(CaseId::c2a, Matrix2{0, 0, 0, 0}, Matrix2::identity(), Matrix2::identity());
        } else {
            std::array<double, 2> w = std::abs(B.a) + std::abs(B.c) > std::abs(B.b) + std::abs(B.d)
                                          ? std::array<double, 2>{1, 0}
                                          : std::array<double, 2>{0, 1};
            std::array<double, 2> v{B.a * w[0] + B.b * w[1], B.c * w[0] + B.d * w[1]};
            const double m = std::hypot(v[0], v[1]);
            Matrix2 V{v[0] / m, w[0] / m, v[1] / m, w[1] / m};
            finish(CaseId::c2b, {0, 1, 0, 0}, V.inverse(), V);
        }
        return out;
    }

    // has1 && !has0
    if (!repeated) { // case 4: Spec = {1, lambda}
        const double lam = std::abs(l1 - 1.0) > std::abs(l2 - 1.0) ? l1 : l2;
        auto [V, Vinv] = column_frame(real_eigenvector(B, lam), real_eigenvector(B, 1.0));
        finish(CaseId::c4, Matrix2::diag(lam, 1), Vinv, V);
        return out;
    }
    Matrix2 B1 = B - Matrix2::identity();
    if (B1.norm() <= tol * scale) {
        finish(CaseId::c3a, Matrix2::identity(), Matrix2::identity(), Matrix2::identity());
    } else {
        std::array<double, 2> w = std::abs(B1.a) + std::abs(B1.c) > std::abs(B1.b) + std::abs(B1.d)
                                      ? std::array<double, 2>{1, 0}
                                      : std::array<double, 2>{0, 1};
        std::array<double, 2> v{B1.a * w[0] + B1.b * w[1], B1.c * w[0] + B1.d * w[1]};
        const double m = std::hypot(v[0], v[1]);
        Matrix2 V{v[0] / m, w[0] / m, v[1] / m, w[1] / m};
        finish(CaseId::c3b, {1, 1, 0, 1}, V.inverse(), V);
    }
    return out;
}

CaseLabel classify(const Matrix2& A1, const Matrix2& A2, double tol) {
    const double scale = std::max(1.0, A1.norm() * A1.norm());
    if (std::abs(A1.det()) <= tol * scale)
        throw precondition_error("classify: A1 is singular, reduction to B = A2 A1^{-1} not applicable");
    return classify_b(A2 * A1.inverse(), tol);
}

double singularity_residual(const Matrix2& B, const std::array<double, 6>& v) {
    const double r1 = v[0] + v[2] + v[4];
    const double r2 = v[1] + v[3] + v[5];
    const double r3 = v[0] + B.a * v[2] + B.c * v[3];
    const double r4 = v[1] + B.b * v[2] + B.d * v[3];
    return std::max({std::abs(r1), std::abs(r2), std::abs(r3), std::abs(r4)});
}

SingularitySubspace singularity_basis(const Matrix2& B) {
    SingularitySubspace s;
    // free parameters (xi2, eta2) = (1,0) and (0,1)
    s.basis[0] = {-B.a, -B.b, 1, 0, B.a - 1, B.b};
    s.basis[1] = {-B.c, -B.d, 0, 1, B.c, B.d - 1};
    s.dimension = 2;
    s.max_residual = std::max(singularity_residual(B, s.basis[0]),
                              singularity_residual(B, s.basis[1]));
    return s;
}

namespace {
/// Least-squares residual of projecting v onto span(b1, b2).
double span_residual(const std::array<double, 6>& v, const std::array<double, 6>& b1,
                     const std::array<double, 6>& b2) {
    double g11 = 0, g12 = 0, g22 = 0, p1 = 0, p2 = 0, vv = 0;
    for (int k = 0; k < 6; ++k) {
        g11 += b1[k] * b1[k];
        g12 += b1[k] * b2[k];
        g22 += b2[k] * b2[k];
        p1 += v[k] * b1[k];
        p2 += v[k] * b2[k];
        vv += v[k] * v[k];
    }
    const double det = g11 * g22 - g12 * g12;
    if (det == 0) return std::sqrt(vv);
    const double a = (p1 * g22 - p2 * g12) / det;
    const double b = (p2 * g11 - p1 * g12) / det;
    double res = 0;
    for (int k = 0; k < 6; ++k) {
        const double d = v[k] - a * b1[k] - b * b2[k];
        res += d * d;
    }
    return std::sqrt(std::max(0.0, res));
}
} // namespace

double subspace_distance(const SingularitySubspace& s1,
                         const std::array<std::array<double, 6>, 2>& basis2) {
    double r = 0;
    for (const auto& v : basis2) r = std::max(r, span_residual(v, s1.basis[0], s1.basis[1]));
    for (const auto& v : s1.basis) r = std::max(r, span_residual(v, basis2[0], basis2[1]));
    return r;
}

std::vector<std::pair<int, int>> graph_degeneracies(const Matrix2& B, double tol) {
    auto s = singularity_basis(B);
    const double scale = std::max(1.0, B.norm());
    auto coords = [&](int i, int which) { // 2x2 matrix column `which` = basis vector
        return std::array<double, 2>{s.basis[which][2 * (i - 1)], s.basis[which][2 * (i - 1) + 1]};
    };
    std::vector<std::pair<int, int>> failures;
    for (int i = 1; i <= 3; ++i) {
        for (int j = 1; j <= 3; ++j) {
            if (i == j) continue;
            auto a1 = coords(j, 0), a2 = coords(j, 1); // M_j columns
            auto b1 = coords(i, 0), b2 = coords(i, 1); // M_i columns
            const double detj = a1[0] * a2[1] - a1[1] * a2[0];
            const double nj = std::max({std::abs(a1[0]), std::abs(a1[1]), std::abs(a2[0]),
                                        std::abs(a2[1]), 1.0});
            bool fails = false;
            if (std::abs(detj) > tol * scale * nj) {
                fails = false; // M_j invertible: i is the graph M_i M_j^{-1}
            } else {
                // kernel vectors of M_j (possibly all of R^2)
                std::vector<std::array<double, 2>> kernel;
                if (std::max({std::abs(a1[0]), std::abs(a1[1]), std::abs(a2[0]), std::abs(a2[1])}) <=
                    tol * scale) {
                    kernel = {{1, 0}, {0, 1}};
                } else if (std::abs(a1[0]) + std::abs(a1[1]) >= std::abs(a2[0]) + std::abs(a2[1])) {
                    // alpha * a1 + beta * a2 = 0 with a1 dominant
                    kernel = {{-(a2[0] * a1[0] + a2[1] * a1[1]),
                               a1[0] * a1[0] + a1[1] * a1[1]}};
                } else {
                    kernel = {{a2[0] * a2[0] + a2[1] * a2[1],
                               -(a1[0] * a2[0] + a1[1] * a2[1])}};
                }
                for (const auto& al : kernel) {
                    const double mx = b1[0] * al[0] + b2[0] * al[1];
                    const double my = b1[1] * al[0] + b2[1] * al[1];
                    const double kn = std::hypot(al[0], al[1]);
                    if (std::hypot(mx, my) > tol * scale * std::max(kn, 1.0)) fails = true;
                }
            }
            if (fails) failures.emplace_back(i, j);
        }
    }
    return failures;
}

CubeCenters nondegenerate_cube_solver(const Matrix2& B, int k, double C1, double C2,
                                      const std::array<double, 2>& center_i, int i,
                                      double tol) {
    const double scale = std::max(1.0, B.norm() * B.norm());
    if (std::abs(B.det()) <= tol * scale || std::abs((B - Matrix2::identity()).det()) <= tol * scale)
        throw precondition_error("nondegenerate_cube_solver: Spec(B) meets {0,1}, system degenerate");
    if (std::max(C1, C2) <= 100.0)
        throw parameter_error("nondegenerate_cube_solver: need max{C1,C2} > 100");
    if (i < 1 || i > 3) throw parameter_error("nondegenerate_cube_solver: index out of range");

    const double rhs1 = C1 * std::ldexp(1.0, k);
    const double rhs2 = C2 * std::ldexp(1.0, k);
    // Bt = B^T acting on (u2, v2) in equations (3)-(4)
    auto solve2 = [&](double m11, double m12, double m21, double m22, double r1, double r2) {
        const double dt = m11 * m22 - m12 * m21;
        return std::array<double, 2>{(r1 * m22 - r2 * m12) / dt, (r2 * m11 - r1 * m21) / dt};
    };

    CubeCenters out;
    if (i == 1) {
        out.c[0] = center_i;
        out.c[1] = solve2(B.a, B.c, B.b, B.d, rhs1 - center_i[0], rhs2 - center_i[1]);
        out.c[2] = {-out.c[0][0] - out.c[1][0], -out.c[0][1] - out.c[1][1]};
    } else if (i == 2) {
        out.c[1] = center_i;
        out.c[0] = {rhs1 - B.a * center_i[0] - B.c * center_i[1],
                    rhs2 - B.b * center_i[0] - B.d * center_i[1]};
        out.c[2] = {-out.c[0][0] - out.c[1][0], -out.c[0][1] - out.c[1][1]};
    } else {
        out.c[2] = center_i;
        out.c[1] = solve2(B.a - 1, B.c, B.b, B.d - 1, rhs1 + center_i[0], rhs2 + center_i[1]);
        out.c[0] = {-out.c[2][0] - out.c[1][0], -out.c[2][1] - out.c[1][1]};
    }
    const double r1 = out.c[0][0] + out.c[1][0] + out.c[2][0];
    const double r2 = out.c[0][1] + out.c[1][1] + out.c[2][1];
    const double r3 = out.c[0][0] + B.a * out.c[1][0] + B.c * out.c[1][1] - rhs1;
    const double r4 = out.c[0][1] + B.b * out.c[1][0] + B.d * out.c[1][1] - rhs2;
    out.residual = std::max({std::abs(r1), std::abs(r2), std::abs(r3), std::abs(r4)});
    return out;
}

} // namespace bht
