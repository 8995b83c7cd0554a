#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

#include "bht/errors.hpp"

namespace bht {

struct Matrix2 {
    double a = 0, b = 0, c = 0, d = 0; // row-major [[a, b], [c, d]]

    static Matrix2 identity() { return {1, 0, 0, 1}; }
    static Matrix2 diag(double x, double y) { return {x, 0, 0, y}; }
    double det() const { return a * d - b * c; }
    double trace() const { return a + d; }
    Matrix2 inverse() const;
    double norm() const; // Frobenius
};

Matrix2 operator*(const Matrix2& m1, const Matrix2& m2);
Matrix2 operator-(const Matrix2& m1, const Matrix2& m2);

enum class CaseId { c1, c2a, c2b, c3a, c3b, c4, c5, c6 };
std::string to_string(CaseId id);

struct CaseLabel {
    CaseId case_id = CaseId::c1;
    std::array<std::complex<double>, 2> spectrum{};
    Matrix2 jordan_like;          ///< canonical representative of the similarity class
    Matrix2 similarity_witness;   ///< invertible A with A B A^{-1} = jordan_like
    double witness_residual = 0;  ///< ||A B A^{-1} - jordan_like||
    bool ambiguous = false;       ///< an eigenvalue sat within tol of the {0,1} boundary
};

/// Classify the form through B = A2 A1^{-1}.  A1 must be nonsingular.
CaseLabel classify(const Matrix2& A1, const Matrix2& A2, double tol = 1e-9);
CaseLabel classify_b(const Matrix2& B, double tol = 1e-9);

/// Basis of the 2D solution space of the frequency-support system
///   xi1+xi2+xi3 = 0, eta1+eta2+eta3 = 0,
///   xi1 + b11 xi2 + b21 eta2 = 0, eta1 + b12 xi2 + b22 eta2 = 0,
/// in coordinates (xi1, eta1, xi2, eta2, xi3, eta3).
struct SingularitySubspace {
    std::array<std::array<double, 6>, 2> basis{};
    int dimension = 2;
    double max_residual = 0; ///< worst violation of the four equations by the basis
};

SingularitySubspace singularity_basis(const Matrix2& B);

/// Residual of one vector against the four defining equations.
double singularity_residual(const Matrix2& B, const std::array<double, 6>& v);

/// Do two 2D subspaces of R^6 coincide?  Returns the mutual-containment residual.
double subspace_distance(const SingularitySubspace& s1,
                         const std::array<std::array<double, 6>, 2>& basis2);

/// Ordered pairs (i, j), 1-based, for which coordinates i FAIL to be a graph
/// over coordinates j on the singularity.
std::vector<std::pair<int, int>> graph_degeneracies(const Matrix2& B, double tol = 1e-9);

/// Unique solution of the non-degenerate center system given one cube center.
/// Centers are (u, v) pairs; index i in {1,2,3} marks the given one.
struct CubeCenters {
    std::array<std::array<double, 2>, 3> c{};
    double residual = 0;
};

CubeCenters nondegenerate_cube_solver(const Matrix2& B, int k, double C1, double C2,
                                      const std::array<double, 2>& center_i, int i,
                                      double tol = 1e-9);

} // namespace bht
