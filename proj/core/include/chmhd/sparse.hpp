// Compressed sparse row storage with deterministic triplet assembly and a
// pivoted direct solver for the coupled (indefinite, nonsymmetric) systems.
#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "chmhd/util.hpp"

namespace chmhd {

struct Triplets {
    int rows = 0, cols = 0;
    std::vector<int> r, c;
    std::vector<double> v;

    Triplets() = default;
    Triplets(int rows_, int cols_) : rows(rows_), cols(cols_) {}
    void add(int row, int col, double value) {
        r.push_back(row);
        c.push_back(col);
        v.push_back(value);
    }
    size_t size() const { return v.size(); }
};

struct CompressedMatrix {
    int rows = 0, cols = 0;
    std::vector<std::int64_t> row_ptr;  // size rows+1
    std::vector<int> col_idx;           // strictly increasing within each row
    std::vector<double> values;

    std::int64_t nnz() const { return static_cast<std::int64_t>(values.size()); }
};

// Duplicates are summed; the result is independent of triplet order (entries
// are merged in (row, col) order). Throws on out-of-range indices.
CompressedMatrix compress(const Triplets& t);

std::vector<double> matvec(const CompressedMatrix& A, const std::vector<double>& x);

// max_i sum_j |a_ij|
double inf_norm(const CompressedMatrix& A);
double inf_norm(const std::vector<double>& x);

// MatrixMarket coordinate format (ASCII, 1-based), for debugging dumps.
void mm_write(const CompressedMatrix& A, const std::string& path);

// Reusable pivoted LU of a square CompressedMatrix. The sparsity pattern is
// analyzed on the first factorization and reused while the pattern is
// unchanged. Solves apply one pass of iterative refinement, which keeps
// residuals near machine precision (the per-step mass budget depends on it).
class DirectSolver {
  public:
    DirectSolver();
    ~DirectSolver();
    DirectSolver(DirectSolver&&) noexcept;
    DirectSolver& operator=(DirectSolver&&) noexcept;

    // Throws SolveError (with the offending pivot index) on singularity.
    void factorize(const CompressedMatrix& A);
    bool factorized() const;

    // Solve against the last factorized matrix (refinement uses an internal
    // copy of it, so the solve is accurate for exactly that matrix even when
    // a caller keeps the factorization deliberately stale across steps).
    std::vector<double> solve(const std::vector<double>& b) const;

    // Single substitution pass, no refinement. Newton loops prefer this: they
    // re-measure the true nonlinear residual after every update, so polishing
    // the linear solve buys accuracy nothing and costs a second substitution.
    std::vector<double> solve_once(const std::vector<double>& b) const;

    // inf-norm residual ||Ax - b|| of the last solve, for diagnostics.
    double last_residual() const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// One-shot convenience: factorize A and solve A x = b with the residual
// guarantee ||Ax-b||_inf <= 1e-10 * (||A||_inf ||x||_inf + ||b||_inf).
std::vector<double> solve_direct(const CompressedMatrix& A, const std::vector<double>& b);

}  // namespace chmhd
