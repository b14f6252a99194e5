// Element-loop assembly of bilinear forms and L2 projections. These generic
// entry points cover mass/stiffness/constraint operators and initial data;
// the time stepper has its own fused element loop built on the same shape
// evaluation and quadrature.
#pragma once

#include <functional>

#include "chmhd/mesh.hpp"
#include "chmhd/quadrature.hpp"
#include "chmhd/sparse.hpp"
#include "chmhd/spaces.hpp"

namespace chmhd {

// Identifies one quadrature point during assembly so kernels can look up
// pre-evaluated coefficient fields by (tri, q) instead of locating points.
struct KernelPoint {
    Vec2 x;
    int tri = 0;
    int q = 0;
};

// Integrand of a bilinear form at one quadrature point. Must be a pure
// function of its arguments.
using Kernel = std::function<double(const KernelPoint&, const ShapeRef& trial, const ShapeRef& test)>;

// Matrix of the form A[i][j] = integral kernel(x, trial_j, test_i); rows are
// test DOFs, columns trial DOFs. Element contributions are accumulated in a
// fixed order, so the result does not depend on evaluation scheduling.
CompressedMatrix assemble_weighted_operator(const Space& trial, const Space& test,
                                            const Mesh& mesh, const Kernel& kernel);

// Mass matrix of a space (kernel = matching-component product of values).
CompressedMatrix assemble_mass(const Space& space, const Mesh& mesh);

// L2 projection of an analytic function. Scalar spaces read value[0] only.
using AnalyticFn = std::function<void(Vec2 p, double value[2])>;
FieldVec l2_project(const Space& space, const Mesh& mesh, const AnalyticFn& f);

// Load vector (f, basis_i) of an analytic function.
std::vector<double> assemble_load(const Space& space, const Mesh& mesh, const AnalyticFn& f);

// Quadrature integral of a pointwise functional over the mesh.
double integrate(const Mesh& mesh, const std::function<double(const KernelPoint&)>& f);

}  // namespace chmhd
