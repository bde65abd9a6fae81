#include "cstar/opspace.hpp"

#include <algorithm>

namespace cstar {

OperatorSpace OperatorSpace::span(std::size_t dom, std::size_t cod,
                                  const std::vector<Matrix>& gens, const Tolerance& tol) {
    for (const auto& g : gens)
        if (g.rows() != cod || g.cols() != dom)
            fail(Err::ShapeMismatch, "operator space generator shape");
    OperatorSpace s;
    s.dom_ = dom;
    s.cod_ = cod;
    s.basis_ = orthonormal_basis(gens, tol);
    return s;
}

OperatorSpace OperatorSpace::from_orthonormal(std::size_t dom, std::size_t cod,
                                              std::vector<Matrix> basis) {
    OperatorSpace s;
    s.dom_ = dom;
    s.cod_ = cod;
    s.basis_ = std::move(basis);
    return s;
}

OperatorSpace OperatorSpace::full(std::size_t dom, std::size_t cod) {
    OperatorSpace s;
    s.dom_ = dom;
    s.cod_ = cod;
    s.basis_.reserve(dom * cod);
    for (std::size_t i = 0; i < cod; ++i)
        for (std::size_t j = 0; j < dom; ++j) s.basis_.push_back(Matrix::unit(cod, dom, i, j));
    return s;
}

OperatorSpace OperatorSpace::zero(std::size_t dom, std::size_t cod) {
    OperatorSpace s;
    s.dom_ = dom;
    s.cod_ = cod;
    return s;
}

Matrix OperatorSpace::project(const Matrix& v) const {
    Matrix p(cod_, dom_);
    for (const auto& b : basis_) p += hs_inner(b, v) * b;
    return p;
}

double OperatorSpace::membership_residual(const Matrix& v) const {
    if (v.rows() != cod_ || v.cols() != dom_) fail(Err::ShapeMismatch, "membership shape");
    return (v - project(v)).norm_f();
}

bool OperatorSpace::contains(const Matrix& v, const Tolerance& tol) const {
    return membership_residual(v) <= tol.residual_abs;
}

double OperatorSpace::containment_residual(const OperatorSpace& other) const {
    double worst = 0.0;
    for (const auto& b : other.basis_) worst = std::max(worst, membership_residual(b));
    return worst;
}

bool OperatorSpace::contains_space(const OperatorSpace& other, const Tolerance& tol) const {
    return containment_residual(other) <= tol.residual_abs;
}

double OperatorSpace::equality_residual(const OperatorSpace& other) const {
    return std::max(containment_residual(other), other.containment_residual(*this));
}

bool OperatorSpace::equals(const OperatorSpace& other, const Tolerance& tol) const {
    return equality_residual(other) <= tol.residual_abs;
}

OperatorSpace space_product(const OperatorSpace& x, const OperatorSpace& y, const Tolerance& tol) {
    if (y.cod_dim() != x.dom_dim()) fail(Err::ShapeMismatch, "space_product shapes");
    std::vector<Matrix> prods;
    prods.reserve(x.dim() * y.dim());
    for (const auto& a : x.basis())
        for (const auto& b : y.basis()) prods.push_back(a * b);
    return OperatorSpace::span(y.dom_dim(), x.cod_dim(), prods, tol);
}

OperatorSpace space_adjoint(const OperatorSpace& x, const Tolerance& tol) {
    std::vector<Matrix> adj;
    adj.reserve(x.dim());
    for (const auto& a : x.basis()) adj.push_back(a.adjoint());
    return OperatorSpace::span(x.cod_dim(), x.dom_dim(), adj, tol);
}

OperatorSpace space_sum(const OperatorSpace& x, const OperatorSpace& y, const Tolerance& tol) {
    if (x.dom_dim() != y.dom_dim() || x.cod_dim() != y.cod_dim())
        fail(Err::ShapeMismatch, "space_sum shapes");
    std::vector<Matrix> gens = x.basis();
    gens.insert(gens.end(), y.basis().begin(), y.basis().end());
    return OperatorSpace::span(x.dom_dim(), x.cod_dim(), gens, tol);
}

OperatorSpace space_intersection(const OperatorSpace& x, const OperatorSpace& y,
                                 const Tolerance& tol) {
    if (x.dom_dim() != y.dom_dim() || x.cod_dim() != y.cod_dim())
        fail(Err::ShapeMismatch, "space_intersection shapes");
    const std::size_t dom = x.dom_dim(), cod = x.cod_dim();
    if (x.dim() == 0 || y.dim() == 0) return OperatorSpace::zero(dom, cod);

    // v in X and v in Y  <=>  (1-P_X)(v * Id) = 0 and (1-P_Y)(v * Id) = 0
    ConstraintBuilder cb(cod, dom, false);
    cb.mult_right_in_span(Matrix::identity(dom), x.basis());
    cb.mult_right_in_span(Matrix::identity(dom), y.basis());
    NullspaceResult ns = cb.nullspace(tol);
    return OperatorSpace::from_orthonormal(dom, cod, std::move(ns.basis));
}

bool space_acts_nondegenerately(const OperatorSpace& space, const Tolerance& tol) {
    // [A C^dom] = C^cod: stack all basis columns and check the span.
    const std::size_t dom = space.dom_dim(), cod = space.cod_dim();
    std::vector<Matrix> cols;
    cols.reserve(space.dim() * dom);
    for (const auto& b : space.basis())
        for (std::size_t j = 0; j < dom; ++j) cols.push_back(b.col(j));
    return orthonormal_basis(cols, tol).size() == cod;
}

ConcreteAlgebra::Closure ConcreteAlgebra::closure_residuals(const OperatorSpace& space) {
    Closure c;
    for (const auto& b : space.basis()) {
        c.adjoint_residual = std::max(c.adjoint_residual, space.membership_residual(b.adjoint()));
        for (const auto& b2 : space.basis())
            c.product_residual = std::max(c.product_residual, space.membership_residual(b * b2));
    }
    return c;
}

ConcreteAlgebra ConcreteAlgebra::from_space(const OperatorSpace& space, const Tolerance& tol) {
    if (space.dom_dim() != space.cod_dim()) fail(Err::ShapeMismatch, "algebra must act on one space");
    const Closure c = closure_residuals(space);
    if (!c.ok(tol))
        fail(Err::NotClosed, "operator space is not a *-closed algebra at residual_abs");
    ConcreteAlgebra a;
    a.space_ = space;
    a.nondegenerate_ = space_acts_nondegenerately(space, tol);
    return a;
}

bool ConcreteAlgebra::contains_id(const Tolerance& tol) const {
    return space_.contains(Matrix::identity(amb_dim()), tol);
}

ConcreteAlgebra generated_algebra(const std::vector<Matrix>& generators, bool unital,
                                  const Tolerance& tol) {
    std::size_t n = 0;
    for (const auto& g : generators) {
        if (g.rows() != g.cols()) fail(Err::ShapeMismatch, "generators must be square");
        if (n == 0) n = g.rows();
        if (g.rows() != n) fail(Err::ShapeMismatch, "generators live on different spaces");
    }
    if (n == 0) {
        if (!unital) {
            // no generators, no ambient dimension: the zero algebra on C^1
            return ConcreteAlgebra::from_space(OperatorSpace::zero(1, 1), tol);
        }
        return ConcreteAlgebra::from_space(
            OperatorSpace::span(1, 1, {Matrix::identity(1)}, tol), tol);
    }

    std::vector<Matrix> gens = generators;
    if (unital) gens.push_back(Matrix::identity(n));
    for (const auto& g : generators) gens.push_back(g.adjoint());

    OperatorSpace cur = OperatorSpace::span(n, n, gens, tol);
    for (std::size_t round = 0; round <= n * n; ++round) {
        std::vector<Matrix> next = cur.basis();
        for (const auto& a : cur.basis()) next.push_back(a.adjoint());
        for (const auto& a : cur.basis())
            for (const auto& b : cur.basis()) next.push_back(a * b);
        OperatorSpace grown = OperatorSpace::span(n, n, next, tol);
        if (grown.dim() == cur.dim()) return ConcreteAlgebra::from_space(grown, tol);
        cur = grown;
    }
    fail(Err::NotStabilized, "algebra closure did not stabilize within dim^2 rounds");
}

ConcreteAlgebra multiplier_algebra(const ConcreteAlgebra& a, const Tolerance& tol) {
    if (!a.nondegenerate()) fail(Err::DegenerateInput, "multiplier algebra of a degenerate algebra");
    const std::size_t n = a.amb_dim();
    ConstraintBuilder cb(n, n, false);
    for (const auto& b : a.basis()) {
        cb.mult_right_in_span(b, a.basis());
        cb.mult_left_in_span(b, a.basis());
    }
    NullspaceResult ns = cb.nullspace(tol);
    return ConcreteAlgebra::from_space(OperatorSpace::from_orthonormal(n, n, std::move(ns.basis)),
                                       tol);
}

OperatorSpace commutant_space(const std::vector<Matrix>& generators, std::size_t n,
                              const Tolerance& tol) {
    return OperatorSpace::from_orthonormal(n, n, commutant(generators, n, tol));
}

} // namespace cstar
