use super::score::{Component, ScoreFunction};
use crate::error::{domain_err, numeric_err, structural_err, Result};
use crate::lattice::{linspace, Shape};
use crate::quad::{simpson, simpson_weights};
use crate::scalar::{neumaier_sum, sign_pow, Scalar};

/// Simpson intervals per axis for the `Λ_0`-weighted integrals.
pub const DEP_INTERVALS: usize = 2000;

/// `R(g)(x) = g(x) - ∫_x^1 g(u) du / (1-x)` for `x ∈ [0,1)`.
pub fn r_univ<T: Scalar>(g: &Component<T>, x: T) -> Result<T> {
    if !(x >= T::zero()) || x >= T::one() {
        return Err(domain_err!("R(g) is defined on [0,1), got x = {x}"));
    }
    Ok(g.eval(x) - g.tail_integral(x) / (T::one() - x))
}

/// `R(g)` extended by its limit `0` at `x = 1`.
fn r_closed<T: Scalar>(g: &Component<T>, x: T) -> T {
    if x >= T::one() {
        T::zero()
    } else {
        g.eval(x) - g.tail_integral(x) / (T::one() - x)
    }
}

/// `R_d(g)(x) = Σ_t c_t ∏_k R(g_{t,k})(x_k)`.
pub fn r_d_apply<T: Scalar>(g: &ScoreFunction<T>, x: &[T]) -> Result<T> {
    if x.len() != g.dim() {
        return Err(structural_err!("point has {} coordinates, score has {}", x.len(), g.dim()));
    }
    let mut terms = Vec::with_capacity(g.terms().len());
    for t in g.terms() {
        let mut p = t.coef;
        for (f, &xk) in t.factors.iter().zip(x) {
            p = p * r_univ(f, xk)?;
        }
        terms.push(p);
    }
    Ok(neumaier_sum(terms))
}

fn gram<T: Scalar>(g: &ScoreFunction<T>, nodes: usize, map: impl Fn(&Component<T>, T) -> T) -> Result<T> {
    if nodes < 3 || nodes.is_multiple_of(2) {
        return Err(structural_err!("Simpson quadrature needs an odd node count ≥ 3, got {nodes}"));
    }
    let xs = linspace(T::zero(), T::one(), nodes);
    let w = simpson_weights(nodes - 1, T::one() / T::from_usize_lossy(nodes - 1))?;
    let tables: Vec<Vec<Vec<T>>> =
        g.terms().iter().map(|t| t.factors.iter().map(|f| xs.iter().map(|&x| map(f, x)).collect()).collect()).collect();
    let mut acc = Vec::new();
    for (a, ta) in g.terms().iter().enumerate() {
        for (b, tb) in g.terms().iter().enumerate() {
            let mut p = ta.coef * tb.coef;
            for (fa, fb) in tables[a].iter().zip(&tables[b]) {
                p = p * neumaier_sum((0..nodes).map(|i| w[i] * fa[i] * fb[i]));
            }
            acc.push(p);
        }
    }
    Ok(neumaier_sum(acc))
}

/// `‖g‖²` in `L_2(P_0^d)` by tensor Simpson quadrature with `nodes` points per axis.
pub fn score_norm_sq<T: Scalar>(g: &ScoreFunction<T>, nodes: usize) -> Result<T> {
    gram(g, nodes, |f, x| f.eval(x))
}

/// `‖R_d(g)‖²` in `L_2(P_0^d)` by tensor Simpson quadrature with `nodes` points per axis.
pub fn r_norm_sq<T: Scalar>(g: &ScoreFunction<T>, nodes: usize) -> Result<T> {
    gram(g, nodes, |f, x| r_closed(f, x))
}

/// `∫_0^x R(g)(u) / (1-u) du`, with `v = -log(1-u)`.
fn hazard_weighted<T: Scalar>(f: &Component<T>, x: T, intervals: usize) -> Result<T> {
    if x == T::zero() {
        return Ok(T::zero());
    }
    let upper = -(-x).ln_1p();
    simpson(|v: T| r_closed(f, -(-v).exp_m1()), T::zero(), upper, intervals)
}

fn check_interior<T: Scalar>(x: &[T], dim: usize) -> Result<()> {
    if x.len() != dim {
        return Err(structural_err!("point has {} coordinates, score has {dim}", x.len()));
    }
    if let Some(v) = x.iter().find(|v| !(**v >= T::zero() && **v < T::one())) {
        return Err(domain_err!("coordinate {v} outside [0,1)"));
    }
    Ok(())
}

/// Dependence part `1 + (-1)^d ∫_{[0,x]} γ dΛ_0^d` with `γ = R_d(g)`, term by term.
pub fn s_dep_from_gamma<T: Scalar>(g: &ScoreFunction<T>, x: &[T]) -> Result<T> {
    check_interior(x, g.dim())?;
    let mut terms = Vec::with_capacity(g.terms().len());
    for t in g.terms() {
        let mut p = t.coef;
        for (f, &xk) in t.factors.iter().zip(x) {
            p = p * hazard_weighted(f, xk, DEP_INTERVALS)?;
        }
        terms.push(p);
    }
    let v = T::one() + sign_pow::<T>(g.dim()) * neumaier_sum(terms);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(numeric_err!("dependence part quadrature is not finite at {x:?}"))
    }
}

/// `1 + (-1)^d ∫_{[0,x]} γ dΛ_0^d` for an arbitrary `γ`, by tensor Simpson
/// quadrature in `v = -log(1-u)` with `intervals` per axis.
pub fn s_dep_from_gamma_fn<T: Scalar>(gamma: impl Fn(&[T]) -> T, x: &[T], intervals: usize) -> Result<T> {
    check_interior(x, x.len())?;
    let d = x.len();
    let upper: Vec<T> = x.iter().map(|&xk| -(-xk).ln_1p()).collect();
    if upper.iter().any(|&u| u == T::zero()) {
        return Ok(T::one());
    }
    let n = intervals + 1;
    let nodes: Vec<Vec<T>> = upper.iter().map(|&u| linspace(T::zero(), u, n)).collect();
    let weights: Vec<Vec<T>> =
        upper.iter().map(|&u| simpson_weights(intervals, u / T::from_usize_lossy(intervals))).collect::<Result<_>>()?;
    let shape = Shape::new(vec![n; d]);
    let mut idx = vec![0; d];
    let mut u = vec![T::zero(); d];
    let mut acc = Vec::with_capacity(shape.len());
    for flat in 0..shape.len() {
        shape.unflat(flat, &mut idx);
        let mut w = T::one();
        for k in 0..d {
            let v = nodes[k][idx[k]];
            u[k] = -(-v).exp_m1();
            w = w * weights[k][idx[k]];
        }
        acc.push(w * gamma(&u));
    }
    let v = T::one() + sign_pow::<T>(d) * neumaier_sum(acc);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(numeric_err!("dependence part quadrature is not finite at {x:?}"))
    }
}

/// Dependence part `1 + ∫_{[x,1]} g dP_0^d / ∏(1-x_i)`.
pub fn s_dep_from_score<T: Scalar>(g: &ScoreFunction<T>, x: &[T]) -> Result<T> {
    check_interior(x, g.dim())?;
    let denom = x.iter().fold(T::one(), |a, &xk| a * (T::one() - xk));
    let v = T::one() + g.tail_integral(x)? / denom;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(numeric_err!("dependence part is not finite at {x:?}"))
    }
}
