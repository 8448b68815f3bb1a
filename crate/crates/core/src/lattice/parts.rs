use std::collections::BTreeMap;

use rayon::prelude::*;

use super::grid::{GridSpec, Shape};
use super::index_set::IndexSet;
use super::oracle::SurvivalOracle;
use crate::error::{domain_err, structural_err, Result};
use crate::scalar::{neumaier_sum, sign_pow, Scalar};

/// What the entries of a [`PartTable`] hold.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PartKind {
    /// Dependence parts `S_I`, stored as `log S_I`.
    Part,
    /// Exponents `Λ_I = (-1)^{|I|} log S_I`.
    Exponent,
}

/// Dependence parts or exponents of `S^J` evaluated on a grid.
///
/// The grid has one axis per member of `J`, in increasing axis order. The
/// entry for `I ⊆ J` is a row-major array over the axes of `I`.
#[derive(Clone, Debug, PartialEq)]
pub struct PartTable<T> {
    grid: GridSpec<T>,
    j: IndexSet,
    kind: PartKind,
    entries: BTreeMap<IndexSet, Vec<T>>,
}

impl<T: Scalar> PartTable<T> {
    /// Builds a table from raw `S_I` values; every value must be positive.
    pub fn from_parts(grid: GridSpec<T>, j: IndexSet, parts: BTreeMap<IndexSet, Vec<T>>) -> Result<Self> {
        let grid = sub_grid(&grid, j)?;
        let mut entries = BTreeMap::new();
        for (i, values) in parts {
            check_entry(&grid, j, i, values.len())?;
            let logs = values
                .iter()
                .enumerate()
                .map(|(k, &v)| {
                    if v > T::zero() && v.is_finite() {
                        Ok(v.ln())
                    } else {
                        Err(domain_err!("part S_{i} has nonpositive value {v} at node {k}"))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            entries.insert(i, logs);
        }
        Ok(Self { grid, j, kind: PartKind::Part, entries })
    }

    /// Builds a table from `Λ_I` values; every value must be finite.
    pub fn from_exponents(grid: GridSpec<T>, j: IndexSet, exps: BTreeMap<IndexSet, Vec<T>>) -> Result<Self> {
        let grid = sub_grid(&grid, j)?;
        for (&i, values) in &exps {
            check_entry(&grid, j, i, values.len())?;
            if let Some(k) = values.iter().position(|v| !v.is_finite()) {
                return Err(domain_err!("exponent Λ_{i} is not finite at node {k}"));
            }
        }
        Ok(Self { grid, j, kind: PartKind::Exponent, entries: exps })
    }

    pub fn grid(&self) -> &GridSpec<T> {
        &self.grid
    }

    pub fn subset(&self) -> IndexSet {
        self.j
    }

    pub fn kind(&self) -> PartKind {
        self.kind
    }

    /// Index sets present, in lattice order.
    pub fn index_sets(&self) -> impl Iterator<Item = IndexSet> + '_ {
        self.entries.keys().copied()
    }

    /// Raw stored values: `log S_I` for parts, `Λ_I` for exponents.
    pub fn raw(&self, i: IndexSet) -> Option<&[T]> {
        self.entries.get(&i).map(Vec::as_slice)
    }

    /// `log S_I` regardless of kind.
    pub fn log_part(&self, i: IndexSet) -> Option<Vec<T>> {
        let raw = self.raw(i)?;
        Some(match self.kind {
            PartKind::Part => raw.to_vec(),
            PartKind::Exponent => {
                let s = sign_pow::<T>(i.len());
                raw.iter().map(|&v| s * v).collect()
            }
        })
    }

    /// `S_I` values.
    pub fn part(&self, i: IndexSet) -> Option<Vec<T>> {
        self.log_part(i).map(|v| v.into_iter().map(T::exp).collect())
    }

    /// `Λ_I` values regardless of kind.
    pub fn exponent(&self, i: IndexSet) -> Option<Vec<T>> {
        let s = sign_pow::<T>(i.len());
        self.log_part(i).map(|v| v.into_iter().map(|x| s * x).collect())
    }

    /// Shape of the array for `I`.
    pub fn shape(&self, i: IndexSet) -> Shape {
        shape_of(&self.grid, self.j, i)
    }

    /// Coordinates of node `flat` of the array for `I`.
    pub fn point(&self, i: IndexSet, flat: usize) -> Vec<T> {
        let shape = self.shape(i);
        let mut idx = vec![0; i.len()];
        shape.unflat(flat, &mut idx);
        let ranks = ranks_in(self.j, i);
        idx.iter().zip(&ranks).map(|(&k, &r)| self.grid.axis(r)[k]).collect()
    }

    /// Value of the stored array for `I` at multi-index `idx` (one entry per member of `I`).
    pub fn value_at(&self, i: IndexSet, idx: &[usize]) -> Option<T> {
        let raw = self.raw(i)?;
        Some(raw[self.shape(i).flat(idx)])
    }
}

/// Dependence parts `{S_I}_{∅≠I⊆J}` of `S^J` on `grid`.
///
/// `grid` may have one axis per model dimension (axes outside `J` are
/// ignored) or one axis per member of `J`. The parts satisfy
/// `log S_I(t_I) = Σ_{∅≠K⊆I} (-1)^{|I|-|K|} log S^K(t_K)`.
pub fn factorize<T: Scalar, O: SurvivalOracle<T> + ?Sized>(oracle: &O, j: IndexSet, grid: &GridSpec<T>) -> Result<PartTable<T>> {
    j.ensure_nonempty()?;
    if j.dim() != oracle.dim() {
        return Err(structural_err!("index set {j} is for dimension {}, model has dimension {}", j.dim(), oracle.dim()));
    }
    let grid = sub_grid(grid, j)?;
    let subsets = j.nonempty_subsets();

    let mut marginals: BTreeMap<IndexSet, Vec<T>> = BTreeMap::new();
    for &k in &subsets {
        let shape = shape_of(&grid, j, k);
        let ranks = ranks_in(j, k);
        let values = (0..shape.len())
            .into_par_iter()
            .map(|flat| {
                let x = node(&grid, &shape, &ranks, flat);
                let log_s = oracle.marginal_log_survival(k, &x);
                if log_s.is_finite() {
                    Ok(log_s)
                } else {
                    Err(domain_err!("survival S^{k} is not positive at {}", fmt_point(&x)))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        marginals.insert(k, values);
    }

    let mut entries = BTreeMap::new();
    for &i in &subsets {
        let shape = shape_of(&grid, j, i);
        let i_axes = i.to_axes();
        let inner: Vec<(IndexSet, T, Shape, Vec<usize>)> = i
            .nonempty_subsets()
            .into_iter()
            .map(|k| {
                let pos: Vec<usize> = k.axes().map(|a| i_axes.iter().position(|&b| b == a).unwrap()).collect();
                (k, sign_pow::<T>(i.len() - k.len()), shape_of(&grid, j, k), pos)
            })
            .collect();
        let values: Vec<T> = (0..shape.len())
            .into_par_iter()
            .map_init(
                || (vec![0usize; i.len()], vec![0usize; i.len()]),
                |(idx, sub), flat| {
                    shape.unflat(flat, idx);
                    neumaier_sum(inner.iter().map(|(k, sign, kshape, pos)| {
                        for (slot, &p) in pos.iter().enumerate() {
                            sub[slot] = idx[p];
                        }
                        *sign * marginals[k][kshape.flat(&sub[..pos.len()])]
                    }))
                },
            )
            .collect();
        entries.insert(i, values);
    }
    Ok(PartTable { grid, j, kind: PartKind::Part, entries })
}

/// Converts a table of parts into exponents `Λ_I = (-1)^{|I|} log S_I`.
pub fn exponent_of_parts<T: Scalar>(parts: &PartTable<T>) -> Result<PartTable<T>> {
    if parts.kind != PartKind::Part {
        return Err(structural_err!("table already holds exponents"));
    }
    let entries = parts
        .entries
        .iter()
        .map(|(&i, logs)| {
            let s = sign_pow::<T>(i.len());
            (i, logs.iter().map(|&v| s * v).collect())
        })
        .collect();
    Ok(PartTable { grid: parts.grid.clone(), j: parts.j, kind: PartKind::Exponent, entries })
}

/// `log S^J = Σ_{∅≠I⊆J} log S_I` over the axes of `J`, row-major.
pub fn recompose_log<T: Scalar>(parts: &PartTable<T>, j: IndexSet) -> Result<Vec<T>> {
    j.ensure_nonempty()?;
    if !j.is_subset_of(parts.j) || j.dim() != parts.j.dim() {
        return Err(structural_err!("subset {j} is not covered by a table over {}", parts.j));
    }
    let subsets = j.nonempty_subsets();
    let logs: Vec<(IndexSet, Vec<T>)> = subsets
        .iter()
        .map(|&i| parts.log_part(i).map(|v| (i, v)).ok_or_else(|| structural_err!("missing dependence part for {i}")))
        .collect::<Result<_>>()?;
    let shape = shape_of(&parts.grid, parts.j, j);
    let j_axes = j.to_axes();
    let plans: Vec<(Shape, Vec<usize>)> = subsets
        .iter()
        .map(|&i| {
            let pos = i.axes().map(|a| j_axes.iter().position(|&b| b == a).unwrap()).collect();
            (shape_of(&parts.grid, parts.j, i), pos)
        })
        .collect();
    Ok((0..shape.len())
        .into_par_iter()
        .map_init(
            || (vec![0usize; j.len()], vec![0usize; j.len()]),
            |(idx, sub), flat| {
                shape.unflat(flat, idx);
                neumaier_sum(logs.iter().zip(&plans).map(|((_, v), (ishape, pos))| {
                    for (slot, &p) in pos.iter().enumerate() {
                        sub[slot] = idx[p];
                    }
                    v[ishape.flat(&sub[..pos.len()])]
                }))
            },
        )
        .collect())
}

/// `S^J = ∏_{∅≠I⊆J} S_I` over the axes of `J`, row-major.
pub fn recompose<T: Scalar>(parts: &PartTable<T>, j: IndexSet) -> Result<Vec<T>> {
    Ok(recompose_log(parts, j)?.into_iter().map(T::exp).collect())
}

/// Evaluates `log S^J` of an oracle directly on the axes of `J`, for comparison with [`recompose`].
pub fn marginal_log_on_grid<T: Scalar, O: SurvivalOracle<T> + ?Sized>(
    oracle: &O,
    j: IndexSet,
    grid: &GridSpec<T>,
) -> Result<Vec<T>> {
    let grid = sub_grid(grid, j)?;
    let shape = shape_of(&grid, j, j);
    let ranks = ranks_in(j, j);
    Ok((0..shape.len()).into_par_iter().map(|flat| oracle.marginal_log_survival(j, &node(&grid, &shape, &ranks, flat))).collect())
}

fn sub_grid<T: Scalar>(grid: &GridSpec<T>, j: IndexSet) -> Result<GridSpec<T>> {
    if grid.dim() == j.len() {
        Ok(grid.clone())
    } else if grid.dim() == j.dim() {
        Ok(grid.restrict(&j.to_axes()))
    } else {
        Err(structural_err!("grid has {} axes; expected {} (model) or {} (subset {j})", grid.dim(), j.dim(), j.len()))
    }
}

fn check_entry<T: Scalar>(grid: &GridSpec<T>, j: IndexSet, i: IndexSet, len: usize) -> Result<()> {
    i.ensure_nonempty()?;
    if !i.is_subset_of(j) || i.dim() != j.dim() {
        return Err(structural_err!("entry {i} is not a subset of {j}"));
    }
    let expected = shape_of(grid, j, i).len();
    if len != expected {
        return Err(structural_err!("entry {i} has {len} values, grid needs {expected}"));
    }
    Ok(())
}

/// Positions of the members of `i` among the members of `j`.
fn ranks_in(j: IndexSet, i: IndexSet) -> Vec<usize> {
    i.axes().map(|a| j.rank_of(a).expect("subset")).collect()
}

fn shape_of<T: Scalar>(grid: &GridSpec<T>, j: IndexSet, i: IndexSet) -> Shape {
    Shape::new(ranks_in(j, i).into_iter().map(|r| grid.axis(r).len()).collect())
}

fn node<T: Scalar>(grid: &GridSpec<T>, shape: &Shape, ranks: &[usize], flat: usize) -> Vec<T> {
    let mut idx = vec![0; ranks.len()];
    shape.unflat(flat, &mut idx);
    idx.iter().zip(ranks).map(|(&k, &r)| grid.axis(r)[k]).collect()
}

fn fmt_point<T: Scalar>(x: &[T]) -> String {
    let parts: Vec<String> = x.iter().map(|v| format!("{v}")).collect();
    format!("({})", parts.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::oracle::{FnOracle, Support};

    fn clayton() -> FnOracle<impl Fn(&[f64]) -> f64 + Sync> {
        FnOracle::new(2, Support::Orthant, |x: &[f64]| 1.0 / (1.0 + x[0] + x[1]))
    }

    #[test]
    fn clayton_part_at_one_one() {
        let grid =
            GridSpec::new(vec![vec![0.0, 1.0], vec![0.0, 1.0]], crate::lattice::GridDomain::Orthant { upper: 2.0 }).unwrap();
        let j = IndexSet::full(2).unwrap();
        let parts = factorize(&clayton(), j, &grid).unwrap();
        let s12 = parts.part(j).unwrap();
        assert!((s12[3] - 4.0 / 3.0).abs() < 1e-14);
        assert!((s12[0] - 1.0).abs() < 1e-15);
        let exps = exponent_of_parts(&parts).unwrap();
        assert!((exps.raw(j).unwrap()[3] - (4.0f64 / 3.0).ln()).abs() < 1e-14);
        let s = recompose(&parts, j).unwrap();
        assert!((s[3] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn independence_has_trivial_parts() {
        let o = FnOracle::new(3, Support::Orthant, |x: &[f64]| (-x[0] - 2.0 * x[1] - 0.5 * x[2]).exp());
        let grid = GridSpec::orthant(3, 5, 2.0).unwrap();
        let full = IndexSet::full(3).unwrap();
        let parts = factorize(&o, full, &grid).unwrap();
        for i in full.nonempty_subsets().into_iter().filter(|i| i.len() >= 2) {
            assert!(parts.raw(i).unwrap().iter().all(|v| v.abs() < 1e-15));
        }
    }

    #[test]
    fn single_axis_returns_marginal() {
        let o = FnOracle::new(2, Support::Orthant, |x: &[f64]| 1.0 / (1.0 + x[0] + x[1]));
        let j = IndexSet::singleton(2, 1).unwrap();
        let grid = GridSpec::orthant(2, 4, 3.0).unwrap();
        let parts = factorize(&o, j, &grid).unwrap();
        assert_eq!(parts.index_sets().count(), 1);
        let lam = parts.exponent(j).unwrap();
        assert!((lam[3] - 4.0f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn zero_survival_is_a_domain_error() {
        let o = FnOracle::new(2, Support::Orthant, |x: &[f64]| if x[0] > 1.5 { 0.0 } else { 1.0 });
        let grid = GridSpec::orthant(2, 3, 2.0).unwrap();
        let err = factorize(&o, IndexSet::full(2).unwrap(), &grid).unwrap_err();
        assert!(matches!(err, crate::error::Error::Domain(ref m) if m.contains("(2)")));
    }

    #[test]
    fn missing_entry_is_reported() {
        let grid = GridSpec::orthant(2, 2, 1.0).unwrap();
        let j = IndexSet::full(2).unwrap();
        let mut parts = BTreeMap::new();
        parts.insert(IndexSet::singleton(2, 0).unwrap(), vec![1.0, 0.5]);
        let table = PartTable::from_parts(grid, j, parts).unwrap();
        let err = recompose(&table, j).unwrap_err();
        assert!(err.to_string().contains("{2}"));
    }

    #[test]
    fn nonpositive_part_rejected() {
        let grid = GridSpec::orthant(1, 2, 1.0).unwrap();
        let j = IndexSet::full(1).unwrap();
        let mut parts = BTreeMap::new();
        parts.insert(j, vec![1.0, -0.5]);
        assert!(PartTable::from_parts(grid, j, parts).is_err());
    }
}
