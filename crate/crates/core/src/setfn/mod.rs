//! Ground sets, subsets and the set-function oracle interface.

mod families;
mod gramian;
mod tabular;

pub use families::{random_tabular, TabularFamily};
pub use gramian::{GramianModel, GramianObjective, ObjectiveKind};
pub use tabular::TabularFunction;

use serde::Serialize;

use crate::error::{Error, Result};

/// Largest ground set a [`Subset`] can represent.
pub const MAX_GROUND: usize = 64;

/// Absolute tolerance for monotonicity of marginals. Marginals with
/// `|value| <= EPS_MONO` that come out negative are clamped to zero.
pub const EPS_MONO: f64 = 1e-9;

/// Largest ground set that may be fully tabulated.
pub const MAX_TABULATE: usize = 20;

/// A subset of `{0, .., ground-1}` as a bit mask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Subset {
    mask: u64,
    ground: usize,
}

#[inline]
fn full_mask(ground: usize) -> u64 {
    if ground == 64 {
        u64::MAX
    } else {
        (1u64 << ground) - 1
    }
}

impl Subset {
    pub fn empty(ground: usize) -> Self {
        assert!(ground <= MAX_GROUND, "ground set too large");
        Self { mask: 0, ground }
    }

    pub fn full(ground: usize) -> Self {
        assert!(ground <= MAX_GROUND, "ground set too large");
        Self {
            mask: full_mask(ground),
            ground,
        }
    }

    pub fn from_mask(mask: u64, ground: usize) -> Result<Self> {
        if ground > MAX_GROUND {
            return Err(Error::TooLarge {
                ground,
                limit: MAX_GROUND,
            });
        }
        if mask & !full_mask(ground) != 0 {
            return Err(Error::InvalidSubset { mask, ground });
        }
        Ok(Self { mask, ground })
    }

    pub fn from_indices(indices: &[usize], ground: usize) -> Result<Self> {
        let mut s = Self::empty(ground);
        for &i in indices {
            if i >= ground {
                return Err(Error::InvalidSubset {
                    mask: 1u64.checked_shl(i as u32).unwrap_or(u64::MAX),
                    ground,
                });
            }
            s.mask |= 1 << i;
        }
        Ok(s)
    }

    pub(crate) fn from_mask_unchecked(mask: u64, ground: usize) -> Self {
        debug_assert!(mask & !full_mask(ground) == 0);
        Self { mask, ground }
    }

    #[inline]
    pub fn mask(self) -> u64 {
        self.mask
    }

    #[inline]
    pub fn ground(self) -> usize {
        self.ground
    }

    #[inline]
    pub fn len(self) -> usize {
        self.mask.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.mask == 0
    }

    #[inline]
    pub fn contains(self, element: usize) -> bool {
        element < self.ground && self.mask >> element & 1 == 1
    }

    #[inline]
    pub fn with(self, element: usize) -> Self {
        debug_assert!(element < self.ground);
        Self {
            mask: self.mask | 1 << element,
            ground: self.ground,
        }
    }

    #[inline]
    pub fn without(self, element: usize) -> Self {
        Self {
            mask: self.mask & !(1 << element),
            ground: self.ground,
        }
    }

    pub fn union(self, other: Self) -> Self {
        debug_assert_eq!(self.ground, other.ground);
        Self {
            mask: self.mask | other.mask,
            ground: self.ground,
        }
    }

    pub fn intersection(self, other: Self) -> Self {
        Self {
            mask: self.mask & other.mask,
            ground: self.ground,
        }
    }

    pub fn difference(self, other: Self) -> Self {
        Self {
            mask: self.mask & !other.mask,
            ground: self.ground,
        }
    }

    pub fn complement(self) -> Self {
        Self {
            mask: !self.mask & full_mask(self.ground),
            ground: self.ground,
        }
    }

    pub fn is_subset_of(self, other: Self) -> bool {
        self.mask & !other.mask == 0
    }

    /// Elements in increasing order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut m = self.mask;
        std::iter::from_fn(move || {
            if m == 0 {
                None
            } else {
                let i = m.trailing_zeros() as usize;
                m &= m - 1;
                Some(i)
            }
        })
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }
}

/// Value oracle for a set function over `{0, .., ground_size()-1}`.
///
/// Implementations must be pure: repeated calls with the same subset return
/// the same value, from any thread.
pub trait SetFunction: Send + Sync {
    fn ground_size(&self) -> usize;

    fn evaluate(&self, set: Subset) -> Result<f64>;

    /// `f(S ∪ {a}) - f(S)`, with roundoff-level negatives clamped to zero.
    fn marginal(&self, set: Subset, element: usize) -> Result<f64> {
        if set.contains(element) {
            return Ok(0.0);
        }
        let gain = self.evaluate(set.with(element))? - self.evaluate(set)?;
        Ok(clamp_marginal(gain))
    }

    /// Constant subtracted from the raw function to make `f(∅) = 0`.
    fn offset(&self) -> f64 {
        0.0
    }
}

impl<F: SetFunction + ?Sized> SetFunction for &F {
    fn ground_size(&self) -> usize {
        (**self).ground_size()
    }
    fn evaluate(&self, set: Subset) -> Result<f64> {
        (**self).evaluate(set)
    }
    fn marginal(&self, set: Subset, element: usize) -> Result<f64> {
        (**self).marginal(set, element)
    }
    fn offset(&self) -> f64 {
        (**self).offset()
    }
}

impl<F: SetFunction + ?Sized> SetFunction for Box<F> {
    fn ground_size(&self) -> usize {
        (**self).ground_size()
    }
    fn evaluate(&self, set: Subset) -> Result<f64> {
        (**self).evaluate(set)
    }
    fn marginal(&self, set: Subset, element: usize) -> Result<f64> {
        (**self).marginal(set, element)
    }
    fn offset(&self) -> f64 {
        (**self).offset()
    }
}

#[inline]
pub fn clamp_marginal(gain: f64) -> f64 {
    if (-EPS_MONO..0.0).contains(&gain) {
        0.0
    } else {
        gain
    }
}

/// `f_S(T) = f(S ∪ T) - f(S)`.
pub fn marginal_set(f: &dyn SetFunction, set: Subset, other: Subset) -> Result<f64> {
    let joined = set.union(other);
    if joined == set {
        return Ok(0.0);
    }
    Ok(f.evaluate(joined)? - f.evaluate(set)?)
}

/// `f(S) = Σ_{s∈S} w_s`.
#[derive(Debug, Clone, PartialEq)]
pub struct Modular {
    weights: Vec<f64>,
}

impl Modular {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.len() > MAX_GROUND {
            return Err(Error::TooLarge {
                ground: weights.len(),
                limit: MAX_GROUND,
            });
        }
        if let Some((i, w)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !(**w >= 0.0) || !w.is_finite())
        {
            return Err(Error::InvalidParameter(format!(
                "modular weight {i} must be non-negative and finite, got {w}"
            )));
        }
        Ok(Self { weights })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

impl SetFunction for Modular {
    fn ground_size(&self) -> usize {
        self.weights.len()
    }

    fn evaluate(&self, set: Subset) -> Result<f64> {
        Ok(set.iter().map(|i| self.weights[i]).sum())
    }

    fn marginal(&self, set: Subset, element: usize) -> Result<f64> {
        Ok(if set.contains(element) {
            0.0
        } else {
            self.weights[element]
        })
    }
}

/// `c · f` for a positive constant `c`.
pub struct Scaled<F> {
    pub inner: F,
    pub factor: f64,
}

impl<F: SetFunction> SetFunction for Scaled<F> {
    fn ground_size(&self) -> usize {
        self.inner.ground_size()
    }
    fn evaluate(&self, set: Subset) -> Result<f64> {
        Ok(self.factor * self.inner.evaluate(set)?)
    }
    fn offset(&self) -> f64 {
        self.factor * self.inner.offset()
    }
}

/// Every value of a set function, indexed by subset mask.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    ground: usize,
    values: Vec<f64>,
    offset: f64,
}

impl Table {
    /// Evaluates `f` on all `2^N` subsets (in parallel; the result does not
    /// depend on scheduling).
    pub fn tabulate(f: &dyn SetFunction) -> Result<Self> {
        use rayon::prelude::*;
        let ground = f.ground_size();
        if ground > MAX_TABULATE {
            return Err(Error::TooLarge {
                ground,
                limit: MAX_TABULATE,
            });
        }
        let values = (0..1u64 << ground)
            .into_par_iter()
            .map(|mask| f.evaluate(Subset::from_mask_unchecked(mask, ground)))
            .collect::<Result<Vec<f64>>>()?;
        Ok(Self {
            ground,
            values,
            offset: f.offset(),
        })
    }

    #[cfg(test)]
    pub(crate) fn from_values(ground: usize, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), 1 << ground);
        Self {
            ground,
            values,
            offset: 0.0,
        }
    }

    pub fn ground(&self) -> usize {
        self.ground
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn value(&self, mask: u64) -> f64 {
        self.values[mask as usize]
    }

    /// Clamped marginal `f_S(a)` by mask.
    #[inline]
    pub fn gain(&self, mask: u64, element: usize) -> f64 {
        let bit = 1u64 << element;
        if mask & bit != 0 {
            return 0.0;
        }
        clamp_marginal(self.values[(mask | bit) as usize] - self.values[mask as usize])
    }

    /// First `(S, a)` with `f_S(a) < -tol`, if any.
    pub fn monotonicity_violation(&self, tol: f64) -> Option<(u64, usize, f64)> {
        for mask in 0..self.values.len() as u64 {
            for a in 0..self.ground {
                let bit = 1u64 << a;
                if mask & bit == 0 {
                    let d = self.values[(mask | bit) as usize] - self.values[mask as usize];
                    if d < -tol {
                        return Some((mask, a, d));
                    }
                }
            }
        }
        None
    }
}

impl SetFunction for Table {
    fn ground_size(&self) -> usize {
        self.ground
    }
    fn evaluate(&self, set: Subset) -> Result<f64> {
        Ok(self.value(set.mask()))
    }
    fn marginal(&self, set: Subset, element: usize) -> Result<f64> {
        Ok(self.gain(set.mask(), element))
    }
    fn offset(&self) -> f64 {
        self.offset
    }
}

/// Elements chosen in order, with the gain each one contributed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderedSelection {
    ground: usize,
    elements: Vec<usize>,
    gains: Vec<f64>,
}

impl OrderedSelection {
    pub fn new(ground: usize) -> Self {
        Self {
            ground,
            elements: Vec::new(),
            gains: Vec::new(),
        }
    }

    pub fn push(&mut self, element: usize, gain: f64) -> Result<()> {
        if element >= self.ground || self.elements.contains(&element) {
            return Err(Error::InvalidParameter(format!(
                "element {element} is out of range or already selected"
            )));
        }
        self.elements.push(element);
        self.gains.push(gain);
        Ok(())
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    /// `A(i)` for `i = 1..=len`, stored zero-based.
    pub fn gains(&self) -> &[f64] {
        &self.gains
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn ground(&self) -> usize {
        self.ground
    }

    /// `S_G^i`, the first `i` elements.
    pub fn prefix(&self, i: usize) -> Subset {
        let mut s = Subset::empty(self.ground);
        for &e in &self.elements[..i] {
            s = s.with(e);
        }
        s
    }

    pub fn as_subset(&self) -> Subset {
        self.prefix(self.len())
    }

    /// `f(S_G^i)` by telescoping the gains.
    pub fn prefix_value(&self, i: usize) -> f64 {
        self.gains[..i].iter().sum()
    }

    pub fn value(&self) -> f64 {
        self.prefix_value(self.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tab3() -> TabularFunction {
        TabularFunction::new(3, vec![0.0, 3.0, 2.0, 3.5, 2.0, 3.5, 5.0, 5.5]).unwrap()
    }

    #[test]
    fn subset_ops() {
        let s = Subset::from_indices(&[0, 2], 4).unwrap();
        assert_eq!(s.mask(), 0b101);
        assert_eq!(s.len(), 2);
        assert!(s.contains(2) && !s.contains(1));
        assert_eq!(s.complement().to_vec(), vec![1, 3]);
        assert_eq!(s.with(1).without(0).to_vec(), vec![1, 2]);
        assert!(Subset::from_mask(0b10000, 4).is_err());
        assert!(Subset::from_indices(&[4], 4).is_err());
        assert_eq!(Subset::full(64).len(), 64);
    }

    #[test]
    fn marginal_set_cases() {
        let f = tab3();
        let s0 = Subset::from_indices(&[0], 3).unwrap();
        let t = Subset::from_indices(&[1, 2], 3).unwrap();
        assert_eq!(marginal_set(&f, s0, s0).unwrap(), 0.0);
        assert_eq!(marginal_set(&f, Subset::empty(3), t).unwrap(), 5.0);
        assert_eq!(marginal_set(&f, s0, t).unwrap(), 5.5 - 3.0);
    }

    #[test]
    fn modular_values() {
        let f = Modular::new(vec![1.0, 2.0, 3.0]).unwrap();
        let s = Subset::from_indices(&[0, 2], 3).unwrap();
        assert_eq!(f.evaluate(s).unwrap(), 4.0);
        assert_eq!(f.evaluate(Subset::empty(3)).unwrap(), 0.0);
        assert!(Modular::new(vec![1.0, -0.5]).is_err());
    }

    #[test]
    fn clamp_only_roundoff() {
        assert_eq!(clamp_marginal(-1e-12), 0.0);
        assert_eq!(clamp_marginal(-1e-6), -1e-6);
        assert_eq!(clamp_marginal(0.25), 0.25);
    }

    #[test]
    fn table_matches_oracle() {
        let f = tab3();
        let t = Table::tabulate(&f).unwrap();
        assert_eq!(t.values(), f.values());
        assert_eq!(t.gain(0b001, 1), 0.5);
        assert_eq!(t.gain(0b001, 0), 0.0);
    }

    #[test]
    fn ordered_selection_prefixes() {
        let mut sel = OrderedSelection::new(4);
        sel.push(2, 1.5).unwrap();
        sel.push(0, 0.5).unwrap();
        assert!(sel.push(2, 0.1).is_err());
        assert_eq!(sel.prefix(0), Subset::empty(4));
        assert_eq!(sel.prefix(1).to_vec(), vec![2]);
        assert_eq!(sel.value(), 2.0);
    }
}
