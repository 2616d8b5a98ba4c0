use crate::ltl::Alphabet;
use crate::{Error, Real, Result};

/// Axis-aligned half-open box `[lo, hi)`; bounds may be infinite.
#[derive(Clone, Debug, PartialEq)]
pub struct Interval<T> {
    pub lo: Vec<T>,
    pub hi: Vec<T>,
}

impl<T: Real> Interval<T> {
    pub fn new(lo: Vec<T>, hi: Vec<T>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::Shape(format!("box bounds of length {} and {}", lo.len(), hi.len())));
        }
        if lo.iter().chain(&hi).any(|x| x.is_nan()) {
            return Err(Error::InvalidArgument("NaN box bound".into()));
        }
        Ok(Self { lo, hi })
    }

    pub fn universe(dim: usize) -> Self {
        Self { lo: vec![T::neg_infinity(); dim], hi: vec![T::infinity(); dim] }
    }

    /// Box constraining only dimension `k`.
    pub fn slab(dim: usize, k: usize, lo: T, hi: T) -> Self {
        let mut b = Self::universe(dim);
        b.lo[k] = lo;
        b.hi[k] = hi;
        b
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lo.iter().zip(&self.hi).any(|(l, h)| l >= h)
    }

    pub fn contains(&self, s: &[T]) -> bool {
        self.contains_inflated(s, T::zero())
    }

    /// Whether `s` is within infinity-norm distance `r` of the box, i.e. in
    /// `[lo - r, hi + r)` per dimension.
    pub fn contains_inflated(&self, s: &[T], r: T) -> bool {
        s.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(&x, (&l, &h))| x >= l - r && x < h + r)
    }

    pub fn intersect(&self, o: &Self) -> Self {
        Self {
            lo: self.lo.iter().zip(&o.lo).map(|(&a, &b)| a.max(b)).collect(),
            hi: self.hi.iter().zip(&o.hi).map(|(&a, &b)| a.min(b)).collect(),
        }
    }

    /// `self \ o` as disjoint boxes.
    pub fn subtract(&self, o: &Self) -> Vec<Self> {
        let cut = self.intersect(o);
        if cut.is_empty() {
            return vec![self.clone()];
        }
        let mut out = Vec::new();
        let mut rest = self.clone();
        for k in 0..self.dim() {
            if rest.lo[k] < cut.lo[k] {
                let mut piece = rest.clone();
                piece.hi[k] = cut.lo[k];
                out.push(piece);
                rest.lo[k] = cut.lo[k];
            }
            if cut.hi[k] < rest.hi[k] {
                let mut piece = rest.clone();
                piece.lo[k] = cut.hi[k];
                out.push(piece);
                rest.hi[k] = cut.hi[k];
            }
        }
        out
    }

    pub fn is_subset_of_union(&self, boxes: &[Self]) -> bool {
        let mut rest = vec![self.clone()];
        for b in boxes {
            rest = rest.iter().flat_map(|r| r.subtract(b)).collect();
        }
        rest.iter().all(Self::is_empty)
    }
}

/// Labelling `Λ` induced by one region per proposition. The letter of a state
/// is the set of propositions whose region contains it; letters are indexed
/// as in [`Alphabet::powerset`] (first proposition is the most significant
/// bit), so letter sets fit a `u64` mask.
#[derive(Clone, Debug, PartialEq)]
pub struct Labeling<T> {
    dim: usize,
    alphabet: Alphabet,
    regions: Vec<Vec<Interval<T>>>,
    cells: Vec<Vec<Interval<T>>>,
}

impl<T: Real> Labeling<T> {
    /// `regions[k]` is the union of boxes where proposition `props[k]` holds.
    pub fn new(dim: usize, props: Vec<String>, regions: Vec<Vec<Interval<T>>>) -> Result<Self> {
        if props.len() != regions.len() {
            return Err(Error::Shape(format!(
                "{} propositions but {} regions",
                props.len(),
                regions.len()
            )));
        }
        if regions.iter().flatten().any(|b| b.dim() != dim) {
            return Err(Error::Shape(format!("region box dimension differs from {dim}")));
        }
        let alphabet = Alphabet::powerset(props)?;
        let n = alphabet.propositions().len();
        let mut cells = Vec::with_capacity(alphabet.len());
        for id in 0..alphabet.len() {
            let mut cell = vec![Interval::universe(dim)];
            for (k, region) in regions.iter().enumerate() {
                let holds = id >> (n - 1 - k) & 1 == 1;
                cell = if holds {
                    cell.iter()
                        .flat_map(|c| region.iter().map(move |b| c.intersect(b)))
                        .filter(|b| !b.is_empty())
                        .collect()
                } else {
                    let mut rest = cell;
                    for b in region {
                        rest = rest.iter().flat_map(|c| c.subtract(b)).collect();
                    }
                    rest.into_iter().filter(|b| !b.is_empty()).collect()
                };
            }
            cells.push(cell);
        }
        Ok(Self { dim, alphabet, regions, cells })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn propositions(&self) -> &[String] {
        self.alphabet.propositions()
    }

    pub fn num_letters(&self) -> usize {
        self.alphabet.len()
    }

    pub fn regions(&self) -> &[Vec<Interval<T>>] {
        &self.regions
    }

    /// Disjoint boxes making up the cell of letter `id`; empty when no state
    /// carries that letter.
    pub fn cell(&self, id: usize) -> &[Interval<T>] {
        &self.cells[id]
    }

    /// Index of `Λ(s)`.
    pub fn label(&self, s: &[T]) -> usize {
        let n = self.regions.len();
        self.regions
            .iter()
            .enumerate()
            .filter(|(_, r)| r.iter().any(|b| b.contains(s)))
            .fold(0, |id, (k, _)| id | 1 << (n - 1 - k))
    }

    /// `Λ_r(s)` as a mask over letter indices: every letter whose cell,
    /// inflated by `r` in the infinity norm, contains `s`.
    pub fn relaxed_label(&self, r: T, s: &[T]) -> Result<u64> {
        if r < T::zero() || r.is_nan() {
            return Err(Error::InvalidArgument(format!("relaxation radius {r} is negative")));
        }
        if r == T::zero() {
            return Ok(1 << self.label(s));
        }
        let mut mask = 0;
        for (id, cell) in self.cells.iter().enumerate() {
            if cell.iter().any(|b| b.contains_inflated(s, r)) {
                mask |= 1 << id;
            }
        }
        Ok(mask)
    }

    /// Whether every region of `self` contains the matching region of
    /// `other` (same propositions in the same order).
    pub fn contains_regions_of(&self, other: &Self) -> bool {
        self.propositions() == other.propositions()
            && self
                .regions
                .iter()
                .zip(&other.regions)
                .all(|(mine, theirs)| theirs.iter().all(|b| b.is_subset_of_union(mine)))
    }

    /// Labelling of a finite state space embedded as `[i, i+1)` on one axis;
    /// `letters[i]` lists the propositions holding in state `i`.
    pub fn for_finite_states(props: Vec<String>, letters: &[Vec<&str>]) -> Result<Self> {
        let regions = props
            .iter()
            .map(|p| {
                letters
                    .iter()
                    .enumerate()
                    .filter(|(_, l)| l.contains(&p.as_str()))
                    .map(|(i, _)| Interval::slab(1, 0, T::lit(i as f64), T::lit(i as f64 + 1.0)))
                    .collect()
            })
            .collect();
        Self::new(1, props, regions)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cartpole_like() -> Labeling<f64> {
        let inf = f64::INFINITY;
        let deg = 12f64.to_radians();
        Labeling::new(
            4,
            vec!["a".into(), "c1".into(), "c2".into()],
            vec![
                vec![Interval::slab(4, 0, 0.4, 1.0)],
                vec![Interval::slab(4, 0, -1.0, 1.0)],
                vec![Interval::new(vec![-inf, -inf, -deg, -inf], vec![inf, inf, deg, inf]).unwrap()],
            ],
        )
        .unwrap()
    }

    #[test]
    fn cells_partition() {
        let lab = cartpole_like();
        // a without c1 is geometrically impossible.
        assert!(lab.cell(0b101).is_empty());
        assert!(lab.cell(0b100).is_empty());
        assert!(!lab.cell(0b110).is_empty());
        assert!(!lab.cell(0b111).is_empty());
        for s in [[0.5, 0.0, 0.0, 0.0], [-2.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 0.0]] {
            let hits: Vec<_> = (0..8)
                .filter(|&id| lab.cell(id).iter().any(|b| b.contains(&s)))
                .collect();
            assert_eq!(hits, vec![lab.label(&s)]);
        }
    }

    #[test]
    fn base_case_is_singleton() {
        let lab = cartpole_like();
        let s = [0.5, 0.0, 0.0, 0.0];
        assert_eq!(lab.label(&s), 0b111);
        assert_eq!(lab.relaxed_label(0.0, &s).unwrap(), 1 << 0b111);
    }

    #[test]
    fn inflation_of_reach_set() {
        let lab = cartpole_like();
        let has_a = |mask: u64| (0..8).any(|id| id & 0b100 != 0 && mask >> id & 1 == 1);
        assert!(has_a(lab.relaxed_label(0.39, &[0.02, 0.0, 0.0, 0.0]).unwrap()));
        assert!(!has_a(lab.relaxed_label(0.39, &[0.005, 0.0, 0.0, 0.0]).unwrap()));
        assert!(lab.relaxed_label(-0.1, &[0.0; 4]).is_err());
    }

    #[test]
    fn subtraction_is_exact() {
        let outer = Interval::<f64>::new(vec![0.0, 0.0], vec![4.0, 4.0]).unwrap();
        let inner = Interval::new(vec![1.0, 1.0], vec![2.0, 3.0]).unwrap();
        let pieces = outer.subtract(&inner);
        let area = |b: &Interval<f64>| (b.hi[0] - b.lo[0]) * (b.hi[1] - b.lo[1]);
        let total: f64 = pieces.iter().map(area).sum();
        assert_eq!(total, 16.0 - 2.0);
        assert!(inner.is_subset_of_union(&[outer.clone()]));
        assert!(!outer.is_subset_of_union(&pieces));
    }
}
