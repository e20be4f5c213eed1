use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use super::{Interval, IntervalError};

/// A finite-dimensional box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IntervalVector {
    entries: Vec<Interval>,
}

fn check_dims(a: usize, b: usize, what: &str) -> Result<(), IntervalError> {
    if a == b {
        Ok(())
    } else {
        Err(IntervalError::ShapeMismatch(format!("{what}: {a} vs {b}")))
    }
}

impl IntervalVector {
    pub fn new(entries: Vec<Interval>) -> Result<Self, IntervalError> {
        if entries.is_empty() {
            return Err(IntervalError::ShapeMismatch("empty vector".into()));
        }
        Ok(IntervalVector { entries })
    }

    pub fn from_points(xs: &[f64]) -> Self {
        IntervalVector::new(xs.iter().map(|&x| Interval::point(x)).collect()).expect("non-empty")
    }

    pub fn zeros(n: usize) -> Self {
        IntervalVector::new(vec![Interval::ZERO; n]).expect("non-empty")
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Interval] {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = &Interval> {
        self.entries.iter()
    }

    pub fn mid(&self) -> Vec<f64> {
        self.entries.iter().map(|x| x.mid()).collect()
    }

    pub fn add(&self, o: &IntervalVector) -> Result<IntervalVector, IntervalError> {
        check_dims(self.dim(), o.dim(), "add")?;
        Ok(IntervalVector { entries: self.entries.iter().zip(&o.entries).map(|(a, b)| *a + *b).collect() })
    }

    pub fn sub(&self, o: &IntervalVector) -> Result<IntervalVector, IntervalError> {
        check_dims(self.dim(), o.dim(), "sub")?;
        Ok(IntervalVector { entries: self.entries.iter().zip(&o.entries).map(|(a, b)| *a - *b).collect() })
    }

    pub fn scale(&self, k: Interval) -> IntervalVector {
        IntervalVector { entries: self.entries.iter().map(|a| *a * k).collect() }
    }

    pub fn dot(&self, o: &IntervalVector) -> Result<Interval, IntervalError> {
        check_dims(self.dim(), o.dim(), "dot")?;
        Ok(self.entries.iter().zip(&o.entries).map(|(a, b)| *a * *b).sum())
    }

    /// Enclosure of the Euclidean norm.
    pub fn norm2(&self) -> Interval {
        let s: Interval = self.entries.iter().map(|a| a.sqr()).sum();
        s.sqrt().expect("sum of squares is nonnegative")
    }

    pub fn hull(&self, o: &IntervalVector) -> Result<IntervalVector, IntervalError> {
        check_dims(self.dim(), o.dim(), "hull")?;
        Ok(IntervalVector { entries: self.entries.iter().zip(&o.entries).map(|(a, b)| a.hull(*b)).collect() })
    }

    pub fn subset(&self, o: &IntervalVector) -> bool {
        self.dim() == o.dim() && self.entries.iter().zip(&o.entries).all(|(a, b)| a.subset(*b))
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.dim() == x.len() && self.entries.iter().zip(x).all(|(a, &b)| a.contains(b))
    }

    pub fn max_width(&self) -> f64 {
        self.entries.iter().map(|a| a.width()).fold(0.0, f64::max)
    }
}

impl Index<usize> for IntervalVector {
    type Output = Interval;
    fn index(&self, i: usize) -> &Interval {
        &self.entries[i]
    }
}

impl IndexMut<usize> for IntervalVector {
    fn index_mut(&mut self, i: usize) -> &mut Interval {
        &mut self.entries[i]
    }
}

impl<const N: usize> From<[Interval; N]> for IntervalVector {
    fn from(a: [Interval; N]) -> Self {
        IntervalVector::new(a.to_vec()).expect("non-empty array")
    }
}
