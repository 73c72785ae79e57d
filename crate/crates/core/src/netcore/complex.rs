use std::collections::BTreeMap;
use std::fmt;

use num::{Signed, Zero};

use crate::exact::{format_rational, to_f64, Rational};

/// A nonnegative rational combination of species, stored sparsely.
///
/// Zero coefficients are never stored, so `support()` is exactly the set of
/// keys.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Complex {
    coeffs: BTreeMap<usize, Rational>,
}

impl Complex {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Builds a complex, summing repeated species and dropping zero entries.
    ///
    /// Returns `None` if any coefficient is negative.
    pub fn from_terms<I>(terms: I) -> Option<Self>
    where
        I: IntoIterator<Item = (usize, Rational)>,
    {
        let mut coeffs: BTreeMap<usize, Rational> = BTreeMap::new();
        for (s, c) in terms {
            if c.is_negative() {
                return None;
            }
            *coeffs.entry(s).or_insert_with(Rational::zero) += c;
        }
        coeffs.retain(|_, c| !c.is_zero());
        Some(Self { coeffs })
    }

    /// Convenience constructor from integer coefficients.
    pub fn from_ints(terms: &[(usize, i64)]) -> Self {
        Self::from_terms(terms.iter().map(|&(s, c)| (s, crate::exact::int(c))))
            .expect("nonnegative coefficients")
    }

    pub fn single(species: usize, coeff: Rational) -> Self {
        Self::from_terms([(species, coeff)]).expect("nonnegative coefficient")
    }

    pub fn coeff(&self, species: usize) -> Rational {
        self.coeffs.get(&species).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn get(&self, species: usize) -> Option<&Rational> {
        self.coeffs.get(&species)
    }

    pub fn contains(&self, species: usize) -> bool {
        self.coeffs.contains_key(&species)
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.coeffs.keys().copied()
    }

    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Rational)> {
        self.coeffs.iter().map(|(&s, c)| (s, c))
    }

    pub fn max_species(&self) -> Option<usize> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn plus(&self, other: &Complex) -> Complex {
        let mut coeffs = self.coeffs.clone();
        for (&s, c) in &other.coeffs {
            *coeffs.entry(s).or_insert_with(Rational::zero) += c;
        }
        Complex { coeffs }
    }

    /// The complex with the given species removed.
    pub fn without(&self, species: usize) -> Complex {
        let mut coeffs = self.coeffs.clone();
        coeffs.remove(&species);
        Complex { coeffs }
    }

    pub fn supports_intersect(&self, other: &Complex) -> bool {
        self.coeffs.keys().any(|k| other.coeffs.contains_key(k))
    }

    /// Dense exact vector of length `n`.
    pub fn to_dense(&self, n: usize) -> Vec<Rational> {
        (0..n).map(|i| self.coeff(i)).collect()
    }

    /// Sparse floating-point view `(species, coefficient)`.
    pub fn to_f64_terms(&self) -> Vec<(usize, f64)> {
        self.coeffs.iter().map(|(&s, c)| (s, to_f64(c))).collect()
    }

    /// Renders the complex with the supplied species names, `0` for the empty complex.
    pub fn display_with<'a>(&'a self, names: &'a [String]) -> ComplexDisplay<'a> {
        ComplexDisplay { complex: self, names }
    }
}

pub struct ComplexDisplay<'a> {
    complex: &'a Complex,
    names: &'a [String],
}

impl fmt::Display for ComplexDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.complex.is_zero() {
            return write!(f, "0");
        }
        for (k, (s, c)) in self.complex.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            let name = self.names.get(s).map(String::as_str).unwrap_or("?");
            if c == &crate::exact::int(1) {
                write!(f, "{name}")?;
            } else {
                write!(f, "{} {name}", format_rational(c))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};

    #[test]
    fn merges_and_drops_zero() {
        let c = Complex::from_terms([(0, int(1)), (0, rat(1, 2)), (2, int(0))]).unwrap();
        assert_eq!(c.coeff(0), rat(3, 2));
        assert_eq!(c.support().collect::<Vec<_>>(), vec![0]);
        assert!(Complex::from_terms([(1, int(-1))]).is_none());
    }

    #[test]
    fn display() {
        let names = vec!["X".to_string(), "Y".to_string()];
        let c = Complex::from_terms([(0, int(2)), (1, rat(1, 2))]).unwrap();
        assert_eq!(c.display_with(&names).to_string(), "2 X + 1/2 Y");
        assert_eq!(Complex::zero().display_with(&names).to_string(), "0");
    }
}
