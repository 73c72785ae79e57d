use nalgebra::DMatrix;
use rayon::prelude::*;
use thiserror::Error;

pub const DEFAULT_MINOR_LIMIT: usize = 16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MinorError {
    #[error("matrix is {rows}x{cols}, not square")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix size {size} exceeds the principal-minor limit {limit}")]
    TooLarge { size: usize, limit: usize },
}

/// Every principal minor, indexed by the bitmask of the chosen rows.
#[derive(Clone, Debug, PartialEq)]
pub struct PrincipalMinors {
    n: usize,
    values: Vec<f64>,
}

impl PrincipalMinors {
    pub fn dimension(&self) -> usize {
        self.n
    }

    /// The minor on the index set `mask`; the empty set gives 1.
    pub fn get(&self, mask: usize) -> f64 {
        self.values[mask]
    }

    pub fn of_subset(&self, subset: &[usize]) -> f64 {
        self.values[subset.iter().fold(0, |m, &i| m | (1 << i))]
    }

    /// `(mask, value)` for every nonempty index set.
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.values.iter().copied().enumerate().skip(1)
    }
}

pub fn mask_to_subset(mask: usize) -> Vec<usize> {
    (0..usize::BITS as usize).filter(|&i| mask & (1 << i) != 0).collect()
}

pub fn principal_minors(m: &DMatrix<f64>) -> Result<PrincipalMinors, MinorError> {
    principal_minors_with_limit(m, DEFAULT_MINOR_LIMIT)
}

pub fn principal_minors_with_limit(m: &DMatrix<f64>, limit: usize) -> Result<PrincipalMinors, MinorError> {
    let (rows, cols) = m.shape();
    if rows != cols {
        return Err(MinorError::NotSquare { rows, cols });
    }
    if rows > limit {
        return Err(MinorError::TooLarge { size: rows, limit });
    }
    let n = rows;
    let eval = |mask: usize| {
        if mask == 0 {
            return 1.0;
        }
        let idx = mask_to_subset(mask);
        let k = idx.len();
        let mut buf = vec![0.0; k * k];
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                buf[a * k + b] = m[(i, j)];
            }
        }
        lu_determinant(&mut buf, k)
    };
    let values: Vec<f64> = if n >= 10 {
        (0..1usize << n).into_par_iter().map(eval).collect()
    } else {
        (0..1usize << n).map(eval).collect()
    };
    Ok(PrincipalMinors { n, values })
}

/// Determinant of a row-major `k x k` buffer by LU with partial pivoting.
pub fn lu_determinant(a: &mut [f64], k: usize) -> f64 {
    let mut det = 1.0;
    for col in 0..k {
        let (p, pv) = (col..k)
            .map(|r| (r, a[r * k + col].abs()))
            .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pv == 0.0 {
            return 0.0;
        }
        if p != col {
            for c in 0..k {
                a.swap(p * k + c, col * k + c);
            }
            det = -det;
        }
        let piv = a[col * k + col];
        det *= piv;
        for r in col + 1..k {
            let f = a[r * k + col] / piv;
            if f != 0.0 {
                for c in col + 1..k {
                    a[r * k + c] -= f * a[col * k + c];
                }
            }
        }
    }
    det
}
