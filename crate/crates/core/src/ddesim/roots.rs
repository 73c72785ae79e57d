use num::complex::Complex64;
use thiserror::Error;

use crate::jacobian::CharacteristicFunction;
use crate::netcore::ReactionNetwork;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScanError {
    #[error("the function vanishes (numerically) on the boundary of {rect:?} after {attempts} attempts")]
    BoundaryZero { rect: Rect, attempts: usize },
    #[error("winding number {winding} but {found} roots were localized")]
    WindingInconsistent { winding: i64, found: i64 },
    #[error("invalid rectangle: {0}")]
    InvalidRect(String),
}

/// Axis-aligned rectangle in the complex plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Rect {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self, ScanError> {
        let r = Rect { re_min, re_max, im_min, im_max };
        if ![re_min, re_max, im_min, im_max].iter().all(|v| v.is_finite()) {
            return Err(ScanError::InvalidRect("non-finite bound".into()));
        }
        if re_min >= re_max || im_min >= im_max {
            return Err(ScanError::InvalidRect(format!("{r:?} is empty")));
        }
        Ok(r)
    }

    pub fn contains(&self, z: Complex64, slack: f64) -> bool {
        z.re >= self.re_min - slack
            && z.re <= self.re_max + slack
            && z.im >= self.im_min - slack
            && z.im <= self.im_max + slack
    }

    pub fn width(&self) -> f64 {
        self.re_max - self.re_min
    }

    pub fn height(&self) -> f64 {
        self.im_max - self.im_min
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(0.5 * (self.re_min + self.re_max), 0.5 * (self.im_min + self.im_max))
    }

    fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.re_min, self.im_min),
            Complex64::new(self.re_max, self.im_min),
            Complex64::new(self.re_max, self.im_max),
            Complex64::new(self.re_min, self.im_max),
        ]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanOptions {
    /// Initial boundary mesh: points per side before adaptive refinement.
    pub initial_points_per_side: usize,
    /// Maximum bisection depth of a boundary segment or of a localization box.
    pub max_depth: usize,
    /// The scanned rectangle extends this far below the lower edge, so that
    /// roots on the real axis lie strictly inside.
    pub sliver: f64,
    pub max_retries: usize,
    /// Boxes smaller than this are not subdivided further.
    pub min_box: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self { initial_points_per_side: 64, max_depth: 40, sliver: 1e-3, max_retries: 3, min_box: 1e-9 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RefinedRoot {
    pub value: Complex64,
    /// `|f(value)|` after Newton polishing.
    pub residual: f64,
    /// Winding number of the smallest box that isolated the root.
    pub multiplicity: i64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RootScanResult {
    pub requested: Rect,
    pub scanned: Rect,
    pub winding: i64,
    pub roots: Vec<RefinedRoot>,
    pub initial_points_per_side: usize,
    pub boundary_evaluations: usize,
    pub attempts: usize,
}

impl RootScanResult {
    /// Number of refined roots, with multiplicity, whose real part is `>= 0`.
    pub fn nonnegative_real_count(&self) -> i64 {
        self.roots.iter().filter(|r| r.value.re >= 0.0).map(|r| r.multiplicity).sum()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rect = |r: &Rect| serde_json::json!({"re": [r.re_min, r.re_max], "im": [r.im_min, r.im_max]});
        serde_json::json!({
            "schema_version": 1,
            "requested_rect": rect(&self.requested),
            "scanned_rect": rect(&self.scanned),
            "winding": self.winding,
            "roots": self.roots.iter().map(|r| serde_json::json!({
                "re": r.value.re,
                "im": r.value.im,
                "residual": r.residual,
                "multiplicity": r.multiplicity,
            })).collect::<Vec<_>>(),
            "nonnegative_real_roots": self.nonnegative_real_count(),
            "resolution": {
                "initial_points_per_side": self.initial_points_per_side,
                "boundary_evaluations": self.boundary_evaluations,
            },
            "attempts": self.attempts,
        })
    }
}

struct Boundary<'a, F> {
    f: &'a F,
    opts: &'a ScanOptions,
    evaluations: usize,
}

const ACCEPT_ARG: f64 = 0.6;

impl<F: Fn(Complex64) -> Complex64> Boundary<'_, F> {
    fn eval(&mut self, z: Complex64) -> Option<Complex64> {
        self.evaluations += 1;
        let v = (self.f)(z);
        (v.is_finite() && v.norm() > 0.0).then_some(v)
    }

    fn segment(&mut self, a: Complex64, fa: Complex64, b: Complex64, fb: Complex64, depth: usize) -> Option<f64> {
        let m = 0.5 * (a + b);
        let fm = self.eval(m)?;
        let d1 = (fm / fa).arg();
        let d2 = (fb / fm).arg();
        if d1.abs() < ACCEPT_ARG && d2.abs() < ACCEPT_ARG {
            return Some(d1 + d2);
        }
        if depth >= self.opts.max_depth {
            return None;
        }
        Some(self.segment(a, fa, m, fm, depth + 1)? + self.segment(m, fm, b, fb, depth + 1)?)
    }

    /// Winding number of `f` around the boundary of `rect`, or `None` if the
    /// boundary passes through (or too close to) a zero.
    fn winding(&mut self, rect: &Rect) -> Option<i64> {
        let corners = rect.corners();
        let per_side = self.opts.initial_points_per_side.max(1);
        let mut total = 0.0;
        let mut prev_z = corners[0];
        let mut prev_f = self.eval(prev_z)?;
        for side in 0..4 {
            let (a, b) = (corners[side], corners[(side + 1) % 4]);
            for k in 1..=per_side {
                let z = a + (b - a) * (k as f64 / per_side as f64);
                let fz = self.eval(z)?;
                total += self.segment(prev_z, prev_f, z, fz, 0)?;
                prev_z = z;
                prev_f = fz;
            }
        }
        let w = total / std::f64::consts::TAU;
        ((w - w.round()).abs() < 0.25).then(|| w.round() as i64)
    }
}

/// Winding number of `f` around `rect` on an adaptively refined mesh.
pub fn winding_number(
    f: &impl Fn(Complex64) -> Complex64,
    rect: &Rect,
    opts: &ScanOptions,
) -> Result<i64, ScanError> {
    Boundary { f, opts, evaluations: 0 }
        .winding(rect)
        .ok_or(ScanError::BoundaryZero { rect: *rect, attempts: 1 })
}

fn newton(f: &impl Fn(Complex64) -> Complex64, z0: Complex64) -> Option<(Complex64, f64)> {
    let mut z = z0;
    for _ in 0..60 {
        let fz = f(z);
        if !fz.is_finite() {
            return None;
        }
        if fz.norm() == 0.0 {
            return Some((z, 0.0));
        }
        let h = 1e-6 * z.norm().max(1.0);
        let d = (f(z + h) - f(z - h)) / (2.0 * h);
        if !d.is_finite() || d.norm() == 0.0 {
            return None;
        }
        let step = fz / d;
        z -= step;
        if step.norm() <= 1e-14 * z.norm().max(1.0) {
            break;
        }
    }
    let r = f(z).norm();
    r.is_finite().then_some((z, r))
}

struct Locator<'a, F> {
    boundary: Boundary<'a, F>,
    roots: Vec<RefinedRoot>,
}

impl<F: Fn(Complex64) -> Complex64> Locator<'_, F> {
    fn winding_with_retries(&mut self, rect: &Rect) -> Option<i64> {
        self.boundary.winding(rect)
    }

    fn split(&mut self, rect: &Rect) -> Option<[(Rect, i64); 2]> {
        const FRACTIONS: [f64; 4] = [0.5, 0.513_7, 0.486_1, 0.527_3];
        for frac in FRACTIONS {
            let (a, b) = if rect.width() >= rect.height() {
                let cut = rect.re_min + frac * rect.width();
                (Rect { re_max: cut, ..*rect }, Rect { re_min: cut, ..*rect })
            } else {
                let cut = rect.im_min + frac * rect.height();
                (Rect { im_max: cut, ..*rect }, Rect { im_min: cut, ..*rect })
            };
            let (Some(wa), Some(wb)) = (self.winding_with_retries(&a), self.winding_with_retries(&b)) else {
                continue;
            };
            return Some([(a, wa), (b, wb)]);
        }
        None
    }

    fn locate(&mut self, rect: Rect, winding: i64, depth: usize) -> Result<(), ScanError> {
        if winding <= 0 {
            return Ok(());
        }
        let small = rect.width().max(rect.height()) < self.boundary.opts.min_box * rect.center().norm().max(1.0);
        if winding == 1 || small || depth >= self.boundary.opts.max_depth {
            let slack = 1e-9 * rect.center().norm().max(1.0);
            if let Some((z, residual)) = newton(self.boundary.f, rect.center()) {
                if rect.contains(z, slack) {
                    self.roots.push(RefinedRoot { value: z, residual, multiplicity: winding });
                    return Ok(());
                }
            }
            if small || depth >= self.boundary.opts.max_depth {
                return Err(ScanError::WindingInconsistent { winding, found: 0 });
            }
        }
        let Some(parts) = self.split(&rect) else {
            return Err(ScanError::BoundaryZero { rect, attempts: 1 });
        };
        let found = parts[0].1 + parts[1].1;
        if found != winding {
            return Err(ScanError::WindingInconsistent { winding, found });
        }
        for (r, w) in parts {
            self.locate(r, w, depth + 1)?;
        }
        Ok(())
    }
}

/// Counts and localizes the zeros of `f` in the rectangle `requested`.
///
/// The rectangle actually scanned is extended downward by `opts.sliver`;
/// if its boundary meets a zero it is perturbed outward and rescanned.
pub fn scan_roots(
    f: impl Fn(Complex64) -> Complex64,
    requested: Rect,
    opts: &ScanOptions,
) -> Result<RootScanResult, ScanError> {
    Rect::new(requested.re_min, requested.re_max, requested.im_min, requested.im_max)?;
    let mut boundary = Boundary { f: &f, opts, evaluations: 0 };
    let base = Rect { im_min: requested.im_min - opts.sliver, ..requested };
    let scale = requested.width().max(requested.height());
    let mut attempts = 0;
    let mut found = None;
    for attempt in 0..=opts.max_retries {
        attempts += 1;
        let shift = 1e-4 * scale * attempt as f64 * 0.618_034;
        let rect = Rect {
            re_min: base.re_min + shift,
            re_max: base.re_max + shift,
            im_min: base.im_min - shift,
            im_max: base.im_max + shift,
        };
        if let Some(w) = boundary.winding(&rect) {
            found = Some((rect, w));
            break;
        }
    }
    let Some((scanned, winding)) = found else {
        return Err(ScanError::BoundaryZero { rect: base, attempts });
    };
    let mut locator = Locator { boundary, roots: Vec::new() };
    locator.locate(scanned, winding, 0)?;
    let mut roots = locator.roots;
    roots.sort_by(|a, b| b.value.re.total_cmp(&a.value.re).then(a.value.im.total_cmp(&b.value.im)));
    let total: i64 = roots.iter().map(|r| r.multiplicity).sum();
    if total != winding {
        return Err(ScanError::WindingInconsistent { winding, found: total });
    }
    Ok(RootScanResult {
        requested,
        scanned,
        winding,
        roots,
        initial_points_per_side: opts.initial_points_per_side,
        boundary_evaluations: locator.boundary.evaluations,
        attempts,
    })
}

/// Root scan of the characteristic function `det(J_lambda - lambda I)` in
/// the upper half of `rect`; conjugate roots are implied.
pub fn scan_characteristic_roots(
    net: &ReactionNetwork,
    x_star: &[f64],
    kappa: &[f64],
    tau: &[f64],
    rect: Rect,
    opts: &ScanOptions,
) -> Result<RootScanResult, ScanError> {
    let cf = CharacteristicFunction::new(net, x_star, kappa, tau);
    scan_roots(|z| cf.eval(z), rect, opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn polynomial_roots_are_counted_and_polished() {
        let f = |z: Complex64| (z - c(1.0, 2.0)) * (z - c(1.0, -2.0)) * (z + 3.0) * (z - c(0.5, 0.0));
        let res = scan_roots(f, Rect::new(-5.0, 5.0, 0.0, 5.0).unwrap(), &ScanOptions::default()).unwrap();
        assert_eq!(res.winding, 3);
        let mut vals: Vec<_> = res.roots.iter().map(|r| r.value).collect();
        vals.sort_by(|a, b| a.re.total_cmp(&b.re));
        assert!((vals[0] - c(-3.0, 0.0)).norm() < 1e-10);
        assert!((vals[1] - c(0.5, 0.0)).norm() < 1e-10);
        assert!((vals[2] - c(1.0, 2.0)).norm() < 1e-10);
    }

    #[test]
    fn double_root_has_multiplicity_two() {
        let f = |z: Complex64| (z - c(0.3, 0.7)).powi(2);
        let res = scan_roots(f, Rect::new(-1.0, 1.0, 0.0, 1.0).unwrap(), &ScanOptions::default()).unwrap();
        assert_eq!(res.winding, 2);
        let total: i64 = res.roots.iter().map(|r| r.multiplicity).sum();
        assert_eq!(total, 2);
    }

    #[test]
    fn empty_rectangle_is_rejected() {
        assert!(matches!(Rect::new(1.0, 0.0, 0.0, 1.0), Err(ScanError::InvalidRect(_))));
    }

    #[test]
    fn boundary_zero_is_avoided_by_perturbation() {
        let f = |z: Complex64| z - c(2.0, 1.0);
        let res = scan_roots(f, Rect::new(0.0, 2.0, 0.0, 2.0).unwrap(), &ScanOptions::default()).unwrap();
        assert!(res.attempts > 1);
        assert_eq!(res.winding, 1);
    }
}
