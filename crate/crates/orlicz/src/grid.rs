//! Real-valued functions sampled at the midpoints of a uniform 1-D grid,
//! with midpoint/trapezoid quadrature for modulars `int G(|u|) dx` and a
//! bisection solver for the Luxemburg norm `inf { l > 0 : int G(|u|/l) <= 1 }`.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{OrliczError, Result};
use crate::function::OrliczFunction;

/// A bounded interval split into `cells` equal cells.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Domain1D {
    pub left: f64,
    pub right: f64,
    pub cells: usize,
}

impl Domain1D {
    pub fn new(left: f64, right: f64, cells: usize) -> Result<Self> {
        if !left.is_finite() || !right.is_finite() || left >= right {
            return Err(OrliczError::Domain(format!(
                "domain needs finite left < right, got [{left}, {right}]"
            )));
        }
        if cells == 0 {
            return Err(OrliczError::Domain("domain needs at least one cell".into()));
        }
        Ok(Self { left, right, cells })
    }

    /// Cell width.
    pub fn h(&self) -> f64 {
        (self.right - self.left) / self.cells as f64
    }

    pub fn midpoint(&self, i: usize) -> f64 {
        self.left + (i as f64 + 0.5) * self.h()
    }

    pub fn midpoints(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.cells).map(|i| self.midpoint(i))
    }
}

/// Quadrature rule for modulars. Midpoint is the default and matches the
/// cell-midpoint storage; trapezoid interpolates cell edges and exists for
/// convergence cross-checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadRule {
    Midpoint,
    Trapezoid,
}

/// A modular value `int G(|u|) dx` tagged with the rule that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModularValue {
    pub value: f64,
    pub rule: QuadRule,
}

/// Samples of a function at every cell midpoint of a [`Domain1D`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    domain: Domain1D,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(domain: Domain1D, values: Vec<f64>) -> Result<Self> {
        if values.len() != domain.cells {
            return Err(OrliczError::GridMismatch(format!(
                "{} values for {} cells",
                values.len(),
                domain.cells
            )));
        }
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(OrliczError::NonFinite {
                index: i,
                x: domain.midpoint(i),
                context: format!("grid value {v}"),
            });
        }
        Ok(Self { domain, values })
    }

    /// Sample a closure at the cell midpoints.
    pub fn sample(domain: Domain1D, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = domain.midpoints().map(f).collect();
        Self::new(domain, values)
    }

    pub fn zero(domain: Domain1D) -> Self {
        Self {
            values: vec![0.0; domain.cells],
            domain,
        }
    }

    pub fn domain(&self) -> Domain1D {
        self.domain
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    fn check_same_grid(&self, other: &Self) -> Result<()> {
        if self.domain != other.domain {
            return Err(OrliczError::GridMismatch(format!(
                "{:?} vs {:?}",
                self.domain, other.domain
            )));
        }
        Ok(())
    }

    /// Cell-wise `self - other`.
    pub fn difference(&self, other: &Self) -> Result<Self> {
        self.check_same_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        Self::new(self.domain, values)
    }

    /// Cell-wise `self + other`.
    pub fn sum(&self, other: &Self) -> Result<Self> {
        self.check_same_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + b)
            .collect();
        Self::new(self.domain, values)
    }

    /// Cell-wise absolute value.
    pub fn abs(&self) -> Self {
        Self {
            domain: self.domain,
            values: self.values.iter().map(|v| v.abs()).collect(),
        }
    }

    /// Cell-wise `c * self`.
    pub fn scale(&self, c: f64) -> Result<Self> {
        let values = self.values.iter().map(|v| c * v).collect();
        Self::new(self.domain, values)
    }

    /// Serialize as `x,value` CSV, one row per cell midpoint, 17 significant
    /// digits so doubles round-trip exactly.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(32 * (self.values.len() + 1));
        out.push_str("x,value\n");
        for (i, v) in self.values.iter().enumerate() {
            let _ = writeln!(out, "{:.16e},{:.16e}", self.domain.midpoint(i), v);
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }

    /// Parse the CSV produced by [`to_csv`](Self::to_csv); the grid is
    /// reconstructed from the midpoints, which must be uniformly spaced.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h.trim() == "x,value" => {}
            other => {
                return Err(OrliczError::Csv(format!(
                    "expected header 'x,value', got {:?}",
                    other.unwrap_or("")
                )))
            }
        }
        let mut xs = Vec::new();
        let mut values = Vec::new();
        for (lineno, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let (xs_str, v_str) = line
                .split_once(',')
                .ok_or_else(|| OrliczError::Csv(format!("line {}: missing comma", lineno + 2)))?;
            let x: f64 = xs_str
                .trim()
                .parse()
                .map_err(|e| OrliczError::Csv(format!("line {}: bad x ({e})", lineno + 2)))?;
            let v: f64 = v_str
                .trim()
                .parse()
                .map_err(|e| OrliczError::Csv(format!("line {}: bad value ({e})", lineno + 2)))?;
            xs.push(x);
            values.push(v);
        }
        if xs.len() < 2 {
            return Err(OrliczError::Csv(
                "need at least two rows to infer the grid".into(),
            ));
        }
        let h = xs[1] - xs[0];
        if !(h > 0.0) {
            return Err(OrliczError::Csv("midpoints must increase".into()));
        }
        for (i, w) in xs.windows(2).enumerate() {
            if ((w[1] - w[0]) - h).abs() > 1e-9 * h.max(1e-300) {
                return Err(OrliczError::Csv(format!(
                    "non-uniform spacing between rows {} and {}",
                    i + 2,
                    i + 3
                )));
            }
        }
        let domain = Domain1D::new(xs[0] - 0.5 * h, xs[xs.len() - 1] + 0.5 * h, xs.len())?;
        Self::new(domain, values)
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_csv(&text)
    }
}

/// Quadrature of `G(|u|)` without finiteness checks; used by the bisection
/// loop where an overflow just means "modular greater than one".
pub(crate) fn modular_raw(g_fn: &OrliczFunction, u: &GridFunction, rule: QuadRule) -> f64 {
    let h = u.domain().h();
    match rule {
        QuadRule::Midpoint => {
            let mut acc = 0.0f64;
            for &v in u.values() {
                acc += g_fn.eval_raw(v.abs());
            }
            acc * h
        }
        QuadRule::Trapezoid => {
            // Edge values by averaging neighbours, end edges clamped; the
            // composite trapezoid then runs over cell edges.
            let vals = u.values();
            let n = vals.len();
            let edge = |i: usize| -> f64 {
                if i == 0 {
                    vals[0]
                } else if i == n {
                    vals[n - 1]
                } else {
                    0.5 * (vals[i - 1] + vals[i])
                }
            };
            let mut acc = 0.0f64;
            let mut prev = g_fn.eval_raw(edge(0).abs());
            for i in 1..=n {
                let cur = g_fn.eval_raw(edge(i).abs());
                acc += 0.5 * (prev + cur);
                prev = cur;
            }
            acc * h
        }
    }
}

/// Modular `int G(|u|) dx` with the chosen quadrature rule. Fails with the
/// offending node if the integrand is not finite there.
pub fn modular(g_fn: &OrliczFunction, u: &GridFunction, rule: QuadRule) -> Result<ModularValue> {
    for (i, &v) in u.values().iter().enumerate() {
        let gv = g_fn.eval_raw(v.abs());
        if !gv.is_finite() {
            return Err(OrliczError::NonFinite {
                index: i,
                x: u.domain().midpoint(i),
                context: format!("G(|{v}|) = {gv}"),
            });
        }
    }
    Ok(ModularValue {
        value: modular_raw(g_fn, u, rule),
        rule,
    })
}

const NORM_MAX_ITER: usize = 600;

/// Luxemburg norm by bisection on `l -> int G(|u|/l) dx`, which is continuous
/// and non-increasing. The bracket is found by doubling/halving from 1 and the
/// bisection stops when the modular is within `tol` of 1.
pub fn luxemburg_norm(g_fn: &OrliczFunction, u: &GridFunction, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(OrliczError::Domain(format!(
            "luxemburg_norm tolerance must be positive, got {tol}"
        )));
    }
    if u.is_zero() {
        return Ok(0.0);
    }
    let phi = |lambda: f64| -> f64 {
        let scaled = GridFunction {
            domain: u.domain(),
            values: u.values().iter().map(|v| v / lambda).collect(),
        };
        // non-finite sums compare as "greater than one" below, which is the
        // correct direction: lambda was too small
        modular_raw(g_fn, &scaled, QuadRule::Midpoint)
    };

    let mut lo = 1.0f64;
    let mut hi = 1.0f64;
    let mut steps = 0usize;
    // grow hi until modular <= 1
    while !(phi(hi) <= 1.0) {
        hi *= 2.0;
        steps += 1;
        if steps > 2100 || !hi.is_finite() {
            return Err(OrliczError::BracketCap(format!(
                "luxemburg norm upper bracket passed {hi:e}"
            )));
        }
    }
    // shrink lo until modular >= 1
    steps = 0;
    while phi(lo) < 1.0 {
        lo *= 0.5;
        steps += 1;
        if steps > 2100 || lo == 0.0 {
            return Err(OrliczError::BracketCap(format!(
                "luxemburg norm lower bracket passed {lo:e}"
            )));
        }
    }

    let mut best = hi;
    for _ in 0..NORM_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        let m = phi(mid);
        if m.is_finite() && (m - 1.0).abs() <= tol {
            return Ok(mid);
        }
        if m > 1.0 {
            lo = mid;
        } else {
            hi = mid;
            best = mid;
        }
        if (hi - lo) <= f64::EPSILON * hi {
            break;
        }
    }
    // Bracket collapsed to machine resolution without |modular - 1| <= tol;
    // `best` is the smallest lambda seen with modular <= 1, which is the
    // definition of the norm up to one ulp.
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_interval(cells: usize) -> Domain1D {
        Domain1D::new(0.0, 1.0, cells).unwrap()
    }

    #[test]
    fn modular_of_zero_is_zero() {
        let g = OrliczFunction::power(2.0).unwrap();
        let u = GridFunction::zero(unit_interval(64));
        let m = modular(&g, &u, QuadRule::Midpoint).unwrap();
        assert_eq!(m.value, 0.0);
    }

    #[test]
    fn modular_of_constant_is_cell_exact() {
        // |Omega| * G(c) with G = t^2, c = 3: 9 on [0,1]
        let g = OrliczFunction::monomial(2.0).unwrap();
        let u = GridFunction::sample(unit_interval(128), |_| 3.0).unwrap();
        let m = modular(&g, &u, QuadRule::Midpoint).unwrap();
        assert!((m.value - 9.0).abs() < 1e-12);
    }

    #[test]
    fn modular_of_identity_converges_to_third() {
        // oracle: int_0^1 x^2 dx = 1/3
        let g = OrliczFunction::monomial(2.0).unwrap();
        let u = GridFunction::sample(unit_interval(1 << 14), |x| x).unwrap();
        let m = modular(&g, &u, QuadRule::Midpoint).unwrap();
        assert!((m.value - 1.0 / 3.0).abs() < 1e-6);
    }

    #[test]
    fn midpoint_convergence_is_second_order() {
        let g = OrliczFunction::monomial(2.0).unwrap();
        let m = |cells: usize| {
            let u = GridFunction::sample(unit_interval(cells), |x| x).unwrap();
            modular(&g, &u, QuadRule::Midpoint).unwrap().value
        };
        let (m1, m2, m3) = (m(256), m(512), m(1024));
        let ratio = (m1 - m2).abs() / (m2 - m3).abs();
        assert!((3.0..=5.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn trapezoid_also_converges_to_the_integral() {
        let g = OrliczFunction::monomial(2.0).unwrap();
        let u = GridFunction::sample(unit_interval(1 << 12), |x| x).unwrap();
        let m = modular(&g, &u, QuadRule::Trapezoid).unwrap();
        assert!((m.value - 1.0 / 3.0).abs() < 1e-5, "{}", m.value);
    }

    #[test]
    fn modular_overflow_names_the_node() {
        let g = OrliczFunction::exp_minus();
        let u =
            GridFunction::sample(unit_interval(8), |x| if x > 0.9 { 800.0 } else { 0.0 }).unwrap();
        match modular(&g, &u, QuadRule::Midpoint) {
            Err(OrliczError::NonFinite { index, .. }) => assert_eq!(index, 7),
            other => panic!("expected NonFinite, got {other:?}"),
        }
    }

    #[test]
    fn luxemburg_norm_matches_p_norm_for_monomials() {
        // oracle: for G = t^p the Luxemburg norm is the grid L^p norm
        let g = OrliczFunction::monomial(2.0).unwrap();
        let u = GridFunction::sample(unit_interval(1 << 12), |x| x).unwrap();
        let norm = luxemburg_norm(&g, &u, 1e-10).unwrap();
        let h = u.domain().h();
        let p_norm = (u.values().iter().map(|v| v * v).sum::<f64>() * h).sqrt();
        assert!((norm - p_norm).abs() < 1e-8, "{norm} vs {p_norm}");
        // and the closed form sqrt(1/3)
        assert!((norm - (1.0f64 / 3.0).sqrt()).abs() < 1e-5);
    }

    #[test]
    fn luxemburg_norm_of_unit_constant_is_one() {
        for &p in &[1.5, 2.0, 3.0] {
            let g = OrliczFunction::monomial(p).unwrap();
            let u = GridFunction::sample(unit_interval(64), |_| 1.0).unwrap();
            let norm = luxemburg_norm(&g, &u, 1e-10).unwrap();
            assert!((norm - 1.0).abs() < 1e-9, "p={p}: {norm}");
        }
    }

    #[test]
    fn luxemburg_norm_zero_function() {
        let g = OrliczFunction::power(2.0).unwrap();
        let u = GridFunction::zero(unit_interval(16));
        assert_eq!(luxemburg_norm(&g, &u, 1e-10).unwrap(), 0.0);
    }

    #[test]
    fn norm_modular_consistency() {
        let g = OrliczFunction::power_log(2.0).unwrap();
        let u = GridFunction::sample(unit_interval(1 << 10), |x| 2.0 * x * (1.0 - x)).unwrap();
        let tol = 1e-9;
        let norm = luxemburg_norm(&g, &u, tol).unwrap();
        let scaled = u.scale(1.0 / norm).unwrap();
        let m = modular(&g, &scaled, QuadRule::Midpoint).unwrap();
        assert!((m.value - 1.0).abs() <= 10.0 * tol);
    }

    #[test]
    fn pointwise_ops() {
        let d = unit_interval(4);
        let u = GridFunction::new(d, vec![-1.0, 2.0, -3.0, 0.5]).unwrap();
        let v = GridFunction::new(d, vec![1.0, 1.0, 1.0, 1.0]).unwrap();

        assert!(u.difference(&u).unwrap().is_zero());
        assert_eq!(u.abs().values(), &[1.0, 2.0, 3.0, 0.5]);
        assert_eq!(u.sum(&v).unwrap().values(), &[0.0, 3.0, -2.0, 1.5]);
        // scale(2) then subtract the original recovers the original
        let doubled = u.scale(2.0).unwrap();
        assert_eq!(doubled.difference(&u).unwrap().values(), u.values());

        let other = GridFunction::zero(unit_interval(5));
        assert!(matches!(
            u.difference(&other),
            Err(OrliczError::GridMismatch(_))
        ));
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let d = Domain1D::new(-1.5, 2.5, 7).unwrap();
        let u = GridFunction::sample(d, |x| (x * 37.0).sin() / 3.0).unwrap();
        let parsed = GridFunction::from_csv(&u.to_csv()).unwrap();
        assert_eq!(parsed.values(), u.values());
        assert!((parsed.domain().left - d.left).abs() < 1e-12);
        assert!((parsed.domain().right - d.right).abs() < 1e-12);
        assert_eq!(parsed.domain().cells, d.cells);
    }

    #[test]
    fn csv_rejects_malformed_input() {
        assert!(GridFunction::from_csv("nope\n1,2\n").is_err());
        assert!(GridFunction::from_csv("x,value\n0.5\n").is_err());
        assert!(GridFunction::from_csv("x,value\n0.5,abc\n1.5,1\n").is_err());
        // non-uniform spacing
        assert!(GridFunction::from_csv("x,value\n0.0,1\n1.0,1\n3.0,1\n").is_err());
    }
}
