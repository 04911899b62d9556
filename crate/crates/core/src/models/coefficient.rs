use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::operator_core::spectral_norm;

/// Real matrix that serializes as row-major nested arrays.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat(pub DMatrix<f64>);

impl Mat {
    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        Mat(DMatrix::from_fn(r, c, |i, j| rows[i][j]))
    }
}

impl From<DMatrix<f64>> for Mat {
    fn from(m: DMatrix<f64>) -> Self {
        Mat(m)
    }
}

impl Serialize for Mat {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<f64>> = (0..self.0.nrows())
            .map(|i| self.0.row(i).iter().copied().collect())
            .collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Mat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<f64>> = Vec::deserialize(d)?;
        if rows.is_empty() {
            return Err(D::Error::custom("matrix must have at least one row"));
        }
        let c = rows[0].len();
        if c == 0 || rows.iter().any(|r| r.len() != c) {
            return Err(D::Error::custom("matrix rows must be nonempty and of equal length"));
        }
        Ok(Mat(DMatrix::from_fn(rows.len(), c, |i, j| rows[i][j])))
    }
}

fn default_frequency() -> f64 {
    1.0
}

/// Matrix-valued function of rescaled time `u`.
///
/// `affine` is linear on `[0, 1]` and held constant outside; `sinusoidal`
/// is `base + sin(2π·frequency·u + phase)·amplitude` on the whole line;
/// `piecewise_linear` interpolates between knots and is constant beyond.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum CoefficientFn {
    Constant {
        value: Mat,
    },
    Affine {
        intercept: Mat,
        slope: Mat,
    },
    Sinusoidal {
        base: Mat,
        amplitude: Mat,
        #[serde(default = "default_frequency")]
        frequency: f64,
        #[serde(default)]
        phase: f64,
    },
    PiecewiseLinear {
        knots: Vec<f64>,
        values: Vec<Mat>,
    },
}

impl CoefficientFn {
    pub fn constant(m: DMatrix<f64>) -> Self {
        CoefficientFn::Constant { value: Mat(m) }
    }

    pub fn scalar(v: f64) -> Self {
        Self::constant(DMatrix::from_element(1, 1, v))
    }

    pub fn affine(intercept: DMatrix<f64>, slope: DMatrix<f64>) -> Self {
        CoefficientFn::Affine {
            intercept: Mat(intercept),
            slope: Mat(slope),
        }
    }

    /// `base + sin(2πu)·amplitude`.
    pub fn sinusoidal(base: DMatrix<f64>, amplitude: DMatrix<f64>) -> Self {
        CoefficientFn::Sinusoidal {
            base: Mat(base),
            amplitude: Mat(amplitude),
            frequency: 1.0,
            phase: 0.0,
        }
    }

    pub fn piecewise_linear(knots: Vec<f64>, values: Vec<DMatrix<f64>>) -> Self {
        CoefficientFn::PiecewiseLinear {
            knots,
            values: values.into_iter().map(Mat).collect(),
        }
    }

    pub fn eval(&self, u: f64) -> DMatrix<f64> {
        match self {
            CoefficientFn::Constant { value } => value.0.clone(),
            CoefficientFn::Affine { intercept, slope } => &intercept.0 + &slope.0 * u.clamp(0.0, 1.0),
            CoefficientFn::Sinusoidal {
                base,
                amplitude,
                frequency,
                phase,
            } => &base.0 + &amplitude.0 * (2.0 * PI * frequency * u + phase).sin(),
            CoefficientFn::PiecewiseLinear { knots, values } => {
                let (k, w) = locate(knots, u);
                if w == 0.0 {
                    values[k].0.clone()
                } else {
                    &values[k].0 * (1.0 - w) + &values[k + 1].0 * w
                }
            }
        }
    }

    /// Derivative in `u` (right derivative at kinks).
    pub fn derivative(&self, u: f64) -> DMatrix<f64> {
        let (r, c) = self.shape();
        match self {
            CoefficientFn::Constant { .. } => DMatrix::zeros(r, c),
            CoefficientFn::Affine { slope, .. } => {
                if (0.0..1.0).contains(&u) {
                    slope.0.clone()
                } else {
                    DMatrix::zeros(r, c)
                }
            }
            CoefficientFn::Sinusoidal {
                amplitude,
                frequency,
                phase,
                ..
            } => &amplitude.0 * (2.0 * PI * frequency * (2.0 * PI * frequency * u + phase).cos()),
            CoefficientFn::PiecewiseLinear { knots, values } => {
                if knots.len() < 2 || u < knots[0] || u >= knots[knots.len() - 1] {
                    return DMatrix::zeros(r, c);
                }
                let (k, _) = locate(knots, u);
                (&values[k + 1].0 - &values[k].0) / (knots[k + 1] - knots[k])
            }
        }
    }

    /// Lipschitz constant in spectral norm.
    pub fn lipschitz(&self) -> f64 {
        let n = |m: &DMatrix<f64>| spectral_norm(m).unwrap_or(f64::INFINITY);
        match self {
            CoefficientFn::Constant { .. } => 0.0,
            CoefficientFn::Affine { slope, .. } => n(&slope.0),
            CoefficientFn::Sinusoidal {
                amplitude, frequency, ..
            } => 2.0 * PI * frequency.abs() * n(&amplitude.0),
            CoefficientFn::PiecewiseLinear { knots, values } => knots
                .windows(2)
                .zip(values.windows(2))
                .map(|(k, v)| n(&(&v[1].0 - &v[0].0)) / (k[1] - k[0]))
                .fold(0.0, f64::max),
        }
    }

    pub fn is_constant(&self) -> bool {
        match self {
            CoefficientFn::Constant { .. } => true,
            _ => self.lipschitz() == 0.0,
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        let m = match self {
            CoefficientFn::Constant { value } => &value.0,
            CoefficientFn::Affine { intercept, .. } => &intercept.0,
            CoefficientFn::Sinusoidal { base, .. } => &base.0,
            CoefficientFn::PiecewiseLinear { values, .. } => match values.first() {
                Some(v) => &v.0,
                None => return (0, 0),
            },
        };
        m.shape()
    }

    /// Structural check: every payload matrix is `p×p` and finite, knots are
    /// strictly increasing. Errors carry a JSON pointer under `pointer`.
    pub fn check(&self, p: usize, pointer: &str) -> Result<()> {
        let sq = |m: &Mat, field: &str| -> Result<()> {
            if m.0.shape() != (p, p) {
                return Err(Error::config(
                    format!("{pointer}/{field}"),
                    format!("expected {p}x{p} matrix, got {}x{}", m.0.nrows(), m.0.ncols()),
                ));
            }
            if m.0.iter().any(|x| !x.is_finite()) {
                return Err(Error::config(format!("{pointer}/{field}"), "non-finite entry"));
            }
            Ok(())
        };
        match self {
            CoefficientFn::Constant { value } => sq(value, "value"),
            CoefficientFn::Affine { intercept, slope } => {
                sq(intercept, "intercept")?;
                sq(slope, "slope")
            }
            CoefficientFn::Sinusoidal {
                base,
                amplitude,
                frequency,
                phase,
            } => {
                sq(base, "base")?;
                sq(amplitude, "amplitude")?;
                if !frequency.is_finite() || !phase.is_finite() {
                    return Err(Error::config(format!("{pointer}/frequency"), "non-finite"));
                }
                Ok(())
            }
            CoefficientFn::PiecewiseLinear { knots, values } => {
                if knots.is_empty() || knots.len() != values.len() {
                    return Err(Error::config(
                        format!("{pointer}/values"),
                        "knots and values must be nonempty and of equal length",
                    ));
                }
                if knots.windows(2).any(|w| !(w[1] > w[0])) || knots.iter().any(|k| !k.is_finite()) {
                    return Err(Error::config(format!("{pointer}/knots"), "knots must be finite and strictly increasing"));
                }
                for (i, v) in values.iter().enumerate() {
                    sq(v, &format!("values/{i}"))?;
                }
                Ok(())
            }
        }
    }
}

/// Segment index and interpolation weight for `u`.
fn locate(knots: &[f64], u: f64) -> (usize, f64) {
    let n = knots.len();
    if n == 1 || u <= knots[0] {
        return (0, 0.0);
    }
    if u >= knots[n - 1] {
        return (n - 1, 0.0);
    }
    let k = knots.partition_point(|&x| x <= u) - 1;
    (k, (u - knots[k]) / (knots[k + 1] - knots[k]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(v: &[f64]) -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 2, v)
    }

    #[test]
    fn forms_evaluate() {
        let c = CoefficientFn::constant(m(&[1.0, 2.0, 3.0, 4.0]));
        assert_eq!(c.eval(7.0), m(&[1.0, 2.0, 3.0, 4.0]));
        let a = CoefficientFn::affine(DMatrix::identity(2, 2), m(&[1.0, 0.0, 0.0, 2.0]));
        assert_eq!(a.eval(0.5), m(&[1.5, 0.0, 0.0, 2.0]));
        assert_eq!(a.eval(3.0), a.eval(1.0));
        assert_eq!(a.eval(-1.0), a.eval(0.0));
        let s = CoefficientFn::sinusoidal(DMatrix::zeros(2, 2), DMatrix::identity(2, 2));
        assert!((s.eval(0.25)[(0, 0)] - 1.0).abs() < 1e-15);
        let p = CoefficientFn::piecewise_linear(vec![0.0, 1.0, 3.0], vec![
            DMatrix::zeros(2, 2),
            DMatrix::identity(2, 2),
            DMatrix::identity(2, 2) * 5.0,
        ]);
        assert_eq!(p.eval(0.5), DMatrix::identity(2, 2) * 0.5);
        assert_eq!(p.eval(2.0), DMatrix::identity(2, 2) * 3.0);
        assert_eq!(p.eval(10.0), DMatrix::identity(2, 2) * 5.0);
        assert_eq!(p.eval(-1.0), DMatrix::zeros(2, 2));
    }

    #[test]
    fn lipschitz_constants_dominate_difference_quotients() {
        let fns = vec![
            CoefficientFn::affine(DMatrix::identity(2, 2), m(&[0.3, -0.2, 0.1, 0.4])),
            CoefficientFn::sinusoidal(DMatrix::identity(2, 2), m(&[0.3, -0.2, 0.1, 0.4])),
            CoefficientFn::piecewise_linear(vec![0.0, 0.4, 1.0], vec![
                DMatrix::zeros(2, 2),
                m(&[0.3, -0.2, 0.1, 0.4]),
                m(&[-0.3, 0.2, 0.0, 0.1]),
            ]),
        ];
        for f in &fns {
            let l = f.lipschitz();
            for i in 0..200 {
                let u = -0.5 + i as f64 * 0.01;
                let v = u + 0.0037;
                let q = spectral_norm(&(f.eval(v) - f.eval(u))).unwrap() / 0.0037;
                assert!(q <= l * (1.0 + 1e-9) + 1e-12, "{q} > {l}");
            }
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let f = CoefficientFn::sinusoidal(DMatrix::identity(2, 2), m(&[0.3, -0.2, 0.1, 0.4]));
        let h = 1e-6;
        for u in [0.1, 0.37, 0.8] {
            let fd = (f.eval(u + h) - f.eval(u - h)) / (2.0 * h);
            assert!((fd - f.derivative(u)).amax() < 1e-8);
        }
    }

    #[test]
    fn json_roundtrip_row_major() {
        let json = r#"{"form":"sinusoidal","base":[[1,2],[3,4]],"amplitude":[[0,0],[0,1]]}"#;
        let f: CoefficientFn = serde_json::from_str(json).unwrap();
        assert_eq!(f.eval(0.0), m(&[1.0, 2.0, 3.0, 4.0]));
        let back = serde_json::to_string(&f).unwrap();
        let g: CoefficientFn = serde_json::from_str(&back).unwrap();
        assert_eq!(f, g);
        assert!(serde_json::from_str::<CoefficientFn>(r#"{"form":"constant","value":[[1,2],[3]]}"#).is_err());
    }

    #[test]
    fn structural_check_pointer() {
        let f = CoefficientFn::constant(DMatrix::zeros(3, 3));
        match f.check(2, "/model/coefficients/1") {
            Err(Error::Config { pointer, .. }) => assert_eq!(pointer, "/model/coefficients/1/value"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
