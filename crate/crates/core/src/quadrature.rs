//! Globally adaptive Gauss–Kronrod (7/15) quadrature on finite and infinite
//! intervals. Infinite ranges are mapped onto finite ones before subdivision.

use crate::error::{DepthError, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self {
            abs_tol: 1e-11,
            rel_tol: 1e-12,
            max_intervals: 4000,
        }
    }
}

#[derive(Clone, Copy)]
enum Map {
    Identity,
    UpperInfinite(f64),
    LowerInfinite(f64),
    Both,
}

impl Map {
    fn x(self, t: f64) -> (f64, f64) {
        match self {
            Map::Identity => (t, 1.0),
            Map::UpperInfinite(a) => {
                let u = 1.0 - t;
                (a + t / u, 1.0 / (u * u))
            }
            Map::LowerInfinite(b) => {
                let u = 1.0 - t;
                (b - t / u, 1.0 / (u * u))
            }
            Map::Both => {
                let u = 1.0 - t * t;
                (t / u, (1.0 + t * t) / (u * u))
            }
        }
    }

    fn t(self, x: f64) -> f64 {
        match self {
            Map::Identity => x,
            Map::UpperInfinite(a) => (x - a) / (1.0 + x - a),
            Map::LowerInfinite(b) => (b - x) / (1.0 + b - x),
            Map::Both => {
                if x == 0.0 {
                    0.0
                } else {
                    (-1.0 + (1.0 + 4.0 * x * x).sqrt()) / (2.0 * x)
                }
            }
        }
    }
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    resabs: f64,
}

fn kronrod<G: Fn(f64) -> f64>(g: &G, a: f64, b: f64) -> Piece {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = g(center);
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut resabs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = g(center - dx);
        let f2 = g(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = res_k * 0.5;
    let mut resasc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    resabs *= half.abs();
    resasc *= half.abs();
    let mut error = ((res_k - res_g) * half).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * resabs);
    }
    Piece {
        a,
        b,
        value,
        error,
        resabs,
    }
}

impl Quadrature {
    pub fn with_tolerance(abs_tol: f64, rel_tol: f64) -> Self {
        Self {
            abs_tol,
            rel_tol,
            ..Self::default()
        }
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Result<Integral> {
        self.integrate_with_breaks(f, a, b, &[])
    }

    /// Integrates `f` over `[a, b]`, seeding the subdivision with `breaks`
    /// (points inside the interval where `f` changes character).
    pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
        &self,
        f: F,
        a: f64,
        b: f64,
        breaks: &[f64],
    ) -> Result<Integral> {
        if a.is_nan() || b.is_nan() {
            return Err(DepthError::Domain("NaN integration limit".into()));
        }
        if a == b {
            return Ok(Integral {
                value: 0.0,
                abs_error: 0.0,
                evaluations: 0,
            });
        }
        if a > b {
            let r = self.integrate_with_breaks(f, b, a, breaks)?;
            return Ok(Integral {
                value: -r.value,
                ..r
            });
        }
        let (map, ta, tb) = match (a.is_finite(), b.is_finite()) {
            (true, true) => (Map::Identity, a, b),
            (true, false) => (Map::UpperInfinite(a), 0.0, 1.0),
            (false, true) => (Map::LowerInfinite(b), 0.0, 1.0),
            (false, false) => (Map::Both, -1.0, 1.0),
        };
        let g = |t: f64| {
            let (x, jac) = map.x(t);
            let fx = f(x);
            if fx == 0.0 {
                0.0
            } else {
                fx * jac
            }
        };

        let mut cuts: Vec<f64> = breaks
            .iter()
            .filter(|x| x.is_finite() && **x > a && **x < b)
            .map(|&x| map.t(x))
            .collect();
        for i in 1..4 {
            cuts.push(ta + (tb - ta) * i as f64 / 4.0);
        }
        cuts.push(ta);
        cuts.push(tb);
        cuts.sort_by(|x, y| x.total_cmp(y));
        cuts.dedup();

        let mut pieces: Vec<Piece> = cuts.windows(2).map(|w| kronrod(&g, w[0], w[1])).collect();
        let mut evaluations = 15 * pieces.len();
        loop {
            let total: f64 = pieces.iter().map(|p| p.value).sum();
            let err: f64 = pieces.iter().map(|p| p.error).sum();
            let resabs: f64 = pieces.iter().map(|p| p.resabs).sum();
            let target = self
                .abs_tol
                .max(self.rel_tol * total.abs())
                .max(50.0 * f64::EPSILON * resabs);
            if err <= target {
                return Ok(Integral {
                    value: total,
                    abs_error: err,
                    evaluations,
                });
            }
            if pieces.len() >= self.max_intervals {
                return Err(DepthError::Quadrature {
                    value: total,
                    abs_error: err,
                });
            }
            let worst = pieces
                .iter()
                .enumerate()
                .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
                .map(|(i, _)| i)
                .expect("non-empty");
            let p = pieces.swap_remove(worst);
            let mid = 0.5 * (p.a + p.b);
            if mid <= p.a || mid >= p.b {
                return Err(DepthError::Quadrature {
                    value: total,
                    abs_error: err,
                });
            }
            pieces.push(kronrod(&g, p.a, mid));
            pieces.push(kronrod(&g, mid, p.b));
            evaluations += 30;
        }
    }
}
