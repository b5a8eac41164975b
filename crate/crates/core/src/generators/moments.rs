//! Fleishman power transform: `a + bZ + cZ^2 + dZ^3` of a standard normal `Z`
//! with `a = -c`, fitted so the output has mean 0, variance 1 and the requested
//! skew and excess kurtosis.

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fleishman {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Fleishman {
    pub const IDENTITY: Fleishman = Fleishman {
        a: 0.0,
        b: 1.0,
        c: 0.0,
        d: 0.0,
    };

    /// Fits coefficients by Newton iteration. `kurtosis` is the plain
    /// (non-excess) kurtosis, so a normal target is `(0, 3)`.
    pub fn fit(skew: f64, kurtosis: f64) -> Result<Fleishman> {
        let excess = kurtosis - 3.0;
        if skew == 0.0 && excess == 0.0 {
            return Ok(Self::IDENTITY);
        }
        let mut v = [1.0, 0.0, 0.0];
        for _ in 0..200 {
            let f = residual(v, skew, excess);
            if f.iter().all(|r| r.abs() < 1e-12) {
                let [b, c, d] = v;
                return Ok(Fleishman { a: -c, b, c, d });
            }
            let j = jacobian(v);
            let step = solve3(j, f).ok_or_else(|| {
                Error::Generation(format!("singular Fleishman system for ({skew}, {kurtosis})"))
            })?;
            for i in 0..3 {
                v[i] -= step[i];
            }
            if v.iter().any(|x| !x.is_finite()) {
                break;
            }
        }
        Err(Error::Generation(format!(
            "no Fleishman coefficients for skew {skew}, kurtosis {kurtosis}"
        )))
    }

    pub fn apply(&self, z: f64) -> f64 {
        self.a + z * (self.b + z * (self.c + z * self.d))
    }
}

fn residual([b, c, d]: [f64; 3], skew: f64, excess: f64) -> [f64; 3] {
    [
        b * b + 6.0 * b * d + 2.0 * c * c + 15.0 * d * d - 1.0,
        2.0 * c * (b * b + 24.0 * b * d + 105.0 * d * d + 2.0) - skew,
        24.0 * (b * d
            + c * c * (1.0 + b * b + 28.0 * b * d)
            + d * d * (12.0 + 48.0 * b * d + 141.0 * c * c + 225.0 * d * d))
            - excess,
    ]
}

fn jacobian([b, c, d]: [f64; 3]) -> [[f64; 3]; 3] {
    [
        [2.0 * b + 6.0 * d, 4.0 * c, 6.0 * b + 30.0 * d],
        [
            2.0 * c * (2.0 * b + 24.0 * d),
            2.0 * (b * b + 24.0 * b * d + 105.0 * d * d + 2.0),
            2.0 * c * (24.0 * b + 210.0 * d),
        ],
        [
            24.0 * (d + c * c * (2.0 * b + 28.0 * d) + d * d * 48.0 * d),
            24.0 * (2.0 * c * (1.0 + b * b + 28.0 * b * d) + d * d * 282.0 * c),
            24.0 * (b
                + c * c * 28.0 * b
                + 2.0 * d * (12.0 + 48.0 * b * d + 141.0 * c * c + 225.0 * d * d)
                + d * d * (48.0 * b + 450.0 * d)),
        ],
    ]
}

fn solve3(m: [[f64; 3]; 3], r: [f64; 3]) -> Option<[f64; 3]> {
    let det = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(m);
    if d.abs() < 1e-14 {
        return None;
    }
    let mut out = [0.0; 3];
    for (col, o) in out.iter_mut().enumerate() {
        let mut mc = m;
        for row in 0..3 {
            mc[row][col] = r[row];
        }
        *o = det(mc) / d;
    }
    Some(out)
}
