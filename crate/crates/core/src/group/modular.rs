//! Projective integral 2×2 matrices of determinant `p^k`.
//!
//! Elements are content-one integer matrices with positive determinant a power
//! of `p`, modulo ±1. `Γ` is the determinant-one part, i.e. PSL₂(ℤ). Right
//! cosets `Γg` are keyed by Hermite normal form, double cosets by the Smith
//! form `diag(1, p^k)`.

use std::fmt;

use num_integer::Integer;

use crate::error::{Error, Result};

/// `[[a, b], [c, d]]`, compared row-major.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mat2 {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2::new(1, 0, 0, 1);

    pub const fn new(a: i64, b: i64, c: i64, d: i64) -> Self {
        Mat2 { a, b, c, d }
    }

    pub const fn diag(a: i64, d: i64) -> Self {
        Mat2::new(a, 0, 0, d)
    }

    pub fn det(&self) -> i128 {
        self.a as i128 * self.d as i128 - self.b as i128 * self.c as i128
    }

    pub fn content(&self) -> i64 {
        self.a.gcd(&self.b).gcd(&self.c).gcd(&self.d)
    }

    pub fn transpose(&self) -> Self {
        Mat2::new(self.a, self.c, self.b, self.d)
    }

    pub fn adjugate(&self) -> Self {
        Mat2::new(self.d, -self.b, -self.c, self.a)
    }

    /// Integer product, `None` on overflow.
    pub fn checked_mul(&self, o: &Mat2) -> Option<Mat2> {
        let e = |x: i64, y: i64, z: i64, w: i64| -> Option<i64> {
            let v = x as i128 * y as i128 + z as i128 * w as i128;
            i64::try_from(v).ok()
        };
        Some(Mat2::new(
            e(self.a, o.a, self.b, o.c)?,
            e(self.a, o.b, self.b, o.d)?,
            e(self.c, o.a, self.d, o.c)?,
            e(self.c, o.b, self.d, o.d)?,
        ))
    }

    /// Divides out the content and makes the first nonzero entry positive.
    pub fn normalized(&self) -> Mat2 {
        let g = self.content();
        if g == 0 {
            return *self;
        }
        let mut m = Mat2::new(self.a / g, self.b / g, self.c / g, self.d / g);
        let lead = [m.a, m.b, m.c, m.d].into_iter().find(|&x| x != 0).unwrap_or(0);
        if lead < 0 {
            m = Mat2::new(-m.a, -m.b, -m.c, -m.d);
        }
        m
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{},{}],[{},{}]]", self.a, self.b, self.c, self.d)
    }
}

/// Parses `[[a,b],[c,d]]` (whitespace ignored) or `diag(a,d)`.
pub fn parse_mat2(text: &str) -> Result<Mat2> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let nums = |body: &str| -> Result<Vec<i64>> {
        body.split(',')
            .map(|t| t.trim_matches(|c| c == '[' || c == ']'))
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<i64>().map_err(|_| Error::Parse(format!("bad integer {t:?} in {text:?}"))))
            .collect()
    };
    if let Some(body) = compact.strip_prefix("diag(").and_then(|s| s.strip_suffix(')')) {
        let v = nums(body)?;
        if v.len() == 2 {
            return Ok(Mat2::diag(v[0], v[1]));
        }
    } else if compact.starts_with("[[") && compact.ends_with("]]") {
        let v = nums(&compact)?;
        if v.len() == 4 {
            return Ok(Mat2::new(v[0], v[1], v[2], v[3]));
        }
    }
    Err(Error::Parse(format!("expected [[a,b],[c,d]] or diag(a,d), got {text:?}")))
}

pub fn is_prime(n: i64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// The projective group of content-one integral matrices with determinant a
/// power of a fixed prime `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModularGroup {
    p: i64,
}

impl ModularGroup {
    pub fn new(p: i64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::Config(format!("p = {p} is not prime")));
        }
        Ok(ModularGroup { p })
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    /// Canonicalizes an arbitrary nonsingular integer matrix, checking that the
    /// primitive part has determinant `p^k`.
    pub fn element(&self, m: Mat2) -> Result<Mat2> {
        let n = m.normalized();
        if n.content() == 0 {
            return Err(Error::InvalidElement("zero matrix".into()));
        }
        self.det_exponent_checked(&n)
            .map(|_| n)
            .ok_or_else(|| Error::InvalidElement(format!("{m}: determinant is not a positive power of {}", self.p)))
    }

    fn det_exponent_checked(&self, m: &Mat2) -> Option<u32> {
        let mut det = m.det();
        if det <= 0 {
            return None;
        }
        let mut k = 0;
        while det % self.p as i128 == 0 {
            det /= self.p as i128;
            k += 1;
        }
        (det == 1).then_some(k)
    }

    /// `k` with `det = p^k`; the element must already be canonical.
    pub fn det_exponent(&self, m: &Mat2) -> u32 {
        self.det_exponent_checked(m).expect("canonical element has determinant p^k")
    }

    pub fn try_mul(&self, x: &Mat2, y: &Mat2) -> Result<Mat2> {
        x.checked_mul(y)
            .map(|m| m.normalized())
            .ok_or_else(|| Error::InvalidElement(format!("entry overflow in {x} * {y}")))
    }

    pub fn mul(&self, x: &Mat2, y: &Mat2) -> Mat2 {
        self.try_mul(x, y).unwrap_or_else(|e| panic!("{e}"))
    }

    /// Adjugate, which is the inverse up to the scalar `det`.
    pub fn inv(&self, x: &Mat2) -> Mat2 {
        x.adjugate().normalized()
    }

    /// Hermite normal form under left multiplication by SL₂(ℤ): the canonical
    /// representative `[[a,b],[0,d]]`, `a, d > 0`, `0 <= b < d`, of `Γg`.
    pub fn hnf_right(&self, g: &Mat2) -> Mat2 {
        hermite_upper(g)
    }

    /// Canonical representative of the left coset `gΓ`, via the transpose.
    pub fn hnf_left(&self, g: &Mat2) -> Mat2 {
        hermite_upper(&g.transpose()).transpose()
    }

    /// Smith form `diag(1, p^k)`, the canonical representative of `ΓgΓ`.
    pub fn smith(&self, g: &Mat2) -> Mat2 {
        Mat2::diag(1, self.p.pow(self.det_exponent(g)))
    }

    /// All Hermite forms `[[a,b],[0,d]]` with `ad = p^k`, `0 <= b < d`. With
    /// `primitive` set, only content-one forms are kept; these are the right
    /// cosets inside `Γ diag(1,p^k) Γ`.
    pub fn hermite_forms(&self, k: u32, primitive: bool) -> Vec<Mat2> {
        let mut out = Vec::new();
        for i in 0..=k {
            let a = self.p.pow(i);
            let d = self.p.pow(k - i);
            for b in 0..d {
                let m = Mat2::new(a, b, 0, d);
                if !primitive || m.content() == 1 {
                    out.push(m);
                }
            }
        }
        out.sort();
        out
    }

    /// Generators `S = [[0,-1],[1,0]]` and `T = [[1,1],[0,1]]` of PSL₂(ℤ).
    pub fn gamma_generators(&self) -> Vec<Mat2> {
        vec![Mat2::new(0, -1, 1, 0).normalized(), Mat2::new(1, 1, 0, 1)]
    }
}

/// Row-style Hermite form of a matrix with positive determinant, using only
/// determinant-one row operations.
fn hermite_upper(g: &Mat2) -> Mat2 {
    let (x, y) = (g.a as i128, g.c as i128);
    let (u, v, h) = if y == 0 {
        if x > 0 { (1, 0, x) } else { (-1, 0, -x) }
    } else {
        let e = x.extended_gcd(&y);
        // e.x * x + e.y * y = gcd >= 0
        (e.x, e.y, e.gcd)
    };
    // U = [[u, v], [-y/h, x/h]] has determinant 1 and sends (x, y) to (h, 0).
    let (r, s) = if y == 0 { (0, if x > 0 { 1 } else { -1 }) } else { (-y / h, x / h) };
    let top_b = u * g.b as i128 + v * g.d as i128;
    let bot_d = r * g.b as i128 + s * g.d as i128;
    let (mut a, mut b, mut d) = (h, top_b, bot_d);
    if d < 0 {
        // only possible for negative determinant, excluded by the group
        a = -a;
        b = -b;
        d = -d;
    }
    b = b.rem_euclid(d);
    Mat2::new(a as i64, b as i64, 0, d as i64).normalized()
}
