//! Exact numbers `p + q √r` for a fixed non-square integer `r`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Surd {
    pub p: BigRational,
    pub q: BigRational,
}

impl Surd {
    pub fn zero() -> Self {
        Self {
            p: BigRational::zero(),
            q: BigRational::zero(),
        }
    }

    pub fn rational(p: BigRational) -> Self {
        Self {
            p,
            q: BigRational::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_zero() && self.q.is_zero()
    }

    pub fn add(&self, o: &Surd) -> Surd {
        Surd {
            p: &self.p + &o.p,
            q: &self.q + &o.q,
        }
    }

    pub fn sub(&self, o: &Surd) -> Surd {
        Surd {
            p: &self.p - &o.p,
            q: &self.q - &o.q,
        }
    }

    /// Product in `Q(√r)`.
    pub fn mul(&self, o: &Surd, r: u32) -> Surd {
        let r = BigRational::from_integer(BigInt::from(r));
        Surd {
            p: &self.p * &o.p + r * &self.q * &o.q,
            q: &self.p * &o.q + &self.q * &o.p,
        }
    }

    /// Quotient in `Q(√r)`; `None` when dividing by zero.
    pub fn div(&self, o: &Surd, r: u32) -> Option<Surd> {
        if o.is_zero() {
            return None;
        }
        let conj = Surd {
            p: o.p.clone(),
            q: -&o.q,
        };
        let num = self.mul(&conj, r);
        let den = o.mul(&conj, r).p;
        Some(Surd {
            p: num.p / &den,
            q: num.q / den,
        })
    }

    pub fn to_f64(&self, r: u32) -> f64 {
        let f = |x: &BigRational| x.to_f64().unwrap_or(f64::NAN);
        f(&self.p) + f(&self.q) * f64::from(r).sqrt()
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.p.is_zero(), self.q.is_zero()) {
            (_, true) => write!(f, "{}", self.p),
            (true, false) => write!(f, "{}√", self.q),
            (false, false) => {
                let sign = if self.q.is_negative() { "-" } else { "+" };
                write!(f, "{}{}{}√", self.p, sign, self.q.abs())
            }
        }
    }
}

/// `Σ u_k v_k` over `Q(√r)`.
pub fn dot(u: &[Surd], v: &[Surd], r: u32) -> Surd {
    u.iter()
        .zip(v)
        .fold(Surd::zero(), |acc, (a, b)| acc.add(&a.mul(b, r)))
}

/// Parallel iff every 2x2 minor vanishes.
pub fn parallel(u: &[Surd], v: &[Surd], r: u32) -> bool {
    (0..u.len())
        .all(|i| (i + 1..u.len()).all(|j| u[i].mul(&v[j], r).sub(&u[j].mul(&v[i], r)).is_zero()))
}

fn rational(s: &str) -> Option<BigRational> {
    let s = s.strip_prefix('+').unwrap_or(s);
    if s.is_empty() {
        return None;
    }
    s.parse().ok()
}

/// Parses `p`, `q√r`, `p+q√r` or `p-q√r`; `sqrt` may stand in for `√`.
/// The radicand must equal `r`.
pub fn parse_surd(token: &str, r: u32) -> Result<Surd, String> {
    let t = token.replace("sqrt", "√");
    let Some((left, rad)) = t.split_once('√') else {
        return rational(&t)
            .map(Surd::rational)
            .ok_or_else(|| format!("bad number `{token}`"));
    };
    let rad: u32 = rad
        .parse()
        .map_err(|_| format!("bad radicand in `{token}`"))?;
    if rad != r || r == 0 {
        return Err(format!(
            "radical √{rad} does not match the header radical {r}"
        ));
    }
    // split the rational part from the coefficient at the first inner sign
    let cut = left
        .char_indices()
        .skip(1)
        .find(|&(i, c)| (c == '+' || c == '-') && !left[..i].ends_with('/'))
        .map(|(i, _)| i);
    let (p, q) = match cut {
        Some(i) => (&left[..i], &left[i..]),
        None => ("", left),
    };
    let p = if p.is_empty() {
        BigRational::zero()
    } else {
        rational(p).ok_or_else(|| format!("bad number `{token}`"))?
    };
    let q = match q {
        "" | "+" => BigRational::from_integer(1.into()),
        "-" => BigRational::from_integer((-1).into()),
        q => rational(q).ok_or_else(|| format!("bad coefficient in `{token}`"))?,
    };
    Ok(Surd { p, q })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(p: i64, q: i64) -> Surd {
        Surd {
            p: BigRational::from_integer(p.into()),
            q: BigRational::from_integer(q.into()),
        }
    }

    #[test]
    fn parses_all_forms() {
        assert_eq!(parse_surd("3", 2).unwrap(), s(3, 0));
        assert_eq!(parse_surd("-1", 0).unwrap(), s(-1, 0));
        assert_eq!(parse_surd("√2", 2).unwrap(), s(0, 1));
        assert_eq!(parse_surd("-√2", 2).unwrap(), s(0, -1));
        assert_eq!(parse_surd("2√2", 2).unwrap(), s(0, 2));
        assert_eq!(parse_surd("1+√2", 2).unwrap(), s(1, 1));
        assert_eq!(parse_surd("1-3sqrt2", 2).unwrap(), s(1, -3));
        assert_eq!(parse_surd("-1-√2", 2).unwrap(), s(-1, -1));
        let half = parse_surd("1/2+-1/2√3", 3).unwrap();
        assert_eq!(half.p, BigRational::new(1.into(), 2.into()));
        assert_eq!(half.q, BigRational::new((-1).into(), 2.into()));
        assert!(parse_surd("√3", 2).is_err());
        assert!(parse_surd("√2", 0).is_err());
        assert!(parse_surd("x", 2).is_err());
        assert!(parse_surd("", 2).is_err());
    }

    #[test]
    fn arithmetic() {
        // (1+√2)(1-√2) = -1
        assert_eq!(s(1, 1).mul(&s(1, -1), 2), s(-1, 0));
        assert!(dot(&[s(0, 1), s(1, 0)], &[s(1, 0), s(0, -1)], 2).is_zero());
        assert!(parallel(
            &[s(1, 0), s(1, 0), s(0, 0)],
            &[s(2, 0), s(2, 0), s(0, 0)],
            0
        ));
        assert!(!parallel(&[s(1, 0), s(0, 0)], &[s(0, 0), s(1, 0)], 0));
        // 1/(1+√2) = √2-1
        assert_eq!(s(1, 0).div(&s(1, 1), 2), Some(s(-1, 1)));
        assert_eq!(s(1, 0).div(&s(0, 0), 2), None);
        assert!((s(1, 1).to_f64(2) - (1.0 + 2f64.sqrt())).abs() < 1e-15);
    }
}
