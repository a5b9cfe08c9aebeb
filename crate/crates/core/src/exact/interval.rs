//! Guaranteed real enclosures for the irrational values that appear when a
//! field element is evaluated numerically.
//!
//! Endpoints are rationals kept on a dyadic grid: after every operation that
//! can grow denominators, the endpoints are rounded outward to multiples of
//! 2^-p for the working precision p. All error terms (series truncation,
//! rounding) are absorbed into the interval, so `RealInterval` values always
//! contain the exact real they stand for.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::HashMap;
use std::sync::Mutex;
use std::sync::OnceLock;

/// Closed interval [lo, hi] with rational endpoints, lo <= hi.
#[derive(Debug, Clone, PartialEq)]
pub struct RealInterval {
    pub lo: BigRational,
    pub hi: BigRational,
}

fn two_pow(p: u32) -> BigInt {
    BigInt::one() << p
}

/// Largest multiple of 2^-p that is <= q.
fn round_down(q: &BigRational, p: u32) -> BigRational {
    let scaled = q * BigRational::from_integer(two_pow(p));
    BigRational::new(scaled.floor().to_integer(), two_pow(p))
}

/// Smallest multiple of 2^-p that is >= q.
fn round_up(q: &BigRational, p: u32) -> BigRational {
    let scaled = q * BigRational::from_integer(two_pow(p));
    BigRational::new(scaled.ceil().to_integer(), two_pow(p))
}

impl RealInterval {
    pub fn exact(q: BigRational) -> Self {
        RealInterval { lo: q.clone(), hi: q }
    }

    pub fn zero() -> Self {
        RealInterval::exact(BigRational::zero())
    }

    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        debug_assert!(lo <= hi);
        RealInterval { lo, hi }
    }

    /// Round endpoints outward onto the 2^-p grid.
    pub fn outward(&self, p: u32) -> Self {
        RealInterval {
            lo: round_down(&self.lo, p),
            hi: round_up(&self.hi, p),
        }
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn add(&self, o: &Self) -> Self {
        RealInterval {
            lo: &self.lo + &o.lo,
            hi: &self.hi + &o.hi,
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        RealInterval {
            lo: &self.lo - &o.hi,
            hi: &self.hi - &o.lo,
        }
    }

    pub fn neg(&self) -> Self {
        RealInterval {
            lo: -self.hi.clone(),
            hi: -self.lo.clone(),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let cands = [
            &self.lo * &o.lo,
            &self.lo * &o.hi,
            &self.hi * &o.lo,
            &self.hi * &o.hi,
        ];
        let lo = cands.iter().min().unwrap().clone();
        let hi = cands.iter().max().unwrap().clone();
        RealInterval { lo, hi }
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        if q.is_negative() {
            RealInterval {
                lo: &self.hi * q,
                hi: &self.lo * q,
            }
        } else {
            RealInterval {
                lo: &self.lo * q,
                hi: &self.hi * q,
            }
        }
    }

    /// Widen both endpoints by err >= 0.
    pub fn widen(&self, err: &BigRational) -> Self {
        RealInterval {
            lo: &self.lo - err,
            hi: &self.hi + err,
        }
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    /// Sign if the interval excludes zero, else None.
    pub fn definite_sign(&self) -> Option<i8> {
        if self.lo.is_positive() {
            Some(1)
        } else if self.hi.is_negative() {
            Some(-1)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(0)
        } else {
            None
        }
    }

    pub fn midpoint_f64(&self) -> f64 {
        let mid = (&self.lo + &self.hi) / BigRational::from_integer(BigInt::from(2));
        rational_to_f64(&mid)
    }
}

/// Round-to-nearest conversion; adequate for display and float shadows.
pub fn rational_to_f64(q: &BigRational) -> f64 {
    let num = q.numer();
    let den = q.denom();
    // Scale so the integer quotient carries ~80 significant bits.
    let shift = 80i64 + den.bits() as i64 - num.bits() as i64;
    if shift >= 0 {
        let scaled = (num << shift as u64) / den;
        let v = bigint_to_f64(&scaled);
        v / 2f64.powi(shift as i32)
    } else {
        let scaled = num / (den << (-shift) as u64);
        let v = bigint_to_f64(&scaled);
        v * 2f64.powi((-shift) as i32)
    }
}

fn bigint_to_f64(n: &BigInt) -> f64 {
    // BigInt -> f64 via string is robust for the magnitudes used here.
    use num_traits::ToPrimitive;
    n.to_f64().unwrap_or(f64::NAN)
}

/// pi enclosure at >= p bits, by Machin's formula
/// pi = 16 atan(1/5) - 4 atan(1/239).
pub fn pi_interval(p: u32) -> RealInterval {
    static CACHE: OnceLock<Mutex<HashMap<u32, RealInterval>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().unwrap().get(&p) {
        return v.clone();
    }
    let wp = p + 16;
    let a5 = atan_inv_int(5, wp);
    let a239 = atan_inv_int(239, wp);
    let sixteen = BigRational::from_integer(BigInt::from(16));
    let four = BigRational::from_integer(BigInt::from(4));
    let v = a5.scale(&sixteen).sub(&a239.scale(&four)).outward(wp);
    cache.lock().unwrap().insert(p, v.clone());
    v
}

/// atan(1/q) for integer q >= 2, alternating Gregory series with outward
/// rounding; remainder bounded by the first omitted term.
fn atan_inv_int(q: u64, wp: u32) -> RealInterval {
    let q = BigInt::from(q);
    let q2 = &q * &q;
    let mut acc = RealInterval::zero();
    let mut power = q.clone(); // q^(2m+1)
    let mut m: u64 = 0;
    loop {
        let term = BigRational::new(BigInt::one(), &power * BigInt::from(2 * m + 1));
        let signed = if m % 2 == 0 { term.clone() } else { -term.clone() };
        acc = acc.add(&RealInterval::exact(signed)).outward(wp + 8);
        power *= &q2;
        m += 1;
        let next = BigRational::new(BigInt::one(), &power * BigInt::from(2 * m + 1));
        if next < BigRational::new(BigInt::one(), two_pow(wp + 8)) {
            // alternating series: remainder within +/- next term
            return acc.widen(&next).outward(wp);
        }
    }
}

/// cos(2 pi j / n) as an enclosure of width <= 2^(1-p).
///
/// Reduces to cos(r pi) with r in [0, 1/2] by symmetry, then sums the Taylor
/// series in interval arithmetic with an explicit Lagrange remainder.
pub fn cos_two_pi_frac(j: i64, n: u32, p: u32) -> RealInterval {
    static CACHE: OnceLock<Mutex<HashMap<(i64, u32, u32), RealInterval>>> = OnceLock::new();
    let nn = n as i64;
    let j = j.rem_euclid(nn);
    let key = (j, n, p);
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().unwrap().get(&key) {
        return v.clone();
    }

    // q = 2j/n in [0,2); fold to [0,1] then to [0,1/2] tracking sign.
    let mut q = BigRational::new(BigInt::from(2 * j), BigInt::from(nn));
    let two = BigRational::from_integer(BigInt::from(2));
    let one = BigRational::one();
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    if q > one {
        q = &two - &q; // cos((2-q) pi) = cos(q pi)
    }
    let mut sign = 1i8;
    if q > half {
        q = &one - &q; // cos(q pi) = -cos((1-q) pi)
        sign = -1;
    }

    let v = cos_q_pi(&q, p);
    let v = if sign < 0 { v.neg() } else { v };
    cache.lock().unwrap().insert(key, v.clone());
    v
}

/// cos(q pi) for rational q in [0, 1/2].
fn cos_q_pi(q: &BigRational, p: u32) -> RealInterval {
    let mut wp = p + 24;
    loop {
        let x = pi_interval(wp).scale(q).outward(wp);
        let x2 = x.mul(&x).outward(wp);
        let mut acc = RealInterval::exact(BigRational::one());
        let mut term = RealInterval::exact(BigRational::one());
        let mut m: u64 = 0;
        loop {
            // term_{m+1} = term_m * x^2 / ((2m+1)(2m+2))
            m += 1;
            let denom = BigRational::from_integer(BigInt::from((2 * m - 1) * (2 * m)));
            term = term.mul(&x2).scale(&denom.recip()).outward(wp);
            let signed = if m % 2 == 1 { term.neg() } else { term.clone() };
            acc = acc.add(&signed).outward(wp);
            // |x| <= pi/2 < 2: once the term magnitude bound drops below the
            // grid, the alternating remainder is bounded by it.
            let mag = term.lo.abs().max(term.hi.abs());
            if mag < BigRational::new(BigInt::one(), two_pow(wp)) && m >= 2 {
                acc = acc.widen(&mag);
                break;
            }
            if m > 4 * wp as u64 {
                break; // fallthrough to precision retry
            }
        }
        let acc = acc.outward(p + 2);
        if acc.width() <= BigRational::new(BigInt::from(2), two_pow(p)) {
            return acc;
        }
        wp += 32;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx(iv: &RealInterval, want: f64, tol: f64) {
        let mid = iv.midpoint_f64();
        assert!(
            (mid - want).abs() < tol,
            "interval mid {mid} vs expected {want}"
        );
        assert!(iv.lo <= iv.hi);
    }

    #[test]
    fn pi_matches_known_value() {
        let iv = pi_interval(64);
        approx(&iv, std::f64::consts::PI, 1e-15);
        assert!(iv.width() < BigRational::new(BigInt::one(), BigInt::one() << 60));
    }

    #[test]
    fn cos_fifth_roots() {
        // cos(2 pi /5) = (sqrt(5)-1)/4
        let iv = cos_two_pi_frac(1, 5, 64);
        approx(&iv, (5f64.sqrt() - 1.0) / 4.0, 1e-15);
        let iv = cos_two_pi_frac(2, 5, 64);
        approx(&iv, -(5f64.sqrt() + 1.0) / 4.0, 1e-15);
        // exact points
        let iv = cos_two_pi_frac(0, 4, 64);
        assert_eq!(iv.definite_sign(), Some(1));
        let iv = cos_two_pi_frac(1, 4, 64);
        assert!(iv.contains_zero());
        approx(&cos_two_pi_frac(2, 4, 64), -1.0, 1e-15);
    }

    #[test]
    fn widths_shrink_with_precision() {
        for &(j, n) in &[(1i64, 5u32), (3, 20), (5, 12), (7, 8)] {
            let w64 = cos_two_pi_frac(j, n, 64).width();
            let w128 = cos_two_pi_frac(j, n, 128).width();
            assert!(w128 <= w64);
            assert!(w64 <= BigRational::new(BigInt::from(2), BigInt::one() << 64));
        }
    }

    #[test]
    fn interval_contains_higher_precision_interval() {
        for p in [64u32, 96, 128] {
            let a = cos_two_pi_frac(3, 7, p);
            let b = cos_two_pi_frac(3, 7, p + 32);
            assert!(a.lo <= b.lo && b.hi <= a.hi);
        }
    }
}
