//! Exact arithmetic in cyclotomic fields Q(zeta_N).
//!
//! Elements are stored in the power basis 1, z, ..., z^(phi(N)-1) modulo the
//! N-th cyclotomic polynomial, with arbitrary-precision rational
//! coefficients. Every operation returns the canonical reduced
//! representative, so equality is coefficient comparison (after embedding
//! into a common conductor when two conductors divide one another or their
//! lcm).

use crate::error::{Error, Result};
use crate::exact::interval::{cos_two_pi_frac, rational_to_f64, RealInterval};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

/// Coefficients of the N-th cyclotomic polynomial, low power first, monic.
fn cyclotomic_poly(n: u32) -> Vec<BigInt> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Vec<BigInt>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().unwrap().get(&n) {
        return v.clone();
    }
    // Phi_n = (x^n - 1) / prod_{d | n, d < n} Phi_d
    let mut num = vec![BigInt::zero(); n as usize + 1];
    num[0] = -BigInt::one();
    num[n as usize] = BigInt::one();
    let mut result = num;
    for d in 1..n {
        if n % d == 0 {
            let phi_d = cyclotomic_poly(d);
            result = poly_div_exact(&result, &phi_d);
        }
    }
    cache.lock().unwrap().insert(n, result.clone());
    result
}

/// Exact division of integer polynomials (divisor monic), low power first.
fn poly_div_exact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    assert!(den[dd].is_one(), "divisor must be monic");
    let qd = rem.len() - 1 - dd;
    let mut quot = vec![BigInt::zero(); qd + 1];
    for i in (0..=qd).rev() {
        let c = rem[i + dd].clone();
        quot[i] = c.clone();
        for j in 0..=dd {
            rem[i + j] -= &c * &den[j];
        }
    }
    assert!(rem.iter().all(|c| c.is_zero()), "non-exact division");
    quot
}

/// zeta_N^e reduced modulo Phi_N for every e in 0..N, integer coordinates.
fn power_table(n: u32) -> &'static Vec<Vec<BigInt>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, &'static Vec<Vec<BigInt>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    if let Some(v) = guard.get(&n) {
        return v;
    }
    let phi = cyclotomic_poly(n);
    let deg = phi.len() - 1;
    let mut table: Vec<Vec<BigInt>> = Vec::with_capacity(n as usize);
    let mut cur = vec![BigInt::zero(); deg];
    cur[0] = BigInt::one();
    table.push(cur.clone());
    for _ in 1..n {
        // multiply by zeta: shift up, reduce the overflow term via Phi
        let top = cur[deg - 1].clone();
        for i in (1..deg).rev() {
            cur[i] = cur[i - 1].clone();
        }
        cur[0] = BigInt::zero();
        if !top.is_zero() {
            for i in 0..deg {
                cur[i] -= &top * &phi[i];
            }
        }
        table.push(cur.clone());
    }
    let leaked: &'static Vec<Vec<BigInt>> = Box::leak(Box::new(table));
    guard.insert(n, leaked);
    leaked
}

pub fn cyclotomic_degree(n: u32) -> usize {
    cyclotomic_poly(n).len() - 1
}

/// An exact element of Q(zeta_N) in the power basis modulo Phi_N.
#[derive(Clone)]
pub struct FieldElement {
    conductor: u32,
    coeffs: Vec<BigRational>,
}

impl FieldElement {
    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn zero_in(n: u32) -> Self {
        FieldElement {
            conductor: n,
            coeffs: vec![BigRational::zero(); cyclotomic_degree(n)],
        }
    }

    pub fn one_in(n: u32) -> Self {
        Self::from_rational_in(BigRational::one(), n)
    }

    pub fn from_rational_in(q: BigRational, n: u32) -> Self {
        let mut coeffs = vec![BigRational::zero(); cyclotomic_degree(n)];
        coeffs[0] = q;
        FieldElement {
            conductor: n,
            coeffs,
        }
    }

    pub fn from_rational(q: BigRational) -> Self {
        Self::from_rational_in(q, 1)
    }

    pub fn from_integer(v: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Self::from_rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// zeta_N^e as a field element of conductor N.
    pub fn zeta_pow(n: u32, e: i64) -> Self {
        let e = e.rem_euclid(n as i64) as usize;
        let table = power_table(n);
        let coeffs = table[e]
            .iter()
            .map(|c| BigRational::from_integer(c.clone()))
            .collect();
        FieldElement {
            conductor: n,
            coeffs,
        }
    }

    pub fn zeta(n: u32) -> Self {
        Self::zeta_pow(n, 1)
    }

    /// cos(2 pi j / n) = (zeta^j + zeta^-j)/2, exact in conductor n.
    pub fn cos_2pi(j: i64, n: u32) -> Self {
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        Self::zeta_pow(n, j)
            .add(&Self::zeta_pow(n, -j))
            .scale(&half)
    }

    /// sin(2 pi j / n) = cos(2 pi (n/4 - j) / n); requires 4 | n.
    pub fn sin_2pi(j: i64, n: u32) -> Self {
        assert!(n % 4 == 0, "sin_2pi needs a conductor divisible by 4");
        Self::cos_2pi(n as i64 / 4 - j, n)
    }

    /// The golden ratio (1+sqrt(5))/2 in a conductor divisible by 5.
    pub fn tau(n: u32) -> Self {
        assert!(n % 5 == 0);
        let m = (n / 5) as i64;
        // tau = 1 + zeta_5 + zeta_5^4
        Self::one_in(n)
            .add(&Self::zeta_pow(n, m))
            .add(&Self::zeta_pow(n, 4 * m))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Some(q) when the element lies in Q.
    pub fn to_rational(&self) -> Option<BigRational> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    pub fn is_rational(&self) -> bool {
        self.to_rational().is_some()
    }

    /// Re-express in conductor `target`, which must be a multiple of ours.
    pub fn embed_in(&self, target: u32) -> Result<Self> {
        if target == self.conductor {
            return Ok(self.clone());
        }
        if target % self.conductor != 0 {
            return Err(Error::ConductorMismatch(self.conductor, target));
        }
        let step = (target / self.conductor) as i64;
        let table = power_table(target);
        let deg = cyclotomic_degree(target);
        let mut coeffs = vec![BigRational::zero(); deg];
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let e = (step * i as i64).rem_euclid(target as i64) as usize;
            for (t, b) in table[e].iter().enumerate() {
                if !b.is_zero() {
                    coeffs[t] += c * BigRational::from_integer(b.clone());
                }
            }
        }
        Ok(FieldElement {
            conductor: target,
            coeffs,
        })
    }

    /// Bring two elements into the smallest common conductor.
    pub fn unify(a: &Self, b: &Self) -> Result<(Self, Self)> {
        if a.conductor == b.conductor {
            return Ok((a.clone(), b.clone()));
        }
        let l = (a.conductor as u64).lcm(&(b.conductor as u64)) as u32;
        Ok((a.embed_in(l)?, b.embed_in(l)?))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&BigRational, &BigRational) -> BigRational) -> Self {
        let (a, b) = Self::unify(self, other).expect("lcm embedding cannot fail");
        let coeffs = a
            .coeffs
            .iter()
            .zip(b.coeffs.iter())
            .map(|(x, y)| f(x, y))
            .collect();
        FieldElement {
            conductor: a.conductor,
            coeffs,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |x, y| x + y)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |x, y| x - y)
    }

    pub fn neg(&self) -> Self {
        FieldElement {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        FieldElement {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(|c| c * q).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = Self::unify(self, other).expect("lcm embedding cannot fail");
        let n = a.conductor;
        let deg = a.coeffs.len();
        // convolution, then reduce powers >= deg through the power table
        let mut conv = vec![BigRational::zero(); 2 * deg - 1];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                conv[i + j] += x * y;
            }
        }
        let table = power_table(n);
        let mut coeffs: Vec<BigRational> = conv[..deg].to_vec();
        for (e, c) in conv.iter().enumerate().skip(deg) {
            if c.is_zero() {
                continue;
            }
            let rep = &table[e % n as usize];
            for (t, b) in rep.iter().enumerate() {
                if !b.is_zero() {
                    coeffs[t] += c * BigRational::from_integer(b.clone());
                }
            }
        }
        FieldElement {
            conductor: n,
            coeffs,
        }
    }

    /// Multiplicative inverse via the extended Euclidean algorithm against
    /// Phi_N, which is irreducible, so any nonzero element is a unit.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = self.conductor;
        let phi: Vec<BigRational> = cyclotomic_poly(n)
            .iter()
            .map(|c| BigRational::from_integer(c.clone()))
            .collect();
        // r0 = Phi, r1 = self; track s with s * self = r (mod Phi)
        let mut r0 = phi;
        let mut r1 = trim(self.coeffs.clone());
        let mut s0 = vec![];
        let mut s1 = vec![BigRational::one()];
        while !r1.is_empty() {
            let (q, rem) = poly_divmod(&r0, &r1);
            let s_next = poly_sub(&s0, &poly_mul(&q, &s1));
            r0 = r1;
            r1 = rem;
            s0 = s1;
            s1 = s_next;
        }
        // r0 is a nonzero constant gcd
        assert_eq!(r0.len(), 1, "Phi_N must be irreducible");
        let c = r0[0].recip();
        let deg = cyclotomic_degree(n);
        let mut coeffs = vec![BigRational::zero(); deg];
        for (i, v) in s0.iter().enumerate() {
            coeffs[i] = v * &c;
        }
        Ok(FieldElement {
            conductor: n,
            coeffs,
        })
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        let (a, b) = Self::unify(self, other)?;
        Ok(a.mul(&b.inv()?))
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one_in(self.conductor);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Image under complex conjugation zeta -> zeta^(N-1).
    pub fn conjugate(&self) -> Self {
        let n = self.conductor;
        let table = power_table(n);
        let deg = self.coeffs.len();
        let mut coeffs = vec![BigRational::zero(); deg];
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let e = ((n as i64 - 1) * i as i64).rem_euclid(n as i64) as usize;
            for (t, b) in table[e].iter().enumerate() {
                if !b.is_zero() {
                    coeffs[t] += c * BigRational::from_integer(b.clone());
                }
            }
        }
        FieldElement {
            conductor: n,
            coeffs,
        }
    }

    /// True when the element is fixed by complex conjugation.
    pub fn is_real(&self) -> bool {
        self.conjugate() == *self
    }

    /// Enclosure of the real embedding zeta_N -> exp(2 pi i / N); width is
    /// at most 2^(1-precision_bits). Errors on non-real elements.
    pub fn embed(&self, precision_bits: u32) -> Result<RealInterval> {
        if !self.is_real() {
            return Err(Error::NonRealElement(self.to_string()));
        }
        if let Some(q) = self.to_rational() {
            return Ok(RealInterval::exact(q));
        }
        let p = precision_bits.max(32);
        let mut wp = p + 16;
        loop {
            let mut acc = RealInterval::exact(self.coeffs[0].clone());
            for (i, c) in self.coeffs.iter().enumerate().skip(1) {
                if c.is_zero() {
                    continue;
                }
                let cos = cos_two_pi_frac(i as i64, self.conductor, wp);
                acc = acc.add(&cos.scale(c));
            }
            if acc.width() <= BigRational::new(BigInt::from(2), BigInt::one() << p) {
                return Ok(acc);
            }
            wp += 32;
        }
    }

    /// Exact sign of a real element: zero by exact equality, otherwise by
    /// interval refinement with doubling precision (64 up to 4096 bits).
    pub fn sign(&self) -> Result<i8> {
        if !self.is_real() {
            return Err(Error::NonRealElement(self.to_string()));
        }
        if self.is_zero() {
            return Ok(0);
        }
        let mut p = 64u32;
        while p <= 4096 {
            let iv = self.embed(p)?;
            if let Some(s) = iv.definite_sign() {
                return Ok(s);
            }
            p *= 2;
        }
        Err(Error::PrecisionExhausted(4096))
    }

    /// Double shadow of a real element, from a 64-bit enclosure midpoint.
    pub fn to_f64(&self) -> f64 {
        if let Some(q) = self.to_rational() {
            return rational_to_f64(&q);
        }
        match self.embed(64) {
            Ok(iv) => iv.midpoint_f64(),
            Err(_) => f64::NAN,
        }
    }

    /// Parse "1/2 + 1/2*z^2 - z^3" with z the primitive N-th root of unity.
    pub fn parse(input: &str, conductor: u32) -> Result<Self> {
        parse_fe(input, conductor)
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        match Self::unify(self, other) {
            Ok((a, b)) => a.coeffs == b.coeffs,
            Err(_) => false,
        }
    }
}

impl Eq for FieldElement {}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fe({}; z_{})", self, self.conductor)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            let sign_str = if first {
                if c.is_negative() {
                    "-"
                } else {
                    ""
                }
            } else if c.is_negative() {
                " - "
            } else {
                " + "
            };
            write!(f, "{sign_str}")?;
            let coeff_is_one = mag.is_one();
            if i == 0 {
                write!(f, "{mag}")?;
            } else {
                if !coeff_is_one {
                    write!(f, "{mag}*")?;
                }
                if i == 1 {
                    write!(f, "z")?;
                } else {
                    write!(f, "z^{i}")?;
                }
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

// polynomial helpers over Q, low power first, trimmed

fn trim(mut v: Vec<BigRational>) -> Vec<BigRational> {
    while v.last().map_or(false, |c| c.is_zero()) {
        v.pop();
    }
    v
}

fn poly_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); a.len().max(b.len())];
    for (i, c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, c) in b.iter().enumerate() {
        out[i] -= c;
    }
    trim(out)
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

fn poly_divmod(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut rem = a.to_vec();
    let db = b.len() - 1;
    let lead = b[db].clone();
    if rem.len() <= db {
        return (vec![], trim(rem));
    }
    let mut quot = vec![BigRational::zero(); rem.len() - db];
    for i in (0..quot.len()).rev() {
        let c = &rem[i + db] / &lead;
        if c.is_zero() {
            continue;
        }
        quot[i] = c.clone();
        for j in 0..=db {
            let t = &c * &b[j];
            rem[i + j] -= t;
        }
    }
    (trim(quot), trim(rem))
}

// ---- parser ----

#[derive(Debug, PartialEq)]
enum Tok {
    Num(BigRational),
    Z,
    Caret,
    Star,
    Plus,
    Minus,
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let mut toks = vec![];
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' | '\n' => i += 1,
            '+' => {
                toks.push(Tok::Plus);
                i += 1;
            }
            '-' | '\u{2212}' => {
                toks.push(Tok::Minus);
                i += 1;
            }
            '*' => {
                toks.push(Tok::Star);
                i += 1;
            }
            '^' => {
                toks.push(Tok::Caret);
                i += 1;
            }
            'z' | 'Z' => {
                toks.push(Tok::Z);
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let num: BigInt = chars[start..i].iter().collect::<String>().parse().unwrap();
                // optional /denominator
                if i < chars.len() && chars[i] == '/' {
                    i += 1;
                    let dstart = i;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                    if dstart == i {
                        return Err(Error::ParseFieldElement(s.into()));
                    }
                    let den: BigInt = chars[dstart..i].iter().collect::<String>().parse().unwrap();
                    if den.is_zero() {
                        return Err(Error::ParseFieldElement(format!("{s}: zero denominator")));
                    }
                    toks.push(Tok::Num(BigRational::new(num, den)));
                } else {
                    toks.push(Tok::Num(BigRational::from_integer(num)));
                }
            }
            _ => return Err(Error::ParseFieldElement(format!("{s}: unexpected '{c}'"))),
        }
    }
    Ok(toks)
}

fn parse_fe(s: &str, conductor: u32) -> Result<FieldElement> {
    let toks = tokenize(s)?;
    if toks.is_empty() {
        return Err(Error::ParseFieldElement(format!("{s}: empty")));
    }
    let mut acc = FieldElement::zero_in(conductor);
    let mut i = 0;
    loop {
        let mut sign = BigRational::one();
        while i < toks.len() {
            match toks[i] {
                Tok::Plus => i += 1,
                Tok::Minus => {
                    sign = -sign;
                    i += 1;
                }
                _ => break,
            }
        }
        if i >= toks.len() {
            return Err(Error::ParseFieldElement(format!("{s}: dangling sign")));
        }
        // term: Num [* ] [Z [^ Num]] | Z [^ Num]
        let mut coeff = sign;
        let mut has_z = false;
        let mut exp: i64 = 0;
        if let Tok::Num(q) = &toks[i] {
            coeff *= q;
            i += 1;
            if i < toks.len() && toks[i] == Tok::Star {
                i += 1;
                if i >= toks.len() || toks[i] != Tok::Z {
                    return Err(Error::ParseFieldElement(format!("{s}: expected z after *")));
                }
            }
        }
        if i < toks.len() && toks[i] == Tok::Z {
            has_z = true;
            exp = 1;
            i += 1;
            if i < toks.len() && toks[i] == Tok::Caret {
                i += 1;
                match toks.get(i) {
                    Some(Tok::Num(q)) if q.is_integer() && !q.is_negative() => {
                        use num_traits::ToPrimitive;
                        exp = q.to_integer().to_i64().ok_or_else(|| {
                            Error::ParseFieldElement(format!("{s}: exponent too large"))
                        })?;
                        i += 1;
                    }
                    _ => {
                        return Err(Error::ParseFieldElement(format!(
                            "{s}: expected integer exponent"
                        )))
                    }
                }
            }
        }
        let term = if has_z {
            FieldElement::zeta_pow(conductor, exp).scale(&coeff)
        } else {
            FieldElement::from_rational_in(coeff, conductor)
        };
        acc = acc.add(&term);
        if i >= toks.len() {
            return Ok(acc);
        }
        match toks[i] {
            Tok::Plus | Tok::Minus => continue,
            _ => {
                return Err(Error::ParseFieldElement(format!(
                    "{s}: expected + or - between terms"
                )))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fe5(s: &str) -> FieldElement {
        FieldElement::parse(s, 5).unwrap()
    }

    #[test]
    fn cyclotomic_polys() {
        // Phi_5 = 1 + x + x^2 + x^3 + x^4
        assert_eq!(
            cyclotomic_poly(5),
            vec![1, 1, 1, 1, 1].into_iter().map(BigInt::from).collect::<Vec<_>>()
        );
        // Phi_8 = 1 + x^4
        assert_eq!(
            cyclotomic_poly(8),
            vec![1, 0, 0, 0, 1].into_iter().map(BigInt::from).collect::<Vec<_>>()
        );
        // Phi_12 = 1 - x^2 + x^4
        assert_eq!(
            cyclotomic_poly(12),
            vec![1, 0, -1, 0, 1].into_iter().map(BigInt::from).collect::<Vec<_>>()
        );
        assert_eq!(cyclotomic_degree(20), 8);
        assert_eq!(cyclotomic_degree(1), 1);
    }

    #[test]
    fn product_of_golden_conjugates_is_minus_one() {
        // (z+z^4)(z^2+z^3) reduces to -1 in conductor 5
        let a = fe5("z + z^4");
        let b = fe5("z^2 + z^3");
        assert_eq!(a.mul(&b), FieldElement::from_integer(-1));
        // tau * tau' = -1
        let tau = FieldElement::tau(5);
        let taup = FieldElement::one_in(5).sub(&tau);
        assert_eq!(tau.mul(&taup), FieldElement::from_integer(-1));
        assert_eq!(tau.add(&taup), FieldElement::from_integer(1));
    }

    #[test]
    fn additive_identity() {
        let a = fe5("1/2 + 3*z - z^3");
        assert_eq!(a.add(&FieldElement::zero_in(5)), a);
        assert_eq!(a.sub(&a), FieldElement::zero_in(5));
    }

    #[test]
    fn embeddings() {
        // z5 + z5^4 = 2 cos(72 deg)
        let a = fe5("z + z^4");
        let iv = a.embed(64).unwrap();
        let want = 2.0 * (2.0 * std::f64::consts::PI / 5.0).cos();
        assert!((iv.midpoint_f64() - want).abs() < 1e-15);
        // rational embeds exactly
        let q = FieldElement::ratio(3, 2);
        let iv = q.embed(64).unwrap();
        assert_eq!(iv.lo, iv.hi);
        // sqrt(5) as z - z^2 - z^3 + z^4
        let s5 = fe5("z - z^2 - z^3 + z^4");
        let iv = s5.embed(64).unwrap();
        assert!((iv.midpoint_f64() - 5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn signs() {
        assert_eq!(FieldElement::zero_in(5).sign().unwrap(), 0);
        let tau = FieldElement::tau(5);
        assert_eq!(tau.sign().unwrap(), 1);
        let taup = FieldElement::one_in(5).sub(&tau);
        assert_eq!(taup.sign().unwrap(), -1);
    }

    #[test]
    fn non_real_rejected() {
        let z = FieldElement::zeta(5);
        assert!(!z.is_real());
        assert!(matches!(z.sign(), Err(Error::NonRealElement(_))));
        assert!(matches!(z.embed(64), Err(Error::NonRealElement(_))));
        assert!(fe5("z + z^4").is_real());
    }

    #[test]
    fn inverse_and_division() {
        let a = fe5("1 + 2*z - z^2");
        let inv = a.inv().unwrap();
        assert_eq!(a.mul(&inv), FieldElement::one_in(5));
        assert!(matches!(
            FieldElement::zero_in(5).inv(),
            Err(Error::DivisionByZero)
        ));
    }

    #[test]
    fn cross_conductor_arithmetic() {
        let tau5 = FieldElement::tau(5);
        let tau20 = FieldElement::tau(20);
        assert_eq!(tau5, tau20);
        let sum = tau5.add(&FieldElement::from_integer(1));
        assert_eq!(sum.conductor(), 5);
        // tau^2 = tau + 1
        assert_eq!(tau20.mul(&tau5), tau5.add(&FieldElement::one_in(1)));
    }

    #[test]
    fn trig_constructors() {
        let c = FieldElement::cos_2pi(1, 12); // cos 30 = sqrt(3)/2
        assert!((c.to_f64() - 3f64.sqrt() / 2.0).abs() < 1e-15);
        let s = FieldElement::sin_2pi(1, 20); // sin 18
        assert!((s.to_f64() - (std::f64::consts::PI / 10.0).sin()).abs() < 1e-15);
        let one = FieldElement::cos_2pi(1, 20)
            .pow(2)
            .add(&FieldElement::sin_2pi(1, 20).pow(2));
        assert_eq!(one, FieldElement::one_in(1));
    }

    #[test]
    fn parse_display_roundtrip() {
        for s in ["1/2 + 1/2*z^2 - z^3", "0", "-z", "3", "2/7*z^3 - 1", "z^9"] {
            let a = FieldElement::parse(s, 20).unwrap();
            let b = FieldElement::parse(&a.to_string(), 20).unwrap();
            assert_eq!(a, b, "roundtrip failed for {s}");
        }
        assert!(FieldElement::parse("z +", 5).is_err());
        assert!(FieldElement::parse("q", 5).is_err());
        assert!(FieldElement::parse("1/0", 5).is_err());
    }
}
