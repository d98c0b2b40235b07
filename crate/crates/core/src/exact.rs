//! Exact arithmetic in the real cyclotomic fields `Q(cos 2π/n)`.
//!
//! Every spherical function of a finite abelian group takes values
//! `cos(2πm/n)`, so the LPs built over finite pairs live in `Q(c)` with
//! `c = 2cos(2π/n)`. Elements are stored in the power basis `1, c, …, c^{d-1}`
//! as integer numerators over one positive common denominator. Because `c` is
//! an algebraic integer the reduction modulo its minimal polynomial never
//! introduces denominators. Signs are decided by a floating estimate with a
//! rigorous error bound, falling back to bisection on a rational isolating
//! interval of `c` when the estimate is inconclusive.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::scalar::{rational_text, Scalar};

/// The field `Q(2cos(2π/n))` together with the data needed to multiply and
/// compare its elements.
#[derive(Debug)]
pub struct RealCyclotomicField {
    order: u64,
    /// Monic minimal polynomial of `c`, lowest coefficient first.
    min_poly: Vec<BigInt>,
    /// `c^k` for `k = d ..= 2d-2`, reduced into the power basis.
    reductions: Vec<Vec<BigInt>>,
    /// Floating powers `c^0 … c^{d-1}`.
    powers: Vec<f64>,
    /// Rational interval containing `c` and no other root of `min_poly`.
    bracket: (BigRational, BigRational),
    /// `cos(2πm/n)` for `m = 0 … n-1`.
    cosines: Vec<ExactReal>,
}

fn field_cache() -> &'static Mutex<HashMap<u64, Arc<RealCyclotomicField>>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<RealCyclotomicField>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn poly_trim(p: &mut Vec<BigInt>) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn poly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

/// Exact division by a monic integer polynomial; panics if not exact.
fn poly_div_exact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    assert!(den[dd].is_one(), "divisor must be monic");
    if rem.len() < den.len() {
        return Vec::new();
    }
    let mut quot = vec![BigInt::zero(); rem.len() - dd];
    for k in (0..quot.len()).rev() {
        let coef = rem[k + dd].clone();
        if coef.is_zero() {
            continue;
        }
        for (j, d) in den.iter().enumerate() {
            rem[k + j] -= &coef * d;
        }
        quot[k] = coef;
    }
    assert!(rem.iter().all(|c| c.is_zero()), "inexact cyclotomic division");
    quot
}

fn cyclotomic(n: u64, memo: &mut HashMap<u64, Vec<BigInt>>) -> Vec<BigInt> {
    if let Some(p) = memo.get(&n) {
        return p.clone();
    }
    let mut p = vec![BigInt::zero(); n as usize + 1];
    p[0] = BigInt::from(-1);
    p[n as usize] = BigInt::one();
    for d in 1..n {
        if n.is_multiple_of(d) {
            let phi_d = cyclotomic(d, memo);
            p = poly_div_exact(&p, &phi_d);
        }
    }
    memo.insert(n, p.clone());
    p
}

/// Minimal polynomial of `2cos(2π/n)` over the integers.
fn min_poly_of_cosine(n: u64) -> Vec<BigInt> {
    match n {
        1 => return vec![BigInt::from(-2), BigInt::one()],
        2 => return vec![BigInt::from(2), BigInt::one()],
        _ => {}
    }
    let phi = cyclotomic(n, &mut HashMap::new());
    let m = (phi.len() - 1) / 2;
    // Φ_n(z) / z^m = e_m + Σ_j e_{m+j} (z^j + z^{-j}) and z^j + z^{-j} = V_j(z + 1/z).
    let mut v_prev = vec![BigInt::from(2)];
    let mut v_cur = vec![BigInt::zero(), BigInt::one()];
    let mut out = vec![phi[m].clone()];
    for j in 1..=m {
        let e = &phi[m + j];
        if out.len() < v_cur.len() {
            out.resize(v_cur.len(), BigInt::zero());
        }
        for (k, c) in v_cur.iter().enumerate() {
            out[k] += e * c;
        }
        let mut next = poly_mul(&[BigInt::zero(), BigInt::one()], &v_cur);
        for (k, c) in v_prev.iter().enumerate() {
            next[k] -= c;
        }
        v_prev = std::mem::replace(&mut v_cur, next);
    }
    poly_trim(&mut out);
    out
}

fn eval_rational(poly: &[BigInt], x: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    for c in poly.iter().rev() {
        acc = acc * x + BigRational::from_integer(c.clone());
    }
    acc
}

impl RealCyclotomicField {
    /// The shared field for `n`; constructed once per process.
    pub fn get(n: u64) -> Arc<Self> {
        assert!(n >= 1, "cyclotomic order must be positive");
        let mut cache = field_cache().lock().expect("field cache poisoned");
        if let Some(f) = cache.get(&n) {
            return Arc::clone(f);
        }
        let field = Arc::new(Self::build(n));
        cache.insert(n, Arc::clone(&field));
        field
    }

    fn build(n: u64) -> Self {
        let min_poly = min_poly_of_cosine(n);
        let d = min_poly.len() - 1;
        let mut reductions: Vec<Vec<BigInt>> = Vec::new();
        if d >= 1 {
            // c^d = -(m_0 + m_1 c + … + m_{d-1} c^{d-1})
            let mut cur: Vec<BigInt> = min_poly[..d].iter().map(|c| -c).collect();
            for _ in d..=(2 * d).saturating_sub(2) {
                reductions.push(cur.clone());
                // multiply by c and reduce
                let top = cur[d - 1].clone();
                let mut next = vec![BigInt::zero(); d];
                next[1..d].clone_from_slice(&cur[..d - 1]);
                for k in 0..d {
                    next[k] -= &top * &min_poly[k];
                }
                cur = next;
            }
        }
        let gen = 2.0 * (2.0 * std::f64::consts::PI / n as f64).cos();
        let powers = (0..d).map(|k| gen.powi(k as i32)).collect();
        let bracket = if d == 1 {
            let root = BigRational::from_integer(-min_poly[0].clone());
            (root.clone(), root)
        } else {
            let eps = 1e-9;
            let lo = BigRational::from_float(gen - eps).expect("finite");
            let hi = BigRational::from_float(gen + eps).expect("finite");
            let slo = eval_rational(&min_poly, &lo).signum();
            let shi = eval_rational(&min_poly, &hi).signum();
            assert!(slo != shi, "failed to isolate 2cos(2pi/{n})");
            (lo, hi)
        };
        let mut field = RealCyclotomicField {
            order: n,
            min_poly,
            reductions,
            powers,
            bracket,
            cosines: Vec::new(),
        };
        field.cosines = field.cosine_table();
        field
    }

    fn cosine_table(&self) -> Vec<ExactReal> {
        // 2cos(2πm/n) = V_m(c) with V_0 = 2, V_1 = c, V_{m+1} = c V_m - V_{m-1}.
        let n = self.order as usize;
        let d = self.degree();
        let mut table = Vec::with_capacity(n);
        let two = vec![BigInt::from(2)];
        let c = if d == 1 {
            vec![-self.min_poly[0].clone()]
        } else {
            vec![BigInt::zero(), BigInt::one()]
        };
        let mut prev = two;
        let mut cur = c.clone();
        for m in 0..n {
            let v = if m == 0 { prev.clone() } else { cur.clone() };
            table.push(ExactReal::from_parts_in(None, v, BigInt::from(2)));
            if m >= 1 {
                let mut next = self.reduce(poly_mul(&c, &cur));
                next.resize(next.len().max(prev.len()), BigInt::zero());
                for (k, p) in prev.iter().enumerate() {
                    next[k] -= p;
                }
                poly_trim(&mut next);
                prev = std::mem::replace(&mut cur, next);
            }
        }
        table
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn degree(&self) -> usize {
        self.min_poly.len() - 1
    }

    pub fn min_poly(&self) -> &[BigInt] {
        &self.min_poly
    }

    /// `cos(2πm/n)` as an exact field element.
    pub fn cos_2pi(self: &Arc<Self>, m: i64) -> ExactReal {
        let n = self.order as i64;
        let idx = m.rem_euclid(n) as usize;
        let mut v = self.cosines[idx].clone();
        if v.num.len() > 1 {
            v.field = Some(Arc::clone(self));
        }
        v
    }

    fn reduce(&self, mut poly: Vec<BigInt>) -> Vec<BigInt> {
        let d = self.degree();
        if poly.len() > d {
            let high: Vec<BigInt> = poly.drain(d..).collect();
            poly.resize(d, BigInt::zero());
            for (k, coef) in high.into_iter().enumerate() {
                if coef.is_zero() {
                    continue;
                }
                for (slot, r) in poly.iter_mut().zip(&self.reductions[k]) {
                    *slot += &coef * r;
                }
            }
        }
        poly_trim(&mut poly);
        poly
    }

    fn sign_of(&self, num: &[BigInt]) -> Ordering {
        if num.is_empty() {
            return Ordering::Equal;
        }
        if num.len() == 1 {
            return num[0].sign().into_ordering();
        }
        let mut value = 0.0;
        let mut magnitude = 0.0;
        for (c, p) in num.iter().zip(&self.powers) {
            let t = c.to_f64().unwrap_or(f64::INFINITY) * p;
            value += t;
            magnitude += t.abs();
        }
        if value.is_finite() && magnitude.is_finite() && value.abs() > 1e-10 * magnitude {
            return value.partial_cmp(&0.0).expect("finite");
        }
        self.sign_by_bisection(num)
    }

    fn sign_by_bisection(&self, num: &[BigInt]) -> Ordering {
        let (mut lo, mut hi) = self.bracket.clone();
        let three = BigRational::from_integer(BigInt::from(3));
        // Lipschitz bound of the element polynomial on |x| <= 3.
        let mut lipschitz = BigRational::zero();
        let mut pow = BigRational::one();
        for (k, c) in num.iter().enumerate().skip(1) {
            lipschitz += BigRational::from_integer(BigInt::from(k) * c.abs()) * &pow;
            pow *= &three;
        }
        let two = BigRational::from_integer(BigInt::from(2));
        let lo_sign = eval_rational(&self.min_poly, &lo).signum();
        loop {
            let mid = (&lo + &hi) / &two;
            let val = eval_rational(num, &mid);
            let err = &lipschitz * (&hi - &lo) / &two;
            if val.abs() > err {
                return if val.is_positive() { Ordering::Greater } else { Ordering::Less };
            }
            let mid_sign = eval_rational(&self.min_poly, &mid).signum();
            if mid_sign.is_zero() {
                // mid is the root itself (only possible in degree one)
                return eval_rational(num, &mid).signum().numer().sign().into_ordering();
            }
            if mid_sign == lo_sign {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }
}

trait SignOrdering {
    fn into_ordering(self) -> Ordering;
}

impl SignOrdering for num_bigint::Sign {
    fn into_ordering(self) -> Ordering {
        match self {
            num_bigint::Sign::Minus => Ordering::Less,
            num_bigint::Sign::NoSign => Ordering::Equal,
            num_bigint::Sign::Plus => Ordering::Greater,
        }
    }
}

/// An element of a real cyclotomic field, or a plain rational when no field
/// is attached.
#[derive(Clone)]
pub struct ExactReal {
    field: Option<Arc<RealCyclotomicField>>,
    /// Power-basis numerators; empty means zero.
    num: Vec<BigInt>,
    /// Positive, coprime to the numerators.
    den: BigInt,
}

impl ExactReal {
    fn from_parts_in(field: Option<Arc<RealCyclotomicField>>, mut num: Vec<BigInt>, mut den: BigInt) -> Self {
        poly_trim(&mut num);
        if num.is_empty() {
            return ExactReal { field: None, num, den: BigInt::one() };
        }
        if den.is_negative() {
            den = -den;
            for c in &mut num {
                *c = -&*c;
            }
        }
        let mut g = den.clone();
        for c in &num {
            if g.is_one() {
                break;
            }
            g = g.gcd(c);
        }
        if !g.is_one() {
            den /= &g;
            for c in &mut num {
                *c /= &g;
            }
        }
        let field = if num.len() > 1 { field } else { None };
        ExactReal { field, num, den }
    }

    pub fn rational(r: &BigRational) -> Self {
        Self::from_parts_in(None, vec![r.numer().clone()], r.denom().clone())
    }

    /// The value as a rational, when it lies in `Q`.
    pub fn as_rational(&self) -> Option<BigRational> {
        match self.num.len() {
            0 => Some(BigRational::zero()),
            1 => Some(BigRational::new(self.num[0].clone(), self.den.clone())),
            _ => None,
        }
    }

    pub fn field_order(&self) -> Option<u64> {
        self.field.as_ref().map(|f| f.order)
    }

    /// Power-basis coefficients as rationals.
    pub fn coefficients(&self) -> Vec<BigRational> {
        self.num
            .iter()
            .map(|c| BigRational::new(c.clone(), self.den.clone()))
            .collect()
    }

    /// Build `Σ coeffs[k] c^k` in the field of order `n`.
    pub fn from_coefficients(n: u64, coeffs: &[BigRational]) -> Option<Self> {
        let field = RealCyclotomicField::get(n);
        if coeffs.len() > field.degree().max(1) {
            return None;
        }
        let mut den = BigInt::one();
        for c in coeffs {
            den = den.lcm(c.denom());
        }
        let num = coeffs
            .iter()
            .map(|c| c.numer() * (&den / c.denom()))
            .collect();
        Some(Self::from_parts_in(Some(field), num, den))
    }

    fn pick_field(
        a: &Option<Arc<RealCyclotomicField>>,
        b: &Option<Arc<RealCyclotomicField>>,
    ) -> Option<Arc<RealCyclotomicField>> {
        match (a, b) {
            (Some(x), Some(y)) => {
                assert_eq!(x.order, y.order, "mixing elements of different cyclotomic fields");
                Some(Arc::clone(x))
            }
            (Some(x), None) | (None, Some(x)) => Some(Arc::clone(x)),
            (None, None) => None,
        }
    }

    fn add_ref(&self, other: &Self) -> Self {
        if self.num.is_empty() {
            return other.clone();
        }
        if other.num.is_empty() {
            return self.clone();
        }
        let field = Self::pick_field(&self.field, &other.field);
        let len = self.num.len().max(other.num.len());
        let mut num = vec![BigInt::zero(); len];
        let den = if self.den == other.den {
            for (k, c) in self.num.iter().enumerate() {
                num[k] += c;
            }
            for (k, c) in other.num.iter().enumerate() {
                num[k] += c;
            }
            self.den.clone()
        } else {
            let l = self.den.lcm(&other.den);
            let fa = &l / &self.den;
            let fb = &l / &other.den;
            for (k, c) in self.num.iter().enumerate() {
                num[k] += c * &fa;
            }
            for (k, c) in other.num.iter().enumerate() {
                num[k] += c * &fb;
            }
            l
        };
        Self::from_parts_in(field, num, den)
    }

    fn neg_ref(&self) -> Self {
        ExactReal {
            field: self.field.clone(),
            num: self.num.iter().map(|c| -c).collect(),
            den: self.den.clone(),
        }
    }

    fn mul_ref(&self, other: &Self) -> Self {
        if self.num.is_empty() || other.num.is_empty() {
            return Self::zero();
        }
        let field = Self::pick_field(&self.field, &other.field);
        let prod = poly_mul(&self.num, &other.num);
        let num = match &field {
            Some(f) => f.reduce(prod),
            None => prod,
        };
        Self::from_parts_in(field, num, &self.den * &other.den)
    }

    fn inverse(&self) -> Self {
        assert!(!self.num.is_empty(), "division by zero");
        if self.num.len() == 1 {
            return Self::from_parts_in(None, vec![self.den.clone()], self.num[0].clone());
        }
        let field = self.field.as_ref().expect("multi-term element carries its field");
        let d = field.degree();
        // Column j of the multiplication matrix is self · c^j.
        let mut matrix: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); d + 1]; d];
        let mut col = self.num.clone();
        #[allow(clippy::needless_range_loop)]
        for j in 0..d {
            for (i, c) in col.iter().enumerate() {
                matrix[i][j] = BigRational::new(c.clone(), self.den.clone());
            }
            let mut shifted = vec![BigInt::zero()];
            shifted.extend(col.iter().cloned());
            col = field.reduce(shifted);
        }
        matrix[0][d] = BigRational::one();
        // Gauss–Jordan on the augmented system.
        for pivot in 0..d {
            let row = (pivot..d)
                .find(|&r| !matrix[r][pivot].is_zero())
                .expect("nonzero field element has an invertible multiplication matrix");
            matrix.swap(pivot, row);
            let inv = matrix[pivot][pivot].recip();
            for v in &mut matrix[pivot] {
                *v *= &inv;
            }
            let pivot_row = matrix[pivot].clone();
            for (r, row) in matrix.iter_mut().enumerate() {
                if r == pivot || row[pivot].is_zero() {
                    continue;
                }
                let factor = row[pivot].clone();
                for (v, p) in row.iter_mut().zip(&pivot_row) {
                    *v -= &factor * p;
                }
            }
        }
        let coeffs: Vec<BigRational> = matrix.iter().map(|r| r[d].clone()).collect();
        let mut den = BigInt::one();
        for c in &coeffs {
            den = den.lcm(c.denom());
        }
        let num = coeffs.iter().map(|c| c.numer() * (&den / c.denom())).collect();
        Self::from_parts_in(Some(Arc::clone(field)), num, den)
    }

    fn sign_exact(&self) -> Ordering {
        match (&self.field, self.num.len()) {
            (_, 0) => Ordering::Equal,
            (_, 1) => self.num[0].sign().into_ordering(),
            (Some(f), _) => f.sign_of(&self.num),
            (None, _) => unreachable!("multi-term element without field"),
        }
    }
}

impl PartialEq for ExactReal {
    fn eq(&self, other: &Self) -> bool {
        if self.num != other.num || self.den != other.den {
            return false;
        }
        match (&self.field, &other.field) {
            (Some(a), Some(b)) => a.order == b.order,
            _ => true,
        }
    }
}

impl Eq for ExactReal {}

impl PartialOrd for ExactReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExactReal {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sub_ref(other).sign_exact()
    }
}

impl ExactReal {
    fn sub_ref(&self, other: &Self) -> Self {
        self.add_ref(&other.neg_ref())
    }
}

impl fmt::Debug for ExactReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for ExactReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_rational() {
            Some(r) => write!(f, "{}", rational_text(&r)),
            None => {
                let order = self.field.as_ref().map(|x| x.order).unwrap_or(0);
                let parts: Vec<String> = self.coefficients().iter().map(rational_text).collect();
                write!(f, "cyc{}({})", order, parts.join(","))
            }
        }
    }
}

/// Parse the canonical text produced by `Display`.
pub fn parse_exact(text: &str) -> Option<ExactReal> {
    let text = text.trim();
    if let Some(rest) = text.strip_prefix("cyc") {
        let (order, body) = rest.split_once('(')?;
        let body = body.strip_suffix(')')?;
        let n: u64 = order.parse().ok()?;
        if n == 0 {
            return None;
        }
        let coeffs: Option<Vec<BigRational>> = body.split(',').map(crate::scalar::parse_rational).collect();
        return ExactReal::from_coefficients(n, &coeffs?);
    }
    crate::scalar::parse_rational(text).map(|r| ExactReal::rational(&r))
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $inner:ident) => {
        impl $trait<ExactReal> for ExactReal {
            type Output = ExactReal;
            fn $method(self, rhs: ExactReal) -> ExactReal {
                self.$inner(&rhs)
            }
        }
        impl<'a> $trait<&'a ExactReal> for ExactReal {
            type Output = ExactReal;
            fn $method(self, rhs: &'a ExactReal) -> ExactReal {
                self.$inner(rhs)
            }
        }
        impl<'a, 'b> $trait<&'a ExactReal> for &'b ExactReal {
            type Output = ExactReal;
            fn $method(self, rhs: &'a ExactReal) -> ExactReal {
                self.$inner(rhs)
            }
        }
    };
}

impl ExactReal {
    fn div_ref(&self, other: &Self) -> Self {
        self.mul_ref(&other.inverse())
    }
}

forward_binop!(Add, add, add_ref);
forward_binop!(Sub, sub, sub_ref);
forward_binop!(Mul, mul, mul_ref);
forward_binop!(Div, div, div_ref);

impl Neg for ExactReal {
    type Output = ExactReal;
    fn neg(self) -> ExactReal {
        self.neg_ref()
    }
}

impl Neg for &ExactReal {
    type Output = ExactReal;
    fn neg(self) -> ExactReal {
        self.neg_ref()
    }
}

impl Scalar for ExactReal {
    const EXACT: bool = true;

    fn zero() -> Self {
        ExactReal { field: None, num: Vec::new(), den: BigInt::one() }
    }

    fn one() -> Self {
        ExactReal { field: None, num: vec![BigInt::one()], den: BigInt::one() }
    }

    fn from_rational(r: &BigRational) -> Self {
        Self::rational(r)
    }

    fn to_f64(&self) -> f64 {
        match &self.field {
            None => self
                .as_rational()
                .and_then(|r| r.to_f64())
                .unwrap_or(f64::NAN),
            Some(f) => {
                let den = self.den.to_f64().unwrap_or(f64::INFINITY);
                self.num
                    .iter()
                    .zip(&f.powers)
                    .map(|(c, p)| c.to_f64().unwrap_or(f64::NAN) * p)
                    .sum::<f64>()
                    / den
            }
        }
    }

    fn cos_2pi_frac(m: i64, n: u64) -> Self {
        RealCyclotomicField::get(n).cos_2pi(m)
    }

    fn from_f64(_x: f64) -> Option<Self> {
        None
    }

    fn sign_tol(&self, _tol: f64) -> Ordering {
        self.sign_exact()
    }

    fn is_zero(&self) -> bool {
        self.num.is_empty()
    }

    fn sub_mul_assign(&mut self, a: &Self, b: &Self) {
        if a.num.is_empty() || b.num.is_empty() {
            return;
        }
        let prod = a.mul_ref(b);
        *self = self.sub_ref(&prod);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> ExactReal {
        ExactReal::rational(&BigRational::new(p.into(), d.into()))
    }

    #[test]
    fn minimal_polynomials_match_known_values() {
        // 2cos(2π/5) = (√5 - 1)/2 has minimal polynomial x² + x - 1.
        let f5 = RealCyclotomicField::get(5);
        let mp: Vec<i64> = f5.min_poly().iter().map(|c| c.to_i64().unwrap()).collect();
        assert_eq!(mp, vec![-1, 1, 1]);
        // 2cos(2π/7): x³ + x² - 2x - 1.
        let f7 = RealCyclotomicField::get(7);
        let mp: Vec<i64> = f7.min_poly().iter().map(|c| c.to_i64().unwrap()).collect();
        assert_eq!(mp, vec![-1, -2, 1, 1]);
        for n in 1..=40u64 {
            let f = RealCyclotomicField::get(n);
            let expected = if n <= 2 { 1 } else { (1..=n).filter(|k| k.gcd(&n) == 1).count() / 2 };
            assert_eq!(f.degree(), expected, "degree for n={n}");
        }
    }

    #[test]
    fn cosines_are_exact_and_agree_with_floats() {
        for n in 1..=24u64 {
            let f = RealCyclotomicField::get(n);
            for m in 0..n as i64 {
                let c = f.cos_2pi(m);
                let expected = (2.0 * std::f64::consts::PI * m as f64 / n as f64).cos();
                assert!((c.to_f64() - expected).abs() < 1e-12, "n={n} m={m}");
            }
        }
        let f6 = RealCyclotomicField::get(6);
        assert_eq!(f6.cos_2pi(2), q(-1, 2));
        let f8 = RealCyclotomicField::get(8);
        let c = f8.cos_2pi(1);
        // cos²(π/4) = 1/2 exactly
        assert_eq!(&c * &c, q(1, 2));
    }

    #[test]
    fn inverse_and_sign() {
        let f = RealCyclotomicField::get(13);
        for m in 1..13 {
            let c = f.cos_2pi(m);
            let x = c.clone() + q(1, 3);
            let inv = ExactReal::one() / &x;
            assert_eq!(x.clone() * &inv, ExactReal::one());
            assert_eq!(x.sign(), if x.to_f64() > 0.0 { Ordering::Greater } else { Ordering::Less });
        }
    }

    #[test]
    fn tiny_values_resolved_by_bisection() {
        let f = RealCyclotomicField::get(7);
        let c1 = f.cos_2pi(1);
        let r = BigRational::from_float(c1.to_f64()).unwrap();
        // difference between cos(2π/7) and its nearest double is ~1e-17
        let diff = c1.clone() - ExactReal::rational(&r);
        assert_ne!(diff.sign(), Ordering::Equal);
        let back = diff.clone() + ExactReal::rational(&r);
        assert_eq!(back, c1);
        // the sign from bisection must match a high-precision evaluation
        let hp = f.sign_by_bisection(&diff.num);
        assert_eq!(hp, diff.sign());
    }

    #[test]
    fn text_round_trip() {
        let f = RealCyclotomicField::get(9);
        let x = f.cos_2pi(2) * q(-7, 3) + q(5, 2);
        let text = x.to_string();
        assert!(text.starts_with("cyc9("));
        assert_eq!(parse_exact(&text), Some(x));
        assert_eq!(parse_exact("3/4"), Some(q(3, 4)));
    }
}
