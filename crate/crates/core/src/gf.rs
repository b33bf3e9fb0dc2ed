//! Arithmetic in GF(p^n).
//!
//! Elements are encoded as integers `0..q` by reading the coefficient vector
//! of the residue polynomial in base `p` (constant term lowest). For the
//! orders used by the MOLS constructions the reduction polynomial is the
//! Conway polynomial; other prime powers fall back to the smallest monic
//! irreducible in the same encoding.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not a prime power")]
    NotPrimePower(u32),
    #[error("order {0} is too large for table-driven arithmetic")]
    TooLarge(u32),
    #[error("reduction polynomial {0:?} is not irreducible over GF({1})")]
    Reducible(Vec<u32>, u32),
}

/// An element of a [`GaloisField`], in base-`p` coefficient encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FieldElement(pub u32);

/// Coefficients (constant term first, monic) of the Conway polynomials used.
const CONWAY: &[(u32, u32, &[u32])] = &[
    (2, 2, &[1, 1, 1]),
    (2, 3, &[1, 1, 0, 1]),
    (2, 4, &[1, 1, 0, 0, 1]),
    (2, 5, &[1, 0, 1, 0, 0, 1]),
    (2, 6, &[1, 1, 0, 1, 1, 0, 1]),
    (3, 2, &[2, 2, 1]),
    (3, 3, &[1, 2, 0, 1]),
    (5, 2, &[2, 4, 1]),
    (7, 2, &[3, 6, 1]),
];

const MAX_ORDER: u32 = 1 << 16;

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// `Some((p, n))` with `q = p^n`, or `None` when `q` is not a prime power.
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let mut rest = q;
    let mut n = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        n += 1;
    }
    (rest == 1).then_some((p, n))
}

#[derive(Debug, Clone)]
pub struct GaloisField {
    p: u32,
    n: u32,
    q: u32,
    modulus: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl GaloisField {
    /// The field of order `q`, using the Conway polynomial when tabulated.
    pub fn new(q: u32) -> Result<Self, FieldError> {
        let (p, n) = prime_power(q).ok_or(FieldError::NotPrimePower(q))?;
        if q > MAX_ORDER {
            return Err(FieldError::TooLarge(q));
        }
        let modulus = match CONWAY.iter().find(|&&(cp, cn, _)| cp == p && cn == n) {
            Some((_, _, c)) => c.to_vec(),
            None if n == 1 => vec![0, 1],
            None => smallest_irreducible(p, n),
        };
        Self::with_modulus(p, modulus)
    }

    /// The field `GF(p)[x] / (modulus)`. `modulus` is monic, constant term first.
    pub fn with_modulus(p: u32, modulus: Vec<u32>) -> Result<Self, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrimePower(p));
        }
        let n = (modulus.len() - 1) as u32;
        if modulus.last() != Some(&1) || !is_irreducible(p, &modulus) {
            return Err(FieldError::Reducible(modulus, p));
        }
        let q = p
            .checked_pow(n)
            .filter(|&q| q <= MAX_ORDER)
            .ok_or(FieldError::TooLarge(p))?;
        let mut field = GaloisField {
            p,
            n,
            q,
            modulus,
            exp: Vec::new(),
            log: Vec::new(),
        };
        let g = (1..q)
            .find(|&g| field.slow_order(g) == q - 1)
            .expect("multiplicative group of a finite field is cyclic");
        let mut exp = Vec::with_capacity(q as usize - 1);
        let mut log = vec![0u32; q as usize];
        let mut x = 1;
        for e in 0..q - 1 {
            exp.push(x);
            log[x as usize] = e;
            x = field.slow_mul(x, g);
        }
        field.exp = exp;
        field.log = log;
        Ok(field)
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.n
    }

    /// Reduction polynomial, constant term first.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement(0)
    }

    pub fn one(&self) -> FieldElement {
        FieldElement(1)
    }

    /// Elements in encoding order `0, 1, ..., q-1`.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.q).map(FieldElement)
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let (mut x, mut y) = (a.0, b.0);
        let (mut out, mut place) = (0, 1);
        for _ in 0..self.n {
            out += ((x % self.p + y % self.p) % self.p) * place;
            x /= self.p;
            y /= self.p;
            place *= self.p;
        }
        FieldElement(out)
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        let mut x = a.0;
        let (mut out, mut place) = (0, 1);
        for _ in 0..self.n {
            out += ((self.p - x % self.p) % self.p) * place;
            x /= self.p;
            place *= self.p;
        }
        FieldElement(out)
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.0 == 0 || b.0 == 0 {
            return FieldElement(0);
        }
        let e = (self.log[a.0 as usize] + self.log[b.0 as usize]) % (self.q - 1);
        FieldElement(self.exp[e as usize])
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: FieldElement) -> Option<FieldElement> {
        if a.0 == 0 {
            return None;
        }
        let e = (self.q - 1 - self.log[a.0 as usize]) % (self.q - 1);
        Some(FieldElement(self.exp[e as usize]))
    }

    fn digits(&self, mut x: u32) -> Vec<u32> {
        (0..self.n)
            .map(|_| {
                let d = x % self.p;
                x /= self.p;
                d
            })
            .collect()
    }

    fn pack_digits(&self, digits: &[u32]) -> u32 {
        digits.iter().rev().fold(0, |acc, &d| acc * self.p + d)
    }

    fn slow_mul(&self, a: u32, b: u32) -> u32 {
        let prod = poly_mul(self.p, &self.digits(a), &self.digits(b));
        let rem = poly_rem(self.p, &prod, &self.modulus);
        let mut digits = rem;
        digits.resize(self.n as usize, 0);
        self.pack_digits(&digits)
    }

    fn slow_order(&self, g: u32) -> u32 {
        let mut x = g;
        let mut order = 1;
        while x != 1 {
            x = self.slow_mul(x, g);
            order += 1;
            if order > self.q {
                return 0;
            }
        }
        order
    }
}

fn trim(mut a: Vec<u32>) -> Vec<u32> {
    while a.len() > 1 && a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn poly_mul(p: u32, a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = vec![0u32; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    trim(out)
}

/// Remainder of `a` modulo the monic polynomial `m`.
fn poly_rem(p: u32, a: &[u32], m: &[u32]) -> Vec<u32> {
    let mut r = trim(a.to_vec());
    let dm = m.len() - 1;
    while r.len() > dm && !(r.len() == 1 && r[0] == 0) {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        for (i, &c) in m.iter().enumerate() {
            r[shift + i] = (r[shift + i] + p * p - (lead * c) % p) % p;
        }
        r = trim(r);
        if r.len() - 1 < dm {
            break;
        }
    }
    r
}

fn is_irreducible(p: u32, f: &[u32]) -> bool {
    let n = f.len() - 1;
    if n == 0 {
        return false;
    }
    for d in 1..=n / 2 {
        // every monic polynomial of degree d
        for code in 0..p.pow(d as u32) {
            let mut g: Vec<u32> = (0..d)
                .scan(code, |c, _| {
                    let digit = *c % p;
                    *c /= p;
                    Some(digit)
                })
                .collect();
            g.push(1);
            let r = poly_rem(p, f, &g);
            if r.iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn smallest_irreducible(p: u32, n: u32) -> Vec<u32> {
    (0..p.pow(n))
        .map(|code| {
            let mut f: Vec<u32> = (0..n)
                .scan(code, |c, _| {
                    let digit = *c % p;
                    *c /= p;
                    Some(digit)
                })
                .collect();
            f.push(1);
            f
        })
        .find(|f| is_irreducible(p, f))
        .expect("irreducible polynomials exist in every degree")
}
