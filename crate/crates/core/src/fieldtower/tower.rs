use rand::Rng;
use serde::{Deserialize, Serialize};

use super::poly::{self, Poly};
use crate::error::{Error, Result};

/// Largest field order accepted by [`FieldTower::build`]: 9^6.
pub const DEFAULT_ORDER_BOUND: u64 = 531_441;

pub(crate) const NO_LOG: u32 = u32::MAX;

/// An element of F_(q^6), stored as its canonical integer: the coefficient
/// vector of its polynomial representative read as base-p digits, constant
/// term least significant. Zero is 0 and one is 1.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct Fe(pub u32);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn value(self) -> u32 {
        self.0
    }
}

impl std::fmt::Display for Fe {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// F_p ⊂ F_q ⊂ F_(q^2), F_(q^3) ⊂ F_(q^6) with q = p^h, all realised inside the
/// big field F_(p^(6h)) through discrete-log and Zech tables.
///
/// Immutable once built; share it by reference.
#[derive(Clone)]
pub struct FieldTower {
    pub(crate) p: u32,
    pub(crate) h: u32,
    pub(crate) q: u64,
    pub(crate) n: u32,
    pub(crate) order: u32,
    pub(crate) modulus: Vec<u32>,
    pub(crate) generator: Fe,
    pub(crate) log: Vec<u32>,
    pub(crate) exp: Vec<u32>,
    pub(crate) zech: Vec<u32>,
    pub(crate) masks: Vec<u8>,
    fq_elems: Vec<Fe>,
    fq3_basis: [Fe; 3],
    fq3_coords: Vec<[Fe; 3]>,
    fq_basis_fp: Vec<Fe>,
    fq_fp_coords: Vec<u32>,
}

impl std::fmt::Debug for FieldTower {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FieldTower")
            .field("p", &self.p)
            .field("h", &self.h)
            .field("modulus", &self.modulus)
            .field("generator", &self.generator)
            .finish()
    }
}

fn mask_bit(k: u32) -> u8 {
    match k {
        1 => 1,
        2 => 2,
        3 => 4,
        6 => 8,
        _ => 0,
    }
}

pub(crate) fn is_prime(n: u32) -> bool {
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

pub(crate) fn validate_params(p: u32, h: u32, bound: u64) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p == 2 {
        return Err(Error::EvenCharacteristic);
    }
    if h == 0 {
        return Err(Error::ZeroDegree);
    }
    let n = 6 * h;
    let order = (p as u64).checked_pow(n);
    match order {
        Some(o) if o <= bound && o < u32::MAX as u64 => Ok(()),
        _ => Err(Error::FieldTooLarge { p, n, bound }),
    }
}

/// Lexicographically smallest monic irreducible of degree n over F_p, with
/// coefficients compared constant term first.
pub(crate) fn smallest_irreducible(p: u32, n: u32) -> Poly {
    let total = (p as u64).pow(n);
    for idx in 0..total {
        // c_0 is the most significant digit of idx so that the scan order is
        // lexicographic in (c_0, c_1, ..., c_{n-1}).
        let mut f: Poly = (0..n)
            .map(|i| ((idx / (p as u64).pow(n - 1 - i)) % p as u64) as u32)
            .collect();
        f.push(1);
        if f[0] != 0 && poly::is_irreducible(&f, p) {
            return f;
        }
    }
    unreachable!("an irreducible polynomial of every degree exists")
}

pub(crate) fn to_poly(x: u32, p: u32, n: u32) -> Poly {
    let mut v = Vec::with_capacity(n as usize);
    let mut r = x;
    for _ in 0..n {
        v.push(r % p);
        r /= p;
    }
    poly::trim(v)
}

pub(crate) fn from_poly(a: &[u32], p: u32) -> u32 {
    a.iter().rev().fold(0u32, |acc, &c| acc * p + c)
}

struct Tables {
    generator: Fe,
    log: Vec<u32>,
    exp: Vec<u32>,
    zech: Vec<u32>,
}

fn build_tables(p: u32, n: u32, modulus: &[u32]) -> Tables {
    let order = p.pow(n);
    let m = (order - 1) as u64;
    let factors = poly::prime_factors(m);
    let one: Poly = vec![1];
    let generator = (2..order)
        .find(|&c| {
            let g = to_poly(c, p, n);
            factors
                .iter()
                .all(|&r| poly::pow_mod(&g, m / r, modulus, p) != one)
        })
        .expect("multiplicative group is cyclic");
    let gpoly = to_poly(generator, p, n);

    let m = m as usize;
    let mut exp = vec![0u32; 2 * m];
    let mut log = vec![NO_LOG; order as usize];
    let mut cur: Poly = vec![1];
    for i in 0..m {
        let v = from_poly(&cur, p);
        exp[i] = v;
        exp[i + m] = v;
        log[v as usize] = i as u32;
        cur = poly::mul_mod(&cur, &gpoly, modulus, p);
    }
    let zech = (0..m)
        .map(|k| {
            let x = exp[k];
            let c0 = x % p;
            let y = x - c0 + (c0 + 1) % p;
            log[y as usize]
        })
        .collect();
    Tables {
        generator: Fe(generator),
        log,
        exp,
        zech,
    }
}

impl FieldTower {
    /// Builds the tower for q = p^h with the default size bound.
    pub fn build(p: u32, h: u32) -> Result<Self> {
        Self::build_with_bound(p, h, DEFAULT_ORDER_BOUND)
    }

    pub fn build_with_bound(p: u32, h: u32, bound: u64) -> Result<Self> {
        validate_params(p, h, bound)?;
        let n = 6 * h;
        let modulus = smallest_irreducible(p, n);
        let t = build_tables(p, n, &modulus);
        Ok(Self::assemble(p, h, modulus, t.generator, t.log, t.exp, t.zech))
    }

    pub(crate) fn assemble(
        p: u32,
        h: u32,
        modulus: Vec<u32>,
        generator: Fe,
        log: Vec<u32>,
        exp: Vec<u32>,
        zech: Vec<u32>,
    ) -> Self {
        let n = 6 * h;
        let order = p.pow(n);
        let q = (p as u64).pow(h);
        let m = order - 1;
        let mut masks = vec![0u8; order as usize];
        masks[0] = 0x0f;
        for k in [1u32, 2, 3, 6] {
            let step = (m as u64 / (q.pow(k) - 1)) as u32;
            for x in 1..order as usize {
                if log[x].is_multiple_of(step) {
                    masks[x] |= mask_bit(k);
                }
            }
        }
        let mut t = FieldTower {
            p,
            h,
            q,
            n,
            order,
            modulus,
            generator,
            log,
            exp,
            zech,
            masks,
            fq_elems: Vec::new(),
            fq3_basis: [Fe::ONE; 3],
            fq3_coords: Vec::new(),
            fq_basis_fp: Vec::new(),
            fq_fp_coords: Vec::new(),
        };
        t.fq_elems = (0..order)
            .map(Fe)
            .filter(|&x| t.in_subfield(x, 1))
            .collect();

        let theta = t.subfield_generator(3);
        t.fq3_basis = [Fe::ONE, theta, t.mul(theta, theta)];
        let q3 = q.pow(3) as usize;
        let mut coords = vec![[Fe::ZERO; 3]; q3];
        let elems = t.fq_elems.clone();
        for &c0 in &elems {
            for &c1 in &elems {
                for &c2 in &elems {
                    let x = t.add(
                        c0,
                        t.add(t.mul(c1, t.fq3_basis[1]), t.mul(c2, t.fq3_basis[2])),
                    );
                    coords[t.dense_index(x, 3)] = [c0, c1, c2];
                }
            }
        }
        t.fq3_coords = coords;

        let zeta = t.subfield_generator(1);
        let mut basis = vec![Fe::ONE];
        for _ in 1..h {
            let last = *basis.last().unwrap();
            basis.push(t.mul(last, zeta));
        }
        t.fq_basis_fp = basis;
        let mut fpc = vec![0u32; q as usize * h as usize];
        for idx in 0..q {
            let digits: Vec<u32> = (0..h)
                .map(|j| ((idx / (p as u64).pow(j)) % p as u64) as u32)
                .collect();
            let x = digits
                .iter()
                .zip(&t.fq_basis_fp)
                .fold(Fe::ZERO, |acc, (&d, &b)| t.add(acc, t.mul(Fe(d), b)));
            let di = t.dense_index(x, 1);
            fpc[di * h as usize..(di + 1) * h as usize].copy_from_slice(&digits);
        }
        t.fq_fp_coords = fpc;
        t
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }
    #[inline]
    pub fn h(&self) -> u32 {
        self.h
    }
    #[inline]
    pub fn q(&self) -> u64 {
        self.q
    }
    /// Degree 6h of F_(q^6) over F_p.
    pub fn degree(&self) -> u32 {
        self.n
    }
    /// |F_(q^6)|.
    pub fn order(&self) -> u32 {
        self.order
    }
    /// Monic modulus, constant coefficient first.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }
    /// Primitive element of smallest canonical encoding.
    pub fn generator(&self) -> Fe {
        self.generator
    }

    /// Element of F_p with the given residue.
    #[inline]
    pub fn fp(&self, v: i64) -> Fe {
        Fe(v.rem_euclid(self.p as i64) as u32)
    }

    pub fn coeffs(&self, x: Fe) -> Vec<u32> {
        let mut v = to_poly(x.0, self.p, self.n);
        v.resize(self.n as usize, 0);
        v
    }

    pub fn from_coeffs(&self, c: &[u32]) -> Fe {
        Fe(from_poly(c, self.p))
    }

    /// Discrete log to base [`generator`](Self::generator); `None` for zero.
    #[inline]
    pub fn log(&self, x: Fe) -> Option<u32> {
        if x.0 == 0 {
            None
        } else {
            Some(self.log[x.0 as usize])
        }
    }

    #[inline]
    pub fn exp(&self, e: u64) -> Fe {
        let m = (self.order - 1) as u64;
        Fe(self.exp[(e % m) as usize])
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        if a.0 == 0 {
            return b;
        }
        if b.0 == 0 {
            return a;
        }
        let la = self.log[a.0 as usize];
        let lb = self.log[b.0 as usize];
        let m = self.order - 1;
        let k = if lb >= la { lb - la } else { lb + m - la };
        let z = self.zech[k as usize];
        if z == NO_LOG {
            Fe::ZERO
        } else {
            Fe(self.exp[(la + z) as usize])
        }
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        if a.0 == 0 {
            a
        } else {
            Fe(self.exp[(self.log[a.0 as usize] + (self.order - 1) / 2) as usize])
        }
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        if a.0 == 0 || b.0 == 0 {
            Fe::ZERO
        } else {
            Fe(self.exp[(self.log[a.0 as usize] + self.log[b.0 as usize]) as usize])
        }
    }

    /// Multiplicative inverse; panics on zero.
    #[inline]
    pub fn inv(&self, a: Fe) -> Fe {
        assert!(a.0 != 0, "inverse of zero");
        let m = self.order - 1;
        Fe(self.exp[((m - self.log[a.0 as usize]) % m) as usize])
    }

    #[inline]
    pub fn div(&self, a: Fe, b: Fe) -> Fe {
        self.mul(a, self.inv(b))
    }

    pub fn pow(&self, a: Fe, e: u64) -> Fe {
        if e == 0 {
            return Fe::ONE;
        }
        if a.0 == 0 {
            return Fe::ZERO;
        }
        let m = (self.order - 1) as u64;
        Fe(self.exp[((self.log[a.0 as usize] as u64 * (e % m)) % m) as usize])
    }

    /// Signed power, a^e with e possibly negative (a nonzero when e < 0).
    pub fn pow_i(&self, a: Fe, e: i64) -> Fe {
        let m = (self.order - 1) as i64;
        if e >= 0 {
            self.pow(a, e as u64)
        } else {
            self.pow(a, e.rem_euclid(m) as u64)
        }
    }

    /// x^(q^k); k is reduced mod 6, which for x in F_(q^3) agrees with the
    /// reduction mod 3.
    #[inline]
    pub fn frob(&self, x: Fe, k: i64) -> Fe {
        let k = k.rem_euclid(6) as u32;
        if k == 0 || x.0 == 0 {
            return x;
        }
        self.pow(x, self.q.pow(k))
    }

    /// x^(p^k), k reduced mod 6h.
    pub fn frob_p(&self, x: Fe, k: i64) -> Fe {
        let k = k.rem_euclid(self.n as i64) as u32;
        if k == 0 || x.0 == 0 {
            return x;
        }
        self.pow(x, (self.p as u64).pow(k))
    }

    /// Membership in F_(q^k), k ∈ {1, 2, 3, 6}.
    #[inline]
    pub fn in_subfield(&self, x: Fe, k: u32) -> bool {
        self.masks[x.0 as usize] & mask_bit(k) != 0
    }

    /// Generator of F_(q^k)^*: g^((q^6 - 1)/(q^k - 1)).
    pub fn subfield_generator(&self, k: u32) -> Fe {
        self.exp(self.subfield_step(k))
    }

    fn subfield_step(&self, k: u32) -> u64 {
        (self.order as u64 - 1) / (self.q.pow(k) - 1)
    }

    /// Elements of F_(q^k) in increasing canonical order.
    pub fn subfield_elements(&self, k: u32) -> Vec<Fe> {
        if k == 1 {
            return self.fq_elems.clone();
        }
        (0..self.order)
            .map(Fe)
            .filter(|&x| self.in_subfield(x, k))
            .collect()
    }

    /// Nonzero elements of F_(q^k) as powers of the subfield generator,
    /// i.e. ordered by discrete log.
    pub fn subfield_units(&self, k: u32) -> Vec<Fe> {
        let step = self.subfield_step(k);
        (0..self.q.pow(k) - 1).map(|i| self.exp(i * step)).collect()
    }

    pub fn fq_elements(&self) -> &[Fe] {
        &self.fq_elems
    }

    /// Dense position of x inside F_(q^k): 0 for zero, 1 + i for the i-th power
    /// of the subfield generator.
    #[inline]
    pub fn dense_index(&self, x: Fe, k: u32) -> usize {
        if x.0 == 0 {
            0
        } else {
            1 + (self.log[x.0 as usize] as u64 / self.subfield_step(k)) as usize
        }
    }

    pub fn from_dense_index(&self, idx: usize, k: u32) -> Fe {
        if idx == 0 {
            Fe::ZERO
        } else {
            self.exp((idx as u64 - 1) * self.subfield_step(k))
        }
    }

    pub fn random_in_subfield<R: Rng + ?Sized>(&self, rng: &mut R, k: u32) -> Fe {
        let size = self.q.pow(k) as usize;
        self.from_dense_index(rng.gen_range(0..size), k)
    }

    pub fn random_unit_in_subfield<R: Rng + ?Sized>(&self, rng: &mut R, k: u32) -> Fe {
        let size = self.q.pow(k) as usize;
        self.from_dense_index(rng.gen_range(1..size), k)
    }

    /// The fixed F_q-basis (1, θ, θ²) of F_(q^3), θ the generator of F_(q^3)^*.
    pub fn fq3_basis(&self) -> [Fe; 3] {
        self.fq3_basis
    }

    /// Coordinates of x ∈ F_(q^3) over F_q in [`fq3_basis`](Self::fq3_basis).
    #[inline]
    pub fn fq3_coords(&self, x: Fe) -> [Fe; 3] {
        debug_assert!(self.in_subfield(x, 3));
        self.fq3_coords[self.dense_index(x, 3)]
    }

    pub fn fq3_from_coords(&self, c: [Fe; 3]) -> Fe {
        let b = self.fq3_basis;
        self.add(c[0], self.add(self.mul(c[1], b[1]), self.mul(c[2], b[2])))
    }

    /// F_p-basis (1, ζ, ..., ζ^(h-1)) of F_q.
    pub fn fq_basis_fp(&self) -> &[Fe] {
        &self.fq_basis_fp
    }

    /// Coordinates of x ∈ F_q over F_p, as residues.
    pub fn fq_coords_fp(&self, x: Fe) -> &[u32] {
        let h = self.h as usize;
        let i = self.dense_index(x, 1);
        &self.fq_fp_coords[i * h..(i + 1) * h]
    }

    fn check_degrees(&self, from: u32, to: u32) -> Result<()> {
        let ok = [1, 2, 3, 6].contains(&from) && [1, 2, 3, 6].contains(&to) && from.is_multiple_of(to);
        if ok {
            Ok(())
        } else {
            Err(Error::BadDegrees { from, to })
        }
    }

    /// N_(q^from / q^to)(x).
    pub fn norm(&self, x: Fe, from: u32, to: u32) -> Result<Fe> {
        self.check_degrees(from, to)?;
        if !self.in_subfield(x, from) {
            return Err(Error::NotInSubfield {
                elem: x.0,
                degree: from,
            });
        }
        let d = from / to;
        let m = (self.order - 1) as u64;
        let e = (0..d).fold(0u64, |acc, i| (acc + self.q.pow(to * i) % m) % m);
        Ok(self.pow(x, if e == 0 { m } else { e }))
    }

    /// Tr_(q^from / q^to)(x).
    pub fn trace(&self, x: Fe, from: u32, to: u32) -> Result<Fe> {
        self.check_degrees(from, to)?;
        if !self.in_subfield(x, from) {
            return Err(Error::NotInSubfield {
                elem: x.0,
                degree: from,
            });
        }
        let d = from / to;
        Ok((0..d).fold(Fe::ZERO, |acc, i| {
            self.add(acc, self.frob(x, (to * i) as i64))
        }))
    }

    /// N_(q^3/q) without the membership check, for hot loops.
    #[inline]
    pub fn norm3(&self, x: Fe) -> Fe {
        self.pow(x, 1 + self.q + self.q * self.q)
    }

    /// N_(q^6/q^3)(x) = x^(q^3+1).
    #[inline]
    pub fn norm63(&self, x: Fe) -> Fe {
        self.pow(x, self.q.pow(3) + 1)
    }

    #[inline]
    pub fn trace3(&self, x: Fe) -> Fe {
        self.add(x, self.add(self.frob(x, 1), self.frob(x, 2)))
    }

    /// x^((q-1)/2) == 1 for x ∈ F_q^*.
    pub fn is_square_in_fq(&self, x: Fe) -> Result<bool> {
        if x.is_zero() || !self.in_subfield(x, 1) {
            return Err(Error::NotInSubfield {
                elem: x.0,
                degree: 1,
            });
        }
        Ok(self.pow(x, (self.q - 1) / 2) == Fe::ONE)
    }

    pub fn smallest_nonsquare(&self) -> Fe {
        *self
            .fq_elems
            .iter()
            .find(|&&x| !x.is_zero() && !self.is_square_in_fq(x).unwrap())
            .expect("q odd has nonsquares")
    }

    /// A square root of x in F_(q^6), if any; of the two roots, the one with
    /// smaller canonical encoding.
    pub fn sqrt(&self, x: Fe) -> Option<Fe> {
        if x.is_zero() {
            return Some(x);
        }
        let l = self.log[x.0 as usize] as u64;
        if l % 2 == 1 {
            return None;
        }
        let m = (self.order - 1) as u64;
        let r1 = self.exp(l / 2);
        let r2 = self.exp(l / 2 + m / 2);
        Some(r1.min(r2))
    }

    /// The constant -1.
    pub fn minus_one(&self) -> Fe {
        self.fp(-1)
    }

    /// Small integer embedded in F_p.
    pub fn int(&self, v: i64) -> Fe {
        self.fp(v)
    }
}
