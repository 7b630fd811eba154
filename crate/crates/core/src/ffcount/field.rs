use crate::error::{Error, Result};
use crate::exactalg::is_prime_u64;

/// Largest field for which log/antilog tables are built.
const TABLE_LIMIT: usize = 1 << 22;

/// `F_{p^s} = F_p[T]/(modulus)`. Elements are indexed by `Σ a_i p^i`, where
/// `a_i` is the coefficient of `T^i`.
#[derive(Clone, Debug)]
pub struct FiniteField {
    p: u64,
    s: u32,
    size: usize,
    /// Monic modulus, ascending coefficients, length `s + 1`.
    modulus: Vec<u64>,
    generator: u32,
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl PartialEq for FiniteField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.s == other.s && self.modulus == other.modulus
    }
}

impl Eq for FiniteField {}

/// `F_{p^s}` with the least irreducible monic modulus, ordering candidates by
/// the integer `Σ_{i<s} c_i p^i` of their lower coefficients.
pub fn build_field(p: u64, s: u32) -> Result<FiniteField> {
    if !is_prime_u64(p) {
        return Err(Error::NotPrime(p));
    }
    if s == 0 {
        return Err(Error::InvalidInput(
            "extension degree must be at least 1".into(),
        ));
    }
    let size = p
        .checked_pow(s)
        .filter(|&q| q <= u64::from(u32::MAX))
        .ok_or_else(|| Error::BudgetExceeded(format!("field F_{p}^{s} exceeds 2^32 elements")))?
        as usize;
    let modulus = (0..size as u64)
        .map(|code| {
            let mut m = digits(code, p, s as usize);
            m.push(1);
            m
        })
        .find(|m| is_irreducible(m, p))
        .expect("irreducible polynomials exist in every degree");
    let mut field = FiniteField {
        p,
        s,
        size,
        modulus,
        generator: 0,
        exp: Vec::new(),
        log: Vec::new(),
    };
    if size <= TABLE_LIMIT {
        field.build_tables();
    }
    Ok(field)
}

fn digits(mut x: u64, p: u64, n: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        out.push(x % p);
        x /= p;
    }
    out
}

fn trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn inv_mod(a: u64, p: u64) -> u64 {
    // p is prime, so a^{p-2} is the inverse.
    let mut acc = 1u64;
    let mut b = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

fn poly_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r = trim(a.to_vec());
    let m = trim(m.to_vec());
    let dm = m.len() - 1;
    let inv = inv_mod(*m.last().unwrap(), p);
    while r.len() > dm {
        let c = r.last().unwrap() * inv % p;
        let shift = r.len() - 1 - dm;
        for (i, &mi) in m.iter().enumerate() {
            r[shift + i] = (r[shift + i] + p - c * mi % p) % p;
        }
        r = trim(r);
    }
    r
}

fn poly_mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    poly_rem(&out, m, p)
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
    while !b.is_empty() {
        let r = poly_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

/// Ben-Or test: `f` of degree `s` is irreducible iff
/// `gcd(x^{p^k} - x, f) = 1` for every `k ≤ s/2`.
fn is_irreducible(f: &[u64], p: u64) -> bool {
    let s = f.len() - 1;
    if s == 1 {
        return true;
    }
    if f[0] == 0 {
        return false;
    }
    let x = vec![0, 1];
    let mut xp = x.clone();
    for _ in 0..s / 2 {
        // xp <- xp^p mod f
        let mut acc = vec![1u64];
        let mut base = xp.clone();
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                acc = poly_mulmod(&acc, &base, f, p);
            }
            base = poly_mulmod(&base, &base, f, p);
            e >>= 1;
        }
        xp = acc;
        let mut diff = xp.clone();
        diff.resize(diff.len().max(2), 0);
        diff[1] = (diff[1] + p - 1) % p;
        let g = poly_gcd(f, &trim(diff), p);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

impl FiniteField {
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.s
    }

    /// Number of elements `Q = p^s`.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn zero(&self) -> u32 {
        0
    }

    pub fn one(&self) -> u32 {
        1
    }

    /// The prime-field element `c mod p`.
    pub fn from_int(&self, c: i64) -> u32 {
        c.rem_euclid(self.p as i64) as u32
    }

    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.size as u32
    }

    fn to_digits(&self, x: u32) -> Vec<u64> {
        digits(u64::from(x), self.p, self.s as usize)
    }

    fn encode_digits(&self, d: &[u64]) -> u32 {
        d.iter().rev().fold(0u64, |acc, &c| acc * self.p + c) as u32
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.p == 2 {
            return a ^ b;
        }
        let (p, mut a, mut b) = (self.p as u32, a, b);
        let (mut out, mut place) = (0u32, 1u32);
        while a > 0 || b > 0 {
            out += ((a % p + b % p) % p) * place;
            a /= p;
            b /= p;
            place = place.wrapping_mul(p);
        }
        out
    }

    pub fn neg(&self, a: u32) -> u32 {
        if self.p == 2 {
            return a;
        }
        let (p, mut a) = (self.p as u32, a);
        let (mut out, mut place) = (0u32, 1u32);
        while a > 0 {
            out += ((p - a % p) % p) * place;
            a /= p;
            place = place.wrapping_mul(p);
        }
        out
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    fn mul_slow(&self, a: u32, b: u32) -> u32 {
        let r = poly_mulmod(
            &self.to_digits(a),
            &self.to_digits(b),
            &self.modulus,
            self.p,
        );
        self.encode_digits(&r)
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        if self.exp.is_empty() {
            return self.mul_slow(a, b);
        }
        let n = self.size as u64 - 1;
        let e = (u64::from(self.log[a as usize]) + u64::from(self.log[b as usize])) % n;
        self.exp[e as usize]
    }

    pub fn pow(&self, a: u32, e: u64) -> u32 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        if !self.exp.is_empty() {
            let n = self.size as u64 - 1;
            let k = (u128::from(self.log[a as usize]) * u128::from(e) % u128::from(n)) as usize;
            return self.exp[k];
        }
        let (mut acc, mut base, mut e) = (1u32, a, e);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_slow(acc, base);
            }
            base = self.mul_slow(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u32) -> Option<u32> {
        (a != 0).then(|| self.pow(a, self.size as u64 - 2))
    }

    /// A generator of the multiplicative group (least index).
    pub fn generator(&self) -> u32 {
        self.generator
    }

    fn build_tables(&mut self) {
        let n = self.size as u64 - 1;
        let primes: Vec<u64> = {
            let (mut m, mut out, mut d) = (n, Vec::new(), 2u64);
            while d * d <= m {
                if m % d == 0 {
                    out.push(d);
                    while m % d == 0 {
                        m /= d;
                    }
                }
                d += 1;
            }
            if m > 1 {
                out.push(m);
            }
            out
        };
        let g = (1..self.size as u32)
            .find(|&g| primes.iter().all(|&r| self.pow(g, n / r) != 1))
            .expect("the multiplicative group is cyclic");
        let mut exp = Vec::with_capacity(n as usize);
        let mut log = vec![0u32; self.size];
        let mut x = 1u32;
        for k in 0..n as u32 {
            exp.push(x);
            log[x as usize] = k;
            x = self.mul_slow(x, g);
        }
        self.generator = g;
        self.exp = exp;
        self.log = log;
    }

    /// Image of every element of `base` under the embedding that sends the
    /// class of `T` to the least root of `base.modulus` in `self`.
    pub fn embedding_from(&self, base: &FiniteField) -> Result<Vec<u32>> {
        if base.p != self.p || !self.s.is_multiple_of(base.s) {
            return Err(Error::InvalidInput(format!(
                "F_{}^{} does not embed in F_{}^{}",
                base.p, base.s, self.p, self.s
            )));
        }
        let eval = |beta: u32| {
            base.modulus
                .iter()
                .rev()
                .fold(0u32, |acc, &c| self.add(self.mul(acc, beta), c as u32))
        };
        let beta = self
            .elements()
            .find(|&b| eval(b) == 0)
            .expect("an irreducible of degree dividing s has a root in F_{p^s}");
        Ok(base
            .elements()
            .map(|x| {
                base.to_digits(x)
                    .iter()
                    .rev()
                    .fold(0u32, |acc, &c| self.add(self.mul(acc, beta), c as u32))
            })
            .collect())
    }
}
